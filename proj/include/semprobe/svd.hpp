#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "semprobe/matrix.hpp"
#include "semprobe/rng.hpp"

namespace semprobe {

template <class Scalar>
struct SvdResultT {
  Mat<Scalar> U;                 ///< n x d, orthonormal columns
  Vec<Scalar> singular_values;   ///< length d, nonincreasing
  Mat<Scalar> V;                 ///< m x d, orthonormal columns
};

using SvdResult = SvdResultT<double>;

namespace detail {

template <class Scalar>
Mat<Scalar> thin_q(const Mat<Scalar>& x) {
  Eigen::HouseholderQR<Mat<Scalar>> qr(x);
  Mat<Scalar> q = Mat<Scalar>::Identity(x.rows(), x.cols());
  q = qr.householderQ() * q;
  return q;
}

}  // namespace detail

/// Seeded randomized truncated SVD of a dense or sparse matrix: Gaussian
/// range finder with 10 oversampling columns and two power passes, then an
/// exact SVD of the projected l x m matrix. The sketch width is capped at
/// min(n, m), so small inputs are factored exactly (up to rounding).
template <class MatrixType>
SvdResultT<typename MatrixType::Scalar> truncated_svd(const MatrixType& A, Index d,
                                                      std::uint64_t seed) {
  using Scalar = typename MatrixType::Scalar;
  const Index n = A.rows();
  const Index m = A.cols();
  const Index rank_cap = std::min(n, m);
  if (d < 1) throw std::invalid_argument("truncated_svd: d must be positive");
  if (d > rank_cap)
    throw std::invalid_argument("truncated_svd: d exceeds min(rows, cols)");
  const Index l = std::min<Index>(d + 10, rank_cap);

  Rng rng(seed);
  Mat<Scalar> omega(m, l);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < l; ++j) omega(i, j) = static_cast<Scalar>(rng.normal());

  Mat<Scalar> y = A * omega;
  Mat<Scalar> q = detail::thin_q(y);
  for (int pass = 0; pass < 2; ++pass) {
    Mat<Scalar> z = A.transpose() * q;
    Mat<Scalar> qz = detail::thin_q(z);
    y = A * qz;
    q = detail::thin_q(y);
  }

  Mat<Scalar> projected = q.transpose() * A;
  Eigen::BDCSVD<Mat<Scalar>> svd(projected, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdResultT<Scalar> out;
  out.U = q * svd.matrixU().leftCols(d);
  out.singular_values = svd.singularValues().head(d);
  out.V = svd.matrixV().leftCols(d);
  return out;
}

}  // namespace semprobe
