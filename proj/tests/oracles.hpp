#pragma once

// Reference implementations used only by tests. Each one reaches the
// expected value by a different algorithm than the library: direct solves
// instead of gradient descent, counting ranks instead of sort-grouping,
// Jacobi rotations instead of randomized projection, literal formula
// evaluation instead of the rearranged production forms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace oracles {

using Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Least-squares via the normal equations (W'W) M = W'B, solved by
/// Gaussian elimination with partial pivoting. Requires full column rank.
inline Matrix normal_equations(const Matrix& W, const Matrix& B) {
  Matrix A = W.transpose() * W;
  Matrix rhs = W.transpose() * B;
  const Index n = A.rows();
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    for (Index r = col + 1; r < n; ++r)
      if (std::abs(A(r, col)) > std::abs(A(pivot, col))) pivot = r;
    if (A(pivot, col) == 0.0) throw std::runtime_error("normal_equations: singular system");
    A.row(col).swap(A.row(pivot));
    rhs.row(col).swap(rhs.row(pivot));
    for (Index r = col + 1; r < n; ++r) {
      const double f = A(r, col) / A(col, col);
      A.row(r).tail(n - col) -= f * A.row(col).tail(n - col);
      rhs.row(r) -= f * rhs.row(col);
    }
  }
  Matrix M = Matrix::Zero(n, rhs.cols());
  for (Index r = n - 1; r >= 0; --r) {
    Eigen::RowVectorXd acc = rhs.row(r);
    for (Index c = r + 1; c < n; ++c) acc -= A(r, c) * M.row(c);
    M.row(r) = acc / A(r, r);
  }
  return M;
}

/// Average-tie ranks by counting: rank_i = #less + (#equal + 1) / 2.
inline std::vector<double> counting_ranks(const std::vector<double>& x) {
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) ++less;
      if (x[j] == x[i]) ++equal;
    }
    ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

/// Spearman via counting ranks and a textbook Pearson evaluation; NaN for
/// constant inputs.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = counting_ranks(x);
  const auto ry = counting_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
    sxy += (rx[i] - mx) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

/// Tie-free special case: rho = 1 - 6 sum(d^2) / (n(n^2-1)).
inline double spearman_no_ties(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = counting_ranks(x);
  const auto ry = counting_ranks(y);
  double sum_d2 = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) sum_d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double n = static_cast<double>(x.size());
  return 1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0));
}

/// Singular values by one-sided Jacobi: rotate column pairs of A until all
/// are mutually orthogonal; the singular values are the column norms.
inline Vector jacobi_singular_values(Matrix A) {
  if (A.rows() < A.cols()) A = Matrix(A.transpose());
  const Index m = A.cols();
  bool rotated = true;
  for (int sweep = 0; sweep < 60 && rotated; ++sweep) {
    rotated = false;
    for (Index p = 0; p < m - 1; ++p) {
      for (Index q = p + 1; q < m; ++q) {
        const double app = A.col(p).squaredNorm();
        const double aqq = A.col(q).squaredNorm();
        const double apq = A.col(p).dot(A.col(q));
        if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Vector col_p = A.col(p);
        A.col(p) = c * col_p - s * A.col(q);
        A.col(q) = s * col_p + c * A.col(q);
      }
    }
  }
  std::vector<double> sv(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) sv[static_cast<std::size_t>(j)] = A.col(j).norm();
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  Vector out(m);
  for (Index j = 0; j < m; ++j) out(j) = sv[static_cast<std::size_t>(j)];
  return out;
}

/// Literal normalized entropy: H(G) = -1/log|G| * sum_j p_j log p_j over
/// the clusters j the group's members land in. Singleton groups are 0.
inline double entropy_literal(const std::vector<Index>& members,
                              const std::vector<Index>& labels) {
  const double g = static_cast<double>(members.size());
  if (members.size() <= 1) return 0.0;
  std::map<Index, double> counts;
  for (const Index m : members) counts[labels[static_cast<std::size_t>(m)]] += 1.0;
  double h = 0.0;
  for (const auto& [cluster, n] : counts) {
    const double p = n / g;
    h += p * std::log(p);
  }
  return -h / std::log(g);
}

/// Globally optimal 2-means objective by enumerating every bipartition.
inline double best_two_means_objective(const Matrix& X) {
  const Index n = X.rows();
  if (n > 20) throw std::runtime_error("best_two_means_objective: too many points");
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    Eigen::RowVectorXd c0 = Eigen::RowVectorXd::Zero(X.cols());
    Eigen::RowVectorXd c1 = Eigen::RowVectorXd::Zero(X.cols());
    int n0 = 0, n1 = 0;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        c1 += X.row(i);
        ++n1;
      } else {
        c0 += X.row(i);
        ++n0;
      }
    }
    c0 /= n0;
    c1 /= n1;
    double obj = 0.0;
    for (Index i = 0; i < n; ++i)
      obj += (mask & (1u << i)) ? (X.row(i) - c1).squaredNorm() : (X.row(i) - c0).squaredNorm();
    best = std::min(best, obj);
  }
  return best;
}

/// Window co-occurrence counts the slow way: for every ordered token-pair
/// inside each document, bump both directions when their distance is
/// within the window.
inline std::map<std::pair<std::string, std::string>, long long> brute_cooccurrence(
    const std::vector<std::vector<std::string>>& documents,
    const std::vector<std::string>& vocab, int window) {
  std::map<std::pair<std::string, std::string>, long long> counts;
  const auto in_vocab = [&](const std::string& w) {
    return std::find(vocab.begin(), vocab.end(), w) != vocab.end();
  };
  for (const auto& doc : documents) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      for (std::size_t j = i + 1; j < doc.size() && j - i <= static_cast<std::size_t>(window);
           ++j) {
        if (!in_vocab(doc[i]) || !in_vocab(doc[j])) continue;
        ++counts[{doc[i], doc[j]}];
        ++counts[{doc[j], doc[i]}];
      }
    }
  }
  return counts;
}

/// Central finite difference of f with respect to one scalar parameter,
/// restoring it afterwards.
template <class F>
inline double central_difference(F f, double& param, double step) {
  const double saved = param;
  param = saved + step;
  const double hi = f();
  param = saved - step;
  const double lo = f();
  param = saved;
  return (hi - lo) / (2.0 * step);
}

}  // namespace oracles
