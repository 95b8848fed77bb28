#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semprobe/matrix.hpp"

namespace semprobe {

/// 1-based ranks with ties assigned the mean of the positions they span
/// (fractional ranks), so sum(ranks) == n(n+1)/2 always holds.
template <class Scalar>
std::vector<double> fractional_ranks(const std::vector<Scalar>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return a < b;
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

/// Spearman's rank correlation: Pearson correlation of the fractional
/// ranks. Returns nullopt when either input is constant, where the
/// statistic is undefined; a defined result always lies in [-1, 1].
template <class Scalar>
std::optional<double> spearman(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("spearman: need at least two observations");
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;  // both rank vectors share this mean
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

template <class D1, class D2>
std::optional<double> spearman(const Eigen::MatrixBase<D1>& x, const Eigen::MatrixBase<D2>& y) {
  std::vector<double> xv(static_cast<std::size_t>(x.size()));
  std::vector<double> yv(static_cast<std::size_t>(y.size()));
  for (Index i = 0; i < x.size(); ++i) xv[static_cast<std::size_t>(i)] = x(i);
  for (Index i = 0; i < y.size(); ++i) yv[static_cast<std::size_t>(i)] = y(i);
  return spearman(xv, yv);
}

/// Spearman correlation per column (one value per attribute).
template <class D1, class D2>
std::vector<std::optional<double>> column_correlations(const Eigen::MatrixBase<D1>& predicted,
                                                       const Eigen::MatrixBase<D2>& target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols())
    throw std::invalid_argument("column_correlations: shape mismatch");
  std::vector<std::optional<double>> out(static_cast<std::size_t>(predicted.cols()));
  for (Index j = 0; j < predicted.cols(); ++j)
    out[static_cast<std::size_t>(j)] = spearman(predicted.col(j).eval(), target.col(j).eval());
  return out;
}

/// Spearman correlation per row (one value per word).
template <class D1, class D2>
std::vector<std::optional<double>> row_correlations(const Eigen::MatrixBase<D1>& predicted,
                                                    const Eigen::MatrixBase<D2>& target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols())
    throw std::invalid_argument("row_correlations: shape mismatch");
  std::vector<std::optional<double>> out(static_cast<std::size_t>(predicted.rows()));
  for (Index i = 0; i < predicted.rows(); ++i)
    out[static_cast<std::size_t>(i)] =
        spearman(predicted.row(i).transpose().eval(), target.row(i).transpose().eval());
  return out;
}

struct GroupStat {
  double mean = 0.0;        ///< mean over the defined members; NaN if none
  Index n_defined = 0;
  Index n_excluded = 0;     ///< members whose correlation was undefined
};

/// Mean over the defined entries; undefined entries are counted, not
/// imputed. With no defined entries the mean is NaN.
inline GroupStat mean_defined(const std::vector<std::optional<double>>& values) {
  GroupStat s;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++s.n_defined;
    } else {
      ++s.n_excluded;
    }
  }
  s.mean = s.n_defined > 0 ? sum / static_cast<double>(s.n_defined)
                           : std::numeric_limits<double>::quiet_NaN();
  return s;
}

/// Groups values by label and averages the defined ones per group. Groups
/// appear in order of first appearance in `group_of`.
inline std::vector<std::pair<std::string, GroupStat>> aggregate(
    const std::vector<std::optional<double>>& values, const std::vector<std::string>& group_of) {
  if (values.size() != group_of.size())
    throw std::invalid_argument("aggregate: values and labels differ in length");
  std::vector<std::string> order;
  std::vector<std::vector<std::optional<double>>> buckets;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto it = std::find(order.begin(), order.end(), group_of[i]);
    std::size_t slot;
    if (it == order.end()) {
      order.push_back(group_of[i]);
      buckets.emplace_back();
      slot = order.size() - 1;
    } else {
      slot = static_cast<std::size_t>(it - order.begin());
    }
    buckets[slot].push_back(values[i]);
  }
  std::vector<std::pair<std::string, GroupStat>> out;
  out.reserve(order.size());
  for (std::size_t g = 0; g < order.size(); ++g)
    out.emplace_back(order[g], mean_defined(buckets[g]));
  return out;
}

/// Full correlation summary of a prediction matrix against its target.
struct CorrelationReport {
  std::vector<std::optional<double>> per_attribute;  ///< one per column
  std::vector<std::optional<double>> per_word;       ///< one per row
  GroupStat attribute_overall;
  GroupStat word_overall;
  std::vector<std::pair<std::string, GroupStat>> domain_means;    ///< empty without a domain map
  std::vector<std::pair<std::string, GroupStat>> category_means;
};

/// Scores predictions row of which may be invalid (failed folds): invalid
/// rows get an undefined per-word correlation and are dropped from the
/// per-attribute columns. `attribute_domains` may be empty.
CorrelationReport score_estimates(const Mat<double>& predicted, const Mat<double>& target,
                                  const std::vector<std::string>& attribute_domains,
                                  const std::vector<std::string>& word_categories,
                                  const std::vector<std::uint8_t>* rows_valid = nullptr);

}  // namespace semprobe
