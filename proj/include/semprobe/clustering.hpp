#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "semprobe/errors.hpp"
#include "semprobe/matrix.hpp"
#include "semprobe/rng.hpp"

namespace semprobe {

/// k-means++ initialization: the first centroid is uniform, later ones are
/// drawn with probability proportional to the squared distance to the
/// nearest centroid chosen so far.
template <class Scalar>
Mat<Scalar> kmeanspp_seed(const Mat<Scalar>& points, Index k, std::uint64_t seed) {
  const Index n = points.rows();
  if (k < 1) throw std::invalid_argument("kmeanspp_seed: k must be positive");
  if (k > n) throw std::invalid_argument("kmeanspp_seed: k exceeds number of points");
  Rng rng(seed);
  Mat<Scalar> centroids(k, points.cols());
  centroids.row(0) = points.row(rng.index(n));
  if (k == 1) return centroids;
  Vec<Scalar> d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (Index j = 1; j < k; ++j) {
    // All points may already coincide with a centroid; fall back to uniform.
    const Index pick = d2.sum() > Scalar(0) ? rng.weighted_index(d2) : rng.index(n);
    centroids.row(j) = points.row(pick);
    d2 = d2.cwiseMin((points.rowwise() - centroids.row(j)).rowwise().squaredNorm());
  }
  return centroids;
}

struct ClusterAssignment {
  std::vector<Index> labels;
  Index k = 0;
  double objective = 0.0;                 ///< sum of squared distances to assigned centroids
  std::vector<double> objective_history;  ///< objective after each Lloyd iteration
  int iterations = 0;
  bool converged = false;  ///< labels reached a fixpoint before max_iters
};

/// Lloyd's algorithm from a k-means++ start. Distance ties go to the
/// lowest centroid index. A cluster that empties is reseeded with the
/// point farthest from its current centroid (among clusters that can
/// spare a point). Stops at a label fixpoint or after max_iters.
template <class Scalar>
ClusterAssignment kmeans(const Mat<Scalar>& points, Index k, std::uint64_t seed,
                         int max_iters = 300) {
  const Index n = points.rows();
  if (max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be positive");
  Mat<Scalar> centroids = kmeanspp_seed(points, k, seed);

  ClusterAssignment out;
  out.k = k;
  out.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  Mat<Scalar> sums(k, points.cols());

  double prev_objective = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iters; ++iter) {
    // Assignment step; ties break toward the lowest index.
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      Scalar best_d2 = (points.row(i) - centroids.row(0)).squaredNorm();
      for (Index j = 1; j < k; ++j) {
        const Scalar d2 = (points.row(i) - centroids.row(j)).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = j;
        }
      }
      if (out.labels[static_cast<std::size_t>(i)] != best) {
        out.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    // Update step: means of the assigned points; empty clusters keep
    // their centroid until repaired below.
    std::fill(counts.begin(), counts.end(), Index{0});
    sums.setZero();
    for (Index i = 0; i < n; ++i) {
      sums.row(out.labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)])];
    }
    for (Index j = 0; j < k; ++j)
      if (counts[static_cast<std::size_t>(j)] > 0)
        centroids.row(j) = sums.row(j) / Scalar(counts[static_cast<std::size_t>(j)]);

    // Reseed empty clusters with the point farthest from its assigned
    // centroid, taken from a cluster that keeps at least one member.
    for (Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      Index donor = -1;
      Scalar worst = Scalar(-1);
      for (Index i = 0; i < n; ++i) {
        const Index li = out.labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(li)] < 2) continue;
        const Scalar d2 = (points.row(i) - centroids.row(li)).squaredNorm();
        if (d2 > worst) {
          worst = d2;
          donor = i;
        }
      }
      if (donor < 0) throw Error("kmeans: cannot repair empty cluster");
      const Index from = out.labels[static_cast<std::size_t>(donor)];
      --counts[static_cast<std::size_t>(from)];
      out.labels[static_cast<std::size_t>(donor)] = j;
      counts[static_cast<std::size_t>(j)] = 1;
      centroids.row(j) = points.row(donor);
      changed = true;
    }

    double objective = 0.0;
    for (Index i = 0; i < n; ++i)
      objective += static_cast<double>(
          (points.row(i) - centroids.row(out.labels[static_cast<std::size_t>(i)]))
              .squaredNorm());
    out.objective_history.push_back(objective);
    out.iterations = iter + 1;
    if (objective > prev_objective * (1.0 + 1e-12) + 1e-12)
      throw Error("kmeans: objective increased between iterations");
    prev_objective = objective;
    out.objective = objective;

    if (!changed) {
      out.converged = true;
      break;
    }
  }
  return out;
}

/// Normalized entropy of one gold group's split across clusters,
///   H(G) = -1/log|G| * sum_j p_j log p_j,  p_j = n_j / |G|,
/// computed as 1 - sum_j n_j log n_j / (|G| log |G|) so the boundary
/// cases are exact: 0 when the group stays whole, 1 when split into
/// singletons. Singleton groups score 0.
inline double normalized_entropy(const std::vector<Index>& members,
                                 const std::vector<Index>& labels) {
  if (members.empty()) throw std::invalid_argument("normalized_entropy: empty group");
  const std::size_t g = members.size();
  if (g == 1) return 0.0;
  std::map<Index, std::size_t> counts;
  for (const Index m : members) {
    if (m < 0 || m >= static_cast<Index>(labels.size()))
      throw std::invalid_argument("normalized_entropy: member without a cluster label");
    ++counts[labels[static_cast<std::size_t>(m)]];
  }
  double sum_nlogn = 0.0;
  for (const auto& [label, count] : counts)
    sum_nlogn += static_cast<double>(count) * std::log(static_cast<double>(count));
  const double h =
      1.0 - sum_nlogn / (static_cast<double>(g) * std::log(static_cast<double>(g)));
  return std::clamp(h, 0.0, 1.0);
}

struct EntropyReport {
  struct Row {
    int gold_id = 0;
    Index size = 0;
    double mean_entropy = 0.0;  ///< mean over trials
  };
  std::vector<Row> per_group;  ///< ascending gold id
  double overall_mean = 0.0;   ///< mean of per-group means
  int trials = 0;
  Index k = 0;
};

/// Repeated k-means scored against a gold grouping: trial t clusters with
/// seed (seed XOR t) and every gold group's normalized entropy is averaged
/// over trials. Every row must carry a gold id.
template <class Scalar>
EntropyReport entropy_trials(const Mat<Scalar>& points, const std::vector<int>& gold_of_row,
                             Index k, int trials, std::uint64_t seed, int max_iters = 300) {
  const Index n = points.rows();
  if (static_cast<Index>(gold_of_row.size()) != n)
    throw std::invalid_argument("entropy_trials: gold labels do not cover the rows");
  if (trials < 1) throw std::invalid_argument("entropy_trials: trials must be positive");

  std::map<int, std::vector<Index>> groups;
  for (Index i = 0; i < n; ++i) groups[gold_of_row[static_cast<std::size_t>(i)]].push_back(i);

  EntropyReport report;
  report.trials = trials;
  report.k = k;
  report.per_group.reserve(groups.size());
  for (const auto& [id, members] : groups)
    report.per_group.push_back({id, static_cast<Index>(members.size()), 0.0});

  for (int t = 0; t < trials; ++t) {
    const auto assignment =
        kmeans(points, k, seed ^ static_cast<std::uint64_t>(t), max_iters);
    std::size_t row = 0;
    for (const auto& [id, members] : groups) {
      report.per_group[row].mean_entropy += normalized_entropy(members, assignment.labels);
      ++row;
    }
  }
  double total = 0.0;
  for (auto& row : report.per_group) {
    row.mean_entropy /= static_cast<double>(trials);
    total += row.mean_entropy;
  }
  report.overall_mean = total / static_cast<double>(report.per_group.size());
  return report;
}

}  // namespace semprobe
