#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semprobe/align.hpp"
#include "semprobe/errors.hpp"
#include "semprobe/matrix.hpp"
#include "semprobe/rng.hpp"

namespace semprobe {

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 1000;
  double adagrad_epsilon = 1e-8;
  Index batch_size = 0;  ///< 0 trains full-batch
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  double stop_rel_tol = 1e-9;  ///< early stop: relative loss change below this...
  int stop_window = 20;        ///< ...for this many consecutive epochs

  void validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
    if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
    if (!(adagrad_epsilon > 0)) throw std::invalid_argument("adagrad_epsilon must be positive");
    if (batch_size < 0) throw std::invalid_argument("batch_size must be nonnegative");
    if (!(init_scale > 0)) throw std::invalid_argument("init_scale must be positive");
    if (!(stop_rel_tol >= 0)) throw std::invalid_argument("stop_rel_tol must be nonnegative");
    if (stop_window < 1) throw std::invalid_argument("stop_window must be at least 1");
  }
};

struct TrainDiagnostics {
  std::vector<double> loss_history;  ///< mean-squared error at the start of each epoch
  int epochs_run = 0;
  double final_loss = 0.0;
};

template <class Scalar>
struct LinearMapT {
  Mat<Scalar> M;  ///< d x a; prediction is x * M with no bias

  template <class Derived>
  Mat<Scalar> operator()(const Eigen::MatrixBase<Derived>& inputs) const {
    return inputs * M;
  }
};

template <class Scalar>
struct MlpMapT {
  Mat<Scalar> W1;  ///< d x h
  Vec<Scalar> b1;  ///< h
  Mat<Scalar> W2;  ///< h x a
  Vec<Scalar> b2;  ///< a

  Index hidden() const { return W1.cols(); }

  template <class Derived>
  Mat<Scalar> operator()(const Eigen::MatrixBase<Derived>& inputs) const {
    Mat<Scalar> a1 =
        (Scalar(1) /
         (Scalar(1) + (-((inputs * W1).rowwise() + b1.transpose())).array().exp()))
            .matrix();
    return (a1 * W2).rowwise() + b2.transpose();
  }
};

using LinearMap = LinearMapT<double>;
using MlpMap = MlpMapT<double>;

template <class Scalar, class Derived>
Mat<Scalar> predict(const LinearMapT<Scalar>& model, const Eigen::MatrixBase<Derived>& inputs) {
  return model(inputs);
}

template <class Scalar, class Derived>
Mat<Scalar> predict(const MlpMapT<Scalar>& model, const Eigen::MatrixBase<Derived>& inputs) {
  return model(inputs);
}

/// Mean over all entries of the squared residual.
template <class D1, class D2>
double mse_loss(const Eigen::MatrixBase<D1>& predicted, const Eigen::MatrixBase<D2>& target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  if (predicted.size() == 0) throw std::invalid_argument("mse_loss: empty matrices");
  return static_cast<double>((predicted - target).array().square().sum()) /
         static_cast<double>(predicted.size());
}

/// One AdaGrad step: accumulate the squared gradient, then scale each
/// coordinate by lr / (sqrt(accum) + eps). Entries with zero gradient are
/// left untouched, so eps == 0 never divides by zero on a cold start.
template <class Plain, class Scalar = typename Plain::Scalar>
void adagrad_update(Plain& param, const Plain& grad, Plain& accum, Scalar learning_rate,
                    Scalar epsilon) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols() ||
      param.rows() != accum.rows() || param.cols() != accum.cols())
    throw std::invalid_argument("adagrad_update: shape mismatch");
  if (!grad.allFinite()) throw TrainingError("adagrad_update: non-finite gradient");
  accum.array() += grad.array().square();
  param.array() -=
      (grad.array() == Scalar(0))
          .select(Scalar(0),
                  learning_rate * grad.array() / (accum.array().sqrt() + epsilon));
}

namespace detail {

/// True once the last `window` relative epoch-over-epoch loss changes all
/// fall below `rel_tol`.
inline bool loss_plateaued(const std::vector<double>& history, double rel_tol, int window) {
  if (rel_tol <= 0) return false;
  if (static_cast<int>(history.size()) < window + 1) return false;
  const std::size_t n = history.size();
  for (int k = 0; k < window; ++k) {
    const double prev = history[n - 2 - static_cast<std::size_t>(k)];
    const double cur = history[n - 1 - static_cast<std::size_t>(k)];
    const double denom = std::abs(prev) > 0 ? std::abs(prev) : 1.0;
    if (std::abs(cur - prev) / denom >= rel_tol) return false;
  }
  return true;
}

inline void check_loss(double loss, int epoch) {
  if (!std::isfinite(loss))
    throw TrainingError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
}

}  // namespace detail

/// Full-batch linear training expressed through the training-set moments
/// gram = W'W, cross = W'B and ssq_b = |B|^2, so the per-epoch cost is
/// independent of the number of rows. Produces bit-identical results to
/// train_linear on the same data because the full-batch gradient
/// 2/(n a) (W'W M - W'B) only touches the data through those moments.
template <class Scalar>
LinearMapT<Scalar> train_linear_gram(const Mat<Scalar>& gram, const Mat<Scalar>& cross,
                                     Scalar ssq_b, Index n_rows, const TrainConfig& cfg,
                                     TrainDiagnostics* diag = nullptr) {
  cfg.validate();
  if (gram.rows() != gram.cols()) throw std::invalid_argument("train_linear_gram: gram not square");
  if (cross.rows() != gram.rows()) throw std::invalid_argument("train_linear_gram: moment shape mismatch");
  if (n_rows < 1) throw std::invalid_argument("train_linear_gram: need at least one row");

  const Index d = gram.rows();
  const Index a = cross.cols();
  const Scalar denom = Scalar(n_rows) * Scalar(a);
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar eps = static_cast<Scalar>(cfg.adagrad_epsilon);

  Mat<Scalar> M = Mat<Scalar>::Zero(d, a);
  Mat<Scalar> accum = Mat<Scalar>::Zero(d, a);
  Mat<Scalar> gm(d, a), grad(d, a);

  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));
  int epochs_run = 0;
  auto loss_at = [&](const Mat<Scalar>& m, const Mat<Scalar>& gram_m) {
    const Scalar quad = (m.cwiseProduct(gram_m)).sum() - Scalar(2) * (m.cwiseProduct(cross)).sum();
    return static_cast<double>((quad + ssq_b) / denom);
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    gm.noalias() = gram * M;
    const double loss = loss_at(M, gm);
    detail::check_loss(loss, epoch);
    history.push_back(std::max(0.0, loss));
    grad = (Scalar(2) / denom) * (gm - cross);
    adagrad_update(M, grad, accum, lr, eps);
    ++epochs_run;
    if (detail::loss_plateaued(history, cfg.stop_rel_tol, cfg.stop_window)) break;
  }

  gm.noalias() = gram * M;
  const double final_loss = std::max(0.0, loss_at(M, gm));
  detail::check_loss(final_loss, epochs_run);
  if (diag) {
    diag->loss_history = std::move(history);
    diag->epochs_run = epochs_run;
    diag->final_loss = final_loss;
  }
  return {std::move(M)};
}

/// Trains the bias-free linear map B ~ W M with AdaGrad on the MSE loss,
/// starting from M = 0. batch_size 0 runs full batch; otherwise rows are
/// reshuffled every epoch and consumed in contiguous slices.
template <class Scalar>
LinearMapT<Scalar> train_linear(const Mat<Scalar>& W, const Mat<Scalar>& B,
                                const TrainConfig& cfg, TrainDiagnostics* diag = nullptr) {
  cfg.validate();
  if (W.rows() != B.rows()) throw std::invalid_argument("train_linear: row mismatch");
  if (W.rows() < 1) throw std::invalid_argument("train_linear: need at least one row");

  if (cfg.batch_size == 0) {
    const Mat<Scalar> gram = W.transpose() * W;
    const Mat<Scalar> cross = W.transpose() * B;
    return train_linear_gram<Scalar>(gram, cross, B.squaredNorm(), W.rows(), cfg, diag);
  }

  const Index n = W.rows(), d = W.cols(), a = B.cols();
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar eps = static_cast<Scalar>(cfg.adagrad_epsilon);
  Mat<Scalar> M = Mat<Scalar>::Zero(d, a);
  Mat<Scalar> accum = Mat<Scalar>::Zero(d, a);
  Rng rng(cfg.seed);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;

  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));
  int epochs_run = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss = mse_loss(W * M, B);
    detail::check_loss(loss, epoch);
    history.push_back(loss);
    rng.shuffle(perm);
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index m = std::min<Index>(cfg.batch_size, n - start);
      Mat<Scalar> Wb(m, d), Bb(m, a);
      for (Index r = 0; r < m; ++r) {
        Wb.row(r) = W.row(perm[static_cast<std::size_t>(start + r)]);
        Bb.row(r) = B.row(perm[static_cast<std::size_t>(start + r)]);
      }
      const Mat<Scalar> grad =
          (Scalar(2) / (Scalar(m) * Scalar(a))) * (Wb.transpose() * (Wb * M - Bb));
      adagrad_update(M, grad, accum, lr, eps);
    }
    ++epochs_run;
    if (detail::loss_plateaued(history, cfg.stop_rel_tol, cfg.stop_window)) break;
  }

  const double final_loss = mse_loss(W * M, B);
  detail::check_loss(final_loss, epochs_run);
  if (diag) {
    diag->loss_history = std::move(history);
    diag->epochs_run = epochs_run;
    diag->final_loss = final_loss;
  }
  return {std::move(M)};
}

template <class Scalar>
struct MlpGradientsT {
  Mat<Scalar> W1;
  Vec<Scalar> b1;
  Mat<Scalar> W2;
  Vec<Scalar> b2;
  double loss = 0.0;  ///< MSE of the forward pass the gradients came from
};

/// Backpropagated gradients of the MSE loss for one batch.
template <class Scalar>
MlpGradientsT<Scalar> mlp_mse_gradients(const MlpMapT<Scalar>& net, const Mat<Scalar>& inputs,
                                        const Mat<Scalar>& targets) {
  const Index m = inputs.rows();
  const Index a = targets.cols();
  if (m != targets.rows()) throw std::invalid_argument("mlp_mse_gradients: row mismatch");

  const Mat<Scalar> z1 = (inputs * net.W1).rowwise() + net.b1.transpose();
  const Mat<Scalar> a1 = (Scalar(1) / (Scalar(1) + (-z1.array()).exp())).matrix();
  const Mat<Scalar> y = (a1 * net.W2).rowwise() + net.b2.transpose();

  const Scalar scale = Scalar(2) / (Scalar(m) * Scalar(a));
  const Mat<Scalar> dy = scale * (y - targets);
  const Mat<Scalar> dz1 =
      (dy * net.W2.transpose()).cwiseProduct((a1.array() * (Scalar(1) - a1.array())).matrix());

  MlpGradientsT<Scalar> g;
  g.W2.noalias() = a1.transpose() * dy;
  g.b2 = dy.colwise().sum().transpose();
  g.W1.noalias() = inputs.transpose() * dz1;
  g.b1 = dz1.colwise().sum().transpose();
  g.loss = static_cast<double>((y - targets).array().square().sum()) /
           static_cast<double>(m * a);
  return g;
}

/// One hidden layer of logistic units, linear read-out, biases in both
/// layers. Weights start symmetric-uniform scaled by init_scale/sqrt(fan-in),
/// biases at zero; all four parameter groups share the AdaGrad schedule.
template <class Scalar>
MlpMapT<Scalar> train_mlp(const Mat<Scalar>& W, const Mat<Scalar>& B, const TrainConfig& cfg,
                          Index hidden = 150, TrainDiagnostics* diag = nullptr) {
  cfg.validate();
  if (W.rows() != B.rows()) throw std::invalid_argument("train_mlp: row mismatch");
  if (W.rows() < 1) throw std::invalid_argument("train_mlp: need at least one row");
  if (hidden < 1) throw std::invalid_argument("train_mlp: hidden units must be positive");

  const Index n = W.rows(), d = W.cols(), a = B.cols();
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar eps = static_cast<Scalar>(cfg.adagrad_epsilon);

  Rng rng(cfg.seed);
  MlpMapT<Scalar> net;
  const double s1 = cfg.init_scale / std::sqrt(static_cast<double>(d));
  const double s2 = cfg.init_scale / std::sqrt(static_cast<double>(hidden));
  net.W1.resize(d, hidden);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < hidden; ++j) net.W1(i, j) = static_cast<Scalar>(rng.uniform(-s1, s1));
  net.b1 = Vec<Scalar>::Zero(hidden);
  net.W2.resize(hidden, a);
  for (Index i = 0; i < hidden; ++i)
    for (Index j = 0; j < a; ++j) net.W2(i, j) = static_cast<Scalar>(rng.uniform(-s2, s2));
  net.b2 = Vec<Scalar>::Zero(a);

  Mat<Scalar> acc_W1 = Mat<Scalar>::Zero(d, hidden);
  Vec<Scalar> acc_b1 = Vec<Scalar>::Zero(hidden);
  Mat<Scalar> acc_W2 = Mat<Scalar>::Zero(hidden, a);
  Vec<Scalar> acc_b2 = Vec<Scalar>::Zero(a);

  auto apply = [&](const MlpGradientsT<Scalar>& g) {
    adagrad_update(net.W1, g.W1, acc_W1, lr, eps);
    adagrad_update(net.b1, g.b1, acc_b1, lr, eps);
    adagrad_update(net.W2, g.W2, acc_W2, lr, eps);
    adagrad_update(net.b2, g.b2, acc_b2, lr, eps);
  };

  const bool full_batch = cfg.batch_size == 0;
  std::vector<Index> perm;
  if (!full_batch) {
    perm.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  }

  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));
  int epochs_run = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (full_batch) {
      const auto g = mlp_mse_gradients(net, W, B);
      detail::check_loss(g.loss, epoch);
      history.push_back(g.loss);
      apply(g);
    } else {
      const double loss = mse_loss(net(W), B);
      detail::check_loss(loss, epoch);
      history.push_back(loss);
      rng.shuffle(perm);
      for (Index start = 0; start < n; start += cfg.batch_size) {
        const Index m = std::min<Index>(cfg.batch_size, n - start);
        Mat<Scalar> Wb(m, d), Bb(m, a);
        for (Index r = 0; r < m; ++r) {
          Wb.row(r) = W.row(perm[static_cast<std::size_t>(start + r)]);
          Bb.row(r) = B.row(perm[static_cast<std::size_t>(start + r)]);
        }
        apply(mlp_mse_gradients(net, Wb, Bb));
      }
    }
    ++epochs_run;
    if (detail::loss_plateaued(history, cfg.stop_rel_tol, cfg.stop_window)) break;
  }

  const double final_loss = mse_loss(net(W), B);
  detail::check_loss(final_loss, epochs_run);
  if (diag) {
    diag->loss_history = std::move(history);
    diag->epochs_run = epochs_run;
    diag->final_loss = final_loss;
  }
  return net;
}

inline LinearMap train_linear(const AlignedData& data, const TrainConfig& cfg,
                              TrainDiagnostics* diag = nullptr) {
  return train_linear<double>(data.W, data.B, cfg, diag);
}

inline MlpMap train_mlp(const AlignedData& data, const TrainConfig& cfg, Index hidden = 150,
                        TrainDiagnostics* diag = nullptr) {
  return train_mlp<double>(data.W, data.B, cfg, hidden, diag);
}

}  // namespace semprobe
