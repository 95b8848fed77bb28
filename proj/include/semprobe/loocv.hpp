#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semprobe/align.hpp"
#include "semprobe/mapping.hpp"

namespace semprobe {

enum class MappingMethod { linear, mlp };

struct LoocvConfig {
  MappingMethod method = MappingMethod::linear;
  TrainConfig train;
  Index hidden = 150;               ///< MLP only
  bool standardize_inputs = false;  ///< z-score inputs with the fold's training statistics
  int threads = 1;                  ///< fold-level parallelism; results are thread-count invariant
};

struct LoocvResult {
  Mat<double> estimates;              ///< n x a; rows of failed folds are NaN
  std::vector<double> fold_loss;      ///< final training loss per fold (NaN on failure)
  std::vector<std::uint8_t> fold_ok;  ///< 1 = trained and predicted
  std::vector<std::string> fold_error;  ///< diagnostic for failed folds, else empty

  Index failed_count() const {
    Index k = 0;
    for (const auto ok : fold_ok)
      if (!ok) ++k;
    return k;
  }
};

/// Leave-one-out cross-validation: trains one model per word on the other
/// n-1 words and predicts the held-out row. Fold i trains with seed
/// (cfg.train.seed XOR i), so folds are independent of execution order and
/// thread count. A fold whose training throws TrainingError is recorded
/// and excluded; any other failure propagates.
LoocvResult loocv(const AlignedData& data, const LoocvConfig& cfg);

}  // namespace semprobe
