#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "semprobe/embedding.hpp"
#include "semprobe/matrix.hpp"

namespace semprobe {

struct BuilderConfig {
  int window = 10;              ///< flat symmetric context window
  std::int64_t min_count = 1;   ///< vocabulary frequency threshold
  Index dim = 300;              ///< embedding dimension
  std::uint64_t svd_seed = 0;
  std::vector<std::string> include_words;  ///< kept regardless of frequency

  void validate() const;
};

/// Symmetric word-word co-occurrence counts. Tokens outside the vocabulary
/// still occupy corpus positions but contribute no pairs.
struct CooccurrenceCounts {
  std::vector<std::string> vocab;             ///< first-occurrence order
  Eigen::SparseMatrix<std::int64_t> counts;   ///< |V| x |V|, symmetric
  std::int64_t total = 0;                     ///< sum over all entries
  std::int64_t total_tokens = 0;              ///< corpus tokens, in and out of vocab
  int window = 0;
};

/// Streams a whitespace-tokenized corpus where a blank line ends a
/// document; context windows never cross document boundaries. The stream
/// is read twice (vocabulary, then counts) and must be seekable.
CooccurrenceCounts count_cooccurrence(std::istream& corpus, const BuilderConfig& cfg);

/// Positive pointwise mutual information, natural log, no smoothing:
/// max(0, log(p(x,y) / (p(x) p(y)))) with probabilities estimated from the
/// counts. Zero and clipped cells stay structurally empty.
Eigen::SparseMatrix<double> ppmi(const CooccurrenceCounts& counts);

struct BuildInfo {
  int window = 0;
  std::int64_t min_count = 0;
  Index dim = 0;
  Index vocab_size = 0;
  std::int64_t total_tokens = 0;
  std::int64_t cooccurrence_total = 0;
};

/// Full pipeline: counts -> PPMI -> seeded truncated SVD; embedding rows
/// are U_d * diag(sigma_d).
EmbeddingSpace build_ppmi_space(std::istream& corpus, const BuilderConfig& cfg,
                                BuildInfo* info = nullptr);

}  // namespace semprobe
