#pragma once

#include <string>
#include <vector>

#include "semprobe/embedding.hpp"
#include "semprobe/matrix.hpp"
#include "semprobe/norms.hpp"

namespace semprobe {

enum class CasePolicy {
  exact,       ///< byte-for-byte match
  fold_lower,  ///< match after ASCII lower-casing both sides
};

/// Row-aligned training pair: W holds the embedding vectors and B the
/// rating vectors of the words both sources know about, in norms order.
struct AlignedData {
  std::vector<std::string> words;  ///< aligned words, norms order
  Mat<double> W;                   ///< n x d embedding rows
  Mat<double> B;                   ///< n x a rating rows
  std::vector<Index> norm_rows;    ///< row in the norms dataset per aligned word
  std::vector<std::string> missing;  ///< norm words absent from the space

  Index size() const { return W.rows(); }
};

/// Intersects the norms vocabulary with the embedding space. Words the
/// space lacks are reported, never zero-filled. Throws DataError when
/// nothing overlaps, and Error when case folding makes a norm word
/// ambiguous among several embedding rows.
AlignedData align(const EmbeddingSpace& space, const NormsDataset& norms,
                  CasePolicy policy = CasePolicy::exact);

}  // namespace semprobe
