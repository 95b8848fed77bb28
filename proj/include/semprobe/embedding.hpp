#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "semprobe/matrix.hpp"

namespace semprobe {

enum class EmbeddingFormat {
  autodetect,  // headered if the first line is exactly "<count> <dim>"
  headered,
  plain,
};

/// Vocabulary-indexed matrix of d-dimensional word vectors, one row per
/// word in file order. Immutable after construction and safe to share
/// across concurrent readers.
class EmbeddingSpace {
 public:
  /// Validates the invariants: at least one word, dimension >= 1, unique
  /// words, one finite row per word. Throws semprobe::Error on violation.
  EmbeddingSpace(std::vector<std::string> vocab, Mat<double> vectors);

  Index size() const { return vectors_.rows(); }
  Index dim() const { return vectors_.cols(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const Mat<double>& vectors() const { return vectors_; }

  std::optional<Index> find(const std::string& word) const {
    const auto it = row_of_.find(word);
    if (it == row_of_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> vocab_;
  Mat<double> vectors_;
  std::unordered_map<std::string, Index> row_of_;
};

/// Reads "word v1 ... vd" lines, optionally preceded by a "<count> <dim>"
/// header. Rejects dimension mismatches, non-numeric components and
/// duplicate words.
EmbeddingSpace load_embeddings(const std::filesystem::path& path,
                               EmbeddingFormat format = EmbeddingFormat::autodetect);

/// Same grammar, from an already-open stream; `name` labels diagnostics.
EmbeddingSpace load_embeddings(std::istream& in, EmbeddingFormat format,
                               const std::string& name);

/// Writes the space in the text format above (atomically: write + rename).
/// `precision` is the number of significant digits per component.
void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path,
                     bool with_header = true, int precision = 9);

}  // namespace semprobe
