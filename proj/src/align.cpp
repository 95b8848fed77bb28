#include "semprobe/align.hpp"

#include <unordered_map>

#include "text_util.hpp"

namespace semprobe {

AlignedData align(const EmbeddingSpace& space, const NormsDataset& norms, CasePolicy policy) {
  // Under folding, map each folded embedding word to its row; two distinct
  // embedding words that collide poison the key rather than silently
  // picking one.
  constexpr Index kAmbiguous = -2;
  std::unordered_map<std::string, Index> folded;
  if (policy == CasePolicy::fold_lower) {
    folded.reserve(static_cast<std::size_t>(space.size()));
    for (Index i = 0; i < space.size(); ++i) {
      auto [it, inserted] =
          folded.emplace(detail::lower_ascii(space.vocab()[static_cast<std::size_t>(i)]), i);
      if (!inserted) it->second = kAmbiguous;
    }
  }

  std::vector<Index> space_rows;
  AlignedData out;
  for (Index r = 0; r < norms.size(); ++r) {
    const std::string& word = norms.words()[static_cast<std::size_t>(r)];
    std::optional<Index> row;
    if (policy == CasePolicy::exact) {
      row = space.find(word);
    } else {
      // Exact hits win; folding only rescues words with no exact match.
      row = space.find(word);
      if (!row) {
        const auto it = folded.find(detail::lower_ascii(word));
        if (it != folded.end()) {
          if (it->second == kAmbiguous)
            throw Error("align: case folding makes '" + word +
                        "' ambiguous among embedding words");
          row = it->second;
        }
      }
    }
    if (row) {
      out.words.push_back(word);
      out.norm_rows.push_back(r);
      space_rows.push_back(*row);
    } else {
      out.missing.push_back(word);
    }
  }

  if (out.words.empty())
    throw DataError("align: no overlap between norms vocabulary and embedding space");

  const Index n = static_cast<Index>(out.words.size());
  out.W.resize(n, space.dim());
  out.B.resize(n, norms.n_attributes());
  for (Index i = 0; i < n; ++i) {
    out.W.row(i) = space.vectors().row(space_rows[static_cast<std::size_t>(i)]);
    out.B.row(i) = norms.values().row(out.norm_rows[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace semprobe
