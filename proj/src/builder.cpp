#include "semprobe/builder.hpp"

#include <cmath>
#include <deque>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "semprobe/errors.hpp"
#include "semprobe/svd.hpp"
#include "text_util.hpp"

namespace semprobe {

void BuilderConfig::validate() const {
  if (window < 1) throw std::invalid_argument("builder: window must be at least 1");
  if (min_count < 1) throw std::invalid_argument("builder: min_count must be at least 1");
  if (dim < 1) throw std::invalid_argument("builder: dim must be at least 1");
}

CooccurrenceCounts count_cooccurrence(std::istream& corpus, const BuilderConfig& cfg) {
  cfg.validate();

  // Pass 1: frequencies and first-occurrence order.
  std::unordered_map<std::string, std::int64_t> freq;
  std::vector<std::string> order;
  std::int64_t total_tokens = 0;
  std::string line;
  while (std::getline(corpus, line)) {
    for (auto& tok : detail::split_ws(line)) {
      ++total_tokens;
      auto [it, inserted] = freq.emplace(std::move(tok), 0);
      if (inserted) order.push_back(it->first);
      ++it->second;
    }
  }

  const std::unordered_set<std::string> keep(cfg.include_words.begin(),
                                             cfg.include_words.end());
  CooccurrenceCounts out;
  out.window = cfg.window;
  out.total_tokens = total_tokens;
  std::unordered_map<std::string, Index> id_of;
  for (const auto& word : order) {
    if (freq[word] >= cfg.min_count || keep.count(word)) {
      id_of.emplace(word, static_cast<Index>(out.vocab.size()));
      out.vocab.push_back(word);
    }
  }
  // Requested words the corpus never produced go at the end, request order.
  for (const auto& word : cfg.include_words) {
    if (!freq.count(word) && !id_of.count(word)) {
      id_of.emplace(word, static_cast<Index>(out.vocab.size()));
      out.vocab.push_back(word);
    }
  }
  if (out.vocab.empty()) throw DataError("builder: empty vocabulary after thresholding");

  // Pass 2: sliding window over each document.
  corpus.clear();
  corpus.seekg(0);
  if (!corpus) throw Error("builder: corpus stream is not seekable");

  std::unordered_map<std::uint64_t, std::int64_t> cells;
  const auto v = static_cast<std::uint64_t>(out.vocab.size());
  std::deque<Index> context;  // vocabulary ids of the last `window` tokens; -1 = out of vocab
  auto bump = [&](Index a, Index b) {
    ++cells[static_cast<std::uint64_t>(a) * v + static_cast<std::uint64_t>(b)];
  };
  while (std::getline(corpus, line)) {
    const auto tokens = detail::split_ws(line);
    if (tokens.empty()) {
      context.clear();  // document boundary
      continue;
    }
    for (const auto& tok : tokens) {
      const auto it = id_of.find(tok);
      const Index id = it == id_of.end() ? Index{-1} : it->second;
      if (id >= 0) {
        for (const Index left : context) {
          if (left < 0) continue;
          bump(id, left);
          bump(left, id);
        }
      }
      context.push_back(id);
      if (static_cast<int>(context.size()) > cfg.window) context.pop_front();
    }
  }

  std::vector<Eigen::Triplet<std::int64_t>> triplets;
  triplets.reserve(cells.size());
  for (const auto& [key, count] : cells) {
    triplets.emplace_back(static_cast<Index>(key / v), static_cast<Index>(key % v), count);
    out.total += count;
  }
  out.counts.resize(static_cast<Index>(out.vocab.size()), static_cast<Index>(out.vocab.size()));
  out.counts.setFromTriplets(triplets.begin(), triplets.end());
  out.counts.makeCompressed();
  return out;
}

Eigen::SparseMatrix<double> ppmi(const CooccurrenceCounts& counts) {
  if (counts.total <= 0) throw DataError("ppmi: no co-occurrence pairs");
  const Index v = counts.counts.rows();

  Vec<double> marginal = Vec<double>::Zero(v);
  for (Index outer = 0; outer < counts.counts.outerSize(); ++outer)
    for (Eigen::SparseMatrix<std::int64_t>::InnerIterator it(counts.counts, outer); it; ++it)
      marginal(it.row()) += static_cast<double>(it.value());

  const double total = static_cast<double>(counts.total);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(counts.counts.nonZeros()));
  for (Index outer = 0; outer < counts.counts.outerSize(); ++outer) {
    for (Eigen::SparseMatrix<std::int64_t>::InnerIterator it(counts.counts, outer); it; ++it) {
      if (it.value() <= 0) continue;
      const double value = std::log(static_cast<double>(it.value()) * total /
                                    (marginal(it.row()) * marginal(it.col())));
      if (value > 0.0) triplets.emplace_back(it.row(), it.col(), value);
    }
  }
  Eigen::SparseMatrix<double> out(v, v);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

EmbeddingSpace build_ppmi_space(std::istream& corpus, const BuilderConfig& cfg,
                                BuildInfo* info) {
  const CooccurrenceCounts counts = count_cooccurrence(corpus, cfg);
  const Index v = static_cast<Index>(counts.vocab.size());
  if (cfg.dim > v)
    throw std::invalid_argument("builder: dim " + std::to_string(cfg.dim) +
                                " exceeds vocabulary size " + std::to_string(v));
  const Eigen::SparseMatrix<double> p = ppmi(counts);
  const SvdResult svd = truncated_svd(p, cfg.dim, cfg.svd_seed);
  Mat<double> vectors = svd.U * svd.singular_values.asDiagonal();
  if (info) {
    info->window = cfg.window;
    info->min_count = cfg.min_count;
    info->dim = cfg.dim;
    info->vocab_size = v;
    info->total_tokens = counts.total_tokens;
    info->cooccurrence_total = counts.total;
  }
  return EmbeddingSpace(counts.vocab, std::move(vectors));
}

}  // namespace semprobe
