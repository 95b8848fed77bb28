#include "semprobe/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "text_util.hpp"

namespace semprobe {

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> vocab, Mat<double> vectors)
    : vocab_(std::move(vocab)), vectors_(std::move(vectors)) {
  if (vocab_.empty()) throw Error("embedding space: empty vocabulary");
  if (vectors_.rows() != static_cast<Index>(vocab_.size()))
    throw Error("embedding space: vocabulary size does not match matrix rows");
  if (vectors_.cols() < 1) throw Error("embedding space: dimension must be at least 1");
  if (!vectors_.allFinite()) throw Error("embedding space: non-finite vector component");
  row_of_.reserve(vocab_.size());
  for (Index i = 0; i < static_cast<Index>(vocab_.size()); ++i) {
    if (!row_of_.emplace(vocab_[i], i).second)
      throw Error("embedding space: duplicate word '" + vocab_[i] + "'");
  }
}

namespace {

bool looks_like_header(const std::vector<std::string>& tokens) {
  if (tokens.size() != 2) return false;
  std::int64_t n = 0, d = 0;
  return detail::parse_int64(tokens[0], n) && detail::parse_int64(tokens[1], d) && n > 0 &&
         d > 0;
}

[[noreturn]] void fail(const std::string& name, std::size_t lineno, const std::string& what) {
  throw ParseError(name + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

EmbeddingSpace load_embeddings(std::istream& in, EmbeddingFormat format,
                               const std::string& name) {
  std::vector<std::string> vocab;
  std::vector<double> values;
  std::unordered_set<std::string> seen;
  Index dim = -1;
  std::int64_t declared_n = -1, declared_d = -1;
  bool first_content = true;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;

    if (first_content) {
      first_content = false;
      if (format == EmbeddingFormat::headered) {
        if (!looks_like_header(tokens))
          fail(name, lineno, "expected '<count> <dim>' header");
        detail::parse_int64(tokens[0], declared_n);
        detail::parse_int64(tokens[1], declared_d);
        continue;
      }
      if (format == EmbeddingFormat::autodetect && looks_like_header(tokens)) {
        detail::parse_int64(tokens[0], declared_n);
        detail::parse_int64(tokens[1], declared_d);
        continue;
      }
    }

    if (tokens.size() < 2) fail(name, lineno, "expected a word followed by vector components");
    const std::string& word = tokens[0];
    if (!seen.insert(word).second) fail(name, lineno, "duplicate word '" + word + "'");
    const Index row_dim = static_cast<Index>(tokens.size()) - 1;
    if (dim < 0) {
      dim = row_dim;
    } else if (row_dim != dim) {
      fail(name, lineno,
           "dimension mismatch: expected " + std::to_string(dim) + " components, got " +
               std::to_string(row_dim));
    }
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      double v = 0.0;
      if (!detail::parse_double(tokens[t], v))
        fail(name, lineno, "non-numeric vector component '" + tokens[t] + "'");
      if (!std::isfinite(v))
        fail(name, lineno, "non-finite vector component '" + tokens[t] + "'");
      values.push_back(v);
    }
    vocab.push_back(word);
  }

  if (vocab.empty()) throw ParseError(name + ": no embedding rows");
  if (declared_n >= 0 && declared_n != static_cast<std::int64_t>(vocab.size()))
    throw ParseError(name + ": header declares " + std::to_string(declared_n) +
                     " rows but file has " + std::to_string(vocab.size()));
  if (declared_d >= 0 && declared_d != static_cast<std::int64_t>(dim))
    throw ParseError(name + ": header declares dimension " + std::to_string(declared_d) +
                     " but rows have " + std::to_string(dim));

  const Index n = static_cast<Index>(vocab.size());
  Mat<double> vectors(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dim; ++j) vectors(i, j) = values[static_cast<std::size_t>(i * dim + j)];
  return EmbeddingSpace(std::move(vocab), std::move(vectors));
}

EmbeddingSpace load_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open embedding file: " + path.string());
  return load_embeddings(in, format, path.string());
}

void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path,
                     bool with_header, int precision) {
  std::string out;
  out.reserve(static_cast<std::size_t>(space.size()) *
              (static_cast<std::size_t>(space.dim()) * 12 + 16));
  if (with_header) {
    out += std::to_string(space.size());
    out += ' ';
    out += std::to_string(space.dim());
    out += '\n';
  }
  for (Index i = 0; i < space.size(); ++i) {
    out += space.vocab()[static_cast<std::size_t>(i)];
    for (Index j = 0; j < space.dim(); ++j) {
      out += ' ';
      out += detail::format_double(space.vectors()(i, j), precision);
    }
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

}  // namespace semprobe
