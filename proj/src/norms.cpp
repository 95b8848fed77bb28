#include "semprobe/norms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>
#include <utility>

#include "text_util.hpp"

namespace semprobe {

NormsDataset::NormsDataset(std::vector<std::string> words, std::vector<std::string> categories,
                           std::vector<std::string> attributes, Mat<double> values)
    : words_(std::move(words)),
      categories_(std::move(categories)),
      attributes_(std::move(attributes)),
      values_(std::move(values)) {
  if (words_.empty()) throw DataError("norms dataset: no words");
  if (attributes_.empty()) throw DataError("norms dataset: no attributes");
  if (categories_.size() != words_.size())
    throw Error("norms dataset: category count does not match word count");
  if (values_.rows() != static_cast<Index>(words_.size()) ||
      values_.cols() != static_cast<Index>(attributes_.size()))
    throw Error("norms dataset: value matrix shape mismatch");
  if (!values_.allFinite()) throw Error("norms dataset: non-finite rating");
  row_of_.reserve(words_.size());
  for (Index i = 0; i < size(); ++i) {
    if (!row_of_.emplace(words_[static_cast<std::size_t>(i)], i).second)
      throw Error("norms dataset: duplicate word '" + words_[static_cast<std::size_t>(i)] + "'");
  }
  std::unordered_set<std::string> attr_seen;
  for (const auto& a : attributes_)
    if (!attr_seen.insert(a).second)
      throw Error("norms dataset: duplicate attribute '" + a + "'");
}

std::optional<Index> NormsDataset::find(const std::string& word) const {
  const auto it = row_of_.find(word);
  if (it == row_of_.end()) return std::nullopt;
  return it->second;
}

void NormsDataset::set_domains(std::vector<std::string> domains) {
  if (domains.size() != attributes_.size())
    throw Error("domain map does not cover every attribute");
  domains_ = std::move(domains);
}

void NormsDataset::set_gold_clusters(std::vector<std::optional<int>> gold) {
  if (gold.size() != words_.size())
    throw Error("gold-cluster vector does not match word count");
  gold_ = std::move(gold);
  has_gold_ = true;
}

namespace {

[[noreturn]] void fail(const std::string& name, std::size_t lineno, const std::string& what) {
  throw ParseError(name + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

NormsDataset load_norms(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t lineno = 0;

  // Header: word, category, then the attribute names.
  if (!std::getline(in, line)) throw ParseError(name + ": empty file");
  ++lineno;
  auto header = detail::split_tabs(line);
  if (header.size() < 3 || header[0] != "word" || header[1] != "category")
    fail(name, lineno, "header must start with 'word<TAB>category<TAB><attributes...>'");
  std::vector<std::string> attributes(header.begin() + 2, header.end());
  const std::size_t n_attr = attributes.size();

  std::vector<std::string> words, categories;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() != n_attr + 2)
      fail(name, lineno,
           "expected " + std::to_string(n_attr + 2) + " columns, got " +
               std::to_string(fields.size()));
    if (fields[0].empty()) fail(name, lineno, "empty word");
    if (fields[1].empty()) fail(name, lineno, "empty category");
    for (std::size_t j = 2; j < fields.size(); ++j) {
      double v = 0.0;
      if (!detail::parse_double(fields[j], v))
        fail(name, lineno, "non-numeric rating '" + fields[j] + "'");
      if (!std::isfinite(v)) fail(name, lineno, "non-finite rating '" + fields[j] + "'");
      values.push_back(v);
    }
    words.push_back(fields[0]);
    categories.push_back(fields[1]);
  }
  if (words.empty()) throw DataError(name + ": no data rows");

  const Index n = static_cast<Index>(words.size());
  const Index a = static_cast<Index>(n_attr);
  Mat<double> m(n, a);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < a; ++j) m(i, j) = values[static_cast<std::size_t>(i * a + j)];

  try {
    return NormsDataset(std::move(words), std::move(categories), std::move(attributes),
                        std::move(m));
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(name + ": " + e.what());
  }
}

NormsDataset load_norms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open norms file: " + path.string());
  return load_norms(in, path.string());
}

void attach_domain_map(NormsDataset& dataset, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open domain map: " + path.string());
  const std::string name = path.string();

  std::unordered_map<std::string, std::string> domain_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() != 2) fail(name, lineno, "expected 'attribute<TAB>domain'");
    if (lineno == 1 && fields[0] == "attribute" && fields[1] == "domain") continue;
    if (fields[0].empty() || fields[1].empty()) fail(name, lineno, "empty field");
    if (!domain_of.emplace(fields[0], fields[1]).second)
      fail(name, lineno, "duplicate attribute '" + fields[0] + "'");
  }

  std::vector<std::string> domains;
  domains.reserve(dataset.attributes().size());
  for (const auto& attr : dataset.attributes()) {
    const auto it = domain_of.find(attr);
    if (it == domain_of.end())
      throw ParseError(name + ": no domain for attribute '" + attr + "'");
    domains.push_back(it->second);
  }
  if (domain_of.size() != dataset.attributes().size()) {
    for (const auto& [attr, dom] : domain_of)
      if (std::find(dataset.attributes().begin(), dataset.attributes().end(), attr) ==
          dataset.attributes().end())
        throw ParseError(name + ": unknown attribute '" + attr + "'");
  }
  dataset.set_domains(std::move(domains));
}

void attach_gold_clusters(NormsDataset& dataset, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open gold-cluster map: " + path.string());
  const std::string name = path.string();

  std::vector<std::optional<int>> gold(static_cast<std::size_t>(dataset.size()));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() != 2) fail(name, lineno, "expected 'word<TAB>cluster_id'");
    if (lineno == 1 && fields[0] == "word") continue;
    const auto row = dataset.find(fields[0]);
    if (!row) fail(name, lineno, "unknown word '" + fields[0] + "'");
    std::int64_t id = 0;
    if (!detail::parse_int64(fields[1], id) || id < 1)
      fail(name, lineno, "cluster id must be a positive integer, got '" + fields[1] + "'");
    auto& slot = gold[static_cast<std::size_t>(*row)];
    if (slot) fail(name, lineno, "duplicate word '" + fields[0] + "'");
    slot = static_cast<int>(id);
  }
  dataset.set_gold_clusters(std::move(gold));
}

}  // namespace semprobe
