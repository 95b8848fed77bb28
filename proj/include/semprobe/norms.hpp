#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "semprobe/matrix.hpp"

namespace semprobe {

/// Attribute-rating dataset: one row per word, one column per named
/// attribute, plus a category label per word. Domain and gold-cluster
/// maps can be attached after loading.
class NormsDataset {
 public:
  NormsDataset(std::vector<std::string> words, std::vector<std::string> categories,
               std::vector<std::string> attributes, Mat<double> values);

  Index size() const { return static_cast<Index>(words_.size()); }
  Index n_attributes() const { return static_cast<Index>(attributes_.size()); }

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<std::string>& attributes() const { return attributes_; }
  const Mat<double>& values() const { return values_; }

  std::optional<Index> find(const std::string& word) const;

  bool has_domains() const { return !domains_.empty(); }
  /// Domain per attribute, aligned with attributes(). Empty until attached.
  const std::vector<std::string>& attribute_domains() const { return domains_; }

  bool has_gold_clusters() const { return has_gold_; }
  /// Gold cluster id per word; words without a label hold nullopt.
  const std::vector<std::optional<int>>& gold_clusters() const { return gold_; }

  void set_domains(std::vector<std::string> domains);
  void set_gold_clusters(std::vector<std::optional<int>> gold);

 private:
  std::vector<std::string> words_;
  std::vector<std::string> categories_;
  std::vector<std::string> attributes_;
  Mat<double> values_;
  std::vector<std::string> domains_;
  std::vector<std::optional<int>> gold_;
  bool has_gold_ = false;
  std::unordered_map<std::string, Index> row_of_;
};

NormsDataset load_norms(std::istream& in, const std::string& name);
NormsDataset load_norms(const std::filesystem::path& path);

/// Reads a two-column attribute→domain table and attaches it. Every
/// attribute of the dataset must be covered exactly once.
void attach_domain_map(NormsDataset& dataset, const std::filesystem::path& path);

/// Reads a two-column word→cluster-id table and attaches it. Ids are
/// positive integers; the map may cover only part of the vocabulary.
void attach_gold_clusters(NormsDataset& dataset, const std::filesystem::path& path);

}  // namespace semprobe
