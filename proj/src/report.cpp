#include "semprobe/report.hpp"

#include <cmath>
#include <fstream>

#include "semprobe/errors.hpp"
#include "text_util.hpp"

namespace semprobe {

std::string csv_number(double value, int sig) {
  if (std::isnan(value)) return "NA";
  return detail::format_double(value, sig);
}

std::string csv_number(const std::optional<double>& value, int sig) {
  if (!value) return "NA";
  return csv_number(*value, sig);
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (const char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

static const char* kSummaryHeader =
    "label,method,n_words,n_missing,n_failed_folds,mean_attribute_rho,attributes_defined,"
    "attributes_excluded,mean_word_rho,words_defined,words_excluded,mean_fold_loss\n";

void write_attribute_csv(const std::filesystem::path& path,
                         const std::vector<std::string>& attributes,
                         const std::vector<std::string>& domains,
                         const std::vector<std::optional<double>>& rho) {
  if (attributes.size() != rho.size() || (!domains.empty() && domains.size() != rho.size()))
    throw Error("attribute report: column count mismatch");
  std::string out = "attribute,domain,rho\n";
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    out += csv_field(attributes[i]);
    out += ',';
    out += csv_field(domains.empty() ? std::string{} : domains[i]);
    out += ',';
    out += csv_number(rho[i]);
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

void write_word_csv(const std::filesystem::path& path, const std::vector<std::string>& words,
                    const std::vector<std::string>& categories,
                    const std::vector<std::optional<double>>& rho) {
  if (words.size() != rho.size() || categories.size() != rho.size())
    throw Error("word report: row count mismatch");
  std::string out = "word,category,rho\n";
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += csv_field(words[i]);
    out += ',';
    out += csv_field(categories[i]);
    out += ',';
    out += csv_number(rho[i]);
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

void write_group_csv(const std::filesystem::path& path, const std::string& label,
                     const std::vector<std::pair<std::string, GroupStat>>& groups) {
  std::string out = label + ",mean_rho,n_defined,n_excluded\n";
  for (const auto& [name, stat] : groups) {
    out += csv_field(name);
    out += ',';
    out += csv_number(stat.mean);
    out += ',';
    out += std::to_string(stat.n_defined);
    out += ',';
    out += std::to_string(stat.n_excluded);
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

void write_summary_csv(const std::filesystem::path& path, const SummaryRow& row) {
  std::string out = kSummaryHeader;
  out += csv_field(row.label);
  out += ',';
  out += csv_field(row.method);
  out += ',';
  out += std::to_string(row.n_words);
  out += ',';
  out += std::to_string(row.n_missing);
  out += ',';
  out += std::to_string(row.n_failed_folds);
  out += ',';
  out += csv_number(row.attribute.mean);
  out += ',';
  out += std::to_string(row.attribute.n_defined);
  out += ',';
  out += std::to_string(row.attribute.n_excluded);
  out += ',';
  out += csv_number(row.word.mean);
  out += ',';
  out += std::to_string(row.word.n_defined);
  out += ',';
  out += std::to_string(row.word.n_excluded);
  out += ',';
  out += csv_number(row.mean_fold_loss);
  out += '\n';
  detail::write_file_atomic(path, out);
}

void write_entropy_csv(const std::filesystem::path& path, const EntropyReport& report) {
  std::string out = "category,size,mean_entropy,trials\n";
  Index total_size = 0;
  for (const auto& row : report.per_group) {
    out += std::to_string(row.gold_id);
    out += ',';
    out += std::to_string(row.size);
    out += ',';
    out += csv_number(row.mean_entropy);
    out += ',';
    out += std::to_string(report.trials);
    out += '\n';
    total_size += row.size;
  }
  out += "OVERALL,";
  out += std::to_string(total_size);
  out += ',';
  out += csv_number(report.overall_mean);
  out += ',';
  out += std::to_string(report.trials);
  out += '\n';
  detail::write_file_atomic(path, out);
}

void merge_summaries(const std::vector<std::filesystem::path>& inputs,
                     const std::filesystem::path& output) {
  if (inputs.empty()) throw Error("report merge: no inputs");
  std::string merged;
  std::string header;
  for (const auto& input : inputs) {
    std::ifstream in(input);
    if (!in) throw ParseError("cannot open summary file: " + input.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(input.string() + ": empty summary file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header.empty()) {
      header = line;
      merged = header + "\n";
    } else if (line != header) {
      throw ParseError(input.string() + ": summary header differs from the first input");
    }
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      merged += line;
      merged += '\n';
    }
  }
  detail::write_file_atomic(output, merged);
}

}  // namespace semprobe
