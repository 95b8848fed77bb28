#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semprobe/clustering.hpp"
#include "semprobe/evaluation.hpp"

namespace semprobe {

/// Undefined statistics appear as "NA" in CSV output.
std::string csv_number(double value, int sig = 9);
std::string csv_number(const std::optional<double>& value, int sig = 9);
std::string csv_field(const std::string& raw);

/// One row of summary.csv; report-merge concatenates these across runs.
struct SummaryRow {
  std::string label;
  std::string method;
  Index n_words = 0;
  Index n_missing = 0;
  Index n_failed_folds = 0;
  GroupStat attribute;
  GroupStat word;
  double mean_fold_loss = 0.0;
};

void write_attribute_csv(const std::filesystem::path& path,
                         const std::vector<std::string>& attributes,
                         const std::vector<std::string>& domains,
                         const std::vector<std::optional<double>>& rho);

void write_word_csv(const std::filesystem::path& path, const std::vector<std::string>& words,
                    const std::vector<std::string>& categories,
                    const std::vector<std::optional<double>>& rho);

/// Shared shape of domain.csv and category.csv; `label` names the first
/// column.
void write_group_csv(const std::filesystem::path& path, const std::string& label,
                     const std::vector<std::pair<std::string, GroupStat>>& groups);

void write_summary_csv(const std::filesystem::path& path, const SummaryRow& row);

void write_entropy_csv(const std::filesystem::path& path, const EntropyReport& report);

/// Concatenates summary.csv files that share a header.
void merge_summaries(const std::vector<std::filesystem::path>& inputs,
                     const std::filesystem::path& output);

}  // namespace semprobe
