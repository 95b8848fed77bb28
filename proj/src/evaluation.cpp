#include "semprobe/evaluation.hpp"

namespace semprobe {

CorrelationReport score_estimates(const Mat<double>& predicted, const Mat<double>& target,
                                  const std::vector<std::string>& attribute_domains,
                                  const std::vector<std::string>& word_categories,
                                  const std::vector<std::uint8_t>* rows_valid) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols())
    throw std::invalid_argument("score_estimates: shape mismatch");
  const Index n = predicted.rows();
  const Index a = predicted.cols();
  if (!attribute_domains.empty() && static_cast<Index>(attribute_domains.size()) != a)
    throw std::invalid_argument("score_estimates: domain labels do not match columns");
  if (static_cast<Index>(word_categories.size()) != n)
    throw std::invalid_argument("score_estimates: category labels do not match rows");
  if (rows_valid && static_cast<Index>(rows_valid->size()) != n)
    throw std::invalid_argument("score_estimates: validity mask does not match rows");

  std::vector<Index> valid;
  valid.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    if (!rows_valid || (*rows_valid)[static_cast<std::size_t>(i)]) valid.push_back(i);

  CorrelationReport report;

  // Attribute (column) correlations over the valid rows only.
  if (static_cast<Index>(valid.size()) >= 2) {
    Mat<double> pv(static_cast<Index>(valid.size()), a);
    Mat<double> tv(static_cast<Index>(valid.size()), a);
    for (std::size_t r = 0; r < valid.size(); ++r) {
      pv.row(static_cast<Index>(r)) = predicted.row(valid[r]);
      tv.row(static_cast<Index>(r)) = target.row(valid[r]);
    }
    report.per_attribute = column_correlations(pv, tv);
  } else {
    report.per_attribute.assign(static_cast<std::size_t>(a), std::nullopt);
  }

  report.per_word.assign(static_cast<std::size_t>(n), std::nullopt);
  for (const Index i : valid)
    report.per_word[static_cast<std::size_t>(i)] =
        spearman(predicted.row(i).transpose().eval(), target.row(i).transpose().eval());

  report.attribute_overall = mean_defined(report.per_attribute);
  report.word_overall = mean_defined(report.per_word);
  if (!attribute_domains.empty())
    report.domain_means = aggregate(report.per_attribute, attribute_domains);
  report.category_means = aggregate(report.per_word, word_categories);
  return report;
}

}  // namespace semprobe
