#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace promptsent {

// Square count matrix, rows = gold label, columns = predicted label.
class ConfusionMatrix {
 public:
  ConfusionMatrix(std::vector<std::string> labels, std::vector<std::vector<std::size_t>> counts);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t count(std::size_t gold, std::size_t predicted) const { return counts_[gold][predicted]; }
  std::size_t total() const noexcept;
  std::size_t index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> counts_;
};

// Labels default to the sorted union of gold and predicted labels. An
// explicit label list must cover every label seen.
ConfusionMatrix confusion(std::span<const std::string> predictions, std::span<const std::string> gold);
ConfusionMatrix confusion(std::span<const std::string> predictions, std::span<const std::string> gold,
                          std::vector<std::string> labels);

struct ReportRow {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  // Set when a metric had a zero denominator and was reported as 0.
  bool undefined = false;
};

struct ClassificationReport {
  std::vector<ReportRow> classes;
  double accuracy = 0.0;
  ReportRow macro_avg;
  ReportRow weighted_avg;
  std::size_t total_support = 0;

  const ReportRow& row(const std::string& label) const;
};

ClassificationReport report(const ConfusionMatrix& matrix);

// Two-decimal text table in the usual precision/recall/f1/support layout.
std::string render_report(const ClassificationReport& rep);
// Columns: label,precision,recall,f1,support (full precision). The summary
// rows are labelled accuracy, macro avg and weighted avg.
void write_report_csv(const ClassificationReport& rep, std::ostream& out);

}  // namespace promptsent
