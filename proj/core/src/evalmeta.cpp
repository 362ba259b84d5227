#include "promptsent/evalmeta.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

#include "promptsent/csv.hpp"
#include "promptsent/errors.hpp"

namespace promptsent {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels,
                                 std::vector<std::vector<std::size_t>> counts)
    : labels_(std::move(labels)), counts_(std::move(counts)) {
  if (labels_.empty()) throw InvalidArgument("confusion matrix needs at least one label");
  if (counts_.size() != labels_.size())
    throw InvalidArgument("confusion matrix must be square");
  for (const auto& r : counts_)
    if (r.size() != labels_.size()) throw InvalidArgument("confusion matrix must be square");
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size())
    throw InvalidArgument("confusion matrix labels must be distinct");
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t t = 0;
  for (const auto& r : counts_)
    for (auto c : r) t += c;
  return t;
}

std::size_t ConfusionMatrix::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw MissingLabelError(label);
  return static_cast<std::size_t>(it - labels_.begin());
}

ConfusionMatrix confusion(std::span<const std::string> predictions, std::span<const std::string> gold) {
  std::set<std::string> all(gold.begin(), gold.end());
  all.insert(predictions.begin(), predictions.end());
  return confusion(predictions, gold, std::vector<std::string>(all.begin(), all.end()));
}

ConfusionMatrix confusion(std::span<const std::string> predictions, std::span<const std::string> gold,
                          std::vector<std::string> labels) {
  if (predictions.size() != gold.size())
    throw InvalidArgument("predictions and gold differ in length (" +
                          std::to_string(predictions.size()) + " vs " +
                          std::to_string(gold.size()) + ")");
  if (gold.empty()) throw InvalidArgument("confusion needs at least one item");
  std::vector<std::vector<std::size_t>> counts(labels.size(), std::vector<std::size_t>(labels.size()));
  ConfusionMatrix shape(labels, counts);
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++counts[shape.index_of(gold[i])][shape.index_of(predictions[i])];
  return ConfusionMatrix(std::move(labels), std::move(counts));
}

const ReportRow& ClassificationReport::row(const std::string& label) const {
  for (const auto& r : classes)
    if (r.label == label) return r;
  throw MissingLabelError(label);
}

ClassificationReport report(const ConfusionMatrix& m) {
  const std::size_t k = m.size();
  const std::size_t total = m.total();
  if (total == 0) throw InvalidArgument("classification report needs a non-empty matrix");

  ClassificationReport rep;
  rep.total_support = total;
  std::size_t trace = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = m.count(c, c), row_sum = 0, col_sum = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row_sum += m.count(c, j);
      col_sum += m.count(j, c);
    }
    trace += tp;
    ReportRow r;
    r.label = m.labels()[c];
    r.support = row_sum;
    if (col_sum > 0) r.precision = static_cast<double>(tp) / static_cast<double>(col_sum);
    else r.undefined = true;
    if (row_sum > 0) r.recall = static_cast<double>(tp) / static_cast<double>(row_sum);
    else r.undefined = true;
    if (r.precision + r.recall > 0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    else r.undefined = true;
    rep.classes.push_back(std::move(r));
  }
  rep.accuracy = static_cast<double>(trace) / static_cast<double>(total);

  rep.macro_avg.label = "macro avg";
  rep.weighted_avg.label = "weighted avg";
  for (const auto& r : rep.classes) {
    const double w = static_cast<double>(r.support) / static_cast<double>(total);
    rep.macro_avg.precision += r.precision;
    rep.macro_avg.recall += r.recall;
    rep.macro_avg.f1 += r.f1;
    rep.weighted_avg.precision += w * r.precision;
    rep.weighted_avg.recall += w * r.recall;
    rep.weighted_avg.f1 += w * r.f1;
    rep.macro_avg.undefined = rep.macro_avg.undefined || r.undefined;
    rep.weighted_avg.undefined = rep.weighted_avg.undefined || (r.undefined && r.support > 0);
  }
  rep.macro_avg.precision /= static_cast<double>(k);
  rep.macro_avg.recall /= static_cast<double>(k);
  rep.macro_avg.f1 /= static_cast<double>(k);
  rep.macro_avg.support = total;
  rep.weighted_avg.support = total;
  return rep;
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

}  // namespace

std::string render_report(const ClassificationReport& rep) {
  std::size_t lw = std::string("weighted avg").size();
  for (const auto& r : rep.classes) lw = std::max(lw, r.label.size());
  const std::size_t cw = 10;
  std::string out = pad_right("", lw) + pad_left("precision", cw) + pad_left("recall", cw) +
                    pad_left("f1-score", cw) + pad_left("support", cw) + "\n\n";
  auto line = [&](const ReportRow& r) {
    out += pad_right(r.label, lw) + pad_left(fixed2(r.precision), cw) + pad_left(fixed2(r.recall), cw) +
           pad_left(fixed2(r.f1), cw) + pad_left(std::to_string(r.support), cw) + "\n";
  };
  for (const auto& r : rep.classes) line(r);
  out += "\n";
  out += pad_right("accuracy", lw) + pad_left("", 2 * cw) + pad_left(fixed2(rep.accuracy), cw) +
         pad_left(std::to_string(rep.total_support), cw) + "\n";
  line(rep.macro_avg);
  line(rep.weighted_avg);
  return out;
}

void write_report_csv(const ClassificationReport& rep, std::ostream& out) {
  csv::Writer w(out);
  w.row({"label", "precision", "recall", "f1", "support"});
  auto row = [&](const ReportRow& r) {
    w.row({r.label, csv::format_double(r.precision), csv::format_double(r.recall),
           csv::format_double(r.f1), std::to_string(r.support)});
  };
  for (const auto& r : rep.classes) row(r);
  w.row({"accuracy", "", "", csv::format_double(rep.accuracy), std::to_string(rep.total_support)});
  row(rep.macro_avg);
  row(rep.weighted_avg);
}

}  // namespace promptsent
