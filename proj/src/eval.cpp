#include "dpcipi/eval.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>

namespace dpcipi {

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {
  if (classes == 0) throw std::invalid_argument("confusion matrix needs at least one class");
}

void ConfusionMatrix::add(std::size_t actual, std::size_t predicted, std::size_t count) {
  if (actual >= classes_ || predicted >= classes_)
    throw std::out_of_range("class index out of range for " + std::to_string(classes_) + " classes");
  counts_[actual * classes_ + predicted] += count;
}

std::size_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t c = 0; c < classes_; ++c) t += at(c, c);
  return t;
}

std::size_t ConfusionMatrix::support(std::size_t actual) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < classes_; ++p) s += at(actual, p);
  return s;
}

std::size_t ConfusionMatrix::predicted(std::size_t cls) const {
  std::size_t s = 0;
  for (std::size_t a = 0; a < classes_; ++a) s += at(a, cls);
  return s;
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<std::size_t>>& rows) {
  ConfusionMatrix m(rows.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (rows[a].size() != rows.size()) throw std::invalid_argument("confusion matrix must be square");
    for (std::size_t p = 0; p < rows.size(); ++p) m.add(a, p, rows[a][p]);
  }
  return m;
}

std::vector<std::vector<std::size_t>> ConfusionMatrix::rows() const {
  std::vector<std::vector<std::size_t>> out(classes_);
  for (std::size_t a = 0; a < classes_; ++a)
    out[a].assign(counts_.begin() + static_cast<std::ptrdiff_t>(a * classes_),
                  counts_.begin() + static_cast<std::ptrdiff_t>((a + 1) * classes_));
  return out;
}

ConfusionMatrix confusion(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                          std::size_t classes) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("predictions and labels differ in length");
  ConfusionMatrix m(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) m.add(labels[i], predictions[i]);
  return m;
}

Metrics weighted_metrics(const ConfusionMatrix& m) {
  const std::size_t total = m.total();
  if (total == 0) throw std::invalid_argument("weighted metrics of an empty confusion matrix");
  const double n = static_cast<double>(total);
  Metrics out;
  out.accuracy = static_cast<double>(m.trace()) / n;
  for (std::size_t c = 0; c < m.classes(); ++c) {
    const double tp = static_cast<double>(m.at(c, c));
    const double support = static_cast<double>(m.support(c));
    const double predicted = static_cast<double>(m.predicted(c));
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = support > 0 ? tp / support : 0.0;
    const double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    const double w = support / n;
    out.weighted_precision += w * precision;
    out.weighted_recall += w * recall;
    out.weighted_f1 += w * f1;
  }
  return out;
}

nlohmann::ordered_json metrics_report(const std::string& task, const std::string& model_kind,
                                      const ConfusionMatrix& m, const Metrics& metrics) {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["model_kind"] = model_kind;
  j["classes"] = m.classes();
  j["confusion"] = m.rows();
  j["accuracy"] = metrics.accuracy;
  j["weighted_precision"] = metrics.weighted_precision;
  j["weighted_recall"] = metrics.weighted_recall;
  j["weighted_f1"] = metrics.weighted_f1;
  return j;
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& m) {
  out << "actual";
  for (std::size_t p = 0; p < m.classes(); ++p) out << ",predicted_" << p;
  out << '\n';
  for (std::size_t a = 0; a < m.classes(); ++a) {
    out << a;
    for (std::size_t p = 0; p < m.classes(); ++p) out << ',' << m.at(a, p);
    out << '\n';
  }
}

}  // namespace dpcipi
