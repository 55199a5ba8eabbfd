#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace dpcipi {

// Rows are actual classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 2);

  std::size_t classes() const { return classes_; }
  std::size_t at(std::size_t actual, std::size_t predicted) const { return counts_[actual * classes_ + predicted]; }
  void add(std::size_t actual, std::size_t predicted, std::size_t count = 1);
  std::size_t total() const;
  std::size_t trace() const;
  std::size_t support(std::size_t actual) const;
  std::size_t predicted(std::size_t cls) const;
  const std::vector<std::size_t>& row_major() const { return counts_; }
  std::vector<std::vector<std::size_t>> rows() const;

  static ConfusionMatrix from_rows(const std::vector<std::vector<std::size_t>>& rows);

 private:
  std::size_t classes_;
  std::vector<std::size_t> counts_;
};

ConfusionMatrix confusion(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                          std::size_t classes);

struct Metrics {
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
};

/// Per-class precision/recall/F1 (0/0 taken as 0) averaged with actual-class
/// supports as weights.
Metrics weighted_metrics(const ConfusionMatrix& m);

nlohmann::ordered_json metrics_report(const std::string& task, const std::string& model_kind,
                                      const ConfusionMatrix& m, const Metrics& metrics);
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& m);

}  // namespace dpcipi
