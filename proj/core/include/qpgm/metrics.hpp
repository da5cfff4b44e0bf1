#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpgm/pgm.hpp"

namespace qpgm {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
public:
  explicit ConfusionMatrix(std::size_t num_classes)
      : num_classes_(num_classes), counts_(num_classes * num_classes, 0) {}

  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t at(ClassId truth, ClassId predicted) const { return counts_.at(truth * num_classes_ + predicted); }
  void add(ClassId truth, ClassId predicted) { ++counts_.at(truth * num_classes_ + predicted); }
  std::size_t total() const noexcept;
  std::size_t row_total(ClassId truth) const;
  std::size_t column_total(ClassId predicted) const;

  bool operator==(const ConfusionMatrix&) const = default;

private:
  std::size_t num_classes_;
  std::vector<std::size_t> counts_;
};

ConfusionMatrix confusion(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                          std::size_t num_classes);

/// trace / total. Throws EmptyEvaluation on an empty matrix.
double accuracy(const ConfusionMatrix& cm);
/// Mean per-class recall over classes with at least one true sample.
double macro_accuracy(const ConfusionMatrix& cm);

/// One-vs-rest rates for a designated positive class. A zero denominator
/// yields 0 and raises the matching flag.
struct BinaryRates {
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool specificity_degenerate = false;
  bool f1_degenerate = false;
};

BinaryRates binary_rates(const ConfusionMatrix& cm, ClassId positive);

/// Mann-Whitney AUC with mid-ranks. Empty optional when either group is empty.
std::optional<double> auc_ovr(std::span<const double> scores, std::span<const bool> is_positive);

/// Per-class one-vs-rest AUC from score vectors.
std::vector<std::optional<double>> per_class_auc(std::span<const ScoreVector> scores,
                                                 std::span<const ClassId> truth, std::size_t num_classes);
/// Mean over defined entries; empty when none is defined.
std::optional<double> macro_auc(std::span<const std::optional<double>> aucs);

struct MetricReport {
  std::size_t samples = 0;
  ConfusionMatrix confusion{0};
  double accuracy = 0.0;
  double macro_accuracy = 0.0;
  std::vector<std::optional<double>> class_auc;
  std::optional<double> macro_auc;
  std::vector<BinaryRates> class_rates;  // one-vs-rest per class
  std::optional<ClassId> positive_class;
  std::optional<BinaryRates> binary;     // only for two classes
};

MetricReport evaluate(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                      std::span<const ScoreVector> scores, std::size_t num_classes,
                      std::optional<ClassId> positive_class = std::nullopt);

/// Long-format row; class_name is empty for whole-report metrics.
struct MetricEntry {
  std::string metric;
  std::string class_name;
  double value = 0.0;
};

/// Flattens a report in a fixed order. Undefined AUCs are omitted; degenerate
/// flags are not part of the long format.
std::vector<MetricEntry> flatten(const MetricReport& report, std::span<const std::string> class_names);

struct MetricDifference {
  std::string metric;
  std::string class_name;
  double a = 0.0;
  double b = 0.0;
  double difference = 0.0;  // a - b
};

/// Element-wise a - b over matching (metric, class) keys, in a's order.
/// Throws MetricSetMismatch if the key sets differ.
std::vector<MetricDifference> metric_difference(std::span<const MetricEntry> a,
                                                std::span<const MetricEntry> b);

struct ModelClassAuc {
  std::string model;
  std::vector<std::string> classes;
  std::vector<double> auc;  // NaN marks an undefined class AUC
};

struct WinLossMatrix {
  std::vector<std::string> models;
  Matrix fraction;  // (row, col): share of classes where row AUC > col AUC
};

/// Throws ClassSetMismatch unless every model lists the same classes.
WinLossMatrix win_loss(std::span<const ModelClassAuc> models);

}  // namespace qpgm
