#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpgm/metrics.hpp"
#include "qpgm/selection.hpp"

namespace qpgm::io {

/// Ordered key/value pairs echoed into reports (configuration, seed, inputs).
using Echo = std::vector<std::pair<std::string, std::string>>;

std::string evaluation_json(const MetricReport& report, std::span<const std::string> class_names,
                            const Echo& echo);
/// Long format: split,metric,class,value with split = "test".
std::string evaluation_csv(const MetricReport& report, std::span<const std::string> class_names);

std::string protocol_json(const ProtocolReport& report, std::span<const std::string> class_names,
                          const Echo& echo);
/// Long format: per-split rows, then "mean" and "std" rows.
std::string protocol_csv(const ProtocolReport& report, std::span<const std::string> class_names);

/// Metrics read back from an evaluation or protocol JSON report; protocol
/// reports contribute their across-split means.
struct ReportMetrics {
  std::string kind;
  std::vector<std::string> classes;
  std::vector<MetricEntry> entries;
};

ReportMetrics read_report_metrics(std::string_view json_text);

/// Per-class AUC in class order; NaN where the report has none.
ModelClassAuc class_auc_of(const ReportMetrics& metrics, std::string model_name);

std::string difference_csv(std::span<const MetricDifference> rows);
std::string win_loss_csv(const WinLossMatrix& matrix);

}  // namespace qpgm::io
