#include "qpgm/io/report.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "qpgm/error.hpp"
#include "qpgm/format.hpp"
#include "qpgm/io/csv.hpp"

namespace qpgm::io {

using ojson = nlohmann::ordered_json;

namespace {

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson echo_json(const Echo& echo) {
  ojson j = ojson::object();
  for (const auto& [k, v] : echo) j[k] = v;
  return j;
}

ojson rates_json(const BinaryRates& r) {
  return {{"precision", r.precision},
          {"recall", r.recall},
          {"specificity", r.specificity},
          {"f1", r.f1},
          {"degenerate",
           {{"precision", r.precision_degenerate},
            {"recall", r.recall_degenerate},
            {"specificity", r.specificity_degenerate},
            {"f1", r.f1_degenerate}}}};
}

ojson entries_json(std::span<const MetricEntry> entries) {
  ojson out = ojson::array();
  for (const auto& e : entries) out.push_back({{"metric", e.metric}, {"class", e.class_name}, {"value", e.value}});
  return out;
}

ojson summary_json(std::span<const MetricSummary> rows) {
  ojson out = ojson::array();
  for (const auto& s : rows) {
    out.push_back({{"metric", s.metric}, {"class", s.class_name}, {"mean", s.mean}, {"std", s.stddev}, {"count", s.count}});
  }
  return out;
}

ojson point_json(const GridPoint& p) {
  return {{"config", describe(p)},
          {"encoding", to_string(p.encoding)},
          {"alpha", p.alpha},
          {"copies", p.copies},
          {"priors", to_string(p.priors)}};
}

ojson metric_report_json(const MetricReport& report, std::span<const std::string> class_names) {
  const std::size_t l = class_names.size();
  ojson j;
  j["samples"] = report.samples;
  j["classes"] = std::vector<std::string>(class_names.begin(), class_names.end());
  j["aggregation"] = {{"auc", "macro mean of one-vs-rest AUC over classes with both outcomes present"},
                      {"macro_accuracy", "mean per-class recall"}};
  ojson cm = ojson::array();
  for (ClassId t = 0; t < l; ++t) {
    ojson row = ojson::array();
    for (ClassId p = 0; p < l; ++p) row.push_back(report.confusion.at(t, p));
    cm.push_back(row);
  }
  j["confusion"] = cm;
  j["accuracy"] = report.accuracy;
  j["macro_accuracy"] = report.macro_accuracy;
  j["macro_auc"] = optional_number(report.macro_auc);
  ojson per_class = ojson::array();
  for (ClassId c = 0; c < l; ++c) {
    ojson row = {{"class", class_names[c]}, {"auc", optional_number(report.class_auc[c])},
                 {"auc_defined", report.class_auc[c].has_value()}};
    row.update(rates_json(report.class_rates[c]));
    per_class.push_back(row);
  }
  j["per_class"] = per_class;
  if (report.binary) {
    ojson b = {{"positive_class", class_names[*report.positive_class]}};
    b.update(rates_json(*report.binary));
    j["binary"] = b;
  }
  return j;
}

std::string long_row(std::string_view split, const std::string& metric, const std::string& cls, double value) {
  return csv_line({std::string(split), metric, cls, format_double(value)});
}

}  // namespace

std::string evaluation_json(const MetricReport& report, std::span<const std::string> class_names,
                            const Echo& echo) {
  ojson j;
  j["kind"] = "evaluation";
  j["echo"] = echo_json(echo);
  j.update(metric_report_json(report, class_names));
  j["metrics"] = entries_json(flatten(report, class_names));
  return j.dump(1) + "\n";
}

std::string evaluation_csv(const MetricReport& report, std::span<const std::string> class_names) {
  std::string out = "split,metric,class,value\n";
  for (const auto& e : flatten(report, class_names)) out += long_row("test", e.metric, e.class_name, e.value);
  return out;
}

std::string protocol_json(const ProtocolReport& report, std::span<const std::string> class_names,
                          const Echo& echo) {
  ojson j;
  j["kind"] = "protocol";
  j["echo"] = echo_json(echo);
  j["classes"] = std::vector<std::string>(class_names.begin(), class_names.end());
  ojson splits = ojson::array();
  for (const auto& s : report.splits) {
    ojson row;
    row["repetition"] = s.repetition;
    row["winner"] = point_json(s.winner.point);
    row["cv"] = {{"macro_auc", s.winner.mean_macro_auc},
                 {"accuracy", s.winner.mean_accuracy},
                 {"macro_accuracy", s.winner.mean_macro_accuracy},
                 {"fold_macro_auc", s.winner.fold_macro_auc}};
    row["failed_cells"] = s.failed_cells;
    row["test"] = metric_report_json(s.test, class_names);
    splits.push_back(row);
  }
  j["splits"] = splits;

  ojson sel;
  ojson winners = ojson::array();
  for (const auto& w : report.selection.winners) winners.push_back(describe(w));
  sel["winners"] = winners;
  ojson freq = ojson::array();
  for (const auto& f : report.selection.frequency) {
    ojson row = point_json(f.point);
    row["count"] = f.count;
    row["mean_test_auc"] = std::isnan(f.mean_test_auc) ? ojson(nullptr) : ojson(f.mean_test_auc);
    freq.push_back(row);
  }
  sel["frequency"] = freq;
  sel["chosen"] = point_json(report.selection.chosen);
  sel["audit"] = report.selection.audit;
  j["selection"] = sel;
  j["aggregation"] = {{"test", "mean and sample std of per-split test metrics"},
                      {"cv", "per split: mean over folds and repetitions of the winning cell; then mean and "
                             "sample std across splits"}};
  j["test_summary"] = summary_json(report.test_summary);
  j["cv_summary"] = summary_json(report.cv_summary);
  return j.dump(1) + "\n";
}

std::string protocol_csv(const ProtocolReport& report, std::span<const std::string> class_names) {
  std::string out = "split,metric,class,value\n";
  for (const auto& s : report.splits) {
    const std::string split = std::to_string(s.repetition);
    for (const auto& e : flatten(s.test, class_names)) out += long_row(split, e.metric, e.class_name, e.value);
    out += long_row(split, "cv_macro_auc", "", s.winner.mean_macro_auc);
    out += long_row(split, "cv_accuracy", "", s.winner.mean_accuracy);
    out += long_row(split, "cv_macro_accuracy", "", s.winner.mean_macro_accuracy);
  }
  for (const auto* summary : {&report.test_summary, &report.cv_summary}) {
    for (const auto& m : *summary) out += long_row("mean", m.metric, m.class_name, m.mean);
    for (const auto& m : *summary) out += long_row("std", m.metric, m.class_name, m.stddev);
  }
  return out;
}

ReportMetrics read_report_metrics(std::string_view json_text) {
  ReportMetrics out;
  try {
    const auto j = ojson::parse(json_text);
    out.kind = j.at("kind").get<std::string>();
    out.classes = j.at("classes").get<std::vector<std::string>>();
    if (out.kind == "evaluation") {
      for (const auto& e : j.at("metrics")) {
        out.entries.push_back({e.at("metric").get<std::string>(), e.at("class").get<std::string>(),
                               e.at("value").get<double>()});
      }
    } else if (out.kind == "protocol") {
      for (const auto& e : j.at("test_summary")) {
        out.entries.push_back({e.at("metric").get<std::string>(), e.at("class").get<std::string>(),
                               e.at("mean").get<double>()});
      }
    } else {
      throw Error(ErrorKind::SchemaMismatch, "unknown report kind '" + out.kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("report: ") + e.what());
  }
  return out;
}

ModelClassAuc class_auc_of(const ReportMetrics& metrics, std::string model_name) {
  ModelClassAuc out{std::move(model_name), metrics.classes,
                    std::vector<double>(metrics.classes.size(), std::numeric_limits<double>::quiet_NaN())};
  for (const auto& e : metrics.entries) {
    if (e.metric != "auc") continue;
    for (std::size_t c = 0; c < metrics.classes.size(); ++c) {
      if (metrics.classes[c] == e.class_name) out.auc[c] = e.value;
    }
  }
  return out;
}

std::string difference_csv(std::span<const MetricDifference> rows) {
  std::string out = "metric,class,a,b,difference\n";
  for (const auto& r : rows) {
    out += csv_line({r.metric, r.class_name, format_double(r.a), format_double(r.b), format_double(r.difference)});
  }
  return out;
}

std::string win_loss_csv(const WinLossMatrix& matrix) {
  CsvRow header{"row"};
  header.insert(header.end(), matrix.models.begin(), matrix.models.end());
  std::string out = csv_line(header);
  for (std::size_t r = 0; r < matrix.models.size(); ++r) {
    CsvRow row{matrix.models[r]};
    for (std::size_t c = 0; c < matrix.models.size(); ++c) {
      row.push_back(format_double(matrix.fraction(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
    }
    out += csv_line(row);
  }
  return out;
}

}  // namespace qpgm::io
