#include "qpgm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <utility>

#include "qpgm/error.hpp"

namespace qpgm {

std::size_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::row_total(ClassId truth) const {
  std::size_t s = 0;
  for (ClassId p = 0; p < num_classes_; ++p) s += at(truth, p);
  return s;
}

std::size_t ConfusionMatrix::column_total(ClassId predicted) const {
  std::size_t s = 0;
  for (ClassId t = 0; t < num_classes_; ++t) s += at(t, predicted);
  return s;
}

ConfusionMatrix confusion(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                          std::size_t num_classes) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorKind::DimMismatch, "truth and prediction lengths differ");
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= num_classes || predicted[i] >= num_classes) {
      throw Error(ErrorKind::LabelOutOfRange, "label out of range at row " + std::to_string(i));
    }
    cm.add(truth[i], predicted[i]);
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw Error(ErrorKind::EmptyEvaluation, "no evaluated samples");
  std::size_t correct = 0;
  for (ClassId c = 0; c < cm.num_classes(); ++c) correct += cm.at(c, c);
  return static_cast<double>(correct) / static_cast<double>(total);
}

double macro_accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorKind::EmptyEvaluation, "no evaluated samples");
  double sum = 0.0;
  std::size_t present = 0;
  for (ClassId c = 0; c < cm.num_classes(); ++c) {
    const std::size_t row = cm.row_total(c);
    if (row == 0) continue;
    sum += static_cast<double>(cm.at(c, c)) / static_cast<double>(row);
    ++present;
  }
  return sum / static_cast<double>(present);
}

namespace {
double ratio(std::size_t num, std::size_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

BinaryRates binary_rates(const ConfusionMatrix& cm, ClassId positive) {
  if (positive >= cm.num_classes()) throw Error(ErrorKind::LabelOutOfRange, "positive class out of range");
  const std::size_t tp = cm.at(positive, positive);
  const std::size_t fn = cm.row_total(positive) - tp;
  const std::size_t fp = cm.column_total(positive) - tp;
  const std::size_t tn = cm.total() - tp - fn - fp;

  BinaryRates r;
  r.precision = ratio(tp, tp + fp, r.precision_degenerate);
  r.recall = ratio(tp, tp + fn, r.recall_degenerate);
  r.specificity = ratio(tn, tn + fp, r.specificity_degenerate);
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  } else {
    r.f1 = 0.0;
    r.f1_degenerate = true;
  }
  return r;
}

std::optional<double> auc_ovr(std::span<const double> scores, std::span<const bool> is_positive) {
  if (scores.size() != is_positive.size()) {
    throw Error(ErrorKind::DimMismatch, "scores and membership lengths differ");
  }
  const std::size_t n = scores.size();
  const auto n_pos = static_cast<std::size_t>(std::count(is_positive.begin(), is_positive.end(), true));
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mid-ranks (1-based) for tied runs; every rank is a multiple of 1/2 so the
  // rank sum is exact.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (is_positive[order[k]]) pos_rank_sum += mid;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

std::vector<std::optional<double>> per_class_auc(std::span<const ScoreVector> scores,
                                                 std::span<const ClassId> truth, std::size_t num_classes) {
  if (scores.size() != truth.size()) throw Error(ErrorKind::DimMismatch, "scores and labels lengths differ");
  std::vector<std::optional<double>> out(num_classes);
  std::vector<double> column(scores.size());
  // std::vector<bool> is not contiguous, so membership lives in a plain array.
  const auto member = std::make_unique<bool[]>(scores.size());
  for (ClassId c = 0; c < num_classes; ++c) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (static_cast<std::size_t>(scores[i].size()) != num_classes) {
        throw Error(ErrorKind::DimMismatch, "score vector length differs from class count");
      }
      column[i] = scores[i][static_cast<Eigen::Index>(c)];
      member[i] = truth[i] == c;
    }
    out[c] = auc_ovr(column, std::span<const bool>(member.get(), scores.size()));
  }
  return out;
}

std::optional<double> macro_auc(std::span<const std::optional<double>> aucs) {
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& a : aucs) {
    if (!a) continue;
    sum += *a;
    ++defined;
  }
  if (defined == 0) return std::nullopt;
  return sum / static_cast<double>(defined);
}

MetricReport evaluate(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                      std::span<const ScoreVector> scores, std::size_t num_classes,
                      std::optional<ClassId> positive_class) {
  MetricReport r;
  r.samples = truth.size();
  r.confusion = confusion(truth, predicted, num_classes);
  r.accuracy = accuracy(r.confusion);
  r.macro_accuracy = macro_accuracy(r.confusion);
  r.class_auc = per_class_auc(scores, truth, num_classes);
  r.macro_auc = macro_auc(r.class_auc);
  r.class_rates.reserve(num_classes);
  for (ClassId c = 0; c < num_classes; ++c) r.class_rates.push_back(binary_rates(r.confusion, c));
  if (positive_class) {
    if (*positive_class >= num_classes) throw Error(ErrorKind::LabelOutOfRange, "positive class out of range");
    r.positive_class = positive_class;
    if (num_classes == 2) r.binary = r.class_rates[*positive_class];
  }
  return r;
}

std::vector<MetricEntry> flatten(const MetricReport& report, std::span<const std::string> class_names) {
  const std::size_t l = report.confusion.num_classes();
  if (class_names.size() != l) throw Error(ErrorKind::ClassSetMismatch, "class name count differs from report");
  std::vector<MetricEntry> out;
  out.push_back({"accuracy", "", report.accuracy});
  out.push_back({"macro_accuracy", "", report.macro_accuracy});
  if (report.macro_auc) out.push_back({"macro_auc", "", *report.macro_auc});
  for (ClassId c = 0; c < l; ++c) {
    const std::string& name = class_names[c];
    if (report.class_auc[c]) out.push_back({"auc", name, *report.class_auc[c]});
    const BinaryRates& br = report.class_rates[c];
    out.push_back({"precision", name, br.precision});
    out.push_back({"recall", name, br.recall});
    out.push_back({"specificity", name, br.specificity});
    out.push_back({"f1", name, br.f1});
  }
  if (report.binary) {
    const std::string& name = class_names[*report.positive_class];
    out.push_back({"binary_precision", name, report.binary->precision});
    out.push_back({"binary_recall", name, report.binary->recall});
    out.push_back({"binary_specificity", name, report.binary->specificity});
    out.push_back({"binary_f1", name, report.binary->f1});
  }
  return out;
}

std::vector<MetricDifference> metric_difference(std::span<const MetricEntry> a,
                                                std::span<const MetricEntry> b) {
  std::map<std::pair<std::string, std::string>, double> b_values;
  for (const auto& e : b) b_values.emplace(std::make_pair(e.metric, e.class_name), e.value);
  if (b_values.size() != b.size()) throw Error(ErrorKind::MetricSetMismatch, "duplicate metric keys");
  if (a.size() != b.size()) throw Error(ErrorKind::MetricSetMismatch, "metric sets differ in size");

  std::vector<MetricDifference> out;
  out.reserve(a.size());
  for (const auto& e : a) {
    const auto it = b_values.find({e.metric, e.class_name});
    if (it == b_values.end()) {
      throw Error(ErrorKind::MetricSetMismatch, "metric '" + e.metric + "' class '" + e.class_name +
                                                    "' missing from second report");
    }
    out.push_back({e.metric, e.class_name, e.value, it->second, e.value - it->second});
  }
  return out;
}

WinLossMatrix win_loss(std::span<const ModelClassAuc> models) {
  WinLossMatrix out;
  const auto k = static_cast<Eigen::Index>(models.size());
  out.fraction = Matrix::Zero(k, k);
  if (models.empty()) return out;
  const auto& classes = models.front().classes;
  for (const auto& m : models) {
    if (m.classes != classes || m.auc.size() != classes.size()) {
      throw Error(ErrorKind::ClassSetMismatch, "model '" + m.model + "' reports a different class set");
    }
    out.models.push_back(m.model);
  }
  if (classes.empty()) return out;
  const auto l = static_cast<double>(classes.size());
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      std::size_t wins = 0;
      for (std::size_t i = 0; i < classes.size(); ++i) {
        // NaN compares false, so undefined AUCs never win.
        if (models[static_cast<std::size_t>(r)].auc[i] > models[static_cast<std::size_t>(c)].auc[i]) ++wins;
      }
      out.fraction(r, c) = static_cast<double>(wins) / l;
    }
  }
  return out;
}

}  // namespace qpgm
