#include "qpgm/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "qpgm/error.hpp"
#include "qpgm/format.hpp"
#include "qpgm/seed.hpp"

namespace qpgm {

namespace {

std::vector<std::vector<std::size_t>> members_by_class(std::span<const ClassId> labels) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= out.size()) out.resize(labels[i] + 1);
    out[labels[i]].push_back(i);
  }
  return out;
}

double round12(double v) { return std::round(v * 1e12); }

template <typename T>
std::vector<T> gather(std::span<const T> values, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(values[i]);
  return out;
}

// Runs fn(0..count-1) on up to `workers` threads; the first exception thrown
// (lowest task index) is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t t = next++; t < count; t = next++) {
      try {
        fn(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<SplitPlan> stratified_holdout(std::span<const ClassId> labels, double test_fraction,
                                          std::size_t repetitions, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "test fraction must lie in (0, 1)");
  }
  const auto classes = members_by_class(labels);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].size() < 2) {
      throw Error(ErrorKind::StratificationImpossible,
                  "class " + std::to_string(c) + " has " + std::to_string(classes[c].size()) +
                      " samples; at least 2 are needed");
    }
  }

  // Largest-remainder allotment of round(fraction * n) test rows.
  const auto total_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(labels.size())));
  std::vector<std::size_t> quota(classes.size());
  std::vector<double> remainder(classes.size());
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const double ideal = test_fraction * static_cast<double>(classes[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(ideal));
    remainder[c] = ideal - std::floor(ideal);
    assigned += quota[c];
  }
  std::vector<std::size_t> by_remainder(classes.size());
  std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total_test && i < by_remainder.size(); ++i, ++assigned) {
    ++quota[by_remainder[i]];
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    quota[c] = std::clamp<std::size_t>(quota[c], 1, classes[c].size() - 1);
  }

  std::vector<SplitPlan> plans;
  plans.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    SplitPlan plan;
    plan.repetition = r;
    plan.seed = derive_seed(seed, SeedStream::Holdout, r);
    Rng rng(plan.seed);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      std::vector<std::size_t> members = classes[c];
      rng.shuffle(members);
      plan.test.insert(plan.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
      plan.train.insert(plan.train.end(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]), members.end());
    }
    std::sort(plan.train.begin(), plan.train.end());
    std::sort(plan.test.begin(), plan.test.end());
    plans.push_back(std::move(plan));
  }
  return plans;
}

void validate_split(const SplitPlan& plan, std::size_t num_rows) {
  std::vector<char> seen(num_rows, 0);
  auto mark = [&](const std::vector<std::size_t>& idx, const char* part) {
    for (std::size_t i : idx) {
      if (i >= num_rows) {
        throw Error(ErrorKind::InvalidArgument, "repetition " + std::to_string(plan.repetition) + ": " + part +
                                                    " index " + std::to_string(i) + " out of range");
      }
      if (seen[i]++) {
        throw Error(ErrorKind::InvalidArgument, "repetition " + std::to_string(plan.repetition) +
                                                    ": row " + std::to_string(i) + " appears twice");
      }
    }
  };
  mark(plan.train, "train");
  mark(plan.test, "test");
  const auto covered = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
  if (covered != num_rows) {
    throw Error(ErrorKind::InvalidArgument, "repetition " + std::to_string(plan.repetition) + " covers " +
                                                std::to_string(covered) + " of " + std::to_string(num_rows) +
                                                " rows");
  }
}

FoldPlan stratified_kfold(std::span<const ClassId> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "k must be at least 2");
  const auto classes = members_by_class(labels);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!classes[c].empty() && classes[c].size() < k) {
      throw Error(ErrorKind::ClassSmallerThanK, "class " + std::to_string(c) + " has " +
                                                    std::to_string(classes[c].size()) + " samples for " +
                                                    std::to_string(k) + " folds");
    }
  }
  Rng rng(seed);
  FoldPlan plan;
  plan.folds.resize(k);
  std::size_t offset = 0;
  for (const auto& cls : classes) {
    std::vector<std::size_t> members = cls;
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) plan.folds[(offset + i) % k].push_back(members[i]);
    offset += members.size();
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

std::string describe(const GridPoint& point) {
  return std::string(to_string(point.encoding)) + "/alpha=" + format_double(point.alpha) +
         "/n=" + std::to_string(point.copies) + "/" + std::string(to_string(point.priors));
}

namespace {
const std::vector<EncodingKind> kDefaultEncodings{EncodingKind::Stereographic, EncodingKind::Amplitude};
const std::vector<double> kDefaultAlphas{0.5, 1, 2, 4, 8, 16};
std::vector<std::size_t> default_copies() {
  std::vector<std::size_t> out{1};
  for (std::size_t n = 5; n <= 60; n += 5) out.push_back(n);
  return out;
}

std::vector<GridPoint> product(const std::vector<EncodingKind>& encodings, const std::vector<double>& alphas,
                               const std::vector<std::size_t>& copies, const std::vector<PriorMode>& priors) {
  std::vector<GridPoint> grid;
  for (auto e : encodings)
    for (double a : alphas)
      for (std::size_t n : copies)
        for (auto p : priors) grid.push_back({e, a, n, p});
  return grid;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : item.substr(b, e - b + 1));
  }
  return out;
}
}  // namespace

std::vector<GridPoint> default_grid(PriorMode priors) {
  return product(kDefaultEncodings, kDefaultAlphas, default_copies(), {priors});
}

std::vector<GridPoint> parse_grid(const std::string& text, PriorMode priors) {
  if (text.empty() || text == "default" || text == "table1") return default_grid(priors);
  std::vector<EncodingKind> encodings = kDefaultEncodings;
  std::vector<double> alphas = kDefaultAlphas;
  std::vector<std::size_t> copies = default_copies();
  std::vector<PriorMode> prior_modes{priors};

  for (const auto& clause : split_on(text, ';')) {
    if (clause.empty()) continue;
    const auto eq = clause.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "grid clause '" + clause + "' lacks '='");
    const std::string key = clause.substr(0, eq);
    const auto values = split_on(clause.substr(eq + 1), ',');
    if (values.empty() || std::any_of(values.begin(), values.end(), [](const auto& v) { return v.empty(); })) {
      throw Error(ErrorKind::ParseError, "grid clause '" + clause + "' has an empty value");
    }
    if (key == "encoding" || key == "encodings") {
      encodings.clear();
      for (const auto& v : values) encodings.push_back(parse_encoding(v));
    } else if (key == "alpha" || key == "rescale") {
      alphas.clear();
      for (const auto& v : values) {
        const double a = parse_double(v);
        if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::ParseError, "alpha must be > 0: " + v);
        alphas.push_back(a);
      }
    } else if (key == "copies" || key == "n") {
      copies.clear();
      for (const auto& v : values) {
        const double n = parse_double(v);
        if (!(n >= 1.0) || n != std::floor(n) || n > 1e6) {
          throw Error(ErrorKind::ParseError, "copies must be a positive integer: " + v);
        }
        copies.push_back(static_cast<std::size_t>(n));
      }
    } else if (key == "priors") {
      prior_modes.clear();
      for (const auto& v : values) {
        const PriorMode mode = parse_prior_mode(v);
        if (mode == PriorMode::Explicit) throw Error(ErrorKind::ParseError, "explicit priors cannot be gridded");
        prior_modes.push_back(mode);
      }
    } else {
      throw Error(ErrorKind::ParseError, "unknown grid key '" + key + "'");
    }
  }
  return product(encodings, alphas, copies, prior_modes);
}

FitOptions fit_options_for(const GridPoint& point, const GridSearchOptions& options) {
  FitOptions fit;
  fit.encoding = {point.encoding, point.alpha, options.normalizer};
  fit.priors = point.priors;
  fit.copies = point.copies;
  fit.engine = options.engine;
  fit.rank_tol = options.rank_tol;
  fit.dense_limit = options.dense_limit;
  return fit;
}

namespace {

struct FoldData {
  std::vector<FeatureVector> train_rows;
  std::vector<ClassId> train_labels;
  std::vector<FeatureVector> val_rows;
  std::vector<ClassId> val_labels;
};

struct FoldScore {
  double macro_auc = 0.0;
  double accuracy = 0.0;
  double macro_accuracy = 0.0;
  std::string failure;
  bool failed = false;
};

FoldScore evaluate_fold(const FoldData& fold, std::size_t num_classes, const FitOptions& fit) {
  FoldScore out;
  try {
    const auto model = fit_classifier(fold.train_rows, fold.train_labels, num_classes, fit);
    const auto pred = model.predict_batch(fold.val_rows);
    const auto auc = macro_auc(per_class_auc(pred.scores, fold.val_labels, num_classes));
    if (!auc) throw Error(ErrorKind::EmptyEvaluation, "validation fold has no defined class AUC");
    const auto cm = confusion(fold.val_labels, pred.labels, num_classes);
    out.macro_auc = *auc;
    out.accuracy = accuracy(cm);
    out.macro_accuracy = macro_accuracy(cm);
  } catch (const Error& e) {
    out.failed = true;
    out.failure = e.what();
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

GridSearchResult grid_search(std::span<const FeatureVector> rows, std::span<const ClassId> labels,
                             std::size_t num_classes, std::span<const GridPoint> grid,
                             const GridSearchOptions& options) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "grid is empty");
  if (rows.size() != labels.size()) throw Error(ErrorKind::DimMismatch, "rows and labels lengths differ");
  if (options.cv_repetitions == 0) throw Error(ErrorKind::InvalidArgument, "cv repetitions must be >= 1");
  const std::size_t k = options.k;
  const std::size_t reps = options.cv_repetitions;

  std::vector<FoldData> folds;
  folds.reserve(reps * k);
  for (std::size_t r = 0; r < reps; ++r) {
    const FoldPlan plan = stratified_kfold(labels, k, derive_seed(options.seed, SeedStream::Folds, r));
    for (std::size_t f = 0; f < k; ++f) {
      std::vector<std::size_t> train_idx;
      for (std::size_t g = 0; g < k; ++g) {
        if (g != f) train_idx.insert(train_idx.end(), plan.folds[g].begin(), plan.folds[g].end());
      }
      std::sort(train_idx.begin(), train_idx.end());
      folds.push_back({gather(rows, std::span<const std::size_t>(train_idx)),
                       gather(labels, std::span<const std::size_t>(train_idx)),
                       gather(rows, std::span<const std::size_t>(plan.folds[f])),
                       gather(labels, std::span<const std::size_t>(plan.folds[f]))});
    }
  }

  const std::size_t per_point = reps * k;
  std::vector<FoldScore> scores(grid.size() * per_point);
  parallel_for(scores.size(), options.workers, [&](std::size_t t) {
    const GridPoint& point = grid[t / per_point];
    scores[t] = evaluate_fold(folds[t % per_point], num_classes, fit_options_for(point, options));
  });

  GridSearchResult result;
  result.cells.reserve(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    GridCell cell;
    cell.point = grid[p];
    for (std::size_t i = 0; i < per_point; ++i) {
      const FoldScore& s = scores[p * per_point + i];
      if (s.failed) {
        cell.failed = true;
        cell.failure = s.failure;
        break;
      }
      cell.fold_macro_auc.push_back(s.macro_auc);
      cell.fold_accuracy.push_back(s.accuracy);
      cell.fold_macro_accuracy.push_back(s.macro_accuracy);
    }
    if (cell.failed) {
      cell.fold_macro_auc.clear();
      cell.fold_accuracy.clear();
      cell.fold_macro_accuracy.clear();
    } else {
      cell.mean_macro_auc = mean_of(cell.fold_macro_auc);
      cell.mean_accuracy = mean_of(cell.fold_accuracy);
      cell.mean_macro_accuracy = mean_of(cell.fold_macro_accuracy);
      result.ranking.push_back(p);
    }
    result.cells.push_back(std::move(cell));
  }
  if (result.ranking.empty()) {
    throw Error(ErrorKind::GridSearchFailed, "every grid cell failed; first: " + result.cells.front().failure);
  }
  std::stable_sort(result.ranking.begin(), result.ranking.end(), [&](std::size_t a, std::size_t b) {
    const double ra = round12(result.cells[a].mean_macro_auc);
    const double rb = round12(result.cells[b].mean_macro_auc);
    if (ra != rb) return ra > rb;
    if (result.cells[a].point != result.cells[b].point) return result.cells[a].point < result.cells[b].point;
    return a < b;
  });
  for (std::size_t i = 0; i < result.ranking.size(); ++i) result.cells[result.ranking[i]].rank = i + 1;
  return result;
}

SelectionReport select_robust_config(std::span<const GridPoint> winners, std::span<const double> test_auc) {
  if (winners.empty()) throw Error(ErrorKind::InvalidArgument, "no split winners to select from");
  if (winners.size() != test_auc.size()) throw Error(ErrorKind::DimMismatch, "winners and AUC lengths differ");

  struct Tally {
    std::size_t count = 0;
    double auc_sum = 0.0;
    std::size_t auc_count = 0;
  };
  std::map<GridPoint, Tally> tally;
  for (std::size_t s = 0; s < winners.size(); ++s) {
    Tally& t = tally[winners[s]];
    ++t.count;
    if (std::isfinite(test_auc[s])) {
      t.auc_sum += test_auc[s];
      ++t.auc_count;
    }
  }

  SelectionReport report;
  report.winners.assign(winners.begin(), winners.end());
  for (const auto& [point, t] : tally) {
    const double mean = t.auc_count ? t.auc_sum / static_cast<double>(t.auc_count)
                                    : std::numeric_limits<double>::quiet_NaN();
    report.frequency.push_back({point, t.count, mean});
  }

  std::size_t top = 0;
  for (const auto& row : report.frequency) top = std::max(top, row.count);
  std::vector<const FrequencyRow*> tied;
  for (const auto& row : report.frequency) {
    if (row.count == top) tied.push_back(&row);
  }
  report.audit.push_back("frequency: max count " + std::to_string(top) + " over " +
                         std::to_string(winners.size()) + " splits, " + std::to_string(tied.size()) +
                         " configuration(s) tied");
  if (tied.size() > 1) {
    auto key = [](const FrequencyRow* r) {
      return std::isnan(r->mean_test_auc) ? -std::numeric_limits<double>::infinity() : round12(r->mean_test_auc);
    };
    double best = -std::numeric_limits<double>::infinity();
    for (const auto* r : tied) best = std::max(best, key(r));
    std::vector<const FrequencyRow*> still;
    for (const auto* r : tied) {
      report.audit.push_back("mean test AUC: " + describe(r->point) + " = " + format_double(r->mean_test_auc));
      if (key(r) == best) still.push_back(r);
    }
    tied = std::move(still);
    report.audit.push_back("mean test AUC: " + std::to_string(tied.size()) + " configuration(s) remain");
    if (tied.size() > 1) report.audit.push_back("lexicographic: first of remaining configurations");
  }
  // frequency is already in lexicographic order.
  report.chosen = tied.front()->point;
  report.audit.push_back("chosen: " + describe(report.chosen));
  return report;
}

SplitFit fit_split(std::span<const FeatureVector> rows, std::span<const ClassId> labels,
                   std::size_t num_classes, const SplitPlan& split, const ProtocolConfig& config) {
  validate_split(split, rows.size());
  const auto train_rows = gather(rows, std::span<const std::size_t>(split.train));
  const auto train_labels = gather(labels, std::span<const std::size_t>(split.train));
  GridSearchOptions search = config.search;
  search.seed = derive_seed(config.search.seed, SeedStream::Folds, split.repetition);
  auto result = grid_search(train_rows, train_labels, num_classes, config.grid, search);
  auto model = fit_classifier(train_rows, train_labels, num_classes,
                              fit_options_for(result.best().point, config.search));
  return {std::move(result), std::move(model)};
}

std::vector<MetricSummary> summarize(std::span<const std::vector<MetricEntry>> per_split) {
  std::vector<MetricSummary> out;
  std::map<std::pair<std::string, std::string>, std::vector<double>> values;
  for (const auto& entries : per_split) {
    for (const auto& e : entries) {
      auto [it, inserted] = values.try_emplace({e.metric, e.class_name});
      if (inserted) out.push_back({e.metric, e.class_name, 0.0, 0.0, 0});
      it->second.push_back(e.value);
    }
  }
  for (auto& s : out) {
    const auto& v = values.at({s.metric, s.class_name});
    s.count = v.size();
    s.mean = mean_of(v);
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - s.mean) * (x - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
  }
  return out;
}

ProtocolReport run_protocol(std::span<const FeatureVector> rows, std::span<const ClassId> labels,
                            std::span<const std::string> class_names, std::span<const SplitPlan> splits,
                            const ProtocolConfig& config) {
  if (splits.empty()) throw Error(ErrorKind::InvalidArgument, "no splits given");
  const std::size_t num_classes = class_names.size();
  ProtocolReport report;
  std::vector<GridPoint> winners;
  std::vector<double> test_auc;
  std::vector<std::vector<MetricEntry>> test_entries;
  std::vector<std::vector<MetricEntry>> cv_entries;

  for (const auto& split : splits) {
    try {
      SplitFit fit = fit_split(rows, labels, num_classes, split, config);
      const auto test_rows = gather(rows, std::span<const std::size_t>(split.test));
      const auto test_labels = gather(labels, std::span<const std::size_t>(split.test));
      const auto pred = fit.model.predict_batch(test_rows);

      SplitOutcome outcome;
      outcome.repetition = split.repetition;
      outcome.winner = fit.search.best();
      outcome.failed_cells = static_cast<std::size_t>(std::count_if(
          fit.search.cells.begin(), fit.search.cells.end(), [](const GridCell& c) { return c.failed; }));
      outcome.test = evaluate(test_labels, pred.labels, pred.scores, num_classes, config.positive_class);

      winners.push_back(outcome.winner.point);
      test_auc.push_back(outcome.test.macro_auc.value_or(std::numeric_limits<double>::quiet_NaN()));
      test_entries.push_back(flatten(outcome.test, class_names));
      cv_entries.push_back({{"cv_macro_auc", "", outcome.winner.mean_macro_auc},
                            {"cv_accuracy", "", outcome.winner.mean_accuracy},
                            {"cv_macro_accuracy", "", outcome.winner.mean_macro_accuracy}});
      report.splits.push_back(std::move(outcome));
    } catch (const Error& e) {
      throw Error(e.kind(), "split " + std::to_string(split.repetition) + ": " + e.detail());
    }
  }
  report.selection = select_robust_config(winners, test_auc);
  report.test_summary = summarize(test_entries);
  report.cv_summary = summarize(cv_entries);
  return report;
}

}  // namespace qpgm
