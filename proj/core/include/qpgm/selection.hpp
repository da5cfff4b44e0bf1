#pragma once

// Repeated stratified holdout, stratified k-fold cross-validation, AUC grid
// search and robust configuration selection.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpgm/classifier.hpp"
#include "qpgm/metrics.hpp"

namespace qpgm {

struct SplitPlan {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;   // ascending row indices
};

/// Per class, the test share is allotted by largest remainder from
/// round(test_fraction * n), so each class deviates from its exact target by
/// less than one sample; every class keeps at least one row on each side.
/// Throws StratificationImpossible if a class has fewer than 2 rows.
std::vector<SplitPlan> stratified_holdout(std::span<const ClassId> labels, double test_fraction,
                                          std::size_t repetitions, std::uint64_t seed);

/// Throws InvalidArgument unless train/test are disjoint, in range and cover
/// all num_rows rows.
void validate_split(const SplitPlan& plan, std::size_t num_rows);

struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;  // positions into the label list, ascending
};

/// Class members are shuffled and dealt round-robin, continuing the rotation
/// across classes so fold sizes also stay within one. Throws InvalidArgument
/// for k < 2 and ClassSmallerThanK when some class has fewer than k rows.
FoldPlan stratified_kfold(std::span<const ClassId> labels, std::size_t k, std::uint64_t seed);

struct GridPoint {
  EncodingKind encoding = EncodingKind::Amplitude;
  double alpha = 1.0;
  std::size_t copies = 1;
  PriorMode priors = PriorMode::Uniform;

  /// Lexicographic over (encoding, alpha, copies, priors); stereo < amplit.
  auto operator<=>(const GridPoint&) const = default;
};

std::string describe(const GridPoint& point);

/// Encodings {stereo, amplit} x alpha {0.5,1,2,4,8,16} x copies {1,5,...,60}.
std::vector<GridPoint> default_grid(PriorMode priors = PriorMode::Uniform);

/// "default" or "encoding=stereo,amplit;alpha=0.5,1;copies=1,5". Omitted keys
/// take the default axis. Throws ParseError.
std::vector<GridPoint> parse_grid(const std::string& text, PriorMode priors = PriorMode::Uniform);

struct GridSearchOptions {
  std::size_t k = 5;
  std::size_t cv_repetitions = 10;
  std::uint64_t seed = 0;
  NormalizerKind normalizer = NormalizerKind::ZScore;
  EngineKind engine = EngineKind::Auto;
  double rank_tol = kDefaultRankTol;
  std::size_t dense_limit = kDenseDimLimit;
  std::size_t workers = 1;
};

FitOptions fit_options_for(const GridPoint& point, const GridSearchOptions& options);

struct GridCell {
  GridPoint point;
  // Indexed repetition * k + fold.
  std::vector<double> fold_macro_auc;
  std::vector<double> fold_accuracy;
  std::vector<double> fold_macro_accuracy;
  double mean_macro_auc = 0.0;
  double mean_accuracy = 0.0;
  double mean_macro_accuracy = 0.0;
  bool failed = false;
  std::string failure;
  std::size_t rank = 0;  // 1-based; 0 for failed cells
};

struct GridSearchResult {
  std::vector<GridCell> cells;       // grid order
  std::vector<std::size_t> ranking;  // cell indices, best first

  const GridCell& best() const { return cells.at(ranking.at(0)); }
};

/// Cells (grid point x repetition x fold) run on options.workers threads and
/// are reduced in a fixed order, so the result does not depend on scheduling.
/// Ties on mean AUC (12 decimals) go to the lexicographically smaller point,
/// then to the earlier grid position. Throws GridSearchFailed if every cell
/// fails.
GridSearchResult grid_search(std::span<const FeatureVector> rows, std::span<const ClassId> labels,
                             std::size_t num_classes, std::span<const GridPoint> grid,
                             const GridSearchOptions& options);

struct FrequencyRow {
  GridPoint point;
  std::size_t count = 0;
  double mean_test_auc = 0.0;
};

struct SelectionReport {
  std::vector<GridPoint> winners;
  std::vector<FrequencyRow> frequency;  // lexicographic order
  GridPoint chosen;
  std::vector<std::string> audit;
};

/// Most frequent winner; ties by mean test AUC of the tied configs, then
/// lexicographic order.
SelectionReport select_robust_config(std::span<const GridPoint> winners, std::span<const double> test_auc);

struct ProtocolConfig {
  std::vector<GridPoint> grid = default_grid();
  GridSearchOptions search;
  std::optional<ClassId> positive_class;
};

struct SplitOutcome {
  std::size_t repetition = 0;
  GridCell winner;  // cross-validated statistics of the chosen cell
  std::size_t failed_cells = 0;
  MetricReport test;
};

struct MetricSummary {
  std::string metric;
  std::string class_name;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 with one split
  std::size_t count = 0;
};

struct ProtocolReport {
  std::vector<SplitOutcome> splits;
  SelectionReport selection;
  std::vector<MetricSummary> test_summary;
  std::vector<MetricSummary> cv_summary;
};

struct SplitFit {
  GridSearchResult search;
  PgmClassifier model;
};

/// Grid search on the training rows of one split, then refit of the winner on
/// all of them. Test rows are never read.
SplitFit fit_split(std::span<const FeatureVector> rows, std::span<const ClassId> labels,
                   std::size_t num_classes, const SplitPlan& split, const ProtocolConfig& config);

/// Per split: fit_split, then evaluation on the test rows. Cross-validated
/// quantities are already averaged within each split before being averaged
/// across splits.
ProtocolReport run_protocol(std::span<const FeatureVector> rows, std::span<const ClassId> labels,
                            std::span<const std::string> class_names, std::span<const SplitPlan> splits,
                            const ProtocolConfig& config);

/// mean/std per (metric, class) key in first-seen order.
std::vector<MetricSummary> summarize(std::span<const std::vector<MetricEntry>> per_split);

}  // namespace qpgm
