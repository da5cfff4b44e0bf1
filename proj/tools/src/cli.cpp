#include "qpgm/tools/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qpgm/error.hpp"
#include "qpgm/format.hpp"
#include "qpgm/io/csv.hpp"
#include "qpgm/io/dataset.hpp"
#include "qpgm/io/fingerprint.hpp"
#include "qpgm/io/model_file.hpp"
#include "qpgm/io/report.hpp"
#include "qpgm/io/splits_file.hpp"
#include "qpgm/selection.hpp"
#include "qpgm/tools/config.hpp"

namespace qpgm::tools {

namespace fs = std::filesystem;

namespace {

struct SplitsArgs {
  std::string dataset;
  double test_fraction = 0.2;
  std::size_t repetitions = 30;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct GridArgs {
  std::string dataset;
  std::string splits;
  std::string grid = "default";
  std::size_t k = 5;
  std::size_t cv_reps = 10;
  std::string priors = "uniform";
  std::string normalizer = "zscore";
  std::string engine = "auto";
  std::string positive_class;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string out_csv;
};

struct TrainArgs {
  std::string dataset;
  std::string config;
  std::string out_model;
};

struct PredictArgs {
  std::string model;
  std::string dataset;
  std::string out;
};

struct EvaluateArgs {
  std::string model;
  std::string dataset;
  std::string positive_class;
  std::string out;
  std::string out_csv;
};

struct CompareArgs {
  std::string report_a;
  std::string report_b;
  std::string name_a;
  std::string name_b;
  std::string out;
};

template <typename T>
T as_usage(const char* what, const auto& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw UsageError(std::string(what) + ": " + e.detail());
  }
}

void require_two_classes(const io::Dataset& data) {
  if (data.class_names.size() < 2) {
    throw Error(ErrorKind::EmptyClass, "training needs at least 2 distinct labels, found " +
                                           std::to_string(data.class_names.size()));
  }
}

std::optional<ClassId> positive_index(const std::string& name, const std::vector<std::string>& classes) {
  if (name.empty()) return std::nullopt;
  const auto it = std::find(classes.begin(), classes.end(), name);
  if (it == classes.end()) throw UsageError("unknown positive class '" + name + "'");
  return static_cast<ClassId>(it - classes.begin());
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_file(path, text);
  }
}

std::vector<std::size_t> class_counts(std::span<const ClassId> labels, std::span<const std::size_t> rows,
                                      std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const std::size_t r : rows) ++counts[labels[r]];
  return counts;
}

int cmd_splits(const SplitsArgs& a, std::ostream& out) {
  if (!(a.test_fraction > 0.0 && a.test_fraction < 1.0)) {
    throw UsageError("--test-fraction must lie strictly between 0 and 1");
  }
  if (a.repetitions == 0) throw UsageError("--repetitions must be at least 1");
  const io::Dataset data = io::load_dataset(a.dataset);
  require_two_classes(data);

  io::SplitFile file;
  file.fingerprint_algorithm = std::string(io::kFingerprintAlgorithm);
  file.fingerprint = data.fingerprint;
  file.num_rows = data.size();
  file.master_seed = *a.seed;
  file.test_fraction = a.test_fraction;
  file.generator = "qpgm splits";
  file.splits = stratified_holdout(data.labels, a.test_fraction, a.repetitions, *a.seed);
  io::save_split_file(a.out, file);

  const std::size_t l = data.class_names.size();
  const auto train = class_counts(data.labels, file.splits.front().train, l);
  const auto test = class_counts(data.labels, file.splits.front().test, l);
  out << "class\ttotal\ttrain\ttest\n";
  for (ClassId c = 0; c < l; ++c) {
    out << data.class_names[c] << '\t' << train[c] + test[c] << '\t' << train[c] << '\t' << test[c] << '\n';
  }
  out << "repetitions\t" << file.splits.size() << "\ttest rows\t" << file.splits.front().test.size() << '\n';
  return kExitOk;
}

int cmd_gridsearch(const GridArgs& a, std::ostream& out) {
  const PriorMode priors = as_usage<PriorMode>("--priors", [&] {
    const PriorMode p = parse_prior_mode(a.priors);
    if (p == PriorMode::Explicit) throw Error(ErrorKind::ParseError, "grid priors must be uniform or empirical");
    return p;
  });
  ProtocolConfig config;
  config.grid = as_usage<std::vector<GridPoint>>("--grid", [&] { return parse_grid(a.grid, priors); });
  config.search.k = a.k;
  config.search.cv_repetitions = a.cv_reps;
  config.search.seed = *a.seed;
  config.search.normalizer = as_usage<NormalizerKind>("--normalizer", [&] { return parse_normalizer(a.normalizer); });
  config.search.engine = as_usage<EngineKind>("--engine", [&] { return parse_engine(a.engine); });
  config.search.workers = workers_from_env();
  if (a.k < 2) throw UsageError("--k must be at least 2");
  if (a.cv_reps < 1) throw UsageError("--cv-reps must be at least 1");

  const io::Dataset data = io::load_dataset(a.dataset);
  require_two_classes(data);
  config.positive_class = positive_index(a.positive_class, data.class_names);
  const io::SplitFile splits = io::load_split_file(a.splits);
  io::require_fingerprint(splits, data.fingerprint, data.size());

  const ProtocolReport report = run_protocol(data.rows, data.labels, data.class_names, splits.splits, config);

  // Worker count and paths are left out so reruns compare byte for byte.
  io::Echo echo{{"command", "gridsearch"},
                {"dataset_fingerprint", data.fingerprint},
                {"splits_fingerprint", splits.fingerprint},
                {"splits_master_seed", splits.master_seed ? std::to_string(*splits.master_seed) : ""},
                {"repetitions", std::to_string(splits.splits.size())},
                {"grid", a.grid},
                {"grid_points", std::to_string(config.grid.size())},
                {"k", std::to_string(a.k)},
                {"cv_repetitions", std::to_string(a.cv_reps)},
                {"priors", std::string(to_string(priors))},
                {"normalizer", std::string(to_string(config.search.normalizer))},
                {"engine", std::string(to_string(config.search.engine))},
                {"positive_class", a.positive_class},
                {"master_seed", std::to_string(*a.seed)}};
  const std::string json = io::protocol_json(report, data.class_names, echo);
  const std::string csv = a.out_csv.empty() ? std::string() : io::protocol_csv(report, data.class_names);
  io::write_file(a.out, json);
  if (!a.out_csv.empty()) io::write_file(a.out_csv, csv);

  out << "chosen\t" << describe(report.selection.chosen) << '\n';
  for (const auto& f : report.selection.frequency) {
    out << "winner\t" << describe(f.point) << '\t' << f.count << '\n';
  }
  for (const auto& s : report.test_summary) {
    if (s.class_name.empty()) out << "test_" << s.metric << '\t' << format_double(s.mean) << '\n';
  }
  return kExitOk;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const FitOptions options = parse_train_config(a.config);
  const io::Dataset data = io::load_dataset(a.dataset);
  require_two_classes(data);
  if (options.priors == PriorMode::Explicit &&
      static_cast<std::size_t>(options.explicit_priors.size()) != data.class_names.size()) {
    throw UsageError("explicit priors need one value per class (" + std::to_string(data.class_names.size()) +
                     ")");
  }
  io::ModelBundle bundle{fit_classifier(data.rows, data.labels, data.class_names.size(), options),
                         data.class_names, data.feature_names};
  io::save_model(a.out_model, bundle);
  out << "engine\t" << to_string(bundle.model.engine_kind()) << '\n'
      << "copies\t" << bundle.model.copies() << '\n'
      << "classes\t" << bundle.class_names.size() << '\n';
  return kExitOk;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const io::ModelBundle bundle = io::load_model(a.model);
  const io::Dataset data = io::load_dataset(a.dataset, "label", false);
  io::require_feature_schema(data, bundle.feature_names);
  const BatchPrediction pred = bundle.model.predict_batch(data.rows);

  io::CsvRow header{"row", "predicted"};
  for (const auto& c : bundle.class_names) header.push_back("score_" + c);
  std::string text = io::csv_line(header);
  for (std::size_t i = 0; i < data.size(); ++i) {
    io::CsvRow row{std::to_string(i), bundle.class_names[pred.labels[i]]};
    for (Eigen::Index c = 0; c < pred.scores[i].size(); ++c) row.push_back(format_double(pred.scores[i][c]));
    text += io::csv_line(row);
  }
  emit(a.out, text, out);
  return kExitOk;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const io::ModelBundle bundle = io::load_model(a.model);
  const auto positive = positive_index(a.positive_class, bundle.class_names);
  const io::Dataset data = io::load_dataset(a.dataset);
  io::require_feature_schema(data, bundle.feature_names);
  const std::vector<ClassId> truth = io::labels_against(data, bundle.class_names);
  const BatchPrediction pred = bundle.model.predict_batch(data.rows);
  const MetricReport report = evaluate(truth, pred.labels, pred.scores, bundle.class_names.size(), positive);

  const auto& pre = bundle.model.preprocessor();
  io::Echo echo{{"command", "evaluate"},
                {"dataset_fingerprint", data.fingerprint},
                {"engine", std::string(to_string(bundle.model.engine_kind()))},
                {"encoding", std::string(to_string(pre.config.kind))},
                {"alpha", format_double(pre.config.rescale_alpha)},
                {"normalizer", std::string(to_string(pre.config.normalizer))},
                {"copies", std::to_string(bundle.model.copies())},
                {"priors", std::string(to_string(bundle.model.priors().mode))},
                {"positive_class", a.positive_class}};
  emit(a.out, io::evaluation_json(report, bundle.class_names, echo), out);
  if (!a.out_csv.empty()) io::write_file(a.out_csv, io::evaluation_csv(report, bundle.class_names));
  return kExitOk;
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const auto ra = io::read_report_metrics(io::read_file(a.report_a));
  const auto rb = io::read_report_metrics(io::read_file(a.report_b));
  const std::string name_a = a.name_a.empty() ? fs::path(a.report_a).stem().string() : a.name_a;
  std::string name_b = a.name_b.empty() ? fs::path(a.report_b).stem().string() : a.name_b;
  if (name_b == name_a) name_b += "_b";

  const auto diff = metric_difference(ra.entries, rb.entries);
  const std::vector<ModelClassAuc> models{io::class_auc_of(ra, name_a), io::class_auc_of(rb, name_b)};
  const WinLossMatrix wl = win_loss(models);

  const std::string diff_csv = io::difference_csv(diff);
  const std::string wl_csv = io::win_loss_csv(wl);
  if (a.out.empty() || a.out == "-") {
    out << diff_csv << '\n' << wl_csv;
  } else {
    fs::create_directories(a.out);
    io::write_file(fs::path(a.out) / "difference.csv", diff_csv);
    io::write_file(fs::path(a.out) / "win_loss.csv", wl_csv);
  }
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidAlpha:
    case ErrorKind::InvalidArgument:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pretty Good Measurement classifier: splits, grid search, training and evaluation."};
  app.name("qpgm");
  app.require_subcommand(1);

  SplitsArgs sa;
  auto* splits = app.add_subcommand("splits", "Repeated stratified train/test splits");
  splits->add_option("dataset", sa.dataset, "Labelled CSV")->required();
  splits->add_option("--test-fraction", sa.test_fraction, "Test share of each repetition")->capture_default_str();
  splits->add_option("--repetitions", sa.repetitions, "Number of splits")->capture_default_str();
  splits->add_option("--seed", sa.seed, "Master seed")->required();
  splits->add_option("--out", sa.out, "Split file (JSON)")->required();

  GridArgs ga;
  auto* grid = app.add_subcommand("gridsearch", "Per-split grid search, refit and test evaluation");
  grid->add_option("dataset", ga.dataset, "Labelled CSV")->required();
  grid->add_option("--splits", ga.splits, "Split file for this dataset")->required();
  grid->add_option("--grid", ga.grid, "'default' or 'encoding=..;alpha=..;copies=..'")->capture_default_str();
  grid->add_option("--k", ga.k, "Cross-validation folds")->capture_default_str();
  grid->add_option("--cv-reps", ga.cv_reps, "Cross-validation repetitions")->capture_default_str();
  grid->add_option("--priors", ga.priors, "uniform or empirical")->capture_default_str();
  grid->add_option("--normalizer", ga.normalizer, "none, zscore or minmax")->capture_default_str();
  grid->add_option("--engine", ga.engine, "auto, dense or gram")->capture_default_str();
  grid->add_option("--positive-class", ga.positive_class, "Class for binary metrics");
  grid->add_option("--seed", ga.seed, "Master seed for fold assignment")->required();
  grid->add_option("--out", ga.out, "Report (JSON)")->required();
  grid->add_option("--out-csv", ga.out_csv, "Report in long CSV format");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Fit one configuration on a whole dataset");
  train->add_option("dataset", ta.dataset, "Labelled CSV")->required();
  train->add_option("--config", ta.config, "key=value list, config JSON, or gridsearch report")->required();
  train->add_option("--out-model", ta.out_model, "Model file (JSON)")->required();

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "Score and label rows");
  predict->add_option("model", pa.model, "Model file")->required();
  predict->add_option("dataset", pa.dataset, "CSV; a label column is ignored")->required();
  predict->add_option("--out", pa.out, "Prediction CSV (stdout if omitted)");

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "Metric report for a labelled dataset");
  eval->add_option("model", ea.model, "Model file")->required();
  eval->add_option("dataset", ea.dataset, "Labelled CSV")->required();
  eval->add_option("--positive-class", ea.positive_class, "Class for binary metrics");
  eval->add_option("--out", ea.out, "Report (JSON; stdout if omitted)");
  eval->add_option("--out-csv", ea.out_csv, "Report in long CSV format");

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Win-loss matrix and metric differences of two reports");
  compare->add_option("report_a", ca.report_a, "Evaluation or gridsearch report")->required();
  compare->add_option("report_b", ca.report_b, "Evaluation or gridsearch report")->required();
  compare->add_option("--name-a", ca.name_a, "Label for the first report");
  compare->add_option("--name-b", ca.name_b, "Label for the second report");
  compare->add_option("--out", ca.out, "Directory for difference.csv and win_loss.csv");

  std::ostringstream cli_out;
  std::ostringstream cli_err;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (splits->parsed()) return cmd_splits(sa, out);
    if (grid->parsed()) return cmd_gridsearch(ga, out);
    if (train->parsed()) return cmd_train(ta, out);
    if (predict->parsed()) return cmd_predict(pa, out);
    if (eval->parsed()) return cmd_evaluate(ea, out);
    if (compare->parsed()) return cmd_compare(ca, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace qpgm::tools
