#include "qpgm/classifier.hpp"

#include <algorithm>
#include <string>

#include "qpgm/error.hpp"

namespace qpgm {

std::string_view to_string(EngineKind kind) noexcept {
  switch (kind) {
    case EngineKind::Auto: return "auto";
    case EngineKind::Dense: return "dense";
    case EngineKind::Gram: return "gram";
  }
  return "auto";
}

EngineKind parse_engine(std::string_view text) {
  if (text == "auto") return EngineKind::Auto;
  if (text == "dense") return EngineKind::Dense;
  if (text == "gram") return EngineKind::Gram;
  throw Error(ErrorKind::ParseError, "unknown engine '" + std::string(text) + "'");
}

EngineKind resolve_engine(EngineKind requested, std::size_t state_dim, std::size_t copies,
                          std::size_t dense_limit, std::size_t num_train) {
  if (requested != EngineKind::Auto) return requested;
  std::size_t dim = 0;
  return checked_power(state_dim, copies, std::min(dense_limit, num_train), dim) ? EngineKind::Dense
                                                                                 : EngineKind::Gram;
}

PgmClassifier::PgmClassifier(Preprocessor pre, Priors priors, Engine engine, double rank_tol)
    : pre_(std::move(pre)), priors_(std::move(priors)), engine_(std::move(engine)), rank_tol_(rank_tol) {
  const std::size_t state_dim = std::visit([](const auto& e) { return e.state_dim(); }, engine_);
  if (state_dim != pre_.feature_dim() + 1) {
    throw Error(ErrorKind::DimMismatch, "engine state dim " + std::to_string(state_dim) +
                                            " does not match " + std::to_string(pre_.feature_dim()) +
                                            " features");
  }
  if (static_cast<std::size_t>(priors_.values.size()) != num_classes()) {
    throw Error(ErrorKind::DimMismatch, "priors length does not match class count");
  }
}

EngineKind PgmClassifier::engine_kind() const noexcept {
  return std::holds_alternative<DensePgmModel>(engine_) ? EngineKind::Dense : EngineKind::Gram;
}

std::size_t PgmClassifier::num_classes() const noexcept {
  return std::visit([](const auto& e) { return e.num_classes(); }, engine_);
}

std::size_t PgmClassifier::copies() const noexcept {
  return std::visit([](const auto& e) { return e.copies(); }, engine_);
}

ScoreVector PgmClassifier::score(const FeatureVector& x) const {
  const PureState psi = pre_(x);
  return std::visit([&](const auto& e) { return e.score(psi); }, engine_);
}

ClassId PgmClassifier::classify(const FeatureVector& x) const { return qpgm::classify(score(x)); }

BatchPrediction PgmClassifier::predict_batch(std::span<const FeatureVector> rows) const {
  BatchPrediction out;
  out.labels.reserve(rows.size());
  out.scores.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.scores.push_back(score(rows[i]));
    } catch (const Error& e) {
      throw Error(e.kind(), "row " + std::to_string(i) + ": " + e.detail());
    }
    out.labels.push_back(qpgm::classify(out.scores.back()));
  }
  return out;
}

PgmClassifier fit_classifier(std::span<const FeatureVector> rows, std::span<const ClassId> labels,
                             std::size_t num_classes, const FitOptions& options) {
  Preprocessor pre = fit_preprocessor(rows, options.encoding);
  auto states = encode_dataset(rows, pre.config, pre.normalizer);
  const LabeledStateSet train(std::move(states), std::vector<ClassId>(labels.begin(), labels.end()),
                              num_classes);
  Priors priors = resolve_priors(options.priors, train, options.explicit_priors);

  const EngineKind kind =
      resolve_engine(options.engine, train.state_dim(), options.copies, options.dense_limit, train.size());
  if (kind == EngineKind::Dense) {
    auto model = build_dense_pgm(train, priors, options.copies, options.rank_tol, options.dense_limit);
    return PgmClassifier(std::move(pre), std::move(priors), std::move(model), options.rank_tol);
  }
  auto model = build_gram_pgm(train, priors, options.copies, options.rank_tol);
  return PgmClassifier(std::move(pre), std::move(priors), std::move(model), options.rank_tol);
}

}  // namespace qpgm
