#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "qpgm/encoding.hpp"
#include "qpgm/pgm.hpp"

namespace qpgm {

enum class EngineKind { Auto, Dense, Gram };

std::string_view to_string(EngineKind kind) noexcept;
EngineKind parse_engine(std::string_view text);

struct FitOptions {
  EncodingConfig encoding;
  PriorMode priors = PriorMode::Uniform;
  Vector explicit_priors;  // used only with PriorMode::Explicit
  std::size_t copies = 1;
  EngineKind engine = EngineKind::Auto;
  double rank_tol = kDefaultRankTol;
  std::size_t dense_limit = kDenseDimLimit;
};

/// Auto picks Dense when state_dim^copies is within dense_limit and no larger
/// than the number of training states; the Gram engine is cheaper past that
/// point and scores the same.
EngineKind resolve_engine(EngineKind requested, std::size_t state_dim, std::size_t copies,
                          std::size_t dense_limit = kDenseDimLimit,
                          std::size_t num_train = std::numeric_limits<std::size_t>::max());

struct BatchPrediction {
  std::vector<ClassId> labels;
  std::vector<ScoreVector> scores;
};

/// Fitted preprocessing plus one of the two measurement engines.
class PgmClassifier {
public:
  using Engine = std::variant<DensePgmModel, GramPgmModel>;

  PgmClassifier(Preprocessor pre, Priors priors, Engine engine, double rank_tol = kDefaultRankTol);

  const Preprocessor& preprocessor() const noexcept { return pre_; }
  const Priors& priors() const noexcept { return priors_; }
  const Engine& engine() const noexcept { return engine_; }
  EngineKind engine_kind() const noexcept;
  double rank_tol() const noexcept { return rank_tol_; }
  std::size_t num_classes() const noexcept;
  std::size_t copies() const noexcept;
  std::size_t feature_dim() const noexcept { return pre_.feature_dim(); }

  ScoreVector score(const FeatureVector& x) const;
  ClassId classify(const FeatureVector& x) const;
  /// Order-preserving; errors carry the offending row index.
  BatchPrediction predict_batch(std::span<const FeatureVector> rows) const;

private:
  Preprocessor pre_;
  Priors priors_;
  Engine engine_;
  double rank_tol_;
};

/// Fits normalizer, encodes, and builds the measurement. Only the given rows
/// are read.
PgmClassifier fit_classifier(std::span<const FeatureVector> rows, std::span<const ClassId> labels,
                             std::size_t num_classes, const FitOptions& options);

}  // namespace qpgm
