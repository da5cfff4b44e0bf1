#pragma once

// Pretty-good-measurement construction and Born-rule scoring.
//
// Two engines build the same measurement:
//  * DensePgmModel materialises F_i = S p_i rho_i S + P_ker / l in the
//    (d+1)^n dimensional operator space, with S the pseudoinverse square root
//    of the mixture sigma. Practical only for small (d+1)^n.
//  * GramPgmModel works in the span of the m lifted training states. With
//    columns a_j = sqrt(w_j) psi_j^{(x)n}, sigma = A A^T and the scores reduce
//    to kernel evaluations (psi_j . psi)^n against G = A^T A, so cost depends
//    on m and d but never on (d+1)^n.

#include <cstddef>
#include <span>
#include <vector>

#include "qpgm/encoding.hpp"
#include "qpgm/operator.hpp"

namespace qpgm {

/// Zero-based class index.
using ClassId = std::size_t;
/// Per-class Born-rule probabilities; sums to one.
using ScoreVector = Vector;

class LabeledStateSet {
public:
  /// Throws LabelOutOfRange for labels >= num_classes, EmptyClass when some
  /// class has no member, DimMismatch for ragged states.
  LabeledStateSet(std::vector<PureState> states, std::vector<ClassId> labels, std::size_t num_classes);

  const std::vector<PureState>& states() const noexcept { return states_; }
  const std::vector<ClassId>& labels() const noexcept { return labels_; }
  std::size_t num_classes() const noexcept { return counts_.size(); }
  std::size_t size() const noexcept { return states_.size(); }
  std::size_t state_dim() const noexcept { return states_.front().dim(); }
  const std::vector<std::size_t>& class_counts() const noexcept { return counts_; }
  std::vector<PureState> class_states(ClassId c) const;

private:
  std::vector<PureState> states_;
  std::vector<ClassId> labels_;
  std::vector<std::size_t> counts_;
};

enum class PriorMode { Uniform, Empirical, Explicit };

std::string_view to_string(PriorMode mode) noexcept;
PriorMode parse_prior_mode(std::string_view text);

struct Priors {
  PriorMode mode = PriorMode::Uniform;
  Vector values;

  static Priors uniform(std::size_t num_classes);
  static Priors empirical(std::span<const std::size_t> class_counts);
  /// Throws InvalidArgument unless every value > 0 and they sum to 1 within 1e-12.
  static Priors explicit_values(const Vector& values);
};

/// Uniform/empirical priors for the given set; explicit_values is used only in
/// Explicit mode.
Priors resolve_priors(PriorMode mode, const LabeledStateSet& train, const Vector& explicit_values = {});

struct ClassEnsemble {
  std::vector<DensityOperator> reps;
  Priors priors;
  std::size_t copies = 1;
};

/// (1/m) sum_j psi_j psi_j^T. Throws EmptyClass on an empty list.
DensityOperator quantum_centroid(std::span<const PureState> states);
/// (1/m) sum_j (psi_j psi_j^T)^{(x)n}. Differs from centroid^{(x)n} in general.
DensityOperator copies_centroid(std::span<const PureState> states, std::size_t copies,
                                std::size_t dense_limit = kDenseDimLimit);

ClassEnsemble build_ensemble(const LabeledStateSet& train, const Priors& priors, std::size_t copies,
                             std::size_t dense_limit = kDenseDimLimit);

/// sigma = sum_i p_i rho_i
DensityOperator mixture(const ClassEnsemble& ensemble);

/// Dense (explicit POVM) engine.
class DensePgmModel {
public:
  DensePgmModel(std::vector<SymmetricOperator> povm, std::size_t copies, std::size_t state_dim);

  const std::vector<SymmetricOperator>& povm() const noexcept { return povm_; }
  std::size_t num_classes() const noexcept { return povm_.size(); }
  std::size_t copies() const noexcept { return copies_; }
  std::size_t state_dim() const noexcept { return state_dim_; }

  ScoreVector score(const PureState& psi) const;

private:
  std::vector<SymmetricOperator> povm_;
  std::size_t copies_;
  std::size_t state_dim_;
};

/// Gram-space engine.
class GramPgmModel {
public:
  struct Parts {
    Matrix states;               // state_dim x m, column j = psi_j
    Vector weights;              // w_j = p_{label_j} / m_{label_j}
    std::vector<ClassId> labels;
    std::size_t num_classes = 0;
    std::size_t copies = 1;
    Matrix inv_sqrt;             // M = G^{-1/2} (pseudoinverse)
    Matrix pinv;                 // P = G^+
  };

  explicit GramPgmModel(Parts parts);

  const Parts& parts() const noexcept { return p_; }
  std::size_t num_classes() const noexcept { return p_.num_classes; }
  std::size_t copies() const noexcept { return p_.copies; }
  std::size_t state_dim() const noexcept { return static_cast<std::size_t>(p_.states.rows()); }
  std::size_t num_train() const noexcept { return static_cast<std::size_t>(p_.states.cols()); }

  ScoreVector score(const PureState& psi) const;

private:
  Parts p_;
  Vector sqrt_weights_;
};

/// c^n evaluated as exp(n log|c|) sign(c)^n, with |c| < 1e-300 flushed to 0.
double powered_overlap(double c, std::size_t n) noexcept;

/// G_jk = sqrt(w_j w_k) (psi_j . psi_k)^n
Matrix gram_matrix(const Matrix& states, const Vector& weights, std::size_t copies);

DensePgmModel build_dense_pgm(const LabeledStateSet& train, const Priors& priors, std::size_t copies,
                              double rank_tol = kDefaultRankTol,
                              std::size_t dense_limit = kDenseDimLimit);

GramPgmModel build_gram_pgm(const LabeledStateSet& train, const Priors& priors, std::size_t copies,
                            double rank_tol = kDefaultRankTol);

/// Smallest index among the maximisers, after rounding scores to 12 decimals.
ClassId classify(const ScoreVector& scores);

}  // namespace qpgm
