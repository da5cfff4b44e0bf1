#include "qpgm/pgm.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qpgm/error.hpp"

namespace qpgm {

LabeledStateSet::LabeledStateSet(std::vector<PureState> states, std::vector<ClassId> labels,
                                 std::size_t num_classes)
    : states_(std::move(states)), labels_(std::move(labels)), counts_(num_classes, 0) {
  if (num_classes == 0) throw Error(ErrorKind::InvalidArgument, "need at least one class");
  if (states_.size() != labels_.size()) {
    throw Error(ErrorKind::DimMismatch, std::to_string(states_.size()) + " states but " +
                                            std::to_string(labels_.size()) + " labels");
  }
  if (states_.empty()) throw Error(ErrorKind::EmptyClass, "training set is empty");
  const std::size_t dim = states_.front().dim();
  for (std::size_t j = 0; j < states_.size(); ++j) {
    if (states_[j].dim() != dim) {
      throw Error(ErrorKind::DimMismatch, "state " + std::to_string(j) + " has dim " +
                                              std::to_string(states_[j].dim()) + ", expected " +
                                              std::to_string(dim));
    }
    if (labels_[j] >= num_classes) {
      throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(labels_[j]) + " at row " +
                                                  std::to_string(j) + " with " +
                                                  std::to_string(num_classes) + " classes");
    }
    ++counts_[labels_[j]];
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts_[c] == 0) throw Error(ErrorKind::EmptyClass, "class " + std::to_string(c) + " has no samples");
  }
}

std::vector<PureState> LabeledStateSet::class_states(ClassId c) const {
  std::vector<PureState> out;
  out.reserve(c < counts_.size() ? counts_[c] : 0);
  for (std::size_t j = 0; j < states_.size(); ++j) {
    if (labels_[j] == c) out.push_back(states_[j]);
  }
  return out;
}

std::string_view to_string(PriorMode mode) noexcept {
  switch (mode) {
    case PriorMode::Uniform: return "uniform";
    case PriorMode::Empirical: return "empirical";
    case PriorMode::Explicit: return "explicit";
  }
  return "uniform";
}

PriorMode parse_prior_mode(std::string_view text) {
  if (text == "uniform") return PriorMode::Uniform;
  if (text == "empirical") return PriorMode::Empirical;
  if (text == "explicit") return PriorMode::Explicit;
  throw Error(ErrorKind::ParseError, "unknown prior mode '" + std::string(text) + "'");
}

Priors Priors::uniform(std::size_t num_classes) {
  if (num_classes == 0) throw Error(ErrorKind::InvalidArgument, "need at least one class");
  return {PriorMode::Uniform, Vector::Constant(static_cast<Eigen::Index>(num_classes),
                                               1.0 / static_cast<double>(num_classes))};
}

Priors Priors::empirical(std::span<const std::size_t> class_counts) {
  const std::size_t total = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
  Vector p(static_cast<Eigen::Index>(class_counts.size()));
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] == 0) throw Error(ErrorKind::EmptyClass, "class " + std::to_string(c) + " has no samples");
    p[static_cast<Eigen::Index>(c)] = static_cast<double>(class_counts[c]) / static_cast<double>(total);
  }
  return {PriorMode::Empirical, p};
}

Priors Priors::explicit_values(const Vector& values) {
  if (values.size() == 0 || !values.allFinite() || (values.array() <= 0.0).any()) {
    throw Error(ErrorKind::InvalidArgument, "explicit priors must be finite and positive");
  }
  if (std::abs(values.sum() - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "explicit priors must sum to 1");
  }
  return {PriorMode::Explicit, values};
}

Priors resolve_priors(PriorMode mode, const LabeledStateSet& train, const Vector& explicit_values) {
  switch (mode) {
    case PriorMode::Uniform: return Priors::uniform(train.num_classes());
    case PriorMode::Empirical: return Priors::empirical(train.class_counts());
    case PriorMode::Explicit: {
      auto p = Priors::explicit_values(explicit_values);
      if (static_cast<std::size_t>(p.values.size()) != train.num_classes()) {
        throw Error(ErrorKind::DimMismatch, "explicit priors length differs from class count");
      }
      return p;
    }
  }
  return Priors::uniform(train.num_classes());
}

namespace {

void check_priors(const Priors& priors, std::size_t num_classes) {
  if (static_cast<std::size_t>(priors.values.size()) != num_classes) {
    throw Error(ErrorKind::DimMismatch, "priors have " + std::to_string(priors.values.size()) +
                                            " entries for " + std::to_string(num_classes) + " classes");
  }
}

// Columns are the lifted states psi_j^{(x)n}.
Matrix lifted_columns(std::span<const PureState> states, std::size_t copies, std::size_t dense_limit) {
  const Vector first = tensor_power(states.front().amplitudes(), copies, dense_limit);
  Matrix cols(first.size(), static_cast<Eigen::Index>(states.size()));
  cols.col(0) = first;
  for (std::size_t j = 1; j < states.size(); ++j) {
    if (states[j].dim() != states.front().dim()) {
      throw Error(ErrorKind::DimMismatch, "states of unequal dimension");
    }
    cols.col(static_cast<Eigen::Index>(j)) = tensor_power(states[j].amplitudes(), copies, dense_limit);
  }
  return cols;
}

}  // namespace

DensityOperator quantum_centroid(std::span<const PureState> states) {
  return copies_centroid(states, 1);
}

DensityOperator copies_centroid(std::span<const PureState> states, std::size_t copies,
                                std::size_t dense_limit) {
  if (states.empty()) throw Error(ErrorKind::EmptyClass, "centroid of an empty class");
  const Matrix cols = lifted_columns(states, copies, dense_limit);
  Matrix rho = cols * cols.transpose();
  rho /= static_cast<double>(states.size());
  return DensityOperator(SymmetricOperator(rho), trusted);
}

ClassEnsemble build_ensemble(const LabeledStateSet& train, const Priors& priors, std::size_t copies,
                             std::size_t dense_limit) {
  check_priors(priors, train.num_classes());
  ClassEnsemble out{{}, priors, copies};
  out.reps.reserve(train.num_classes());
  for (ClassId c = 0; c < train.num_classes(); ++c) {
    const auto members = train.class_states(c);
    out.reps.push_back(copies_centroid(members, copies, dense_limit));
  }
  return out;
}

DensityOperator mixture(const ClassEnsemble& ensemble) {
  if (ensemble.reps.empty()) throw Error(ErrorKind::InvalidArgument, "empty ensemble");
  check_priors(ensemble.priors, ensemble.reps.size());
  const std::size_t dim = ensemble.reps.front().dim();
  Matrix sigma = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < ensemble.reps.size(); ++i) {
    if (ensemble.reps[i].dim() != dim) {
      throw Error(ErrorKind::DimMismatch, "class representatives of unequal dimension");
    }
    sigma += ensemble.priors.values[static_cast<Eigen::Index>(i)] * ensemble.reps[i].op().matrix();
  }
  return DensityOperator(SymmetricOperator(sigma), trusted);
}

DensePgmModel::DensePgmModel(std::vector<SymmetricOperator> povm, std::size_t copies, std::size_t state_dim)
    : povm_(std::move(povm)), copies_(copies), state_dim_(state_dim) {
  if (povm_.empty()) throw Error(ErrorKind::InvalidArgument, "POVM needs at least one element");
  std::size_t expected = 0;
  if (copies == 0 || !checked_power(state_dim, copies, kDenseDimLimit, expected)) {
    throw Error(ErrorKind::DenseBlowup, "dense model dimension out of range");
  }
  for (const auto& f : povm_) {
    if (f.dim() != expected) throw Error(ErrorKind::DimMismatch, "POVM element has wrong dimension");
  }
}

ScoreVector DensePgmModel::score(const PureState& psi) const {
  if (psi.dim() != state_dim_) {
    throw Error(ErrorKind::DimMismatch, "state dim " + std::to_string(psi.dim()) + ", model expects " +
                                            std::to_string(state_dim_));
  }
  // tr(F_i phi phi^T) = phi^T F_i phi
  const Vector phi = tensor_power(psi.amplitudes(), copies_);
  ScoreVector f(static_cast<Eigen::Index>(povm_.size()));
  for (std::size_t i = 0; i < povm_.size(); ++i) {
    f[static_cast<Eigen::Index>(i)] = phi.dot(povm_[i].matrix() * phi);
  }
  return f;
}

DensePgmModel build_dense_pgm(const LabeledStateSet& train, const Priors& priors, std::size_t copies,
                              double rank_tol, std::size_t dense_limit) {
  const ClassEnsemble ensemble = build_ensemble(train, priors, copies, dense_limit);
  const DensityOperator sigma = mixture(ensemble);
  const PseudoInverseSqrt root = pinv_sqrt(sigma.op(), rank_tol);

  const std::size_t l = train.num_classes();
  const Matrix& s = root.inv_sqrt.matrix();
  const Matrix completion = root.kernel.op().matrix() / static_cast<double>(l);
  std::vector<SymmetricOperator> povm;
  povm.reserve(l);
  for (std::size_t i = 0; i < l; ++i) {
    const double p = priors.values[static_cast<Eigen::Index>(i)];
    povm.emplace_back(s * (p * ensemble.reps[i].op().matrix()) * s + completion);
  }
  return DensePgmModel(std::move(povm), copies, train.state_dim());
}

double powered_overlap(double c, std::size_t n) noexcept {
  const double mag = std::abs(c);
  if (mag < 1e-300) return 0.0;
  const double value = std::exp(static_cast<double>(n) * std::log(mag));
  return (c < 0.0 && (n % 2 == 1)) ? -value : value;
}

Matrix gram_matrix(const Matrix& states, const Vector& weights, std::size_t copies) {
  const Matrix overlaps = states.transpose() * states;
  const Vector root_w = weights.cwiseSqrt();
  const Eigen::Index m = overlaps.rows();
  Matrix g(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index j = 0; j <= k; ++j) {
      const double v = root_w[j] * root_w[k] * powered_overlap(overlaps(j, k), copies);
      g(j, k) = v;
      g(k, j) = v;
    }
  }
  return g;
}

GramPgmModel::GramPgmModel(Parts parts) : p_(std::move(parts)) {
  const Eigen::Index m = p_.states.cols();
  if (m == 0 || p_.copies == 0 || p_.num_classes == 0) {
    throw Error(ErrorKind::InvalidArgument, "Gram model needs training states, copies >= 1 and classes");
  }
  if (p_.weights.size() != m || static_cast<Eigen::Index>(p_.labels.size()) != m ||
      p_.inv_sqrt.rows() != m || p_.inv_sqrt.cols() != m || p_.pinv.rows() != m || p_.pinv.cols() != m) {
    throw Error(ErrorKind::DimMismatch, "Gram model parts have inconsistent sizes");
  }
  for (ClassId c : p_.labels) {
    if (c >= p_.num_classes) throw Error(ErrorKind::LabelOutOfRange, "Gram model label out of range");
  }
  sqrt_weights_ = p_.weights.cwiseSqrt();
}

ScoreVector GramPgmModel::score(const PureState& psi) const {
  if (psi.dim() != state_dim()) {
    throw Error(ErrorKind::DimMismatch, "state dim " + std::to_string(psi.dim()) + ", model expects " +
                                            std::to_string(state_dim()));
  }
  const Vector overlaps = p_.states.transpose() * psi.amplitudes();
  Vector v(overlaps.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    v[j] = sqrt_weights_[j] * powered_overlap(overlaps[j], p_.copies);
  }
  const Vector u = p_.inv_sqrt * v;
  const double in_image = v.dot(p_.pinv * v);
  const double kernel_share = (1.0 - in_image) / static_cast<double>(p_.num_classes);

  ScoreVector f = ScoreVector::Constant(static_cast<Eigen::Index>(p_.num_classes), kernel_share);
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    f[static_cast<Eigen::Index>(p_.labels[static_cast<std::size_t>(j)])] += u[j] * u[j];
  }
  return f;
}

GramPgmModel build_gram_pgm(const LabeledStateSet& train, const Priors& priors, std::size_t copies,
                            double rank_tol) {
  check_priors(priors, train.num_classes());
  if (copies == 0) throw Error(ErrorKind::InvalidArgument, "copy count must be >= 1");
  const auto m = static_cast<Eigen::Index>(train.size());
  const auto dim = static_cast<Eigen::Index>(train.state_dim());

  GramPgmModel::Parts parts;
  parts.states.resize(dim, m);
  parts.weights.resize(m);
  parts.labels = train.labels();
  parts.num_classes = train.num_classes();
  parts.copies = copies;
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const ClassId c = train.labels()[idx];
    parts.states.col(j) = train.states()[idx].amplitudes();
    parts.weights[j] = priors.values[static_cast<Eigen::Index>(c)] /
                       static_cast<double>(train.class_counts()[c]);
  }

  const SymmetricOperator g(gram_matrix(parts.states, parts.weights, copies));
  const auto rr = rank_revealed_spectrum(g, rank_tol);
  const auto r = static_cast<Eigen::Index>(rr.rank);
  const Matrix v = rr.spectrum.eigenvectors.rightCols(r);
  const Vector lambda = rr.spectrum.eigenvalues.tail(r);
  parts.inv_sqrt = SymmetricOperator(v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose()).matrix();
  parts.pinv = SymmetricOperator(v * lambda.cwiseInverse().asDiagonal() * v.transpose()).matrix();
  return GramPgmModel(std::move(parts));
}

ClassId classify(const ScoreVector& scores) {
  if (scores.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty score vector");
  ClassId best = 0;
  double best_value = std::round(scores[0] * 1e12);
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    const double v = std::round(scores[i] * 1e12);
    if (v > best_value) {
      best_value = v;
      best = static_cast<ClassId>(i);
    }
  }
  return best;
}

}  // namespace qpgm
