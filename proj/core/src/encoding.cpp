#include "qpgm/encoding.hpp"

#include <cmath>
#include <string>

#include "qpgm/error.hpp"

namespace qpgm {

std::string_view to_string(EncodingKind kind) noexcept {
  return kind == EncodingKind::Stereographic ? "stereo" : "amplit";
}

std::string_view to_string(NormalizerKind kind) noexcept {
  switch (kind) {
    case NormalizerKind::None: return "none";
    case NormalizerKind::ZScore: return "zscore";
    case NormalizerKind::MinMax: return "minmax";
  }
  return "none";
}

EncodingKind parse_encoding(std::string_view text) {
  if (text == "stereo" || text == "stereographic") return EncodingKind::Stereographic;
  if (text == "amplit" || text == "amplitude") return EncodingKind::Amplitude;
  throw Error(ErrorKind::ParseError, "unknown encoding '" + std::string(text) + "'");
}

NormalizerKind parse_normalizer(std::string_view text) {
  if (text == "none") return NormalizerKind::None;
  if (text == "zscore") return NormalizerKind::ZScore;
  if (text == "minmax") return NormalizerKind::MinMax;
  throw Error(ErrorKind::ParseError, "unknown normalizer '" + std::string(text) + "'");
}

void EncodingConfig::validate() const {
  if (!(rescale_alpha > 0.0) || !std::isfinite(rescale_alpha)) {
    throw Error(ErrorKind::InvalidAlpha, "rescale alpha must be > 0, got " + std::to_string(rescale_alpha));
  }
}

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0 || !(std::abs(amps_.norm() - 1.0) <= 1e-10)) {
    throw Error(ErrorKind::InvalidArgument, "state amplitudes must have unit norm");
  }
}

NormalizerParams fit_normalizer(std::span<const FeatureVector> train, NormalizerKind kind) {
  if (train.empty()) throw Error(ErrorKind::InvalidArgument, "cannot fit normalizer on empty set");
  const Eigen::Index d = train.front().size();
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].size() != d) {
      throw Error(ErrorKind::DimMismatch, "row " + std::to_string(i) + " has " +
                                              std::to_string(train[i].size()) + " features, expected " +
                                              std::to_string(d));
    }
  }

  NormalizerParams p{kind, Vector::Zero(d), Vector::Ones(d)};
  const auto m = static_cast<double>(train.size());
  switch (kind) {
    case NormalizerKind::None:
      break;
    case NormalizerKind::ZScore: {
      for (const auto& x : train) p.location += x;
      p.location /= m;
      Vector var = Vector::Zero(d);
      for (const auto& x : train) var += (x - p.location).cwiseAbs2();
      p.scale = (var / m).cwiseSqrt();
      break;
    }
    case NormalizerKind::MinMax: {
      Vector lo = train.front();
      Vector hi = train.front();
      for (const auto& x : train) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
      }
      p.location = lo;
      p.scale = hi - lo;
      break;
    }
  }
  // Constant features map to zero.
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(p.scale[j] > 0.0)) p.scale[j] = 1.0;
  }
  return p;
}

namespace {
void check_params_dim(const FeatureVector& x, const NormalizerParams& params) {
  if (static_cast<std::size_t>(x.size()) != params.dim()) {
    throw Error(ErrorKind::DimMismatch, "feature vector has " + std::to_string(x.size()) +
                                            " entries, normalizer expects " + std::to_string(params.dim()));
  }
}
}  // namespace

FeatureVector apply_normalizer(const FeatureVector& x, const NormalizerParams& params) {
  check_params_dim(x, params);
  return (x - params.location).cwiseQuotient(params.scale);
}

FeatureVector invert_normalizer(const FeatureVector& z, const NormalizerParams& params) {
  check_params_dim(z, params);
  return z.cwiseProduct(params.scale) + params.location;
}

FeatureVector rescale(const FeatureVector& x, double alpha) {
  EncodingConfig{EncodingKind::Amplitude, alpha, NormalizerKind::None}.validate();
  return alpha * x;
}

PureState encode_amplitude(const FeatureVector& x) {
  Vector psi(x.size() + 1);
  psi.head(x.size()) = x;
  psi[x.size()] = 1.0;
  psi /= psi.stableNorm();
  return PureState(std::move(psi));
}

PureState encode_stereographic(const FeatureVector& x) {
  const Eigen::Index d = x.size();
  Vector psi(d + 1);
  const double r = x.stableNorm();
  if (r <= 1.0) {
    const double r2 = r * r;
    psi.head(d) = (2.0 / (r2 + 1.0)) * x;
    psi[d] = (r2 - 1.0) / (r2 + 1.0);
  } else {
    // Same map rewritten in 1/r so |x|^2 cannot overflow.
    const double inv = 1.0 / r;
    psi.head(d) = (2.0 * inv / (r + inv)) * x;
    psi[d] = (1.0 - inv * inv) / (1.0 + inv * inv);
  }
  // Closed form is unit norm; renormalising absorbs the last-ulp drift.
  psi /= psi.norm();
  return PureState(std::move(psi));
}

PureState encode(const FeatureVector& x, EncodingKind kind) {
  if (!x.allFinite()) throw Error(ErrorKind::InvalidArgument, "feature vector has non-finite entries");
  return kind == EncodingKind::Amplitude ? encode_amplitude(x) : encode_stereographic(x);
}

PureState Preprocessor::operator()(const FeatureVector& x) const {
  return encode(rescale(apply_normalizer(x, normalizer), config.rescale_alpha), config.kind);
}

Preprocessor fit_preprocessor(std::span<const FeatureVector> train, const EncodingConfig& cfg) {
  cfg.validate();
  return {cfg, fit_normalizer(train, cfg.normalizer)};
}

std::vector<PureState> encode_dataset(std::span<const FeatureVector> rows, const EncodingConfig& cfg,
                                      const NormalizerParams& params) {
  cfg.validate();
  const Preprocessor pre{cfg, params};
  std::vector<PureState> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.push_back(pre(rows[i]));
    } catch (const Error& e) {
      throw Error(e.kind(), "row " + std::to_string(i) + ": " + e.detail());
    }
  }
  return out;
}

}  // namespace qpgm
