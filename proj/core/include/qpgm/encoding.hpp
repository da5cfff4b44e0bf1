#pragma once

// Classical feature vector -> pure state. The pipeline is always
// normalize -> rescale(alpha) -> encode.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpgm/operator.hpp"

namespace qpgm {

using FeatureVector = Vector;

enum class EncodingKind { Stereographic, Amplitude };
enum class NormalizerKind { None, ZScore, MinMax };

std::string_view to_string(EncodingKind kind) noexcept;
std::string_view to_string(NormalizerKind kind) noexcept;
/// Accepts "stereo"/"stereographic" and "amplit"/"amplitude".
EncodingKind parse_encoding(std::string_view text);
NormalizerKind parse_normalizer(std::string_view text);

struct EncodingConfig {
  EncodingKind kind = EncodingKind::Amplitude;
  double rescale_alpha = 1.0;
  NormalizerKind normalizer = NormalizerKind::ZScore;

  /// Throws InvalidAlpha unless rescale_alpha > 0 and finite.
  void validate() const;
};

/// Unit vector in R^{d+1}.
class PureState {
public:
  /// Throws InvalidArgument if |amplitudes| differs from 1 by more than 1e-10.
  explicit PureState(Vector amplitudes);

  const Vector& amplitudes() const noexcept { return amps_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
  double overlap(const PureState& other) const { return amps_.dot(other.amps_); }

private:
  Vector amps_;
};

/// Per-feature affine map (x - location) / scale, fitted on training rows.
struct NormalizerParams {
  NormalizerKind kind = NormalizerKind::None;
  Vector location;
  Vector scale;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(location.size()); }
};

NormalizerParams fit_normalizer(std::span<const FeatureVector> train, NormalizerKind kind);
FeatureVector apply_normalizer(const FeatureVector& x, const NormalizerParams& params);
FeatureVector invert_normalizer(const FeatureVector& z, const NormalizerParams& params);

FeatureVector rescale(const FeatureVector& x, double alpha);

/// (x, 1) / |(x, 1)|
PureState encode_amplitude(const FeatureVector& x);
/// Inverse stereographic projection: (2x, |x|^2 - 1) / (|x|^2 + 1).
PureState encode_stereographic(const FeatureVector& x);

PureState encode(const FeatureVector& x, EncodingKind kind);

/// Fitted preprocessing carried by a trained model.
struct Preprocessor {
  EncodingConfig config;
  NormalizerParams normalizer;

  std::size_t feature_dim() const noexcept { return normalizer.dim(); }
  PureState operator()(const FeatureVector& x) const;
};

/// Fits the normalizer named by cfg on the given rows.
Preprocessor fit_preprocessor(std::span<const FeatureVector> train, const EncodingConfig& cfg);

std::vector<PureState> encode_dataset(std::span<const FeatureVector> rows, const EncodingConfig& cfg,
                                      const NormalizerParams& params);

}  // namespace qpgm
