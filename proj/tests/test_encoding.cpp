#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "qpgm/encoding.hpp"
#include "qpgm/error.hpp"

using namespace qpgm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FeatureVector fv(std::initializer_list<double> xs) {
  FeatureVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

void expect_vec(const Vector& got, const Vector& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  EXPECT_LE((got - want).cwiseAbs().maxCoeff(), tol) << got.transpose() << " vs " << want.transpose();
}

}  // namespace

TEST(Normalizer, ZScorePopulationStd) {
  const std::vector<FeatureVector> rows{fv({0}), fv({2})};
  const auto p = fit_normalizer(rows, NormalizerKind::ZScore);
  EXPECT_DOUBLE_EQ(p.location[0], 1.0);
  EXPECT_DOUBLE_EQ(p.scale[0], 1.0);
  expect_vec(apply_normalizer(fv({3}), p), fv({2}), 0);
  expect_vec(apply_normalizer(p.location, p), fv({0}), 0);
}

TEST(Normalizer, MinMax) {
  const std::vector<FeatureVector> rows{fv({1}), fv({3})};
  const auto p = fit_normalizer(rows, NormalizerKind::MinMax);
  EXPECT_DOUBLE_EQ(p.location[0], 1.0);
  EXPECT_DOUBLE_EQ(p.scale[0], 2.0);
}

TEST(Normalizer, ConstantFeatureGetsUnitScale) {
  const std::vector<FeatureVector> rows{fv({5}), fv({5})};
  for (auto kind : {NormalizerKind::ZScore, NormalizerKind::MinMax}) {
    const auto p = fit_normalizer(rows, kind);
    EXPECT_DOUBLE_EQ(p.scale[0], 1.0);
    EXPECT_DOUBLE_EQ(apply_normalizer(fv({5}), p)[0], 0.0);
  }
}

TEST(Normalizer, RoundTrip) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(3.0, 7.0);
  std::vector<FeatureVector> rows;
  for (int i = 0; i < 20; ++i) rows.push_back(fv({g(rng), g(rng), g(rng)}));
  for (auto kind : {NormalizerKind::None, NormalizerKind::ZScore, NormalizerKind::MinMax}) {
    const auto p = fit_normalizer(rows, kind);
    for (const auto& x : rows) {
      const auto back = invert_normalizer(apply_normalizer(x, p), p);
      EXPECT_LE((back - x).cwiseAbs().maxCoeff(), 1e-12 * (1 + x.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(Rescale, Examples) {
  expect_vec(rescale(fv({2, -4}), 0.5), fv({1, -2}), 0);
  expect_vec(rescale(fv({2, -4}), 1.0), fv({2, -4}), 0);
}

TEST(Rescale, GridAlphasAcceptedOthersRejected) {
  for (double a : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    EncodingConfig cfg;
    cfg.rescale_alpha = a;
    EXPECT_NO_THROW(cfg.validate());
  }
  for (double a : {0.0, -1.0, std::nan(""), kInf}) {
    EncodingConfig cfg;
    cfg.rescale_alpha = a;
    try {
      cfg.validate();
      FAIL() << a;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidAlpha);
    }
  }
}

TEST(Amplitude, Examples) {
  expect_vec(encode_amplitude(fv({3, 4})).amplitudes(), fv({3, 4, 1}) / std::sqrt(26.0), 1e-15);
  expect_vec(encode_amplitude(fv({0})).amplitudes(), fv({0, 1}), 0);
}

TEST(Amplitude, CollinearInputsStayDistinct) {
  const auto a = encode_amplitude(fv({1, 2}));
  const auto b = encode_amplitude(fv({2, 4}));
  EXPECT_LT(a.overlap(b), 1.0 - 1e-6);
}

TEST(Stereographic, Examples) {
  expect_vec(encode_stereographic(fv({1})).amplitudes(), fv({1, 0}), 1e-15);
  expect_vec(encode_stereographic(fv({0, 0})).amplitudes(), fv({0, 0, -1}), 0);
  const auto s = encode_stereographic(fv({3, 4}));
  expect_vec(s.amplitudes(), fv({6, 8, 24}) / 26.0, 1e-15);
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-15);
}

TEST(Stereographic, HugeInputsStayUnit) {
  const auto s = encode_stereographic(fv({1e200, -1e200}));
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-12);
  EXPECT_NEAR(s.amplitudes()[2], 1.0, 1e-12);
}

TEST(Encode, RejectsNonFinite) {
  EXPECT_THROW(encode(fv({std::nan("")}), EncodingKind::Amplitude), Error);
  EXPECT_THROW(encode(fv({kInf}), EncodingKind::Stereographic), Error);
}

TEST(EncodeDataset, EmptyAndComposition) {
  EncodingConfig cfg;
  cfg.kind = EncodingKind::Amplitude;
  cfg.rescale_alpha = 0.5;
  cfg.normalizer = NormalizerKind::None;
  const NormalizerParams none = fit_normalizer(std::vector<FeatureVector>{fv({0, 0})}, NormalizerKind::None);
  EXPECT_TRUE(encode_dataset({}, cfg, none).empty());
  const std::vector<FeatureVector> rows{fv({2, 4})};
  const auto states = encode_dataset(rows, cfg, none);
  ASSERT_EQ(states.size(), 1u);
  expect_vec(states[0].amplitudes(), fv({1, 2, 1}) / std::sqrt(6.0), 1e-15);
}

TEST(EncodeDataset, PipelineOrderNormalizeThenRescale) {
  const std::vector<FeatureVector> rows{fv({0}), fv({2})};
  EncodingConfig cfg;
  cfg.kind = EncodingKind::Stereographic;
  cfg.rescale_alpha = 2.0;
  cfg.normalizer = NormalizerKind::ZScore;
  const auto pre = fit_preprocessor(rows, cfg);
  // (3 - 1) / 1 * 2 = 4 -> (8, 15) / 17
  expect_vec(pre(fv({3})).amplitudes(), fv({8, 15}) / 17.0, 1e-15);
}

TEST(EncodeDataset, DimensionMismatchNamesRow) {
  const std::vector<FeatureVector> rows{fv({0, 1}), fv({2, 3})};
  const auto pre = fit_preprocessor(rows, EncodingConfig{});
  const std::vector<FeatureVector> bad{fv({0, 1}), fv({1})};
  try {
    encode_dataset(bad, pre.config, pre.normalizer);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimMismatch);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
}

TEST(PureState, RejectsNonUnit) { EXPECT_THROW(PureState(fv({1, 1})), Error); }

TEST(Parse, Names) {
  EXPECT_EQ(parse_encoding("stereo"), EncodingKind::Stereographic);
  EXPECT_EQ(parse_encoding("amplit"), EncodingKind::Amplitude);
  EXPECT_EQ(parse_encoding("amplitude"), EncodingKind::Amplitude);
  EXPECT_THROW(parse_encoding("angle"), Error);
  EXPECT_EQ(parse_normalizer("minmax"), NormalizerKind::MinMax);
}
