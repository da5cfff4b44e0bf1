#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "qpgm/error.hpp"
#include "qpgm/pgm.hpp"
#include "support.hpp"

using namespace qpgm;

namespace {

PureState ps(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return PureState(v / v.norm());
}

LabeledStateSet set_of(std::vector<PureState> states, std::vector<ClassId> labels, std::size_t l) {
  return LabeledStateSet(std::move(states), std::move(labels), l);
}

// Independent reference: straight from the definitions with Eigen's solver.
std::vector<Matrix> reference_povm(const LabeledStateSet& train, const Vector& priors, std::size_t n) {
  const std::size_t l = train.num_classes();
  std::vector<Matrix> rho(l);
  for (std::size_t j = 0; j < train.size(); ++j) {
    Vector phi = train.states()[j].amplitudes();
    for (std::size_t k = 1; k < n; ++k) {
      Vector next(phi.size() * train.state_dim());
      const Vector& a = train.states()[j].amplitudes();
      for (Eigen::Index p = 0; p < phi.size(); ++p) next.segment(p * a.size(), a.size()) = phi[p] * a;
      phi = next;
    }
    const auto c = train.labels()[j];
    if (rho[c].size() == 0) rho[c] = Matrix::Zero(phi.size(), phi.size());
    rho[c] += phi * phi.transpose() / static_cast<double>(train.class_counts()[c]);
  }
  const auto dim = rho[0].rows();
  Matrix sigma = Matrix::Zero(dim, dim);
  for (std::size_t c = 0; c < l; ++c) sigma += priors[static_cast<Eigen::Index>(c)] * rho[c];
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  const double cut = 1e-10 * es.eigenvalues().maxCoeff();
  Vector inv = Vector::Zero(dim);
  Matrix ker = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (es.eigenvalues()[k] > cut) {
      inv[k] = 1.0 / std::sqrt(es.eigenvalues()[k]);
    } else {
      ker += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose();
    }
  }
  const Matrix s = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  std::vector<Matrix> out;
  for (std::size_t c = 0; c < l; ++c) {
    out.push_back(s * (priors[static_cast<Eigen::Index>(c)] * rho[c]) * s + ker / static_cast<double>(l));
  }
  return out;
}

}  // namespace

TEST(LabeledStateSet, Validates) {
  EXPECT_THROW(set_of({ps({1, 0})}, {0}, 2), Error);  // class 1 empty
  EXPECT_THROW(set_of({ps({1, 0})}, {3}, 1), Error);
  EXPECT_THROW(set_of({ps({1, 0}), ps({1, 0, 0})}, {0, 0}, 1), Error);
}

TEST(Priors, Modes) {
  const auto u = Priors::uniform(4);
  EXPECT_DOUBLE_EQ(u.values.sum(), 1.0);
  const std::vector<std::size_t> counts{1, 3};
  const auto e = Priors::empirical(counts);
  EXPECT_DOUBLE_EQ(e.values[1], 0.75);
  Vector bad(2);
  bad << 0.5, 0.6;
  EXPECT_THROW(Priors::explicit_values(bad), Error);
  bad << 0.0, 1.0;
  EXPECT_THROW(Priors::explicit_values(bad), Error);
}

TEST(Centroid, SingleStateIsPure) {
  const auto s = ps({0.6, 0.8});
  const std::vector<PureState> one{s};
  const auto rho = quantum_centroid(one);
  EXPECT_LE((rho.op().matrix() - s.amplitudes() * s.amplitudes().transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Centroid, BasisPairIsMixed) {
  const std::vector<PureState> states{ps({1, 0, 0}), ps({0, 1, 0})};
  const auto rho = quantum_centroid(states);
  Matrix want = Matrix::Zero(3, 3);
  want(0, 0) = want(1, 1) = 0.5;
  EXPECT_LE((rho.op().matrix() - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Centroid, RandomIsDensity) {
  std::mt19937_64 rng(2);
  std::vector<PureState> states;
  for (int i = 0; i < 5; ++i) states.emplace_back(test::random_unit(rng, 4));
  const auto rho = quantum_centroid(states);
  EXPECT_NEAR(rho.op().trace(), 1.0, 1e-12);
  EXPECT_GE(eig_sym(rho.op()).eigenvalues.minCoeff(), -1e-12);
}

TEST(CopiesCentroid, OneCopyIsCentroid) {
  std::mt19937_64 rng(4);
  std::vector<PureState> states;
  for (int i = 0; i < 4; ++i) states.emplace_back(test::random_unit(rng, 3));
  EXPECT_LE((copies_centroid(states, 1).op().matrix() - quantum_centroid(states).op().matrix())
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
}

TEST(CopiesCentroid, TwoCopiesDifferFromPowerOfCentroid) {
  const std::vector<PureState> states{ps({1, 0}), ps({0, 1})};
  const Matrix got = copies_centroid(states, 2).op().matrix();
  Matrix want = Matrix::Zero(4, 4);
  want(0, 0) = want(3, 3) = 0.5;
  EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-15);
  const Matrix quarter = Matrix::Identity(4, 4) / 4.0;
  EXPECT_GT((got - quarter).cwiseAbs().maxCoeff(), 0.2);
}

TEST(CopiesCentroid, SingleStateStaysPure) {
  const auto s = ps({0.6, 0.8});
  const std::vector<PureState> one{s};
  const Vector t = tensor_power(s.amplitudes(), 3);
  EXPECT_LE((copies_centroid(one, 3).op().matrix() - t * t.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Mixture, Examples) {
  const auto train = set_of({ps({1, 0}), ps({0, 1})}, {0, 1}, 2);
  const auto ens = build_ensemble(train, Priors::uniform(2), 1);
  EXPECT_LE((mixture(ens).op().matrix() - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
  const auto single = set_of({ps({0.6, 0.8})}, {0}, 1);
  const auto e1 = build_ensemble(single, Priors::uniform(1), 1);
  EXPECT_LE((mixture(e1).op().matrix() - e1.reps[0].op().matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Mixture, RandomTraceOne) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    const auto train = test::random_ensemble(rng, 3, 4, 12);
    const auto ens = build_ensemble(train, resolve_priors(PriorMode::Empirical, train), 2);
    EXPECT_NEAR(mixture(ens).op().trace(), 1.0, 1e-10);
  }
}

TEST(DensePgm, SingleClassIsIdentity) {
  const auto train = set_of({ps({1, 0, 0}), ps({0, 1, 0})}, {0, 0}, 1);
  const auto model = build_dense_pgm(train, Priors::uniform(1), 1);
  EXPECT_LE((model.povm()[0].matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(model.score(ps({0.3, 0.4, 0.5}))[0], 1.0, 1e-12);
  EXPECT_EQ(classify(model.score(ps({1, 1, 1}))), 0u);
}

TEST(DensePgm, OrthogonalClasses) {
  const auto train = set_of({ps({1, 0, 0}), ps({0, 1, 0})}, {0, 1}, 2);
  const auto model = build_dense_pgm(train, Priors::uniform(2), 1);
  Matrix f0 = Matrix::Zero(3, 3);
  f0(0, 0) = 1.0;
  f0(2, 2) = 0.5;
  EXPECT_LE((model.povm()[0].matrix() - f0).cwiseAbs().maxCoeff(), 1e-12);
  const auto s = model.score(ps({1, 0, 0}));
  EXPECT_NEAR(s[0], 1.0, 1e-12);
  EXPECT_NEAR(s[1], 0.0, 1e-12);
  EXPECT_EQ(classify(model.score(ps({0, 1, 0}))), 1u);
}

TEST(DensePgm, MatchesReferenceConstruction) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const std::size_t l = 2 + t % 3, d = 2 + t % 3, n = 1 + t % 2;
    const auto train = test::random_ensemble(rng, l, d, 3 + l + t % 5);
    const auto priors = resolve_priors(t % 2 ? PriorMode::Empirical : PriorMode::Uniform, train);
    const auto model = build_dense_pgm(train, priors, n);
    const auto ref = reference_povm(train, priors.values, n);
    for (std::size_t c = 0; c < l; ++c) {
      EXPECT_LE((model.povm()[c].matrix() - ref[c]).cwiseAbs().maxCoeff(), 1e-9) << "trial " << t;
    }
  }
}

TEST(DensePgm, CompletenessAndPositivity) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const auto train = test::random_ensemble(rng, 3, 2, 9);
    const auto model = build_dense_pgm(train, Priors::uniform(3), 1);
    Matrix sum = Matrix::Zero(2, 2);
    for (const auto& f : model.povm()) {
      sum += f.matrix();
      EXPECT_GE(eig_sym(f).eigenvalues.minCoeff(), -1e-8);
    }
    EXPECT_LE((sum - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(DensePgm, HelstromForTwoPureStates) {
  const auto zero = ps({1, 0});
  const auto plus = ps({1, 1});
  const auto train = set_of({zero, plus}, {0, 1}, 2);
  const auto model = build_dense_pgm(train, Priors::uniform(2), 1);
  const double success = 0.5 * model.score(zero)[0] + 0.5 * model.score(plus)[1];
  const double gamma = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(success, 0.5 * (1.0 + std::sqrt(1.0 - gamma * gamma)), 1e-10);
  EXPECT_NEAR(success, 0.8535533906, 1e-10);
}

TEST(GramPgm, SingleTrainingState) {
  const auto psi = ps({0.6, 0.8});
  const auto train = set_of({psi}, {0}, 1);
  for (std::size_t n : {1u, 3u}) {
    const auto gram = build_gram_pgm(train, Priors::uniform(1), n);
    EXPECT_NEAR(gram.parts().inv_sqrt(0, 0), 1.0, 1e-14);
    const auto x = ps({0.28, 0.96});
    const auto s = gram.score(x);
    // Image part c^{2n}, kernel completion 1 - c^{2n}.
    EXPECT_NEAR(s[0], 1.0, 1e-12);
    const auto dense = build_dense_pgm(train, Priors::uniform(1), n);
    EXPECT_NEAR(s[0], dense.score(x)[0], 1e-12);
  }
}

TEST(GramPgm, OrthonormalStatesGiveWeightedOverlaps) {
  const auto train = set_of({ps({1, 0, 0}), ps({0, 1, 0}), ps({0, 0, 1})}, {0, 1, 1}, 2);
  const auto priors = Priors::uniform(2);
  const auto gram = build_gram_pgm(train, priors, 1);
  const Matrix g = gram_matrix(gram.parts().states, gram.parts().weights, 1);
  EXPECT_LE((g - Matrix(gram.parts().weights.asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
  const auto x = ps({0.5, 0.5, std::sqrt(0.5)});
  const auto s = gram.score(x);
  EXPECT_NEAR(s[0], 0.25, 1e-12);
  EXPECT_NEAR(s[1], 0.75, 1e-12);
  const auto dense = build_dense_pgm(train, priors, 1).score(x);
  EXPECT_LE((s - dense).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GramPgm, AgreesWithDenseOnRandomEnsembles) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    const std::size_t l = 2 + t % 4, d = 2 + t % 5, n = 1 + t % 3;
    const auto train = test::random_ensemble(rng, l, d, 5 + (t * 7) % 30);
    const auto priors = resolve_priors(t % 2 ? PriorMode::Empirical : PriorMode::Uniform, train);
    const auto dense = build_dense_pgm(train, priors, n);
    const auto gram = build_gram_pgm(train, priors, n);
    for (int k = 0; k < 5; ++k) {
      const PureState x(test::random_unit(rng, d));
      EXPECT_LE((dense.score(x) - gram.score(x)).cwiseAbs().maxCoeff(), 1e-8) << "trial " << t;
    }
  }
}

TEST(GramPgm, LargeCopiesStayFinite) {
  std::mt19937_64 rng(23);
  const auto train = test::random_ensemble(rng, 3, 6, 40);
  const auto gram = build_gram_pgm(train, Priors::uniform(3), 60);
  for (int k = 0; k < 10; ++k) {
    const auto s = gram.score(PureState(test::random_unit(rng, 6)));
    EXPECT_NEAR(s.sum(), 1.0, 1e-8);
    EXPECT_GE(s.minCoeff(), -1e-10);
  }
}

TEST(PoweredOverlap, SignAndUnderflow) {
  EXPECT_DOUBLE_EQ(powered_overlap(-0.5, 3), -0.125);
  EXPECT_DOUBLE_EQ(powered_overlap(-0.5, 2), 0.25);
  EXPECT_EQ(powered_overlap(1e-301, 1), 0.0);
  EXPECT_EQ(powered_overlap(0.1, 400), 0.0);
}

TEST(Classify, ArgmaxWithLowestIndexOnTies) {
  Vector f(3);
  f << 0.2, 0.5, 0.3;
  EXPECT_EQ(classify(f), 1u);
  Vector tie(2);
  tie << 0.5, 0.5;
  EXPECT_EQ(classify(tie), 0u);
  Vector near_tie(2);
  near_tie << 0.5, 0.5 + 1e-15;
  EXPECT_EQ(classify(near_tie), 0u);
  Vector one(1);
  one << 1.0;
  EXPECT_EQ(classify(one), 0u);
}

TEST(DensePgm, RefusesBlowup) {
  std::mt19937_64 rng(1);
  const auto train = test::random_ensemble(rng, 2, 31, 4);
  try {
    build_dense_pgm(train, Priors::uniform(2), 60);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DenseBlowup);
  }
}
