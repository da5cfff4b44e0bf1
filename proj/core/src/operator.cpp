#include "qpgm/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qpgm/error.hpp"

namespace qpgm {

namespace {

void require_finite(const Matrix& m) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::InvalidOperator, "operator has non-finite entries");
  }
}

void require_same_dim(const SymmetricOperator& a, const SymmetricOperator& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimMismatch,
                "operator dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}

}  // namespace

SymmetricOperator::SymmetricOperator(const Matrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    throw Error(ErrorKind::InvalidOperator,
                "operator must be square with dim >= 1, got " + std::to_string(entries.rows()) +
                    "x" + std::to_string(entries.cols()));
  }
  // a_ij + a_ji is commutative in IEEE arithmetic, so the result is exactly
  // symmetric.
  m_ = 0.5 * (entries + entries.transpose());
}

SymmetricOperator SymmetricOperator::zero(std::size_t dim) {
  return SymmetricOperator(Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

SymmetricOperator SymmetricOperator::identity(std::size_t dim) {
  return SymmetricOperator(
      Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

SymmetricOperator SymmetricOperator::outer(const Vector& v) {
  return SymmetricOperator(v * v.transpose());
}

SymmetricOperator SymmetricOperator::operator+(const SymmetricOperator& other) const {
  require_same_dim(*this, other);
  return SymmetricOperator(m_ + other.m_);
}

SymmetricOperator SymmetricOperator::operator-(const SymmetricOperator& other) const {
  require_same_dim(*this, other);
  return SymmetricOperator(m_ - other.m_);
}

SymmetricOperator SymmetricOperator::operator*(double s) const { return SymmetricOperator(m_ * s); }

DensityOperator::DensityOperator(SymmetricOperator op) : op_(std::move(op)) {
  const double tr = op_.trace();
  if (!(std::abs(tr - 1.0) <= 1e-8)) {
    throw Error(ErrorKind::InvalidOperator, "density operator trace " + std::to_string(tr));
  }
  const auto spec = eig_sym(op_);
  if (spec.eigenvalues[0] < -1e-10) {
    throw Error(ErrorKind::NotPositiveSemidefinite,
                "density operator min eigenvalue " + std::to_string(spec.eigenvalues[0]));
  }
}

Projector::Projector(SymmetricOperator op) : op_(std::move(op)) {
  const Matrix& p = op_.matrix();
  const double defect = (p * p - p).cwiseAbs().maxCoeff();
  if (!(defect <= 1e-8)) {
    throw Error(ErrorKind::InvalidOperator, "not idempotent, |P^2 - P| = " + std::to_string(defect));
  }
}

std::size_t Projector::rank() const {
  return static_cast<std::size_t>(std::llround(op_.trace()));
}

SpectralDecomposition eig_sym(const SymmetricOperator& a) {
  require_finite(a.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidOperator, "eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SymmetricOperator psd_sqrt(const SymmetricOperator& a) {
  auto spec = eig_sym(a);
  if (spec.eigenvalues[0] < -kPsdClipTol) {
    throw Error(ErrorKind::NotPositiveSemidefinite,
                "min eigenvalue " + std::to_string(spec.eigenvalues[0]));
  }
  const Vector root = spec.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return SymmetricOperator(spec.eigenvectors * root.asDiagonal() * spec.eigenvectors.transpose());
}

RankRevealedSpectrum rank_revealed_spectrum(const SymmetricOperator& a, double rank_tol) {
  if (!(rank_tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rank_tol must be positive");
  }
  RankRevealedSpectrum out{eig_sym(a), 0};
  Vector& lambda = out.spectrum.eigenvalues;
  const Eigen::Index n = lambda.size();
  const double lambda_max = lambda[n - 1];
  if (lambda[0] < -kPsdClipTol * std::max(1.0, lambda_max)) {
    throw Error(ErrorKind::NotPositiveSemidefinite, "min eigenvalue " + std::to_string(lambda[0]));
  }
  lambda = lambda.cwiseMax(0.0);
  if (lambda_max <= 0.0) return out;
  const double cut = rank_tol * lambda_max;
  for (Eigen::Index k = n - 1; k >= 0 && lambda[k] > cut; --k) ++out.rank;
  return out;
}

PseudoInverseSqrt pinv_sqrt(const SymmetricOperator& a, double rank_tol) {
  const auto rr = rank_revealed_spectrum(a, rank_tol);
  const auto dim = static_cast<Eigen::Index>(a.dim());
  const auto r = static_cast<Eigen::Index>(rr.rank);
  const Matrix v = rr.spectrum.eigenvectors.rightCols(r);
  const Vector inv_root = rr.spectrum.eigenvalues.tail(r).cwiseSqrt().cwiseInverse();

  SymmetricOperator inv_sqrt(v * inv_root.asDiagonal() * v.transpose());
  SymmetricOperator image(v * v.transpose());
  SymmetricOperator kernel(Matrix::Identity(dim, dim) - image.matrix());
  return {std::move(inv_sqrt), Projector(std::move(image), trusted),
          Projector(std::move(kernel), trusted)};
}

bool checked_power(std::size_t q, std::size_t n, std::size_t limit, std::size_t& out) noexcept {
  std::size_t acc = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (q != 0 && acc > limit / q) return false;
    acc *= q;
    if (acc > limit) return false;
  }
  out = acc;
  return true;
}

Vector tensor_power(const Vector& v, std::size_t n, std::size_t dense_limit) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "copy count must be >= 1");
  if (std::abs(v.norm() - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidArgument, "tensor_power expects a unit vector");
  }
  const auto q = static_cast<std::size_t>(v.size());
  std::size_t total = 0;
  if (!checked_power(q, n, dense_limit, total)) {
    throw Error(ErrorKind::DenseBlowup, std::to_string(q) + "^" + std::to_string(n) +
                                            " exceeds dense limit " + std::to_string(dense_limit));
  }
  Vector acc = v;
  for (std::size_t k = 1; k < n; ++k) {
    Vector next(acc.size() * v.size());
    for (Eigen::Index i = 0; i < acc.size(); ++i) {
      next.segment(i * v.size(), v.size()) = acc[i] * v;
    }
    acc = std::move(next);
  }
  return acc;
}

double trace_product(const SymmetricOperator& a, const SymmetricOperator& b) {
  require_same_dim(a, b);
  return a.matrix().cwiseProduct(b.matrix()).sum();
}

}  // namespace qpgm
