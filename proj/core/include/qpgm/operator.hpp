#pragma once

// Real symmetric operator algebra used to build measurements: spectral
// decomposition, PSD square roots, pseudoinverse square roots with
// image/kernel projectors, Kronecker powers and trace inner products.

#include <cstddef>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>

namespace qpgm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Relative eigenvalue cutoff for pseudoinverses (fraction of the largest
// eigenvalue below which a direction counts as kernel).
inline constexpr double kDefaultRankTol = 1e-10;
// Largest operator dimension the dense engine will materialise.
inline constexpr std::size_t kDenseDimLimit = 4096;
// Eigenvalues above -kPsdClipTol are clipped to zero; below it the input is
// rejected as indefinite.
inline constexpr double kPsdClipTol = 1e-8;

// Tag for constructing a validated type from a value that holds its invariant
// by construction, skipping the O(dim^3) check.
struct Trusted {
  explicit Trusted() = default;
};
inline constexpr Trusted trusted{};

/// Dense real symmetric matrix. Construction symmetrises the input as
/// (A + A^T) / 2, so entries(i, j) == entries(j, i) bit for bit.
class SymmetricOperator {
public:
  explicit SymmetricOperator(const Matrix& entries);

  static SymmetricOperator zero(std::size_t dim);
  static SymmetricOperator identity(std::size_t dim);
  /// v v^T
  static SymmetricOperator outer(const Vector& v);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  SymmetricOperator operator+(const SymmetricOperator& other) const;
  SymmetricOperator operator-(const SymmetricOperator& other) const;
  SymmetricOperator operator*(double s) const;

private:
  Matrix m_;
};

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal columns, eigenvectors.col(k) <-> eigenvalues[k]
};

/// Unit-trace PSD operator.
class DensityOperator {
public:
  /// Validates trace within 1e-8 of one and min eigenvalue >= -1e-10.
  explicit DensityOperator(SymmetricOperator op);
  DensityOperator(SymmetricOperator op, Trusted) : op_(std::move(op)) {}

  const SymmetricOperator& op() const noexcept { return op_; }
  std::size_t dim() const noexcept { return op_.dim(); }

private:
  SymmetricOperator op_;
};

/// Orthogonal projector (P^2 = P within 1e-8).
class Projector {
public:
  explicit Projector(SymmetricOperator op);
  Projector(SymmetricOperator op, Trusted) : op_(std::move(op)) {}

  const SymmetricOperator& op() const noexcept { return op_; }
  std::size_t dim() const noexcept { return op_.dim(); }
  /// Dimension of the range.
  std::size_t rank() const;

private:
  SymmetricOperator op_;
};

SpectralDecomposition eig_sym(const SymmetricOperator& a);

/// Positive square root. Eigenvalues in [-1e-8, 0) are clipped to zero.
SymmetricOperator psd_sqrt(const SymmetricOperator& a);

struct PseudoInverseSqrt {
  SymmetricOperator inv_sqrt;
  Projector image;
  Projector kernel;
};

/// Moore-Penrose pseudoinverse square root. Eigenvalues at or below
/// rank_tol * lambda_max are treated as exactly zero; a zero operator gives
/// image = 0 and kernel = I.
PseudoInverseSqrt pinv_sqrt(const SymmetricOperator& a, double rank_tol = kDefaultRankTol);

/// Spectral part of pinv_sqrt shared with the Gram engine: returns the
/// decomposition after clipping and the number of retained (non-kernel)
/// eigen-directions, which are the trailing columns.
struct RankRevealedSpectrum {
  SpectralDecomposition spectrum;
  std::size_t rank = 0;
};
RankRevealedSpectrum rank_revealed_spectrum(const SymmetricOperator& a, double rank_tol);

/// q^n with overflow detection; returns false when the product exceeds limit.
bool checked_power(std::size_t q, std::size_t n, std::size_t limit, std::size_t& out) noexcept;

/// n-fold Kronecker power of a unit vector. Throws DenseBlowup when q^n
/// exceeds dense_limit.
Vector tensor_power(const Vector& v, std::size_t n, std::size_t dense_limit = kDenseDimLimit);

/// Sum_ij A_ij B_ij, which is tr(AB) for symmetric operands.
double trace_product(const SymmetricOperator& a, const SymmetricOperator& b);

}  // namespace qpgm
