#pragma once

#include <Eigen/Dense>
#include <complex>

namespace annealbench {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Dense Hermitian matrix. Hermiticity is checked on construction
/// (max |a_ij - conj(a_ji)| <= tol) and the stored entries are
/// symmetrized so downstream code sees an exactly Hermitian matrix.
class HermitianMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;

  explicit HermitianMatrix(ComplexMatrix entries, double tol = kHermitianTol);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const { return entries_; }

  /// True when every entry has exactly zero imaginary part.
  bool is_real() const;
  /// Real part view; meaningful when is_real().
  RealMatrix real_part() const { return entries_.real(); }

 private:
  ComplexMatrix entries_;
};

/// Eigenvalues ascending; eigenvector j (column j) pairs with eigenvalue j.
/// Each eigenvector is phase-fixed so its largest-magnitude component is
/// real and non-negative.
struct EigenDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

/// m * v. Throws UsageError on dimension mismatch.
ComplexVector matvec(const HermitianMatrix& m, const ComplexVector& v);

/// Hermitian inner product, conjugate-linear in the first argument.
Complex inner(const ComplexVector& a, const ComplexVector& b);

/// Full eigen-decomposition of a Hermitian matrix. Deterministic for
/// identical input bits. Throws NumericError if the solver fails.
EigenDecomposition eigh(const HermitianMatrix& m);

/// Groups eigenvalues into (near-)degenerate levels. Returns, per level,
/// the index of its first eigenstate and the state count; levels are in
/// ascending energy order. Two consecutive eigenvalues belong to the same
/// level when they differ by less than `tol`.
struct LevelGroup {
  double energy;  // representative (first) eigenvalue of the level
  int first;      // index of the first eigenstate in the level
  int count;
};
std::vector<LevelGroup> group_levels(const RealVector& eigenvalues,
                                     double tol);

/// Default grouping tolerance used across the library: absolute, scaled
/// by the spectral magnitude.
double level_tolerance(const RealVector& eigenvalues);

}  // namespace annealbench
