#include "annealbench/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "annealbench/errors.hpp"

namespace annealbench {

HermitianMatrix::HermitianMatrix(ComplexMatrix entries, double tol) {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    throw UsageError("HermitianMatrix: entries must be square with dim >= 1, got " +
                     std::to_string(entries.rows()) + "x" +
                     std::to_string(entries.cols()));
  }
  const double defect = (entries - entries.adjoint().eval()).cwiseAbs().maxCoeff();
  if (!(defect <= tol)) {
    throw UsageError("HermitianMatrix: Hermiticity defect " + std::to_string(defect) +
                     " exceeds tolerance " + std::to_string(tol));
  }
  // Symmetrize so that (i,j)/(j,i) pairs are exact conjugates from here on.
  entries_ = 0.5 * (entries + entries.adjoint().eval());
}

bool HermitianMatrix::is_real() const {
  return entries_.imag().cwiseAbs().maxCoeff() == 0.0;
}

ComplexVector matvec(const HermitianMatrix& m, const ComplexVector& v) {
  if (m.dim() != v.size()) {
    throw UsageError("matvec: dimension mismatch (" + std::to_string(m.dim()) +
                     " vs " + std::to_string(v.size()) + ")");
  }
  return m.entries() * v;
}

Complex inner(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) {
    throw UsageError("inner: dimension mismatch (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
  return a.dot(b);  // Eigen's dot conjugates the first argument
}

namespace {

// Largest-magnitude component made real non-negative; ties broken by the
// lowest index so output is deterministic.
void fix_phases(ComplexMatrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best + 1e-15) {
        best = a;
        imax = i;
      }
    }
    const Complex pivot = vectors(imax, j);
    const double mag = std::abs(pivot);
    if (mag > 0.0) {
      vectors.col(j) *= std::conj(pivot) / mag;
      vectors(imax, j) = Complex(std::abs(vectors(imax, j).real()), 0.0);
    }
  }
}

}  // namespace

EigenDecomposition eigh(const HermitianMatrix& m) {
  EigenDecomposition out;
  if (m.is_real()) {
    // All bundled models are real symmetric; the real solver is both faster
    // and yields exactly real eigenvectors.
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(m.real_part());
    if (solver.info() != Eigen::Success) {
      throw NumericError("eigh: real symmetric eigensolver failed to converge");
    }
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.entries());
    if (solver.info() != Eigen::Success) {
      throw NumericError("eigh: Hermitian eigensolver failed to converge");
    }
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
  }
  fix_phases(out.eigenvectors);
  return out;
}

std::vector<LevelGroup> group_levels(const RealVector& eigenvalues, double tol) {
  std::vector<LevelGroup> levels;
  const int n = static_cast<int>(eigenvalues.size());
  for (int i = 0; i < n;) {
    int j = i + 1;
    while (j < n && eigenvalues[j] - eigenvalues[j - 1] < tol) ++j;
    levels.push_back({eigenvalues[i], i, j - i});
    i = j;
  }
  return levels;
}

double level_tolerance(const RealVector& eigenvalues) {
  const double scale = eigenvalues.size() > 0 ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return 1e-8 * std::max(1.0, scale);
}

}  // namespace annealbench
