#pragma once

#include <complex>
#include <map>
#include <vector>

#include "annealbench/linalg.hpp"
#include "annealbench/model.hpp"
#include "annealbench/schedule.hpp"

namespace annealbench {

/// Instantaneous spectrum of the interpolated Hamiltonian at one s,
/// with the adiabatic coefficients A_j^(m) = |<j| d^m H/ds^m |0>| / gap^(m+1)
/// for each requested order m.
///
/// Per-state entries within a degenerate excited level depend on the
/// solver's arbitrary basis choice; the per-level aggregates
/// sqrt(sum_j |<j|d^m H|0>|^2) / gap^(m+1) are basis-independent.
struct SpectrumSample {
  double s = 0.0;
  RealVector eigenvalues;
  RealVector gaps;  // gaps[j-1] = eps_j - eps_0 for j >= 1
  std::map<int, RealVector> matrix_element_abs;  // order -> size dim-1, indexed j-1
  std::map<int, RealVector> a_coeffs;            // order -> A_j^(m), indexed j-1

  struct Level {
    double energy = 0.0;
    int first = 0;  // eigenstate index of the first member (>= 1)
    int count = 0;
    std::map<int, double> aggregate_a;  // order -> basis-independent A
  };
  std::vector<Level> excited_levels;
};

/// d^m H(s)/ds^m = f^(m)(s) (h_pot - h_kin), exact for analytic schedules.
HermitianMatrix hamiltonian_s_derivative(const AnnealingModel& model,
                                         const Schedule& sched, double s, int order);

/// Throws DomainError when the ground state is degenerate at s
/// (first gap <= 1e-12).
SpectrumSample sample_spectrum(const AnnealingModel& model, const Schedule& sched,
                               double s, const std::vector<int>& orders);

/// max over a uniform s grid and over all levels j of A_j(s); the
/// characteristic time scale below which the evolution cannot be adiabatic.
double adiabatic_condition(const AnnealingModel& model, const Schedule& sched,
                           int grid_points = 2001);

/// Asymptotic excitation bound for a schedule flat through order m-1:
/// |<j|psi(1)>|^2 <~ coefficient / tau^(2m),
/// coefficient = (A_j^(m)(0) + A_j^(m)(1))^2.
struct BoundReport {
  int order = 0;
  int level = 1;  // target eigenstate index j
  double a_start = 0.0;
  double a_end = 0.0;
  double coefficient = 0.0;

  double bound(double tau) const;
};

/// Requires check_flatness(sched, m); throws UsageError otherwise.
BoundReport bound_report(const AnnealingModel& model, const Schedule& sched, int m,
                         int level_j = 1);

/// First-order excitation amplitude
///   integral_0^1 ds exp(i tau * int_0^s gap_j) / gap_j * <j(s)|dH/ds|0(s)>
/// on a uniform grid with eigenvector continuity enforced along s.
/// Throws DomainError if level j crosses a neighbor along the path.
Complex perturbative_amplitude(const AnnealingModel& model, const Schedule& sched,
                               double tau, int level_j, int quad_points);

/// Crossing-region excitation probability exp(-pi alpha^2 tau / (f'(s*) h)),
/// s* the unique solution of f(s*) = 1/2 (found by bisection to 1e-12).
double lz_nonadiabatic_probability(double h, double alpha, const Schedule& sched,
                                   double tau);

}  // namespace annealbench
