#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "annealbench/linalg.hpp"
#include "annealbench/schedule.hpp"

namespace annealbench {

/// An annealing problem: kinetic and potential operators sharing one
/// Hilbert space, the ground state of the kinetic term as initial state,
/// and the exact final ground energy for residual-energy measurements.
/// The eigen-decomposition of h_pot is cached for final-state analysis.
struct AnnealingModel {
  HermitianMatrix h_kin;
  HermitianMatrix h_pot;
  ComplexVector initial_state;
  int dim = 0;
  std::string label;
  double exact_ground_energy_final = 0.0;
  EigenDecomposition pot_decomposition;
};

struct IsingEdge {
  int i = 0;
  int j = 0;
  double coupling = 0.0;
};

/// Pairwise +/- J Ising problem on an arbitrary small graph with a
/// longitudinal field and a transverse driver.
struct IsingInstance {
  int n_sites = 0;
  std::vector<IsingEdge> edges;
  double field = 0.0;       // h, along z
  double transverse = 1.0;  // Gamma, along x
};

/// Deterministic coupling stream, uniform on [-1, 1].
///
/// Generator: splitmix64 seeded with `seed`; each output z is mapped to
/// (z >> 11) * 2^-53 in [0,1) and then to 2u - 1. The algorithm is spelled
/// out in docs/formats.md so fixtures reproduce across platforms.
std::vector<double> generate_couplings(int n_edges, std::uint64_t seed);

/// Open-boundary 3x3 square lattice, 12 edges in row-major (right, down)
/// order, couplings drawn from generate_couplings(12, seed).
IsingInstance ising_grid_3x3(std::uint64_t seed, double field, double transverse);

/// Instance file: `n_sites` line, then `i j J` edge lines, then
/// `h <v>` and `gamma <v>` lines. '#' comments and blank lines allowed.
IsingInstance load_ising_instance(const std::string& path);
void save_ising_instance(const IsingInstance& inst, const std::string& path);

/// Two-level avoided crossing; the interpolation endpoints are
/// h_kin = -(h/2) sigma_z - alpha sigma_x, h_pot = +(h/2) sigma_z - alpha sigma_x.
AnnealingModel build_lz(double h, double alpha);

/// Transverse-field Ising model on up to 14 sites via dense Kronecker
/// embedding; h_pot is diagonal in the z basis.
AnnealingModel build_ising(const IsingInstance& inst);

/// Database-search model on N items, marked state at basis index 0:
/// h_pot = 1 - |0><0|, h_kin = 1 - |e><e| with |e> uniform. 2 <= N <= 1024.
AnnealingModel build_grover(int n_items);

/// The same dynamics restricted to the invariant 2-dimensional subspace
/// spanned by the marked state and the uniform unmarked superposition.
AnnealingModel build_grover_reduced(int n_items);

/// (1 - f(s)) h_kin + f(s) h_pot.
HermitianMatrix interpolate(const AnnealingModel& model, const Schedule& sched, double s);

/// Parses a model token:
///   lz:h=<v>,alpha=<v>
///   ising:file=<path>
///   ising:grid=3x3,seed=<n>,h=<v>,gamma=<v>
///   grover:N=<n>
AnnealingModel parse_model(const std::string& spec);

}  // namespace annealbench
