#include <doctest.h>

#include <cmath>

#include "annealbench/errors.hpp"
#include "annealbench/propagator.hpp"
#include "annealbench/spectral.hpp"

using namespace annealbench;

namespace {

IntegratorConfig midpoint_cfg(double density = 40.0) {
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::unitary_midpoint;
  cfg.step_density = density;
  return cfg;
}

IntegratorConfig rk4_cfg(double density = 400.0) {
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::rk4;
  cfg.step_density = density;
  return cfg;
}

}  // namespace

TEST_SUITE("propagator") {

TEST_CASE("step resolution") {
  IntegratorConfig cfg;
  cfg.step_density = 40.0;
  CHECK(cfg.resolve_steps(100.0) == 4000);
  CHECK(cfg.resolve_steps(0.01) == 10);  // floor
  cfg.steps = 123;
  CHECK(cfg.resolve_steps(100.0) == 123);
}

TEST_CASE("stationary ground state stays put") {
  // h_kin == h_pot: the initial state is an eigenstate for every s.
  const AnnealingModel lz = build_lz(2.0, 0.2);
  AnnealingModel frozen = lz;
  frozen.h_pot = frozen.h_kin;
  frozen.pot_decomposition = eigh(frozen.h_pot);
  frozen.exact_ground_energy_final = frozen.pot_decomposition.eigenvalues[0];
  for (auto cfg : {rk4_cfg(), midpoint_cfg()}) {
    const EvolutionResult r = evolve(frozen, polynomial_schedule(1), 5.0, cfg);
    CHECK(r.p_excited <= 1e-12);
    CHECK(std::abs(r.e_residual) <= 1e-12);
  }
}

TEST_CASE("crossing-regime probability matches the closed form") {
  const AnnealingModel lz = build_lz(2.0, 0.2);
  const Schedule f1 = polynomial_schedule(1);
  const double expected = lz_nonadiabatic_probability(2.0, 0.2, f1, 10.0);
  for (auto cfg : {rk4_cfg(), midpoint_cfg(400.0)}) {
    const EvolutionResult r = evolve(lz, f1, 10.0, cfg);
    CHECK(std::abs(r.p_excited - expected) <= 0.10 * expected);
  }
}

TEST_CASE("deep-anneal probability respects the asymptotic envelope") {
  const AnnealingModel lz = build_lz(2.0, 0.2);
  const Schedule f1 = polynomial_schedule(1);
  const BoundReport bound = bound_report(lz, f1, 1);
  const double tau = 1e4;
  const EvolutionResult r = evolve(lz, f1, tau, midpoint_cfg(100.0));
  CHECK(r.p_excited <= 1.2 * bound.bound(tau));
  CHECK(r.norm_drift <= 1e-10);
}

TEST_CASE("rk4 and unitary midpoint agree") {
  const AnnealingModel lz = build_lz(2.0, 0.2);
  const Schedule f2 = polynomial_schedule(2);
  const EvolutionResult a = evolve(lz, f2, 35.0, rk4_cfg(800.0));
  const EvolutionResult b = evolve(lz, f2, 35.0, midpoint_cfg(800.0));
  CHECK(a.p_excited == doctest::Approx(b.p_excited).epsilon(1e-8));
}

TEST_CASE("real and complex paths agree") {
  // Conjugating by a complex diagonal unitary leaves populations intact
  // but forces the general complex path.
  const AnnealingModel real_model = build_lz(2.0, 0.2);
  ComplexMatrix u = ComplexMatrix::Zero(2, 2);
  u(0, 0) = std::polar(1.0, 0.7);
  u(1, 1) = std::polar(1.0, -1.1);
  AnnealingModel rotated = real_model;
  rotated.h_kin = HermitianMatrix(u * real_model.h_kin.entries() * u.adjoint());
  rotated.h_pot = HermitianMatrix(u * real_model.h_pot.entries() * u.adjoint());
  rotated.initial_state = u * real_model.initial_state;
  // Keep the phase convention of the rebuilt ground state.
  rotated.initial_state *= std::conj(rotated.initial_state[0]) /
                           std::abs(rotated.initial_state[0]);
  rotated.pot_decomposition = eigh(rotated.h_pot);
  rotated.exact_ground_energy_final = rotated.pot_decomposition.eigenvalues[0];

  const Schedule f2 = polynomial_schedule(2);
  const EvolutionResult a = evolve(real_model, f2, 25.0, midpoint_cfg(200.0));
  const EvolutionResult b = evolve(rotated, f2, 25.0, midpoint_cfg(200.0));
  CHECK(a.p_excited == doctest::Approx(b.p_excited).epsilon(1e-10));
  CHECK(a.e_residual == doctest::Approx(b.e_residual).epsilon(1e-9));
}

TEST_CASE("norm conservation of the midpoint propagator") {
  const AnnealingModel lz = build_lz(2.0, 0.2);
  for (double tau : {10.0, 100.0, 1000.0}) {
    const EvolutionResult r = evolve(lz, polynomial_schedule(2), tau, midpoint_cfg());
    CHECK(r.norm_drift <= 1e-13);
  }
  // Large-dimension Taylor path.
  const AnnealingModel g = build_grover(64);
  const EvolutionResult r = evolve(g, polynomial_schedule(1), 50.0, midpoint_cfg());
  CHECK(r.norm_drift <= 1e-12);
}

TEST_CASE("norm ceiling violation is a numeric error") {
  const AnnealingModel g = build_grover(64);
  IntegratorConfig cfg = rk4_cfg(1.0);  // absurdly coarse
  cfg.steps = 10;
  CHECK_THROWS_AS(evolve(g, polynomial_schedule(1), 500.0, cfg), NumericError);
  cfg.renormalize = true;
  CHECK_NOTHROW(evolve(g, polynomial_schedule(1), 500.0, cfg));
}

TEST_CASE("gauge invariance under a global energy shift") {
  const AnnealingModel base = build_lz(2.0, 0.2);
  AnnealingModel shifted = base;
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  shifted.h_kin = HermitianMatrix(base.h_kin.entries() + 2.7 * id);
  shifted.h_pot = HermitianMatrix(base.h_pot.entries() + 2.7 * id);
  shifted.pot_decomposition = eigh(shifted.h_pot);
  shifted.exact_ground_energy_final = shifted.pot_decomposition.eigenvalues[0];
  const Schedule f2 = polynomial_schedule(2);
  const EvolutionResult a = evolve(base, f2, 30.0, midpoint_cfg(200.0));
  const EvolutionResult b = evolve(shifted, f2, 30.0, midpoint_cfg(200.0));
  CHECK(std::abs(a.p_excited - b.p_excited) <= 1e-9);
  CHECK(std::abs(a.e_residual - b.e_residual) <= 1e-9);
}

TEST_CASE("mirror anneal gives the same excitation for symmetric schedules") {
  // Swapping the roles of the endpoints mirrors the spectrum; for the
  // symmetric polynomial family the same schedule applies.
  const AnnealingModel fwd = build_lz(2.0, 0.2);
  AnnealingModel bwd = fwd;
  std::swap(bwd.h_kin, bwd.h_pot);
  const EigenDecomposition kin_eig = eigh(bwd.h_kin);
  bwd.initial_state = kin_eig.eigenvectors.col(0);
  bwd.pot_decomposition = eigh(bwd.h_pot);
  bwd.exact_ground_energy_final = bwd.pot_decomposition.eigenvalues[0];
  for (int m = 1; m <= 4; ++m) {
    const Schedule f = polynomial_schedule(m);
    const EvolutionResult a = evolve(fwd, f, 21.0, midpoint_cfg(400.0));
    const EvolutionResult b = evolve(bwd, f, 21.0, midpoint_cfg(400.0));
    CHECK(std::abs(a.p_excited - b.p_excited) <= 1e-9);
  }
}

TEST_CASE("excitation overlaps") {
  const AnnealingModel g = build_grover(16);
  // Ground state of h_pot is the marked state.
  ComplexVector marked = ComplexVector::Zero(16);
  marked[0] = 1.0;
  auto overlaps = excitation_overlaps(g, marked);
  REQUIRE(!overlaps.empty());
  CHECK(overlaps[0].second == doctest::Approx(1.0));

  // Uniform state: 1/N on the marked level.
  auto uniform_overlaps = excitation_overlaps(g, g.initial_state);
  CHECK(uniform_overlaps[0].second == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  double total = 0.0;
  for (const auto& [level, p] : uniform_overlaps) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(excitation_overlaps(g, marked.head(4).eval()), UsageError);
}

TEST_CASE("residual energy equals the gap-weighted excitation sum") {
  const AnnealingModel m = build_ising(ising_grid_3x3(13, 0.1, 1.0));
  const EvolutionResult r = evolve(m, polynomial_schedule(1), 20.0, midpoint_cfg());
  const auto overlaps = excitation_overlaps(m, r.final_state);
  const auto levels =
      group_levels(m.pot_decomposition.eigenvalues, level_tolerance(m.pot_decomposition.eigenvalues));
  double spectral_sum = 0.0;
  for (size_t li = 1; li < levels.size(); ++li) {
    spectral_sum += (levels[li].energy - levels[0].energy) * overlaps[li].second;
  }
  CHECK(spectral_sum == doctest::Approx(r.e_residual).epsilon(1e-9));
  CHECK(r.e_residual >= -1e-9);
  CHECK(r.p_excited >= 0.0);
  CHECK(r.p_excited <= 1.0 + 1e-9);
}

TEST_CASE("search dynamics confined to the symmetric subspace") {
  const AnnealingModel g = build_grover(64);
  // Subspace basis: marked state and uniform unmarked superposition.
  ComplexVector em = ComplexVector::Zero(64);
  em[0] = 1.0;
  ComplexVector eu = ComplexVector::Constant(64, Complex(1.0 / std::sqrt(63.0), 0.0));
  eu[0] = 0.0;
  double worst = 0.0;
  TrajectoryObserver obs;
  obs.every = 50;
  obs.callback = [&](long, double, const ComplexVector& psi) {
    const ComplexVector proj = em * em.dot(psi) + eu * eu.dot(psi);
    worst = std::max(worst, (psi - proj).norm());
  };
  evolve(g, grover_optimal_schedule(64), 60.0, midpoint_cfg(), &obs);
  CHECK(worst <= 1e-10);
}

TEST_CASE("reduced and full search models give identical answers") {
  const AnnealingModel full = build_grover(64);
  const AnnealingModel red = build_grover_reduced(64);
  const Schedule opt = grover_optimal_schedule(64);
  for (double tau : {37.0, 92.0}) {
    const EvolutionResult a = evolve(full, opt, tau, midpoint_cfg());
    const EvolutionResult b = evolve(red, opt, tau, midpoint_cfg());
    CHECK(std::abs(a.p_excited - b.p_excited) <= 1e-9);
    CHECK(std::abs(a.e_residual - b.e_residual) <= 1e-9);
  }
}

TEST_CASE("rk4 convergence ratio shows fourth order") {
  const AnnealingModel lz = build_lz(2.0, 0.2);
  IntegratorConfig cfg = rk4_cfg();
  cfg.steps = 4000;
  const ConvergenceReport report =
      convergence_check(lz, polynomial_schedule(1), 100.0, cfg);
  CHECK(report.ratio >= 8.0);
  CHECK(report.ratio <= 32.0);
}

TEST_CASE("midpoint convergence gate on the spin glass") {
  const AnnealingModel m = build_ising(ising_grid_3x3(13, 0.1, 1.0));
  const ConvergenceReport report =
      convergence_check(m, polynomial_schedule(1), 30.0, midpoint_cfg());
  CHECK(report.e_residual_rel_change <= 0.01);
}

TEST_CASE("trajectory observer sees the whole anneal") {
  const AnnealingModel lz = build_lz(2.0, 0.2);
  int calls = 0;
  double last_s = -1.0;
  TrajectoryObserver obs;
  obs.every = 100;
  obs.callback = [&](long, double s, const ComplexVector& psi) {
    ++calls;
    last_s = s;
    CHECK(std::abs(psi.norm() - 1.0) <= 1e-9);
  };
  evolve(lz, polynomial_schedule(1), 25.0, midpoint_cfg(), &obs);
  CHECK(calls >= 10);
  CHECK(last_s == doctest::Approx(1.0));
}

TEST_CASE("input guards") {
  const AnnealingModel lz = build_lz(2.0, 0.2);
  CHECK_THROWS_AS(evolve(lz, polynomial_schedule(1), -1.0, rk4_cfg()), UsageError);
  IntegratorConfig cfg;
  cfg.step_density = -1.0;
  CHECK_THROWS_AS(evolve(lz, polynomial_schedule(1), 1.0, cfg), UsageError);
}

}  // TEST_SUITE
