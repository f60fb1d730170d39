#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "annealbench/linalg.hpp"
#include "annealbench/model.hpp"
#include "annealbench/schedule.hpp"

namespace annealbench {

/// Fixed-step integrators for i d/ds psi = tau * H(s) psi on s in [0,1].
///
/// rk4: classical Runge-Kutta; norm drift is the quality signal.
/// unitary_midpoint: per-step propagator exp(-i tau ds H(s_mid)),
/// exactly norm-preserving; the midpoint exponential is applied through
/// an eigen-decomposition at small dimension and through a
/// machine-precision Taylor expansion at large dimension.
enum class IntegratorMethod { rk4, unitary_midpoint };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::rk4;
  /// Explicit step count; 0 means derive from step_density.
  int steps = 0;
  /// Steps per unit of physical time: steps = ceil(step_density * tau).
  double step_density = 40.0;
  bool renormalize = false;
  double norm_ceiling = 1e-8;

  int resolve_steps(double tau) const;
};

struct EvolutionResult {
  ComplexVector final_state;
  double tau = 0.0;
  double norm_drift = 0.0;
  double p_excited = 0.0;
  double e_residual = 0.0;
  long steps_used = 0;
  std::string model_label;
  std::string schedule_label;
};

/// Called every `every` steps (and at the final step) with the current
/// state; used for trajectory dumps and invariant checks.
struct TrajectoryObserver {
  int every = 1;
  std::function<void(long step, double s, const ComplexVector& psi)> callback;
};

/// Evolves the model's initial state through the full anneal and measures
/// excitation probability and residual energy against h_pot.
/// Throws NumericError if the final norm drift exceeds cfg.norm_ceiling
/// (with renormalize=false).
EvolutionResult evolve(const AnnealingModel& model, const Schedule& sched, double tau,
                       const IntegratorConfig& cfg,
                       const TrajectoryObserver* observer = nullptr);

/// Populations of the final state by eigenlevel of h_pot, degenerate
/// levels aggregated; entries are (level index, probability).
std::vector<std::pair<int, double>> excitation_overlaps(const AnnealingModel& model,
                                                        const ComplexVector& state);

/// Step-halving self-check: runs at the configured step count and at
/// 2x and 4x. For rk4 in the smooth regime the Richardson ratio
/// |p(S)-p(2S)| / |p(2S)-p(4S)| approaches 2^4.
struct ConvergenceReport {
  EvolutionResult base;
  EvolutionResult half_step;
  EvolutionResult quarter_step;
  double ratio = 0.0;
  double e_residual_rel_change = 0.0;  // |e(S)-e(2S)| / |e(2S)|
};
ConvergenceReport convergence_check(const AnnealingModel& model, const Schedule& sched,
                                    double tau, const IntegratorConfig& cfg);

}  // namespace annealbench
