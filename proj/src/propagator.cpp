#include "annealbench/propagator.hpp"

#include <cmath>
#include <string>

#include "annealbench/errors.hpp"

namespace annealbench {

namespace {

constexpr double kTaylorThetaCap = 0.9;
constexpr double kTaylorTermTol = 1e-17;
constexpr int kTaylorMaxTerms = 60;

double gershgorin_bound(const RealMatrix& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}
double gershgorin_bound(const ComplexMatrix& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// ---- real engine: state as n x 2 (re, im), all operators real symmetric.

struct RealEngine {
  using Mat = RealMatrix;
  using State = Eigen::Matrix<double, Eigen::Dynamic, 2>;

  static State from_complex(const ComplexVector& v) {
    State s(v.size(), 2);
    s.col(0) = v.real();
    s.col(1) = v.imag();
    return s;
  }
  static ComplexVector to_complex(const State& s) {
    ComplexVector v(s.rows());
    v.real() = s.col(0);
    v.imag() = s.col(1);
    return v;
  }
  static double norm(const State& s) { return s.norm(); }

  // out := -i * scale * (M * in). Column-wise products: Eigen's GEMV path
  // beats its 2-column GEMM here (the matrix stays cached, no panel
  // packing).
  static void apply_minus_i(const Mat& m, double scale, const State& in, State& out,
                            State& tmp) {
    tmp.col(0).noalias() = m * in.col(0);
    tmp.col(1).noalias() = m * in.col(1);
    out.col(0) = scale * tmp.col(1);
    out.col(1) = -scale * tmp.col(0);
  }

  // w := exp(-i theta M) w.
  //
  // Two-level case in closed form: with M = c I + a sigma_z + b sigma_x,
  // exp(-i theta M) = e^{-i theta c} (cos(theta r) - i sin(theta r) (a sigma_z
  // + b sigma_x)/r), r = sqrt(a^2+b^2). Larger systems go through a Taylor
  // series with internal substepping; terms are cut at machine precision, so
  // the applied operator is the midpoint unitary to roundoff.
  static void apply_exp(const Mat& m, double theta, double norm_bound, State& w,
                        State& term, State& tmp) {
    if (m.rows() == 2) {
      const double c = 0.5 * (m(0, 0) + m(1, 1));
      const double a = 0.5 * (m(0, 0) - m(1, 1));
      const double b = m(0, 1);
      const double r = std::sqrt(a * a + b * b);
      const double cos_r = std::cos(theta * r);
      const double sinc = r > 0.0 ? std::sin(theta * r) / r : theta;
      // u = cos_r I - i sinc (a sigma_z + b sigma_x); then a global phase.
      term = w;
      w.col(0) = cos_r * term.col(0);
      w.col(1) = cos_r * term.col(1);
      w(0, 0) += sinc * (a * term(0, 1) + b * term(1, 1));
      w(1, 0) += sinc * (-a * term(1, 1) + b * term(0, 1));
      w(0, 1) -= sinc * (a * term(0, 0) + b * term(1, 0));
      w(1, 1) -= sinc * (-a * term(1, 0) + b * term(0, 0));
      const double pc = std::cos(theta * c), ps = std::sin(theta * c);
      term = w;
      w.col(0) = pc * term.col(0) + ps * term.col(1);
      w.col(1) = pc * term.col(1) - ps * term.col(0);
      return;
    }
    const int nsub = std::max(1, static_cast<int>(std::ceil(theta * norm_bound / kTaylorThetaCap)));
    const double th = theta / nsub;
    for (int sub = 0; sub < nsub; ++sub) {
      term = w;
      int k = 1;
      for (; k <= kTaylorMaxTerms; ++k) {
        apply_minus_i(m, th / k, term, term, tmp);
        w += term;
        if (term.norm() <= kTaylorTermTol) break;
      }
      if (k > kTaylorMaxTerms) {
        throw NumericError("unitary_midpoint: Taylor expansion failed to converge");
      }
    }
  }
};

// ---- complex engine: general Hermitian operators.

struct ComplexEngine {
  using Mat = ComplexMatrix;
  using State = ComplexVector;

  static State from_complex(const ComplexVector& v) { return v; }
  static ComplexVector to_complex(const State& s) { return s; }
  static double norm(const State& s) { return s.norm(); }

  static void apply_minus_i(const Mat& m, double scale, const State& in, State& out,
                            State& tmp) {
    tmp.noalias() = m * in;
    out = Complex(0.0, -scale) * tmp;
  }

  static void apply_exp(const Mat& m, double theta, double norm_bound, State& w,
                        State& term, State& tmp) {
    const int nsub = std::max(1, static_cast<int>(std::ceil(theta * norm_bound / kTaylorThetaCap)));
    const double th = theta / nsub;
    for (int sub = 0; sub < nsub; ++sub) {
      term = w;
      int k = 1;
      for (; k <= kTaylorMaxTerms; ++k) {
        apply_minus_i(m, th / k, term, term, tmp);
        w += term;
        if (term.norm() <= kTaylorTermTol) break;
      }
      if (k > kTaylorMaxTerms) {
        throw NumericError("unitary_midpoint: Taylor expansion failed to converge");
      }
    }
  }
};

struct Measurement {
  double p_excited = 0.0;
  double e_residual = 0.0;
};

Measurement measure_final(const AnnealingModel& model, const ComplexVector& psi) {
  const EigenDecomposition& pot = model.pot_decomposition;
  const ComplexVector amps = pot.eigenvectors.adjoint() * psi;
  const auto levels = group_levels(pot.eigenvalues, level_tolerance(pot.eigenvalues));
  Measurement out;
  // Excited population summed directly (no 1 - |<0|psi>|^2 cancellation),
  // so values near the double-precision floor stay meaningful.
  const int ground_end = levels.front().first + levels.front().count;
  for (Eigen::Index j = ground_end; j < amps.size(); ++j) {
    out.p_excited += std::norm(amps[j]);
  }
  const ComplexVector hpsi = model.h_pot.entries() * psi;
  out.e_residual = psi.dot(hpsi).real() - model.exact_ground_energy_final;
  return out;
}

template <class Engine>
EvolutionResult run_evolution(const AnnealingModel& model, const Schedule& sched,
                              double tau, const IntegratorConfig& cfg, int steps,
                              const typename Engine::Mat& kin,
                              const typename Engine::Mat& coupling,
                              const TrajectoryObserver* observer) {
  using State = typename Engine::State;
  using Mat = typename Engine::Mat;

  const double ds = 1.0 / steps;
  const double norm_bound =
      std::max(gershgorin_bound(kin), gershgorin_bound((kin + coupling).eval()));

  State psi = Engine::from_complex(model.initial_state);
  State k1 = psi, k2 = psi, k3 = psi, k4 = psi, tmp = psi, stage = psi;
  Mat hbuf(kin.rows(), kin.cols());

  auto hamiltonian_at = [&](double s) -> const Mat& {
    hbuf.noalias() = kin + sched.value(s) * coupling;
    return hbuf;
  };
  auto notify = [&](long step, double s) {
    if (observer && observer->callback &&
        (step % std::max(1, observer->every) == 0 || step == steps)) {
      observer->callback(step, s, Engine::to_complex(psi));
    }
  };

  notify(0, 0.0);
  for (int step = 0; step < steps; ++step) {
    const double s = step * ds;
    if (cfg.method == IntegratorMethod::rk4) {
      const double t = tau;
      Engine::apply_minus_i(hamiltonian_at(s), t, psi, k1, tmp);
      stage = psi + (0.5 * ds) * k1;
      Engine::apply_minus_i(hamiltonian_at(s + 0.5 * ds), t, stage, k2, tmp);
      stage = psi + (0.5 * ds) * k2;
      Engine::apply_minus_i(hbuf, t, stage, k3, tmp);  // same midpoint Hamiltonian
      stage = psi + ds * k3;
      Engine::apply_minus_i(hamiltonian_at(s + ds), t, stage, k4, tmp);
      psi += (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      const Mat& hmid = hamiltonian_at(s + 0.5 * ds);
      Engine::apply_exp(hmid, tau * ds, norm_bound, psi, k1, tmp);
    }
    if (cfg.renormalize) {
      psi /= Engine::norm(psi);
    }
    notify(step + 1, (step + 1) * ds);
  }

  EvolutionResult result;
  result.final_state = Engine::to_complex(psi);
  result.tau = tau;
  result.steps_used = steps;
  result.model_label = model.label;
  result.schedule_label = sched.name();
  result.norm_drift = std::abs(result.final_state.norm() - 1.0);
  const Measurement m = measure_final(model, result.final_state);
  result.p_excited = m.p_excited;
  result.e_residual = m.e_residual;
  if (!cfg.renormalize && result.norm_drift > cfg.norm_ceiling) {
    throw NumericError("evolve: norm drift " + std::to_string(result.norm_drift) +
                       " exceeds ceiling " + std::to_string(cfg.norm_ceiling) +
                       " (tau=" + std::to_string(tau) +
                       "); increase the step count or density");
  }
  return result;
}

}  // namespace

int IntegratorConfig::resolve_steps(double tau) const {
  if (steps > 0) return std::max(10, steps);
  if (!(step_density > 0.0)) throw UsageError("IntegratorConfig: step_density must be positive");
  const double raw = std::ceil(step_density * tau);
  if (raw > 2e9) throw UsageError("IntegratorConfig: step count overflow");
  return std::max(10, static_cast<int>(raw));
}

EvolutionResult evolve(const AnnealingModel& model, const Schedule& sched, double tau,
                       const IntegratorConfig& cfg, const TrajectoryObserver* observer) {
  if (!(tau > 0.0)) throw UsageError("evolve: tau must be positive");
  const int steps = cfg.resolve_steps(tau);
  if (model.h_kin.is_real() && model.h_pot.is_real()) {
    const RealMatrix kin = model.h_kin.real_part();
    const RealMatrix coupling = model.h_pot.real_part() - kin;
    return run_evolution<RealEngine>(model, sched, tau, cfg, steps, kin, coupling,
                                     observer);
  }
  const ComplexMatrix& kin = model.h_kin.entries();
  const ComplexMatrix coupling = model.h_pot.entries() - kin;
  return run_evolution<ComplexEngine>(model, sched, tau, cfg, steps, kin, coupling,
                                      observer);
}

std::vector<std::pair<int, double>> excitation_overlaps(const AnnealingModel& model,
                                                        const ComplexVector& state) {
  if (state.size() != model.dim) {
    throw UsageError("excitation_overlaps: state dimension mismatch");
  }
  const EigenDecomposition& pot = model.pot_decomposition;
  const ComplexVector amps = pot.eigenvectors.adjoint() * state;
  const auto levels = group_levels(pot.eigenvalues, level_tolerance(pot.eigenvalues));
  std::vector<std::pair<int, double>> out;
  out.reserve(levels.size());
  for (size_t li = 0; li < levels.size(); ++li) {
    double p = 0.0;
    for (int j = levels[li].first; j < levels[li].first + levels[li].count; ++j) {
      p += std::norm(amps[j]);
    }
    out.emplace_back(static_cast<int>(li), p);
  }
  return out;
}

ConvergenceReport convergence_check(const AnnealingModel& model, const Schedule& sched,
                                    double tau, const IntegratorConfig& cfg) {
  const int base_steps = cfg.resolve_steps(tau);
  auto with_steps = [&](int s) {
    IntegratorConfig c = cfg;
    c.steps = s;
    return evolve(model, sched, tau, c);
  };
  ConvergenceReport report;
  report.base = with_steps(base_steps);
  report.half_step = with_steps(2 * base_steps);
  report.quarter_step = with_steps(4 * base_steps);
  const double d12 = std::abs(report.base.p_excited - report.half_step.p_excited);
  const double d24 = std::abs(report.half_step.p_excited - report.quarter_step.p_excited);
  report.ratio = d24 > 0.0 ? d12 / d24 : 0.0;
  const double denom = std::abs(report.half_step.e_residual);
  report.e_residual_rel_change =
      denom > 0.0 ? std::abs(report.base.e_residual - report.half_step.e_residual) / denom
                  : 0.0;
  return report;
}

}  // namespace annealbench
