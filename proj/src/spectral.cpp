#include "annealbench/spectral.hpp"

#include <cmath>
#include <string>

#include "annealbench/errors.hpp"

namespace annealbench {

namespace {

constexpr double kDegeneracyFloor = 1e-12;

ComplexMatrix coupling_operator(const AnnealingModel& model) {
  return model.h_pot.entries() - model.h_kin.entries();
}

}  // namespace

HermitianMatrix hamiltonian_s_derivative(const AnnealingModel& model,
                                         const Schedule& sched, double s, int order) {
  const double fm = sched.derivative(s, order);
  return HermitianMatrix(fm * coupling_operator(model));
}

SpectrumSample sample_spectrum(const AnnealingModel& model, const Schedule& sched,
                               double s, const std::vector<int>& orders) {
  SpectrumSample out;
  out.s = s;
  const HermitianMatrix h = interpolate(model, sched, s);
  const EigenDecomposition eig = eigh(h);
  const int dim = eig.dim();
  out.eigenvalues = eig.eigenvalues;
  out.gaps.resize(dim - 1);
  for (int j = 1; j < dim; ++j) out.gaps[j - 1] = eig.eigenvalues[j] - eig.eigenvalues[0];
  if (dim > 1 && out.gaps[0] <= kDegeneracyFloor) {
    throw DomainError("sample_spectrum: ground state degenerate at s=" +
                      std::to_string(s));
  }

  // |<j|V|0>| is schedule-independent; every order only rescales it by
  // |f^(m)(s)|.
  const ComplexVector v0 = coupling_operator(model) * eig.eigenvectors.col(0);
  RealVector coupling_abs(dim - 1);
  for (int j = 1; j < dim; ++j) {
    coupling_abs[j - 1] = std::abs(eig.eigenvectors.col(j).dot(v0));
  }

  const auto levels = group_levels(eig.eigenvalues, level_tolerance(eig.eigenvalues));
  for (size_t li = 1; li < levels.size(); ++li) {
    SpectrumSample::Level lvl;
    lvl.energy = levels[li].energy;
    lvl.first = levels[li].first;
    lvl.count = levels[li].count;
    out.excited_levels.push_back(lvl);
  }

  for (int order : orders) {
    const double fm = std::abs(sched.derivative(s, order));
    RealVector elems(dim - 1), coeffs(dim - 1);
    for (int j = 1; j < dim; ++j) {
      elems[j - 1] = fm * coupling_abs[j - 1];
      coeffs[j - 1] = elems[j - 1] / std::pow(out.gaps[j - 1], order + 1);
    }
    for (auto& lvl : out.excited_levels) {
      double sq = 0.0;
      for (int j = lvl.first; j < lvl.first + lvl.count; ++j) {
        sq += elems[j - 1] * elems[j - 1];
      }
      const double gap = eig.eigenvalues[lvl.first] - eig.eigenvalues[0];
      lvl.aggregate_a[order] = std::sqrt(sq) / std::pow(gap, order + 1);
    }
    out.matrix_element_abs[order] = std::move(elems);
    out.a_coeffs[order] = std::move(coeffs);
  }
  return out;
}

double adiabatic_condition(const AnnealingModel& model, const Schedule& sched,
                           int grid_points) {
  if (grid_points < 2) throw UsageError("adiabatic_condition: grid must have >= 2 points");
  double worst = 0.0;
  for (int k = 0; k < grid_points; ++k) {
    const double s = static_cast<double>(k) / (grid_points - 1);
    const SpectrumSample sample = sample_spectrum(model, sched, s, {1});
    const RealVector& a = sample.a_coeffs.at(1);
    if (a.size() > 0) worst = std::max(worst, a.maxCoeff());
  }
  return worst;
}

double BoundReport::bound(double tau) const {
  return coefficient / std::pow(tau, 2.0 * order);
}

BoundReport bound_report(const AnnealingModel& model, const Schedule& sched, int m,
                         int level_j) {
  if (m < 1 || m > sched.max_order()) {
    throw UsageError("bound_report: order m=" + std::to_string(m) +
                     " outside the schedule's analytic range");
  }
  if (!check_flatness(sched, m)) {
    throw UsageError("bound_report: schedule '" + sched.name() +
                     "' is not boundary-flat through order " + std::to_string(m - 1) +
                     "; the tau^(-2m) bound does not apply");
  }
  if (level_j < 1 || level_j >= model.dim) {
    throw UsageError("bound_report: level j out of range");
  }
  const SpectrumSample s0 = sample_spectrum(model, sched, 0.0, {m});
  const SpectrumSample s1 = sample_spectrum(model, sched, 1.0, {m});
  BoundReport report;
  report.order = m;
  report.level = level_j;
  report.a_start = s0.a_coeffs.at(m)[level_j - 1];
  report.a_end = s1.a_coeffs.at(m)[level_j - 1];
  const double sum = report.a_start + report.a_end;
  report.coefficient = sum * sum;
  return report;
}

Complex perturbative_amplitude(const AnnealingModel& model, const Schedule& sched,
                               double tau, int level_j, int quad_points) {
  if (quad_points < 100) throw UsageError("perturbative_amplitude: quad_points must be >= 100");
  if (level_j < 1 || level_j >= model.dim) {
    throw UsageError("perturbative_amplitude: level j out of range");
  }
  const int q = quad_points;
  const ComplexMatrix v = coupling_operator(model);

  ComplexVector ground_prev, level_prev;
  std::vector<double> gap(q + 1), integrand_re(q + 1), integrand_im(q + 1);
  std::vector<Complex> g(q + 1);
  for (int k = 0; k <= q; ++k) {
    const double s = static_cast<double>(k) / q;
    const EigenDecomposition eig = eigh(interpolate(model, sched, s));
    ComplexVector ground = eig.eigenvectors.col(0);
    ComplexVector excited = eig.eigenvectors.col(level_j);
    const double d = eig.eigenvalues[level_j] - eig.eigenvalues[0];
    const double below = level_j >= 2
                             ? eig.eigenvalues[level_j] - eig.eigenvalues[level_j - 1]
                             : d;
    if (d <= kDegeneracyFloor || below <= kDegeneracyFloor) {
      throw DomainError("perturbative_amplitude: level " + std::to_string(level_j) +
                        " crosses a neighbor near s=" + std::to_string(s));
    }
    // Smooth frame: rotate each eigenvector so its overlap with the
    // previous grid point is real positive.
    if (k > 0) {
      const Complex og = ground_prev.dot(ground);
      if (std::abs(og) > 0) ground *= std::conj(og) / std::abs(og);
      const Complex oe = level_prev.dot(excited);
      if (std::abs(oe) > 0) excited *= std::conj(oe) / std::abs(oe);
    }
    gap[k] = d;
    g[k] = excited.dot(v * ground) * sched.derivative(s, 1) / d;
    ground_prev = std::move(ground);
    level_prev = std::move(excited);
  }

  // Trapezoid phase accumulation and trapezoid quadrature on one grid.
  const double h = 1.0 / q;
  Complex acc(0.0, 0.0);
  double phase = 0.0;
  Complex prev_term = g[0];  // e^{i tau * 0} = 1
  for (int k = 1; k <= q; ++k) {
    phase += 0.5 * h * (gap[k - 1] + gap[k]);
    const Complex term = g[k] * std::polar(1.0, tau * phase);
    acc += 0.5 * h * (prev_term + term);
    prev_term = term;
  }
  return acc;
}

double lz_nonadiabatic_probability(double h, double alpha, const Schedule& sched,
                                   double tau) {
  if (!(h > 0.0)) throw UsageError("lz_nonadiabatic_probability: h must be positive");
  // f is monotone with f(0)=0, f(1)=1, so f(s)=1/2 has a root; bisect.
  double lo = 0.0, hi = 1.0;
  double flo = sched.value(lo) - 0.5;
  if (flo > 0.0) throw DomainError("lz_nonadiabatic_probability: no root of f(s)=1/2");
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = sched.value(mid) - 0.5;
    if (fmid <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s_star = 0.5 * (lo + hi);
  const double slope = sched.derivative(s_star, 1);
  if (!(slope > 0.0)) {
    throw DomainError("lz_nonadiabatic_probability: schedule stalls at f=1/2");
  }
  return std::exp(-M_PI * alpha * alpha * tau / (slope * h));
}

}  // namespace annealbench
