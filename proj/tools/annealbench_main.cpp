#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "annealbench/errors.hpp"
#include "annealbench/spectral.hpp"
#include "annealbench/sweep.hpp"
#include "annealbench/version.hpp"

namespace ab = annealbench;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> orders;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      orders.push_back(std::stoi(item));
    } catch (...) {
      throw ab::UsageError("--orders: bad entry '" + item + "'");
    }
  }
  if (orders.empty()) throw ab::UsageError("--orders: empty list");
  return orders;
}

ab::FitWindow parse_window(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ab::UsageError("--window expects 'lo,hi'");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (...) {
    throw ab::UsageError("--window: bad bounds '" + text + "'");
  }
}

void print_row(std::ostream& out, const ab::EvolutionResult& r) {
  out << r.schedule_label << ',' << fmt(r.tau) << ',' << fmt(r.p_excited) << ','
      << fmt(r.e_residual) << ',' << fmt(r.norm_drift) << ',' << r.steps_used << ",ok\n";
}

void cmd_spectrum(const std::string& model_spec, const std::string& schedule_spec,
                  int grid, const std::string& orders_text, int levels,
                  const std::string& out_path) {
  const ab::AnnealingModel model = ab::parse_model(model_spec);
  const ab::Schedule sched = ab::parse_schedule(schedule_spec);
  const std::vector<int> orders = parse_orders(orders_text);
  if (grid < 2) throw ab::UsageError("--grid must be >= 2");
  const int k = std::min(levels, model.dim - 1);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ab::IoError("cannot write '" + out_path + "'");
    out = &file;
  }
  *out << "# annealbench spectrum model=" << model_spec << " schedule=" << schedule_spec
       << " grid=" << grid << "\n";
  *out << "s";
  for (int j = 0; j <= k; ++j) *out << ",eps" << j;
  for (int j = 1; j <= k; ++j) *out << ",gap" << j;
  for (int j = 1; j <= k; ++j)
    for (int m : orders) *out << ",A" << j << "_m" << m;
  *out << "\n";
  for (int i = 0; i < grid; ++i) {
    const double s = static_cast<double>(i) / (grid - 1);
    const ab::SpectrumSample sample = ab::sample_spectrum(model, sched, s, orders);
    *out << fmt(s);
    for (int j = 0; j <= k; ++j) *out << ',' << fmt(sample.eigenvalues[j]);
    for (int j = 1; j <= k; ++j) *out << ',' << fmt(sample.gaps[j - 1]);
    for (int j = 1; j <= k; ++j)
      for (int m : orders) *out << ',' << fmt(sample.a_coeffs.at(m)[j - 1]);
    *out << "\n";
  }
}

void cmd_bound(const std::string& model_spec, const std::string& schedule_spec, int m,
               int level, const std::string& out_path) {
  const ab::AnnealingModel model = ab::parse_model(model_spec);
  const ab::Schedule sched = ab::parse_schedule(schedule_spec);
  const ab::BoundReport report = ab::bound_report(model, sched, m, level);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ab::IoError("cannot write '" + out_path + "'");
    out = &file;
  }
  *out << "# annealbench bound model=" << model_spec << " schedule=" << schedule_spec
       << "\n";
  *out << "m,level,A_start,A_end,coefficient\n";
  *out << report.order << ',' << report.level << ',' << fmt(report.a_start) << ','
       << fmt(report.a_end) << ',' << fmt(report.coefficient) << "\n";
}

void cmd_evolve(const std::string& model_spec, const std::string& schedule_spec,
                double tau, const ab::IntegratorConfig& cfg,
                const std::string& trajectory_path, int dump_every) {
  const ab::AnnealingModel model = ab::parse_model(model_spec);
  const ab::Schedule sched = ab::parse_schedule(schedule_spec);

  std::ofstream traj;
  ab::TrajectoryObserver observer;
  const ab::TrajectoryObserver* obs = nullptr;
  if (!trajectory_path.empty()) {
    traj.open(trajectory_path);
    if (!traj) throw ab::IoError("cannot write '" + trajectory_path + "'");
    traj << "# annealbench trajectory model=" << model_spec
         << " schedule=" << schedule_spec << " tau=" << fmt(tau) << "\n";
    traj << "s,norm,p_excited_instantaneous\n";
    const int steps = cfg.resolve_steps(tau);
    observer.every = dump_every > 0 ? dump_every : std::max(1, steps / 100);
    observer.callback = [&](long, double s, const ab::ComplexVector& psi) {
      const ab::EigenDecomposition eig = ab::eigh(ab::interpolate(model, sched, s));
      const ab::ComplexVector amps = eig.eigenvectors.adjoint() * psi;
      const auto levels =
          ab::group_levels(eig.eigenvalues, ab::level_tolerance(eig.eigenvalues));
      double p = 0.0;
      for (int j = levels.front().count; j < model.dim; ++j) p += std::norm(amps[j]);
      traj << fmt(s) << ',' << fmt(psi.norm()) << ',' << fmt(p) << "\n";
    };
    obs = &observer;
  }
  const ab::EvolutionResult r = ab::evolve(model, sched, tau, cfg, obs);
  std::cout << "schedule,tau,p_excited,e_residual,norm_drift,steps,status\n";
  print_row(std::cout, r);
}

int run(int argc, char** argv) {
  CLI::App app{"annealbench: quantum annealing schedule benchmark"};
  app.set_version_flag("--version", std::string(ab::kBuildId));
  app.require_subcommand(1);

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "instantaneous spectrum scan as CSV");
  std::string sp_model, sp_sched, sp_orders = "1", sp_out;
  int sp_grid = 201, sp_levels = 4;
  spectrum->add_option("--model", sp_model)->required();
  spectrum->add_option("--schedule", sp_sched)->required();
  spectrum->add_option("--grid", sp_grid, "grid points over s");
  spectrum->add_option("--orders", sp_orders, "derivative orders, e.g. 1,2");
  spectrum->add_option("--levels", sp_levels, "excited levels to report");
  spectrum->add_option("--out", sp_out, "output file (default stdout)");

  // bound
  auto* bound = app.add_subcommand("bound", "asymptotic excitation bound coefficient");
  std::string bd_model, bd_sched, bd_out;
  int bd_m = 1, bd_level = 1;
  bound->add_option("--model", bd_model)->required();
  bound->add_option("--schedule", bd_sched)->required();
  bound->add_option("--m", bd_m, "bound order")->required();
  bound->add_option("--j", bd_level, "target level");
  bound->add_option("--out", bd_out);

  // evolve
  auto* evolve = app.add_subcommand("evolve", "single anneal, one CSV row");
  std::string ev_model, ev_sched, ev_method = "rk4", ev_traj;
  double ev_tau = 0.0, ev_density = 40.0, ev_ceiling = 1e-8;
  int ev_steps = 0, ev_dump_every = 0;
  bool ev_renorm = false;
  evolve->add_option("--model", ev_model)->required();
  evolve->add_option("--schedule", ev_sched)->required();
  evolve->add_option("--tau", ev_tau)->required();
  evolve->add_option("--method", ev_method, "rk4|unitary_midpoint");
  evolve->add_option("--step-density", ev_density, "steps per unit physical time");
  evolve->add_option("--steps", ev_steps, "explicit step count");
  evolve->add_option("--norm-ceiling", ev_ceiling);
  evolve->add_flag("--renormalize", ev_renorm);
  evolve->add_option("--dump-trajectory", ev_traj, "trajectory CSV path");
  evolve->add_option("--dump-every", ev_dump_every, "steps between dumps");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "tau sweep from a config file");
  std::string sw_config, sw_model, sw_out, sw_tau;
  std::vector<std::string> sw_schedules;
  int sw_jobs = 1;
  sweep->add_option("--config", sw_config)->required();
  sweep->add_option("--model", sw_model, "override model spec");
  sweep->add_option("--schedule", sw_schedules, "override schedule list");
  sweep->add_option("--tau", sw_tau, "override grid min:max[:points_per_decade]");
  sweep->add_option("--jobs", sw_jobs, "parallel rows");
  sweep->add_option("--out", sw_out, "override output path");

  // fit
  auto* fit = app.add_subcommand("fit", "log-log slope fit on a sweep table");
  std::string ft_config, ft_table, ft_sched, ft_observable, ft_window;
  double ft_floor = -1.0;
  fit->add_option("--config", ft_config, "fit every window in the config");
  fit->add_option("--table", ft_table, "table path (with --schedule/--window)");
  fit->add_option("--schedule", ft_sched);
  fit->add_option("--observable", ft_observable, "p_excited|e_residual");
  fit->add_option("--window", ft_window, "lo,hi in tau");
  fit->add_option("--floor", ft_floor, "measurement floor");

  // figure
  auto* figure = app.add_subcommand("figure", "emit a gnuplot script for a table");
  std::string fg_table, fg_kind, fg_out;
  figure->add_option("--table", fg_table)->required();
  figure->add_option("--figure", fg_kind, "fig1|fig3|fig5")->required();
  figure->add_option("--out", fg_out)->required();

  CLI11_PARSE(app, argc, argv);

  if (spectrum->parsed()) {
    cmd_spectrum(sp_model, sp_sched, sp_grid, sp_orders, sp_levels, sp_out);
    return 0;
  }
  if (bound->parsed()) {
    cmd_bound(bd_model, bd_sched, bd_m, bd_level, bd_out);
    return 0;
  }
  if (evolve->parsed()) {
    ab::IntegratorConfig cfg;
    if (ev_method == "rk4") {
      cfg.method = ab::IntegratorMethod::rk4;
    } else if (ev_method == "unitary_midpoint") {
      cfg.method = ab::IntegratorMethod::unitary_midpoint;
    } else {
      throw ab::UsageError("--method must be rk4|unitary_midpoint");
    }
    cfg.steps = ev_steps;
    cfg.step_density = ev_density;
    cfg.renormalize = ev_renorm;
    cfg.norm_ceiling = ev_ceiling;
    cmd_evolve(ev_model, ev_sched, ev_tau, cfg, ev_traj, ev_dump_every);
    return 0;
  }
  if (sweep->parsed()) {
    ab::SweepSpec spec = ab::parse_config(sw_config);
    if (!sw_model.empty()) spec.model_spec = sw_model;
    if (!sw_schedules.empty()) spec.schedule_specs = sw_schedules;
    if (!sw_out.empty()) spec.output_path = sw_out;
    if (!sw_tau.empty()) {
      std::istringstream ss(sw_tau);
      std::string lo, hi, ppd;
      if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':')) {
        throw ab::UsageError("--tau expects min:max[:points_per_decade]");
      }
      try {
        spec.tau.tau_min = std::stod(lo);
        spec.tau.tau_max = std::stod(hi);
        if (std::getline(ss, ppd)) spec.tau.points_per_decade = std::stoi(ppd);
      } catch (...) {
        throw ab::UsageError("--tau: bad values '" + sw_tau + "'");
      }
    }
    const ab::SweepTable table = ab::run_sweep(spec, sw_jobs);
    int failed = 0;
    for (const auto& row : table.rows) {
      if (row.status != "ok") ++failed;
    }
    std::cout << "wrote " << spec.output_path << " (" << table.rows.size() << " rows";
    if (failed) std::cout << ", " << failed << " failed";
    std::cout << ")\n";
    return 0;
  }
  if (fit->parsed()) {
    std::cout << "schedule,observable,window_lo,window_hi,floor,slope,intercept,"
                 "n_points,floor_excluded,residual_rms\n";
    auto print_fit = [](const std::string& sched, const std::string& obs, double floor,
                        const ab::FitResult& f) {
      std::cout << sched << ',' << obs << ',' << fmt(f.window.lo) << ','
                << fmt(f.window.hi) << ',' << fmt(floor) << ',' << fmt(f.slope) << ','
                << fmt(f.intercept) << ',' << f.n_points << ',' << f.floor_excluded
                << ',' << fmt(f.residual_rms) << "\n";
    };
    if (!ft_config.empty()) {
      const ab::SweepSpec spec = ab::parse_config(ft_config);
      if (spec.fit_windows.empty()) {
        throw ab::UsageError("fit: config has no [fit] window.<schedule> entries");
      }
      const ab::SweepTable table = ab::load_table(ft_table.empty() ? spec.output_path
                                                                   : ft_table);
      const double floor =
          spec.fit_floor ? *spec.fit_floor : ab::default_floor(spec.fit_observable);
      for (const auto& [sched, window] : spec.fit_windows) {
        if (!ft_sched.empty() && sched != ft_sched) continue;
        const ab::FitResult f =
            ab::fit_slope(table, sched, spec.fit_observable, window, floor);
        print_fit(sched, spec.fit_observable, floor, f);
      }
      return 0;
    }
    if (ft_table.empty() || ft_sched.empty() || ft_observable.empty() ||
        ft_window.empty()) {
      throw ab::UsageError(
          "fit: need --config, or --table --schedule --observable --window");
    }
    const double floor = ft_floor >= 0.0 ? ft_floor : ab::default_floor(ft_observable);
    const ab::FitResult f = ab::fit_slope(ab::load_table(ft_table), ft_sched,
                                          ft_observable, parse_window(ft_window), floor);
    print_fit(ft_sched, ft_observable, floor, f);
    return 0;
  }
  if (figure->parsed()) {
    ab::write_figure_script(fg_table, fg_kind, fg_out);
    std::cout << "wrote " << fg_out << "\n";
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const ab::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const ab::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
