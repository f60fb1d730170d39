#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annealbench/propagator.hpp"

namespace annealbench {

/// Geometric tau grid: points_per_decade values per factor of 10,
/// inclusive of tau_min, not exceeding tau_max.
struct TauGrid {
  double tau_min = 1.0;
  double tau_max = 10.0;
  int points_per_decade = 8;

  std::vector<double> values() const;
};

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// One experiment: a model, a set of schedules, a tau grid, an integrator
/// configuration, an output table, and reviewed fit windows.
struct SweepSpec {
  std::string model_spec;
  std::vector<std::string> schedule_specs;
  TauGrid tau;
  IntegratorConfig integrator;
  std::string output_path;
  std::string fit_observable = "e_residual";  // p_excited | e_residual
  std::optional<double> fit_floor;            // defaults by observable
  std::map<std::string, FitWindow> fit_windows;  // schedule name -> window
};

/// Strict INI parse; unknown sections/keys and malformed values are
/// UsageErrors carrying the line number. Grammar in docs/formats.md.
SweepSpec parse_config(const std::string& path);

/// Default measurement floors (double precision).
double default_floor(const std::string& observable);

struct SweepRow {
  std::string schedule;
  double tau = 0.0;
  double p_excited = 0.0;
  double e_residual = 0.0;
  double norm_drift = 0.0;
  long steps = 0;
  std::string status = "ok";  // ok | failed:<reason>
};

struct SweepTable {
  std::string model_spec;
  std::string schedules_joined;
  std::string integrator_desc;
  std::string tau_desc;
  std::vector<SweepRow> rows;

  const SweepRow* find(const std::string& schedule, double tau) const;
};

/// Runs every (schedule, tau) pair, writing the CSV after each completed
/// row (atomic rewrite, rows sorted by schedule then tau). Rows already
/// present in an existing table at output_path are not recomputed.
/// Integrator failures flag the row and the sweep continues.
/// `jobs` rows execute concurrently; results are independent of jobs.
SweepTable run_sweep(const SweepSpec& spec, int jobs = 1);

SweepTable load_table(const std::string& path);
void write_table(const SweepTable& table, const std::string& path);

/// Ordinary least squares on (log10 tau, log10 observable) over rows with
/// tau inside the window and observable above the floor.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  FitWindow window;
  int n_points = 0;
  double residual_rms = 0.0;
  int floor_excluded = 0;
};

FitResult fit_slope(const SweepTable& table, const std::string& schedule,
                    const std::string& observable, FitWindow window, double floor);

/// Annealing time giving a constant local excitation rate delta for the
/// N-item search schedule: sqrt(N-1)/delta.
double grover_tau_for_delta(int n_items, double delta);

/// Emits a self-contained gnuplot script for one of the bundled figures.
///   fig1: excitation probability vs tau with crossing-formula curves and
///         power-law envelope lines (two-level model tables)
///   fig3/fig5: residual energy vs tau with tau^(-2m) guide lines
void write_figure_script(const std::string& table_path, const std::string& figure,
                         const std::string& out_path);

}  // namespace annealbench
