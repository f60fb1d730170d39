#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "annealbench/errors.hpp"
#include "annealbench/sweep.hpp"
#include "annealbench/version.hpp"

namespace annealbench {

namespace {

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string tau_key(double tau) { return format_double(tau, "%.12g"); }

std::string integrator_desc(const IntegratorConfig& cfg) {
  std::ostringstream ss;
  ss << "method="
     << (cfg.method == IntegratorMethod::rk4 ? "rk4" : "unitary_midpoint");
  if (cfg.steps > 0) {
    ss << ",steps=" << cfg.steps;
  } else {
    ss << ",step_density=" << format_double(cfg.step_density, "%.12g");
  }
  ss << ",renormalize=" << (cfg.renormalize ? "true" : "false")
     << ",norm_ceiling=" << format_double(cfg.norm_ceiling, "%.12g");
  return ss.str();
}

bool row_less(const SweepRow& a, const SweepRow& b) {
  if (a.schedule != b.schedule) return a.schedule < b.schedule;
  return a.tau < b.tau;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<double> TauGrid::values() const {
  if (!(tau_min > 0.0) || !(tau_min < tau_max)) {
    throw UsageError("TauGrid: requires 0 < min < max");
  }
  if (points_per_decade < 3) throw UsageError("TauGrid: points_per_decade must be >= 3");
  std::vector<double> out;
  const double lmin = std::log10(tau_min);
  const double lmax = std::log10(tau_max);
  for (int k = 0;; ++k) {
    const double l = lmin + static_cast<double>(k) / points_per_decade;
    if (l > lmax + 1e-12) break;
    out.push_back(std::pow(10.0, l));
  }
  return out;
}

const SweepRow* SweepTable::find(const std::string& schedule, double tau) const {
  const std::string key = tau_key(tau);
  for (const auto& row : rows) {
    if (row.schedule == schedule && tau_key(row.tau) == key) return &row;
  }
  return nullptr;
}

void write_table(const SweepTable& table, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write table '" + path + "'");
    out << "# annealbench sweep\n";
    out << "# generated: " << timestamp_utc() << "\n";
    out << "# build: " << kBuildId << "\n";
    out << "# model: " << table.model_spec << "\n";
    out << "# schedules: " << table.schedules_joined << "\n";
    out << "# integrator: " << table.integrator_desc << "\n";
    out << "# tau: " << table.tau_desc << "\n";
    out << "schedule,tau,p_excited,e_residual,norm_drift,steps,status\n";
    for (const auto& r : table.rows) {
      out << r.schedule << ',' << tau_key(r.tau) << ','
          << format_double(r.p_excited, "%.17g") << ','
          << format_double(r.e_residual, "%.17g") << ','
          << format_double(r.norm_drift, "%.17g") << ',' << r.steps << ',' << r.status
          << "\n";
    }
    if (!out) throw IoError("write failure on '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

SweepTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table '" + path + "'");
  SweepTable table;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto grab = [&](const char* tag) -> std::optional<std::string> {
        const std::string prefix = std::string("# ") + tag + ": ";
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
        return std::nullopt;
      };
      if (auto v = grab("model")) table.model_spec = *v;
      if (auto v = grab("schedules")) table.schedules_joined = *v;
      if (auto v = grab("integrator")) table.integrator_desc = *v;
      if (auto v = grab("tau")) table.tau_desc = *v;
      continue;
    }
    if (!header_seen) {
      if (line.rfind("schedule,tau,", 0) != 0) {
        throw UsageError(path + ":" + std::to_string(lineno) + ": unexpected header '" +
                         line + "'");
      }
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    SweepRow row;
    std::string field;
    auto next = [&](const char* what) {
      if (!std::getline(ss, field, ',')) {
        throw UsageError(path + ":" + std::to_string(lineno) + ": missing " +
                         std::string(what));
      }
      return field;
    };
    row.schedule = next("schedule");
    try {
      row.tau = std::stod(next("tau"));
      row.p_excited = std::stod(next("p_excited"));
      row.e_residual = std::stod(next("e_residual"));
      row.norm_drift = std::stod(next("norm_drift"));
      row.steps = std::stol(next("steps"));
    } catch (const UsageError&) {
      throw;
    } catch (...) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": malformed row");
    }
    std::getline(ss, row.status);
    if (row.status.empty()) row.status = "ok";
    table.rows.push_back(std::move(row));
  }
  return table;
}

SweepTable run_sweep(const SweepSpec& spec, int jobs) {
  if (jobs < 1) jobs = 1;
  const AnnealingModel model = parse_model(spec.model_spec);
  std::vector<Schedule> schedules;
  schedules.reserve(spec.schedule_specs.size());
  for (const auto& token : spec.schedule_specs) schedules.push_back(parse_schedule(token));

  SweepTable table;
  table.model_spec = spec.model_spec;
  {
    std::ostringstream ss;
    for (size_t i = 0; i < spec.schedule_specs.size(); ++i) {
      if (i) ss << ',';
      ss << spec.schedule_specs[i];
    }
    table.schedules_joined = ss.str();
  }
  table.integrator_desc = integrator_desc(spec.integrator);
  {
    std::ostringstream ss;
    ss << "min=" << format_double(spec.tau.tau_min, "%.12g")
       << ",max=" << format_double(spec.tau.tau_max, "%.12g")
       << ",points_per_decade=" << spec.tau.points_per_decade;
    table.tau_desc = ss.str();
  }

  // Resume: keep rows from an existing table, keyed by (schedule, tau).
  SweepTable previous;
  if (std::filesystem::exists(spec.output_path)) {
    previous = load_table(spec.output_path);
  }

  struct Task {
    int schedule_index;
    double tau;
  };
  std::vector<Task> pending;
  const std::vector<double> taus = spec.tau.values();
  for (size_t si = 0; si < schedules.size(); ++si) {
    for (double tau : taus) {
      if (const SweepRow* done = previous.find(schedules[si].name(), tau)) {
        table.rows.push_back(*done);
      } else {
        pending.push_back({static_cast<int>(si), tau});
      }
    }
  }
  std::sort(table.rows.begin(), table.rows.end(), row_less);
  write_table(table, spec.output_path);

  std::mutex mu;
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= pending.size()) return;
      const Task& task = pending[i];
      const Schedule& sched = schedules[task.schedule_index];
      SweepRow row;
      row.schedule = sched.name();
      row.tau = task.tau;
      try {
        const EvolutionResult r = evolve(model, sched, task.tau, spec.integrator);
        row.p_excited = r.p_excited;
        row.e_residual = r.e_residual;
        row.norm_drift = r.norm_drift;
        row.steps = r.steps_used;
      } catch (const std::exception& e) {
        std::string reason = e.what();
        std::replace(reason.begin(), reason.end(), ',', ';');
        std::replace(reason.begin(), reason.end(), '\n', ' ');
        row.status = "failed:" + reason;
      }
      std::lock_guard<std::mutex> lock(mu);
      table.rows.push_back(row);
      std::sort(table.rows.begin(), table.rows.end(), row_less);
      write_table(table, spec.output_path);
    }
  };

  if (jobs == 1 || pending.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int n = std::min<size_t>(jobs, pending.size());
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return table;
}

FitResult fit_slope(const SweepTable& table, const std::string& schedule,
                    const std::string& observable, FitWindow window, double floor) {
  if (observable != "p_excited" && observable != "e_residual") {
    throw UsageError("fit_slope: unknown observable '" + observable + "'");
  }
  if (!(window.lo > 0.0) || !(window.hi > window.lo)) {
    throw UsageError("fit_slope: window must satisfy 0 < lo < hi");
  }
  std::vector<double> xs, ys;
  int below_floor = 0;
  for (const auto& row : table.rows) {
    if (row.schedule != schedule || row.status != "ok") continue;
    if (row.tau < window.lo || row.tau > window.hi) continue;
    const double y = observable == "p_excited" ? row.p_excited : row.e_residual;
    if (!(y > floor)) {
      ++below_floor;
      continue;
    }
    xs.push_back(std::log10(row.tau));
    ys.push_back(std::log10(y));
  }
  if (xs.size() < 4) {
    std::ostringstream ss;
    ss << "fit_slope: only " << xs.size() << " usable points for '" << schedule
       << "' in window [" << window.lo << ", " << window.hi << "] (floor " << floor
       << ", " << below_floor << " below floor); need >= 4";
    throw UsageError(ss.str());
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  FitResult fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.window = window;
  fit.n_points = static_cast<int>(xs.size());
  fit.floor_excluded = below_floor;
  double ss_res = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.residual_rms = std::sqrt(ss_res / n);
  return fit;
}

double grover_tau_for_delta(int n_items, double delta) {
  if (n_items < 2) throw UsageError("grover_tau_for_delta: N must be >= 2");
  if (!(delta > 0.0)) throw UsageError("grover_tau_for_delta: delta must be positive");
  return std::sqrt(static_cast<double>(n_items) - 1.0) / delta;
}

}  // namespace annealbench
