#include <fstream>
#include <sstream>

#include "annealbench/errors.hpp"
#include "annealbench/sweep.hpp"

namespace annealbench {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw UsageError(where + ": bad number '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw UsageError(where + ": bad integer '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError(where + ": bad boolean '" + v + "' (use true|false)");
}

}  // namespace

double default_floor(const std::string& observable) {
  if (observable == "p_excited") return 1e-15;
  if (observable == "e_residual") return 1e-13;
  throw UsageError("unknown observable '" + observable +
                   "' (expected p_excited|e_residual)");
}

SweepSpec parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");

  SweepSpec spec;
  bool have_model = false, have_schedules = false, have_tau_min = false,
       have_tau_max = false, have_out = false;

  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);

    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "schedules" && section != "tau" &&
          section != "integrator" && section != "output" && section != "fit") {
        throw UsageError(where + ": unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(where + ": empty key");
    if (section.empty()) throw UsageError(where + ": key outside any section");

    if (section == "model") {
      if (key == "spec") {
        spec.model_spec = value;
        have_model = true;
      } else {
        throw UsageError(where + ": unknown key '" + key + "' in [model]");
      }
    } else if (section == "schedules") {
      if (key == "list") {
        std::istringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          item = trim(item);
          if (!item.empty()) spec.schedule_specs.push_back(item);
        }
        if (spec.schedule_specs.empty()) throw UsageError(where + ": empty schedule list");
        have_schedules = true;
      } else {
        throw UsageError(where + ": unknown key '" + key + "' in [schedules]");
      }
    } else if (section == "tau") {
      if (key == "min") {
        spec.tau.tau_min = parse_double(value, where);
        have_tau_min = true;
      } else if (key == "max") {
        spec.tau.tau_max = parse_double(value, where);
        have_tau_max = true;
      } else if (key == "points_per_decade") {
        spec.tau.points_per_decade = parse_int(value, where);
      } else {
        throw UsageError(where + ": unknown key '" + key + "' in [tau]");
      }
    } else if (section == "integrator") {
      if (key == "method") {
        if (value == "rk4") {
          spec.integrator.method = IntegratorMethod::rk4;
        } else if (value == "unitary_midpoint") {
          spec.integrator.method = IntegratorMethod::unitary_midpoint;
        } else {
          throw UsageError(where + ": unknown method '" + value + "'");
        }
      } else if (key == "step_density") {
        spec.integrator.step_density = parse_double(value, where);
        if (spec.integrator.step_density <= 0.0) {
          throw UsageError(where + ": step_density must be positive");
        }
      } else if (key == "steps") {
        spec.integrator.steps = parse_int(value, where);
        if (spec.integrator.steps < 10) throw UsageError(where + ": steps must be >= 10");
      } else if (key == "renormalize") {
        spec.integrator.renormalize = parse_bool(value, where);
      } else if (key == "norm_ceiling") {
        spec.integrator.norm_ceiling = parse_double(value, where);
      } else {
        throw UsageError(where + ": unknown key '" + key + "' in [integrator]");
      }
    } else if (section == "output") {
      if (key == "path") {
        spec.output_path = value;
        have_out = true;
      } else {
        throw UsageError(where + ": unknown key '" + key + "' in [output]");
      }
    } else if (section == "fit") {
      if (key == "observable") {
        default_floor(value);  // validates
        spec.fit_observable = value;
      } else if (key == "floor") {
        spec.fit_floor = parse_double(value, where);
      } else if (key.rfind("window.", 0) == 0) {
        const std::string sched = key.substr(7);
        if (sched.empty()) throw UsageError(where + ": window key needs a schedule name");
        std::istringstream ss(value);
        std::string lo, hi;
        if (!std::getline(ss, lo, ',') || !std::getline(ss, hi) || ss.rdbuf()->in_avail() > 0) {
          throw UsageError(where + ": window expects 'lo,hi'");
        }
        FitWindow w{parse_double(trim(lo), where), parse_double(trim(hi), where)};
        if (!(w.lo > 0.0) || !(w.hi > w.lo)) {
          throw UsageError(where + ": window must satisfy 0 < lo < hi");
        }
        spec.fit_windows[sched] = w;
      } else {
        throw UsageError(where + ": unknown key '" + key + "' in [fit]");
      }
    }
  }

  if (!have_model) throw UsageError(path + ": missing [model] spec");
  if (!have_schedules) throw UsageError(path + ": missing [schedules] list");
  if (!have_tau_min || !have_tau_max) throw UsageError(path + ": missing [tau] min/max");
  if (!have_out) throw UsageError(path + ": missing [output] path");
  if (!(spec.tau.tau_min > 0.0)) throw UsageError(path + ": tau min must be positive");
  if (!(spec.tau.tau_min < spec.tau.tau_max)) {
    throw UsageError(path + ": tau range requires min < max");
  }
  if (spec.tau.points_per_decade < 3) {
    throw UsageError(path + ": points_per_decade must be >= 3");
  }
  return spec;
}

}  // namespace annealbench
