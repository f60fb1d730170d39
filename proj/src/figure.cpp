#include <cmath>
#include <fstream>
#include <sstream>

#include "annealbench/errors.hpp"
#include "annealbench/spectral.hpp"
#include "annealbench/sweep.hpp"

namespace annealbench {

namespace {

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Largest m in 1..4 for which the schedule is boundary-flat, i.e. the
// power of the leading asymptotic decay tau^(-2m).
int flat_order(const Schedule& sched) {
  int m = 1;
  for (int k = 2; k <= 4 && check_flatness(sched, k); ++k) m = k;
  return m;
}

// gnuplot-safe series name.
std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == '"' || c == '\\') c = '_';
  }
  return out;
}

struct LzParams {
  double h = 0.0;
  double alpha = 0.0;
};

LzParams lz_params_from_spec(const std::string& model_spec) {
  if (model_spec.rfind("lz:", 0) != 0) {
    throw UsageError("fig1 requires a two-level (lz:...) table, got model '" +
                     model_spec + "'");
  }
  LzParams p;
  std::istringstream ss(model_spec.substr(3));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = item.substr(0, eq);
    const double value = std::stod(item.substr(eq + 1));
    if (key == "h") p.h = value;
    if (key == "alpha") p.alpha = value;
  }
  if (!(p.h > 0.0) || p.alpha == 0.0) {
    throw UsageError("fig1: cannot read h/alpha from model '" + model_spec + "'");
  }
  return p;
}

double lz_crossing_slope(const Schedule& sched) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sched.value(mid) <= 0.5 ? lo : hi) = mid;
  }
  return sched.derivative(0.5 * (lo + hi), 1);
}

// Guide-line amplitude anchored at the deepest healthy data point; 1.0 on
// an empty table so the script stays valid.
double guide_amplitude(const SweepTable& table, const std::string& schedule, int m,
                       const std::string& observable, double floor) {
  double best_tau = 0.0, best_y = 0.0;
  for (const auto& row : table.rows) {
    if (row.schedule != schedule || row.status != "ok") continue;
    const double y = observable == "p_excited" ? row.p_excited : row.e_residual;
    if (!(y > floor)) continue;
    if (row.tau > best_tau) {
      best_tau = row.tau;
      best_y = y;
    }
  }
  if (best_tau <= 0.0) return 1.0;
  return best_y * std::pow(best_tau, 2.0 * m);
}

}  // namespace

void write_figure_script(const std::string& table_path, const std::string& figure,
                         const std::string& out_path) {
  if (figure != "fig1" && figure != "fig3" && figure != "fig5") {
    throw UsageError("figure: expected fig1|fig3|fig5, got '" + figure + "'");
  }
  const SweepTable table = load_table(table_path);
  const std::vector<std::string> schedule_tokens = split_csv(table.schedules_joined);
  if (schedule_tokens.empty()) {
    throw UsageError("figure: table '" + table_path + "' lists no schedules");
  }

  const bool is_fig1 = figure == "fig1";
  const std::string observable = is_fig1 ? "p_excited" : "e_residual";
  const int ycol = is_fig1 ? 3 : 4;
  const double floor = default_floor(observable);

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write figure script '" + out_path + "'");
  out << "# gnuplot script generated by annealbench (" << figure << ")\n";
  out << "# data: " << table_path << "\n";
  out << "set datafile separator \",\"\n";
  out << "set logscale xy\n";
  out << "set xlabel \"annealing time tau\"\n";
  out << "set ylabel \"" << (is_fig1 ? "excitation probability" : "residual energy")
      << "\"\n";
  out << "set format y \"10^{%T}\"\n";
  out << "set key bottom left\n";

  std::ostringstream plots;
  char buf[256];
  int style = 1;
  for (const auto& token : schedule_tokens) {
    const Schedule sched = parse_schedule(token);
    const int m = flat_order(sched);
    const std::string tag = sanitize(token);
    const std::string fn_suffix = std::to_string(style);

    if (is_fig1) {
      const LzParams p = lz_params_from_spec(table.model_spec);
      const double slope = lz_crossing_slope(sched);
      const double rate = M_PI * p.alpha * p.alpha / (slope * p.h);
      std::snprintf(buf, sizeof buf, "crossing%s(x) = exp(-%.17g*x)\n",
                    fn_suffix.c_str(), rate);
      out << buf;
      const AnnealingModel model = parse_model(table.model_spec);
      const BoundReport bound = bound_report(model, sched, m);
      std::snprintf(buf, sizeof buf, "envelope%s(x) = %.17g/x**%d\n", fn_suffix.c_str(),
                    bound.coefficient, 2 * m);
      out << buf;
      plots << "  crossing" << fn_suffix << "(x) title \"exp law " << tag
            << "\" dt 2 lc " << style << ", \\\n";
      plots << "  envelope" << fn_suffix << "(x) title \"tau^-" << 2 * m << " "
            << tag << "\" lc " << style << ", \\\n";
    } else {
      const double amp = guide_amplitude(table, sched.name(), m, observable, floor);
      std::snprintf(buf, sizeof buf, "guide%s(x) = %.17g/x**%d\n", fn_suffix.c_str(),
                    amp, 2 * m);
      out << buf;
      plots << "  guide" << fn_suffix << "(x) title \"tau^-" << 2 * m << "\" lc "
            << style << ", \\\n";
    }
    plots << "  '" << table_path << "' using (strcol(1) eq \"" << sched.name()
          << "\" && strcol(7) eq \"ok\" ? $2 : NaN):" << ycol << " title \"" << tag
          << "\" pt 7 ps 0.6 lc " << style;
    if (&token != &schedule_tokens.back()) plots << ", \\";
    plots << "\n";
    ++style;
  }
  out << "plot \\\n" << plots.str();
  out << "pause -1 \"press enter\"\n";
  if (!out) throw IoError("write failure on '" + out_path + "'");
}

}  // namespace annealbench
