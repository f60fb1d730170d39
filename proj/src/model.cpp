#include "annealbench/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "annealbench/errors.hpp"

namespace annealbench {

namespace {

constexpr int kMaxIsingSites = 14;
constexpr int kMaxGroverItems = 1024;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Eigen-decomposition shortcut for diagonal operators (Ising/Grover h_pot):
// sort the diagonal, eigenvectors are basis vectors.
EigenDecomposition diagonal_decomposition(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return m(a, a).real() < m(b, b).real(); });
  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues[j] = m(order[j], order[j]).real();
    out.eigenvectors(order[j], j) = 1.0;
  }
  return out;
}

bool is_diagonal(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
  return true;
}

AnnealingModel finish_model(HermitianMatrix h_kin, HermitianMatrix h_pot,
                            ComplexVector initial_state, std::string label) {
  AnnealingModel model{std::move(h_kin), std::move(h_pot), std::move(initial_state),
                       0, std::move(label), 0.0, {}};
  model.dim = model.h_kin.dim();
  if (model.h_pot.dim() != model.dim || model.initial_state.size() != model.dim) {
    throw UsageError("model '" + model.label + "': operator/state dimensions disagree");
  }
  model.pot_decomposition = is_diagonal(model.h_pot.entries())
                                ? diagonal_decomposition(model.h_pot.entries())
                                : eigh(model.h_pot);
  model.exact_ground_energy_final = model.pot_decomposition.eigenvalues[0];

  // The initial state must be a normalized ground state of h_kin.
  const double norm = model.initial_state.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    throw UsageError("model '" + model.label + "': initial state not normalized");
  }
  const auto kin_eig = eigh(model.h_kin);
  const double e0 = kin_eig.eigenvalues[0];
  const double residual =
      (matvec(model.h_kin, model.initial_state) - e0 * model.initial_state).norm();
  if (residual > 1e-9) {
    throw UsageError("model '" + model.label +
                     "': initial state is not the kinetic ground state (residual " +
                     std::to_string(residual) + ")");
  }
  return model;
}

}  // namespace

std::vector<double> generate_couplings(int n_edges, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(std::max(0, n_edges));
  std::uint64_t state = seed;
  for (int k = 0; k < n_edges; ++k) {
    const std::uint64_t z = splitmix64(state);
    const double u = static_cast<double>(z >> 11) * 0x1.0p-53;  // [0,1)
    out.push_back(2.0 * u - 1.0);
  }
  return out;
}

IsingInstance ising_grid_3x3(std::uint64_t seed, double field, double transverse) {
  IsingInstance inst;
  inst.n_sites = 9;
  inst.field = field;
  inst.transverse = transverse;
  std::vector<std::pair<int, int>> pairs;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int i = 3 * r + c;
      if (c < 2) pairs.emplace_back(i, i + 1);
      if (r < 2) pairs.emplace_back(i, i + 3);
    }
  }
  const auto couplings = generate_couplings(static_cast<int>(pairs.size()), seed);
  for (size_t k = 0; k < pairs.size(); ++k) {
    inst.edges.push_back({pairs[k].first, pairs[k].second, couplings[k]});
  }
  return inst;
}

IsingInstance load_ising_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open Ising instance file '" + path + "'");
  IsingInstance inst;
  bool have_sites = false, have_field = false, have_gamma = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (!have_sites) {
      try {
        inst.n_sites = std::stoi(first);
      } catch (...) {
        throw UsageError(where + ": expected n_sites");
      }
      have_sites = true;
    } else if (first == "h") {
      if (!(ss >> inst.field)) throw UsageError(where + ": expected 'h <value>'");
      have_field = true;
    } else if (first == "gamma") {
      if (!(ss >> inst.transverse)) throw UsageError(where + ": expected 'gamma <value>'");
      have_gamma = true;
    } else {
      IsingEdge e;
      try {
        e.i = std::stoi(first);
      } catch (...) {
        throw UsageError(where + ": expected edge 'i j J'");
      }
      if (!(ss >> e.j >> e.coupling)) throw UsageError(where + ": expected edge 'i j J'");
      inst.edges.push_back(e);
    }
    std::string extra;
    if (ss >> extra) throw UsageError(where + ": trailing token '" + extra + "'");
  }
  if (!have_sites) throw UsageError(path + ": missing n_sites line");
  if (!have_field) throw UsageError(path + ": missing 'h <value>' line");
  if (!have_gamma) throw UsageError(path + ": missing 'gamma <value>' line");
  return inst;
}

void save_ising_instance(const IsingInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write Ising instance file '" + path + "'");
  out << inst.n_sites << "\n";
  char buf[64];
  for (const auto& e : inst.edges) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", e.i, e.j, e.coupling);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "h %.17g\n", inst.field);
  out << buf;
  std::snprintf(buf, sizeof buf, "gamma %.17g\n", inst.transverse);
  out << buf;
}

AnnealingModel build_lz(double h, double alpha) {
  if (!(h > 0.0)) throw UsageError("build_lz: h must be positive");
  if (alpha == 0.0) throw UsageError("build_lz: alpha must be nonzero");
  ComplexMatrix kin(2, 2), pot(2, 2);
  kin << -0.5 * h, -alpha, -alpha, 0.5 * h;
  pot << 0.5 * h, -alpha, -alpha, -0.5 * h;
  HermitianMatrix h_kin(kin), h_pot(pot);
  const auto kin_eig = eigh(h_kin);
  ComplexVector psi0 = kin_eig.eigenvectors.col(0);
  char label[64];
  std::snprintf(label, sizeof label, "lz:h=%g,alpha=%g", h, alpha);
  return finish_model(std::move(h_kin), std::move(h_pot), std::move(psi0), label);
}

AnnealingModel build_ising(const IsingInstance& inst) {
  if (inst.n_sites < 1 || inst.n_sites > kMaxIsingSites) {
    throw UsageError("build_ising: n_sites must be in [1," +
                     std::to_string(kMaxIsingSites) + "], got " +
                     std::to_string(inst.n_sites));
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& e : inst.edges) {
    if (e.i < 0 || e.i >= inst.n_sites || e.j < 0 || e.j >= inst.n_sites) {
      throw UsageError("build_ising: edge endpoint out of range");
    }
    if (e.i == e.j) throw UsageError("build_ising: self-loop on site " + std::to_string(e.i));
    const auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second) {
      throw UsageError("build_ising: duplicate edge (" + std::to_string(e.i) + "," +
                       std::to_string(e.j) + ")");
    }
  }

  const int n = inst.n_sites;
  const int dim = 1 << n;
  // Site i maps to bit (n-1-i), so site 0 is the most significant bit
  // (plain Kronecker order); spin s_i = +1 when the bit is 0.
  auto spin = [n](int basis, int site) {
    return ((basis >> (n - 1 - site)) & 1) ? -1.0 : 1.0;
  };

  ComplexMatrix pot = ComplexMatrix::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    double e = 0.0;
    for (const auto& edge : inst.edges) e -= edge.coupling * spin(b, edge.i) * spin(b, edge.j);
    for (int i = 0; i < n; ++i) e -= inst.field * spin(b, i);
    pot(b, b) = e;
  }

  ComplexMatrix kin = ComplexMatrix::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    for (int i = 0; i < n; ++i) {
      kin(b ^ (1 << (n - 1 - i)), b) -= inst.transverse;
    }
  }

  ComplexVector psi0 = ComplexVector::Constant(dim, Complex(1.0 / std::sqrt(dim), 0.0));
  char label[96];
  std::snprintf(label, sizeof label, "ising:n=%d,h=%g,gamma=%g", n, inst.field,
                inst.transverse);
  return finish_model(HermitianMatrix(std::move(kin)), HermitianMatrix(std::move(pot)),
                      std::move(psi0), label);
}

AnnealingModel build_grover(int n_items) {
  if (n_items < 2 || n_items > kMaxGroverItems) {
    throw UsageError("build_grover: N must be in [2," + std::to_string(kMaxGroverItems) +
                     "], got " + std::to_string(n_items));
  }
  const int n = n_items;
  ComplexMatrix pot = ComplexMatrix::Identity(n, n);
  pot(0, 0) = 0.0;  // marked state fixed at index 0
  ComplexMatrix kin =
      ComplexMatrix::Identity(n, n) - ComplexMatrix::Constant(n, n, Complex(1.0 / n, 0.0));
  ComplexVector psi0 = ComplexVector::Constant(n, Complex(1.0 / std::sqrt(n), 0.0));
  return finish_model(HermitianMatrix(std::move(kin)), HermitianMatrix(std::move(pot)),
                      std::move(psi0), "grover:N=" + std::to_string(n));
}

AnnealingModel build_grover_reduced(int n_items) {
  if (n_items < 2) throw UsageError("build_grover_reduced: N must be >= 2");
  const double n = n_items;
  // Basis: {|marked>, |unmarked-uniform>}.
  const double a = 1.0 / std::sqrt(n);
  const double b = std::sqrt((n - 1.0) / n);
  ComplexMatrix pot(2, 2), kin(2, 2);
  pot << 0.0, 0.0, 0.0, 1.0;
  kin << 1.0 - a * a, -a * b, -a * b, 1.0 - b * b;
  ComplexVector psi0(2);
  psi0 << a, b;
  return finish_model(HermitianMatrix(std::move(kin)), HermitianMatrix(std::move(pot)),
                      std::move(psi0), "grover_reduced:N=" + std::to_string(n_items));
}

HermitianMatrix interpolate(const AnnealingModel& model, const Schedule& sched, double s) {
  const double f = sched.value(s);
  return HermitianMatrix((1.0 - f) * model.h_kin.entries() + f * model.h_pot.entries());
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_kv_list(const std::string& text,
                                                               const std::string& what) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError(what + ": expected key=value, got '" + item + "'");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

double to_double(const std::string& v, const std::string& what) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw UsageError(what + ": bad number '" + v + "'");
  }
}

}  // namespace

AnnealingModel parse_model(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "lz") {
    double h = 0.0, alpha = 0.0;
    bool have_h = false, have_a = false;
    for (const auto& [k, v] : parse_kv_list(rest, "model lz")) {
      if (k == "h") {
        h = to_double(v, "model lz h");
        have_h = true;
      } else if (k == "alpha") {
        alpha = to_double(v, "model lz alpha");
        have_a = true;
      } else {
        throw UsageError("model lz: unknown key '" + k + "'");
      }
    }
    if (!have_h || !have_a) throw UsageError("model lz: need h=<v>,alpha=<v>");
    return build_lz(h, alpha);
  }
  if (kind == "ising") {
    std::string file, grid;
    std::uint64_t seed = 0;
    bool have_seed = false;
    double h = 0.0, gamma = 0.0;
    bool have_h = false, have_g = false;
    for (const auto& [k, v] : parse_kv_list(rest, "model ising")) {
      if (k == "file") {
        file = v;
      } else if (k == "grid") {
        grid = v;
      } else if (k == "seed") {
        try {
          seed = std::stoull(v);
        } catch (...) {
          throw UsageError("model ising: bad seed '" + v + "'");
        }
        have_seed = true;
      } else if (k == "h") {
        h = to_double(v, "model ising h");
        have_h = true;
      } else if (k == "gamma") {
        gamma = to_double(v, "model ising gamma");
        have_g = true;
      } else {
        throw UsageError("model ising: unknown key '" + k + "'");
      }
    }
    if (!file.empty()) {
      return build_ising(load_ising_instance(file));
    }
    if (grid == "3x3") {
      if (!have_seed || !have_h || !have_g) {
        throw UsageError("model ising: grid form needs grid=3x3,seed=<n>,h=<v>,gamma=<v>");
      }
      return build_ising(ising_grid_3x3(seed, h, gamma));
    }
    throw UsageError("model ising: need file=<path> or grid=3x3,...");
  }
  if (kind == "grover") {
    for (const auto& [k, v] : parse_kv_list(rest, "model grover")) {
      if (k == "N") {
        try {
          return build_grover(std::stoi(v));
        } catch (const UsageError&) {
          throw;
        } catch (...) {
          throw UsageError("model grover: bad N '" + v + "'");
        }
      }
      throw UsageError("model grover: unknown key '" + k + "'");
    }
    throw UsageError("model grover: need N=<n>");
  }
  throw UsageError("model: unknown kind '" + kind + "' (expected lz|ising|grover)");
}

}  // namespace annealbench
