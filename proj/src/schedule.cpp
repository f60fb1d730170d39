#include "annealbench/schedule.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "annealbench/errors.hpp"

namespace annealbench {

namespace {

constexpr int kMaxOrder = 6;
constexpr double kEndpointTol = 1e-14;
constexpr int kValidationGrid = 10000;

// Dense polynomial, coefficient k multiplies x^k.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<double> c) : c_(std::move(c)) { trim(); }
  static Poly constant(double v) { return Poly({v}); }

  double eval(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<double> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return Poly(std::move(d));
  }

  Poly times_x() const {
    if (c_.empty()) return Poly();
    std::vector<double> d(c_.size() + 1, 0.0);
    for (size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k];
    return Poly(std::move(d));
  }

  Poly scaled(double a) const {
    std::vector<double> d = c_;
    for (double& v : d) v *= a;
    return Poly(std::move(d));
  }

  void add(const Poly& other) {
    if (other.c_.size() > c_.size()) c_.resize(other.c_.size(), 0.0);
    for (size_t k = 0; k < other.c_.size(); ++k) c_[k] += other.c_[k];
    trim();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }
  std::vector<double> c_;
};

// Binomial coefficients up to the derivative-order cap.
double binom(int n, int k) {
  static const auto table = [] {
    std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1> t{};
    for (int i = 0; i <= kMaxOrder; ++i) {
      t[i][0] = 1.0;
      for (int j = 1; j <= i; ++j)
        t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0.0);
    }
    return t;
  }();
  return table[n][k];
}

// Partial Bell polynomials B_{n,k}(x_1..x_{n-k+1}) via the standard
// recurrence; used for the chain rule of composed schedules.
double bell(int n, int k, const std::array<double, kMaxOrder + 1>& x) {
  if (n == 0 && k == 0) return 1.0;
  if (n == 0 || k == 0) return 0.0;
  double acc = 0.0;
  for (int i = 1; i <= n - k + 1; ++i) {
    acc += binom(n - 1, i - 1) * x[i] * bell(n - i, k - 1, x);
  }
  return acc;
}

}  // namespace

class Schedule::Kernel {
 public:
  Kernel(std::string name, int max_order) : name_(std::move(name)), max_order_(max_order) {}
  virtual ~Kernel() = default;
  virtual double value(double s) const = 0;
  virtual double derivative(double s, int order) const = 0;
  const std::string& name() const { return name_; }
  int max_order() const { return max_order_; }

 private:
  std::string name_;
  int max_order_;
};

namespace {

using KernelPtr = std::shared_ptr<const Schedule::Kernel>;

class PolynomialKernel final : public Schedule::Kernel {
 public:
  PolynomialKernel(std::string name, Poly p) : Kernel(std::move(name), kMaxOrder) {
    derivs_[0] = std::move(p);
    for (int k = 1; k <= kMaxOrder; ++k) derivs_[k] = derivs_[k - 1].derivative();
  }
  double value(double s) const override { return derivs_[0].eval(s); }
  double derivative(double s, int order) const override { return derivs_[order].eval(s); }

 private:
  std::array<Poly, kMaxOrder + 1> derivs_;
};

// f(s) = (1 - cos(pi s^2)) / 2. Every derivative has the closed form
// A_k(s) cos(pi s^2) + B_k(s) sin(pi s^2) with polynomial A_k, B_k,
// generated by differentiating that representation once per order.
class CosineSqKernel final : public Schedule::Kernel {
 public:
  CosineSqKernel() : Kernel("cossq", kMaxOrder) {
    Poly a = Poly::constant(-0.5);
    Poly b;
    for (int k = 1; k <= kMaxOrder; ++k) {
      // (A cos g + B sin g)' = (A' + g' B) cos g + (B' - g' A) sin g,
      // with g = pi s^2, g' = 2 pi s.
      Poly na = a.derivative();
      na.add(b.times_x().scaled(2.0 * M_PI));
      Poly nb = b.derivative();
      nb.add(a.times_x().scaled(-2.0 * M_PI));
      a_[k] = na;
      b_[k] = nb;
      a = std::move(na);
      b = std::move(nb);
    }
  }
  double value(double s) const override { return 0.5 * (1.0 - std::cos(M_PI * s * s)); }
  double derivative(double s, int order) const override {
    const double g = M_PI * s * s;
    return a_[order].eval(s) * std::cos(g) + b_[order].eval(s) * std::sin(g);
  }

 private:
  std::array<Poly, kMaxOrder + 1> a_, b_;
};

// f(s) = 1/2 + (2s-1) / (2 sqrt(N - (N-1)(2s-1)^2)).
//
// With u = 2s-1 and D(u) = N - (N-1) u^2, the first derivative collapses
// to f' = N D^{-3/2}. Writing f^(k) = sum_j P_j(u) D^{-(2j+1)/2} with
// polynomial P_j, one s-derivative maps
//   P_j -> 2 P_j'              (same j)
//        + 2(2j+1)(N-1) u P_j  (at j+1)
// which keeps every order exact. D >= 1 on [0,1], so no singularities.
class GroverOptimalKernel final : public Schedule::Kernel {
 public:
  explicit GroverOptimalKernel(int n_items)
      : Kernel("opt:" + std::to_string(n_items), kMaxOrder), n_(n_items) {
    std::map<int, Poly> terms;
    terms[1] = Poly::constant(static_cast<double>(n_));
    derivs_[1] = terms;
    for (int k = 2; k <= kMaxOrder; ++k) {
      std::map<int, Poly> next;
      for (const auto& [j, p] : terms) {
        Poly dp = p.derivative().scaled(2.0);
        next[j].add(dp);
        const double c = 2.0 * (2 * j + 1) * (n_ - 1);
        next[j + 1].add(p.times_x().scaled(c));
      }
      derivs_[k] = next;
      terms = std::move(next);
    }
  }

  double value(double s) const override {
    const double u = 2.0 * s - 1.0;
    const double d = n_ - (n_ - 1.0) * u * u;
    return 0.5 + u / (2.0 * std::sqrt(d));
  }

  double derivative(double s, int order) const override {
    const double u = 2.0 * s - 1.0;
    const double d = n_ - (n_ - 1.0) * u * u;
    const double rsqrt = 1.0 / std::sqrt(d);
    double acc = 0.0;
    for (const auto& [j, p] : derivs_[order]) {
      acc += p.eval(u) * rsqrt * std::pow(1.0 / d, j);
    }
    return acc;
  }

 private:
  int n_;
  std::array<std::map<int, Poly>, kMaxOrder + 1> derivs_;
};

class ComposedKernel final : public Schedule::Kernel {
 public:
  ComposedKernel(std::string name, KernelPtr outer, KernelPtr inner, int max_order)
      : Kernel(std::move(name), max_order), outer_(std::move(outer)), inner_(std::move(inner)) {}

  double value(double s) const override {
    // Inner values can overshoot [0,1] by an ulp; clamp before the outer map.
    const double g = std::clamp(inner_->value(s), 0.0, 1.0);
    return outer_->value(g);
  }

  double derivative(double s, int order) const override {
    // Faa di Bruno: h^(n) = sum_k f^(k)(g) B_{n,k}(g', ..., g^(n-k+1)).
    const double g = std::clamp(inner_->value(s), 0.0, 1.0);
    std::array<double, kMaxOrder + 1> gd{};
    for (int i = 1; i <= order; ++i) gd[i] = inner_->derivative(s, i);
    double acc = 0.0;
    for (int k = 1; k <= order; ++k) {
      acc += outer_->derivative(g, k) * bell(order, k, gd);
    }
    return acc;
  }

 private:
  KernelPtr outer_, inner_;
};

// Construction-time contract: exact endpoints, range [0,1] and
// monotonicity on a dense grid.
void validate(const Schedule::Kernel& k) {
  if (std::abs(k.value(0.0)) > kEndpointTol || std::abs(k.value(1.0) - 1.0) > kEndpointTol) {
    throw UsageError("schedule '" + k.name() + "': endpoints f(0)=0, f(1)=1 violated");
  }
  double prev = 0.0;
  for (int i = 0; i <= kValidationGrid; ++i) {
    const double s = static_cast<double>(i) / kValidationGrid;
    const double v = k.value(s);
    if (v < -1e-12 || v > 1.0 + 1e-12) {
      throw UsageError("schedule '" + k.name() + "': value outside [0,1] at s=" +
                       std::to_string(s));
    }
    if (i > 0 && v < prev - 1e-12) {
      throw UsageError("schedule '" + k.name() + "': not monotone at s=" +
                       std::to_string(s));
    }
    prev = v;
  }
}

Schedule make(KernelPtr kernel) {
  validate(*kernel);
  return Schedule(std::move(kernel));
}

}  // namespace

Schedule::Schedule(std::shared_ptr<const Kernel> kernel) : kernel_(std::move(kernel)) {}

double Schedule::value(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw UsageError("schedule '" + name() + "': s=" + std::to_string(s) +
                     " outside [0,1]");
  }
  return kernel_->value(s);
}

double Schedule::derivative(double s, int order) const {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw UsageError("schedule '" + name() + "': s=" + std::to_string(s) +
                     " outside [0,1]");
  }
  if (order < 1 || order > kernel_->max_order()) {
    throw UsageError("schedule '" + name() + "': derivative order " +
                     std::to_string(order) + " outside [1," +
                     std::to_string(kernel_->max_order()) + "]");
  }
  return kernel_->derivative(s, order);
}

int Schedule::max_order() const { return kernel_->max_order(); }
const std::string& Schedule::name() const { return kernel_->name(); }

Schedule polynomial_schedule(int m) {
  switch (m) {
    case 1:
      return make(std::make_shared<PolynomialKernel>("f1", Poly({0, 1})));
    case 2:
      return make(std::make_shared<PolynomialKernel>("f2", Poly({0, 0, 3, -2})));
    case 3:
      return make(std::make_shared<PolynomialKernel>("f3", Poly({0, 0, 0, 10, -15, 6})));
    case 4:
      return make(std::make_shared<PolynomialKernel>("f4", Poly({0, 0, 0, 0, 35, -84, 70, -20})));
    default:
      throw UsageError("polynomial_schedule: m must be 1..4, got " + std::to_string(m));
  }
}

Schedule cosine_sq_schedule() { return make(std::make_shared<CosineSqKernel>()); }

Schedule grover_optimal_schedule(int n_items) {
  if (n_items < 2) {
    throw UsageError("grover_optimal_schedule: N must be >= 2, got " +
                     std::to_string(n_items));
  }
  return make(std::make_shared<GroverOptimalKernel>(n_items));
}

Schedule compose(const Schedule& outer, const Schedule& inner) {
  const int order = std::min(outer.max_order(), inner.max_order());
  class Wrap final : public Schedule::Kernel {
   public:
    Wrap(const Schedule& s) : Kernel(s.name(), s.max_order()), s_(s) {}
    double value(double x) const override { return s_.value(x); }
    double derivative(double x, int k) const override { return s_.derivative(x, k); }

   private:
    Schedule s_;
  };
  auto kernel = std::make_shared<ComposedKernel>(
      outer.name() + "(" + inner.name() + ")", std::make_shared<Wrap>(outer),
      std::make_shared<Wrap>(inner), order);
  return make(kernel);
}

bool check_flatness(const Schedule& sched, int m) {
  if (m > sched.max_order()) {
    throw UsageError("check_flatness: m=" + std::to_string(m) +
                     " exceeds analytic order " + std::to_string(sched.max_order()));
  }
  constexpr double tol = 1e-10;
  for (int k = 1; k <= m - 1; ++k) {
    if (std::abs(sched.derivative(0.0, k)) > tol) return false;
    if (std::abs(sched.derivative(1.0, k)) > tol) return false;
  }
  return true;
}

namespace {

int parse_positive_int(std::string_view text, const std::string& what) {
  if (text.empty()) throw UsageError("schedule: missing " + what);
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw UsageError("schedule: bad " + what + " '" + std::string(text) + "'");
    value = value * 10 + (c - '0');
    if (value > 1 << 26) throw UsageError("schedule: " + what + " out of range");
  }
  return value;
}

}  // namespace

Schedule parse_schedule(std::string_view token) {
  if (token == "cossq") return cosine_sq_schedule();
  if (token.size() == 2 && token[0] == 'f' && token[1] >= '1' && token[1] <= '4') {
    return polynomial_schedule(token[1] - '0');
  }
  if (token.rfind("opt", 0) == 0) {
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw UsageError("schedule: expected opt:<N> or opt<m>:<N>, got '" +
                       std::string(token) + "'");
    }
    const auto head = token.substr(3, colon - 3);
    const int n = parse_positive_int(token.substr(colon + 1), "N");
    if (head.empty()) {
      // Keep the canonical token as the name.
      return grover_optimal_schedule(n);
    }
    if (head.size() == 1 && head[0] >= '1' && head[0] <= '4') {
      const int m = head[0] - '0';
      Schedule composed = compose(grover_optimal_schedule(n), polynomial_schedule(m));
      // Rename to the canonical CLI token.
      class Renamed final : public Schedule::Kernel {
       public:
        Renamed(std::string name, Schedule s)
            : Kernel(std::move(name), s.max_order()), s_(std::move(s)) {}
        double value(double x) const override { return s_.value(x); }
        double derivative(double x, int k) const override { return s_.derivative(x, k); }

       private:
        Schedule s_;
      };
      return Schedule(std::make_shared<Renamed>(
          "opt" + std::string(head) + ":" + std::to_string(n), composed));
    }
    throw UsageError("schedule: bad opt modifier in '" + std::string(token) + "'");
  }
  throw UsageError("schedule: unknown token '" + std::string(token) +
                   "' (expected f1|f2|f3|f4|cossq|opt:<N>|opt<m>:<N>)");
}

}  // namespace annealbench
