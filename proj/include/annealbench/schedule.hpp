#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace annealbench {

/// An annealing schedule: a smooth monotone map f:[0,1] -> [0,1] with
/// f(0)=0, f(1)=1 and analytic derivatives up to max_order().
///
/// Built-in families:
///   polynomial_schedule(m)      boundary-flat polynomial, m = 1..4
///   cosine_sq_schedule()        (1 - cos(pi s^2)) / 2
///   grover_optimal_schedule(N)  gap-adapted search schedule
///   compose(outer, inner)       outer(inner(s)), chain-rule derivatives
///
/// Value semantics; cheap to copy; immutable and thread-safe.
class Schedule {
 public:
  class Kernel;

  /// f(s). Throws UsageError when s is outside [0,1].
  double value(double s) const;

  /// d^order f / ds^order, analytic. order in [1, max_order()].
  double derivative(double s, int order) const;

  /// Highest derivative order available analytically.
  int max_order() const;

  /// Canonical name, e.g. "f2", "cossq", "opt:64", "opt2:64".
  const std::string& name() const;

  explicit Schedule(std::shared_ptr<const Kernel> kernel);

 private:
  std::shared_ptr<const Kernel> kernel_;
};

Schedule polynomial_schedule(int m);
Schedule cosine_sq_schedule();
Schedule grover_optimal_schedule(int n_items);
Schedule compose(const Schedule& outer, const Schedule& inner);

/// True iff f^(k)(0) = f^(k)(1) = 0 for all k = 1..m-1 (|.| <= 1e-10).
/// Requires m <= max_order().
bool check_flatness(const Schedule& sched, int m);

/// Parses a schedule token: f1|f2|f3|f4|cossq|opt:<N>|opt<m>:<N>,
/// where opt<m>:<N> composes the N-item optimal schedule with f_m.
Schedule parse_schedule(std::string_view token);

}  // namespace annealbench
