#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smooco/rng.hpp"

namespace smooco {

// Forecast error model eps^(t)_{t+s-1} = scale * s^a / t^b: window offset s
// (1-based) grows the error, planning time t shrinks it.
struct UncertaintySchedule {
  double a = 0.0;
  double b = 0.0;
  double scale = 1.0;

  void validate() const;
  double eval(std::int64_t t, std::int64_t s) const;
};

// Worst-case regret of one planned window: 2 * L * total uncertainty.
double window_regret_bound(double L, const std::vector<double>& eps);

// Worst-case total regret across I restarts: 2 * B * I.
double total_regret_bound(double B, std::int64_t I);

struct RecursionResult {
  std::int64_t count = 0;               // number of windows started within [1, T]
  std::vector<std::int64_t> starts;     // window start times, starts[0] = 1
};

// Replays the window-size rule against a closed-form schedule: T_1 = 1,
// S_i = select_window at t = T_i (no artificial cap), T_{i+1} = T_i + S_i,
// until the next start passes T. The last window may overshoot T.
RecursionResult simulate_window_recursion(const UncertaintySchedule& schedule, double L,
                                          double B, std::int64_t T);

// One-dimensional adversarial stream: theta_t = 1/2 +- delta(t) with i.i.d.
// fair signs, delta(t) = min(t^-b, 1/2), decisions in {0,1}, cost
// L*|x - theta|, no switching cost. The best prediction knows only the
// midpoint, so any rule measurable w.r.t. the past pays L/2 per step in
// expectation while the clairvoyant pays L*(1/2 - delta(t)).
struct LowerBoundInstance {
  double b = 0.5;
  double L = 1.0;
  int T = 1000;

  double delta(int t) const;
  double theta(int t, bool up) const;
  double prediction() const { return 0.5; }
  double uncertainty(int t) const;  // |theta_t - prediction| = delta(t)
  double step_cost(int x, double theta_t) const;
  double clairvoyant_step(int t) const;
  double clairvoyant_total() const;
  double expected_regret() const;  // L * sum_t delta(t), exact
};

enum class LowerBoundRule { kStatic, kOgd, kFtl, kFtp, kShortTerm, kLongTerm, kDynamic };

const std::vector<std::pair<std::string, LowerBoundRule>>& lower_bound_rules();

// Realized regret of one rule on one sampled sign path.
double lower_bound_regret(const LowerBoundInstance& instance, LowerBoundRule rule, Rng& rng);

// One row of the verification report.
struct CheckRow {
  std::string check;
  std::int64_t instances = 0;
  std::int64_t violations = 0;
  double max_slack = 0.0;  // worst (measured - bound); <= 0 means all held
  std::optional<double> slope;
  std::optional<double> slope_target;
};

std::vector<std::string> check_csv_lines(const std::vector<CheckRow>& rows);

// Planned-window regret bound, checked on random small instances with
// known-accuracy predictions and exact solvers on both sides.
CheckRow verify_window_bound(int instances, std::uint64_t seed);

// Restart-count regret bound on full adaptive runs against the exact
// full-horizon optimum.
CheckRow verify_restart_bound(int runs, std::uint64_t seed);

// Exact plans must be fixed points of the per-step re-solve at c=1.
CheckRow verify_fixed_point(int instances, std::uint64_t seed);

// Window-count growth exponents for the schedule regimes.
CheckRow verify_rates(double a, double b);

// Every implemented decision rule pays the unavoidable expected regret on
// the adversarial stream, within a Monte-Carlo band.
std::vector<CheckRow> verify_lower_bound(int seeds, std::uint64_t seed);

}  // namespace smooco
