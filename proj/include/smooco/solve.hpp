#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smooco/core.hpp"

#include "json.hpp"

namespace smooco {

// Finite-horizon instance: choose x_1..x_S minimizing
//   sum_t makespan(x_t, thetas[t]) + switching_cost(x_{t-1}, x_t)
// with x_0 = initial. thetas may be true traffic or a forecast.
struct PlanningProblem {
  ProblemShape shape;
  std::vector<TrafficVector> thetas;
  Assignment initial;

  void validate() const;
};

struct PlanResult {
  std::vector<Assignment> assignments;
  double total_cost = 0.0;
  std::string solver_tag;
  double solve_time = 0.0;  // seconds
};

void to_json(nlohmann::json& j, const PlanningProblem& p);
void from_json(const nlohmann::json& j, PlanningProblem& p);

double plan_cost(const std::vector<Assignment>& assignments,
                 const std::vector<TrafficVector>& thetas,
                 const Assignment& initial, const ProblemShape& shape);

enum class SubproblemStrategy { kEnumerate, kLocal };

struct WeightedTheta {
  double weight = 1.0;
  TrafficVector theta;
};

struct SubproblemOptions {
  SubproblemStrategy strategy = SubproblemStrategy::kEnumerate;
  std::int64_t enumeration_limit = 60000;
  int local_restarts = 5;
  std::uint64_t seed = 0;  // restart draws for the local strategy
};

// Minimizes sum_j weight_j * makespan(x, theta_j) + c*d(x, left)
// (+ c*d(x, right) when a right neighbor is given). `enumerate` scans all
// m^k assignments in encoding order; `local` runs best-improvement
// single-topic moves from `left` plus local_restarts random starts. Ties go
// to the smallest assignment encoding.
Assignment solve_subproblem(const std::vector<WeightedTheta>& theta_terms,
                            const Assignment& left, const Assignment* right,
                            double c, const ProblemShape& shape,
                            const SubproblemOptions& options);

struct IterativeOptions {
  int passes = 10;
  double relax_c = 0.5;
  SubproblemOptions sub;
  // Called after each accepted final-pass update with the true plan cost;
  // test hook for the monotonicity guarantee.
  std::function<void(int t, double cost)> on_final_update;
};

// Coordinate descent over time steps: every pass sweeps t=1..S re-solving
// step t with its neighbors frozen. Passes before the last use the relaxed
// neighbor weight relax_c (half-counting each switch, since adjacent steps
// share it); the final pass uses c=1, whose per-step objective change equals
// the true total-cost change. Updates apply only when the swept step's local
// objective does not increase, which keeps the final pass monotone in the
// true cost even with the inexact local subsolver.
PlanResult iterative_plan(const PlanningProblem& problem, const IterativeOptions& options);

// Exact optimum by dynamic programming with one state per assignment.
// Requires m^k <= dp_state_limit. Accumulates per-step (makespan + switch)
// in the same order as plan_cost, so returned costs are directly comparable
// to enumerated plan costs without tolerance.
PlanResult exact_plan_dp(const PlanningProblem& problem, std::int64_t dp_state_limit = 1024);

struct FixedPointReport {
  bool fixed = true;
  int t = 0;             // 1-based step of the first improvement, if any
  Assignment improving;  // the improving assignment, if any
};

// Checks whether no single step can strictly improve its c=1 local objective
// with both neighbors held fixed. Improvements smaller than a 1e-9 relative
// tolerance are ignored; they are float noise, not real descent directions.
FixedPointReport is_fixed_point(const PlanningProblem& problem,
                                const std::vector<Assignment>& assignments,
                                std::int64_t enumeration_limit = 60000);

}  // namespace smooco
