#pragma once

#include <string>
#include <utility>
#include <vector>

#include "smooco/core.hpp"
#include "smooco/rng.hpp"
#include "smooco/solve.hpp"

namespace smooco::testing {

ProblemShape random_shape(Rng& rng, int k, int m, double u_lo, double u_hi);
TrafficVector random_theta(Rng& rng, int k, double lo, double hi);
std::vector<TrafficVector> random_thetas(Rng& rng, int k, int steps, double lo,
                                         double hi);
Assignment random_assignment(Rng& rng, int k, int m);

// Exhaustive optimum over all m^(k*S) assignment sequences, accumulated in
// plan_cost order so costs compare bitwise against the DP. Ties go to the
// lexicographically smallest sequence of encodings.
PlanResult brute_force_plan(const PlanningProblem& problem);

// Exhaustive minimum of the weighted single-step objective: sum_j w_j *
// makespan(x, theta_j) + c*d(left, x) [+ c*d(x, right)]. Smallest encoding
// wins ties, mirroring the production subsolver's contract.
std::pair<Assignment, double> brute_force_subproblem(
    const std::vector<WeightedTheta>& theta_terms, const Assignment& left,
    const Assignment* right, double c, const ProblemShape& shape);

// Subprocess + filesystem helpers for tests that drive the real CLI binary.
struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CommandResult run_command(const std::string& command);
std::string shell_quote(const std::string& s);
std::string read_file(const std::string& path);
std::string make_temp_dir(const std::string& tag);

}  // namespace smooco::testing
