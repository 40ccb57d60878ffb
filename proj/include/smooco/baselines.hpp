#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "smooco/core.hpp"
#include "smooco/plan.hpp"
#include "smooco/solve.hpp"

namespace smooco {

// Row-stochastic relaxation of an assignment: matrix[i*m + j] is the weight
// of topic i on server j. OGD's continuous iterate.
struct RelaxedAssignment {
  int k = 0;
  int m = 0;
  std::vector<double> matrix;

  static RelaxedAssignment one_hot(const Assignment& x, int m);

  double at(int i, int j) const { return matrix[static_cast<size_t>(i) * m + j]; }
  void validate() const;  // rows sum to 1 within 1e-9, entries in [0,1]

  // Row argmax; ties go to the lowest server index.
  Assignment round() const;
};

// Euclidean projection onto {p >= 0, sum p = 1} by the sorted-threshold
// method.
std::vector<double> project_row_simplex(const std::vector<double>& v);

// Subgradient of the relaxed makespan X -> max_j sum_i X_{ij} theta_i:
// theta in the column of the (lowest-index) maximally loaded server, zero
// elsewhere. Returned row-major k x m.
std::vector<double> makespan_subgradient(const RelaxedAssignment& X, const TrafficVector& theta);

struct OgdOptions {
  // Step size eta_t = eta0 / sqrt(t) with t the 1-based online step. Unset
  // means 0.1 * m / mean(revealed warmup traffic).
  std::optional<double> eta0;
};

std::unique_ptr<Policy> make_static_policy();
std::unique_ptr<Policy> make_ogd_policy(const OgdOptions& options = {});
// FTL minimizes the sum of all observed online makespans plus the switch
// from the previous decision; FTP keeps only the latest makespan.
std::unique_ptr<Policy> make_ftl_policy(const SubproblemOptions& sub = {});
std::unique_ptr<Policy> make_ftp_policy(const SubproblemOptions& sub = {});

RunOutput static_run(const TrafficSeries& traffic, int t_start, int online_steps,
                     const ProblemShape& shape, const Assignment& x0);
RunOutput ogd_run(const TrafficSeries& traffic, int t_start, int online_steps,
                  const ProblemShape& shape, const Assignment& x0,
                  const OgdOptions& options = {});
RunOutput ftl_run(const TrafficSeries& traffic, int t_start, int online_steps,
                  const ProblemShape& shape, const Assignment& x0,
                  const SubproblemOptions& sub = {});
RunOutput ftp_run(const TrafficSeries& traffic, int t_start, int online_steps,
                  const ProblemShape& shape, const Assignment& x0,
                  const SubproblemOptions& sub = {});

}  // namespace smooco
