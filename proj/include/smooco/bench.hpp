#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smooco/baselines.hpp"
#include "smooco/core.hpp"
#include "smooco/plan.hpp"
#include "smooco/predict.hpp"
#include "smooco/solve.hpp"
#include "smooco/traffic.hpp"

namespace smooco {

struct SolverConfig {
  // Window solver for the planning algorithms: "auto" picks exact DP when
  // m^k fits dp_state_limit and the iterative solver otherwise.
  std::string window_solver = "auto";  // auto | dp | iterative
  SubproblemStrategy subproblem = SubproblemStrategy::kEnumerate;
  int passes = 10;
  double relax_c = 0.5;
  std::int64_t enumeration_limit = 60000;
  std::int64_t dp_state_limit = 1024;
  int local_restarts = 5;
  // FTL's per-step argmin over aggregated history: "auto" enumerates on
  // small instances and falls back to local search at scale.
  std::string ftl_strategy = "auto";  // auto | enumerate | local

  void validate() const;
};

struct ExperimentConfig {
  int k = 10;
  int m = 3;
  double unit_cost_low = 0.0;
  double unit_cost_high = 2.0;
  int warmup = 50;
  int online_steps = 100;
  int trials = 10;
  int benchmark_chunk = 5;
  std::vector<std::string> algorithms = {"dynamic", "short-term", "long-term",
                                         "static",  "ogd",        "ftl",
                                         "ftp"};
  TrafficGenConfig traffic;  // k/horizon/seed are overridden per trial
  RationalQuadraticKernel predictor_kernel = {1.0, 5.0, 1.0, 0.1};
  double predictor_z = 1.0;
  SolverConfig solver;
  int s_max = 20;
  int short_window = 1;
  int long_window = 10;
  std::optional<double> ogd_eta0;
  std::uint64_t master_seed = 1;
  int workers = 1;

  void validate() const;
};

// Per-step regret accounting against the offline benchmark. The cumulative
// total is accumulated as the sum of the two cumulative parts, so the
// decomposition identity holds to the last bit.
struct LedgerRow {
  int t = 0;  // online-local, 1-based
  double imbalance = 0.0;
  double switching = 0.0;
  double bench_imbalance = 0.0;
  double bench_switching = 0.0;
  double cum_regret = 0.0;
  double cum_imb_regret = 0.0;
  double cum_sw_regret = 0.0;
};

struct RegretLedger {
  std::vector<LedgerRow> rows;
};

// Chunked full-information proxy for the offline optimum: consecutive
// blocks of `chunk` steps, each solved exactly (DP) when m^k fits the state
// limit and by the iterative solver with enumeration otherwise, chaining
// final assignments across blocks.
PlanResult offline_benchmark(const TrafficSeries& traffic, const Assignment& x0,
                             const ProblemShape& shape, int chunk,
                             const SolverConfig& solver);

RegretLedger cumulative_regret(const std::vector<Assignment>& alg_decisions,
                               const std::vector<Assignment>& bench_decisions,
                               const std::vector<TrafficVector>& traffic,
                               const Assignment& x0, const ProblemShape& shape);

struct AlgorithmRun {
  std::string algorithm;
  bool failed = false;
  std::string error;
  std::vector<Assignment> decisions;
  WindowTrace trace;
  RegretLedger ledger;
};

struct TrialResult {
  int trial = 0;
  bool failed = false;  // traffic or benchmark construction failed
  std::string error;
  ProblemShape shape;
  Assignment x0;
  TrafficSeries traffic;
  PlanResult benchmark;
  std::vector<AlgorithmRun> runs;
};

struct SummaryRow {
  std::string algorithm;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  int trials = 0;
};

struct ExperimentResult {
  std::vector<TrialResult> trials;
  std::vector<SummaryRow> summary;
  int failures = 0;  // failed (trial, algorithm) pairs incl. failed trials
};

// All randomness per trial is derived from (master_seed, trial index) and
// algorithm names, never from execution order: trials are reproducible in
// isolation and independent of worker count.
TrialResult run_single_trial(const ExperimentConfig& config, int trial_index);
ExperimentResult run_experiment(const ExperimentConfig& config);

struct SweepRow {
  std::string strategy;
  int size = 0;
  double mean_regret = 0.0;
  double std_regret = 0.0;
  double mean_solve_time = 0.0;  // per committed window, seconds
  int trials = 0;
  int failures = 0;
};

std::vector<SweepRow> sweep_windows(const ExperimentConfig& config,
                                    const std::vector<int>& sizes,
                                    const std::vector<std::string>& strategies);

std::vector<std::string> steps_csv_lines(const ExperimentResult& result);
std::vector<std::string> summary_csv_lines(const ExperimentResult& result);
std::vector<std::string> sweep_csv_lines(const std::vector<SweepRow>& rows);

// Deterministic static scheduling helper shared by the harness and the
// verification suites; with workers <= 1 runs inline.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace smooco
