#include "smooco/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "smooco/csv.hpp"
#include "smooco/errors.hpp"
#include "smooco/rng.hpp"

namespace smooco {

namespace {

// Seed-derivation tags: fixed forever, reproducibility contract.
constexpr std::uint64_t kTagTrial = 101;
constexpr std::uint64_t kTagTraffic = 102;
constexpr std::uint64_t kTagUnits = 103;
constexpr std::uint64_t kTagInitial = 104;
constexpr std::uint64_t kTagAlgorithm = 105;
constexpr std::uint64_t kTagSweep = 106;

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names = {
      "dynamic", "short-term", "long-term", "static", "ogd", "ftl", "ftp"};
  return names;
}

}  // namespace

void SolverConfig::validate() const {
  if (window_solver != "auto" && window_solver != "dp" && window_solver != "iterative") {
    throw ParameterError("solver: window_solver must be auto, dp or iterative");
  }
  if (ftl_strategy != "auto" && ftl_strategy != "enumerate" && ftl_strategy != "local") {
    throw ParameterError("solver: ftl_strategy must be auto, enumerate or local");
  }
  if (passes < 1) throw ParameterError("solver: passes must be >= 1");
  if (!(relax_c >= 0.0)) throw ParameterError("solver: relax_c must be >= 0");
  if (enumeration_limit < 1 || dp_state_limit < 1) {
    throw ParameterError("solver: limits must be >= 1");
  }
  if (local_restarts < 0) throw ParameterError("solver: local_restarts must be >= 0");
}

void ExperimentConfig::validate() const {
  if (k < 1) throw ParameterError("experiment: k must be >= 1");
  if (m < 1) throw ParameterError("experiment: m must be >= 1");
  if (!(unit_cost_low >= 0.0) || unit_cost_high < unit_cost_low) {
    throw ParameterError("experiment: unit cost range must satisfy 0 <= low <= high");
  }
  if (warmup < 2) throw ParameterError("experiment: warmup must be >= 2");
  if (online_steps < 1) throw ParameterError("experiment: online_steps must be >= 1");
  if (trials < 1) throw ParameterError("experiment: trials must be >= 1");
  if (benchmark_chunk < 1) throw ParameterError("experiment: benchmark_chunk must be >= 1");
  if (algorithms.empty()) throw ParameterError("experiment: no algorithms selected");
  for (const auto& name : algorithms) {
    if (std::find(known_algorithms().begin(), known_algorithms().end(), name) ==
        known_algorithms().end()) {
      throw ParameterError("experiment: unknown algorithm '" + name + "'");
    }
  }
  if (s_max < 1) throw ParameterError("experiment: s_max must be >= 1");
  if (short_window < 1 || long_window < 1) {
    throw ParameterError("experiment: window sizes must be >= 1");
  }
  if (workers < 1) throw ParameterError("experiment: workers must be >= 1");
  predictor_kernel.validate();
  solver.validate();
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int pool = std::min(workers, n);
  if (pool <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (int w = 0; w < pool; ++w) threads.emplace_back(work);
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

PlanResult offline_benchmark(const TrafficSeries& traffic, const Assignment& x0,
                             const ProblemShape& shape, int chunk,
                             const SolverConfig& solver) {
  shape.validate();
  solver.validate();
  if (chunk < 1) throw ParameterError("offline_benchmark: chunk must be >= 1");
  const int T = traffic.length();
  if (T < 1) throw ParameterError("offline_benchmark: empty traffic");

  const bool dp_ok = assignment_count(shape.k, shape.m, solver.dp_state_limit) > 0;
  PlanResult out;
  out.assignments.reserve(T);
  out.solver_tag = dp_ok ? "dp-chunked" : "iterative-chunked";

  Assignment init = x0;
  for (int start = 0; start < T; start += chunk) {
    const int size = std::min(chunk, T - start);
    PlanningProblem problem;
    problem.shape = shape;
    problem.thetas.assign(traffic.steps.begin() + start, traffic.steps.begin() + start + size);
    problem.initial = init;

    PlanResult piece;
    if (dp_ok) {
      piece = exact_plan_dp(problem, solver.dp_state_limit);
    } else {
      IterativeOptions options;
      options.passes = solver.passes;
      options.relax_c = solver.relax_c;
      options.sub.strategy = SubproblemStrategy::kEnumerate;
      options.sub.enumeration_limit = solver.enumeration_limit;
      options.sub.local_restarts = solver.local_restarts;
      piece = iterative_plan(problem, options);
    }
    out.solve_time += piece.solve_time;
    init = piece.assignments.back();
    for (auto& a : piece.assignments) out.assignments.push_back(std::move(a));
  }

  std::vector<TrafficVector> thetas(traffic.steps.begin(), traffic.steps.end());
  out.total_cost = plan_cost(out.assignments, thetas, x0, shape);
  return out;
}

RegretLedger cumulative_regret(const std::vector<Assignment>& alg_decisions,
                               const std::vector<Assignment>& bench_decisions,
                               const std::vector<TrafficVector>& traffic,
                               const Assignment& x0, const ProblemShape& shape) {
  if (alg_decisions.size() != traffic.size() || bench_decisions.size() != traffic.size()) {
    throw ShapeError("cumulative_regret: sequence length mismatch");
  }
  RegretLedger ledger;
  ledger.rows.reserve(traffic.size());
  const Assignment* prev_alg = &x0;
  const Assignment* prev_bench = &x0;
  double cum_imb = 0.0;
  double cum_sw = 0.0;
  for (size_t t = 0; t < traffic.size(); ++t) {
    LedgerRow row;
    row.t = static_cast<int>(t) + 1;
    row.imbalance = makespan(alg_decisions[t], traffic[t], shape);
    row.switching = switching_cost(*prev_alg, alg_decisions[t], shape);
    row.bench_imbalance = makespan(bench_decisions[t], traffic[t], shape);
    row.bench_switching = switching_cost(*prev_bench, bench_decisions[t], shape);
    cum_imb += row.imbalance - row.bench_imbalance;
    cum_sw += row.switching - row.bench_switching;
    row.cum_imb_regret = cum_imb;
    row.cum_sw_regret = cum_sw;
    row.cum_regret = cum_imb + cum_sw;
    ledger.rows.push_back(row);
    prev_alg = &alg_decisions[t];
    prev_bench = &bench_decisions[t];
  }
  return ledger;
}

namespace {

std::unique_ptr<WindowSolver> make_window_solver(const SolverConfig& solver,
                                                 const ProblemShape& shape,
                                                 std::uint64_t seed) {
  bool use_dp = solver.window_solver == "dp";
  if (solver.window_solver == "auto") {
    use_dp = assignment_count(shape.k, shape.m, solver.dp_state_limit) > 0;
  }
  if (use_dp) return std::make_unique<DpWindowSolver>(solver.dp_state_limit);

  IterativeOptions options;
  options.passes = solver.passes;
  options.relax_c = solver.relax_c;
  options.sub.strategy = solver.subproblem;
  options.sub.enumeration_limit = solver.enumeration_limit;
  options.sub.local_restarts = solver.local_restarts;
  return std::make_unique<IterativeWindowSolver>(options, seed);
}

SubproblemOptions make_ftl_options(const SolverConfig& solver, const ProblemShape& shape,
                                   std::uint64_t seed) {
  SubproblemOptions sub;
  sub.enumeration_limit = solver.enumeration_limit;
  sub.local_restarts = solver.local_restarts;
  sub.seed = seed;
  if (solver.ftl_strategy == "enumerate") {
    sub.strategy = SubproblemStrategy::kEnumerate;
  } else if (solver.ftl_strategy == "local") {
    sub.strategy = SubproblemStrategy::kLocal;
  } else {
    sub.strategy = assignment_count(shape.k, shape.m, 4096) > 0
                       ? SubproblemStrategy::kEnumerate
                       : SubproblemStrategy::kLocal;
  }
  return sub;
}

// Everything an algorithm needs for one run; predictor/solver must outlive
// the policy.
struct AlgorithmInstance {
  std::unique_ptr<Predictor> predictor;
  std::unique_ptr<WindowSolver> solver;
  std::unique_ptr<Policy> policy;
};

AlgorithmInstance make_algorithm(const std::string& name, const ExperimentConfig& config,
                                 const ProblemShape& shape, std::uint64_t seed) {
  AlgorithmInstance inst;
  if (name == "dynamic" || name == "short-term" || name == "long-term") {
    inst.predictor = std::make_unique<GpPredictor>(config.predictor_kernel, config.predictor_z);
    inst.solver = make_window_solver(config.solver, shape, seed);
    if (name == "dynamic") {
      PlanningRunConfig prc;
      prc.s_max = config.s_max;
      inst.policy = make_dynamic_policy(*inst.predictor, *inst.solver, prc);
    } else {
      const int size = name == "short-term" ? config.short_window : config.long_window;
      inst.policy = make_fixed_policy(size, *inst.predictor, *inst.solver);
    }
  } else if (name == "static") {
    inst.policy = make_static_policy();
  } else if (name == "ogd") {
    OgdOptions options;
    options.eta0 = config.ogd_eta0;
    inst.policy = make_ogd_policy(options);
  } else if (name == "ftl") {
    inst.policy = make_ftl_policy(make_ftl_options(config.solver, shape, seed));
  } else if (name == "ftp") {
    SubproblemOptions sub;
    sub.strategy = SubproblemStrategy::kEnumerate;
    sub.enumeration_limit = config.solver.enumeration_limit;
    sub.local_restarts = config.solver.local_restarts;
    sub.seed = seed;
    if (assignment_count(shape.k, shape.m, sub.enumeration_limit) < 0) {
      sub.strategy = SubproblemStrategy::kLocal;
    }
    inst.policy = make_ftp_policy(sub);
  } else {
    throw ParameterError("unknown algorithm '" + name + "'");
  }
  return inst;
}

struct TrialInputs {
  ProblemShape shape;
  Assignment x0;
  TrafficSeries traffic;
  std::vector<TrafficVector> online;
  std::uint64_t trial_seed = 0;
};

TrialInputs build_trial_inputs(const ExperimentConfig& config, int trial_index) {
  TrialInputs in;
  in.trial_seed = derive_seed(config.master_seed, {kTagTrial, static_cast<std::uint64_t>(trial_index)});

  in.shape.k = config.k;
  in.shape.m = config.m;
  Rng unit_rng(derive_seed(in.trial_seed, {kTagUnits}));
  in.shape.unit_costs.resize(config.m);
  for (int j = 0; j < config.m; ++j) {
    in.shape.unit_costs[j] = unit_rng.uniform(config.unit_cost_low, config.unit_cost_high);
  }

  Rng x0_rng(derive_seed(in.trial_seed, {kTagInitial}));
  in.x0.rows.resize(config.k);
  for (int i = 0; i < config.k; ++i) {
    in.x0.rows[i] = static_cast<int>(x0_rng.uniform_int(0, config.m - 1));
  }

  TrafficGenConfig traffic_config = config.traffic;
  traffic_config.k = config.k;
  traffic_config.horizon = config.warmup + config.online_steps;
  traffic_config.seed = derive_seed(in.trial_seed, {kTagTraffic});
  in.traffic = generate_traffic(traffic_config);
  in.online.assign(in.traffic.steps.begin() + config.warmup, in.traffic.steps.end());
  return in;
}

}  // namespace

TrialResult run_single_trial(const ExperimentConfig& config, int trial_index) {
  config.validate();
  TrialResult result;
  result.trial = trial_index;

  TrialInputs inputs;
  try {
    inputs = build_trial_inputs(config, trial_index);
    TrafficSeries online_series;
    online_series.steps = inputs.online;
    result.benchmark = offline_benchmark(online_series, inputs.x0, inputs.shape,
                                         config.benchmark_chunk, config.solver);
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
    return result;
  }
  result.shape = inputs.shape;
  result.x0 = inputs.x0;
  result.traffic = inputs.traffic;

  result.runs.resize(config.algorithms.size());
  for (size_t a = 0; a < config.algorithms.size(); ++a) {
    const std::string& name = config.algorithms[a];
    AlgorithmRun& run = result.runs[a];
    run.algorithm = name;
    try {
      const std::uint64_t seed =
          derive_seed(inputs.trial_seed, {kTagAlgorithm, hash_string(name)});
      AlgorithmInstance inst = make_algorithm(name, config, inputs.shape, seed);
      RunOutput out = run_policy(inputs.traffic, config.warmup + 1, config.online_steps,
                                 inputs.shape, inputs.x0, *inst.policy);
      run.decisions = std::move(out.decisions);
      run.trace = std::move(out.trace);
      run.ledger = cumulative_regret(run.decisions, result.benchmark.assignments,
                                     inputs.online, inputs.x0, inputs.shape);
    } catch (const std::exception& e) {
      run.failed = true;
      run.error = e.what();
    }
  }
  return result;
}

namespace {

struct Accumulator {
  std::vector<double> values;

  void add(double v) { values.push_back(v); }
  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return values.empty() ? 0.0 : s / values.size();
  }
  double stddev() const {
    if (values.size() < 2) return 0.0;
    const double mu = mean();
    double s = 0.0;
    for (double v : values) s += (v - mu) * (v - mu);
    return std::sqrt(s / (values.size() - 1));
  }
};

std::vector<SummaryRow> summarize(const ExperimentConfig& config,
                                  const std::vector<TrialResult>& trials) {
  static const std::vector<std::string> metrics = {
      "cum_regret",      "cum_imbalance_regret", "cum_switching_regret",
      "total_cost",      "total_imbalance",      "total_switching",
      "switch_count",    "mean_window_size"};

  std::vector<SummaryRow> summary;
  for (const auto& name : config.algorithms) {
    std::vector<Accumulator> acc(metrics.size());
    int failures = 0;
    for (const auto& trial : trials) {
      if (trial.failed) {
        ++failures;
        continue;
      }
      const AlgorithmRun* run = nullptr;
      for (const auto& r : trial.runs) {
        if (r.algorithm == name) run = &r;
      }
      if (run == nullptr) continue;
      if (run->failed) {
        ++failures;
        continue;
      }
      const LedgerRow& last = run->ledger.rows.back();
      double total_imb = 0.0, total_sw = 0.0;
      for (const auto& row : run->ledger.rows) {
        total_imb += row.imbalance;
        total_sw += row.switching;
      }
      int switches = 0;
      const Assignment* prev = &trial.x0;
      for (const auto& d : run->decisions) {
        if (d != *prev) ++switches;
        prev = &d;
      }
      acc[0].add(last.cum_regret);
      acc[1].add(last.cum_imb_regret);
      acc[2].add(last.cum_sw_regret);
      acc[3].add(total_imb + total_sw);
      acc[4].add(total_imb);
      acc[5].add(total_sw);
      acc[6].add(static_cast<double>(switches));
      acc[7].add(static_cast<double>(config.online_steps) / run->trace.count());
    }
    for (size_t i = 0; i < metrics.size(); ++i) {
      SummaryRow row;
      row.algorithm = name;
      row.metric = metrics[i];
      row.mean = acc[i].mean();
      row.stddev = acc[i].stddev();
      row.trials = static_cast<int>(acc[i].values.size());
      summary.push_back(row);
    }
    SummaryRow fail_row;
    fail_row.algorithm = name;
    fail_row.metric = "failures";
    fail_row.mean = failures;
    fail_row.stddev = 0.0;
    fail_row.trials = static_cast<int>(trials.size());
    summary.push_back(fail_row);
  }
  return summary;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.trials.resize(config.trials);

  parallel_for(config.trials, config.workers,
               [&](int i) { result.trials[i] = run_single_trial(config, i); });

  for (const auto& trial : result.trials) {
    if (trial.failed) {
      result.failures += static_cast<int>(config.algorithms.size());
      continue;
    }
    for (const auto& run : trial.runs) {
      if (run.failed) ++result.failures;
    }
  }
  result.summary = summarize(config, result.trials);
  return result;
}

std::vector<SweepRow> sweep_windows(const ExperimentConfig& config,
                                    const std::vector<int>& sizes,
                                    const std::vector<std::string>& strategies) {
  config.validate();
  if (sizes.empty()) throw ParameterError("sweep: no window sizes");
  for (size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw ParameterError("sweep: window sizes must be >= 1");
    for (size_t j = i + 1; j < sizes.size(); ++j) {
      if (sizes[i] == sizes[j]) {
        throw ParameterError("sweep: duplicate window size " + std::to_string(sizes[i]));
      }
    }
  }
  if (strategies.empty()) throw ParameterError("sweep: no solver strategies");
  for (const auto& s : strategies) {
    if (s != "iterative" && s != "dp") {
      throw ParameterError("sweep: unknown strategy '" + s + "' (iterative, dp)");
    }
  }

  // Shared per-trial inputs and benchmarks, independent of (strategy, size).
  std::vector<TrialInputs> inputs(config.trials);
  std::vector<PlanResult> benchmarks(config.trials);
  std::vector<std::string> trial_errors(config.trials);
  parallel_for(config.trials, config.workers, [&](int i) {
    try {
      inputs[i] = build_trial_inputs(config, i);
      TrafficSeries online_series;
      online_series.steps = inputs[i].online;
      benchmarks[i] = offline_benchmark(online_series, inputs[i].x0, inputs[i].shape,
                                        config.benchmark_chunk, config.solver);
    } catch (const std::exception& e) {
      trial_errors[i] = e.what();
    }
  });

  struct Cell {
    bool failed = true;
    double regret = 0.0;
    double mean_solve_time = 0.0;
  };
  const int n_cells = static_cast<int>(strategies.size() * sizes.size()) * config.trials;
  std::vector<Cell> cells(n_cells);

  parallel_for(n_cells, config.workers, [&](int idx) {
    const int trial = idx % config.trials;
    const int size_idx = (idx / config.trials) % static_cast<int>(sizes.size());
    const int strat_idx = idx / (config.trials * static_cast<int>(sizes.size()));
    if (!trial_errors[trial].empty()) return;
    const TrialInputs& in = inputs[trial];
    Cell& cell = cells[idx];
    try {
      const std::string& strategy = strategies[strat_idx];
      std::unique_ptr<WindowSolver> solver;
      if (strategy == "dp") {
        solver = std::make_unique<DpWindowSolver>(config.solver.dp_state_limit);
      } else {
        IterativeOptions options;
        options.passes = config.solver.passes;
        options.relax_c = config.solver.relax_c;
        options.sub.strategy = config.solver.subproblem;
        options.sub.enumeration_limit = config.solver.enumeration_limit;
        options.sub.local_restarts = config.solver.local_restarts;
        solver = std::make_unique<IterativeWindowSolver>(
            options, derive_seed(in.trial_seed, {kTagSweep, hash_string(strategy),
                                                 static_cast<std::uint64_t>(sizes[size_idx])}));
      }
      GpPredictor predictor(config.predictor_kernel, config.predictor_z);
      RunOutput out = fixed_window_run(sizes[size_idx], in.traffic, config.warmup + 1,
                                       config.online_steps, predictor, *solver, in.shape, in.x0);
      RegretLedger ledger = cumulative_regret(out.decisions, benchmarks[trial].assignments,
                                              in.online, in.x0, in.shape);
      double time_sum = 0.0;
      int windows = 0;
      for (const auto& w : out.trace.restarts) {
        if (w.plan) {
          time_sum += w.plan->solve_time;
          ++windows;
        }
      }
      cell.failed = false;
      cell.regret = ledger.rows.back().cum_regret;
      cell.mean_solve_time = windows > 0 ? time_sum / windows : 0.0;
    } catch (const std::exception&) {
      cell.failed = true;
    }
  });

  std::vector<SweepRow> rows;
  for (size_t si = 0; si < strategies.size(); ++si) {
    for (size_t zi = 0; zi < sizes.size(); ++zi) {
      SweepRow row;
      row.strategy = strategies[si];
      row.size = sizes[zi];
      Accumulator regret, solve_time;
      for (int trial = 0; trial < config.trials; ++trial) {
        const Cell& cell =
            cells[(si * sizes.size() + zi) * config.trials + trial];
        if (cell.failed) {
          ++row.failures;
          continue;
        }
        regret.add(cell.regret);
        solve_time.add(cell.mean_solve_time);
      }
      row.trials = static_cast<int>(regret.values.size());
      row.mean_regret = regret.mean();
      row.std_regret = regret.stddev();
      row.mean_solve_time = solve_time.mean();
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<std::string> steps_csv_lines(const ExperimentResult& result) {
  std::vector<std::string> lines;
  lines.push_back(
      "trial,algorithm,t,imbalance,switching,bench_imbalance,bench_switching,"
      "cum_regret,cum_imb_regret,cum_sw_regret,window_id,window_size");
  for (const auto& trial : result.trials) {
    if (trial.failed) continue;
    for (const auto& run : trial.runs) {
      if (run.failed) continue;
      // Expand the window trace into per-step annotations.
      std::vector<int> window_id(run.ledger.rows.size(), 0);
      std::vector<int> window_size(run.ledger.rows.size(), 0);
      for (int w = 0; w < run.trace.count(); ++w) {
        const WindowRecord& record = run.trace.restarts[w];
        for (int s = 0; s < record.size; ++s) {
          const int idx = record.start - 1 + s;
          window_id[idx] = w + 1;
          window_size[idx] = record.size;
        }
      }
      for (size_t r = 0; r < run.ledger.rows.size(); ++r) {
        const LedgerRow& row = run.ledger.rows[r];
        std::string line = std::to_string(trial.trial);
        line += ',';
        line += run.algorithm;
        line += ',';
        line += std::to_string(row.t);
        for (double v : {row.imbalance, row.switching, row.bench_imbalance,
                         row.bench_switching, row.cum_regret, row.cum_imb_regret,
                         row.cum_sw_regret}) {
          line += ',';
          line += format_double(v);
        }
        line += ',' + std::to_string(window_id[r]);
        line += ',' + std::to_string(window_size[r]);
        lines.push_back(std::move(line));
      }
    }
  }
  return lines;
}

std::vector<std::string> summary_csv_lines(const ExperimentResult& result) {
  std::vector<std::string> lines;
  lines.push_back("algorithm,metric,mean,std,trials");
  for (const auto& row : result.summary) {
    std::string line = row.algorithm;
    line += ',' + row.metric;
    line += ',' + format_double(row.mean);
    line += ',' + format_double(row.stddev);
    line += ',' + std::to_string(row.trials);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> sweep_csv_lines(const std::vector<SweepRow>& rows) {
  std::vector<std::string> lines;
  lines.push_back("strategy,size,mean_regret,std_regret,mean_solve_time,trials,failures");
  for (const auto& row : rows) {
    std::string line = row.strategy;
    line += ',' + std::to_string(row.size);
    line += ',' + format_double(row.mean_regret);
    line += ',' + format_double(row.std_regret);
    line += ',' + format_double(row.mean_solve_time);
    line += ',' + std::to_string(row.trials);
    line += ',' + std::to_string(row.failures);
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace smooco
