#include "smooco/plan.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "smooco/errors.hpp"
#include "smooco/rng.hpp"

namespace smooco {

StreamView::StreamView(const TrafficSeries& truth, int online_start)
    : truth_(&truth), online_start_(online_start) {
  if (online_start < 1 || online_start > truth.length() + 1) {
    throw ParameterError("stream view: online start outside the series");
  }
}

const TrafficVector& StreamView::at(int t) const {
  if (t < 1 || t > revealed_) {
    throw std::out_of_range("stream view: step " + std::to_string(t) +
                            " not revealed yet (revealed " + std::to_string(revealed_) + ")");
  }
  return truth_->steps[t - 1];
}

TrafficSeries StreamView::revealed_prefix() const {
  TrafficSeries prefix;
  prefix.steps.assign(truth_->steps.begin(), truth_->steps.begin() + revealed_);
  return prefix;
}

void StreamView::reveal_up_to(int t) { revealed_ = std::max(revealed_, t); }

Forecast GpPredictor::predict(const StreamView& view, int t, int horizon) {
  return forecast(view.revealed_prefix(), t, horizon, kern_, z_);
}

Forecast OraclePredictor::predict(const StreamView& view, int t, int horizon) {
  (void)view;
  std::vector<double> bounds(horizon);
  for (int s = 1; s <= horizon; ++s) bounds[s - 1] = schedule_(t, s);
  return oracle_forecast(*truth_, t, horizon, bounds, rng_);
}

PlanResult DpWindowSolver::solve(const PlanningProblem& problem) {
  return exact_plan_dp(problem, state_limit_);
}

PlanResult IterativeWindowSolver::solve(const PlanningProblem& problem) {
  IterativeOptions options = options_;
  options.sub.seed = derive_seed(seed_, {calls_++});
  return iterative_plan(problem, options);
}

int select_window(const std::vector<double>& uncertainties, double L, double B, int s_max) {
  if (uncertainties.empty()) throw ParameterError("select_window: empty uncertainty sequence");
  if (!(L > 0.0)) throw ParameterError("select_window: L must be > 0");
  if (!(B >= 0.0)) throw ParameterError("select_window: B must be >= 0");
  if (s_max < 1) throw ParameterError("select_window: s_max must be >= 1");

  const int cap = std::min<std::int64_t>(s_max, static_cast<std::int64_t>(uncertainties.size()));
  int best = 1;
  double sum = 0.0;
  for (int S = 1; S <= cap; ++S) {
    const double eps = uncertainties[S - 1];
    if (!(eps >= 0.0)) throw ParameterError("select_window: negative uncertainty");
    sum += eps;
    if (2.0 * L * sum <= B) {
      best = S;
    } else {
      break;  // partial sums only grow
    }
  }
  return best;
}

void WindowTrace::check_tiling(int online_steps) const {
  int expect = 1;
  for (const auto& w : restarts) {
    if (w.start != expect || w.size < 1) {
      throw NumericalError("window trace does not tile the horizon");
    }
    expect += w.size;
  }
  if (expect != online_steps + 1) {
    throw NumericalError("window trace does not cover the horizon");
  }
}

RunOutput run_policy(const TrafficSeries& truth, int online_start, int online_steps,
                     const ProblemShape& shape, const Assignment& x0, Policy& policy) {
  shape.validate();
  if (online_steps < 1) throw ParameterError("run_policy: online_steps must be >= 1");
  if (online_start < 1) throw ParameterError("run_policy: online_start must be >= 1");
  if (truth.length() < online_start - 1 + online_steps) {
    throw ParameterError("run_policy: traffic shorter than the online horizon");
  }

  StreamView view(truth, online_start);
  view.reveal_up_to(online_start - 1);  // warmup is public history
  policy.reset(shape, x0);

  RunOutput out;
  out.decisions.reserve(online_steps);
  Assignment prev = x0;
  int t = online_start;
  const int end = online_start + online_steps;
  while (t < end) {
    const int remaining = end - t;
    Policy::Block block = policy.next_block(view, t, remaining, prev);
    const int size = static_cast<int>(block.assignments.size());
    if (size < 1 || size > remaining) {
      throw NumericalError("policy returned a block of " + std::to_string(size) +
                           " assignments with " + std::to_string(remaining) + " remaining");
    }
    WindowRecord record;
    record.start = t - online_start + 1;
    record.size = size;
    record.forecast = std::move(block.forecast);
    record.plan = std::move(block.plan);
    out.trace.restarts.push_back(std::move(record));

    for (auto& a : block.assignments) {
      prev = a;
      out.decisions.push_back(std::move(a));
    }
    t += size;
    view.reveal_up_to(t - 1);
  }
  out.trace.check_tiling(online_steps);
  return out;
}

namespace {

class DynamicPlanningPolicy : public Policy {
 public:
  DynamicPlanningPolicy(Predictor& predictor, WindowSolver& solver, PlanningRunConfig config)
      : predictor_(predictor), solver_(solver), config_(config) {}

  std::string name() const override { return "dynamic"; }

  void reset(const ProblemShape& shape, const Assignment& x0) override {
    (void)x0;
    lipschitz_ = config_.lipschitz_override > 0.0 ? config_.lipschitz_override
                                                  : lipschitz_constant(shape);
    budget_ = config_.budget_override > 0.0 ? config_.budget_override
                                            : max_switching_cost(shape);
    shape_ = shape;
  }

  Block next_block(const StreamView& view, int t, int remaining,
                   const Assignment& prev) override {
    const int horizon = std::min(config_.s_max, remaining);
    Forecast fc = predictor_.predict(view, t, horizon);
    const int S = select_window(fc.uncertainties, lipschitz_, budget_, horizon);

    PlanningProblem problem;
    problem.shape = shape_;
    problem.thetas.assign(fc.means.begin(), fc.means.begin() + S);
    problem.initial = prev;
    PlanResult plan = solver_.solve(problem);

    Block block;
    block.assignments = plan.assignments;
    block.forecast = std::move(fc);
    block.plan = std::move(plan);
    return block;
  }

 private:
  Predictor& predictor_;
  WindowSolver& solver_;
  PlanningRunConfig config_;
  ProblemShape shape_;
  double lipschitz_ = 1.0;
  double budget_ = 0.0;
};

class FixedWindowPolicy : public Policy {
 public:
  FixedWindowPolicy(int s_fixed, Predictor& predictor, WindowSolver& solver)
      : s_fixed_(s_fixed), predictor_(predictor), solver_(solver) {
    if (s_fixed < 1) throw ParameterError("fixed window: size must be >= 1");
  }

  std::string name() const override { return "fixed-" + std::to_string(s_fixed_); }

  void reset(const ProblemShape& shape, const Assignment& x0) override {
    (void)x0;
    shape_ = shape;
  }

  Block next_block(const StreamView& view, int t, int remaining,
                   const Assignment& prev) override {
    const int S = std::min(s_fixed_, remaining);
    Forecast fc = predictor_.predict(view, t, S);

    PlanningProblem problem;
    problem.shape = shape_;
    problem.thetas.assign(fc.means.begin(), fc.means.begin() + S);
    problem.initial = prev;
    PlanResult plan = solver_.solve(problem);

    Block block;
    block.assignments = plan.assignments;
    block.forecast = std::move(fc);
    block.plan = std::move(plan);
    return block;
  }

 private:
  int s_fixed_;
  Predictor& predictor_;
  WindowSolver& solver_;
  ProblemShape shape_;
};

}  // namespace

std::unique_ptr<Policy> make_dynamic_policy(Predictor& predictor, WindowSolver& solver,
                                            const PlanningRunConfig& config) {
  return std::make_unique<DynamicPlanningPolicy>(predictor, solver, config);
}

std::unique_ptr<Policy> make_fixed_policy(int s_fixed, Predictor& predictor,
                                          WindowSolver& solver) {
  return std::make_unique<FixedWindowPolicy>(s_fixed, predictor, solver);
}

RunOutput dynamic_planning_run(const TrafficSeries& traffic, int t_start, int online_steps,
                               Predictor& predictor, WindowSolver& solver,
                               const ProblemShape& shape, const Assignment& x0,
                               const PlanningRunConfig& config) {
  auto policy = make_dynamic_policy(predictor, solver, config);
  return run_policy(traffic, t_start, online_steps, shape, x0, *policy);
}

RunOutput fixed_window_run(int s_fixed, const TrafficSeries& traffic, int t_start,
                           int online_steps, Predictor& predictor, WindowSolver& solver,
                           const ProblemShape& shape, const Assignment& x0) {
  auto policy = make_fixed_policy(s_fixed, predictor, solver);
  return run_policy(traffic, t_start, online_steps, shape, x0, *policy);
}

}  // namespace smooco
