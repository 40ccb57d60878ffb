#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smooco/core.hpp"
#include "smooco/predict.hpp"
#include "smooco/solve.hpp"

namespace smooco {

class Policy;
struct RunOutput;

// Read gate over the true traffic. Policies receive a const view and can
// only read steps the online loop has already played out; peeking at the
// current or future steps throws. This is the no-lookahead guarantee, by
// construction rather than by convention.
class StreamView {
 public:
  StreamView(const TrafficSeries& truth, int online_start);

  int online_start() const { return online_start_; }
  int revealed() const { return revealed_; }
  int topics() const { return truth_->topics(); }

  // Global 1-based step; throws std::out_of_range past the revealed prefix.
  const TrafficVector& at(int t) const;

  // Copy of steps 1..revealed for predictor fitting.
  TrafficSeries revealed_prefix() const;

 private:
  friend RunOutput run_policy(const TrafficSeries& truth, int online_start,
                              int online_steps, const ProblemShape& shape,
                              const Assignment& x0, Policy& policy);
  void reveal_up_to(int t);

  const TrafficSeries* truth_;
  int online_start_;
  int revealed_ = 0;
};

// Forecast source for the planning policies.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Forecast predict(const StreamView& view, int t, int horizon) = 0;
};

// GP regression on the revealed prefix, refit at every restart.
class GpPredictor : public Predictor {
 public:
  explicit GpPredictor(RationalQuadraticKernel kern, double z = 1.0)
      : kern_(kern), z_(z) {}
  Forecast predict(const StreamView& view, int t, int horizon) override;

 private:
  RationalQuadraticKernel kern_;
  double z_;
};

// Perturbed truth with caller-provided uncertainty schedule(t, s) for the
// s-th step (1-based) of a window planned at time t. Reads the real future
// by design: it exists to realize known-accuracy predictions in tests.
class OraclePredictor : public Predictor {
 public:
  OraclePredictor(const TrafficSeries& truth,
                  std::function<double(int t, int s)> schedule, std::uint64_t seed)
      : truth_(&truth), schedule_(std::move(schedule)), rng_(seed) {}
  Forecast predict(const StreamView& view, int t, int horizon) override;

 private:
  const TrafficSeries* truth_;
  std::function<double(int, int)> schedule_;
  Rng rng_;
};

// Window subsolver used by the planning policies.
class WindowSolver {
 public:
  virtual ~WindowSolver() = default;
  virtual PlanResult solve(const PlanningProblem& problem) = 0;
};

class DpWindowSolver : public WindowSolver {
 public:
  explicit DpWindowSolver(std::int64_t state_limit = 1024) : state_limit_(state_limit) {}
  PlanResult solve(const PlanningProblem& problem) override;

 private:
  std::int64_t state_limit_;
};

class IterativeWindowSolver : public WindowSolver {
 public:
  IterativeWindowSolver(IterativeOptions options, std::uint64_t seed)
      : options_(std::move(options)), seed_(seed) {}
  PlanResult solve(const PlanningProblem& problem) override;

 private:
  IterativeOptions options_;
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
};

// Largest S in [1, min(s_max, len)] with 2L * sum of the first S
// uncertainties <= B; 1 when even the first step breaks the budget (then
// switching is cheap enough to replan every step).
int select_window(const std::vector<double>& uncertainties, double L, double B, int s_max);

// One committed planning window.
struct WindowRecord {
  int start = 0;  // online-local, first window starts at 1
  int size = 0;
  std::optional<Forecast> forecast;
  std::optional<PlanResult> plan;
};

struct WindowTrace {
  std::vector<WindowRecord> restarts;

  int count() const { return static_cast<int>(restarts.size()); }
  // Windows must tile [1, online_steps] exactly.
  void check_tiling(int online_steps) const;
};

struct RunOutput {
  std::vector<Assignment> decisions;  // one per online step
  WindowTrace trace;
};

// A decision rule driven by the online loop: asked once per restart for a
// block of >= 1 assignments, which the loop then executes verbatim.
class Policy {
 public:
  struct Block {
    std::vector<Assignment> assignments;
    std::optional<Forecast> forecast;
    std::optional<PlanResult> plan;
  };

  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void reset(const ProblemShape& /*shape*/, const Assignment& /*x0*/) {}
  virtual Block next_block(const StreamView& view, int t, int remaining,
                           const Assignment& prev) = 0;
};

// Drives one policy over online steps [online_start, online_start +
// online_steps), revealing each step only after the block covering it is
// committed.
RunOutput run_policy(const TrafficSeries& truth, int online_start, int online_steps,
                     const ProblemShape& shape, const Assignment& x0, Policy& policy);

struct PlanningRunConfig {
  int s_max = 20;
  // Overrides for the window rule's constants; values <= 0 mean "compute
  // from shape" (sqrt(k) and the max switching cost).
  double lipschitz_override = 0.0;
  double budget_override = 0.0;
};

// Replan with an adaptive window: forecast, pick the largest window whose
// accumulated uncertainty fits the switching budget, solve it, execute it.
RunOutput dynamic_planning_run(const TrafficSeries& traffic, int t_start, int online_steps,
                               Predictor& predictor, WindowSolver& solver,
                               const ProblemShape& shape, const Assignment& x0,
                               const PlanningRunConfig& config = {});

// Same loop with a constant window size (clipped to the remaining horizon).
RunOutput fixed_window_run(int s_fixed, const TrafficSeries& traffic, int t_start,
                           int online_steps, Predictor& predictor, WindowSolver& solver,
                           const ProblemShape& shape, const Assignment& x0);

// Policy wrappers used by the harness; exposed for composition.
std::unique_ptr<Policy> make_dynamic_policy(Predictor& predictor, WindowSolver& solver,
                                            const PlanningRunConfig& config);
std::unique_ptr<Policy> make_fixed_policy(int s_fixed, Predictor& predictor,
                                          WindowSolver& solver);

}  // namespace smooco
