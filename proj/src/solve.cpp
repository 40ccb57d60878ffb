#include "smooco/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "smooco/errors.hpp"
#include "smooco/rng.hpp"

namespace smooco {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Local objective of one step: weighted makespans plus c-weighted switching
// to the fixed neighbors. Single source of truth for accept/compare checks.
double local_objective(const Assignment& x, const std::vector<WeightedTheta>& terms,
                       const Assignment& left, const Assignment* right, double c,
                       const ProblemShape& shape) {
  double obj = 0.0;
  for (const auto& term : terms) obj += term.weight * makespan(x, term.theta, shape);
  obj += c * switching_cost(left, x, shape);
  if (right != nullptr) obj += c * switching_cost(x, *right, shape);
  return obj;
}

struct BestTracker {
  double obj = std::numeric_limits<double>::infinity();
  std::int64_t code = -1;
  Assignment rows;

  // Strict improvement, or an exact tie resolved to the smaller encoding.
  void offer(double candidate_obj, std::int64_t candidate_code, const Assignment& x) {
    if (candidate_obj < obj || (candidate_obj == obj && candidate_code < code)) {
      obj = candidate_obj;
      code = candidate_code;
      rows = x;
    }
  }
};

// Depth-first scan over all assignments in encoding order with incremental
// per-term server loads and switching partial sums. Visiting in encoding
// order plus strict-< acceptance realizes the smallest-encoding tie-break
// without storing candidates.
class EnumerationScan {
 public:
  EnumerationScan(const std::vector<WeightedTheta>& terms, const Assignment& left,
                  const Assignment* right, double c, const ProblemShape& shape)
      : terms_(terms), left_(left), right_(right), c_(c), shape_(shape),
        loads_(terms.size() * shape.m, 0.0),
        saved_(terms.size() * shape.k, 0.0) {
    cur_.rows.assign(shape.k, 0);
  }

  BestTracker run() {
    descend(0, 0, 0.0, 0.0);
    return best_;
  }

 private:
  void descend(int topic, std::int64_t code, double dl, double dr) {
    if (topic == shape_.k) {
      // Accumulation order mirrors local_objective so equal-cost candidates
      // stay bitwise-equal ties and resolve to the smaller encoding.
      double obj = 0.0;
      for (size_t j = 0; j < terms_.size(); ++j) {
        const double* row = loads_.data() + j * shape_.m;
        double mx = row[0];
        for (int s = 1; s < shape_.m; ++s) mx = std::max(mx, row[s]);
        obj += terms_[j].weight * mx;
      }
      obj += c_ * dl;
      obj += c_ * dr;
      best_.offer(obj, code, cur_);
      return;
    }
    // Save/restore instead of add/subtract keeps every load a pure fold of
    // additions in topic order, bitwise-matching a fresh makespan sum.
    double* saved = saved_.data() + static_cast<size_t>(topic) * terms_.size();
    for (int s = 0; s < shape_.m; ++s) {
      cur_.rows[topic] = s;
      for (size_t j = 0; j < terms_.size(); ++j) {
        saved[j] = loads_[j * shape_.m + s];
        loads_[j * shape_.m + s] += terms_[j].theta.values[topic];
      }
      double ndl = dl, ndr = dr;
      if (left_.rows[topic] != s) {
        ndl += shape_.unit_costs[left_.rows[topic]] + shape_.unit_costs[s];
      }
      if (right_ != nullptr && right_->rows[topic] != s) {
        ndr += shape_.unit_costs[right_->rows[topic]] + shape_.unit_costs[s];
      }
      descend(topic + 1, code * shape_.m + s, ndl, ndr);
      for (size_t j = 0; j < terms_.size(); ++j) {
        loads_[j * shape_.m + s] = saved[j];
      }
    }
  }

  const std::vector<WeightedTheta>& terms_;
  const Assignment& left_;
  const Assignment* right_;
  double c_;
  const ProblemShape& shape_;
  std::vector<double> loads_;
  std::vector<double> saved_;
  Assignment cur_;
  BestTracker best_;
};

// Best-improvement descent over single-topic moves. Deterministic: moves are
// scanned in (topic, server) order and applied only on strict decrease.
Assignment steepest_descent(Assignment x, const std::vector<WeightedTheta>& terms,
                            const Assignment& left, const Assignment* right, double c,
                            const ProblemShape& shape) {
  const int k = shape.k;
  const int m = shape.m;
  const size_t J = terms.size();
  std::vector<double> loads(J * m, 0.0);
  for (size_t j = 0; j < J; ++j) {
    for (int i = 0; i < k; ++i) loads[j * m + x.rows[i]] += terms[j].theta.values[i];
  }

  double cur = local_objective(x, terms, left, right, c, shape);
  std::vector<double> row(m);
  for (;;) {
    double best_obj = cur;
    int best_topic = -1, best_server = -1;
    for (int i = 0; i < k; ++i) {
      const int from = x.rows[i];
      for (int s = 0; s < m; ++s) {
        if (s == from) continue;
        double obj = 0.0;
        for (size_t j = 0; j < J; ++j) {
          const double* lr = loads.data() + j * m;
          const double v = terms[j].theta.values[i];
          double mx = -std::numeric_limits<double>::infinity();
          for (int t = 0; t < m; ++t) {
            double lv = lr[t];
            if (t == from) lv -= v;
            if (t == s) lv += v;
            mx = std::max(mx, lv);
          }
          obj += terms[j].weight * mx;
        }
        double dl = 0.0, dr = 0.0;
        for (int t2 = 0; t2 < k; ++t2) {
          const int srv = t2 == i ? s : x.rows[t2];
          if (left.rows[t2] != srv) dl += shape.unit_costs[left.rows[t2]] + shape.unit_costs[srv];
          if (right != nullptr && right->rows[t2] != srv) {
            dr += shape.unit_costs[right->rows[t2]] + shape.unit_costs[srv];
          }
        }
        obj += c * dl;
        obj += c * dr;
        if (obj < best_obj) {
          best_obj = obj;
          best_topic = i;
          best_server = s;
        }
      }
    }
    if (best_topic < 0) break;
    for (size_t j = 0; j < J; ++j) {
      const double v = terms[j].theta.values[best_topic];
      loads[j * m + x.rows[best_topic]] -= v;
      loads[j * m + best_server] += v;
    }
    x.rows[best_topic] = best_server;
    cur = best_obj;
  }
  return x;
}

}  // namespace

void PlanningProblem::validate() const {
  shape.validate();
  if (thetas.empty()) throw ShapeError("planning problem: need at least one step");
  for (const auto& th : thetas) {
    if (static_cast<int>(th.values.size()) != shape.k) {
      throw ShapeError("planning problem: theta dimension mismatch");
    }
  }
  if (static_cast<int>(initial.rows.size()) != shape.k) {
    throw ShapeError("planning problem: initial assignment dimension mismatch");
  }
  for (int r : initial.rows) {
    if (r < 0 || r >= shape.m) throw ShapeError("planning problem: initial row out of range");
  }
}

void to_json(nlohmann::json& j, const PlanningProblem& p) {
  std::vector<std::vector<double>> thetas;
  thetas.reserve(p.thetas.size());
  for (const auto& th : p.thetas) thetas.push_back(th.values);
  j = nlohmann::json{{"k", p.shape.k},
                     {"m", p.shape.m},
                     {"unit_costs", p.shape.unit_costs},
                     {"thetas", thetas},
                     {"initial", p.initial.rows}};
}

void from_json(const nlohmann::json& j, PlanningProblem& p) {
  p.shape.k = j.at("k").get<int>();
  p.shape.m = j.at("m").get<int>();
  p.shape.unit_costs = j.at("unit_costs").get<std::vector<double>>();
  p.thetas.clear();
  for (const auto& row : j.at("thetas")) {
    p.thetas.push_back(TrafficVector{row.get<std::vector<double>>()});
  }
  p.initial.rows = j.at("initial").get<std::vector<int>>();
  p.validate();
}

double plan_cost(const std::vector<Assignment>& assignments,
                 const std::vector<TrafficVector>& thetas,
                 const Assignment& initial, const ProblemShape& shape) {
  if (assignments.size() != thetas.size()) {
    throw ShapeError("plan_cost: assignment/theta length mismatch");
  }
  double acc = 0.0;
  const Assignment* prev = &initial;
  for (size_t t = 0; t < assignments.size(); ++t) {
    const double step = makespan(assignments[t], thetas[t], shape) +
                        switching_cost(*prev, assignments[t], shape);
    acc += step;
    prev = &assignments[t];
  }
  return acc;
}

Assignment solve_subproblem(const std::vector<WeightedTheta>& theta_terms,
                            const Assignment& left, const Assignment* right,
                            double c, const ProblemShape& shape,
                            const SubproblemOptions& options) {
  shape.validate();
  if (theta_terms.empty()) throw ParameterError("solve_subproblem: no theta terms");
  if (!(c >= 0.0)) throw ParameterError("solve_subproblem: c must be >= 0");
  for (const auto& term : theta_terms) {
    if (static_cast<int>(term.theta.values.size()) != shape.k) {
      throw ShapeError("solve_subproblem: theta dimension mismatch");
    }
  }

  if (options.strategy == SubproblemStrategy::kEnumerate) {
    const std::int64_t n = assignment_count(shape.k, shape.m, options.enumeration_limit);
    if (n < 0) {
      throw CapacityError("solve_subproblem: m^k exceeds enumeration limit " +
                          std::to_string(options.enumeration_limit));
    }
    EnumerationScan scan(theta_terms, left, right, c, shape);
    return scan.run().rows;
  }

  BestTracker best;
  Rng rng(options.seed);
  for (int start = 0; start <= options.local_restarts; ++start) {
    Assignment x0;
    if (start == 0) {
      x0 = left;
    } else {
      x0.rows.resize(shape.k);
      for (int i = 0; i < shape.k; ++i) {
        x0.rows[i] = static_cast<int>(rng.uniform_int(0, shape.m - 1));
      }
    }
    Assignment xs = steepest_descent(std::move(x0), theta_terms, left, right, c, shape);
    const double obj = local_objective(xs, theta_terms, left, right, c, shape);
    best.offer(obj, encode_assignment(xs, shape.m), xs);
  }
  return best.rows;
}

PlanResult iterative_plan(const PlanningProblem& problem, const IterativeOptions& options) {
  problem.validate();
  if (options.passes < 1) throw ParameterError("iterative_plan: passes must be >= 1");
  if (!(options.relax_c >= 0.0)) throw ParameterError("iterative_plan: relax_c must be >= 0");
  const auto started = Clock::now();
  const int S = static_cast<int>(problem.thetas.size());

  std::vector<Assignment> x(S, problem.initial);
  std::vector<WeightedTheta> term(1);
  term[0].weight = 1.0;

  for (int pass = 1; pass <= options.passes; ++pass) {
    const double c = pass < options.passes ? options.relax_c : 1.0;
    for (int t = 1; t <= S; ++t) {
      const Assignment& left = t == 1 ? problem.initial : x[t - 2];
      const Assignment* right = t == S ? nullptr : &x[t];
      term[0].theta = problem.thetas[t - 1];

      SubproblemOptions sub = options.sub;
      sub.seed = derive_seed(options.sub.seed,
                             {static_cast<std::uint64_t>(pass), static_cast<std::uint64_t>(t)});
      Assignment cand = solve_subproblem(term, left, right, c, problem.shape, sub);

      const double cur_obj = local_objective(x[t - 1], term, left, right, c, problem.shape);
      const double cand_obj = local_objective(cand, term, left, right, c, problem.shape);
      if (cand_obj <= cur_obj && cand != x[t - 1]) {
        x[t - 1] = std::move(cand);
        if (pass == options.passes && options.on_final_update) {
          options.on_final_update(t, plan_cost(x, problem.thetas, problem.initial, problem.shape));
        }
      }
    }
  }

  PlanResult result;
  result.assignments = std::move(x);
  result.total_cost = plan_cost(result.assignments, problem.thetas, problem.initial, problem.shape);
  result.solver_tag = options.sub.strategy == SubproblemStrategy::kEnumerate
                          ? "iterative+enumerate"
                          : "iterative+local";
  result.solve_time = seconds_since(started);
  return result;
}

PlanResult exact_plan_dp(const PlanningProblem& problem, std::int64_t dp_state_limit) {
  problem.validate();
  const auto started = Clock::now();
  const int k = problem.shape.k;
  const int m = problem.shape.m;
  const std::int64_t n = assignment_count(k, m, dp_state_limit);
  if (n < 0) {
    throw CapacityError("exact_plan_dp: m^k exceeds state limit " +
                        std::to_string(dp_state_limit));
  }
  const int N = static_cast<int>(n);
  const int S = static_cast<int>(problem.thetas.size());

  // Row table: rows_tab[x*k + i] = server of topic i in assignment x.
  std::vector<int> rows_tab(static_cast<size_t>(N) * k);
  for (int x = 0; x < N; ++x) {
    std::int64_t code = x;
    for (int i = k - 1; i >= 0; --i) {
      rows_tab[static_cast<size_t>(x) * k + i] = static_cast<int>(code % m);
      code /= m;
    }
  }
  const auto switch_between = [&](const int* a, const int* b) {
    double d = 0.0;
    for (int i = 0; i < k; ++i) {
      if (a[i] != b[i]) d += problem.shape.unit_costs[a[i]] + problem.shape.unit_costs[b[i]];
    }
    return d;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> v_prev(N, inf), v_cur(N, inf);
  std::vector<int> backptr(static_cast<size_t>(N) * S, -1);
  std::vector<double> f(N);
  std::vector<double> load(m);
  std::vector<int> initial_rows = problem.initial.rows;

  for (int t = 0; t < S; ++t) {
    const TrafficVector& theta = problem.thetas[t];
    for (int x = 0; x < N; ++x) {
      const int* rows = rows_tab.data() + static_cast<size_t>(x) * k;
      std::fill(load.begin(), load.end(), 0.0);
      for (int i = 0; i < k; ++i) load[rows[i]] += theta.values[i];
      double mx = load[0];
      for (int s = 1; s < m; ++s) mx = std::max(mx, load[s]);
      f[x] = mx;
    }
    for (int x = 0; x < N; ++x) {
      const int* rows = rows_tab.data() + static_cast<size_t>(x) * k;
      double best = inf;
      int best_prev = -1;
      if (t == 0) {
        // Per-step cost joins the running total in the same association as
        // plan_cost: total += (makespan + switch).
        best = f[x] + switch_between(initial_rows.data(), rows);
        best_prev = -1;
      } else {
        for (int xp = 0; xp < N; ++xp) {
          if (v_prev[xp] == inf) continue;
          const double step = f[x] + switch_between(rows_tab.data() + static_cast<size_t>(xp) * k, rows);
          const double cand = v_prev[xp] + step;
          if (cand < best) {
            best = cand;
            best_prev = xp;
          }
        }
      }
      v_cur[x] = best;
      backptr[static_cast<size_t>(t) * N + x] = best_prev;
    }
    std::swap(v_prev, v_cur);
  }

  int best_final = 0;
  for (int x = 1; x < N; ++x) {
    if (v_prev[x] < v_prev[best_final]) best_final = x;
  }

  PlanResult result;
  result.assignments.resize(S);
  int xcur = best_final;
  for (int t = S - 1; t >= 0; --t) {
    result.assignments[t].rows.assign(rows_tab.data() + static_cast<size_t>(xcur) * k,
                                      rows_tab.data() + static_cast<size_t>(xcur) * k + k);
    xcur = backptr[static_cast<size_t>(t) * N + xcur];
  }
  result.total_cost =
      plan_cost(result.assignments, problem.thetas, problem.initial, problem.shape);
  result.solver_tag = "dp";
  result.solve_time = seconds_since(started);
  return result;
}

FixedPointReport is_fixed_point(const PlanningProblem& problem,
                                const std::vector<Assignment>& assignments,
                                std::int64_t enumeration_limit) {
  problem.validate();
  if (assignments.size() != problem.thetas.size()) {
    throw ShapeError("is_fixed_point: sequence length mismatch");
  }
  const std::int64_t n = assignment_count(problem.shape.k, problem.shape.m, enumeration_limit);
  if (n < 0) throw CapacityError("is_fixed_point: m^k exceeds enumeration limit");
  const int S = static_cast<int>(assignments.size());

  std::vector<WeightedTheta> term(1);
  term[0].weight = 1.0;
  FixedPointReport report;
  for (int t = 1; t <= S; ++t) {
    const Assignment& left = t == 1 ? problem.initial : assignments[t - 2];
    const Assignment* right = t == S ? nullptr : &assignments[t];
    term[0].theta = problem.thetas[t - 1];
    const double cur = local_objective(assignments[t - 1], term, left, right, 1.0, problem.shape);
    const double tol = 1e-9 * std::max(1.0, std::abs(cur));
    for (std::int64_t code = 0; code < n; ++code) {
      Assignment cand = decode_assignment(code, problem.shape.k, problem.shape.m);
      const double obj = local_objective(cand, term, left, right, 1.0, problem.shape);
      if (cur - obj > tol) {
        report.fixed = false;
        report.t = t;
        report.improving = std::move(cand);
        return report;
      }
    }
  }
  return report;
}

}  // namespace smooco
