#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smooco/errors.hpp"

namespace smooco::testing {

ProblemShape random_shape(Rng& rng, int k, int m, double u_lo, double u_hi) {
  ProblemShape shape;
  shape.k = k;
  shape.m = m;
  shape.unit_costs.resize(m);
  for (int j = 0; j < m; ++j) shape.unit_costs[j] = rng.uniform(u_lo, u_hi);
  return shape;
}

TrafficVector random_theta(Rng& rng, int k, double lo, double hi) {
  TrafficVector theta;
  theta.values.resize(k);
  for (int i = 0; i < k; ++i) theta.values[i] = rng.uniform(lo, hi);
  return theta;
}

std::vector<TrafficVector> random_thetas(Rng& rng, int k, int steps, double lo,
                                         double hi) {
  std::vector<TrafficVector> out;
  out.reserve(steps);
  for (int t = 0; t < steps; ++t) out.push_back(random_theta(rng, k, lo, hi));
  return out;
}

Assignment random_assignment(Rng& rng, int k, int m) {
  Assignment x;
  x.rows.resize(k);
  for (int i = 0; i < k; ++i) {
    x.rows[i] = static_cast<int>(rng.uniform_int(0, m - 1));
  }
  return x;
}

PlanResult brute_force_plan(const PlanningProblem& problem) {
  problem.validate();
  const int S = static_cast<int>(problem.thetas.size());
  const std::int64_t states =
      assignment_count(problem.shape.k, problem.shape.m, 1 << 20);
  if (states < 0) throw CapacityError("brute_force_plan: state space too large");
  double total = 1.0;
  for (int t = 0; t < S; ++t) {
    total *= static_cast<double>(states);
    if (total > (1 << 25)) {
      throw CapacityError("brute_force_plan: sequence space too large");
    }
  }

  std::vector<Assignment> table;
  table.reserve(states);
  for (std::int64_t code = 0; code < states; ++code) {
    table.push_back(decode_assignment(code, problem.shape.k, problem.shape.m));
  }

  std::vector<std::int64_t> codes(S, 0);
  std::vector<Assignment> best;
  double best_cost = 0.0;
  bool have_best = false;
  while (true) {
    // Cost in plan_cost accumulation order for bitwise comparability.
    double acc = 0.0;
    const Assignment* prev = &problem.initial;
    for (int t = 0; t < S; ++t) {
      const Assignment& x = table[codes[t]];
      const double step = makespan(x, problem.thetas[t], problem.shape) +
                          switching_cost(*prev, x, problem.shape);
      acc += step;
      prev = &x;
    }
    if (!have_best || acc < best_cost) {
      have_best = true;
      best_cost = acc;
      best.clear();
      for (int t = 0; t < S; ++t) best.push_back(table[codes[t]]);
    }
    // Advance the sequence counter, last step fastest; the first sequence
    // reaching the optimum is the lexicographically smallest one.
    int pos = S - 1;
    while (pos >= 0 && ++codes[pos] == states) {
      codes[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  PlanResult result;
  result.assignments = std::move(best);
  result.total_cost = best_cost;
  result.solver_tag = "brute-force";
  return result;
}

std::pair<Assignment, double> brute_force_subproblem(
    const std::vector<WeightedTheta>& theta_terms, const Assignment& left,
    const Assignment* right, double c, const ProblemShape& shape) {
  const std::int64_t states = assignment_count(shape.k, shape.m, 1 << 22);
  if (states < 0) {
    throw CapacityError("brute_force_subproblem: state space too large");
  }
  Assignment best;
  double best_obj = 0.0;
  bool have_best = false;
  for (std::int64_t code = 0; code < states; ++code) {
    const Assignment x = decode_assignment(code, shape.k, shape.m);
    double obj = 0.0;
    for (const WeightedTheta& term : theta_terms) {
      obj += term.weight * makespan(x, term.theta, shape);
    }
    obj += c * switching_cost(left, x, shape);
    if (right != nullptr) obj += c * switching_cost(x, *right, shape);
    if (!have_best || obj < best_obj) {
      have_best = true;
      best_obj = obj;
      best = x;
    }
  }
  return {best, best_obj};
}

CommandResult run_command(const std::string& command) {
  CommandResult result;
  const std::string full = command + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed: " + command);
  std::array<char, 4096> buf;
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.output.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else {
    result.exit_code = -1;
  }
  return result;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out += "'";
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string make_temp_dir(const std::string& tag) {
  std::string tmpl = "/tmp/smooco_" + tag + "_XXXXXX";
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (mkdtemp(buf.data()) == nullptr) {
    throw std::runtime_error("mkdtemp failed for " + tmpl);
  }
  return std::string(buf.data());
}

}  // namespace smooco::testing
