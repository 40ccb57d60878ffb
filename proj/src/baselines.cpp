#include "smooco/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smooco/errors.hpp"
#include "smooco/rng.hpp"

namespace smooco {

RelaxedAssignment RelaxedAssignment::one_hot(const Assignment& x, int m) {
  RelaxedAssignment r;
  r.k = static_cast<int>(x.rows.size());
  r.m = m;
  r.matrix.assign(static_cast<size_t>(r.k) * m, 0.0);
  for (int i = 0; i < r.k; ++i) {
    if (x.rows[i] < 0 || x.rows[i] >= m) throw ShapeError("one_hot: row out of range");
    r.matrix[static_cast<size_t>(i) * m + x.rows[i]] = 1.0;
  }
  return r;
}

void RelaxedAssignment::validate() const {
  if (k < 1 || m < 1 || matrix.size() != static_cast<size_t>(k) * m) {
    throw ShapeError("relaxed assignment: bad dimensions");
  }
  for (int i = 0; i < k; ++i) {
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
      const double v = at(i, j);
      if (v < -1e-12 || v > 1.0 + 1e-12) {
        throw ShapeError("relaxed assignment: entry outside [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ShapeError("relaxed assignment: row sum != 1");
  }
}

Assignment RelaxedAssignment::round() const {
  Assignment x;
  x.rows.resize(k);
  for (int i = 0; i < k; ++i) {
    int best = 0;
    for (int j = 1; j < m; ++j) {
      if (at(i, j) > at(i, best)) best = j;
    }
    x.rows[i] = best;
  }
  return x;
}

std::vector<double> project_row_simplex(const std::vector<double>& v) {
  const int m = static_cast<int>(v.size());
  if (m == 0) throw ParameterError("project_row_simplex: empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) throw ParameterError("project_row_simplex: non-finite entry");
  }
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  for (int j = 0; j < m; ++j) {
    running += sorted[j];
    const double candidate = (running - 1.0) / (j + 1);
    if (sorted[j] - candidate > 0.0) tau = candidate;  // holds for a prefix of j
  }
  std::vector<double> out(m);
  for (int j = 0; j < m; ++j) out[j] = std::max(v[j] - tau, 0.0);
  return out;
}

std::vector<double> makespan_subgradient(const RelaxedAssignment& X, const TrafficVector& theta) {
  X.validate();
  if (static_cast<int>(theta.values.size()) != X.k) {
    throw ShapeError("makespan_subgradient: theta dimension mismatch");
  }
  std::vector<double> load(X.m, 0.0);
  for (int i = 0; i < X.k; ++i) {
    for (int j = 0; j < X.m; ++j) load[j] += X.at(i, j) * theta.values[i];
  }
  int star = 0;
  for (int j = 1; j < X.m; ++j) {
    if (load[j] > load[star]) star = j;
  }
  std::vector<double> grad(static_cast<size_t>(X.k) * X.m, 0.0);
  for (int i = 0; i < X.k; ++i) grad[static_cast<size_t>(i) * X.m + star] = theta.values[i];
  return grad;
}

namespace {

class StaticPolicy : public Policy {
 public:
  std::string name() const override { return "static"; }
  Block next_block(const StreamView&, int, int, const Assignment& prev) override {
    Block block;
    block.assignments = {prev};
    return block;
  }
};

class OgdPolicy : public Policy {
 public:
  explicit OgdPolicy(OgdOptions options) : options_(options) {}

  std::string name() const override { return "ogd"; }

  void reset(const ProblemShape& shape, const Assignment& x0) override {
    shape_ = shape;
    iterate_ = RelaxedAssignment::one_hot(x0, shape.m);
    eta0_.reset();
  }

  Block next_block(const StreamView& view, int t, int, const Assignment&) override {
    if (!eta0_) eta0_ = options_.eta0 ? *options_.eta0 : auto_eta0(view);
    const int online_t = t - view.online_start() + 1;
    if (online_t > 1) {
      const TrafficVector& prev_theta = view.at(t - 1);
      const std::vector<double> grad = makespan_subgradient(iterate_, prev_theta);
      const double eta = *eta0_ / std::sqrt(static_cast<double>(online_t));
      std::vector<double> row(shape_.m);
      for (int i = 0; i < shape_.k; ++i) {
        for (int j = 0; j < shape_.m; ++j) {
          row[j] = iterate_.at(i, j) - eta * grad[static_cast<size_t>(i) * shape_.m + j];
        }
        const std::vector<double> proj = project_row_simplex(row);
        for (int j = 0; j < shape_.m; ++j) {
          iterate_.matrix[static_cast<size_t>(i) * shape_.m + j] = proj[j];
        }
      }
      iterate_.validate();
    }
    Block block;
    block.assignments = {iterate_.round()};
    return block;
  }

 private:
  double auto_eta0(const StreamView& view) const {
    // Scale from the revealed warmup: 0.1 * m / mean traffic value.
    double sum = 0.0;
    std::int64_t count = 0;
    for (int s = 1; s < view.online_start(); ++s) {
      for (double v : view.at(s).values) {
        sum += v;
        ++count;
      }
    }
    const double mean = count > 0 ? sum / count : 1.0;
    return 0.1 * shape_.m / std::max(mean, 1e-9);
  }

  OgdOptions options_;
  ProblemShape shape_;
  RelaxedAssignment iterate_;
  std::optional<double> eta0_;
};

// Shared by FTL and FTP: minimize an aggregate of observed makespans plus
// the switch away from the previous decision. FTL keeps the whole online
// history; FTP only the last step.
class FollowPolicy : public Policy {
 public:
  FollowPolicy(bool full_history, SubproblemOptions sub)
      : full_history_(full_history), sub_(sub) {}

  std::string name() const override { return full_history_ ? "ftl" : "ftp"; }

  void reset(const ProblemShape& shape, const Assignment&) override { shape_ = shape; }

  Block next_block(const StreamView& view, int t, int, const Assignment& prev) override {
    Block block;
    const int first = full_history_ ? view.online_start() : t - 1;
    if (t == view.online_start()) {
      block.assignments = {prev};  // no online cost observed yet
      return block;
    }
    std::vector<WeightedTheta> terms;
    terms.reserve(t - first);
    for (int s = std::max(first, view.online_start()); s < t; ++s) {
      terms.push_back(WeightedTheta{1.0, view.at(s)});
    }
    SubproblemOptions sub = sub_;
    sub.seed = derive_seed(sub_.seed, {static_cast<std::uint64_t>(t)});
    block.assignments = {solve_subproblem(terms, prev, nullptr, 1.0, shape_, sub)};
    return block;
  }

 private:
  bool full_history_;
  SubproblemOptions sub_;
  ProblemShape shape_;
};

}  // namespace

std::unique_ptr<Policy> make_static_policy() { return std::make_unique<StaticPolicy>(); }

std::unique_ptr<Policy> make_ogd_policy(const OgdOptions& options) {
  return std::make_unique<OgdPolicy>(options);
}

std::unique_ptr<Policy> make_ftl_policy(const SubproblemOptions& sub) {
  return std::make_unique<FollowPolicy>(true, sub);
}

std::unique_ptr<Policy> make_ftp_policy(const SubproblemOptions& sub) {
  return std::make_unique<FollowPolicy>(false, sub);
}

RunOutput static_run(const TrafficSeries& traffic, int t_start, int online_steps,
                     const ProblemShape& shape, const Assignment& x0) {
  auto policy = make_static_policy();
  return run_policy(traffic, t_start, online_steps, shape, x0, *policy);
}

RunOutput ogd_run(const TrafficSeries& traffic, int t_start, int online_steps,
                  const ProblemShape& shape, const Assignment& x0,
                  const OgdOptions& options) {
  auto policy = make_ogd_policy(options);
  return run_policy(traffic, t_start, online_steps, shape, x0, *policy);
}

RunOutput ftl_run(const TrafficSeries& traffic, int t_start, int online_steps,
                  const ProblemShape& shape, const Assignment& x0,
                  const SubproblemOptions& sub) {
  auto policy = make_ftl_policy(sub);
  return run_policy(traffic, t_start, online_steps, shape, x0, *policy);
}

RunOutput ftp_run(const TrafficSeries& traffic, int t_start, int online_steps,
                  const ProblemShape& shape, const Assignment& x0,
                  const SubproblemOptions& sub) {
  auto policy = make_ftp_policy(sub);
  return run_policy(traffic, t_start, online_steps, shape, x0, *policy);
}

}  // namespace smooco
