#include "smooco/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smooco {

void ProblemShape::validate() const {
  if (k < 1) throw ShapeError("shape: k must be >= 1, got " + std::to_string(k));
  if (m < 1) throw ShapeError("shape: m must be >= 1, got " + std::to_string(m));
  if (static_cast<int>(unit_costs.size()) != m) {
    throw ShapeError("shape: unit_costs has " + std::to_string(unit_costs.size()) +
                     " entries, expected m=" + std::to_string(m));
  }
  for (double u : unit_costs) {
    if (!(u >= 0.0)) throw ParameterError("shape: unit costs must be nonnegative");
  }
}

std::int64_t encode_assignment(const Assignment& x, int m) {
  std::int64_t code = 0;
  for (int r : x.rows) code = code * m + r;
  return code;
}

Assignment decode_assignment(std::int64_t code, int k, int m) {
  Assignment x;
  x.rows.assign(k, 0);
  for (int i = k - 1; i >= 0; --i) {
    x.rows[i] = static_cast<int>(code % m);
    code /= m;
  }
  return x;
}

std::int64_t assignment_count(int k, int m, std::int64_t limit) {
  std::int64_t n = 1;
  for (int i = 0; i < k; ++i) {
    if (n > limit / m) return -1;
    n *= m;
  }
  return n;
}

namespace {

void check_sizes(const Assignment& x, const TrafficVector* theta, const ProblemShape& shape) {
  if (static_cast<int>(x.rows.size()) != shape.k) {
    throw ShapeError("assignment has " + std::to_string(x.rows.size()) +
                     " rows, expected k=" + std::to_string(shape.k));
  }
  for (int r : x.rows) {
    if (r < 0 || r >= shape.m) throw ShapeError("assignment row out of [0,m)");
  }
  if (theta != nullptr && static_cast<int>(theta->values.size()) != shape.k) {
    throw ShapeError("traffic vector has " + std::to_string(theta->values.size()) +
                     " entries, expected k=" + std::to_string(shape.k));
  }
}

}  // namespace

double makespan(const Assignment& x, const TrafficVector& theta, const ProblemShape& shape) {
  check_sizes(x, &theta, shape);
  std::vector<double> load(shape.m, 0.0);
  for (int i = 0; i < shape.k; ++i) load[x.rows[i]] += theta.values[i];
  return *std::max_element(load.begin(), load.end());
}

double switching_cost(const Assignment& prev, const Assignment& next, const ProblemShape& shape) {
  check_sizes(prev, nullptr, shape);
  check_sizes(next, nullptr, shape);
  double d = 0.0;
  for (int i = 0; i < shape.k; ++i) {
    if (prev.rows[i] != next.rows[i]) {
      d += shape.unit_costs[prev.rows[i]] + shape.unit_costs[next.rows[i]];
    }
  }
  return d;
}

double step_cost(const Assignment& prev, const Assignment& next,
                 const TrafficVector& theta, const ProblemShape& shape) {
  return makespan(next, theta, shape) + switching_cost(prev, next, shape);
}

double max_switching_cost(const ProblemShape& shape) {
  shape.validate();
  if (shape.m == 1) return 0.0;
  double top1 = 0.0, top2 = 0.0;
  for (double u : shape.unit_costs) {
    if (u >= top1) {
      top2 = top1;
      top1 = u;
    } else if (u > top2) {
      top2 = u;
    }
  }
  return shape.k * (top1 + top2);
}

double lipschitz_constant(const ProblemShape& shape) {
  shape.validate();
  return std::sqrt(static_cast<double>(shape.k));
}

}  // namespace smooco
