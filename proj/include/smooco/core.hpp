#pragma once

#include <cstdint>
#include <vector>

#include "smooco/errors.hpp"

namespace smooco {

// k topics assigned to m servers; unit_costs[j] is the per-topic price of
// touching server j when a topic moves on or off it.
struct ProblemShape {
  int k = 0;
  int m = 0;
  std::vector<double> unit_costs;

  // Throws ShapeError / ParameterError on nonsense (k,m < 1, size mismatch,
  // negative unit cost).
  void validate() const;
};

// One decision: rows[i] is the server hosting topic i. Hard assignment,
// every topic on exactly one server.
struct Assignment {
  std::vector<int> rows;

  bool operator==(const Assignment& other) const { return rows == other.rows; }
  bool operator!=(const Assignment& other) const { return rows != other.rows; }
};

// Per-topic traffic rates for one time step.
struct TrafficVector {
  std::vector<double> values;
};

// steps[i] holds the traffic of time step i+1; steps are 1-based in every
// public time argument, 0-based only inside vectors.
struct TrafficSeries {
  std::vector<TrafficVector> steps;

  int length() const { return static_cast<int>(steps.size()); }
  int topics() const { return steps.empty() ? 0 : static_cast<int>(steps[0].values.size()); }
};

// Lexicographic rank of an assignment, topic 0 most significant. Total order
// used for every tie-break in the solvers, so "smallest encoding" is
// deterministic and matches plain enumeration order.
std::int64_t encode_assignment(const Assignment& x, int m);
Assignment decode_assignment(std::int64_t code, int k, int m);

// Number of assignments m^k, or -1 on overflow past `limit`.
std::int64_t assignment_count(int k, int m, std::int64_t limit);

// Peak server load: max_j sum of theta over topics assigned to j.
double makespan(const Assignment& x, const TrafficVector& theta, const ProblemShape& shape);

// Movement cost: each topic that changes server pays the unit cost of the
// server it leaves plus the one it joins. Symmetric, and a metric on
// assignments whenever all unit costs are positive.
double switching_cost(const Assignment& prev, const Assignment& next, const ProblemShape& shape);

// makespan(next, theta) + switching_cost(prev, next).
double step_cost(const Assignment& prev, const Assignment& next,
                 const TrafficVector& theta, const ProblemShape& shape);

// Largest possible switching cost: every topic moves between the two most
// expensive servers. Zero when m == 1 (nowhere to move).
double max_switching_cost(const ProblemShape& shape);

// Lipschitz constant of theta -> makespan(x, theta) in the Euclidean norm,
// uniform over x: sqrt(k).
double lipschitz_constant(const ProblemShape& shape);

}  // namespace smooco
