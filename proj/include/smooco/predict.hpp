#pragma once

#include <vector>

#include "smooco/core.hpp"
#include "smooco/rng.hpp"

namespace smooco {

// k(t,t') = variance * (1 + (t-t')^2 / (2*alpha*length_scale^2))^(-alpha).
// noise_variance is only added on the diagonal when fitting.
struct RationalQuadraticKernel {
  double variance = 1.0;
  double length_scale = 5.0;
  double alpha = 1.0;
  double noise_variance = 0.1;

  void validate() const;
};

double kernel_eval(const RationalQuadraticKernel& kern, double t1, double t2);

struct GpPrediction {
  std::vector<double> means;
  std::vector<double> stds;
};

// Exact GP regression of a scalar series observed at times 1..n. The history
// is centered on its mean before fitting and the mean is added back, so the
// prior pulls long-range extrapolations toward the history average instead of
// zero. Predictive stds are of the latent function (no observation noise).
GpPrediction gp_fit_predict(const std::vector<double>& history,
                            const std::vector<double>& query_times,
                            const RationalQuadraticKernel& kern);

// Multi-step forecast for all topics with per-step uncertainty radii.
struct Forecast {
  int start_time = 0;                 // first predicted step t
  std::vector<TrafficVector> means;   // offsets 0..H-1 -> steps t..t+H-1
  std::vector<double> uncertainties;  // Euclidean radius per step
};

// Fits one GP per topic on the revealed prefix (steps 1..t-1) and predicts
// steps t..t+H-1. The kernel's variance is rescaled per topic by the
// empirical variance of that topic's history, predicted means are clamped at
// zero (traffic cannot be negative), and the step radius aggregates the
// per-topic stds as z * sqrt(sum_i std_i^2).
Forecast forecast(const TrafficSeries& prefix, int t, int horizon,
                  const RationalQuadraticKernel& kern, double z = 1.0);

// Test-harness predictor: the truth plus a uniform perturbation drawn inside
// the Euclidean ball of radius bound(s), s = 1-based offset into the window.
// Clamping negatives to zero only shrinks the distance to the (nonnegative)
// truth; the radius is re-checked after clamping anyway.
Forecast oracle_forecast(const TrafficSeries& truth, int t, int horizon,
                         const std::vector<double>& bounds, Rng& rng);

}  // namespace smooco
