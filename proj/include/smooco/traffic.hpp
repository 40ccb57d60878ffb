#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smooco/core.hpp"
#include "smooco/predict.hpp"
#include "smooco/rng.hpp"

namespace smooco {

// One sinusoidal component; every topic draws its own amplitude from
// [amplitude_low, amplitude_high] and its own phase from [0, 2pi).
struct SineSpec {
  double period = 24.0;
  double amplitude_low = 1.0;
  double amplitude_high = 2.0;
};

struct TrafficGenConfig {
  std::uint64_t seed = 0;
  int k = 10;
  int horizon = 150;
  std::vector<SineSpec> sine_specs = {{24.0, 1.0, 2.0}, {2.0, 0.5, 1.0}};
  double ar_coeff = 0.9;
  double ar_noise_std = 0.5;
  RationalQuadraticKernel gp_kernel = {1.0, 5.0, 1.0, 0.0};
  double weight_sine = 1.0;
  double weight_ar = 1.0;
  double weight_gp = 1.0;
  double base_offset = 5.0;
  double clamp_floor = 0.0;

  void validate() const;
};

double sine_component(double period, double amplitude, double phase, int t);

// y_0 = 0 (not emitted); y_{t+1} = coeff*y_t + (1-coeff)*w_t with
// w_t ~ N(0, noise_std^2). Returns y_1..y_horizon.
std::vector<double> ar1_path(double coeff, double noise_std, int horizon, Rng& rng);

// One draw from a zero-mean GP at times 1..horizon via Cholesky of the gram
// matrix (1e-8 jitter, escalated if needed).
std::vector<double> gp_path(const RationalQuadraticKernel& kern, int horizon, Rng& rng);

// Per-topic sum of base offset + weighted sine/AR/GP components, clamped at
// clamp_floor. Every topic/component pair runs on its own substream derived
// from the seed, so outputs are reproducible and order-independent.
TrafficSeries generate_traffic(const TrafficGenConfig& config);

// Header "t,topic_0,...,topic_{k-1}", one row per step, values written with
// enough digits to round-trip exactly.
void write_traffic_csv(const std::string& path, const TrafficSeries& series);
TrafficSeries read_traffic_csv(const std::string& path);

}  // namespace smooco
