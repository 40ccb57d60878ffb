#include "smooco/traffic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "smooco/csv.hpp"
#include "smooco/errors.hpp"

namespace smooco {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Substream tags; never reorder, they are part of the reproducibility
// contract between seeds and emitted series.
constexpr std::uint64_t kTagSine = 1;
constexpr std::uint64_t kTagAr = 2;
constexpr std::uint64_t kTagGp = 3;

}  // namespace

void TrafficGenConfig::validate() const {
  if (k < 1) throw ParameterError("traffic: k must be >= 1");
  if (horizon < 1) throw ParameterError("traffic: horizon must be >= 1");
  for (const auto& s : sine_specs) {
    if (!(s.period > 0.0)) throw ParameterError("traffic: sine period must be > 0");
    if (!(s.amplitude_low >= 0.0) || s.amplitude_high < s.amplitude_low) {
      throw ParameterError("traffic: amplitude range must satisfy 0 <= low <= high");
    }
  }
  if (!(ar_coeff >= 0.0) || ar_coeff >= 1.0) {
    throw ParameterError("traffic: ar_coeff must lie in [0,1)");
  }
  if (!(ar_noise_std >= 0.0)) throw ParameterError("traffic: ar_noise_std must be >= 0");
  gp_kernel.validate();
}

double sine_component(double period, double amplitude, double phase, int t) {
  if (!(period > 0.0)) throw ParameterError("sine_component: period must be > 0");
  return amplitude * std::sin(kTwoPi * t / period + phase);
}

std::vector<double> ar1_path(double coeff, double noise_std, int horizon, Rng& rng) {
  if (horizon < 0) throw ParameterError("ar1_path: negative horizon");
  if (!(std::abs(coeff) < 1.0)) throw ParameterError("ar1_path: |coeff| must be < 1");
  std::vector<double> path(horizon);
  double y = 0.0;
  for (int t = 0; t < horizon; ++t) {
    y = coeff * y + (1.0 - coeff) * rng.normal(0.0, noise_std);
    path[t] = y;
  }
  return path;
}

std::vector<double> gp_path(const RationalQuadraticKernel& kern, int horizon, Rng& rng) {
  kern.validate();
  if (horizon < 1) throw ParameterError("gp_path: horizon must be >= 1");
  Eigen::MatrixXd K(horizon, horizon);
  for (int i = 0; i < horizon; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = kernel_eval(kern, i + 1.0, j + 1.0);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  double jitter = 1e-8;
  Eigen::MatrixXd L;
  bool ok = false;
  for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
      ok = true;
    } else {
      jitter *= 10.0;
    }
  }
  if (!ok) throw NumericalError("gp_path: gram matrix not positive definite");

  Eigen::VectorXd z(horizon);
  for (int i = 0; i < horizon; ++i) z(i) = rng.normal();
  const Eigen::VectorXd sample = L * z;
  return std::vector<double>(sample.data(), sample.data() + horizon);
}

TrafficSeries generate_traffic(const TrafficGenConfig& config) {
  config.validate();
  TrafficSeries series;
  series.steps.assign(config.horizon,
                      TrafficVector{std::vector<double>(config.k, 0.0)});

  for (int i = 0; i < config.k; ++i) {
    std::vector<double> topic(config.horizon, config.base_offset);

    for (size_t w = 0; w < config.sine_specs.size(); ++w) {
      const SineSpec& spec = config.sine_specs[w];
      Rng rng(derive_seed(config.seed, {kTagSine, static_cast<std::uint64_t>(i), w}));
      const double amp = rng.uniform(spec.amplitude_low, spec.amplitude_high);
      const double phase = rng.uniform(0.0, kTwoPi);
      for (int t = 0; t < config.horizon; ++t) {
        topic[t] += config.weight_sine * sine_component(spec.period, amp, phase, t + 1);
      }
    }

    if (config.weight_ar != 0.0) {
      Rng rng(derive_seed(config.seed, {kTagAr, static_cast<std::uint64_t>(i)}));
      const auto ar = ar1_path(config.ar_coeff, config.ar_noise_std, config.horizon, rng);
      for (int t = 0; t < config.horizon; ++t) topic[t] += config.weight_ar * ar[t];
    }

    if (config.weight_gp != 0.0) {
      Rng rng(derive_seed(config.seed, {kTagGp, static_cast<std::uint64_t>(i)}));
      const auto gp = gp_path(config.gp_kernel, config.horizon, rng);
      for (int t = 0; t < config.horizon; ++t) topic[t] += config.weight_gp * gp[t];
    }

    for (int t = 0; t < config.horizon; ++t) {
      series.steps[t].values[i] = std::max(topic[t], config.clamp_floor);
    }
  }
  return series;
}

void write_traffic_csv(const std::string& path, const TrafficSeries& series) {
  std::vector<std::string> lines;
  lines.reserve(series.length() + 1);
  std::string header = "t";
  for (int i = 0; i < series.topics(); ++i) header += ",topic_" + std::to_string(i);
  lines.push_back(std::move(header));
  for (int t = 0; t < series.length(); ++t) {
    std::string row = std::to_string(t + 1);
    for (double v : series.steps[t].values) {
      row += ',';
      row += format_double(v);
    }
    lines.push_back(std::move(row));
  }
  write_lines(path, lines);
}

TrafficSeries read_traffic_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.empty() || table.header[0] != "t") {
    throw ParameterError("traffic csv: first column must be 't'");
  }
  const int k = static_cast<int>(table.header.size()) - 1;
  if (k < 1) throw ParameterError("traffic csv: no topic columns");
  TrafficSeries series;
  series.steps.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (static_cast<int>(row.size()) != k + 1) {
      throw ParameterError("traffic csv: ragged row");
    }
    TrafficVector tv;
    tv.values.reserve(k);
    for (int i = 0; i < k; ++i) tv.values.push_back(parse_double(row[i + 1]));
    series.steps.push_back(std::move(tv));
  }
  return series;
}

}  // namespace smooco
