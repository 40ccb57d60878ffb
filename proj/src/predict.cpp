#include "smooco/predict.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "smooco/errors.hpp"

namespace smooco {

void RationalQuadraticKernel::validate() const {
  if (!(variance >= 0.0)) throw ParameterError("kernel: variance must be >= 0");
  if (!(length_scale > 0.0)) throw ParameterError("kernel: length_scale must be > 0");
  if (!(alpha > 0.0)) throw ParameterError("kernel: alpha must be > 0");
  if (!(noise_variance >= 0.0)) throw ParameterError("kernel: noise_variance must be >= 0");
}

double kernel_eval(const RationalQuadraticKernel& kern, double t1, double t2) {
  const double d = t1 - t2;
  const double base = 1.0 + d * d / (2.0 * kern.alpha * kern.length_scale * kern.length_scale);
  return kern.variance * std::pow(base, -kern.alpha);
}

namespace {

Eigen::MatrixXd gram_matrix(const RationalQuadraticKernel& kern, int n) {
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = kernel_eval(kern, i + 1.0, j + 1.0);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

// Cholesky with escalating diagonal jitter; the matrices here are tiny
// (hundreds of rows) but nearly-duplicate time points can make them
// borderline singular when noise_variance is 0.
Eigen::LLT<Eigen::MatrixXd> jittered_llt(Eigen::MatrixXd K, double first_jitter) {
  double jitter = first_jitter;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) return llt;
    jitter *= 10.0;
  }
  throw NumericalError("kernel matrix not positive definite after jitter escalation");
}

}  // namespace

GpPrediction gp_fit_predict(const std::vector<double>& history,
                            const std::vector<double>& query_times,
                            const RationalQuadraticKernel& kern) {
  kern.validate();
  const int n = static_cast<int>(history.size());
  const int q = static_cast<int>(query_times.size());
  if (n == 0) throw ParameterError("gp_fit_predict: empty history");

  double mean = 0.0;
  for (double v : history) mean += v;
  mean /= n;

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = history[i] - mean;

  Eigen::MatrixXd K = gram_matrix(kern, n);
  K.diagonal().array() += kern.noise_variance;
  const auto llt = jittered_llt(std::move(K), 1e-8);
  const Eigen::VectorXd alpha_vec = llt.solve(y);

  GpPrediction out;
  out.means.resize(q);
  out.stds.resize(q);
  Eigen::VectorXd kstar(n);
  for (int j = 0; j < q; ++j) {
    const double tq = query_times[j];
    for (int i = 0; i < n; ++i) kstar(i) = kernel_eval(kern, i + 1.0, tq);
    out.means[j] = mean + kstar.dot(alpha_vec);
    const Eigen::VectorXd v = llt.solve(kstar);
    double var = kernel_eval(kern, tq, tq) - kstar.dot(v);
    if (var < 0.0) var = 0.0;
    out.stds[j] = std::sqrt(var);
  }
  return out;
}

Forecast forecast(const TrafficSeries& prefix, int t, int horizon,
                  const RationalQuadraticKernel& kern, double z) {
  kern.validate();
  if (horizon < 1) throw ParameterError("forecast: horizon must be >= 1");
  if (t < 2) throw ParameterError("forecast: need at least one revealed step before t");
  if (prefix.length() < t - 1) {
    throw ParameterError("forecast: prefix holds " + std::to_string(prefix.length()) +
                         " steps, need " + std::to_string(t - 1));
  }
  if (!(z > 0.0)) throw ParameterError("forecast: z must be > 0");
  const int k = prefix.topics();
  const int n = t - 1;

  std::vector<double> query(horizon);
  for (int s = 0; s < horizon; ++s) query[s] = static_cast<double>(t + s);

  Forecast fc;
  fc.start_time = t;
  fc.means.assign(horizon, TrafficVector{std::vector<double>(k, 0.0)});
  std::vector<double> var_sum(horizon, 0.0);

  std::vector<double> topic_hist(n);
  for (int i = 0; i < k; ++i) {
    double mean = 0.0;
    for (int s = 0; s < n; ++s) {
      topic_hist[s] = prefix.steps[s].values[i];
      mean += topic_hist[s];
    }
    mean /= n;
    double var = 0.0;
    for (double v : topic_hist) var += (v - mean) * (v - mean);
    var /= n;

    RationalQuadraticKernel scaled = kern;
    scaled.variance = kern.variance * std::max(var, 1e-12);
    const GpPrediction pred = gp_fit_predict(topic_hist, query, scaled);
    for (int s = 0; s < horizon; ++s) {
      fc.means[s].values[i] = std::max(pred.means[s], 0.0);
      var_sum[s] += pred.stds[s] * pred.stds[s];
    }
  }

  fc.uncertainties.resize(horizon);
  for (int s = 0; s < horizon; ++s) fc.uncertainties[s] = z * std::sqrt(var_sum[s]);
  return fc;
}

Forecast oracle_forecast(const TrafficSeries& truth, int t, int horizon,
                         const std::vector<double>& bounds, Rng& rng) {
  if (horizon < 1) throw ParameterError("oracle_forecast: horizon must be >= 1");
  if (static_cast<int>(bounds.size()) < horizon) {
    throw ParameterError("oracle_forecast: need a bound per step");
  }
  if (truth.length() < t - 1 + horizon) {
    throw ParameterError("oracle_forecast: truth too short for requested window");
  }
  const int k = truth.topics();

  Forecast fc;
  fc.start_time = t;
  fc.uncertainties.assign(bounds.begin(), bounds.begin() + horizon);
  fc.means.reserve(horizon);
  for (int s = 0; s < horizon; ++s) {
    const double eps = bounds[s];
    if (!(eps >= 0.0)) throw ParameterError("oracle_forecast: negative bound");
    const TrafficVector& tv = truth.steps[t - 1 + s];

    // Uniform draw in the eps-ball: Gaussian direction, radius eps * U^(1/k).
    std::vector<double> dir(k, 0.0);
    double norm2 = 0.0;
    for (int i = 0; i < k; ++i) {
      dir[i] = rng.normal();
      norm2 += dir[i] * dir[i];
    }
    const double norm = std::sqrt(norm2);
    const double radius = eps * std::pow(rng.uniform(), 1.0 / k);
    TrafficVector pred{std::vector<double>(k, 0.0)};
    double err2 = 0.0;
    for (int i = 0; i < k; ++i) {
      const double offset = norm > 0.0 ? radius * dir[i] / norm : 0.0;
      pred.values[i] = std::max(tv.values[i] + offset, 0.0);
      const double e = pred.values[i] - tv.values[i];
      err2 += e * e;
    }
    if (std::sqrt(err2) > eps * (1.0 + 1e-12) + 1e-15) {
      throw NumericalError("oracle_forecast: perturbation escaped its radius");
    }
    fc.means.push_back(std::move(pred));
  }
  return fc;
}

}  // namespace smooco
