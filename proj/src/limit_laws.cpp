#include "spinbath/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spinbath/errors.hpp"
#include "spinbath/parallel.hpp"

namespace spinbath {

double StatisticsSummary::width() const noexcept { return std::sqrt(variance); }

double StatisticsSummary::gaussian_validity_window() const noexcept {
  return variance > 0.0 ? 2.0 / width() : std::numeric_limits<double>::infinity();
}

StatisticsSummary summarize(const CouplingSet& couplings, const EnvironmentAmplitudes& amps) {
  require_matching_sizes(couplings, amps);
  StatisticsSummary s;
  const std::size_t n = couplings.size();
  s.step_means.reserve(n);
  s.step_variances.reserve(n);
  s.couplings.assign(couplings.values().begin(), couplings.values().end());
  s.up_weights.assign(amps.up_weights().begin(), amps.up_weights().end());
  for (std::size_t k = 0; k < n; ++k) {
    const double g = couplings[k];
    const double p = amps.up_weight(k);
    const double q = amps.down_weight(k);
    const double a = (p - q) * g;
    const double b2 = 4.0 * p * q * g * g;
    s.step_means.push_back(a);
    s.step_variances.push_back(b2);
    s.mean += a;
    s.variance += b2;
  }
  return s;
}

double gaussian_ldos(const StatisticsSummary& summary, double energy) {
  if (!(summary.variance > 0.0)) {
    throw DegenerateError("Gaussian LDOS needs B_N^2 > 0 (every step is deterministic)");
  }
  const double d = energy - summary.mean;
  return std::exp(-d * d / (2.0 * summary.variance)) /
         std::sqrt(2.0 * std::numbers::pi * summary.variance);
}

double gaussian_ldos_mass(const StatisticsSummary& summary, double lo, double hi) {
  if (!(summary.variance > 0.0)) {
    throw DegenerateError("Gaussian LDOS needs B_N^2 > 0 (every step is deterministic)");
  }
  const double scale = std::sqrt(2.0 * summary.variance);
  return 0.5 * (std::erf((hi - summary.mean) / scale) - std::erf((lo - summary.mean) / scale));
}

Complex gaussian_decoherence(const StatisticsSummary& summary, double t) {
  return std::polar(std::exp(-0.5 * summary.variance * t * t), summary.mean * t);
}

namespace {

void check_binomial_args(std::size_t n, std::size_t l, double alpha_sq) {
  if (l > n) throw ValidationError("binomial index l must satisfy 0 <= l <= N");
  if (!(alpha_sq >= 0.0 && alpha_sq <= 1.0)) {
    throw ValidationError("|alpha|^2 must lie in [0, 1]");
  }
}

}  // namespace

double laplace_demoivre_weight(std::size_t n, std::size_t l, double alpha_sq) {
  check_binomial_args(n, l, alpha_sq);
  if (alpha_sq == 0.0 || alpha_sq == 1.0) {
    throw DegenerateError("Laplace-de Moivre approximation needs 0 < |alpha|^2 < 1");
  }
  const double beta_sq = 1.0 - alpha_sq;
  const double var = static_cast<double>(n) * alpha_sq * beta_sq;
  const double d = static_cast<double>(l) - static_cast<double>(n) * beta_sq;
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

double binomial_weight(std::size_t n, std::size_t l, double alpha_sq) {
  check_binomial_args(n, l, alpha_sq);
  const double beta_sq = 1.0 - alpha_sq;
  const auto up = static_cast<double>(n - l);
  const auto down = static_cast<double>(l);
  if ((up > 0 && alpha_sq == 0.0) || (down > 0 && beta_sq == 0.0)) return 0.0;
  double log_w = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(up + 1.0) -
                 std::lgamma(down + 1.0);
  if (up > 0) log_w += up * std::log(alpha_sq);
  if (down > 0) log_w += down * std::log(beta_sq);
  return std::exp(log_w);
}

const char* to_string(LindebergVerdict verdict) noexcept {
  switch (verdict) {
    case LindebergVerdict::kSatisfied:
      return "satisfied";
    case LindebergVerdict::kViolated:
      return "violated";
    default:
      return "indeterminate";
  }
}

LindebergReport lindeberg_check(const StatisticsSummary& summary, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("Lindeberg threshold must be positive");
  if (!(summary.variance > 0.0)) {
    throw DegenerateError("Lindeberg check needs B_N > 0");
  }
  LindebergReport report;
  report.threshold = threshold;
  const double width = summary.width();
  double largest = 0.0;
  for (double b2 : summary.step_variances) largest = std::max(largest, std::sqrt(b2));
  report.max_step_ratio = largest / width;

  // x_k - a_k is 2|beta_k|^2 g_k with probability |alpha_k|^2 and
  // -2|alpha_k|^2 g_k with probability |beta_k|^2.
  const double cut = threshold * width;
  double tail = 0.0;
  for (std::size_t k = 0; k < summary.couplings.size(); ++k) {
    const double p = summary.up_weights[k];
    const double q = 1.0 - p;
    const double g = summary.couplings[k];
    const double dev_up = 2.0 * q * std::abs(g);
    const double dev_down = 2.0 * p * std::abs(g);
    if (dev_up >= cut) tail += p * dev_up * dev_up;
    if (dev_down >= cut) tail += q * dev_down * dev_down;
  }
  report.tail_mass = tail / summary.variance;

  if (!std::isfinite(report.max_step_ratio)) {
    report.verdict = LindebergVerdict::kIndeterminate;
  } else if (report.max_step_ratio <= threshold) {
    report.verdict = LindebergVerdict::kSatisfied;
  } else {
    report.verdict = LindebergVerdict::kViolated;
  }
  return report;
}

double log_long_time_average_sq(const EnvironmentAmplitudes& amps) {
  double log_value = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double d = amps.up_weight(k) - amps.down_weight(k);
    log_value += std::log1p(d * d) - std::numbers::ln2;
  }
  return log_value;
}

double long_time_average_sq(const EnvironmentAmplitudes& amps) {
  double value = 1.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double d = amps.up_weight(k) - amps.down_weight(k);
    value *= 0.5 * (1.0 + d * d);
  }
  return value;
}

double default_average_horizon(const CouplingSet& couplings) {
  double slowest = std::numeric_limits<double>::infinity();
  for (double g : couplings.values()) {
    if (g != 0.0) slowest = std::min(slowest, std::abs(g));
  }
  if (!std::isfinite(slowest)) {
    throw DegenerateError("all couplings are zero; there is no time scale to average over");
  }
  return 100.0 * 2.0 * std::numbers::pi / slowest;
}

TimeAverageEstimate estimate_time_average_sq(const CouplingSet& couplings,
                                             const EnvironmentAmplitudes& amps,
                                             double horizon, std::size_t samples,
                                             unsigned threads) {
  require_matching_sizes(couplings, amps);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ValidationError("time-average horizon must be positive and finite");
  }
  if (samples == 0) throw ValidationError("time average needs at least one sample");
  std::vector<double> sorted;
  for (double g : couplings.values()) sorted.push_back(std::abs(g));
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError(
        "time-average estimator requires pairwise distinct |g_k|; degenerate "
        "couplings keep cross terms that do not average out");
  }

  std::vector<double> values(samples);
  const double step = horizon / static_cast<double>(samples);
  detail::parallel_for(samples, threads, [&](std::size_t i) {
    values[i] = std::norm(decoherence_factor(couplings, amps, static_cast<double>(i) * step));
  });

  TimeAverageEstimate est;
  est.horizon = horizon;
  est.samples = samples;
  double total = 0.0;
  for (double v : values) total += v;
  est.mean = total / static_cast<double>(samples);

  const std::size_t batches = std::min(kTimeAverageBatches, samples);
  if (batches >= 2) {
    const std::size_t per = samples / batches;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      double m = 0.0;
      for (std::size_t i = b * per; i < (b + 1) * per; ++i) m += values[i];
      m /= static_cast<double>(per);
      sum += m;
      sum_sq += m * m;
    }
    const auto nb = static_cast<double>(batches);
    const double batch_mean = sum / nb;
    const double var = std::max(0.0, (sum_sq - nb * batch_mean * batch_mean) / (nb - 1.0));
    est.standard_error = std::sqrt(var / nb);
  }
  return est;
}

double empirical_time_average_sq(const CouplingSet& couplings,
                                 const EnvironmentAmplitudes& amps, double horizon,
                                 std::size_t samples, unsigned threads) {
  return estimate_time_average_sq(couplings, amps, horizon, samples, threads).mean;
}

}  // namespace spinbath
