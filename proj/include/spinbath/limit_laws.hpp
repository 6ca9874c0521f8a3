#pragma once

// Statistics of the weighted random walk and its Gaussian limit.
//
// Step k takes the value +g_k with probability |alpha_k|^2 and -g_k with
// probability |beta_k|^2, so its mean is a_k = (|alpha_k|^2 - |beta_k|^2) g_k
// and its variance b_k^2 = g_k^2 - a_k^2 = 4 |alpha_k|^2 |beta_k|^2 g_k^2.
// When no single step dominates B_N^2 = sum_k b_k^2 (Lindeberg), the energy
// distribution tends to a Gaussian of mean E_N = sum_k a_k and variance
// B_N^2, and r(t) ~ exp(i E_N t) exp(-B_N^2 t^2 / 2).

#include <cstddef>
#include <vector>

#include "spinbath/model.hpp"

namespace spinbath {

inline constexpr double kDefaultLindebergThreshold = 0.2;

struct StatisticsSummary {
  std::vector<double> step_means;      // a_k
  std::vector<double> step_variances;  // b_k^2
  std::vector<double> couplings;       // g_k, kept for the Lindeberg tail sum
  std::vector<double> up_weights;      // |alpha_k|^2
  double mean = 0.0;                   // E_N
  double variance = 0.0;               // B_N^2

  double width() const noexcept;  // B_N
  /// Times t <= 2 / B_N, reported next to every Gaussian approximation.
  double gaussian_validity_window() const noexcept;
};

StatisticsSummary summarize(const CouplingSet& couplings, const EnvironmentAmplitudes& amps);

/// Normal density with mean E_N and variance B_N^2. Throws DegenerateError
/// when B_N^2 == 0.
double gaussian_ldos(const StatisticsSummary& summary, double energy);

/// Probability mass of the Gaussian LDOS inside [lo, hi].
double gaussian_ldos_mass(const StatisticsSummary& summary, double lo, double hi);

/// exp(i E_N t) exp(-B_N^2 t^2 / 2).
Complex gaussian_decoherence(const StatisticsSummary& summary, double t);

/// Gaussian approximation to C(N, l) |alpha|^{2(N-l)} |beta|^{2l}:
/// exp(-(l - N|beta|^2)^2 / (2 N |alpha beta|^2)) / sqrt(2 pi N |alpha beta|^2).
double laplace_demoivre_weight(std::size_t n, std::size_t l, double alpha_sq);

/// Exact binomial term C(N, l) |alpha|^{2(N-l)} |beta|^{2l}, evaluated through
/// lgamma so that it stays finite for large N.
double binomial_weight(std::size_t n, std::size_t l, double alpha_sq);

enum class LindebergVerdict { kSatisfied, kViolated, kIndeterminate };

const char* to_string(LindebergVerdict verdict) noexcept;

struct LindebergReport {
  double max_step_ratio = 0.0;  // max_k b_k / B_N
  /// Finite-N Lindeberg sum at tau = threshold:
  /// B_N^-2 sum_k E[(x_k - a_k)^2 ; |x_k - a_k| >= tau B_N].
  double tail_mass = 0.0;
  double threshold = 0.0;
  LindebergVerdict verdict = LindebergVerdict::kIndeterminate;
};

/// Satisfied iff max_k b_k / B_N <= threshold. A non-finite ratio is
/// reported as indeterminate. Throws DegenerateError when B_N == 0.
LindebergReport lindeberg_check(const StatisticsSummary& summary,
                                double threshold = kDefaultLindebergThreshold);

/// Long-time average of |r|^2: 2^-N prod_k (1 + (|alpha_k|^2 - |beta_k|^2)^2).
/// Valid for pairwise incommensurate couplings. Underflows to 0 for very
/// large N; use log_long_time_average_sq there.
double long_time_average_sq(const EnvironmentAmplitudes& amps);
double log_long_time_average_sq(const EnvironmentAmplitudes& amps);

/// 100 * 2 pi / min_k |g_k| over the nonzero couplings.
double default_average_horizon(const CouplingSet& couplings);

struct TimeAverageEstimate {
  double mean = 0.0;
  /// Batch-means standard error over kTimeAverageBatches contiguous blocks.
  double standard_error = 0.0;
  double horizon = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kTimeAverageBatches = 20;

/// Mean of |r(t_i)|^2 at t_i = i * horizon / samples, i = 0 .. samples-1
/// (left-endpoint grid, so whole periods average exactly).
TimeAverageEstimate estimate_time_average_sq(const CouplingSet& couplings,
                                             const EnvironmentAmplitudes& amps,
                                             double horizon, std::size_t samples,
                                             unsigned threads = 1);

double empirical_time_average_sq(const CouplingSet& couplings,
                                 const EnvironmentAmplitudes& amps, double horizon,
                                 std::size_t samples, unsigned threads = 1);

}  // namespace spinbath
