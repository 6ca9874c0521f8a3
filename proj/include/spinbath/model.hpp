#pragma once

// Central-spin dephasing model: a two-level system coupled through
// (|0><0| - |1><1|) * sum_k g_k/2 sigma_z^k to N environment spins,
// with hbar = 1 and g_k in angular-frequency units.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spinbath {

using Complex = std::complex<double>;

/// Tolerance for every normalization check. Inputs outside it are rejected.
inline constexpr double kNormTolerance = 1e-12;

/// Above this many spins the decoherence product is accumulated as a sum of
/// log-magnitudes and phases so that |r| does not underflow.
inline constexpr std::size_t kLogAccumulationThreshold = 10000;

class CouplingSet {
 public:
  explicit CouplingSet(std::vector<double> couplings);

  std::size_t size() const noexcept { return couplings_.size(); }
  std::span<const double> values() const noexcept { return couplings_; }
  double operator[](std::size_t k) const { return couplings_[k]; }

  /// Couplings of two disjoint environments placed side by side.
  static CouplingSet concat(const CouplingSet& lhs, const CouplingSet& rhs);

 private:
  std::vector<double> couplings_;
};

/// Initial state alpha |up> + beta |down> of one environment spin.
struct AmplitudePair {
  Complex up;
  Complex down;
};

/// Product initial state of the environment. The branch weights |alpha_k|^2
/// and |beta_k|^2 are cached next to the amplitudes; when built through
/// from_weights() they are stored exactly as given.
class EnvironmentAmplitudes {
 public:
  explicit EnvironmentAmplitudes(std::vector<AmplitudePair> pairs);

  /// Real non-negative amplitudes with |alpha_k|^2 = up_weights[k].
  static EnvironmentAmplitudes from_weights(std::span<const double> up_weights);
  static EnvironmentAmplitudes concat(const EnvironmentAmplitudes& lhs,
                                      const EnvironmentAmplitudes& rhs);

  std::size_t size() const noexcept { return pairs_.size(); }
  std::span<const AmplitudePair> pairs() const noexcept { return pairs_; }
  const AmplitudePair& operator[](std::size_t k) const { return pairs_[k]; }
  double up_weight(std::size_t k) const { return up_weights_[k]; }
  double down_weight(std::size_t k) const { return down_weights_[k]; }
  std::span<const double> up_weights() const noexcept { return up_weights_; }
  std::span<const double> down_weights() const noexcept { return down_weights_; }

 private:
  EnvironmentAmplitudes(std::vector<AmplitudePair> pairs,
                        std::vector<double> up_weights,
                        std::vector<double> down_weights);

  std::vector<AmplitudePair> pairs_;
  std::vector<double> up_weights_;
  std::vector<double> down_weights_;
};

/// System qubit a|0> + b|1>.
class SystemState {
 public:
  SystemState(Complex a, Complex b);

  Complex a() const noexcept { return a_; }
  Complex b() const noexcept { return b_; }

 private:
  Complex a_;
  Complex b_;
};

/// Uniform grid of `steps` samples from start to stop inclusive. A single
/// step yields the one sample `start` and requires start == stop.
class TimeGrid {
 public:
  TimeGrid(double start, double stop, std::size_t steps);

  double start() const noexcept { return start_; }
  double stop() const noexcept { return stop_; }
  std::size_t steps() const noexcept { return steps_; }
  double spacing() const noexcept;
  double at(std::size_t i) const;
  std::vector<double> samples() const;

 private:
  double start_;
  double stop_;
  std::size_t steps_;
};

struct TraceMetadata {
  std::size_t spins = 0;
  std::string ensemble;
  std::uint64_t seed = 0;
};

struct DecoherenceTrace {
  std::vector<double> times;
  std::vector<Complex> values;
  TraceMetadata meta;
};

struct ReducedDensityMatrix {
  Complex rho00;
  Complex rho01;
  Complex rho10;
  Complex rho11;

  Complex trace() const noexcept { return rho00 + rho11; }
  /// Tr rho^2.
  double purity() const noexcept;
  /// Eigenvalues in ascending order.
  std::pair<double, double> eigenvalues() const noexcept;
};

enum class Branch { kZero = 0, kOne = 1 };

/// Maps an integer label {0, 1} to a Branch; anything else is a ValidationError.
Branch branch_from_label(int label);

/// r(t) = prod_k (|alpha_k|^2 e^{i g_k t} + |beta_k|^2 e^{-i g_k t}).
///
/// Each factor is evaluated as cos(g t) + i (|alpha|^2 - |beta|^2) sin(g t),
/// so r(0) is exactly 1 and r(-t) is exactly conj(r(t)). For more than
/// kLogAccumulationThreshold spins the magnitude is accumulated in log space.
Complex decoherence_factor(const CouplingSet& couplings,
                           const EnvironmentAmplitudes& amps, double t);

/// Pointwise decoherence_factor over the grid; values are bit-identical to the
/// scalar call at each sample. `threads` > 1 splits the samples into ranges.
DecoherenceTrace decoherence_trace(const CouplingSet& couplings,
                                   const EnvironmentAmplitudes& amps,
                                   const TimeGrid& grid, unsigned threads = 1);

/// Environment branch state |E_0(t)> (alpha_k e^{+i g_k t/2}, beta_k e^{-i g_k t/2})
/// or |E_1(t)> = |E_0(-t)>.
EnvironmentAmplitudes evolve_environment_branch(const CouplingSet& couplings,
                                                const EnvironmentAmplitudes& amps,
                                                double t, Branch branch);

/// <bra|ket> for two product states of the same size.
Complex overlap(const EnvironmentAmplitudes& bra, const EnvironmentAmplitudes& ket);

/// rho_S = [[|a|^2, a b* r], [a* b r*, |b|^2]].
ReducedDensityMatrix reduced_density_matrix(const SystemState& system, Complex r);

// Throws DimensionError unless both describe the same number of spins.
void require_matching_sizes(const CouplingSet& couplings,
                            const EnvironmentAmplitudes& amps);

}  // namespace spinbath
