#pragma once

// Seeded coupling/amplitude ensembles and ensemble-averaged traces.
//
// Draw i of realization r for purpose P is a pure function of
// Philox4x32-10(key = seed, counter = {i, r, P, 0}); the four output words
// form two 64-bit integers whose top 53 bits give two uniforms. Results are
// therefore bit-identical across runs, thread counts and platforms with an
// IEEE-754 libm.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "spinbath/model.hpp"

namespace spinbath {

struct FixedCoupling {
  double value = 1.0;
};
struct UniformCoupling {
  double lo = 0.0;
  double hi = 1.0;
};
struct GaussianCoupling {
  double mean = 0.0;
  double sigma = 1.0;
};
struct LorentzianCoupling {
  double center = 0.0;
  double gamma = 1.0;
};

using CouplingDistribution =
    std::variant<FixedCoupling, UniformCoupling, GaussianCoupling, LorentzianCoupling>;

void validate(const CouplingDistribution& dist);
std::string describe(const CouplingDistribution& dist);

/// |alpha_k|^2 = 1/2 for every spin.
struct EqualAmplitudes {};
struct FixedAmplitudes {
  double alpha_sq = 0.5;
};
/// Haar-random spin state: |alpha|^2 uniform on [0, 1] (uniform on the Bloch
/// sphere) and a uniform relative phase on beta.
struct RandomAmplitudes {};

using AmplitudeRule = std::variant<EqualAmplitudes, FixedAmplitudes, RandomAmplitudes>;

void validate(const AmplitudeRule& rule);
std::string describe(const AmplitudeRule& rule);

struct EnsembleSpec {
  CouplingDistribution couplings = GaussianCoupling{};
  AmplitudeRule amplitudes = EqualAmplitudes{};
  std::size_t spins = 1;
  std::size_t realizations = 1;
  std::uint64_t seed = 0;
};

void validate(const EnsembleSpec& spec);

enum class StreamPurpose : std::uint32_t { kCouplings = 0, kAmplitudes = 1 };

/// Two independent uniforms in (0, 1) addressed by (seed, purpose, realization, index).
std::pair<double, double> uniform_pair(std::uint64_t seed, StreamPurpose purpose,
                                       std::uint32_t realization, std::uint32_t index);

CouplingSet sample_couplings(const CouplingDistribution& dist, std::size_t spins,
                             std::uint64_t seed, std::uint32_t realization = 0);

EnvironmentAmplitudes sample_amplitudes(const AmplitudeRule& rule, std::size_t spins,
                                        std::uint64_t seed, std::uint32_t realization = 0);

struct EnsembleResult {
  /// Complex pointwise mean over realizations, reduced in index order.
  DecoherenceTrace mean;
  std::vector<double> stderr_re;
  std::vector<double> stderr_im;
  /// Pointwise mean of |r| over realizations.
  std::vector<double> mean_abs;
  /// Filled only when requested.
  std::vector<DecoherenceTrace> realizations;
};

EnsembleResult ensemble_average_trace(const EnsembleSpec& spec, const TimeGrid& grid,
                                      bool keep_realizations = false, unsigned threads = 1);

}  // namespace spinbath
