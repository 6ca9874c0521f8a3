#include "spinbath/ensembles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spinbath/errors.hpp"
#include "spinbath/parallel.hpp"
#include "spinbath/philox.hpp"

namespace spinbath {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite");
}

}  // namespace

void validate(const CouplingDistribution& dist) {
  std::visit(Overloaded{
                 [](const FixedCoupling& d) { require_finite(d.value, "fixed coupling"); },
                 [](const UniformCoupling& d) {
                   require_finite(d.lo, "uniform lo");
                   require_finite(d.hi, "uniform hi");
                   if (!(d.lo < d.hi)) throw ValidationError("uniform couplings need lo < hi");
                 },
                 [](const GaussianCoupling& d) {
                   require_finite(d.mean, "gaussian mean");
                   if (!(d.sigma > 0.0) || !std::isfinite(d.sigma)) {
                     throw ValidationError("gaussian couplings need sigma > 0");
                   }
                 },
                 [](const LorentzianCoupling& d) {
                   require_finite(d.center, "lorentzian center");
                   if (!(d.gamma > 0.0) || !std::isfinite(d.gamma)) {
                     throw ValidationError("lorentzian couplings need gamma > 0");
                   }
                 },
             },
             dist);
}

std::string describe(const CouplingDistribution& dist) {
  return std::visit(
      Overloaded{
          [](const FixedCoupling& d) { return "fixed(g=" + format_double(d.value) + ")"; },
          [](const UniformCoupling& d) {
            return "uniform(lo=" + format_double(d.lo) + ",hi=" + format_double(d.hi) + ")";
          },
          [](const GaussianCoupling& d) {
            return "gaussian(mean=" + format_double(d.mean) + ",sigma=" + format_double(d.sigma) +
                   ")";
          },
          [](const LorentzianCoupling& d) {
            return "lorentzian(center=" + format_double(d.center) +
                   ",gamma=" + format_double(d.gamma) + ")";
          },
      },
      dist);
}

void validate(const AmplitudeRule& rule) {
  if (const auto* fixed = std::get_if<FixedAmplitudes>(&rule)) {
    if (!(fixed->alpha_sq >= 0.0 && fixed->alpha_sq <= 1.0)) {
      throw ValidationError("fixed amplitude rule needs |alpha|^2 in [0, 1]");
    }
  }
}

std::string describe(const AmplitudeRule& rule) {
  return std::visit(Overloaded{
                        [](const EqualAmplitudes&) { return std::string("equal"); },
                        [](const FixedAmplitudes& r) {
                          return "fixed(alpha_sq=" + format_double(r.alpha_sq) + ")";
                        },
                        [](const RandomAmplitudes&) { return std::string("random"); },
                    },
                    rule);
}

void validate(const EnsembleSpec& spec) {
  validate(spec.couplings);
  validate(spec.amplitudes);
  if (spec.spins == 0) throw ValidationError("ensemble needs at least one spin");
  if (spec.realizations == 0) throw ValidationError("ensemble needs at least one realization");
  if (spec.realizations > std::numeric_limits<std::uint32_t>::max() ||
      spec.spins > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("ensemble size exceeds the 32-bit counter space");
  }
}

std::pair<double, double> uniform_pair(std::uint64_t seed, StreamPurpose purpose,
                                       std::uint32_t realization, std::uint32_t index) {
  const Philox4x32 rng(seed);
  const auto out = rng({index, realization, static_cast<std::uint32_t>(purpose), 0u});
  const std::uint64_t w0 = (std::uint64_t{out[1]} << 32) | out[0];
  const std::uint64_t w1 = (std::uint64_t{out[3]} << 32) | out[2];
  return {to_open_unit_interval(w0), to_open_unit_interval(w1)};
}

CouplingSet sample_couplings(const CouplingDistribution& dist, std::size_t spins,
                             std::uint64_t seed, std::uint32_t realization) {
  validate(dist);
  if (spins == 0) throw ValidationError("need at least one spin");
  std::vector<double> g(spins);
  for (std::size_t i = 0; i < spins; ++i) {
    const auto [u0, u1] = uniform_pair(seed, StreamPurpose::kCouplings, realization,
                                       static_cast<std::uint32_t>(i));
    g[i] = std::visit(
        Overloaded{
            [](const FixedCoupling& d) { return d.value; },
            [u = u0](const UniformCoupling& d) { return d.lo + (d.hi - d.lo) * u; },
            [u0, u1](const GaussianCoupling& d) {
              // Box-Muller, cosine branch only.
              const double radius = std::sqrt(-2.0 * std::log(u0));
              return d.mean + d.sigma * radius * std::cos(2.0 * std::numbers::pi * u1);
            },
            [u = u0](const LorentzianCoupling& d) {
              // Inverse CDF of the Cauchy distribution.
              return d.center + d.gamma * std::tan(std::numbers::pi * (u - 0.5));
            },
        },
        dist);
  }
  return CouplingSet(std::move(g));
}

EnvironmentAmplitudes sample_amplitudes(const AmplitudeRule& rule, std::size_t spins,
                                        std::uint64_t seed, std::uint32_t realization) {
  validate(rule);
  if (spins == 0) throw ValidationError("need at least one spin");
  if (std::holds_alternative<EqualAmplitudes>(rule)) {
    return EnvironmentAmplitudes::from_weights(std::vector<double>(spins, 0.5));
  }
  if (const auto* fixed = std::get_if<FixedAmplitudes>(&rule)) {
    return EnvironmentAmplitudes::from_weights(std::vector<double>(spins, fixed->alpha_sq));
  }
  std::vector<AmplitudePair> pairs(spins);
  for (std::size_t i = 0; i < spins; ++i) {
    const auto [u0, u1] = uniform_pair(seed, StreamPurpose::kAmplitudes, realization,
                                       static_cast<std::uint32_t>(i));
    const double phase = 2.0 * std::numbers::pi * u1;
    pairs[i] = {Complex(std::sqrt(u0), 0.0),
                std::sqrt(1.0 - u0) * Complex(std::cos(phase), std::sin(phase))};
  }
  return EnvironmentAmplitudes(std::move(pairs));
}

EnsembleResult ensemble_average_trace(const EnsembleSpec& spec, const TimeGrid& grid,
                                      bool keep_realizations, unsigned threads) {
  validate(spec);
  const std::size_t m = spec.realizations;
  const std::size_t steps = grid.steps();

  std::vector<DecoherenceTrace> traces(m);
  detail::parallel_for(m, threads, [&](std::size_t r) {
    const auto idx = static_cast<std::uint32_t>(r);
    const CouplingSet g = sample_couplings(spec.couplings, spec.spins, spec.seed, idx);
    const EnvironmentAmplitudes amps =
        sample_amplitudes(spec.amplitudes, spec.spins, spec.seed, idx);
    traces[r] = decoherence_trace(g, amps, grid);
    traces[r].meta.ensemble = describe(spec.couplings);
    traces[r].meta.seed = spec.seed;
  });

  EnsembleResult result;
  result.mean.times = grid.samples();
  result.mean.meta = {spec.spins, describe(spec.couplings), spec.seed};
  result.mean.values.assign(steps, Complex(0.0, 0.0));
  result.mean_abs.assign(steps, 0.0);
  std::vector<double> sq_re(steps, 0.0);
  std::vector<double> sq_im(steps, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < steps; ++i) {
      const Complex v = traces[r].values[i];
      result.mean.values[i] += v;
      result.mean_abs[i] += std::abs(v);
      sq_re[i] += v.real() * v.real();
      sq_im[i] += v.imag() * v.imag();
    }
  }
  const auto count = static_cast<double>(m);
  result.stderr_re.assign(steps, 0.0);
  result.stderr_im.assign(steps, 0.0);
  for (std::size_t i = 0; i < steps; ++i) {
    result.mean.values[i] /= count;
    result.mean_abs[i] /= count;
    if (m > 1) {
      const Complex mu = result.mean.values[i];
      const double var_re = std::max(0.0, (sq_re[i] - count * mu.real() * mu.real()) / (count - 1));
      const double var_im = std::max(0.0, (sq_im[i] - count * mu.imag() * mu.imag()) / (count - 1));
      result.stderr_re[i] = std::sqrt(var_re / count);
      result.stderr_im[i] = std::sqrt(var_im / count);
    }
  }
  if (keep_realizations) result.realizations = std::move(traces);
  return result;
}

}  // namespace spinbath
