#include "spinbath/model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "spinbath/errors.hpp"
#include "spinbath/parallel.hpp"

namespace spinbath {
namespace {

void require_normalized(double norm, const char* what, std::size_t index) {
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " " << index << " is not normalized: |alpha|^2 + |beta|^2 = "
        << norm;
    throw ValidationError(msg.str());
  }
}

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

CouplingSet::CouplingSet(std::vector<double> couplings)
    : couplings_(std::move(couplings)) {
  if (couplings_.empty()) throw ValidationError("coupling set must hold at least one spin");
  for (std::size_t k = 0; k < couplings_.size(); ++k) {
    if (!std::isfinite(couplings_[k])) {
      throw ValidationError("coupling " + std::to_string(k) + " is not finite");
    }
  }
}

CouplingSet CouplingSet::concat(const CouplingSet& lhs, const CouplingSet& rhs) {
  std::vector<double> joined(lhs.couplings_);
  joined.insert(joined.end(), rhs.couplings_.begin(), rhs.couplings_.end());
  return CouplingSet(std::move(joined));
}

EnvironmentAmplitudes::EnvironmentAmplitudes(std::vector<AmplitudePair> pairs)
    : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw ValidationError("environment must hold at least one spin");
  up_weights_.reserve(pairs_.size());
  down_weights_.reserve(pairs_.size());
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    if (!is_finite(pairs_[k].up) || !is_finite(pairs_[k].down)) {
      throw ValidationError("amplitude pair " + std::to_string(k) + " is not finite");
    }
    const double up = std::norm(pairs_[k].up);
    const double down = std::norm(pairs_[k].down);
    require_normalized(up + down, "amplitude pair", k);
    up_weights_.push_back(up);
    down_weights_.push_back(down);
  }
}

EnvironmentAmplitudes::EnvironmentAmplitudes(std::vector<AmplitudePair> pairs,
                                             std::vector<double> up_weights,
                                             std::vector<double> down_weights)
    : pairs_(std::move(pairs)),
      up_weights_(std::move(up_weights)),
      down_weights_(std::move(down_weights)) {}

EnvironmentAmplitudes EnvironmentAmplitudes::from_weights(
    std::span<const double> up_weights) {
  if (up_weights.empty()) throw ValidationError("environment must hold at least one spin");
  std::vector<AmplitudePair> pairs;
  std::vector<double> up;
  std::vector<double> down;
  pairs.reserve(up_weights.size());
  up.reserve(up_weights.size());
  down.reserve(up_weights.size());
  for (std::size_t k = 0; k < up_weights.size(); ++k) {
    const double p = up_weights[k];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("up weight " + std::to_string(k) + " is outside [0, 1]");
    }
    const double q = 1.0 - p;
    pairs.push_back({Complex(std::sqrt(p), 0.0), Complex(std::sqrt(q), 0.0)});
    require_normalized(std::norm(pairs.back().up) + std::norm(pairs.back().down),
                       "amplitude pair", k);
    up.push_back(p);
    down.push_back(q);
  }
  return EnvironmentAmplitudes(std::move(pairs), std::move(up), std::move(down));
}

EnvironmentAmplitudes EnvironmentAmplitudes::concat(const EnvironmentAmplitudes& lhs,
                                                    const EnvironmentAmplitudes& rhs) {
  auto join = [](auto a, const auto& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  return EnvironmentAmplitudes(join(lhs.pairs_, rhs.pairs_),
                               join(lhs.up_weights_, rhs.up_weights_),
                               join(lhs.down_weights_, rhs.down_weights_));
}

SystemState::SystemState(Complex a, Complex b) : a_(a), b_(b) {
  if (!is_finite(a) || !is_finite(b)) throw ValidationError("system amplitudes must be finite");
  require_normalized(std::norm(a) + std::norm(b), "system state", 0);
}

TimeGrid::TimeGrid(double start, double stop, std::size_t steps)
    : start_(start), stop_(stop), steps_(steps) {
  if (!std::isfinite(start) || !std::isfinite(stop)) {
    throw ValidationError("time grid bounds must be finite");
  }
  if (steps == 0) throw ValidationError("time grid needs at least one step");
  if (steps == 1 && start != stop) {
    throw ValidationError("a single-step time grid requires start == stop");
  }
  if (steps > 1 && !(start < stop)) {
    throw ValidationError("time grid requires start < stop");
  }
}

double TimeGrid::spacing() const noexcept {
  return steps_ > 1 ? (stop_ - start_) / static_cast<double>(steps_ - 1) : 0.0;
}

double TimeGrid::at(std::size_t i) const {
  if (i + 1 == steps_) return stop_;
  return start_ + static_cast<double>(i) * spacing();
}

std::vector<double> TimeGrid::samples() const {
  std::vector<double> out(steps_);
  for (std::size_t i = 0; i < steps_; ++i) out[i] = at(i);
  return out;
}

double ReducedDensityMatrix::purity() const noexcept {
  return std::norm(rho00) + std::norm(rho11) + std::norm(rho01) + std::norm(rho10);
}

std::pair<double, double> ReducedDensityMatrix::eigenvalues() const noexcept {
  // Hermitian 2x2: (tr -+ sqrt((d0 - d1)^2 + 4|off|^2)) / 2.
  const double d0 = rho00.real();
  const double d1 = rho11.real();
  const double disc = std::hypot(d0 - d1, 2.0 * std::abs(rho01));
  return {0.5 * (d0 + d1 - disc), 0.5 * (d0 + d1 + disc)};
}

Branch branch_from_label(int label) {
  switch (label) {
    case 0:
      return Branch::kZero;
    case 1:
      return Branch::kOne;
    default:
      throw ValidationError("branch label must be 0 or 1, got " + std::to_string(label));
  }
}

void require_matching_sizes(const CouplingSet& couplings,
                            const EnvironmentAmplitudes& amps) {
  if (couplings.size() != amps.size()) {
    throw DimensionError("coupling set has " + std::to_string(couplings.size()) +
                         " spins but amplitudes have " + std::to_string(amps.size()));
  }
}

Complex decoherence_factor(const CouplingSet& couplings,
                           const EnvironmentAmplitudes& amps, double t) {
  require_matching_sizes(couplings, amps);
  if (!std::isfinite(t)) throw ValidationError("time must be finite");

  const auto g = couplings.values();
  const auto up = amps.up_weights();
  const auto down = amps.down_weights();
  const std::size_t n = g.size();

  if (n <= kLogAccumulationThreshold) {
    Complex r(1.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = g[k] * t;
      r *= Complex(std::cos(phase), (up[k] - down[k]) * std::sin(phase));
    }
    return r;
  }

  double log_magnitude = 0.0;
  double total_phase = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double phase = g[k] * t;
    const double re = std::cos(phase);
    const double im = (up[k] - down[k]) * std::sin(phase);
    const double mag2 = re * re + im * im;
    if (mag2 == 0.0) return Complex(0.0, 0.0);
    log_magnitude += 0.5 * std::log(mag2);
    total_phase += std::atan2(im, re);
  }
  return std::polar(std::exp(log_magnitude), total_phase);
}

DecoherenceTrace decoherence_trace(const CouplingSet& couplings,
                                   const EnvironmentAmplitudes& amps,
                                   const TimeGrid& grid, unsigned threads) {
  require_matching_sizes(couplings, amps);
  DecoherenceTrace trace;
  trace.times = grid.samples();
  trace.values.resize(trace.times.size());
  trace.meta.spins = couplings.size();
  detail::parallel_for(trace.times.size(), threads, [&](std::size_t i) {
    trace.values[i] = decoherence_factor(couplings, amps, trace.times[i]);
  });
  return trace;
}

EnvironmentAmplitudes evolve_environment_branch(const CouplingSet& couplings,
                                                const EnvironmentAmplitudes& amps,
                                                double t, Branch branch) {
  require_matching_sizes(couplings, amps);
  if (!std::isfinite(t)) throw ValidationError("time must be finite");
  const double signed_t = branch == Branch::kZero ? t : -t;
  std::vector<AmplitudePair> evolved;
  evolved.reserve(amps.size());
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double half_phase = 0.5 * couplings[k] * signed_t;
    const Complex rotor(std::cos(half_phase), std::sin(half_phase));
    evolved.push_back({amps[k].up * rotor, amps[k].down * std::conj(rotor)});
  }
  return EnvironmentAmplitudes(std::move(evolved));
}

Complex overlap(const EnvironmentAmplitudes& bra, const EnvironmentAmplitudes& ket) {
  if (bra.size() != ket.size()) {
    throw DimensionError("overlap of environments with different sizes");
  }
  Complex result(1.0, 0.0);
  for (std::size_t k = 0; k < bra.size(); ++k) {
    result *= std::conj(bra[k].up) * ket[k].up + std::conj(bra[k].down) * ket[k].down;
  }
  return result;
}

ReducedDensityMatrix reduced_density_matrix(const SystemState& system, Complex r) {
  if (!is_finite(r) || std::abs(r) > 1.0 + kNormTolerance) {
    throw ValidationError("decoherence factor must satisfy |r| <= 1");
  }
  const Complex a = system.a();
  const Complex b = system.b();
  return {Complex(std::norm(a), 0.0), a * std::conj(b) * r, std::conj(a) * b * std::conj(r),
          Complex(std::norm(b), 0.0)};
}

}  // namespace spinbath
