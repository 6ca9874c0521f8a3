#include "spinbath/echo.hpp"

#include <cmath>
#include <string>

#include "spinbath/errors.hpp"

namespace spinbath {
namespace {

void require_size(std::size_t hamiltonian, std::size_t amps) {
  if (hamiltonian != amps) {
    throw DimensionError("branch Hamiltonian has " + std::to_string(hamiltonian) +
                         " spins but amplitudes have " + std::to_string(amps));
  }
}

Complex unit(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

DiagonalBranchHamiltonian::DiagonalBranchHamiltonian(std::vector<LevelPair> levels)
    : levels_(std::move(levels)) {
  if (levels_.empty()) throw ValidationError("branch Hamiltonian needs at least one spin");
  for (const auto& level : levels_) {
    if (!std::isfinite(level.up) || !std::isfinite(level.down)) {
      throw ValidationError("branch Hamiltonian energies must be finite");
    }
  }
}

DiagonalBranchHamiltonian DiagonalBranchHamiltonian::from_couplings(const CouplingSet& couplings) {
  std::vector<LevelPair> levels;
  levels.reserve(couplings.size());
  for (double g : couplings.values()) levels.push_back({-g, g});
  return DiagonalBranchHamiltonian(std::move(levels));
}

DiagonalBranchHamiltonian DiagonalBranchHamiltonian::zero(std::size_t spins) {
  return DiagonalBranchHamiltonian(std::vector<LevelPair>(spins, LevelPair{0.0, 0.0}));
}

DiagonalBranchHamiltonian DiagonalBranchHamiltonian::negated() const {
  std::vector<LevelPair> flipped(levels_);
  for (auto& level : flipped) level = {-level.up, -level.down};
  return DiagonalBranchHamiltonian(std::move(flipped));
}

Complex echo_amplitude(const DiagonalBranchHamiltonian& h0, const DiagonalBranchHamiltonian& h1,
                       const EnvironmentAmplitudes& amps, double t) {
  if (h0.size() != h1.size()) throw DimensionError("branch Hamiltonians differ in size");
  require_size(h0.size(), amps.size());
  if (!std::isfinite(t)) throw ValidationError("time must be finite");
  Complex r(1.0, 0.0);
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double up_phase = 0.5 * (h0[k].up - h1[k].up) * t;
    const double down_phase = 0.5 * (h0[k].down - h1[k].down) * t;
    r *= amps.up_weight(k) * unit(up_phase) + amps.down_weight(k) * unit(down_phase);
  }
  return r;
}

Complex survival_amplitude(const DiagonalBranchHamiltonian& h, const EnvironmentAmplitudes& amps,
                           double t) {
  require_size(h.size(), amps.size());
  if (!std::isfinite(t)) throw ValidationError("time must be finite");
  Complex r(1.0, 0.0);
  for (std::size_t k = 0; k < amps.size(); ++k) {
    r *= amps.up_weight(k) * unit(-h[k].up * t) + amps.down_weight(k) * unit(-h[k].down * t);
  }
  return r;
}

double survival_probability(const DiagonalBranchHamiltonian& h, const EnvironmentAmplitudes& amps,
                            double t) {
  return std::norm(survival_amplitude(h, amps, t));
}

EnergySpectrum strength_function(const DiagonalBranchHamiltonian& h,
                                 const EnvironmentAmplitudes& amps, std::size_t cap) {
  require_size(h.size(), amps.size());
  return enumerate_levels(h.levels(), amps, cap);
}

}  // namespace spinbath
