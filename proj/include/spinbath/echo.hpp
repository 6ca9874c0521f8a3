#pragma once

// Two-branch picture H_SE = 1/2 (|0><0| (x) H0 + |1><1| (x) H1), restricted
// to environment Hamiltonians that are sums of single-spin diagonal terms.
// The decoherence factor is then the Loschmidt-echo amplitude
//   r(t) = <Psi_E(0)| exp(i H0 t/2) exp(-i H1 t/2) |Psi_E(0)>,
// and with H0 = -H1 it reduces to the survival amplitude of H1.
//
// Per-spin energies carry every prefactor: the dephasing model corresponds
// to H1 = { up: -g_k, down: +g_k } and H0 = -H1.

#include <cstddef>
#include <span>
#include <vector>

#include "spinbath/model.hpp"
#include "spinbath/spectrum.hpp"

namespace spinbath {

class DiagonalBranchHamiltonian {
 public:
  explicit DiagonalBranchHamiltonian(std::vector<LevelPair> levels);

  /// H1 of the dephasing model, {-g_k, +g_k} per spin.
  static DiagonalBranchHamiltonian from_couplings(const CouplingSet& couplings);
  static DiagonalBranchHamiltonian zero(std::size_t spins);

  std::size_t size() const noexcept { return levels_.size(); }
  std::span<const LevelPair> levels() const noexcept { return levels_; }
  const LevelPair& operator[](std::size_t k) const { return levels_[k]; }

  DiagonalBranchHamiltonian negated() const;

 private:
  std::vector<LevelPair> levels_;
};

/// prod_k (|alpha_k|^2 e^{i (up0_k - up1_k) t/2} + |beta_k|^2 e^{i (down0_k - down1_k) t/2}).
Complex echo_amplitude(const DiagonalBranchHamiltonian& h0, const DiagonalBranchHamiltonian& h1,
                       const EnvironmentAmplitudes& amps, double t);

/// <Psi_E(0)| exp(-i H t) |Psi_E(0)>.
Complex survival_amplitude(const DiagonalBranchHamiltonian& h, const EnvironmentAmplitudes& amps,
                           double t);

/// |<Psi_E(0)| exp(-i H t) |Psi_E(0)>|^2.
double survival_probability(const DiagonalBranchHamiltonian& h, const EnvironmentAmplitudes& amps,
                            double t);

/// Strength function of H in the initial state: the 2^N product eigenvalues
/// with their overlaps. Subject to the enumeration cap.
EnergySpectrum strength_function(const DiagonalBranchHamiltonian& h,
                                 const EnvironmentAmplitudes& amps,
                                 std::size_t cap = kDefaultEnumerationCap);

}  // namespace spinbath
