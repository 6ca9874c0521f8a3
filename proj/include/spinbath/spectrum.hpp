#pragma once

// Random-walk picture of the decoherence factor. Each of the 2^N sign
// assignments W of the couplings is a walk with terminal energy
//   E_W = sum_{k in W+} g_k - sum_{k in W-} g_k
// and weight p_W = prod_{W+} |alpha_k|^2 prod_{W-} |beta_k|^2, so that
// r(t) = sum_W p_W exp(i E_W t) is the characteristic function of the
// local density of states eta(E) = sum_W p_W delta(E - E_W).

#include <cstddef>
#include <span>
#include <vector>

#include "spinbath/model.hpp"

namespace spinbath {

inline constexpr std::size_t kDefaultEnumerationCap = 24;

struct SpectralLine {
  double energy;
  double weight;
};

class EnergySpectrum {
 public:
  /// Validates: weights non-negative and summing to 1 within 1e-10, and
  /// strictly increasing energies when `merged` is set.
  EnergySpectrum(std::vector<SpectralLine> entries, std::size_t source_size, bool merged);

  std::span<const SpectralLine> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t source_size() const noexcept { return source_size_; }
  bool merged() const noexcept { return merged_; }

  double total_weight() const noexcept;
  double mean() const noexcept;
  double variance() const noexcept;
  double min_energy() const noexcept;
  double max_energy() const noexcept;

 private:
  std::vector<SpectralLine> entries_;
  std::size_t source_size_;
  bool merged_;
};

/// Energy a spin contributes in its |up> and |down> branch.
struct LevelPair {
  double up;
  double down;
};

/// Enumerates all 2^N branch assignments of independent two-level terms.
/// Entry m has bit k set iff spin k is in its |down> branch.
EnergySpectrum enumerate_levels(std::span<const LevelPair> levels,
                                const EnvironmentAmplitudes& amps,
                                std::size_t cap = kDefaultEnumerationCap);

/// The 2^N walks with steps +g_k (|up>) and -g_k (|down>). Throws
/// CapacityError when N exceeds `cap`.
EnergySpectrum enumerate_walks(const CouplingSet& couplings,
                               const EnvironmentAmplitudes& amps,
                               std::size_t cap = kDefaultEnumerationCap);

/// 1e-9 * max_k |g_k|.
double default_merge_epsilon(const CouplingSet& couplings);

/// Coalesces lines whose energies lie within epsilon of their sorted
/// neighbour (single linkage). Weights are summed and the energy becomes the
/// weight average of the group; groups of identical energies keep it exactly.
EnergySpectrum merge_degenerate(const EnergySpectrum& spectrum, double epsilon);

struct LdosHistogram {
  std::vector<double> edges;   // bins + 1 strictly increasing values
  std::vector<double> masses;  // one per bin, sums to 1
  std::size_t source_entries = 0;
  std::size_t source_size = 0;
  bool source_merged = false;

  std::size_t bins() const noexcept { return masses.size(); }
  double bin_center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  double mean() const noexcept;
};

/// ceil(sqrt(number of entries)).
std::size_t default_bin_count(const EnergySpectrum& spectrum);

/// Uniform bins spanning [min E_W, max E_W]; the top edge is closed. When all
/// energies coincide the single span is widened to [E - 0.5, E + 0.5].
LdosHistogram ldos(const EnergySpectrum& spectrum, std::size_t bins);

/// Histogram over caller-supplied edges, which must cover every energy.
LdosHistogram ldos(const EnergySpectrum& spectrum, std::vector<double> edges);

/// sum_W p_W exp(i E_W t).
Complex characteristic_function(const EnergySpectrum& spectrum, double t);

}  // namespace spinbath
