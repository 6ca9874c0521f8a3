#include "spinbath/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "spinbath/errors.hpp"

namespace spinbath {

EnergySpectrum::EnergySpectrum(std::vector<SpectralLine> entries, std::size_t source_size,
                               bool merged)
    : entries_(std::move(entries)), source_size_(source_size), merged_(merged) {
  for (const auto& line : entries_) {
    if (!std::isfinite(line.energy) || !std::isfinite(line.weight) || line.weight < 0.0) {
      throw ValidationError("spectral lines need finite energies and non-negative weights");
    }
  }
  if (!entries_.empty() && std::abs(total_weight() - 1.0) > 1e-10) {
    throw ValidationError("spectrum weights must sum to 1");
  }
  if (merged_) {
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (!(entries_[i - 1].energy < entries_[i].energy)) {
        throw ValidationError("merged spectrum energies must be strictly increasing");
      }
    }
  }
}

double EnergySpectrum::total_weight() const noexcept {
  double total = 0.0;
  for (const auto& line : entries_) total += line.weight;
  return total;
}

double EnergySpectrum::mean() const noexcept {
  double m = 0.0;
  for (const auto& line : entries_) m += line.weight * line.energy;
  return m;
}

double EnergySpectrum::variance() const noexcept {
  const double m = mean();
  double v = 0.0;
  for (const auto& line : entries_) {
    const double d = line.energy - m;
    v += line.weight * d * d;
  }
  return v;
}

double EnergySpectrum::min_energy() const noexcept {
  double lo = entries_.empty() ? 0.0 : entries_.front().energy;
  for (const auto& line : entries_) lo = std::min(lo, line.energy);
  return lo;
}

double EnergySpectrum::max_energy() const noexcept {
  double hi = entries_.empty() ? 0.0 : entries_.front().energy;
  for (const auto& line : entries_) hi = std::max(hi, line.energy);
  return hi;
}

EnergySpectrum enumerate_levels(std::span<const LevelPair> levels,
                                const EnvironmentAmplitudes& amps, std::size_t cap) {
  const std::size_t n = levels.size();
  if (n != amps.size()) {
    throw DimensionError("level list has " + std::to_string(n) +
                         " spins but amplitudes have " + std::to_string(amps.size()));
  }
  if (n > cap) {
    throw CapacityError("enumerating " + std::to_string(n) + " spins needs 2^" +
                        std::to_string(n) + " walks; the enumeration cap is " +
                        std::to_string(cap) +
                        " spins (use the product formula or sampling instead)");
  }
  if (n >= 63) throw CapacityError("walk count 2^N does not fit in 64 bits");

  // Doubling pass: after spin k the first 2^(k+1) slots hold every assignment
  // of spins 0..k in mask order.
  std::vector<SpectralLine> lines(std::size_t{1} << n);
  lines[0] = {0.0, 1.0};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t half = std::size_t{1} << k;
    const double up_w = amps.up_weight(k);
    const double down_w = amps.down_weight(k);
    for (std::size_t m = 0; m < half; ++m) {
      const SpectralLine base = lines[m];
      lines[m] = {base.energy + levels[k].up, base.weight * up_w};
      lines[m + half] = {base.energy + levels[k].down, base.weight * down_w};
    }
  }
  return EnergySpectrum(std::move(lines), n, false);
}

EnergySpectrum enumerate_walks(const CouplingSet& couplings,
                               const EnvironmentAmplitudes& amps, std::size_t cap) {
  require_matching_sizes(couplings, amps);
  std::vector<LevelPair> levels;
  levels.reserve(couplings.size());
  for (double g : couplings.values()) levels.push_back({g, -g});
  return enumerate_levels(levels, amps, cap);
}

double default_merge_epsilon(const CouplingSet& couplings) {
  double largest = 0.0;
  for (double g : couplings.values()) largest = std::max(largest, std::abs(g));
  return 1e-9 * largest;
}

EnergySpectrum merge_degenerate(const EnergySpectrum& spectrum, double epsilon) {
  if (!(epsilon >= 0.0)) throw ValidationError("merge epsilon must be >= 0");
  std::vector<SpectralLine> sorted(spectrum.entries().begin(), spectrum.entries().end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SpectralLine& a, const SpectralLine& b) { return a.energy < b.energy; });

  std::vector<SpectralLine> merged;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double anchor = sorted[i].energy;
    double weight = 0.0;
    double weighted_offset = 0.0;
    double plain_offset = 0.0;
    std::size_t j = i;
    do {
      weight += sorted[j].weight;
      weighted_offset += sorted[j].weight * (sorted[j].energy - anchor);
      plain_offset += sorted[j].energy - anchor;
      ++j;
    } while (j < sorted.size() && sorted[j].energy - sorted[j - 1].energy <= epsilon);
    const double offset = weight > 0.0 ? weighted_offset / weight
                                       : plain_offset / static_cast<double>(j - i);
    merged.push_back({anchor + offset, weight});
    i = j;
  }
  return EnergySpectrum(std::move(merged), spectrum.source_size(), true);
}

double LdosHistogram::mean() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) m += masses[i] * bin_center(i);
  return m;
}

std::size_t default_bin_count(const EnergySpectrum& spectrum) {
  const auto n = static_cast<double>(spectrum.size());
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(n))));
}

LdosHistogram ldos(const EnergySpectrum& spectrum, std::size_t bins) {
  if (spectrum.size() == 0) throw ValidationError("cannot histogram an empty spectrum");
  if (bins == 0) throw ValidationError("histogram needs at least one bin");
  double lo = spectrum.min_energy();
  double hi = spectrum.max_energy();
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);

  LdosHistogram hist;
  hist.edges.resize(bins + 1);
  for (std::size_t i = 0; i < bins; ++i) hist.edges[i] = lo + static_cast<double>(i) * width;
  hist.edges[bins] = hi;
  hist.masses.assign(bins, 0.0);
  for (const auto& line : spectrum.entries()) {
    auto index = static_cast<std::size_t>(std::floor((line.energy - lo) / width));
    index = std::min(index, bins - 1);
    hist.masses[index] += line.weight;
  }
  hist.source_entries = spectrum.size();
  hist.source_size = spectrum.source_size();
  hist.source_merged = spectrum.merged();
  return hist;
}

LdosHistogram ldos(const EnergySpectrum& spectrum, std::vector<double> edges) {
  if (spectrum.size() == 0) throw ValidationError("cannot histogram an empty spectrum");
  if (edges.size() < 2) throw ValidationError("histogram needs at least one bin");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i - 1] < edges[i])) throw ValidationError("bin edges must be strictly increasing");
  }
  if (spectrum.min_energy() < edges.front() || spectrum.max_energy() > edges.back()) {
    throw ValidationError("bin edges do not cover the spectrum");
  }
  LdosHistogram hist;
  hist.masses.assign(edges.size() - 1, 0.0);
  for (const auto& line : spectrum.entries()) {
    auto it = std::upper_bound(edges.begin(), edges.end(), line.energy);
    auto index = static_cast<std::size_t>(std::distance(edges.begin(), it));
    index = std::clamp<std::size_t>(index, 1, hist.masses.size()) - 1;
    hist.masses[index] += line.weight;
  }
  hist.edges = std::move(edges);
  hist.source_entries = spectrum.size();
  hist.source_size = spectrum.source_size();
  hist.source_merged = spectrum.merged();
  return hist;
}

Complex characteristic_function(const EnergySpectrum& spectrum, double t) {
  if (!std::isfinite(t)) throw ValidationError("time must be finite");
  double re = 0.0;
  double im = 0.0;
  for (const auto& line : spectrum.entries()) {
    const double phase = line.energy * t;
    re += line.weight * std::cos(phase);
    im += line.weight * std::sin(phase);
  }
  return {re, im};
}

}  // namespace spinbath
