#pragma once

// Run configuration: a line-oriented `key = value` file with `[section]`
// headers. Keys before the first header belong to [run]. `#` and `;` start
// comments. Values are scalars or comma-separated lists; nothing nests.
//
//   [run]       kind, seed, format, out_dir, threads, quiet
//   [model]     spins, couplings (fixed|uniform|gaussian|lorentzian|list),
//               g, lo, hi, mean, sigma, center, gamma, values,
//               amplitudes (equal|fixed|random), alpha_sq, realizations
//   [grid]      start, stop, steps
//   [spectrum]  merge, epsilon, bins, cap
//   [ensemble]  emit_realizations (all|none|<count>)
//   [echo]      h0 (minus_h1|zero|h1)
//   [average]   horizon, samples
//   [figure]    which (fig1|fig2|fig3), sizes

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinbath/ensembles.hpp"
#include "spinbath/model.hpp"

namespace spinbath::runner {

enum class ExperimentKind { kTrace, kSpectrum, kLdos, kEnsemble, kEcho, kAverageCheck, kFigure };
enum class OutputFormat { kCsv, kJson };
enum class FigureTag { kFig1, kFig2, kFig3 };
enum class EchoReference { kMinusH1, kZero, kSameAsH1 };

const char* to_string(ExperimentKind kind) noexcept;
const char* to_string(OutputFormat format) noexcept;
const char* to_string(FigureTag tag) noexcept;
const char* to_string(EchoReference h0) noexcept;

ExperimentKind parse_kind(std::string_view text);
FigureTag parse_figure_tag(std::string_view text);

/// Flat "section.key" -> raw value map, in the order-independent form that
/// the manifest records.
using ConfigEntries = std::map<std::string, std::string>;

/// Parses the key = value text. Throws ConfigError with a line number on
/// malformed lines, unknown keys, or duplicates.
ConfigEntries parse_config_text(std::string_view text);
ConfigEntries load_config_file(const std::filesystem::path& path);

/// Sets "section.key" (or a bare [run] key), validating the name.
void set_entry(ConfigEntries& entries, std::string_view dotted_key, std::string value);

struct ModelParams {
  std::size_t spins = 6;
  CouplingDistribution couplings = FixedCoupling{1.0};
  std::optional<std::vector<double>> coupling_values;
  AmplitudeRule amplitudes = EqualAmplitudes{};
  std::size_t realizations = 1;
};

struct GridParams {
  double start = 0.0;
  double stop = 10.0;
  std::size_t steps = 201;
};

struct SpectrumParams {
  bool merge = false;
  std::optional<double> epsilon;
  std::size_t bins = 0;  // 0 selects ceil(sqrt(#entries))
  std::size_t cap = 24;
};

struct RunConfig {
  ExperimentKind kind = ExperimentKind::kTrace;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::kCsv;
  std::filesystem::path out_dir = "out";
  unsigned threads = 1;
  bool quiet = false;

  ModelParams model;
  GridParams grid;
  SpectrumParams spectrum;
  std::optional<std::size_t> emit_realizations;  // nullopt = all
  EchoReference echo_h0 = EchoReference::kMinusH1;
  std::optional<double> average_horizon;
  std::size_t average_samples = 200000;
  FigureTag figure = FigureTag::kFig2;
  std::vector<std::size_t> figure_sizes;

  /// Raw entries the config was resolved from.
  ConfigEntries entries;
};

/// Resolves raw entries into a typed configuration, applying per-kind and
/// per-figure defaults. Throws ConfigError on invalid values.
RunConfig resolve_config(const ConfigEntries& entries);

/// Coupling set for a single-instance experiment: the explicit list when
/// `couplings = list`, otherwise realization 0 of the distribution.
CouplingSet model_couplings(const RunConfig& config, std::uint32_t realization = 0);
EnvironmentAmplitudes model_amplitudes(const RunConfig& config, std::size_t spins,
                                       std::uint32_t realization = 0);
EnsembleSpec ensemble_spec(const RunConfig& config);

}  // namespace spinbath::runner
