#include "spinbath/runner/run.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <string>

#include "spinbath/echo.hpp"
#include "spinbath/ensembles.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/limit_laws.hpp"
#include "spinbath/spectrum.hpp"
#include "spinbath/version.hpp"

namespace spinbath::runner {
namespace {

using nlohmann::json;

const std::vector<Column> kTraceColumns = {{"t"}, {"re_r"}, {"im_r"}, {"abs_r"}};

json model_summary(const CouplingSet& couplings, const EnvironmentAmplitudes& amps) {
  const StatisticsSummary stats = summarize(couplings, amps);
  json out = {
      {"spins", couplings.size()},
      {"mean_energy", stats.mean},
      {"energy_variance", stats.variance},
      {"gaussian_validity_window", stats.variance > 0.0 ? json(stats.gaussian_validity_window())
                                                        : json(nullptr)},
      {"log_long_time_average_sq", log_long_time_average_sq(amps)},
  };
  if (stats.variance > 0.0) {
    const LindebergReport report = lindeberg_check(stats);
    out["lindeberg"] = {{"max_step_ratio", report.max_step_ratio},
                        {"tail_mass", report.tail_mass},
                        {"threshold", report.threshold},
                        {"verdict", to_string(report.verdict)}};
  }
  return out;
}

void append_trace_rows(Table& table, const DecoherenceTrace& trace, std::vector<double> extra) {
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const Complex v = trace.values[i];
    std::vector<double> row = {trace.times[i], v.real(), v.imag(), std::abs(v)};
    row.insert(row.end(), extra.begin(), extra.end());
    table.add_row(std::move(row));
  }
}

json resolved_section(const RunConfig& cfg) {
  json model = {
      {"spins", cfg.model.spins},
      {"amplitudes", describe(cfg.model.amplitudes)},
      {"realizations", cfg.model.realizations},
  };
  if (cfg.model.coupling_values) {
    model["couplings"] = "list";
    model["values"] = *cfg.model.coupling_values;
  } else {
    model["couplings"] = describe(cfg.model.couplings);
  }
  return {
      {"kind", to_string(cfg.kind)},
      {"seed", cfg.seed},
      {"format", to_string(cfg.format)},
      {"threads", cfg.threads},
      {"model", model},
      {"grid", {{"start", cfg.grid.start}, {"stop", cfg.grid.stop}, {"steps", cfg.grid.steps}}},
  };
}

RunResult finalize(const RunConfig& cfg, std::vector<OutputRecord> outputs, json summary) {
  json files = json::array();
  for (const auto& rec : outputs) {
    files.push_back(
        {{"path", rec.path}, {"sha256", rec.sha256}, {"rows", rec.rows}, {"role", rec.role}});
  }
  const json manifest = {
      {"tool", "spinbath"},
      {"version", kVersion},
      {"config", cfg.entries},
      {"resolved", resolved_section(cfg)},
      {"seeds",
       {{"root", cfg.seed},
        {"generator", "philox4x32-10"},
        {"key", "root seed (low word, high word)"},
        {"counter", "{draw index, realization, purpose (0 couplings, 1 amplitudes), 0}"},
        {"realizations", cfg.model.realizations}}},
      {"summary", std::move(summary)},
      {"outputs", std::move(files)},
  };
  write_text(cfg.out_dir, kManifestName, manifest.dump(2) + "\n", 0, "manifest");
  return {std::move(outputs), cfg.out_dir / kManifestName};
}

EnergySpectrum model_spectrum(const RunConfig& cfg, const CouplingSet& couplings,
                              const EnvironmentAmplitudes& amps) {
  EnergySpectrum spectrum = enumerate_walks(couplings, amps, cfg.spectrum.cap);
  if (!cfg.spectrum.merge) return spectrum;
  const double eps = cfg.spectrum.epsilon.value_or(default_merge_epsilon(couplings));
  return merge_degenerate(spectrum, eps);
}

Table spectrum_table(const EnergySpectrum& spectrum) {
  Table table{{{"energy"}, {"weight"}}, {}};
  table.rows.reserve(spectrum.size());
  for (const auto& line : spectrum.entries()) table.add_row({line.energy, line.weight});
  return table;
}

Table ldos_table(const LdosHistogram& hist) {
  Table table{{{"bin_lo"}, {"bin_hi"}, {"mass"}}, {}};
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    table.add_row({hist.edges[i], hist.edges[i + 1], hist.masses[i]});
  }
  return table;
}

std::size_t emitted_count(const std::optional<std::size_t>& emit, std::size_t available) {
  return std::min(emit.value_or(available), available);
}

RunResult run_trace(const RunConfig& cfg) {
  const CouplingSet g = model_couplings(cfg);
  const EnvironmentAmplitudes amps = model_amplitudes(cfg, g.size());
  const TimeGrid grid(cfg.grid.start, cfg.grid.stop, cfg.grid.steps);
  const DecoherenceTrace trace = decoherence_trace(g, amps, grid, cfg.threads);
  Table table{kTraceColumns, {}};
  append_trace_rows(table, trace, {});
  std::vector<OutputRecord> out{write_table(cfg.out_dir, "trace", table, cfg.format, "trace")};
  return finalize(cfg, std::move(out), model_summary(g, amps));
}

RunResult run_spectrum(const RunConfig& cfg) {
  const CouplingSet g = model_couplings(cfg);
  const EnvironmentAmplitudes amps = model_amplitudes(cfg, g.size());
  const EnergySpectrum spectrum = model_spectrum(cfg, g, amps);
  std::vector<OutputRecord> out{
      write_table(cfg.out_dir, "spectrum", spectrum_table(spectrum), cfg.format, "spectrum")};
  json summary = model_summary(g, amps);
  summary["spectrum"] = {{"entries", spectrum.size()},
                         {"merged", spectrum.merged()},
                         {"mean", spectrum.mean()},
                         {"variance", spectrum.variance()}};
  return finalize(cfg, std::move(out), std::move(summary));
}

RunResult run_ldos(const RunConfig& cfg) {
  const CouplingSet g = model_couplings(cfg);
  const EnvironmentAmplitudes amps = model_amplitudes(cfg, g.size());
  const EnergySpectrum spectrum = model_spectrum(cfg, g, amps);
  const std::size_t bins = cfg.spectrum.bins ? cfg.spectrum.bins : default_bin_count(spectrum);
  const LdosHistogram hist = ldos(spectrum, bins);
  std::vector<OutputRecord> out{
      write_table(cfg.out_dir, "ldos", ldos_table(hist), cfg.format, "ldos")};
  json summary = model_summary(g, amps);
  summary["ldos"] = {{"bins", hist.bins()},
                     {"source_entries", hist.source_entries},
                     {"histogram_mean", hist.mean()}};
  return finalize(cfg, std::move(out), std::move(summary));
}

Table ensemble_table(const EnsembleResult& result, std::size_t emit) {
  Table table{kTraceColumns, {}};
  table.columns.push_back({"realization", true});
  for (std::size_t r = 0; r < emit; ++r) {
    append_trace_rows(table, result.realizations[r], {static_cast<double>(r)});
  }
  append_trace_rows(table, result.mean, {-1.0});
  return table;
}

Table ensemble_stats_table(const EnsembleResult& result) {
  Table table{{{"t"}, {"mean_abs_r"}, {"stderr_re"}, {"stderr_im"}}, {}};
  for (std::size_t i = 0; i < result.mean.times.size(); ++i) {
    table.add_row(
        {result.mean.times[i], result.mean_abs[i], result.stderr_re[i], result.stderr_im[i]});
  }
  return table;
}

RunResult run_ensemble(const RunConfig& cfg) {
  const EnsembleSpec spec = ensemble_spec(cfg);
  const TimeGrid grid(cfg.grid.start, cfg.grid.stop, cfg.grid.steps);
  const std::size_t emit = emitted_count(cfg.emit_realizations, spec.realizations);
  const EnsembleResult result = ensemble_average_trace(spec, grid, emit > 0, cfg.threads);
  std::vector<OutputRecord> out{
      write_table(cfg.out_dir, "ensemble", ensemble_table(result, emit), cfg.format, "ensemble"),
      write_table(cfg.out_dir, "ensemble_stats", ensemble_stats_table(result), cfg.format,
                  "ensemble statistics"),
  };
  json summary = {{"realizations", spec.realizations},
                  {"emitted_realizations", emit},
                  {"distribution", describe(spec.couplings)},
                  {"amplitudes", describe(spec.amplitudes)}};
  return finalize(cfg, std::move(out), std::move(summary));
}

RunResult run_echo(const RunConfig& cfg) {
  const CouplingSet g = model_couplings(cfg);
  const EnvironmentAmplitudes amps = model_amplitudes(cfg, g.size());
  const auto h1 = DiagonalBranchHamiltonian::from_couplings(g);
  const auto h0 = cfg.echo_h0 == EchoReference::kMinusH1 ? h1.negated()
                  : cfg.echo_h0 == EchoReference::kZero  ? DiagonalBranchHamiltonian::zero(g.size())
                                                         : h1;
  const TimeGrid grid(cfg.grid.start, cfg.grid.stop, cfg.grid.steps);
  Table table{kTraceColumns, {}};
  table.columns.push_back({"survival"});
  for (std::size_t i = 0; i < grid.steps(); ++i) {
    const double t = grid.at(i);
    const Complex r = echo_amplitude(h0, h1, amps, t);
    table.add_row({t, r.real(), r.imag(), std::abs(r), survival_probability(h1, amps, t)});
  }
  std::vector<OutputRecord> out{write_table(cfg.out_dir, "echo", table, cfg.format, "echo")};
  json summary = model_summary(g, amps);
  summary["echo"] = {{"h0", to_string(cfg.echo_h0)}, {"h1", "{-g_k, +g_k}"}};
  return finalize(cfg, std::move(out), std::move(summary));
}

RunResult run_average_check(const RunConfig& cfg) {
  const CouplingSet g = model_couplings(cfg);
  const EnvironmentAmplitudes amps = model_amplitudes(cfg, g.size());
  const double horizon = cfg.average_horizon.value_or(default_average_horizon(g));
  const TimeAverageEstimate est =
      estimate_time_average_sq(g, amps, horizon, cfg.average_samples, cfg.threads);
  const double analytic = long_time_average_sq(amps);
  const double n_sigma = est.standard_error > 0.0
                             ? std::abs(est.mean - analytic) / est.standard_error
                             : (est.mean == analytic ? 0.0 : INFINITY);
  const json report = {
      {"analytic", analytic},
      {"log_analytic", log_long_time_average_sq(amps)},
      {"empirical", est.mean},
      {"standard_error", est.standard_error},
      {"n_sigma", std::isfinite(n_sigma) ? json(n_sigma) : json(nullptr)},
      {"horizon", est.horizon},
      {"samples", est.samples},
      {"spins", g.size()},
  };
  std::vector<OutputRecord> out{
      write_text(cfg.out_dir, "average_check.json", report.dump(2) + "\n", 1, "average check")};
  return finalize(cfg, std::move(out), model_summary(g, amps));
}

// Histogram of pooled coupling draws. Heavy-tailed draws are clipped to the
// central 98% so the bins resolve the core; the clipped mass is reported.
struct CouplingHistogram {
  Table table;
  double clipped_mass = 0.0;
};

CouplingHistogram coupling_histogram(std::vector<double> draws, bool clip_tails) {
  std::sort(draws.begin(), draws.end());
  double lo = draws.front();
  double hi = draws.back();
  if (clip_tails && draws.size() >= 100) {
    lo = draws[draws.size() / 100];
    hi = draws[draws.size() - 1 - draws.size() / 100];
  }
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const auto bins = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(draws.size())))), 1, 100);
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> mass(bins, 0.0);
  const double unit = 1.0 / static_cast<double>(draws.size());
  CouplingHistogram out;
  for (double x : draws) {
    if (x < lo || x > hi) {
      out.clipped_mass += unit;
      continue;
    }
    const auto i = std::min(bins - 1, static_cast<std::size_t>(std::floor((x - lo) / width)));
    mass[i] += unit;
  }
  out.table = {{{"bin_lo"}, {"bin_hi"}, {"mass"}}, {}};
  for (std::size_t i = 0; i < bins; ++i) {
    const double edge_hi = i + 1 == bins ? hi : lo + static_cast<double>(i + 1) * width;
    out.table.add_row({lo + static_cast<double>(i) * width, edge_hi, mass[i]});
  }
  return out;
}

RunResult emit_fig1(const RunConfig& cfg) {
  std::vector<OutputRecord> out;
  json panels = json::array();
  const std::size_t n = cfg.figure_sizes.empty() ? cfg.model.spins : cfg.figure_sizes.front();
  const EnvironmentAmplitudes amps = model_amplitudes(cfg, n);

  const double g = std::holds_alternative<FixedCoupling>(cfg.model.couplings)
                       ? std::get<FixedCoupling>(cfg.model.couplings).value
                       : 1.0;
  const CouplingSet equal(std::vector<double>(n, g));
  const EnergySpectrum degenerate =
      merge_degenerate(enumerate_walks(equal, amps, cfg.spectrum.cap), default_merge_epsilon(equal));
  out.push_back(write_table(cfg.out_dir, "fig1_equal_spectrum", spectrum_table(degenerate),
                            cfg.format, "fig1a: equal couplings, merged"));
  panels.push_back({{"panel", "a"}, {"couplings", "fixed(g=" + format_number(g) + ")"},
                    {"entries", degenerate.size()}, {"merged", true}});

  // Panel b needs distinct steps; a fixed distribution falls back to uniform
  // draws around g.
  const CouplingDistribution dist = std::holds_alternative<FixedCoupling>(cfg.model.couplings)
                                        ? CouplingDistribution(UniformCoupling{0.5 * g, 1.5 * g})
                                        : cfg.model.couplings;
  const CouplingSet distinct = sample_couplings(dist, n, cfg.seed);
  const EnergySpectrum walks = enumerate_walks(distinct, amps, cfg.spectrum.cap);
  out.push_back(write_table(cfg.out_dir, "fig1_distinct_spectrum", spectrum_table(walks),
                            cfg.format, "fig1b: distinct couplings, all walks"));
  panels.push_back({{"panel", "b"}, {"couplings", describe(dist)}, {"entries", walks.size()},
                    {"merged", false}});

  const json meta = {{"figure", "fig1"}, {"spins", n}, {"panels", panels}};
  out.push_back(write_text(cfg.out_dir, "fig1_meta.json", meta.dump(2) + "\n", 0, "metadata"));
  return finalize(cfg, std::move(out), meta);
}

RunResult emit_fig23(FigureTag which, const RunConfig& cfg) {
  if (cfg.model.coupling_values) {
    throw ConfigError("figure data needs a coupling distribution, not an explicit list");
  }
  const bool lorentzian = which == FigureTag::kFig3;
  const std::string tag = to_string(which);
  const TimeGrid grid(cfg.grid.start, cfg.grid.stop, cfg.grid.steps);
  const std::vector<std::size_t> sizes =
      cfg.figure_sizes.empty() ? std::vector<std::size_t>{cfg.model.spins} : cfg.figure_sizes;

  std::vector<OutputRecord> out;
  json panels = json::array();
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const std::size_t n = sizes[s];
    const std::string suffix = "_n" + std::to_string(n);
    EnsembleSpec spec = ensemble_spec(cfg);
    spec.spins = n;
    // In the Lorentzian figure only the first size is averaged; later sizes
    // are single illustrative realizations.
    if (lorentzian && s > 0) spec.realizations = 1;

    json panel = {{"spins", n}, {"realizations", spec.realizations}};
    if (!lorentzian) {
      panel["trace_role"] = s == 0 ? "dashed" : (s == 1 ? "thin solid" : "realizations");
    } else {
      panel["trace_role"] = s == 0 ? "dashed realizations, thick mean" : "thin particular case";
    }

    std::vector<double> draws;
    draws.reserve(n * spec.realizations);
    for (std::size_t r = 0; r < spec.realizations; ++r) {
      const CouplingSet g = sample_couplings(spec.couplings, n, spec.seed, static_cast<std::uint32_t>(r));
      draws.insert(draws.end(), g.values().begin(), g.values().end());
    }
    const CouplingHistogram hist = coupling_histogram(std::move(draws), lorentzian);
    out.push_back(write_table(cfg.out_dir, tag + "_couplings" + suffix, hist.table, cfg.format,
                              "coupling histogram"));
    panel["coupling_clipped_mass"] = hist.clipped_mass;

    if (n <= cfg.spectrum.cap) {
      const CouplingSet g0 = sample_couplings(spec.couplings, n, spec.seed, 0);
      const EnvironmentAmplitudes a0 = sample_amplitudes(spec.amplitudes, n, spec.seed, 0);
      const EnergySpectrum spectrum = enumerate_walks(g0, a0, cfg.spectrum.cap);
      const std::size_t bins = cfg.spectrum.bins ? cfg.spectrum.bins : default_bin_count(spectrum);
      out.push_back(write_table(cfg.out_dir, tag + "_ldos" + suffix, ldos_table(ldos(spectrum, bins)),
                                cfg.format, "E_W histogram, realization 0"));
      panel["ldos_bins"] = bins;
      panel["summary"] = model_summary(g0, a0);
    } else {
      panel["ldos"] = "skipped: N exceeds the enumeration cap";
    }

    const EnsembleResult result = ensemble_average_trace(spec, grid, true, cfg.threads);
    const std::size_t emit = emitted_count(cfg.emit_realizations, spec.realizations);
    Table table = ensemble_table(result, emit);
    if (lorentzian) {
      const double floor = std::pow(2.0, -0.5 * static_cast<double>(n));
      table.columns.push_back({"mean_abs_r"});
      table.columns.push_back({"log10_abs_r"});
      table.columns.push_back({"floor"});
      const std::size_t steps = grid.steps();
      for (std::size_t row = 0; row < table.rows.size(); ++row) {
        auto& cells = table.rows[row];
        const bool mean_row = cells[4] < 0.0;
        const double mean_abs = mean_row ? result.mean_abs[row % steps] : cells[3];
        cells.push_back(mean_abs);
        cells.push_back(std::log10(cells[3]));
        cells.push_back(floor);
      }
      panel["saturation_floor"] = floor;
    }
    out.push_back(write_table(cfg.out_dir, tag + "_traces" + suffix, table, cfg.format,
                              "per-realization traces and mean (realization -1)"));
    panels.push_back(std::move(panel));
  }

  const json meta = {{"figure", tag},
                     {"distribution", describe(cfg.model.couplings)},
                     {"amplitudes", describe(cfg.model.amplitudes)},
                     {"mean_role", "bold line: complex ensemble mean of r(t)"},
                     {"panels", panels}};
  out.push_back(write_text(cfg.out_dir, tag + "_meta.json", meta.dump(2) + "\n", 0, "metadata"));
  return finalize(cfg, std::move(out), meta);
}

}  // namespace

RunResult emit_figure_data(FigureTag which, const RunConfig& config) {
  if (which == FigureTag::kFig1) return emit_fig1(config);
  return emit_fig23(which, config);
}

RunResult run(const RunConfig& config) {
  try {
    switch (config.kind) {
      case ExperimentKind::kTrace: return run_trace(config);
      case ExperimentKind::kSpectrum: return run_spectrum(config);
      case ExperimentKind::kLdos: return run_ldos(config);
      case ExperimentKind::kEnsemble: return run_ensemble(config);
      case ExperimentKind::kEcho: return run_echo(config);
      case ExperimentKind::kAverageCheck: return run_average_check(config);
      case ExperimentKind::kFigure: return emit_figure_data(config.figure, config);
    }
  } catch (const ValidationError& e) {
    // Invalid parameters reaching the library came from the config.
    throw ConfigError(e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  } catch (const DegenerateError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unhandled experiment kind");
}

}  // namespace spinbath::runner
