#pragma once

#include <filesystem>
#include <vector>

#include "spinbath/runner/config.hpp"
#include "spinbath/runner/output.hpp"

namespace spinbath::runner {

inline constexpr const char* kManifestName = "manifest.json";

struct RunResult {
  std::vector<OutputRecord> outputs;  // excludes the manifest itself
  std::filesystem::path manifest;
};

/// Executes the experiment named by config.kind and writes its outputs plus
/// manifest.json into config.out_dir. Library errors propagate as
/// spinbath::Error (capacity, io, config/validation).
///
/// Outputs per kind:
///   trace          trace.{csv,json}        t, re_r, im_r, abs_r
///   spectrum       spectrum.{csv,json}     energy, weight
///   ldos           ldos.{csv,json}         bin_lo, bin_hi, mass
///   ensemble       ensemble.{csv,json}     t, re_r, im_r, abs_r, realization (-1 = mean)
///   echo           echo.{csv,json}         t, re_r, im_r, abs_r, survival
///   average-check  average_check.json
///   figure         see emit_figure_data
RunResult run(const RunConfig& config);

/// Data behind one of the three figures, written into config.out_dir.
///   fig1  merged spectrum for equal couplings (N+1 lines) and the raw
///         spectrum for distinct couplings (2^N lines).
///   fig2  per size in config.figure_sizes: coupling histogram, E_W
///         histogram, per-realization and mean traces.
///   fig3  as fig2 for the Lorentzian case, plus log10 |r| columns and the
///         2^{-N/2} saturation floor; sizes after the first emit a single
///         realization.
RunResult emit_figure_data(FigureTag which, const RunConfig& config);

}  // namespace spinbath::runner
