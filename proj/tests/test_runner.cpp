#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "spinbath/errors.hpp"
#include "spinbath/runner/config.hpp"
#include "spinbath/runner/output.hpp"
#include "spinbath/runner/run.hpp"
#include "test_support.hpp"

using namespace spinbath;
using namespace spinbath::runner;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("spinbath_test_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

RunConfig config(const std::string& text, const fs::path& out) {
  auto entries = parse_config_text(text);
  set_entry(entries, "run.out_dir", out.string());
  return resolve_config(entries);
}

}  // namespace

TEST_CASE("config parsing") {
  const auto e = parse_config_text(
      "kind = trace\n"
      "# comment\n"
      "[model]\n"
      "spins = 4   ; trailing comment\n"
      "couplings = gaussian\n"
      "[grid]\n"
      "stop = 2\n");
  CHECK(e.at("run.kind") == "trace");
  CHECK(e.at("model.spins") == "4");
  CHECK(e.at("grid.stop") == "2");

  CHECK_THROWS_AS(parse_config_text("[nosuch]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\nspins = 1\nspins = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
  try {
    parse_config_text("[model]\n\nbogus = 1\n");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("line 3") != std::string::npos);
    CHECK(err.exit_code() == 2);
  }
}

TEST_CASE("resolve_config: defaults, overrides and validation") {
  auto entries = parse_config_text("[model]\nspins = 4\n");
  set_entry(entries, "model.spins", "9");  // a flag beats the file
  const RunConfig cfg = resolve_config(entries);
  CHECK(cfg.kind == ExperimentKind::kTrace);
  CHECK(cfg.model.spins == 9);
  CHECK(cfg.grid.steps == 201);
  CHECK(cfg.average_samples == 200000);

  CHECK_THROWS_AS(resolve_config(parse_config_text("[model]\nspins = -3\n")), ConfigError);
  CHECK_THROWS_AS(resolve_config(parse_config_text("[model]\nspins = 0\n")), ConfigError);
  CHECK_THROWS_AS(resolve_config(parse_config_text("[grid]\nstart = 2\nstop = 1\n")), ConfigError);
  CHECK_THROWS_AS(resolve_config(parse_config_text("[model]\ncouplings = pareto\n")), ConfigError);
  CHECK_THROWS_AS(resolve_config(parse_config_text("[model]\ncouplings = gaussian\nsigma = 0\n")),
                  ConfigError);
  CHECK_THROWS_AS(resolve_config(parse_config_text("kind = nonsense\n")), ConfigError);
  CHECK_THROWS_AS(resolve_config(parse_config_text("[model]\ncouplings = list\nvalues = 1,2\nspins = 3\n")),
                  ConfigError);
  CHECK(parse_kind("check-average") == ExperimentKind::kAverageCheck);
  CHECK(parse_kind("average-check") == ExperimentKind::kAverageCheck);
}

TEST_CASE("format_number round-trips") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = normal(rng) * std::pow(10.0, i % 40 - 20);
    const std::string s = format_number(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.125) == "0.125");
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("trace output contract") {
  const fs::path dir = scratch("trace");
  const auto cfg = config("kind = trace\n[model]\nspins = 5\ncouplings = uniform\nlo = 0.5\nhi = 1.5\n"
                          "[grid]\nstart = 0\nstop = 3\nsteps = 31\n", dir);
  const RunResult res = run(cfg);
  REQUIRE(res.outputs.size() == 1);
  const auto rows = read_csv(dir / "trace.csv");
  REQUIRE(rows.size() == 32);
  CHECK(rows[0] == std::vector<std::string>{"t", "re_r", "im_r", "abs_r"});
  CHECK(rows[1] == std::vector<std::string>{"0", "1", "0", "1"});
  CHECK(rows.back()[0] == "3");

  const CouplingSet g = model_couplings(cfg);
  const auto amps = model_amplitudes(cfg, g.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i][0]);
    const Complex r = decoherence_factor(g, amps, t);
    CHECK(std::stod(rows[i][1]) == r.real());
    CHECK(std::stod(rows[i][2]) == r.imag());
  }

  const auto manifest = nlohmann::json::parse(slurp(res.manifest));
  CHECK(manifest["tool"] == "spinbath");
  CHECK(manifest["seeds"]["generator"] == "philox4x32-10");
  CHECK(manifest["resolved"]["model"]["spins"] == 5);
  REQUIRE(manifest["outputs"].size() == 1);
  const auto& rec = manifest["outputs"][0];
  CHECK(rec["path"] == "trace.csv");
  CHECK(rec["rows"] == 31);
  CHECK(rec["sha256"] == sha256_hex(slurp(dir / "trace.csv")));
  CHECK(manifest["summary"].contains("lindeberg"));
}

TEST_CASE("merged spectrum of six equal spins is binomial") {
  const fs::path dir = scratch("spectrum");
  run(config("kind = spectrum\n[model]\nspins = 6\n[spectrum]\nmerge = true\n", dir));
  const auto rows = read_csv(dir / "spectrum.csv");
  REQUIRE(rows.size() == 8);
  CHECK(rows[0] == std::vector<std::string>{"energy", "weight"});
  for (unsigned l = 0; l <= 6; ++l) {
    CHECK(std::stod(rows[l + 1][0]) == doctest::Approx(2.0 * l - 6.0));
    CHECK(std::stod(rows[l + 1][1]) == doctest::Approx(testing::choose(6, l) / 64.0).epsilon(1e-14));
  }
}

TEST_CASE("ldos, ensemble and echo schemas") {
  const fs::path dir = scratch("schemas");
  run(config("kind = ldos\n[model]\nspins = 6\n[spectrum]\nbins = 5\n", dir / "ldos"));
  const auto ldos_rows = read_csv(dir / "ldos" / "ldos.csv");
  CHECK(ldos_rows[0] == std::vector<std::string>{"bin_lo", "bin_hi", "mass"});
  CHECK(ldos_rows.size() == 6);
  double total = 0.0;
  for (std::size_t i = 1; i < ldos_rows.size(); ++i) total += std::stod(ldos_rows[i][2]);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  run(config("kind = ensemble\nseed = 5\n[model]\nspins = 4\ncouplings = gaussian\nrealizations = 3\n"
             "[grid]\nstop = 1\nsteps = 11\n",
             dir / "ensemble"));
  const auto ens = read_csv(dir / "ensemble" / "ensemble.csv");
  CHECK(ens[0] == std::vector<std::string>{"t", "re_r", "im_r", "abs_r", "realization"});
  CHECK(ens.size() == 1 + 4 * 11);
  CHECK(ens.back()[4] == "-1");
  CHECK(ens[1][4] == "0");
  const auto stats = read_csv(dir / "ensemble" / "ensemble_stats.csv");
  CHECK(stats[0] == std::vector<std::string>{"t", "mean_abs_r", "stderr_re", "stderr_im"});

  run(config("kind = echo\n[model]\nspins = 3\n[grid]\nstop = 1\nsteps = 5\n", dir / "echo"));
  const auto echo = read_csv(dir / "echo" / "echo.csv");
  CHECK(echo[0] == std::vector<std::string>{"t", "re_r", "im_r", "abs_r", "survival"});
  CHECK(echo.size() == 6);
}

TEST_CASE("ensemble list couplings are rejected") {
  const fs::path dir = scratch("list");
  CHECK_THROWS_AS(run(config("kind = ensemble\n[model]\ncouplings = list\nvalues = 1, 2\nspins = 2\n", dir)),
                  ConfigError);
}

TEST_CASE("average-check report") {
  const fs::path dir = scratch("average");
  run(config("kind = average-check\n[model]\ncouplings = list\nvalues = 1.4142135623730951, "
             "1.7320508075688772, 2.23606797749979, 2.6457513110645907\nspins = 4\n"
             "[average]\nsamples = 50000\n",
             dir));
  const auto report = nlohmann::json::parse(slurp(dir / "average_check.json"));
  CHECK(report["analytic"].get<double>() == 1.0 / 16.0);
  CHECK(report["samples"] == 50000);
  CHECK(report["spins"] == 4);
  CHECK(report["n_sigma"].get<double>() < 3.0);
}

TEST_CASE("runs are reproducible and independent of the thread count") {
  const std::string text =
      "kind = ensemble\nseed = 77\n[model]\nspins = 8\ncouplings = lorentzian\nrealizations = 20\n"
      "[grid]\nstop = 2\nsteps = 21\n";
  const fs::path a = scratch("repro_a");
  const fs::path b = scratch("repro_b");
  run(config(text, a));
  auto cfg = config(text, b);
  cfg.threads = 3;
  run(cfg);
  CHECK(slurp(a / "ensemble.csv") == slurp(b / "ensemble.csv"));
  CHECK(slurp(a / "ensemble_stats.csv") == slurp(b / "ensemble_stats.csv"));
}

TEST_CASE("capacity errors surface with exit code 3") {
  const fs::path dir = scratch("capacity");
  try {
    run(config("kind = spectrum\n[model]\nspins = 30\n", dir));
    FAIL("expected a capacity error");
  } catch (const Error& e) {
    CHECK(e.exit_code() == 3);
    CHECK(std::string(e.kind()) == "capacity_error");
  }
}

TEST_CASE("json table format") {
  const fs::path dir = scratch("json");
  run(config("kind = trace\nformat = json\n[model]\nspins = 2\n[grid]\nstop = 1\nsteps = 3\n", dir));
  const auto doc = nlohmann::json::parse(slurp(dir / "trace.json"));
  CHECK(doc["columns"].size() == 4);
  CHECK(doc["rows"].size() == 3);
  CHECK(doc["rows"][0][1].get<double>() == 1.0);
}

TEST_CASE("figure data files") {
  const fs::path dir = scratch("figures");
  run(config("kind = figure\nseed = 1\n[figure]\nwhich = fig1\nsizes = 5\n", dir / "f1"));
  CHECK(read_csv(dir / "f1" / "fig1_equal_spectrum.csv").size() == 7);
  CHECK(read_csv(dir / "f1" / "fig1_distinct_spectrum.csv").size() == 33);

  run(config("kind = figure\nseed = 1\n[figure]\nwhich = fig3\nsizes = 6, 30\n"
             "[model]\nrealizations = 4\n[grid]\nsteps = 11\n",
             dir / "f3"));
  CHECK(fs::exists(dir / "f3" / "fig3_ldos_n6.csv"));
  CHECK_FALSE(fs::exists(dir / "f3" / "fig3_ldos_n30.csv"));
  const auto traces = read_csv(dir / "f3" / "fig3_traces_n30.csv");
  CHECK(traces[0].back() == "floor");
  CHECK(traces.size() == 1 + 2 * 11);
}
