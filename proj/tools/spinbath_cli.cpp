// spinbath: command-line driver for the central-spin dephasing experiments.
//
//   spinbath trace --config run.ini --seed 7 --out-dir out/trace
//   spinbath figure fig3 --set model.realizations=1000
//
// Exit codes: 0 ok, 2 config/parse error, 3 capacity error, 4 I/O error.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spinbath/errors.hpp"
#include "spinbath/runner/config.hpp"
#include "spinbath/runner/run.hpp"
#include "spinbath/version.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
  bool quiet = false;
  std::optional<std::size_t> spins;
  std::optional<std::size_t> realizations;
  std::vector<std::string> overrides;
  std::string figure;
};

void report_error(const char* kind, int code, const std::string& message) {
  std::cerr << "spinbath: error code=" << code << " kind=" << kind << ": " << message << "\n";
}

spinbath::runner::RunConfig build_config(const std::string& subcommand, const Options& opts) {
  using namespace spinbath::runner;
  ConfigEntries entries;
  if (!opts.config_path.empty()) entries = load_config_file(opts.config_path);

  set_entry(entries, "run.kind", subcommand);
  for (const auto& item : opts.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw spinbath::ConfigError("--set expects KEY=VALUE, got '" + item + "'");
    }
    set_entry(entries, item.substr(0, eq), item.substr(eq + 1));
  }
  if (opts.seed) set_entry(entries, "run.seed", std::to_string(*opts.seed));
  if (opts.out_dir) set_entry(entries, "run.out_dir", *opts.out_dir);
  if (opts.format) set_entry(entries, "run.format", *opts.format);
  if (opts.threads) set_entry(entries, "run.threads", std::to_string(*opts.threads));
  if (opts.quiet) set_entry(entries, "run.quiet", "true");
  if (opts.spins) set_entry(entries, "model.spins", std::to_string(*opts.spins));
  if (opts.realizations) {
    set_entry(entries, "model.realizations", std::to_string(*opts.realizations));
  }
  if (!opts.figure.empty()) set_entry(entries, "figure.which", opts.figure);
  return resolve_config(entries);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Central-spin dephasing simulator"};
  app.set_version_flag("--version", spinbath::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Options opts;
  app.add_option("--seed", opts.seed, "Root RNG seed");
  app.add_option("--out-dir", opts.out_dir, "Output directory");
  app.add_option("--format", opts.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", opts.threads, "Worker threads (results do not depend on it)");
  app.add_flag("--quiet", opts.quiet, "Suppress the summary on stdout");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"trace", "Decoherence factor r(t) on a time grid"},
      {"spectrum", "Terminal energies and weights of all 2^N walks"},
      {"ldos", "Histogram of the local density of states"},
      {"ensemble", "Ensemble-averaged r(t) over seeded coupling realizations"},
      {"echo", "Loschmidt-echo amplitude and survival probability"},
      {"check-average", "Empirical vs closed-form long-time average of |r|^2"},
      {"figure", "Data files behind fig1, fig2 or fig3"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", opts.overrides, "Override SECTION.KEY=VALUE (repeatable)");
    sub->add_option("--spins", opts.spins, "Number of environment spins");
    sub->add_option("--realizations", opts.realizations, "Ensemble size");
    if (name == "figure") {
      sub->add_option("which", opts.figure, "fig1, fig2 or fig3")
          ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("config_error", 2, e.what());
    return 2;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    const auto config = build_config(subcommand, opts);
    const auto result = spinbath::runner::run(config);
    if (!config.quiet) {
      for (const auto& rec : result.outputs) {
        std::cout << (config.out_dir / rec.path).string() << "  rows=" << rec.rows
                  << "  sha256=" << rec.sha256 << "\n";
      }
      std::cout << result.manifest.string() << "\n";
    }
  } catch (const spinbath::Error& e) {
    report_error(e.kind(), e.exit_code(), e.what());
    return e.exit_code();
  } catch (const std::bad_alloc&) {
    report_error("capacity_error", 3, "out of memory");
    return 3;
  } catch (const std::exception& e) {
    report_error("internal_error", 1, e.what());
    return 1;
  }
  return 0;
}
