#include "spinbath/runner/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spinbath/errors.hpp"

namespace spinbath::runner {
namespace {

const std::map<std::string, std::set<std::string>, std::less<>>& known_keys() {
  static const std::map<std::string, std::set<std::string>, std::less<>> keys = {
      {"run", {"kind", "seed", "format", "out_dir", "threads", "quiet"}},
      {"model",
       {"spins", "couplings", "g", "lo", "hi", "mean", "sigma", "center", "gamma", "values",
        "amplitudes", "alpha_sq", "realizations"}},
      {"grid", {"start", "stop", "steps"}},
      {"spectrum", {"merge", "epsilon", "bins", "cap"}},
      {"ensemble", {"emit_realizations"}},
      {"echo", {"h0"}},
      {"average", {"horizon", "samples"}},
      {"figure", {"which", "sizes"}},
  };
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string qualify(std::string_view section, std::string_view key) {
  std::string out(section);
  out += '.';
  out += key;
  return out;
}

void check_known(std::string_view section, std::string_view key) {
  const auto& keys = known_keys();
  const auto it = keys.find(section);
  if (it == keys.end()) throw ConfigError("unknown config section [" + std::string(section) + "]");
  if (!it->second.contains(std::string(key))) {
    throw ConfigError("unknown config key '" + qualify(section, key) + "'");
  }
}

class Reader {
 public:
  explicit Reader(const ConfigEntries& entries) : entries_(entries) {}

  bool has(const std::string& key) const { return entries_.contains(key); }

  std::string text(const std::string& key, std::string fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
  }

  double real(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : parse_real(key, it->second);
  }

  std::optional<double> optional_real(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return parse_real(key, it->second);
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : parse_integer(key, it->second);
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
  }

  std::vector<double> real_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(key)) out.push_back(parse_real(key, item));
    return out;
  }

  std::vector<std::size_t> integer_list(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : split(key)) out.push_back(parse_integer(key, item));
    return out;
  }

  static double parse_real(const std::string& key, std::string_view raw) {
    const std::string_view v = trim(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(value)) {
      throw ConfigError("'" + key + "' expects a finite number, got '" + std::string(raw) + "'");
    }
    return value;
  }

  static std::uint64_t parse_integer(const std::string& key, std::string_view raw) {
    const std::string_view v = trim(raw);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("'" + key + "' expects a non-negative integer, got '" +
                        std::string(raw) + "'");
    }
    return value;
  }

 private:
  std::vector<std::string> split(const std::string& key) const {
    std::vector<std::string> items;
    const auto it = entries_.find(key);
    if (it == entries_.end()) return items;
    std::string_view rest = it->second;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (item.empty()) throw ConfigError("'" + key + "' has an empty list item");
      items.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return items;
  }

  const ConfigEntries& entries_;
};

CouplingDistribution read_distribution(const Reader& in, const std::string& kind) {
  if (kind == "fixed") return FixedCoupling{in.real("model.g", 1.0)};
  if (kind == "uniform") return UniformCoupling{in.real("model.lo", 0.0), in.real("model.hi", 1.0)};
  if (kind == "gaussian") {
    return GaussianCoupling{in.real("model.mean", 0.0), in.real("model.sigma", 1.0)};
  }
  if (kind == "lorentzian") {
    return LorentzianCoupling{in.real("model.center", 0.0), in.real("model.gamma", 1.0)};
  }
  throw ConfigError("unknown coupling distribution '" + kind + "'");
}

AmplitudeRule read_amplitudes(const Reader& in) {
  const std::string rule = in.text("model.amplitudes", "equal");
  if (rule == "equal") return EqualAmplitudes{};
  if (rule == "fixed") return FixedAmplitudes{in.real("model.alpha_sq", 0.5)};
  if (rule == "random") return RandomAmplitudes{};
  throw ConfigError("unknown amplitude rule '" + rule + "'");
}

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::kTrace: return "trace";
    case ExperimentKind::kSpectrum: return "spectrum";
    case ExperimentKind::kLdos: return "ldos";
    case ExperimentKind::kEnsemble: return "ensemble";
    case ExperimentKind::kEcho: return "echo";
    case ExperimentKind::kAverageCheck: return "average-check";
    case ExperimentKind::kFigure: return "figure";
  }
  return "unknown";
}

const char* to_string(OutputFormat format) noexcept {
  return format == OutputFormat::kCsv ? "csv" : "json";
}

const char* to_string(FigureTag tag) noexcept {
  switch (tag) {
    case FigureTag::kFig1: return "fig1";
    case FigureTag::kFig2: return "fig2";
    case FigureTag::kFig3: return "fig3";
  }
  return "unknown";
}

const char* to_string(EchoReference h0) noexcept {
  switch (h0) {
    case EchoReference::kMinusH1: return "minus_h1";
    case EchoReference::kZero: return "zero";
    case EchoReference::kSameAsH1: return "h1";
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view text) {
  if (text == "trace") return ExperimentKind::kTrace;
  if (text == "spectrum") return ExperimentKind::kSpectrum;
  if (text == "ldos") return ExperimentKind::kLdos;
  if (text == "ensemble") return ExperimentKind::kEnsemble;
  if (text == "echo") return ExperimentKind::kEcho;
  if (text == "average-check" || text == "check-average") return ExperimentKind::kAverageCheck;
  if (text == "figure") return ExperimentKind::kFigure;
  throw ConfigError("unknown experiment kind '" + std::string(text) + "'");
}

FigureTag parse_figure_tag(std::string_view text) {
  if (text == "fig1") return FigureTag::kFig1;
  if (text == "fig2") return FigureTag::kFig2;
  if (text == "fig3") return FigureTag::kFig3;
  throw ConfigError("unknown figure tag '" + std::string(text) + "' (expected fig1, fig2 or fig3)");
}

ConfigEntries parse_config_text(std::string_view text) {
  ConfigEntries entries;
  std::string section = "run";
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);

    const auto comment = line.find_first_of("#;");
    line = trim(line.substr(0, comment));
    if (line.empty()) continue;

    const auto where = " (line " + std::to_string(line_no) + ")";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header" + where);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().contains(section)) {
        throw ConfigError("unknown config section [" + section + "]" + where);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'" + where);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key" + where);
    try {
      check_known(section, key);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what() + where);
    }
    const auto [it, inserted] = entries.emplace(qualify(section, key), std::string(value));
    if (!inserted) throw ConfigError("duplicate key '" + it->first + "'" + where);
  }
  return entries;
}

ConfigEntries load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void set_entry(ConfigEntries& entries, std::string_view dotted_key, std::string value) {
  const auto dot = dotted_key.find('.');
  const std::string_view section = dot == std::string_view::npos ? "run" : dotted_key.substr(0, dot);
  const std::string_view key =
      dot == std::string_view::npos ? dotted_key : dotted_key.substr(dot + 1);
  check_known(section, key);
  entries[qualify(section, key)] = std::move(value);
}

RunConfig resolve_config(const ConfigEntries& entries) {
  const Reader in(entries);
  RunConfig cfg;
  cfg.entries = entries;
  cfg.kind = parse_kind(in.text("run.kind", "trace"));
  cfg.seed = in.integer("run.seed", 0);
  const std::string format = in.text("run.format", "csv");
  if (format == "csv") {
    cfg.format = OutputFormat::kCsv;
  } else if (format == "json") {
    cfg.format = OutputFormat::kJson;
  } else {
    throw ConfigError("format must be csv or json, got '" + format + "'");
  }
  cfg.out_dir = in.text("run.out_dir", "out");
  if (cfg.out_dir.empty()) throw ConfigError("out_dir must not be empty");
  cfg.threads = static_cast<unsigned>(std::max<std::uint64_t>(1, in.integer("run.threads", 1)));
  cfg.quiet = in.flag("run.quiet", false);

  if (cfg.kind == ExperimentKind::kFigure) {
    cfg.figure = parse_figure_tag(in.text("figure.which", "fig2"));
  }

  // Figures reproduce fixed experiments; these defaults apply only where
  // the config leaves a key unset.
  std::string default_couplings = "fixed";
  std::size_t default_realizations = 1;
  std::vector<std::size_t> default_sizes;
  GridParams default_grid;
  if (cfg.kind == ExperimentKind::kFigure) {
    switch (cfg.figure) {
      case FigureTag::kFig1:
        default_couplings = "uniform";
        default_sizes = {6};
        break;
      case FigureTag::kFig2:
        default_couplings = "gaussian";
        default_realizations = 20;
        default_sizes = {6, 24};
        default_grid = {0.0, 1.5, 301};
        break;
      case FigureTag::kFig3:
        default_couplings = "lorentzian";
        default_realizations = 100;
        default_sizes = {20, 100};
        default_grid = {0.0, 2.0, 401};
        break;
    }
  }

  const std::string couplings = in.text("model.couplings", default_couplings);
  if (couplings == "list") {
    if (!in.has("model.values")) throw ConfigError("couplings = list requires model.values");
    cfg.model.coupling_values = in.real_list("model.values");
    if (cfg.model.coupling_values->empty()) throw ConfigError("model.values is empty");
    cfg.model.spins = cfg.model.coupling_values->size();
    if (in.has("model.spins") && in.integer("model.spins", 0) != cfg.model.spins) {
      throw ConfigError("model.spins does not match the length of model.values");
    }
  } else {
    cfg.model.couplings = read_distribution(in, couplings);
    cfg.model.spins = in.integer("model.spins", 6);
  }
  if (cfg.model.spins == 0) throw ConfigError("model.spins must be at least 1");
  cfg.model.amplitudes = read_amplitudes(in);
  cfg.model.realizations = in.integer("model.realizations", default_realizations);
  if (cfg.model.realizations == 0) throw ConfigError("model.realizations must be at least 1");

  cfg.grid.start = in.real("grid.start", default_grid.start);
  cfg.grid.stop = in.real("grid.stop", default_grid.stop);
  cfg.grid.steps = in.integer("grid.steps", default_grid.steps);

  cfg.spectrum.merge = in.flag("spectrum.merge", false);
  cfg.spectrum.epsilon = in.optional_real("spectrum.epsilon");
  if (cfg.spectrum.epsilon && *cfg.spectrum.epsilon < 0.0) {
    throw ConfigError("spectrum.epsilon must be >= 0");
  }
  cfg.spectrum.bins = in.integer("spectrum.bins", 0);
  cfg.spectrum.cap = in.integer("spectrum.cap", 24);

  const std::string emit = in.text("ensemble.emit_realizations", "all");
  if (emit == "all") {
    cfg.emit_realizations.reset();
  } else if (emit == "none") {
    cfg.emit_realizations = 0;
  } else {
    cfg.emit_realizations = Reader::parse_integer("ensemble.emit_realizations", emit);
  }

  const std::string h0 = in.text("echo.h0", "minus_h1");
  if (h0 == "minus_h1") {
    cfg.echo_h0 = EchoReference::kMinusH1;
  } else if (h0 == "zero") {
    cfg.echo_h0 = EchoReference::kZero;
  } else if (h0 == "h1") {
    cfg.echo_h0 = EchoReference::kSameAsH1;
  } else {
    throw ConfigError("echo.h0 must be minus_h1, zero or h1, got '" + h0 + "'");
  }

  cfg.average_horizon = in.optional_real("average.horizon");
  cfg.average_samples = in.integer("average.samples", 200000);
  if (cfg.average_samples == 0) throw ConfigError("average.samples must be at least 1");

  cfg.figure_sizes = in.has("figure.sizes") ? in.integer_list("figure.sizes") : default_sizes;
  for (std::size_t n : cfg.figure_sizes) {
    if (n == 0) throw ConfigError("figure.sizes entries must be at least 1");
  }

  try {
    if (!cfg.model.coupling_values) validate(cfg.model.couplings);
    validate(cfg.model.amplitudes);
    TimeGrid(cfg.grid.start, cfg.grid.stop, cfg.grid.steps);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

CouplingSet model_couplings(const RunConfig& config, std::uint32_t realization) {
  if (config.model.coupling_values) return CouplingSet(*config.model.coupling_values);
  return sample_couplings(config.model.couplings, config.model.spins, config.seed, realization);
}

EnvironmentAmplitudes model_amplitudes(const RunConfig& config, std::size_t spins,
                                       std::uint32_t realization) {
  return sample_amplitudes(config.model.amplitudes, spins, config.seed, realization);
}

EnsembleSpec ensemble_spec(const RunConfig& config) {
  if (config.model.coupling_values) {
    throw ConfigError("ensembles need a coupling distribution, not an explicit list");
  }
  EnsembleSpec spec;
  spec.couplings = config.model.couplings;
  spec.amplitudes = config.model.amplitudes;
  spec.spins = config.model.spins;
  spec.realizations = config.model.realizations;
  spec.seed = config.seed;
  return spec;
}

}  // namespace spinbath::runner
