#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "fwscale/config.hpp"
#include "fwscale/errors.hpp"
#include "fwscale/io.hpp"
#include "fwscale/measures.hpp"
#include "fwscale/scaling.hpp"
#include "fwscale/walsh.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitHard = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir;
  std::string format = "json";
};

// Malformed input and configuration problems; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string Slurp(const std::string& path) {
  try {
    return fwscale::ReadFile(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

// Inline JSON or a path to a JSON file.
std::string JsonArgument(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t");
  if (first != std::string::npos &&
      (arg[first] == '{' || arg[first] == '[' || arg[first] == '-' ||
       std::isdigit(static_cast<unsigned char>(arg[first])))) {
    if (!fs::exists(arg)) return arg;
  }
  return Slurp(arg);
}

class Manifest {
 public:
  Manifest(std::string command, const Globals& g) : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["tool_version"] = FWSCALE_VERSION;
    doc_["format"] = g.format;
    doc_["outputs"] = json::array();
  }

  void SetConfig(const fwscale::ExperimentConfig& cfg) {
    const fwscale::Budget& b = cfg.scaling.budget;
    json resolved = json::object();
    for (const auto& [k, v] : cfg.resolved) resolved[k] = v;
    doc_["config"] = resolved;
    doc_["seed"] = b.seed;
    doc_["budgets"] = {{"exact_states", b.exact_states},
                       {"mc_samples", b.mc_samples},
                       {"transport_pairs", b.transport_pairs},
                       {"mode", fwscale::ToString(b.mode)},
                       {"threads", b.threads},
                       {"atom_cap", cfg.scaling.atom_cap}};
  }

  void Write(const fs::path& dir, const std::string& name, const std::string& contents) {
    const fs::path path = dir / name;
    fwscale::WriteFile(path.string(), contents);
    doc_["outputs"].push_back(path.string());
  }

  void Finish(const fs::path& dir) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    doc_["wall_clock_seconds"] = secs;
    fwscale::WriteFile((dir / "manifest.json").string(), doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

fwscale::ExperimentConfig LoadConfig(const std::string& path, const Globals& g) {
  const std::string text = Slurp(path);
  fwscale::ExperimentConfig cfg =
      fwscale::ParseConfig(text, fs::path(path).parent_path().string());
  if (g.seed) {
    cfg.scaling.budget.seed = *g.seed;
    cfg.resolved["seed"] = std::to_string(*g.seed);
  }
  if (g.threads) {
    cfg.scaling.budget.threads = *g.threads;
    cfg.resolved["threads"] = std::to_string(*g.threads);
  }
  return cfg;
}

fs::path OutDir(const Globals& g) {
  fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
  fs::create_directories(dir);
  return dir;
}

fwscale::SignFunction LoadTable(const std::string& path, bool binary) {
  if (binary) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    return fwscale::ReadSignFunctionBinary(in);
  }
  return fwscale::SignFunction::FromTable(fwscale::ParseTable(Slurp(path)));
}

int CmdWalsh(const Globals& g, const std::string& input, bool parseval, bool binary) {
  const fwscale::SignFunction phi = LoadTable(input, binary);
  const fwscale::WalshSpectrum spectrum = fwscale::WalshTransform(phi);
  std::string out;
  if (g.format == "csv") {
    out = "subset,coefficient\n";
    for (std::size_t s = 0; s < spectrum.coefficients.size(); ++s) {
      out += fmt::format("{},{}\n", s, fwscale::FormatDouble(spectrum.coefficients[s]));
    }
  } else {
    out = fwscale::SpectrumToJson(spectrum) + "\n";
  }
  if (g.out_dir.empty()) {
    std::cout << out;
  } else {
    const fs::path dir = OutDir(g);
    fwscale::WriteFile((dir / (g.format == "csv" ? "spectrum.csv" : "spectrum.json")).string(),
                       out);
  }
  if (parseval) {
    const double r = fwscale::ParsevalResidual(phi, spectrum);
    (g.out_dir.empty() ? std::cerr : std::cout)
        << "parseval_residual " << fwscale::FormatDouble(r) << "\n";
  }
  return 0;
}

int CmdSpectrum(const Globals& g, const std::string& config_path) {
  fwscale::ExperimentConfig cfg = LoadConfig(config_path, g);
  const fwscale::ModelSpec spec = fwscale::BuildModel(cfg);
  const int n = cfg.level.value_or(spec.level_lo);
  fwscale::ScalingConfig sc = cfg.scaling;
  sc.report_atom_limit = sc.atom_cap;

  Manifest manifest("spectrum", g);
  manifest.SetConfig(cfg);
  const fwscale::LevelResult level = fwscale::RunLevel(spec, n, sc);
  const fs::path dir = OutDir(g);

  if (level.measure) {
    if (g.format == "csv") {
      manifest.Write(dir, "spectral_measure.csv", fwscale::SpectralMeasureCsv(*level.measure));
    } else {
      manifest.Write(dir, "spectral_measure.json",
                     fwscale::SpectralMeasureToJson(*level.measure) + "\n");
    }
  } else {
    std::cerr << "spectral law not available at level " << n << " (" << level.method
              << "); only summaries are written\n";
  }
  manifest.Write(dir, "profile.csv", fwscale::ProfileCsv(sc.e_family, level.profile));
  json summary = {{"level", n},
                  {"cells", level.cells},
                  {"method", level.method},
                  {"c_n", json::parse(fwscale::EstimatorReportToJson(level.c_n))},
                  {"expected_lebesgue",
                   json::parse(fwscale::EstimatorReportToJson(level.expected_lebesgue))},
                  {"negative_mass", level.negative_mass},
                  {"diagnostics", level.diagnostics}};
  manifest.Write(dir, "summary.json", summary.dump(2) + "\n");
  manifest.Finish(dir);
  return 0;
}

int CmdConverge(const Globals& g, const std::string& config_path) {
  fwscale::ExperimentConfig cfg = LoadConfig(config_path, g);
  if (cfg.level) {
    cfg.options.level_lo = cfg.options.level_hi = *cfg.level;
    cfg.level.reset();
  }
  const fwscale::ModelSpec spec = fwscale::BuildModel(cfg);

  Manifest manifest("converge", g);
  manifest.SetConfig(cfg);
  const fwscale::ConvergenceReport report = fwscale::RunScalingExperiment(spec, cfg.scaling);
  std::optional<fwscale::FinitenessResult> finiteness;
  try {
    finiteness = fwscale::FinitenessHeuristic(report);
  } catch (const fwscale::InsufficientLevels&) {
  }

  const fs::path dir = OutDir(g);
  manifest.Write(dir, "report.json",
                 fwscale::ReportToJson(report, finiteness ? &*finiteness : nullptr));
  manifest.Write(dir, "levels.csv", fwscale::LevelsCsv(report));
  if (report.condition41) {
    manifest.Write(dir, "condition41.csv", fwscale::Condition41Csv(*report.condition41));
  }
  manifest.Finish(dir);

  for (const auto& l : report.levels) {
    if (l.error) std::cerr << "level " << l.n << ": " << *l.error << "\n";
  }
  return 0;
}

int CmdKrdist(const std::string& a, const std::string& b, bool dual_check,
              std::size_t max_pairs) {
  const fwscale::AtomicMeasure mu = fwscale::MeasureFromJson(JsonArgument(a));
  const fwscale::AtomicMeasure nu = fwscale::MeasureFromJson(JsonArgument(b));
  const double d = fwscale::KrDistance(mu, nu, max_pairs);
  std::cout << fmt::format("{:.12f}\n", d);
  if (dual_check) {
    const fwscale::DualCheckResult r = fwscale::KrDualCheck(mu, nu);
    std::cout << fmt::format("primal {:.12f}\ndual {:.12f}\ngap {:.3e}\n", r.primal, r.dual,
                             r.gap);
    if (r.gap > 1e-9) {
      std::cerr << "primal-dual gap above 1e-9\n";
      return kExitHard;
    }
  }
  return 0;
}

int CmdCompose(const std::string& f, const std::string& g) {
  const fwscale::Element a = fwscale::ElementFromJson(JsonArgument(f));
  const fwscale::Element b = fwscale::ElementFromJson(JsonArgument(g));
  const auto fg = fwscale::Compose(a, b);
  if (!fg) {
    std::cout << "undefined\n";
    return kExitHard;
  }
  std::cout << fwscale::ElementToJson(*fg) << "\n";
  return 0;
}

fwscale::ClosedSet SetArgument(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t");
  if (first != std::string::npos && arg[first] == '{') return fwscale::ClosedSetFromJson(arg);
  return fwscale::ParseDyadicSet(arg);
}

int CmdHausdorff(const std::string& a, const std::string& b) {
  const double d = fwscale::HausdorffDistance(SetArgument(a), SetArgument(b));
  std::cout << fwscale::FormatDouble(d) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-Walsh spectra of discrete noises and their scaling limits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FWSCALE_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "Seed for Monte Carlo estimators (overrides the config)");
  app.add_option("--threads", g.threads, "Worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string input;
  bool parseval = false, binary = false;
  auto* walsh = app.add_subcommand("walsh", "Walsh spectrum of a table of 2^n values");
  walsh->add_option("table", input, "Table file (JSON array, text, or binary)")->required();
  walsh->add_flag("--parseval", parseval, "Print the Parseval residual");
  walsh->add_flag("--binary", binary, "Read the length-prefixed float64 format");

  std::string config;
  auto* spectrum = app.add_subcommand("spectrum", "Spectral law of one level");
  spectrum->add_option("config", config, "Experiment config file")->required();
  auto* converge = app.add_subcommand("converge", "Mesh-refinement experiment over levels");
  converge->add_option("config", config, "Experiment config file")->required();

  std::string first, second;
  bool dual_check = false;
  std::size_t max_pairs = fwscale::kDefaultTransportPairs;
  auto* krdist = app.add_subcommand("krdist", "Transport distance between two measures");
  krdist->add_option("mu", first, "Measure JSON file")->required();
  krdist->add_option("nu", second, "Measure JSON file")->required();
  krdist->add_flag("--dual-check", dual_check, "Compare with the dual LP optimum");
  krdist->add_option("--max-pairs", max_pairs, "Support-pair budget");

  auto* compose = app.add_subcommand("compose", "Compose two elements (f then g)");
  compose->add_option("f", first, "Element JSON or file")->required();
  compose->add_option("g", second, "Element JSON or file")->required();

  auto* hausdorff = app.add_subcommand("hausdorff", "Hausdorff distance between closed sets");
  hausdorff->add_option("a", first, "Set as a:b+c:d or ClosedSet JSON")->required();
  hausdorff->add_option("b", second, "Set as a:b+c:d or ClosedSet JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*walsh) return CmdWalsh(g, input, parseval, binary);
    if (*spectrum) return CmdSpectrum(g, config);
    if (*converge) return CmdConverge(g, config);
    if (*krdist) return CmdKrdist(first, second, dual_check, max_pairs);
    if (*compose) return CmdCompose(first, second);
    if (*hausdorff) return CmdHausdorff(first, second);
  } catch (const fwscale::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const fwscale::UnknownModel& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const fwscale::MixedUndergroup& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHard;
  }
  return 0;
}
