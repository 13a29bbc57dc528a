#include "fwscale/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fwscale/errors.hpp"
#include "fwscale/io.hpp"

namespace fwscale {

namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "model",           "measure",          "cells",
      "levels",          "level",            "psi",
      "psi.clamp",       "psi.x0",           "sites",
      "boundary",        "budget.exact_states", "budget.mc_samples",
      "budget.transport_pairs", "mode",      "seed",
      "threads",         "t_grid",           "e_family",
      "m_discretization", "cond41",          "cond41.t"};
  return keys;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(Trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

template <typename T>
bool ParseInteger(const std::string& s, T* out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && ptr == end;
}

bool ParseReal(const std::string& s, double* out) {
  try {
    std::size_t used = 0;
    *out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

ClosedSet ParseDyadicSet(const std::string& text) {
  if (Trim(text) == "empty") return ClosedSet::Empty(1);
  std::vector<std::pair<Dyadic, Dyadic>> intervals;
  int log2res = 0;
  for (const std::string& part : Split(text, '+')) {
    const auto colon = part.find(':');
    double a = 0, b = 0;
    if (colon == std::string::npos || !ParseReal(Trim(part.substr(0, colon)), &a) ||
        !ParseReal(Trim(part.substr(colon + 1)), &b)) {
      throw std::invalid_argument("interval must be a:b, got '" + part + "'");
    }
    if (!(0.0 <= a && a < b && b <= 1.0)) {
      throw std::invalid_argument("interval needs 0 <= a < b <= 1, got '" + part + "'");
    }
    const Dyadic da = Dyadic::FromDouble(a), db = Dyadic::FromDouble(b);
    log2res = std::max({log2res, da.log2den(), db.log2den()});
    intervals.emplace_back(da, db);
  }
  if (log2res > 20) throw std::invalid_argument("set endpoints finer than 2^-20");
  const int res = 1 << log2res;
  std::vector<int> cells;
  for (const auto& [a, b] : intervals) {
    const auto lo = static_cast<int>(a.num() << (log2res - a.log2den()));
    const auto hi = static_cast<int>(b.num() << (log2res - b.log2den()));
    for (int c = lo; c < hi; ++c) cells.push_back(c);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return ClosedSet::Create(res, std::move(cells));
}

ExperimentConfig ParseConfig(const std::string& text, const std::string& base_dir) {
  ExperimentConfig cfg;
  std::vector<std::string> problems;
  std::map<std::string, std::string> kv;

  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (!KnownKeys().count(key)) {
      problems.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      continue;
    }
    if (kv.count(key)) {
      problems.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      continue;
    }
    kv[key] = value;
  }

  auto bad = [&](const std::string& key, const std::string& why) {
    problems.push_back(key + ": " + why + " (got '" + kv[key] + "')");
  };
  auto positive_size = [&](const std::string& key, std::size_t* out) {
    if (!kv.count(key)) return;
    long long v = 0;
    if (!ParseInteger(kv[key], &v) || v <= 0) {
      bad(key, "must be a positive integer");
    } else {
      *out = static_cast<std::size_t>(v);
    }
  };

  if (!kv.count("model")) {
    problems.push_back("model: required");
  } else {
    cfg.model = kv["model"];
  }
  if (kv.count("measure")) {
    std::filesystem::path p(kv["measure"]);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    cfg.measure_path = p.string();
  }
  if (kv.count("cells")) {
    if (!ParseInteger(kv["cells"], &cfg.cells) || cfg.cells < 1 || cfg.cells > 62) {
      bad("cells", "must be an integer in 1..62");
    }
  }
  if (cfg.model == "custom") {
    if (cfg.measure_path.empty()) problems.push_back("measure: required for model=custom");
    if (!kv.count("cells")) problems.push_back("cells: required for model=custom");
  } else {
    if (kv.count("measure")) problems.push_back("measure: only valid for model=custom");
    if (kv.count("cells")) problems.push_back("cells: only valid for model=custom");
  }

  if (kv.count("levels")) {
    const auto dots = kv["levels"].find("..");
    int lo = 0, hi = 0;
    if (dots == std::string::npos ||
        !ParseInteger(Trim(kv["levels"].substr(0, dots)), &lo) ||
        !ParseInteger(Trim(kv["levels"].substr(dots + 2)), &hi)) {
      bad("levels", "expected a..b");
    } else if (lo < 1 || hi < lo || hi > 40) {
      bad("levels", "need 1 <= a <= b <= 40");
    } else {
      cfg.options.level_lo = lo;
      cfg.options.level_hi = hi;
    }
  }
  if (kv.count("level")) {
    int n = 0;
    if (!ParseInteger(kv["level"], &n) || n < 0 || n > 40) {
      bad("level", "must be an integer in 0..40");
    } else {
      cfg.level = n;
    }
  }

  if (kv.count("psi")) cfg.options.psi = kv["psi"];
  if (kv.count("psi.clamp") && !ParseReal(kv["psi.clamp"], &cfg.options.psi_clamp)) {
    bad("psi.clamp", "must be a number");
  }
  if (kv.count("psi.x0")) {
    if (!ParseReal(kv["psi.x0"], &cfg.options.psi_x0) || cfg.options.psi_x0 <= 0.0 ||
        cfg.options.psi_x0 >= 1.0) {
      bad("psi.x0", "must be a number in (0,1)");
    }
  }
  if (kv.count("sites")) {
    if (!ParseInteger(kv["sites"], &cfg.options.sites) || cfg.options.sites < 1 ||
        cfg.options.sites > 16) {
      bad("sites", "must be an integer in 1..16");
    }
  }
  if (kv.count("boundary")) {
    cfg.options.boundary = kv["boundary"];
    if (cfg.options.boundary != "reflect") bad("boundary", "only 'reflect' is supported");
  }
  if (kv.count("m_discretization")) {
    if (!ParseInteger(kv["m_discretization"], &cfg.options.m_discretization) ||
        cfg.options.m_discretization < 1) {
      bad("m_discretization", "must be a positive integer");
    }
  }

  Budget& budget = cfg.scaling.budget;
  positive_size("budget.exact_states", &budget.exact_states);
  positive_size("budget.mc_samples", &budget.mc_samples);
  positive_size("budget.transport_pairs", &budget.transport_pairs);
  if (kv.count("mode")) {
    try {
      budget.mode = ParseMode(kv["mode"]);
    } catch (const std::exception&) {
      bad("mode", "must be auto, exact or mc");
    }
  }
  if (kv.count("seed") && !ParseInteger(kv["seed"], &budget.seed)) {
    bad("seed", "must be an unsigned 64-bit integer");
  }
  if (kv.count("threads")) {
    if (!ParseInteger(kv["threads"], &budget.threads) || budget.threads < 1) {
      bad("threads", "must be a positive integer");
    }
  }

  if (kv.count("t_grid")) {
    std::vector<double> grid;
    bool ok = true;
    for (const std::string& s : Split(kv["t_grid"], ',')) {
      double t = 0;
      if (!ParseReal(s, &t) || t < 0.0 || t > 1.0) {
        ok = false;
        break;
      }
      grid.push_back(t);
    }
    if (!ok || grid.empty()) {
      bad("t_grid", "must be comma separated numbers in [0,1]");
    } else {
      cfg.scaling.t_grid = grid;
    }
  }
  if (kv.count("e_family")) {
    std::vector<ClosedSet> family;
    for (const std::string& s : Split(kv["e_family"], ';')) {
      try {
        family.push_back(ParseDyadicSet(s));
      } catch (const std::exception& e) {
        bad("e_family", e.what());
        family.clear();
        break;
      }
    }
    if (!family.empty()) cfg.scaling.e_family = family;
  }
  if (kv.count("cond41")) {
    if (kv["cond41"] == "on") {
      cfg.scaling.condition41 = true;
    } else if (kv["cond41"] == "off") {
      cfg.scaling.condition41 = false;
    } else {
      bad("cond41", "must be on or off");
    }
  }
  if (kv.count("cond41.t")) {
    double t = 0;
    try {
      if (!ParseReal(kv["cond41.t"], &t) || t <= 0.0) throw std::invalid_argument("");
      cfg.scaling.condition41_t = Dyadic::FromDouble(t);
    } catch (const std::exception&) {
      bad("cond41.t", "must be a positive dyadic number");
    }
  }

  if (!problems.empty()) throw ConfigError(problems);
  if (cfg.model != "custom" && cfg.model != "random_walk" && cfg.model != "coalescing_flow") {
    throw UnknownModel(cfg.model);
  }
  cfg.resolved = kv;
  return cfg;
}

ModelSpec BuildModel(const ExperimentConfig& config) {
  ModelOptions options = config.options;
  if (config.level) {
    options.level_lo = options.level_hi = *config.level;
  }
  if (config.model != "custom") {
    try {
      return BuiltinModel(config.model, options);
    } catch (const std::invalid_argument& e) {
      throw ConfigError({e.what()});
    }
  }
  AtomicMeasure mu = MeasureFromJson(ReadFile(config.measure_path));
  ModelSpec spec;
  spec.name = "custom";
  spec.kind = mu.kind();
  spec.level_measure = [mu](int) { return mu; };
  spec.level_lo = options.level_lo;
  spec.level_hi = options.level_hi;
  spec.fixed_cells = config.cells;
  const std::string psi = options.psi.empty()
                              ? (spec.kind == UndergroupKind::kReal ? "endpoint" : "threshold")
                              : options.psi;
  try {
    spec.psi = MakeFunctional(spec.kind, psi, options);
  } catch (const std::invalid_argument& e) {
    throw ConfigError({std::string("psi: ") + e.what()});
  }
  spec.psi_note = "user-supplied increment law";
  spec.parameters["measure"] = config.measure_path;
  spec.parameters["cells"] = std::to_string(config.cells);
  return spec;
}

}  // namespace fwscale
