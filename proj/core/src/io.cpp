#include "fwscale/io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "fwscale/errors.hpp"

namespace fwscale {

using nlohmann::json;

std::string FormatDouble(double x) { return fmt::format("{:.17g}", x == 0.0 ? 0.0 : x); }

namespace {

json DyadicToJson(const Dyadic& d) { return {{"num", d.num()}, {"log2den", d.log2den()}}; }

Dyadic DyadicFromJson(const json& j) {
  if (j.is_number()) return Dyadic::FromDouble(j.get<double>());
  if (!j.is_object() || !j.contains("num") || !j.contains("log2den")) {
    throw std::invalid_argument("dyadic point must be {\"num\":..,\"log2den\":..}");
  }
  return Dyadic(j.at("num").get<std::int64_t>(), j.at("log2den").get<int>());
}

json ElementJson(const Element& e) {
  if (const auto* r = std::get_if<RealElement>(&e)) return r->x;
  const auto& f = std::get<StepMap>(e);
  if (f.is_unit()) return {{"unit", true}};
  json a = json::array(), b = json::array();
  for (const Dyadic& d : f.jumps()) a.push_back(DyadicToJson(d));
  for (const Dyadic& d : f.values()) b.push_back(DyadicToJson(d));
  return {{"A", a}, {"B", b}};
}

Element ElementFrom(const json& j) {
  if (j.is_number()) return RealElement{j.get<double>()};
  if (!j.is_object()) throw std::invalid_argument("element must be a number or an object");
  if (j.contains("unit")) {
    if (!j.at("unit").get<bool>()) throw std::invalid_argument("\"unit\" must be true");
    return StepMap::Unit();
  }
  std::vector<Dyadic> a, b;
  for (const auto& x : j.at("A")) a.push_back(DyadicFromJson(x));
  for (const auto& x : j.at("B")) b.push_back(DyadicFromJson(x));
  return StepMap::Create(std::move(a), std::move(b));
}

json ClosedSetJson(const ClosedSet& s) {
  return {{"resolution", s.resolution()}, {"cells", s.cells()}};
}

ClosedSet ClosedSetFrom(const json& j) {
  return ClosedSet::Create(j.at("resolution").get<int>(), j.at("cells").get<std::vector<int>>());
}

json SpectralMeasureJson(const SpectralMeasure& nu) {
  json atoms = json::array();
  for (const SetAtom& a : nu.atoms) atoms.push_back({{"cells", a.set.cells()}, {"p", a.p}});
  json out = {{"pitch_log2", nu.pitch_log2},
              {"resolution", nu.resolution},
              {"atoms", atoms},
              {"dropped_mass", nu.dropped_mass}};
  if (nu.clipped_mass != 0.0) out["clipped_mass"] = nu.clipped_mass;
  return out;
}

json EstimatorJson(const EstimatorReport& r) {
  return {{"value", r.value},
          {"std_error", r.std_error},
          {"mode", r.mode()},
          {"samples", r.samples},
          {"notes", r.notes}};
}

json Parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string ElementToJson(const Element& e) { return ElementJson(e).dump(); }

Element ElementFromJson(const std::string& text) { return ElementFrom(Parse(text)); }

std::string MeasureToJson(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const Atom& a : mu.atoms()) {
    atoms.push_back({{"element", ElementJson(a.element)}, {"weight", a.weight}});
  }
  return json{{"undergroup", ToString(mu.kind())}, {"atoms", atoms}}.dump(2);
}

AtomicMeasure MeasureFromJson(const std::string& text) {
  const json j = Parse(text);
  try {
    const UndergroupKind kind = ParseUndergroupKind(j.at("undergroup").get<std::string>());
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
      atoms.push_back({ElementFrom(a.at("element")), a.at("weight").get<double>()});
    }
    return AtomicMeasure::Create(kind, std::move(atoms));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed measure: ") + e.what());
  }
}

std::string SpectrumToJson(const WalshSpectrum& spectrum) {
  return json{{"n", spectrum.n}, {"coefficients", spectrum.coefficients}}.dump(2);
}

std::string ClosedSetToJson(const ClosedSet& s) { return ClosedSetJson(s).dump(); }

ClosedSet ClosedSetFromJson(const std::string& text) { return ClosedSetFrom(Parse(text)); }

std::string SpectralMeasureToJson(const SpectralMeasure& nu) {
  return SpectralMeasureJson(nu).dump(2);
}

SpectralMeasure SpectralMeasureFromJson(const std::string& text) {
  const json j = Parse(text);
  try {
    SpectralMeasure nu;
    nu.resolution = j.at("resolution").get<int>();
    nu.pitch_log2 = j.value("pitch_log2", PitchLog2Of(nu.resolution));
    nu.dropped_mass = j.value("dropped_mass", 0.0);
    nu.clipped_mass = j.value("clipped_mass", 0.0);
    for (const auto& a : j.at("atoms")) {
      nu.atoms.push_back({ClosedSet::Create(nu.resolution, a.at("cells").get<std::vector<int>>()),
                          a.at("p").get<double>()});
    }
    return nu;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed spectral measure: ") + e.what());
  }
}

std::string EstimatorReportToJson(const EstimatorReport& r) { return EstimatorJson(r).dump(2); }

std::string ReportToJson(const ConvergenceReport& report, const FinitenessResult* finiteness) {
  json levels = json::array();
  for (const LevelResult& l : report.levels) {
    json level = {{"n", l.n}, {"cells", l.cells}};
    if (l.error) {
      level["error"] = *l.error;
      levels.push_back(level);
      continue;
    }
    level["error"] = nullptr;
    level["method"] = l.method;
    level["c_n"] = EstimatorJson(l.c_n);
    level["expected_lebesgue"] = EstimatorJson(l.expected_lebesgue);
    json hits = json::array();
    for (std::size_t i = 0; i < l.point_hits.size(); ++i) {
      json h = EstimatorJson(l.point_hits[i]);
      h["t"] = report.t_grid[i];
      hits.push_back(h);
    }
    level["point_hits"] = hits;
    level["max_point_hit"] = l.max_point_hit;
    level["max_point_hit_se"] = l.max_point_hit_se;
    level["count_distribution"] = l.count_distribution;
    level["mean_count"] = EstimatorJson(l.mean_count);
    json profile = json::array();
    for (std::size_t i = 0; i < l.profile.size(); ++i) {
      json row = EstimatorJson(l.profile[i]);
      row["set"] = ClosedSetJson(report.e_family[i]);
      profile.push_back(row);
    }
    level["profile"] = profile;
    level["spectral_measure"] = l.measure ? SpectralMeasureJson(*l.measure) : json(nullptr);
    level["kr_next"] = l.kr_next ? json(*l.kr_next) : json(nullptr);
    level["kr_note"] = l.kr_note;
    level["negative_mass"] = l.negative_mass;
    level["diagnostics"] = l.diagnostics;
    levels.push_back(level);
  }

  json cond = nullptr;
  if (report.condition41) {
    json rows = json::array();
    for (const Condition41Row& r : report.condition41->rows) {
      rows.push_back({{"n", r.n}, {"t", r.t}, {"kr", r.kr}, {"m", r.m}, {"cauchy", r.cauchy}});
    }
    cond = {{"rows", rows},
            {"monotone", report.condition41->monotone},
            {"truncated_at", report.condition41->truncated_at
                                 ? json(*report.condition41->truncated_at)
                                 : json(nullptr)}};
  }

  json family = json::array();
  for (const ClosedSet& e : report.e_family) family.push_back(ClosedSetJson(e));

  json out = {
      {"model", report.model},
      {"psi", report.psi},
      {"psi_note", report.psi_note},
      {"parameters", report.parameters},
      {"levels_range", {report.level_lo, report.level_hi}},
      {"seed", report.seed},
      {"mode", report.mode},
      {"t_grid", report.t_grid},
      {"e_family", family},
      {"levels", levels},
      {"condition41", cond},
      {"condition41_note", report.condition41_note},
      {"flags",
       {{"lebesgue_nonincreasing", report.flags.lebesgue_nonincreasing},
        {"point_hit_nonincreasing", report.flags.point_hit_nonincreasing},
        {"c_n_trend", report.flags.c_n_trend},
        {"condition41_nonincreasing", report.flags.condition41_nonincreasing},
        {"kr_nonincreasing", report.flags.kr_nonincreasing}}},
  };
  if (finiteness) {
    out["finiteness"] = {{"flag", finiteness->flag},
                         {"levels", finiteness->levels},
                         {"mean_counts", finiteness->mean_counts},
                         {"cell_sizes", finiteness->cell_sizes},
                         {"tv_consecutive", finiteness->tv_consecutive}};
  } else {
    out["finiteness"] = nullptr;
  }
  return out.dump(2) + "\n";
}

std::string LevelsCsv(const ConvergenceReport& report) {
  std::string out = "level,c_n,E_leb,max_point_hit,kr_next,cells_mean\n";
  for (const LevelResult& l : report.levels) {
    if (l.error) {
      out += fmt::format("{},,,,,\n", l.n);
      continue;
    }
    out += fmt::format("{},{},{},{},{},{}\n", l.n, FormatDouble(l.c_n.value),
                       FormatDouble(l.expected_lebesgue.value), FormatDouble(l.max_point_hit),
                       l.kr_next ? FormatDouble(*l.kr_next) : "",
                       FormatDouble(l.mean_count.value));
  }
  return out;
}

std::string Condition41Csv(const Condition41Table& table) {
  std::string out = "n,t,kr,m_discretization\n";
  for (const Condition41Row& r : table.rows) {
    out += fmt::format("{},{},{},{}\n", r.n, FormatDouble(r.t), FormatDouble(r.kr), r.m);
  }
  return out;
}

std::string ProfileCsv(const std::vector<ClosedSet>& family,
                       const std::vector<EstimatorReport>& values) {
  std::string out = "set,p,std_error\n";
  for (std::size_t i = 0; i < family.size() && i < values.size(); ++i) {
    std::string set;
    for (const Interval& iv : family[i].Intervals()) {
      if (!set.empty()) set += "+";
      set += FormatDouble(iv.lo) + ":" + FormatDouble(iv.hi);
    }
    if (set.empty()) set = "empty";
    out += fmt::format("{},{},{}\n", set, FormatDouble(values[i].value),
                       FormatDouble(values[i].std_error));
  }
  return out;
}

std::string SpectralMeasureCsv(const SpectralMeasure& nu) {
  std::string out = "cells,p\n";
  for (const SetAtom& a : nu.atoms) {
    std::string cells;
    for (int c : a.set.cells()) cells += (cells.empty() ? "" : " ") + std::to_string(c);
    out += fmt::format("{},{}\n", cells, FormatDouble(a.p));
  }
  return out;
}

namespace {

void PutU64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(v >> (8 * i) & 0xff);
  out.write(bytes, 8);
}

std::uint64_t GetU64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw std::invalid_argument("truncated binary table");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = v << 8 | bytes[i];
  return v;
}

}  // namespace

void WriteSignFunctionBinary(std::ostream& out, const SignFunction& phi) {
  PutU64(out, phi.values.size());
  for (double v : phi.values) PutU64(out, std::bit_cast<std::uint64_t>(v));
}

SignFunction ReadSignFunctionBinary(std::istream& in) {
  const std::uint64_t len = GetU64(in);
  if (len > (std::uint64_t{1} << 30)) throw std::invalid_argument("binary table too long");
  std::vector<double> values(len);
  for (auto& v : values) v = std::bit_cast<double>(GetU64(in));
  return SignFunction::FromTable(std::move(values));
}

std::vector<double> ParseTable(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    const json j = Parse(text);
    try {
      return j.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw std::invalid_argument("table must be an array of numbers");
    }
  }
  std::string cleaned = text;
  for (char& ch : cleaned) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream is(cleaned);
  std::vector<double> out;
  std::string token;
  while (is >> token) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: " + token);
    }
    if (used != token.size()) throw std::invalid_argument("not a number: " + token);
    out.push_back(v);
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

}  // namespace fwscale
