// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and
// runtime limits are fixed here; `acceptance 3 7` runs a subset.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fwscale/errors.hpp"
#include "fwscale/exchangeable.hpp"
#include "fwscale/io.hpp"
#include "fwscale/measures.hpp"
#include "fwscale/models.hpp"
#include "fwscale/scaling.hpp"
#include "fwscale/spectral.hpp"
#include "fwscale/walsh.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace fwscale {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds; 0 means none
  std::function<Outcome()> run;
};

// ---------------------------------------------------------------- 1
Outcome Parseval() {
  Rng rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = testing::UniformInt(rng, 0, 16);
    const SignFunction phi = testing::RandomSignFunction(rng, n);
    const WalshSpectrum s = WalshTransform(phi);
    long double lhs = 0.0L, rhs = 0.0L;
    for (double c : s.coefficients) lhs += static_cast<long double>(c) * c;
    for (double v : phi.values) rhs += static_cast<long double>(v) * v;
    rhs /= static_cast<long double>(phi.values.size());
    worst = std::max(worst, static_cast<double>(std::fabs(lhs - rhs)));
  }
  return {worst <= 1e-12, fmt::format("max |residual| = {:.3e} (tol 1e-12)", worst)};
}

// ---------------------------------------------------------------- 2
Outcome IntervalIdentity() {
  Rng rng(1002);
  double worst = 0.0;
  int checks = 0;
  for (int n = 1; n <= 10; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      const UndergroupKind kind = rep % 2 ? UndergroupKind::kStepMap : UndergroupKind::kReal;
      const AtomicMeasure mu = testing::RandomTwoAtomic(rng, kind);
      const Functional psi =
          testing::RandomPointFunctional(rng, kind == UndergroupKind::kReal ? 0.0 : 0.3);
      const SignFunction phi = FunctionalTable(psi, mu, n);
      const WalshSpectrum s = WalshTransform(phi);
      for (int u = 0; u <= n; ++u) {
        for (int v = u; v <= n; ++v) {
          std::uint64_t mask = 0;
          for (int k = u; k < v; ++k) mask |= std::uint64_t{1} << k;
          const double oracle = testing::NaiveConditionalMeanSquare(phi.values, n, mask);
          worst = std::max(worst, std::fabs(SpectralMassWithin(s, mask) - oracle));
          ++checks;
        }
      }
    }
  }
  return {worst <= 1e-12,
          fmt::format("{} intervals, max |walsh - direct| = {:.3e} (tol 1e-12)", checks, worst)};
}

// ---------------------------------------------------------------- 3
Outcome IeEqualsExact() {
  Rng rng(1003);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + i % 10;
    const AtomicMeasure mu = testing::RandomTwoAtomic(rng, UndergroupKind::kStepMap);
    const Functional psi = testing::RandomPointFunctional(rng);
    Budget exact;
    exact.mode = Mode::kExact;
    const IeResult ie = SpectralMeasureIe(psi, {mu, n}, exact);
    const SpectralMeasure walsh = SpectralMeasureExact(psi, mu, n);
    std::vector<double> a(std::size_t{1} << n, 0.0), b(a.size(), 0.0);
    for (const SetAtom& s : ie.measure.atoms) a[s.set.Mask()] = s.p;
    for (const SetAtom& s : walsh.atoms) b[s.set.Mask()] = s.p;
    for (std::size_t m = 0; m < a.size(); ++m) worst = std::max(worst, std::fabs(a[m] - b[m]));
  }
  return {worst <= 1e-10,
          fmt::format("50 functionals, n <= 10, max atom difference = {:.3e} (tol 1e-10)", worst)};
}

// ---------------------------------------------------------------- 4
Outcome FirstChaos() {
  double worst_atom = 0.0, worst_leb = 0.0;
  bool shape_ok = true;
  std::string bad_levels;
  for (int n = 1; n <= 12; ++n) {
    ModelOptions options;
    options.psi = "endpoint";
    const ModelSpec spec = BuiltinModel("random_walk", options);
    ScalingConfig config;
    config.report_atom_limit = std::size_t{1} << 12;
    const LevelResult level = RunLevel(spec, n, config);
    const int cells = 1 << n;
    // psi = 2^{-n/2} sum_k tau_k: the nonzero coefficients are the
    // singletons, all equal, so each carries mass 1/cells.
    const double expected = 1.0 / cells;
    if (!level.measure || static_cast<int>(level.measure->atoms.size()) != cells) {
      shape_ok = false;
      bad_levels += fmt::format(" {}", n);
      continue;
    }
    std::set<int> seen;
    for (const SetAtom& a : level.measure->atoms) {
      if (a.set.count() != 1) shape_ok = false;
      if (a.set.count() == 1) seen.insert(a.set.cells()[0]);
      worst_atom = std::max(worst_atom, std::fabs(a.p - expected));
    }
    if (static_cast<int>(seen.size()) != cells) shape_ok = false;
    worst_leb = std::max(worst_leb, std::fabs(level.expected_lebesgue.value - std::ldexp(1.0, -n)));
  }
  return {shape_ok && worst_atom <= 1e-12 && worst_leb <= 1e-12,
          fmt::format("n = 1..12, singletons only: {}, max atom error {:.3e}, max E[Leb] error "
                      "{:.3e} (tol 1e-12)",
                      shape_ok ? "yes" : "no" + bad_levels, worst_atom, worst_leb)};
}

// ---------------------------------------------------------------- 5
// Moves every point of a step map by 0 or +-2^-30 (never the unit).
StepMap Perturb(const StepMap& f, Rng& rng) {
  if (f.is_unit()) return f;
  const auto shift = [&](const Dyadic& d) {
    return d + Dyadic(testing::UniformInt(rng, -1, 1), 30);
  };
  std::vector<Dyadic> a, b;
  for (const Dyadic& d : f.jumps()) a.push_back(shift(d));
  for (const Dyadic& d : f.values()) b.push_back(shift(d));
  return StepMap::Create(std::move(a), std::move(b));
}

Element PerturbElement(const Element& e, Rng& rng, double delta) {
  if (const auto* r = std::get_if<RealElement>(&e)) {
    return RealElement{r->x + testing::UniformReal(rng, -delta, delta)};
  }
  return Perturb(std::get<StepMap>(e), rng);
}

Element RandomAxiomElement(Rng& rng, UndergroupKind kind) {
  if (kind == UndergroupKind::kReal) return testing::RandomElement(rng, kind);
  if (testing::UniformInt(rng, 0, 9) == 0) return StepMap::Unit();
  // Half general maps (compositions often undefined), half lattice maps.
  return testing::UniformInt(rng, 0, 1) ? Element(testing::RandomStepMap(rng, 4))
                                        : Element(testing::RandomLatticeStepMap(rng, 2));
}

AtomicMeasure PerturbMeasure(const AtomicMeasure& mu, Rng& rng, double delta) {
  std::vector<Atom> atoms;
  for (const Atom& a : mu.atoms()) atoms.push_back({PerturbElement(a.element, rng, delta), a.weight});
  return AtomicMeasure::Create(mu.kind(), std::move(atoms), true);
}

bool SameMeasure(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!ApproxEqual(a.atoms()[i].element, b.atoms()[i].element)) return false;
    if (std::fabs(a.atoms()[i].weight - b.atoms()[i].weight) > 1e-12) return false;
  }
  return true;
}

Outcome UndergroupAxioms() {
  const double delta = std::ldexp(1.0, -30);
  const int instances = 10000;
  std::map<std::string, int> violations;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) ++violations[what];
  };
  Rng rng(1005);
  int composed = 0, convolved = 0, unit_middle = 0;
  for (UndergroupKind kind : {UndergroupKind::kReal, UndergroupKind::kStepMap}) {
    const Element e = UnitOf(kind);
    for (int i = 0; i < instances; ++i) {
      const Element f = RandomAxiomElement(rng, kind);
      const Element g = RandomAxiomElement(rng, kind);
      const Element h = RandomAxiomElement(rng, kind);
      // (a) unity
      const auto ef = Compose(e, f), fe = Compose(f, e);
      check(ef && fe && Metric(*ef, f) <= 1e-12 && Metric(*fe, f) <= 1e-12, "element (a)");
      // (b) associativity. With g = e both products are always defined but
      // f h need not be; those triples are counted apart.
      const auto fg = Compose(f, g), gh = Compose(g, h);
      if (fg && gh && ApproxEqual(g, e)) {
        if (!Compose(f, h)) ++unit_middle;
      } else if (fg && gh) {
        ++composed;
        const auto l = Compose(*fg, h), r = Compose(f, *gh);
        check(l && r && Metric(*l, *r) <= 1e-12, "element (b)");
      }
      // (c) continuity, as a modulus: moving points by at most delta moves
      // the product by at most 2 delta.
      if (fg) {
        const Element f1 = PerturbElement(f, rng, delta), g1 = PerturbElement(g, rng, delta);
        const auto fg1 = Compose(f1, g1);
        check(fg1 && Metric(*fg1, *fg) <= 2 * delta + 1e-12, "element (c)");
      }
      // (d)
      if (fg) {
        check(Metric(f, *fg) <= Metric(e, g) + 1e-12, "element (d) left");
        check(Metric(g, *fg) <= Metric(e, f) + 1e-12, "element (d) right");
      }
      // (e) and the metric axioms
      check(Metric(f, g) <= 1.0 && Metric(f, g) >= 0.0, "element (e)");
      check(Metric(f, f) == 0.0 && Metric(f, g) == Metric(g, f), "metric symmetry");
      check(Metric(f, h) <= Metric(f, g) + Metric(g, h) + 1e-12, "metric triangle");
    }
  }

  for (UndergroupKind kind : {UndergroupKind::kReal, UndergroupKind::kStepMap}) {
    const AtomicMeasure unit = AtomicMeasure::Dirac(UnitOf(kind));
    for (int i = 0; i < instances; ++i) {
      auto random_measure = [&] {
        if (kind == UndergroupKind::kReal) return testing::RandomMeasure(rng, kind, 3);
        return testing::UniformInt(rng, 0, 3) ? testing::RandomLatticeMeasure(rng, 2, 3)
                                              : testing::RandomMeasure(rng, kind, 3);
      };
      const AtomicMeasure l = random_measure(), m = random_measure(), n = random_measure();
      // (a)
      const auto um = Convolve(unit, m), mu = Convolve(m, unit);
      check(um && mu && SameMeasure(*um, m) && SameMeasure(*mu, m), "measure (a)");
      // (b)
      const auto lm = Convolve(l, m), mn = Convolve(m, n);
      if (lm && mn && m.MassAt(UnitOf(kind)) > 0.0) {
        if (!Convolve(l, n)) ++unit_middle;
      } else if (lm && mn) {
        ++convolved;
        const auto left = Convolve(*lm, n), right = Convolve(l, *mn);
        check(left && right && SameMeasure(*left, *right) && KrDistance(*left, *right) <= 1e-9,
              "measure (b)");
      }
      // (c)
      if (lm) {
        const auto lm1 = Convolve(PerturbMeasure(l, rng, delta), PerturbMeasure(m, rng, delta));
        check(lm1 && KrDistance(*lm1, *lm) <= 2 * delta + 1e-9, "measure (c)");
      }
      // (d)
      if (lm) {
        check(KrDistance(l, *lm) <= KrDistance(unit, m) + 1e-9, "measure (d) left");
        check(KrDistance(m, *lm) <= KrDistance(unit, l) + 1e-9, "measure (d) right");
      }
      // (e)
      check(KrDistance(l, m) <= 1.0 + 1e-9, "measure (e)");
    }
  }

  int total = 0;
  std::string which;
  for (const auto& [k, v] : violations) {
    total += v;
    which += fmt::format(" {}:{}", k, v);
  }
  return {total == 0 && composed > 1000 && convolved > 1000,
          fmt::format("{} instances per suite and undergroup, {} associativity triples, {} "
                      "convolution triples, violations {}{}; {} triples with the unit in the middle "
                      "where f h is undefined (excluded)",
                      instances, composed, convolved, total, which, unit_middle)};
}

// ---------------------------------------------------------------- 6
Outcome DualGap() {
  Rng rng(1006);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const UndergroupKind kind = i % 2 ? UndergroupKind::kReal : UndergroupKind::kStepMap;
    auto four = [&] {
      while (true) {
        const auto w = testing::RandomWeights(rng, 4);
        std::vector<Atom> atoms;
        for (int k = 0; k < 4; ++k) atoms.push_back({testing::RandomElement(rng, kind), w[k]});
        AtomicMeasure mu = AtomicMeasure::Create(kind, std::move(atoms), true);
        if (mu.size() == 4) return mu;
      }
    };
    const DualCheckResult r = KrDualCheck(four(), four());
    worst = std::max(worst, r.gap);
  }
  return {worst <= 1e-9, fmt::format("200 instances, max gap = {:.3e} (tol 1e-9)", worst)};
}

// ---------------------------------------------------------------- 7
Outcome Condition41Trend() {
  const SemigroupHandle limit = SemigroupHandle::Brownian(1024);
  const std::vector<int> levels = {2, 4, 6, 8, 10};
  const Condition41Table t = CheckCondition41(
      [](int n) { return SemigroupHandle::Discrete(RandomWalkStep(n), n); }, &limit,
      Dyadic::FromInt(1), levels, 1025 * 1024);
  bool strict = t.rows.size() == levels.size();
  std::string values;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    values += fmt::format(" {:.6f}", t.rows[i].kr);
    if (i > 0 && !(t.rows[i].kr < t.rows[i - 1].kr)) strict = false;
  }
  const bool halved = strict && t.rows.back().kr * 2 <= t.rows.front().kr;
  return {strict && halved,
          fmt::format("rho_KR at n = 2,4,6,8,10:{}; strictly decreasing {}, factor {:.2f} (need 2)",
                      values, strict ? "yes" : "no",
                      t.rows.empty() ? 0.0 : t.rows.front().kr / t.rows.back().kr)};
}

// ---------------------------------------------------------------- 8
Outcome SecondChaosMonotone() {
  ModelOptions options;
  options.psi = "second_chaos";
  options.level_lo = 4;
  options.level_hi = 10;
  const ModelSpec spec = BuiltinModel("random_walk", options);
  ScalingConfig config;
  config.budget.mode = Mode::kMonteCarlo;
  config.budget.mc_samples = 100000;
  config.budget.seed = 8;
  config.condition41 = false;
  const ConvergenceReport r = RunScalingExperiment(spec, config);
  bool ok = true;
  std::string leb, hit;
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const LevelResult& l = r.levels[i];
    if (l.error) return {false, "level " + std::to_string(l.n) + ": " + *l.error};
    leb += fmt::format(" {:.4f}", l.expected_lebesgue.value);
    hit += fmt::format(" {:.4f}", l.max_point_hit);
    if (i == 0) continue;
    const LevelResult& p = r.levels[i - 1];
    if (l.expected_lebesgue.value >
        p.expected_lebesgue.value +
            3 * std::hypot(l.expected_lebesgue.std_error, p.expected_lebesgue.std_error)) {
      ok = false;
    }
    if (l.max_point_hit > p.max_point_hit + 3 * std::hypot(l.max_point_hit_se, p.max_point_hit_se)) {
      ok = false;
    }
  }
  return {ok, fmt::format("n = 4..10, E[Leb]:{}; max hit:{} (within 3 se)", leb, hit)};
}

// ---------------------------------------------------------------- 9
Outcome McCalibration() {
  Rng rng(1009);
  int within = 0, total = 0, degenerate = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int cells = testing::UniformInt(rng, 3, 8);
    const UndergroupKind kind = i % 2 ? UndergroupKind::kReal : UndergroupKind::kStepMap;
    const AtomicMeasure mu = kind == UndergroupKind::kReal
                                 ? testing::RandomTwoAtomic(rng, kind)
                                 : testing::RandomLatticeMeasure(rng, 2, 3);
    const Functional psi =
        testing::RandomPointFunctional(rng, kind == UndergroupKind::kReal ? 0.0 : 0.3);
    const ClosedSet e = testing::RandomClosedSet(rng, cells);
    const GridSpec grid{mu, cells};
    Budget exact;
    exact.mode = Mode::kExact;
    double truth;
    try {
      truth = ConditionalSecondMoment(psi, grid, e, exact).value;
    } catch (const ZeroFunctional&) {
      --i;
      continue;
    }
    Budget mc;
    mc.mode = Mode::kMonteCarlo;
    mc.mc_samples = 100000;
    mc.seed = 5000 + i;
    const EstimatorReport est = ConditionalSecondMoment(psi, grid, e, mc);
    if (est.std_error > 0.0) {
      worst_z = std::max(worst_z, std::fabs(est.value - truth) / est.std_error);
    } else {
      ++degenerate;
    }
    // Constant functionals give identical samples and a zero standard error;
    // the 1e-12 floor absorbs rounding there.
    if (std::fabs(est.value - truth) <= 4 * est.std_error + 1e-12) {
      ++within;
    } else if (std::getenv("FWSCALE_ACCEPTANCE_VERBOSE")) {
      std::cerr << fmt::format("  miss: cells {} kind {} E {} exact {} mc {} se {}\n", cells,
                               static_cast<int>(kind), e.ToString(), truth, est.value,
                               est.std_error);
    }
    ++total;
  }
  return {within >= 99,
          fmt::format("{}/{} within 4 se + 1e-12 (need 99), worst z = {:.2f}, {} with zero se",
                      within, total, worst_z, degenerate)};
}

// ---------------------------------------------------------------- 10
Outcome CoalescingDemo() {
  bool ok = true;
  std::string detail;
  for (int n = 2; n <= 4; ++n) {
    const CoalescingLevel a = BuildCoalescingLevel(n, 0, "reflect");
    const CoalescingLevel b = BuildCoalescingLevel(n, 0, "reflect");
    const bool deterministic = a.boundaries == b.boundaries && a.perturbed == b.perturbed;
    bool off_lattice = true;
    for (const Dyadic& d : a.boundaries) off_lattice = off_lattice && d.log2den() == a.lattice_log2 + 2;
    const bool words_defined = ConvolutionPower(a.measure, 1 << n).has_value();

    ScalingConfig config;
    config.budget.mode = Mode::kExact;
    config.report_atom_limit = config.atom_cap;
    const LevelResult level = RunLevel(BuiltinModel("coalescing_flow"), n, config);
    double mass = 0.0;
    if (level.measure) {
      mass = level.measure->dropped_mass;
      for (const SetAtom& s : level.measure->atoms) mass += s.p;
    }
    const bool exact = level.measure.has_value() && level.c_n.exact;
    const bool level_ok = deterministic && off_lattice && words_defined && exact &&
                          std::fabs(mass - 1.0) <= 1e-10 && a.sites <= 8;
    ok = ok && level_ok;
    detail += fmt::format(" n={}: sites {}, atoms {}, |mass-1| {:.1e}, words defined {}, "
                          "perturbed {};",
                          n, a.sites, level.measure ? level.measure->atoms.size() : 0,
                          std::fabs(mass - 1.0), words_defined ? "yes" : "no",
                          a.perturbed ? "yes" : "no");
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 11
int RunCli(const std::string& args) {
  const std::string cmd = std::string(FWSCALE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome CliDeterminism() {
  const fs::path dir = fs::temp_directory_path() / "fwscale_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "experiment.cfg";
  std::ofstream(cfg) << "model = random_walk\nlevels = 2..6\npsi = second_chaos\nmode = mc\n"
                        "budget.mc_samples = 20000\nseed = 424242\n";
  const int a = RunCli("--out-dir " + (dir / "a").string() + " converge " + cfg.string());
  const int b = RunCli("--out-dir " + (dir / "b").string() + " converge " + cfg.string());
  if (a != 0 || b != 0) return {false, fmt::format("exit codes {} and {}", a, b)};
  bool same = true;
  for (const char* f : {"report.json", "levels.csv"}) {
    same = same && ReadFile((dir / "a" / f).string()) == ReadFile((dir / "b" / f).string());
  }
  const std::size_t bytes = ReadFile((dir / "a" / "report.json").string()).size();
  fs::remove_all(dir);
  return {same, fmt::format("report.json ({} bytes) and levels.csv byte-identical: {}", bytes,
                            same ? "yes" : "no")};
}

}  // namespace
}  // namespace fwscale

int main(int argc, char** argv) {
  using namespace fwscale;
  const std::vector<Criterion> all = {
      {1, "Parseval normalization", 10, Parseval},
      {2, "interval identity, Walsh side vs direct average", 30, IntervalIdentity},
      {3, "inclusion-exclusion equals Walsh exact path", 120, IeEqualsExact},
      {4, "first chaos law is uniform on cells", 0, FirstChaos},
      {5, "undergroup and measure-undergroup axioms", 120, UndergroupAxioms},
      {6, "transport primal-dual gap", 0, DualGap},
      {7, "random walk approaches Brownian motion", 60, Condition41Trend},
      {8, "second chaos E[Leb] and point hits non-increasing", 300, SecondChaosMonotone},
      {9, "two-replica Monte Carlo calibration", 0, McCalibration},
      {10, "coalescing flow exact spectra", 120, CoalescingDemo},
      {11, "CLI determinism", 0, CliDeterminism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit <= 0 || secs < c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    const std::string limit = c.time_limit > 0 ? fmt::format(" < {:.0f}s", c.time_limit) : "";
    std::cout << fmt::format("[{}] {:2d} {}: {} | {:.2f}s{}{}\n", pass ? "PASS" : "FAIL", c.id,
                             c.name, o.detail, secs, limit, in_time ? "" : " (too slow)")
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
