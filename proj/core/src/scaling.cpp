#include "fwscale/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fwscale/errors.hpp"
#include "fwscale/exchangeable.hpp"

namespace fwscale {

std::vector<ClosedSet> ScalingConfig::DefaultFamily() {
  return {
      ClosedSet::Range(4, 0, 1),         // [0, 1/4]
      ClosedSet::Range(4, 0, 2),         // [0, 1/2]
      ClosedSet::Range(4, 0, 3),         // [0, 3/4]
      ClosedSet::Range(4, 2, 4),         // [1/2, 1]
      ClosedSet::Range(4, 1, 3),         // [1/4, 3/4]
      ClosedSet::Create(4, {0, 3}),      // [0, 1/4] u [3/4, 1]
      ClosedSet::Full(4),
  };
}

namespace {

EstimatorReport ExactValue(double v) {
  EstimatorReport r;
  r.value = v;
  return r;
}

// Fills the set summaries of a level from an exact law.
void SummarizeExact(LevelResult& level, const SpectralMeasure& nu,
                    const ScalingConfig& config) {
  level.expected_lebesgue = ExactValue(nu.ExpectedLebesgue());
  for (double t : config.t_grid) level.point_hits.push_back(ExactValue(nu.PointHit(t)));
  level.count_distribution = nu.CountDistribution();
  double mean = 0.0;
  for (std::size_t j = 0; j < level.count_distribution.size(); ++j) {
    mean += j * level.count_distribution[j];
  }
  level.mean_count = ExactValue(mean);
  for (const ProfileRow& row : SubsetProbabilityProfile(nu, config.e_family)) {
    level.profile.push_back(ExactValue(row.p));
  }
}

std::size_t TransportSupport(const ScalingConfig& config) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::sqrt(static_cast<double>(config.budget.transport_pairs))));
}

void RunExchangeable(LevelResult& level, const ModelSpec& spec, const AtomicMeasure& mu,
                     const ScalingConfig& config) {
  const ExchangeableLaw law = ExchangeableLaw::Compute(spec.psi, mu, level.cells);
  level.method = "krawtchouk";
  level.c_n = ExactValue(law.c_n());
  level.expected_lebesgue = ExactValue(law.ExpectedLebesgue());
  for (double t : config.t_grid) level.point_hits.push_back(ExactValue(law.PointHit(t)));
  level.count_distribution = law.size_probability();
  level.mean_count = ExactValue(law.ExpectedLebesgue() * level.cells);
  for (const ClosedSet& e : config.e_family) {
    level.profile.push_back(ExactValue(law.SubsetProbability(e)));
  }

  const std::size_t k = TransportSupport(config);
  std::size_t total_atoms = 0;
  bool enumerable = true;
  for (int j = 0; j <= level.cells && enumerable; ++j) {
    if (law.size_probability()[j] <= 1e-15) continue;
    const double count = std::round(std::exp(std::lgamma(level.cells + 1.0) -
                                             std::lgamma(j + 1.0) -
                                             std::lgamma(level.cells - j + 1.0)));
    if (count > static_cast<double>(config.report_atom_limit) || total_atoms + count > 1e7) {
      enumerable = false;
    } else {
      total_atoms += static_cast<std::size_t>(std::llround(count));
    }
  }
  if (enumerable) {
    SpectralMeasure nu = law.Atoms(config.atom_cap);
    if (nu.atoms.size() <= config.report_atom_limit) level.measure = nu;
    if (nu.atoms.size() <= k) {
      level.transport_measure = std::move(nu);
      return;
    }
  }
  level.transport_measure = law.Resample(k);
  level.transport_note = "law resampled systematically to " + std::to_string(k) + " draws";
}

void RunInclusionExclusion(LevelResult& level, const ModelSpec& spec,
                           const AtomicMeasure& mu, const ScalingConfig& config) {
  Budget exact = config.budget;
  exact.mode = Mode::kExact;
  IeResult ie = SpectralMeasureIe(spec.psi, GridSpec{mu, level.cells}, exact);
  level.method = "inclusion-exclusion";
  level.c_n = ExactValue(ie.c_n);
  level.negative_mass = ie.negative_mass;
  for (auto& d : ie.diagnostics) level.diagnostics.push_back(std::move(d));
  SummarizeExact(level, ie.measure, config);
  if (ie.measure.atoms.size() <= config.report_atom_limit) level.measure = ie.measure;
  const std::size_t k = TransportSupport(config);
  if (ie.measure.atoms.size() <= k) {
    level.transport_measure = std::move(ie.measure);
  } else {
    level.transport_measure = ResampleSystematic(ie.measure, k);
    level.transport_note = "law resampled systematically to " + std::to_string(k) + " draws";
  }
}

void RunMonteCarlo(LevelResult& level, const ModelSpec& spec, const AtomicMeasure& mu,
                   const ScalingConfig& config) {
  Budget budget = config.budget;
  // Each level gets its own stream.
  budget.seed = config.budget.seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(level.n + 1));
  SetStatistics st = EstimateSetStatistics(spec.psi, GridSpec{mu, level.cells}, config.t_grid,
                                           config.e_family, budget);
  level.method = "monte-carlo";
  level.c_n = st.c_n;
  level.expected_lebesgue = st.expected_lebesgue;
  level.point_hits = st.point_hits;
  level.profile = st.profile;
  level.mean_count = st.expected_lebesgue;
  level.mean_count.value *= level.cells;
  level.mean_count.std_error *= level.cells;
  level.kr_note = "law of S not available in Monte Carlo mode";
}

bool NonIncreasing(double prev, double prev_se, double cur, double cur_se) {
  return cur <= prev + 3.0 * std::hypot(prev_se, cur_se) + 1e-12;
}

}  // namespace

LevelResult RunLevel(const ModelSpec& spec, int n, const ScalingConfig& config) {
  LevelResult level;
  level.n = n;
  if (n < 0 || n > 24) throw std::invalid_argument("level must be in [0, 24]");
  level.cells = spec.CellsAt(n);
  const AtomicMeasure mu = spec.level_measure(n);
  const Mode mode = config.budget.mode;

  if (mode != Mode::kMonteCarlo && ExchangeableLaw::Applicable(mu, level.cells)) {
    RunExchangeable(level, spec, mu, config);
  } else if (mode != Mode::kMonteCarlo && level.cells <= 20) {
    try {
      RunInclusionExclusion(level, spec, mu, config);
    } catch (const BudgetExceeded& e) {
      if (mode == Mode::kExact) throw;
      level.diagnostics.push_back(std::string("exact path unavailable: ") + e.what());
      RunMonteCarlo(level, spec, mu, config);
    }
  } else if (mode == Mode::kExact) {
    throw BudgetExceeded("no exact path for " + std::to_string(level.cells) + " cells");
  } else {
    RunMonteCarlo(level, spec, mu, config);
  }

  for (std::size_t i = 0; i < level.point_hits.size(); ++i) {
    if (i == 0 || level.point_hits[i].value > level.max_point_hit) {
      level.max_point_hit = level.point_hits[i].value;
      level.max_point_hit_se = level.point_hits[i].std_error;
    }
  }
  return level;
}

ConvergenceReport RunScalingExperiment(const ModelSpec& spec, const ScalingConfig& config) {
  if (spec.level_lo > spec.level_hi) throw std::invalid_argument("empty level range");
  ConvergenceReport report;
  report.model = spec.name;
  report.psi = spec.psi.name();
  report.psi_note = spec.psi_note;
  report.parameters = spec.parameters;
  report.level_lo = spec.level_lo;
  report.level_hi = spec.level_hi;
  report.seed = config.budget.seed;
  report.mode = ToString(config.budget.mode);
  report.t_grid = config.t_grid;
  report.e_family = config.e_family;

  for (int n = spec.level_lo; n <= spec.level_hi; ++n) {
    try {
      report.levels.push_back(RunLevel(spec, n, config));
    } catch (const BudgetExceeded& e) {
      LevelResult failed;
      failed.n = n;
      failed.cells = spec.CellsAt(n);
      failed.error = e.what();
      report.levels.push_back(std::move(failed));
    } catch (const ZeroFunctional& e) {
      LevelResult failed;
      failed.n = n;
      failed.cells = spec.CellsAt(n);
      failed.error = e.what();
      report.levels.push_back(std::move(failed));
    }
  }

  for (std::size_t i = 0; i + 1 < report.levels.size(); ++i) {
    LevelResult& a = report.levels[i];
    const LevelResult& b = report.levels[i + 1];
    if (a.error || b.error) continue;
    if (!a.transport_measure || !b.transport_measure) {
      if (a.kr_note.empty()) {
        a.kr_note = a.transport_measure
                        ? "law of S at level " + std::to_string(b.n) +
                              " not available in Monte Carlo mode"
                        : "law of S not available in Monte Carlo mode";
      }
      continue;
    }
    try {
      const RandomSetKrResult kr = RandomSetKr(*a.transport_measure, *b.transport_measure,
                                               config.budget.transport_pairs, true);
      a.kr_next = kr.value;
      std::string note = a.transport_note;
      if (!b.transport_note.empty()) note += (note.empty() ? "" : "; next level ") + b.transport_note;
      if (kr.resampled) note += (note.empty() ? "" : "; ") + std::string("resampled for the pair budget");
      a.kr_note = note;
    } catch (const BudgetExceeded& e) {
      a.kr_note = e.what();
    }
  }

  if (config.condition41) {
    std::vector<int> range;
    for (int n = spec.level_lo; n <= spec.level_hi; ++n) range.push_back(n);
    const Dyadic t = config.condition41_t
                         ? *config.condition41_t
                         : (spec.limit ? Dyadic::FromInt(1) : Dyadic(1, spec.level_lo));
    try {
      report.condition41 = CheckCondition41(
          [&](int n) { return spec.LevelHandle(n); }, spec.limit ? &*spec.limit : nullptr, t,
          range, config.budget.transport_pairs);
      report.condition41_note = spec.limit
                                    ? "distance to the limit semigroup at t = " + t.ToString()
                                    : "no limit handle; distance between consecutive levels at t = " +
                                          t.ToString();
      if (report.condition41->truncated_at) {
        report.condition41_note += "; stopped at level " +
                                   std::to_string(*report.condition41->truncated_at) +
                                   " (measure outgrew the transport pair budget)";
      }
    } catch (const Error& e) {
      report.condition41_note = std::string("semigroup distance table unavailable: ") + e.what();
    }
  }

  ReportFlags& f = report.flags;
  std::vector<const LevelResult*> ok;
  for (const LevelResult& l : report.levels) {
    if (!l.error) ok.push_back(&l);
  }
  for (std::size_t i = 1; i + 1 < ok.size(); ++i) {
    const LevelResult& a = *ok[i];
    const LevelResult& b = *ok[i + 1];
    if (!NonIncreasing(a.expected_lebesgue.value, a.expected_lebesgue.std_error,
                       b.expected_lebesgue.value, b.expected_lebesgue.std_error)) {
      f.lebesgue_nonincreasing = false;
    }
    if (!NonIncreasing(a.max_point_hit, a.max_point_hit_se, b.max_point_hit,
                       b.max_point_hit_se)) {
      f.point_hit_nonincreasing = false;
    }
  }
  for (std::size_t i = 0; i + 1 < ok.size(); ++i) {
    if (std::fabs(ok[i + 1]->c_n.value - 1.0) > std::fabs(ok[i]->c_n.value - 1.0) + kCnTrendSlack) {
      f.c_n_trend = false;
    }
    if (ok[i]->kr_next && i + 1 < ok.size() && ok[i + 1]->kr_next &&
        *ok[i + 1]->kr_next > *ok[i]->kr_next + 1e-9) {
      f.kr_nonincreasing = false;
    }
  }
  f.condition41_nonincreasing = report.condition41 ? report.condition41->monotone : true;
  return report;
}

FinitenessResult FinitenessHeuristic(const ConvergenceReport& report) {
  FinitenessResult r;
  bool all_distributions = true;
  for (const LevelResult& l : report.levels) {
    if (l.error) continue;
    r.levels.push_back(l.n);
    r.count_distributions.push_back(l.count_distribution);
    r.mean_counts.push_back(l.mean_count.value);
    r.cell_sizes.push_back(1.0 / l.cells);
    if (l.count_distribution.empty()) all_distributions = false;
  }
  if (r.levels.size() < 3) {
    throw InsufficientLevels("finiteness heuristic needs at least 3 levels, got " +
                             std::to_string(r.levels.size()));
  }

  const std::size_t k = r.levels.size();
  bool growing = true;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (!(r.mean_counts[i + 1] > 1.25 * r.mean_counts[i])) growing = false;
  }

  bool stabilizing = true;
  if (all_distributions) {
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const auto& a = r.count_distributions[i];
      const auto& b = r.count_distributions[i + 1];
      double tv = 0.0;
      for (std::size_t j = 0; j < std::max(a.size(), b.size()); ++j) {
        const double x = j < a.size() ? a[j] : 0.0;
        const double y = j < b.size() ? b[j] : 0.0;
        tv += std::fabs(x - y);
      }
      r.tv_consecutive.push_back(0.5 * tv);
    }
    for (std::size_t i = 0; i + 1 < r.tv_consecutive.size(); ++i) {
      if (r.tv_consecutive[i + 1] > r.tv_consecutive[i] + 1e-9) stabilizing = false;
    }
  } else {
    for (std::size_t i = 0; i + 2 < k; ++i) {
      const double d0 = std::fabs(r.mean_counts[i + 1] - r.mean_counts[i]);
      const double d1 = std::fabs(r.mean_counts[i + 2] - r.mean_counts[i + 1]);
      if (d1 > d0 + 1e-9) stabilizing = false;
    }
  }

  if (stabilizing && !growing) {
    r.flag = "classical-consistent";
  } else if (growing) {
    r.flag = "nonclassical-suspect";
  } else {
    r.flag = "inconclusive";
  }
  return r;
}

}  // namespace fwscale
