#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwscale/closed_set.hpp"
#include "fwscale/measures.hpp"
#include "fwscale/models.hpp"
#include "fwscale/spectral.hpp"

namespace fwscale {

struct ScalingConfig {
  Budget budget;
  std::vector<double> t_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<ClosedSet> e_family = DefaultFamily();
  // Largest number of atoms enumerated for one spectral law.
  std::size_t atom_cap = std::size_t{1} << 20;
  // Laws with at most this many atoms are written into reports.
  std::size_t report_atom_limit = 4096;
  bool condition41 = true;
  // Time for the semigroup distance table; empty picks 1 for models with a
  // limit handle and 2^-level_lo otherwise.
  std::optional<Dyadic> condition41_t;

  static std::vector<ClosedSet> DefaultFamily();
};

struct LevelResult {
  int n = 0;
  int cells = 0;
  // "krawtchouk", "inclusion-exclusion" or "monte-carlo".
  std::string method;
  EstimatorReport c_n;
  EstimatorReport expected_lebesgue;
  std::vector<EstimatorReport> point_hits;
  double max_point_hit = 0.0;
  double max_point_hit_se = 0.0;
  // Law of the cell count of S, indexed 0..cells; empty in Monte Carlo mode.
  std::vector<double> count_distribution;
  EstimatorReport mean_count;
  std::vector<EstimatorReport> profile;
  // Exact law when small enough to report.
  std::optional<SpectralMeasure> measure;
  // Law used for transport against the next level (possibly resampled).
  std::optional<SpectralMeasure> transport_measure;
  std::string transport_note;
  std::optional<double> kr_next;
  std::string kr_note;
  bool negative_mass = false;
  std::vector<std::string> diagnostics;
  std::optional<std::string> error;
};

struct ReportFlags {
  bool lebesgue_nonincreasing = true;
  bool point_hit_nonincreasing = true;
  bool c_n_trend = true;
  bool condition41_nonincreasing = true;
  bool kr_nonincreasing = true;
};

struct ConvergenceReport {
  std::string model;
  std::string psi;
  std::string psi_note;
  std::map<std::string, std::string> parameters;
  int level_lo = 0;
  int level_hi = 0;
  std::uint64_t seed = 0;
  std::string mode;
  std::vector<double> t_grid;
  std::vector<ClosedSet> e_family;
  std::vector<LevelResult> levels;
  std::optional<Condition41Table> condition41;
  std::string condition41_note;
  ReportFlags flags;
};

inline constexpr double kCnTrendSlack = 1e-2;

// Runs every level in [spec.level_lo, spec.level_hi]. Budget problems at a
// level become that level's error marker; undefined compositions propagate.
ConvergenceReport RunScalingExperiment(const ModelSpec& spec, const ScalingConfig& config);

// One level on its own (also used by the spectrum command).
LevelResult RunLevel(const ModelSpec& spec, int n, const ScalingConfig& config);

struct FinitenessResult {
  // "classical-consistent", "nonclassical-suspect" or "inconclusive".
  std::string flag;
  std::vector<int> levels;
  std::vector<std::vector<double>> count_distributions;
  std::vector<double> mean_counts;
  std::vector<double> cell_sizes;
  // Total variation between consecutive count laws (when all are known).
  std::vector<double> tv_consecutive;
};

// Throws InsufficientLevels for fewer than 3 levels.
FinitenessResult FinitenessHeuristic(const ConvergenceReport& report);

}  // namespace fwscale
