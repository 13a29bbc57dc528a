#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwscale/functional.hpp"
#include "fwscale/measures.hpp"

namespace fwscale {

struct ModelOptions {
  // Empty selects the model's default functional.
  std::string psi;
  // Truncation level for the random-walk functionals; <= 0 disables it.
  double psi_clamp = 4.0;
  double psi_x0 = 1.0 / 3.0;
  // Coalescing flow: 0 means min(lattice size, 8).
  int sites = 0;
  std::string boundary = "reflect";
  int level_lo = 2;
  int level_hi = 6;
  int m_discretization = 512;
};

struct ModelSpec {
  std::string name;
  UndergroupKind kind = UndergroupKind::kReal;
  // mu^(n), the increment law at pitch 2^-n.
  std::function<AtomicMeasure(int)> level_measure;
  std::optional<SemigroupHandle> limit;
  Functional psi = Functional::PointEvaluation("constant", 0.0, [](double) { return 1.0; }, 1.0);
  std::string psi_note;
  int level_lo = 2;
  int level_hi = 6;
  // Cells per unit time at level n; 0 means 2^n.
  int fixed_cells = 0;
  // Free-form description of the construction, copied into reports.
  std::map<std::string, std::string> parameters;

  int CellsAt(int n) const { return fixed_cells > 0 ? fixed_cells : 1 << n; }

  SemigroupHandle LevelHandle(int n) const {
    return SemigroupHandle::Discrete(level_measure(n), n);
  }
};

// "random_walk" or "coalescing_flow"; UnknownModel otherwise.
ModelSpec BuiltinModel(const std::string& name, const ModelOptions& options = {});

// Functional library by name for each undergroup:
//   real:    endpoint, endpoint_clamped, second_chaos, sign, constant
//   stepmap: threshold, constant
// Throws std::invalid_argument on an unknown name.
Functional MakeFunctional(UndergroupKind kind, const std::string& name,
                          const ModelOptions& options);

// Random walk level: 1/2 delta(-2^{-n/2}) + 1/2 delta(+2^{-n/2}).
AtomicMeasure RandomWalkStep(int n);

// One level of the coalescing flow. Sites sit at the centres of m
// consecutive cells of the lattice of spacing 2^-k, k = ceil(n/2), centred
// in (0,1). Each site moves one lattice step up or down with probability
// 1/2; sites that would cross meet at the midpoint, and the edge sites are
// held inside the occupied range. A map sends the domain cell of each site
// to its new position.
struct CoalescingLevel {
  AtomicMeasure measure = AtomicMeasure::Dirac(StepMap::Unit());
  int lattice_log2 = 0;
  int sites = 0;
  std::vector<Dyadic> boundaries;
  // True when the domain boundaries were shifted off the lattice because
  // they could coincide with a meeting point.
  bool perturbed = false;
};

CoalescingLevel BuildCoalescingLevel(int n, int sites, const std::string& boundary);

// Step map of one sign pattern (bit i set: site i moves up).
StepMap CoalescingMap(const CoalescingLevel& level, unsigned pattern);

}  // namespace fwscale
