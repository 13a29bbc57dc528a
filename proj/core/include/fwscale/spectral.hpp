#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fwscale/closed_set.hpp"
#include "fwscale/functional.hpp"
#include "fwscale/measures.hpp"

namespace fwscale {

enum class Mode { kAuto, kExact, kMonteCarlo };

std::string ToString(Mode mode);
Mode ParseMode(const std::string& name);

struct Budget {
  // Live pair states allowed in exact chains.
  std::size_t exact_states = 1 << 16;
  std::size_t mc_samples = 100000;
  std::size_t transport_pairs = kDefaultTransportPairs;
  Mode mode = Mode::kAuto;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Increments X_{k-1,k} drawn from `increment` on `cells` cells of [0,1].
struct GridSpec {
  AtomicMeasure increment;
  int cells = 1;
};

struct EstimatorReport {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
  std::size_t samples = 0;
  std::vector<std::string> notes;

  std::string mode() const { return exact ? "exact" : "mc"; }
};

// c_n = E|psi(X_{0,1})|^2 (unnormalized).
EstimatorReport SecondMoment(const Functional& psi, const GridSpec& grid,
                             const Budget& budget);

// E|E[psi | increments in cells inside E]|^2 / c_n. Exact by a pair chain
// when it fits budget.exact_states, otherwise the two-replica estimator.
EstimatorReport ConditionalSecondMoment(const Functional& psi, const GridSpec& grid,
                                        const ClosedSet& e, const Budget& budget);

// Pr{S = T} = sum over E subset T of (-1)^{|T|-|E|} Pr{S subset E}, for all
// T at once (entries indexed by cell bitmask).
std::vector<double> MobiusInvert(std::vector<double> subset_probability, int cells);

inline constexpr double kDropFloor = 1e-14;

struct IeResult {
  SpectralMeasure measure;
  // Pr{S subset E} by bitmask, normalized by c_n.
  std::vector<double> subset_probability;
  bool exact = true;
  std::size_t samples = 0;
  double c_n = 0.0;
  // Set when some atom fell below -max(3 std_error, 1e-12) before clipping.
  bool negative_mass = false;
  std::vector<std::string> diagnostics;
};

// Full law of S by inclusion-exclusion over all 2^cells sets E.
// BudgetExceeded when 2^cells > 2^20 (exact) or 2^12 (Monte Carlo).
IeResult SpectralMeasureIe(const Functional& psi, const GridSpec& grid,
                           const Budget& budget);

// Which cells of a grid with `cells` cells lie in E as point sets.
std::vector<bool> CellsInside(const ClosedSet& e, int cells);

// Cell indices whose closure contains t (one, or two on an inner boundary).
std::vector<int> CellsAt(double t, int cells);

// Monte Carlo summaries of S without building its law: E[Leb S], Pr{t in S}
// on a grid, and Pr{S subset E} for a family. Hits use
// Pr{S meets C} = E[(psi - psi^C)^2] / (2 c_n), psi^C having the increments
// in C redrawn.
struct SetStatistics {
  EstimatorReport c_n;
  EstimatorReport expected_lebesgue;
  std::vector<double> t_grid;
  std::vector<EstimatorReport> point_hits;
  std::vector<EstimatorReport> profile;
};

SetStatistics EstimateSetStatistics(const Functional& psi, const GridSpec& grid,
                                    const std::vector<double>& t_grid,
                                    const std::vector<ClosedSet>& family,
                                    const Budget& budget);

}  // namespace fwscale
