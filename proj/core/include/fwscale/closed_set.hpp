#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fwscale/measures.hpp"

namespace fwscale {

struct Interval {
  double lo;
  double hi;
};

// Union of the closed cells [i/N, (i+1)/N] for i in `cells`.
class ClosedSet {
 public:
  ClosedSet() = default;
  // Sorts the cells; throws std::invalid_argument on duplicates or
  // out-of-range indices.
  static ClosedSet Create(int resolution, std::vector<int> cells);
  // Bit i of `mask` selects cell i (resolution <= 64).
  static ClosedSet FromMask(int resolution, std::uint64_t mask);
  static ClosedSet Empty(int resolution) { return Create(resolution, {}); }
  static ClosedSet Full(int resolution);
  // Cells u..v-1, i.e. the interval [u/N, v/N].
  static ClosedSet Range(int resolution, int u, int v);

  int resolution() const { return resolution_; }
  const std::vector<int>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }
  int count() const { return static_cast<int>(cells_.size()); }
  double Lebesgue() const { return static_cast<double>(cells_.size()) / resolution_; }
  std::uint64_t Mask() const;

  // Maximal runs of adjacent cells as [first, last+1) index pairs.
  std::vector<std::pair<int, int>> Runs() const;
  std::vector<Interval> Intervals() const;
  bool Contains(double t) const;

  std::string ToString() const;

  friend auto operator<=>(const ClosedSet&, const ClosedSet&) = default;
  friend bool operator==(const ClosedSet&, const ClosedSet&) = default;

 private:
  int resolution_ = 1;
  std::vector<int> cells_;
};

// Point-set inclusion S subset of E, exact across resolutions.
bool IsSubset(const ClosedSet& s, const ClosedSet& e);

// Exact Hausdorff distance between finite unions of closed intervals. Both
// empty gives 0; exactly one empty gives 1.
double HausdorffDistance(std::span<const Interval> a, std::span<const Interval> b);
double HausdorffDistance(const ClosedSet& a, const ClosedSet& b);

struct SetAtom {
  ClosedSet set;
  double p;
};

// Finitely supported law of a random closed set at one resolution.
struct SpectralMeasure {
  int resolution = 1;
  // log2 of the resolution when it is a power of two, otherwise -1.
  int pitch_log2 = -1;
  std::vector<SetAtom> atoms;
  // Mass that was not turned into atoms (below the drop floor, or in sizes
  // too numerous to enumerate).
  double dropped_mass = 0.0;
  // Negative inclusion-exclusion mass removed before renormalizing.
  double clipped_mass = 0.0;

  double AtomMass() const;
  double ExpectedLebesgue() const;
  double PointHit(double t) const;
  // Mass by cell count, indexed 0..resolution.
  std::vector<double> CountDistribution() const;
};

int PitchLog2Of(int resolution);

struct ProfileRow {
  ClosedSet set;
  double p;
};

// Pr{S subset E} for each E, as the mass of atoms contained in E.
std::vector<ProfileRow> SubsetProbabilityProfile(const SpectralMeasure& nu,
                                                 const std::vector<ClosedSet>& family);

// Systematic resampling to at most k equal-weight draws, merged. Atoms are
// taken in their stored order; the result sums to one.
SpectralMeasure ResampleSystematic(const SpectralMeasure& nu, std::size_t k);

struct RandomSetKrResult {
  double value = 0.0;
  // Supports actually used; smaller than the originals when resampled.
  std::size_t support1 = 0;
  std::size_t support2 = 0;
  bool resampled = false;
};

// rho_KR between two random-set laws with ground cost min(1, Hausdorff).
// Each law is renormalized to its atom mass first. With `allow_resampling`
// a support too large for the pair budget is resampled down to about
// sqrt(max_pairs) atoms; otherwise BudgetExceeded is thrown.
RandomSetKrResult RandomSetKr(const SpectralMeasure& nu1, const SpectralMeasure& nu2,
                              std::size_t max_pairs = kDefaultTransportPairs,
                              bool allow_resampling = false);

}  // namespace fwscale
