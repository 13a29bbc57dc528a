#pragma once

#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fwscale/dyadic.hpp"

namespace fwscale {

enum class UndergroupKind { kReal, kStepMap };

std::string ToString(UndergroupKind kind);
UndergroupKind ParseUndergroupKind(const std::string& name);

// Translation of the real line. Composition is addition, always defined.
struct RealElement {
  double x = 0.0;

  friend bool operator==(const RealElement&, const RealElement&) = default;
};

// Non-decreasing step function (0,1) -> (0,1): value b_k on (a_k, a_{k+1}),
// with a_0 = 0 and a_{n+1} = 1. The unit is the identity map x -> x.
//
// Maps are kept canonical: equal neighbouring values are merged by deleting
// the jump between them, so equality is equality of point lists.
class StepMap {
 public:
  static StepMap Unit() { return StepMap(); }

  // Validates (|B| = |A| + 1, points strictly inside (0,1), A strictly
  // increasing, B non-decreasing) and normalizes. Throws
  // std::invalid_argument on malformed input.
  static StepMap Create(std::vector<Dyadic> jumps, std::vector<Dyadic> values);

  bool is_unit() const { return unit_; }
  const std::vector<Dyadic>& jumps() const { return jumps_; }
  const std::vector<Dyadic>& values() const { return values_; }

  // f(x); std::nullopt exactly at a jump point.
  std::optional<double> Evaluate(double x) const;

  friend std::strong_ordering operator<=>(const StepMap& a, const StepMap& b);
  friend bool operator==(const StepMap& a, const StepMap& b);

 private:
  StepMap() = default;

  bool unit_ = true;
  std::vector<Dyadic> jumps_;
  std::vector<Dyadic> values_;
};

using Element = std::variant<RealElement, StepMap>;

UndergroupKind KindOf(const Element& e);
Element UnitOf(UndergroupKind kind);
bool IsUnit(const Element& e);

// fg, meaning x -> g(f(x)). std::nullopt when undefined (B and C intersect
// for step maps). Throws MixedUndergroup when kinds differ.
std::optional<Element> Compose(const Element& f, const Element& g);

// Capped metric in [0,1]: min(1,|x-y|) on the line; min(1, l1-Hausdorff
// distance between graphs) for step maps.
double Metric(const Element& f, const Element& g);

// Axis-aligned (or, for the unit, diagonal) closed segment in [0,1]^2.
struct Segment {
  double x0, y0, x1, y1;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// The closed rectilinear graph of a step map; the unit maps to the diagonal.
std::vector<Segment> StepMapGraph(const StepMap& f);

// Exact Hausdorff distance, under the l1 norm of the square, between two
// finite unions of segments produced by StepMapGraph.
double HausdorffL1(const std::vector<Segment>& a, const std::vector<Segment>& b);

// Reals closer than this are treated as the same atom.
inline constexpr double kRealMergeTolerance = 1e-12;

// Strict weak order used for sorting atoms; exact for step maps.
bool ElementLess(const Element& a, const Element& b);
// Exact for step maps, within kRealMergeTolerance for reals.
bool ApproxEqual(const Element& a, const Element& b);

std::string DebugString(const Element& e);

}  // namespace fwscale
