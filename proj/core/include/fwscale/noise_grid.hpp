#pragma once

#include <random>
#include <vector>

#include "fwscale/measures.hpp"

namespace fwscale {

// One realization of the increments X_{k,k+1}, k = 0..cells-1, and their
// products X_{s,t} = X_{s,s+1} ... X_{t-1,t} (grid indices s <= t).
class NoiseGrid {
 public:
  static NoiseGrid Sample(const AtomicMeasure& increment, int cells, std::mt19937_64& rng);
  static NoiseGrid FromIncrements(UndergroupKind kind, std::vector<Element> increments);

  int cells() const { return static_cast<int>(increments_.size()); }
  UndergroupKind kind() const { return kind_; }
  const Element& Increment(int k) const { return increments_.at(k); }

  // X_{s,t}; X_{s,s} is the unit. Throws UndefinedComposition.
  Element Product(int s, int t) const;

  // The grid seen from index `by`: increments by..cells-1 re-indexed from 0.
  NoiseGrid Shifted(int by) const;

 private:
  UndergroupKind kind_ = UndergroupKind::kReal;
  std::vector<Element> increments_;
};

}  // namespace fwscale
