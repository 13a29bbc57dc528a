#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "fwscale/functional.hpp"
#include "fwscale/measures.hpp"

namespace fwscale {

// The states reachable by a functional's evaluation chain under one
// increment measure, interned and with memoized transitions. Not thread
// safe.
class StateChain {
 public:
  StateChain(Functional psi, AtomicMeasure increment, std::size_t max_states);

  int initial() const { return 0; }
  int size() const { return static_cast<int>(states_.size()); }
  int increments() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const Functional& functional() const { return psi_; }
  const AtomicMeasure& increment() const { return increment_; }

  // Index of the state after increment `inc`; throws UndefinedComposition
  // when the composition fails and BudgetExceeded past `max_states`.
  int Next(int state, int inc);
  double Value(int state);

 private:
  int Intern(Element e);

  Functional psi_;
  AtomicMeasure increment_;
  std::size_t max_states_;
  std::vector<double> weights_;
  std::vector<Element> states_;
  std::vector<std::vector<int>> next_;
  std::vector<double> values_;
  std::vector<bool> has_value_;
  std::map<double, int> real_index_;
  std::map<StepMap, int> map_index_;
};

struct ChainMoments {
  double mean = 0.0;
  double second_moment = 0.0;
};

// Mean and mean square of psi(X_{0,cells}) by a forward pass over states.
ChainMoments SingleChainMoments(StateChain& chain, int cells);

// E[psi(X) psi(X')] where the two words share the increments of cells with
// shared[c] set and draw independent increments elsewhere. Throws
// BudgetExceeded when more than `max_pairs` pair states are live.
double PairChainExpectation(StateChain& chain, const std::vector<bool>& shared,
                            std::size_t max_pairs);

// The same for every subset of cells at once (entry E = bitmask of shared
// cells), sharing work across common prefixes. cells <= 30.
std::vector<double> PairChainAllSubsets(StateChain& chain, int cells,
                                        std::size_t max_pairs);

}  // namespace fwscale
