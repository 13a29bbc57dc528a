#include "fwscale/state_chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "fwscale/errors.hpp"

namespace fwscale {

StateChain::StateChain(Functional psi, AtomicMeasure increment, std::size_t max_states)
    : psi_(std::move(psi)), increment_(std::move(increment)), max_states_(max_states) {
  for (const Atom& a : increment_.atoms()) weights_.push_back(a.weight);
  Intern(psi_.Initial(increment_.kind()));
}

int StateChain::Intern(Element e) {
  if (const auto* r = std::get_if<RealElement>(&e)) {
    const double x = r->x;
    const double tol = kRealMergeTolerance * std::max(1.0, std::fabs(x));
    auto it = real_index_.lower_bound(x - tol);
    if (it != real_index_.end() && it->first <= x + tol) return it->second;
  } else {
    auto it = map_index_.find(std::get<StepMap>(e));
    if (it != map_index_.end()) return it->second;
  }
  if (states_.size() >= max_states_) {
    throw BudgetExceeded("state chain exceeds " + std::to_string(max_states_) + " states");
  }
  const int id = static_cast<int>(states_.size());
  if (const auto* r = std::get_if<RealElement>(&e)) {
    real_index_.emplace(r->x, id);
  } else {
    map_index_.emplace(std::get<StepMap>(e), id);
  }
  states_.push_back(std::move(e));
  next_.emplace_back(weights_.size(), -1);
  values_.push_back(0.0);
  has_value_.push_back(false);
  return id;
}

int StateChain::Next(int state, int inc) {
  int cached = next_[state][inc];
  if (cached >= 0) return cached;
  auto advanced = psi_.Advance(states_[state], increment_.atoms()[inc].element);
  if (!advanced) {
    throw UndefinedComposition("state " + DebugString(states_[state]) + " with increment " +
                               DebugString(increment_.atoms()[inc].element));
  }
  const int id = Intern(std::move(*advanced));
  next_[state][inc] = id;
  return id;
}

double StateChain::Value(int state) {
  if (!has_value_[state]) {
    values_[state] = psi_.Value(states_[state]);
    has_value_[state] = true;
  }
  return values_[state];
}

ChainMoments SingleChainMoments(StateChain& chain, int cells) {
  std::vector<double> dist{1.0};
  const int k = chain.increments();
  for (int c = 0; c < cells; ++c) {
    std::vector<double> next(chain.size(), 0.0);
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == 0.0) continue;
      for (int g = 0; g < k; ++g) {
        const int t = chain.Next(static_cast<int>(s), g);
        if (next.size() <= static_cast<std::size_t>(t)) next.resize(chain.size(), 0.0);
        next[t] += dist[s] * chain.weights()[g];
      }
    }
    dist = std::move(next);
  }
  ChainMoments m;
  for (std::size_t s = 0; s < dist.size(); ++s) {
    if (dist[s] == 0.0) continue;
    const double v = chain.Value(static_cast<int>(s));
    m.mean += dist[s] * v;
    m.second_moment += dist[s] * v * v;
  }
  return m;
}

namespace {

using PairDist = std::vector<std::pair<std::uint64_t, double>>;

std::uint64_t PairKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return static_cast<std::uint64_t>(a) << 32 | static_cast<std::uint32_t>(b);
}

void Compact(PairDist& d, std::size_t max_pairs) {
  std::sort(d.begin(), d.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (out > 0 && d[out - 1].first == d[i].first) {
      d[out - 1].second += d[i].second;
    } else {
      d[out++] = d[i];
    }
  }
  d.resize(out);
  if (d.size() > max_pairs) {
    throw BudgetExceeded("pair chain exceeds " + std::to_string(max_pairs) + " pair states");
  }
}

PairDist Step(StateChain& chain, const PairDist& d, bool shared, std::size_t max_pairs) {
  const int k = chain.increments();
  const auto& w = chain.weights();
  PairDist out;
  out.reserve(d.size() * (shared ? k : k * k));
  for (const auto& [key, mass] : d) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (shared) {
      for (int g = 0; g < k; ++g) {
        out.push_back({PairKey(chain.Next(a, g), chain.Next(b, g)), mass * w[g]});
      }
    } else {
      for (int g = 0; g < k; ++g) {
        const int na = chain.Next(a, g);
        for (int h = 0; h < k; ++h) {
          out.push_back({PairKey(na, chain.Next(b, h)), mass * w[g] * w[h]});
        }
      }
    }
  }
  Compact(out, max_pairs);
  return out;
}

double Expectation(StateChain& chain, const PairDist& d) {
  double e = 0.0;
  for (const auto& [key, mass] : d) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    e += mass * chain.Value(a) * chain.Value(b);
  }
  return e;
}

}  // namespace

double PairChainExpectation(StateChain& chain, const std::vector<bool>& shared,
                            std::size_t max_pairs) {
  PairDist d{{PairKey(chain.initial(), chain.initial()), 1.0}};
  for (bool s : shared) d = Step(chain, d, s, max_pairs);
  return Expectation(chain, d);
}

std::vector<double> PairChainAllSubsets(StateChain& chain, int cells,
                                        std::size_t max_pairs) {
  if (cells < 0 || cells > 30) throw std::invalid_argument("cells must be in [0, 30]");
  std::vector<double> out(std::size_t{1} << cells, 0.0);
  std::vector<PairDist> level(cells + 1);
  level[0] = {{PairKey(chain.initial(), chain.initial()), 1.0}};
  auto visit = [&](auto&& self, int depth, std::uint64_t mask) -> void {
    if (depth == cells) {
      out[mask] = Expectation(chain, level[depth]);
      return;
    }
    for (int bit = 0; bit < 2; ++bit) {
      level[depth + 1] = Step(chain, level[depth], bit == 1, max_pairs);
      self(self, depth + 1, mask | (static_cast<std::uint64_t>(bit) << depth));
    }
  };
  visit(visit, 0, 0);
  return out;
}

}  // namespace fwscale
