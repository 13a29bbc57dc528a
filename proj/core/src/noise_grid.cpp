#include "fwscale/noise_grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "fwscale/errors.hpp"
#include "fwscale/monte_carlo.hpp"

namespace fwscale {

NoiseGrid NoiseGrid::Sample(const AtomicMeasure& increment, int cells,
                            std::mt19937_64& rng) {
  std::vector<double> cdf;
  double acc = 0.0;
  for (const Atom& a : increment.atoms()) cdf.push_back(acc += a.weight);
  cdf.back() = 1.0;
  std::vector<Element> incs;
  incs.reserve(cells);
  for (int k = 0; k < cells; ++k) {
    const auto i = std::upper_bound(cdf.begin(), cdf.end(), Uniform01(rng)) - cdf.begin();
    incs.push_back(increment.atoms()[i].element);
  }
  return FromIncrements(increment.kind(), std::move(incs));
}

NoiseGrid NoiseGrid::FromIncrements(UndergroupKind kind, std::vector<Element> increments) {
  for (const Element& e : increments) {
    if (KindOf(e) != kind) throw MixedUndergroup();
  }
  NoiseGrid g;
  g.kind_ = kind;
  g.increments_ = std::move(increments);
  return g;
}

Element NoiseGrid::Product(int s, int t) const {
  if (s < 0 || t > cells() || s > t) throw std::out_of_range("bad grid indices");
  Element acc = UnitOf(kind_);
  for (int k = s; k < t; ++k) {
    auto next = Compose(acc, increments_[k]);
    if (!next) {
      throw UndefinedComposition("X_{" + std::to_string(s) + "," + std::to_string(t) + "}");
    }
    acc = std::move(*next);
  }
  return acc;
}

NoiseGrid NoiseGrid::Shifted(int by) const {
  if (by < 0 || by > cells()) throw std::out_of_range("bad shift");
  return FromIncrements(kind_, {increments_.begin() + by, increments_.end()});
}

}  // namespace fwscale
