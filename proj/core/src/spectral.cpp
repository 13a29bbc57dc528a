#include "fwscale/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>

#include "fwscale/errors.hpp"
#include "fwscale/monte_carlo.hpp"
#include "fwscale/state_chain.hpp"

namespace fwscale {

std::string ToString(Mode mode) {
  switch (mode) {
    case Mode::kAuto:
      return "auto";
    case Mode::kExact:
      return "exact";
    case Mode::kMonteCarlo:
      return "mc";
  }
  return "auto";
}

Mode ParseMode(const std::string& name) {
  if (name == "auto") return Mode::kAuto;
  if (name == "exact") return Mode::kExact;
  if (name == "mc") return Mode::kMonteCarlo;
  throw std::invalid_argument("unknown mode: " + name);
}

std::vector<bool> CellsInside(const ClosedSet& e, int cells) {
  std::vector<bool> inside(cells, false);
  const std::int64_t n = cells;
  const std::int64_t m = e.resolution();
  for (auto [c, d] : e.Runs()) {
    for (std::int64_t i = 0; i < n; ++i) {
      if (c * n <= i * m && (i + 1) * m <= d * n) inside[i] = true;
    }
  }
  return inside;
}

std::vector<int> CellsAt(double t, int cells) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("t must lie in [0,1]");
  const double s = t * cells;
  const double r = std::round(s);
  if (std::fabs(s - r) <= 1e-9 * cells) {
    const int k = static_cast<int>(r);
    if (k <= 0) return {0};
    if (k >= cells) return {cells - 1};
    return {k - 1, k};
  }
  return {std::min(cells - 1, static_cast<int>(std::floor(s)))};
}

namespace {

// Draws and evaluates words of increments directly on elements.
class WordSampler {
 public:
  WordSampler(const Functional& psi, const GridSpec& grid) : psi_(psi) {
    double acc = 0.0;
    for (const Atom& a : grid.increment.atoms()) {
      acc += a.weight;
      cdf_.push_back(acc);
      elements_.push_back(a.element);
    }
    cdf_.back() = 1.0;
    initial_ = psi.Initial(grid.increment.kind());
    unit_ = UnitOf(grid.increment.kind());
  }

  int Draw(std::mt19937_64& rng) const {
    const double u = Uniform01(rng);
    return static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }

  const Element& increment(int g) const { return elements_[g]; }
  const Element& initial() const { return initial_; }
  const Element& unit() const { return unit_; }

  Element Advance(const Element& state, const Element& inc) const {
    auto next = psi_.Advance(state, inc);
    if (!next) throw UndefinedComposition("sampled word");
    return std::move(*next);
  }

  Element ComposeOrThrow(const Element& f, const Element& g) const {
    auto h = Compose(f, g);
    if (!h) throw UndefinedComposition("sampled word");
    return std::move(*h);
  }

  double Value(const Element& state) const { return psi_.Value(state); }

  double Evaluate(const std::vector<int>& word) const {
    Element s = initial_;
    for (int g : word) s = Advance(s, elements_[g]);
    return psi_.Value(s);
  }

 private:
  const Functional& psi_;
  std::vector<double> cdf_;
  std::vector<Element> elements_;
  Element initial_;
  Element unit_;
};

std::optional<double> ExactSecondMoment(const Functional& psi, const GridSpec& grid,
                                        const Budget& budget) {
  try {
    StateChain chain(psi, grid.increment, budget.exact_states);
    return SingleChainMoments(chain, grid.cells).second_moment;
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }
}

void RequireSamples(const Budget& budget) {
  if (budget.mc_samples == 0) throw BudgetExceeded("Monte Carlo budget is zero");
}

}  // namespace

EstimatorReport SecondMoment(const Functional& psi, const GridSpec& grid,
                             const Budget& budget) {
  EstimatorReport r;
  if (auto c = ExactSecondMoment(psi, grid, budget)) {
    r.value = *c;
    return r;
  }
  if (budget.mode == Mode::kExact) {
    throw BudgetExceeded("state chain for c_n exceeds the exact budget");
  }
  RequireSamples(budget);
  WordSampler sampler(psi, grid);
  auto m = RunMonteCarlo(budget.mc_samples, 1, budget.seed, budget.threads,
                         [&](std::mt19937_64& rng, std::span<double> out) {
                           std::vector<int> word(grid.cells);
                           for (int& g : word) g = sampler.Draw(rng);
                           const double v = sampler.Evaluate(word);
                           out[0] = v * v;
                         });
  r.value = m[0].mean();
  r.std_error = m[0].std_error();
  r.exact = false;
  r.samples = budget.mc_samples;
  return r;
}

EstimatorReport ConditionalSecondMoment(const Functional& psi, const GridSpec& grid,
                                        const ClosedSet& e, const Budget& budget) {
  const std::vector<bool> shared = CellsInside(e, grid.cells);
  EstimatorReport r;
  if (budget.mode != Mode::kMonteCarlo) {
    try {
      StateChain chain(psi, grid.increment, budget.exact_states);
      const double c = SingleChainMoments(chain, grid.cells).second_moment;
      if (!(c > 0.0)) throw ZeroFunctional();
      r.value = PairChainExpectation(chain, shared, budget.exact_states) / c;
      return r;
    } catch (const BudgetExceeded&) {
      if (budget.mode == Mode::kExact) throw;
      r.notes.push_back("exact pair chain over budget; using Monte Carlo");
    }
  }
  RequireSamples(budget);
  const std::optional<double> exact_c = ExactSecondMoment(psi, grid, budget);
  WordSampler sampler(psi, grid);
  auto m = RunMonteCarlo(
      budget.mc_samples, 2, budget.seed, budget.threads,
      [&](std::mt19937_64& rng, std::span<double> out) {
        std::vector<int> word(grid.cells), other(grid.cells);
        for (int k = 0; k < grid.cells; ++k) word[k] = sampler.Draw(rng);
        for (int k = 0; k < grid.cells; ++k) {
          other[k] = shared[k] ? word[k] : sampler.Draw(rng);
        }
        const double a = sampler.Evaluate(word);
        const double b = sampler.Evaluate(other);
        out[0] = a * b;
        out[1] = a * a;
      });
  const double c = exact_c ? *exact_c : m[1].mean();
  if (!(c > 0.0)) throw ZeroFunctional();
  if (!exact_c) r.notes.push_back("c_n estimated from the same samples");
  r.value = m[0].mean() / c;
  r.std_error = m[0].std_error() / c;
  r.exact = false;
  r.samples = budget.mc_samples;
  return r;
}

std::vector<double> MobiusInvert(std::vector<double> q, int cells) {
  if (q.size() != (std::size_t{1} << cells)) {
    throw std::invalid_argument("subset table must have 2^cells entries");
  }
  for (int i = 0; i < cells; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < q.size(); ++mask) {
      if (mask & bit) q[mask] -= q[mask ^ bit];
    }
  }
  return q;
}

namespace {

// psi at every mixed word: cells in E take `word`, the rest take `other`.
void EvaluateAllMixtures(const WordSampler& sampler, const std::vector<int>& word,
                         const std::vector<int>& other, std::span<double> out) {
  const int n = static_cast<int>(word.size());
  auto visit = [&](auto&& self, int depth, const Element& state, std::size_t mask) -> void {
    if (depth == n) {
      out[mask] = sampler.Value(state);
      return;
    }
    self(self, depth + 1, sampler.Advance(state, sampler.increment(other[depth])), mask);
    self(self, depth + 1, sampler.Advance(state, sampler.increment(word[depth])),
         mask | (std::size_t{1} << depth));
  };
  visit(visit, 0, sampler.initial(), 0);
}

void FinishMeasure(IeResult& r, const std::vector<double>& p,
                   const std::vector<double>& std_error, int cells) {
  double negative = 0.0;
  double total = 0.0;
  for (std::size_t mask = 0; mask < p.size(); ++mask) {
    const double se = std_error.empty() ? 0.0 : std_error[mask];
    if (p[mask] < -std::max(3.0 * se, 1e-12)) r.negative_mass = true;
    if (p[mask] < 0.0) {
      negative -= p[mask];
    } else {
      total += p[mask];
    }
  }
  if (r.negative_mass) {
    r.diagnostics.push_back("NegativeMass: inclusion-exclusion produced mass below -3 std_error");
  }
  r.measure.resolution = cells;
  r.measure.pitch_log2 = PitchLog2Of(cells);
  r.measure.clipped_mass = negative;
  for (std::size_t mask = 0; mask < p.size(); ++mask) {
    if (p[mask] <= 0.0) continue;
    const double v = p[mask] / total;
    if (v < kDropFloor) {
      r.measure.dropped_mass += v;
      continue;
    }
    r.measure.atoms.push_back({ClosedSet::FromMask(cells, mask), v});
  }
  if (negative > 0.0) {
    r.diagnostics.push_back("clipped negative mass " + std::to_string(negative));
  }
}

}  // namespace

IeResult SpectralMeasureIe(const Functional& psi, const GridSpec& grid,
                           const Budget& budget) {
  const int cells = grid.cells;
  IeResult r;
  if (budget.mode != Mode::kMonteCarlo) {
    try {
      if (cells > 20) throw BudgetExceeded("2^cells subsets exceed 2^20");
      StateChain chain(psi, grid.increment, budget.exact_states);
      std::vector<double> q = PairChainAllSubsets(chain, cells, budget.exact_states);
      const double c = q.back();
      if (!(c > 0.0)) throw ZeroFunctional();
      for (double& v : q) v /= c;
      r.c_n = c;
      r.subset_probability = q;
      FinishMeasure(r, MobiusInvert(std::move(q), cells), {}, cells);
      return r;
    } catch (const BudgetExceeded& e) {
      if (budget.mode == Mode::kExact) throw;
      r.diagnostics.push_back(std::string("exact path unavailable: ") + e.what());
    }
  }
  if (cells > 12) throw BudgetExceeded("Monte Carlo inclusion-exclusion needs cells <= 12");
  RequireSamples(budget);

  const std::size_t len = std::size_t{1} << cells;
  const std::optional<double> exact_c = ExactSecondMoment(psi, grid, budget);
  WordSampler sampler(psi, grid);
  auto m = RunMonteCarlo(
      budget.mc_samples, 2 * len, budget.seed, budget.threads,
      [&](std::mt19937_64& rng, std::span<double> out) {
        std::vector<int> word(cells), other(cells);
        for (int k = 0; k < cells; ++k) word[k] = sampler.Draw(rng);
        for (int k = 0; k < cells; ++k) other[k] = sampler.Draw(rng);
        std::span<double> q = out.subspan(0, len);
        EvaluateAllMixtures(sampler, word, other, q);
        const double a = q[len - 1];
        for (double& v : q) v *= a;
        std::span<double> p = out.subspan(len, len);
        std::copy(q.begin(), q.end(), p.begin());
        for (int i = 0; i < cells; ++i) {
          const std::size_t bit = std::size_t{1} << i;
          for (std::size_t mask = 0; mask < len; ++mask) {
            if (mask & bit) p[mask] -= p[mask ^ bit];
          }
        }
      });
  const double c = exact_c ? *exact_c : m[len - 1].mean();
  if (!(c > 0.0)) throw ZeroFunctional();
  r.exact = false;
  r.samples = budget.mc_samples;
  r.c_n = c;
  r.subset_probability.resize(len);
  std::vector<double> p(len), se(len);
  for (std::size_t mask = 0; mask < len; ++mask) {
    r.subset_probability[mask] = m[mask].mean() / c;
    p[mask] = m[len + mask].mean() / c;
    se[mask] = m[len + mask].std_error() / c;
  }
  FinishMeasure(r, p, se, cells);
  return r;
}

SetStatistics EstimateSetStatistics(const Functional& psi, const GridSpec& grid,
                                    const std::vector<double>& t_grid,
                                    const std::vector<ClosedSet>& family,
                                    const Budget& budget) {
  RequireSamples(budget);
  const int n = grid.cells;
  std::vector<std::vector<int>> hit_cells;
  for (double t : t_grid) hit_cells.push_back(CellsAt(t, n));
  std::vector<std::vector<bool>> shared;
  for (const ClosedSet& e : family) shared.push_back(CellsInside(e, n));

  const std::size_t hits_at = 2;
  const std::size_t profile_at = hits_at + t_grid.size();
  const std::size_t dim = profile_at + family.size();
  const std::optional<double> exact_c = ExactSecondMoment(psi, grid, budget);
  WordSampler sampler(psi, grid);

  auto m = RunMonteCarlo(
      budget.mc_samples, dim, budget.seed, budget.threads,
      [&](std::mt19937_64& rng, std::span<double> out) {
        std::vector<int> word(n);
        for (int& g : word) g = sampler.Draw(rng);
        std::vector<Element> prefix(n + 1);
        prefix[0] = sampler.initial();
        for (int k = 0; k < n; ++k) {
          prefix[k + 1] = sampler.Advance(prefix[k], sampler.increment(word[k]));
        }
        std::vector<Element> suffix(n + 1);
        suffix[n] = sampler.unit();
        for (int k = n - 1; k >= 0; --k) {
          suffix[k] = sampler.ComposeOrThrow(sampler.increment(word[k]), suffix[k + 1]);
        }
        const double v = sampler.Value(prefix[n]);
        out[0] = v * v;

        // psi with the increments of cells first..last redrawn.
        auto redrawn = [&](int first, int last) {
          Element s = prefix[first];
          for (int k = first; k <= last; ++k) {
            s = sampler.Advance(s, sampler.increment(sampler.Draw(rng)));
          }
          return sampler.Value(sampler.Advance(s, suffix[last + 1]));
        };

        std::vector<double> single(n);
        double leb = 0.0;
        for (int c = 0; c < n; ++c) {
          const double d = v - redrawn(c, c);
          single[c] = 0.5 * d * d;
          leb += single[c];
        }
        out[1] = leb / n;
        for (std::size_t i = 0; i < hit_cells.size(); ++i) {
          const auto& cs = hit_cells[i];
          if (cs.size() == 1) {
            out[hits_at + i] = single[cs[0]];
          } else {
            const double d = v - redrawn(cs.front(), cs.back());
            out[hits_at + i] = 0.5 * d * d;
          }
        }
        for (std::size_t i = 0; i < family.size(); ++i) {
          int first = 0;
          while (first < n && shared[i][first]) ++first;
          Element s = prefix[first];
          for (int k = first; k < n; ++k) {
            const int g = shared[i][k] ? word[k] : sampler.Draw(rng);
            s = sampler.Advance(s, sampler.increment(g));
          }
          out[profile_at + i] = v * sampler.Value(s);
        }
      });

  SetStatistics st;
  st.t_grid = t_grid;
  const double c = exact_c ? *exact_c : m[0].mean();
  if (!(c > 0.0)) throw ZeroFunctional();
  st.c_n.value = c;
  if (!exact_c) {
    st.c_n.std_error = m[0].std_error();
    st.c_n.exact = false;
    st.c_n.samples = budget.mc_samples;
  }
  auto report = [&](const Moments& mo) {
    EstimatorReport r;
    r.value = mo.mean() / c;
    r.std_error = mo.std_error() / c;
    r.exact = false;
    r.samples = budget.mc_samples;
    return r;
  };
  st.expected_lebesgue = report(m[1]);
  for (std::size_t i = 0; i < t_grid.size(); ++i) st.point_hits.push_back(report(m[hits_at + i]));
  for (std::size_t i = 0; i < family.size(); ++i) st.profile.push_back(report(m[profile_at + i]));
  return st;
}

}  // namespace fwscale
