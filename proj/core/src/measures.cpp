#include "fwscale/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "fwscale/errors.hpp"
#include "fwscale/lp.hpp"
#include "fwscale/transport.hpp"

namespace fwscale {

std::vector<Atom> MergeAtoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
    return ElementLess(a.element, b.element);
  });
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (Atom& a : atoms) {
    if (!out.empty() && ApproxEqual(out.back().element, a.element)) {
      out.back().weight += a.weight;
    } else {
      out.push_back(std::move(a));
    }
  }
  return out;
}

AtomicMeasure AtomicMeasure::Create(UndergroupKind kind, std::vector<Atom> atoms,
                                    bool renormalize) {
  if (atoms.empty()) throw std::invalid_argument("measure has no atoms");
  for (const Atom& a : atoms) {
    if (KindOf(a.element) != kind) throw MixedUndergroup();
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw std::invalid_argument("atom weights must be positive and finite");
    }
    if (const auto* r = std::get_if<RealElement>(&a.element);
        r && !std::isfinite(r->x)) {
      throw std::invalid_argument("real atom must be finite");
    }
  }
  atoms = MergeAtoms(std::move(atoms));
  double total = 0.0;
  for (const Atom& a : atoms) total += a.weight;
  if (renormalize) {
    for (Atom& a : atoms) a.weight /= total;
  } else if (std::fabs(total - 1.0) > 1e-12 + 4e-16 * atoms.size()) {
    throw std::invalid_argument("atom weights must sum to 1");
  }
  return AtomicMeasure(kind, std::move(atoms));
}

AtomicMeasure AtomicMeasure::Dirac(Element e) {
  const UndergroupKind kind = KindOf(e);
  return AtomicMeasure(kind, {Atom{std::move(e), 1.0}});
}

double AtomicMeasure::MassAt(const Element& e) const {
  double m = 0.0;
  for (const Atom& a : atoms_) {
    if (ApproxEqual(a.element, e)) m += a.weight;
  }
  return m;
}

std::optional<AtomicMeasure> Convolve(const AtomicMeasure& mu,
                                      const AtomicMeasure& nu) {
  if (mu.kind() != nu.kind()) throw MixedUndergroup();
  std::vector<Atom> out;
  out.reserve(mu.size() * nu.size());
  for (const Atom& a : mu.atoms()) {
    for (const Atom& b : nu.atoms()) {
      auto fg = Compose(a.element, b.element);
      if (!fg) return std::nullopt;
      out.push_back({std::move(*fg), a.weight * b.weight});
    }
  }
  return AtomicMeasure::Create(mu.kind(), std::move(out), /*renormalize=*/true);
}

std::optional<AtomicMeasure> ConvolutionPower(const AtomicMeasure& mu, int k,
                                              double w_min, double* pruned_mass,
                                              std::size_t max_atoms) {
  if (k < 1) throw std::invalid_argument("convolution power needs k >= 1");
  AtomicMeasure acc = mu;
  double pruned = 0.0;
  for (int i = 1; i < k; ++i) {
    auto next = Convolve(acc, mu);
    if (!next) return std::nullopt;
    acc = std::move(*next);
    if (max_atoms > 0 && acc.size() > max_atoms) {
      throw BudgetExceeded("convolution power exceeds " + std::to_string(max_atoms) +
                           " atoms after " + std::to_string(i + 1) + " factors");
    }
    if (w_min > 0.0) {
      std::vector<Atom> kept;
      double dropped = 0.0;
      for (const Atom& a : acc.atoms()) {
        if (a.weight < w_min) {
          dropped += a.weight;
        } else {
          kept.push_back(a);
        }
      }
      if (dropped > 0.0 && !kept.empty()) {
        pruned += dropped * (1.0 - pruned);
        acc = AtomicMeasure::Create(acc.kind(), std::move(kept), true);
      }
    }
  }
  if (pruned_mass) *pruned_mass += pruned;
  return acc;
}

namespace {

std::vector<double> CostMatrix(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  std::vector<double> cost;
  cost.reserve(mu.size() * nu.size());
  for (const Atom& a : mu.atoms()) {
    for (const Atom& b : nu.atoms()) cost.push_back(Metric(a.element, b.element));
  }
  return cost;
}

std::vector<double> Weights(const AtomicMeasure& mu) {
  std::vector<double> w;
  w.reserve(mu.size());
  for (const Atom& a : mu.atoms()) w.push_back(a.weight);
  return w;
}

}  // namespace

double KrDistance(const AtomicMeasure& mu, const AtomicMeasure& nu,
                  std::size_t max_pairs) {
  if (mu.kind() != nu.kind()) throw MixedUndergroup();
  if (mu.size() * nu.size() > max_pairs) {
    throw BudgetExceeded("transport problem with " + std::to_string(mu.size()) +
                         " x " + std::to_string(nu.size()) +
                         " atoms exceeds the pair budget");
  }
  const auto cost = CostMatrix(mu, nu);
  const auto a = Weights(mu);
  const auto b = Weights(nu);
  const double value = SolveTransport(a, b, cost).cost;
  return std::clamp(value, 0.0, 1.0);
}

DualCheckResult KrDualCheck(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (mu.kind() != nu.kind()) throw MixedUndergroup();
  std::vector<Atom> joint;
  for (const Atom& a : mu.atoms()) joint.push_back({a.element, 1.0});
  for (const Atom& a : nu.atoms()) joint.push_back({a.element, 1.0});
  joint = MergeAtoms(std::move(joint));
  const std::size_t k = joint.size();
  if (k > 12) throw BudgetExceeded("dual check supports at most 12 points");

  std::vector<double> c(k);
  for (std::size_t i = 0; i < k; ++i) {
    c[i] = mu.MassAt(joint[i].element) - nu.MassAt(joint[i].element);
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      std::vector<double> row(k, 0.0);
      row[i] = 1.0;
      row[j] = -1.0;
      rows.push_back(std::move(row));
      rhs.push_back(Metric(joint[i].element, joint[j].element));
    }
    std::vector<double> cap(k, 0.0);
    cap[i] = 1.0;
    rows.push_back(std::move(cap));
    rhs.push_back(1.0);
  }
  DualCheckResult r;
  r.primal = KrDistance(mu, nu);
  r.dual = MaximizeLp(rows, rhs, c).value_or(0.0);
  r.gap = std::fabs(r.primal - r.dual);
  return r;
}

SemigroupHandle SemigroupHandle::Discrete(AtomicMeasure base, int pitch_log2) {
  if (pitch_log2 < 0 || pitch_log2 > Dyadic::kMaxLog2Den) {
    throw std::invalid_argument("pitch exponent out of range");
  }
  if (!Convolve(base, base)) {
    throw UndefinedComposition("base measure does not convolve with itself");
  }
  SemigroupHandle h;
  h.kind_ = base.kind();
  h.base_ = std::move(base);
  h.pitch_log2_ = pitch_log2;
  return h;
}

SemigroupHandle SemigroupHandle::Continuous(UndergroupKind kind, Sampler sampler,
                                            int m) {
  if (!sampler) throw std::invalid_argument("continuous handle needs a sampler");
  if (m < 1) throw std::invalid_argument("discretization size must be >= 1");
  SemigroupHandle h;
  h.kind_ = kind;
  h.sampler_ = std::move(sampler);
  h.m_ = m;
  return h;
}

SemigroupHandle SemigroupHandle::Brownian(int m) {
  return Continuous(UndergroupKind::kReal, BrownianQuantiles, m);
}

AtomicMeasure SemigroupHandle::MuT(const Dyadic& t, std::size_t max_atoms) const {
  if (t < Dyadic::FromInt(0)) throw std::invalid_argument("t must be >= 0");
  if (t == Dyadic::FromInt(0)) return AtomicMeasure::Dirac(UnitOf(kind_));
  if (sampler_) return sampler_(t.ToDouble(), m_);

  if (t.log2den() > pitch_log2_) {
    throw PitchMismatch("t = " + t.ToString() + " is not a multiple of 2^-" +
                        std::to_string(pitch_log2_));
  }
  const std::int64_t k = t.num() << (pitch_log2_ - t.log2den());
  if (k > (1 << 24)) throw BudgetExceeded("too many convolution factors");
  auto power = ConvolutionPower(*base_, static_cast<int>(k), 0.0, nullptr, max_atoms);
  if (!power) throw UndefinedComposition("convolution power");
  return std::move(*power);
}

AtomicMeasure MuT(const SemigroupHandle& handle, const Dyadic& t) {
  return handle.MuT(t);
}

AtomicMeasure BrownianQuantiles(double t, int m) {
  if (t == 0.0) return AtomicMeasure::Dirac(RealElement{0.0});
  const boost::math::normal_distribution<double> normal(0.0, std::sqrt(t));
  std::vector<Atom> atoms;
  atoms.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double p = (2.0 * i + 1.0) / (2.0 * m);
    atoms.push_back({RealElement{boost::math::quantile(normal, p)}, 1.0 / m});
  }
  return AtomicMeasure::Create(UndergroupKind::kReal, std::move(atoms), true);
}

Condition41Table CheckCondition41(
    const std::function<SemigroupHandle(int)>& level,
    const SemigroupHandle* limit, const Dyadic& t, const std::vector<int>& n_range,
    std::size_t max_pairs) {
  Condition41Table table;
  std::optional<AtomicMeasure> reference;
  if (limit) reference = limit->MuT(t);

  std::optional<AtomicMeasure> previous;
  int previous_n = 0;
  for (int n : n_range) {
    const AtomicMeasure* other = limit ? &*reference : (previous ? &*previous : nullptr);
    const std::size_t cap = other ? max_pairs / other->size() : max_pairs;
    std::optional<AtomicMeasure> current;
    try {
      current = level(n).MuT(t, cap);
    } catch (const BudgetExceeded&) {
      if (table.rows.empty()) throw;
      table.truncated_at = n;
      break;
    }
    if (limit) {
      table.rows.push_back({n, t.ToDouble(), KrDistance(*current, *reference, max_pairs),
                            limit->is_discrete() ? 0 : limit->discretization(), false});
    } else if (previous) {
      table.rows.push_back({previous_n, t.ToDouble(),
                            KrDistance(*previous, *current, max_pairs), 0, true});
    }
    previous = std::move(current);
    previous_n = n;
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i].kr > table.rows[i - 1].kr + kCondition41Slack) {
      table.monotone = false;
    }
  }
  return table;
}

Condition41Table CheckCondition41(const SemigroupHandle& disc,
                                  const SemigroupHandle& cont, const Dyadic& t,
                                  const std::vector<int>& n_range,
                                  std::size_t max_pairs) {
  return CheckCondition41([&](int) { return disc; }, &cont, t, n_range, max_pairs);
}

}  // namespace fwscale
