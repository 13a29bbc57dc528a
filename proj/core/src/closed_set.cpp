#include "fwscale/closed_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fwscale/errors.hpp"
#include "fwscale/transport.hpp"

namespace fwscale {

ClosedSet ClosedSet::Create(int resolution, std::vector<int> cells) {
  if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
  std::sort(cells.begin(), cells.end());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] < 0 || cells[i] >= resolution) {
      throw std::invalid_argument("cell index out of range");
    }
    if (i > 0 && cells[i] == cells[i - 1]) {
      throw std::invalid_argument("duplicate cell index");
    }
  }
  ClosedSet s;
  s.resolution_ = resolution;
  s.cells_ = std::move(cells);
  return s;
}

ClosedSet ClosedSet::FromMask(int resolution, std::uint64_t mask) {
  if (resolution > 64) throw std::invalid_argument("mask needs resolution <= 64");
  std::vector<int> cells;
  for (int i = 0; i < resolution; ++i) {
    if (mask >> i & 1) cells.push_back(i);
  }
  if (resolution < 64 && (mask >> resolution) != 0) {
    throw std::invalid_argument("mask has bits beyond the resolution");
  }
  return Create(resolution, std::move(cells));
}

ClosedSet ClosedSet::Full(int resolution) { return Range(resolution, 0, resolution); }

ClosedSet ClosedSet::Range(int resolution, int u, int v) {
  if (u < 0 || v > resolution || u > v) throw std::invalid_argument("bad cell range");
  std::vector<int> cells;
  for (int i = u; i < v; ++i) cells.push_back(i);
  return Create(resolution, std::move(cells));
}

std::uint64_t ClosedSet::Mask() const {
  if (resolution_ > 64) throw std::invalid_argument("mask needs resolution <= 64");
  std::uint64_t m = 0;
  for (int c : cells_) m |= std::uint64_t{1} << c;
  return m;
}

std::vector<std::pair<int, int>> ClosedSet::Runs() const {
  std::vector<std::pair<int, int>> runs;
  for (int c : cells_) {
    if (!runs.empty() && runs.back().second == c) {
      runs.back().second = c + 1;
    } else {
      runs.push_back({c, c + 1});
    }
  }
  return runs;
}

std::vector<Interval> ClosedSet::Intervals() const {
  std::vector<Interval> out;
  const double n = resolution_;
  for (auto [a, b] : Runs()) out.push_back({a / n, b / n});
  return out;
}

bool ClosedSet::Contains(double t) const {
  for (auto [a, b] : Runs()) {
    if (t * resolution_ >= a && t * resolution_ <= b) return true;
  }
  return false;
}

std::string ClosedSet::ToString() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < cells_.size(); ++i) os << (i ? "," : "") << cells_[i];
  os << "}/" << resolution_;
  return os.str();
}

bool IsSubset(const ClosedSet& s, const ClosedSet& e) {
  if (s.empty()) return true;
  const std::int64_t n = s.resolution();
  const std::int64_t m = e.resolution();
  const auto outer = e.Runs();
  for (auto [a, b] : s.Runs()) {
    bool inside = false;
    for (auto [c, d] : outer) {
      if (c * n <= a * m && b * m <= d * n) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

namespace {

double DistanceTo(double x, std::span<const Interval> b) {
  double best = std::numeric_limits<double>::infinity();
  for (const Interval& iv : b) {
    double d = 0.0;
    if (x < iv.lo) d = iv.lo - x;
    if (x > iv.hi) d = x - iv.hi;
    best = std::min(best, d);
  }
  return best;
}

// max over x in a of dist(x, b). The distance to b is piecewise linear, with
// local maxima only at gap midpoints of b, so those plus the endpoints of a
// are enough.
double Directed(std::span<const Interval> a, std::span<const Interval> b) {
  std::vector<Interval> sorted(b.begin(), b.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  std::vector<double> mids;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i + 1].lo > sorted[i].hi) {
      mids.push_back(0.5 * (sorted[i].hi + sorted[i + 1].lo));
    }
  }
  double result = 0.0;
  for (const Interval& iv : a) {
    result = std::max(result, DistanceTo(iv.lo, b));
    result = std::max(result, DistanceTo(iv.hi, b));
    for (double m : mids) {
      if (m > iv.lo && m < iv.hi) result = std::max(result, DistanceTo(m, b));
    }
  }
  return result;
}

}  // namespace

double HausdorffDistance(std::span<const Interval> a, std::span<const Interval> b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return 1.0;
  return std::max(Directed(a, b), Directed(b, a));
}

double HausdorffDistance(const ClosedSet& a, const ClosedSet& b) {
  const auto ia = a.Intervals();
  const auto ib = b.Intervals();
  return HausdorffDistance(std::span<const Interval>(ia), std::span<const Interval>(ib));
}

double SpectralMeasure::AtomMass() const {
  double m = 0.0;
  for (const SetAtom& a : atoms) m += a.p;
  return m;
}

double SpectralMeasure::ExpectedLebesgue() const {
  double m = 0.0;
  for (const SetAtom& a : atoms) m += a.p * a.set.Lebesgue();
  return m;
}

double SpectralMeasure::PointHit(double t) const {
  double m = 0.0;
  for (const SetAtom& a : atoms) {
    if (a.set.Contains(t)) m += a.p;
  }
  return m;
}

std::vector<double> SpectralMeasure::CountDistribution() const {
  std::vector<double> d(resolution + 1, 0.0);
  for (const SetAtom& a : atoms) d[a.set.count()] += a.p;
  return d;
}

int PitchLog2Of(int resolution) {
  if (resolution < 1 || (resolution & (resolution - 1)) != 0) return -1;
  int k = 0;
  while ((1 << k) < resolution) ++k;
  return k;
}

std::vector<ProfileRow> SubsetProbabilityProfile(const SpectralMeasure& nu,
                                                 const std::vector<ClosedSet>& family) {
  std::vector<ProfileRow> rows;
  rows.reserve(family.size());
  for (const ClosedSet& e : family) {
    double p = 0.0;
    for (const SetAtom& a : nu.atoms) {
      if (IsSubset(a.set, e)) p += a.p;
    }
    rows.push_back({e, p});
  }
  return rows;
}

SpectralMeasure ResampleSystematic(const SpectralMeasure& nu, std::size_t k) {
  SpectralMeasure out;
  out.resolution = nu.resolution;
  out.pitch_log2 = nu.pitch_log2;
  const double total = nu.AtomMass();
  if (k == 0 || nu.atoms.empty() || total <= 0.0) return out;
  double cumulative = 0.0;
  std::size_t draw = 0;
  for (const SetAtom& a : nu.atoms) {
    cumulative += a.p / total;
    std::size_t hits = 0;
    while (draw < k && (draw + 0.5) / static_cast<double>(k) < cumulative) {
      ++draw;
      ++hits;
    }
    if (hits > 0) out.atoms.push_back({a.set, static_cast<double>(hits) / k});
  }
  // Rounding can leave the last draws unassigned.
  if (draw < k && !out.atoms.empty()) {
    out.atoms.back().p += static_cast<double>(k - draw) / k;
  }
  return out;
}

RandomSetKrResult RandomSetKr(const SpectralMeasure& nu1, const SpectralMeasure& nu2,
                              std::size_t max_pairs, bool allow_resampling) {
  if (nu1.atoms.empty() || nu2.atoms.empty()) {
    throw std::invalid_argument("random-set law has no atoms");
  }
  const SpectralMeasure* a = &nu1;
  const SpectralMeasure* b = &nu2;
  SpectralMeasure ra, rb;
  RandomSetKrResult r;
  if (nu1.atoms.size() * nu2.atoms.size() > max_pairs) {
    if (!allow_resampling) {
      throw BudgetExceeded("random-set transport exceeds the pair budget");
    }
    const auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(max_pairs)));
    if (a->atoms.size() > k) {
      ra = ResampleSystematic(*a, k);
      a = &ra;
    }
    if (a->atoms.size() * b->atoms.size() > max_pairs) {
      rb = ResampleSystematic(*b, max_pairs / a->atoms.size());
      b = &rb;
    }
    r.resampled = true;
  }
  r.support1 = a->atoms.size();
  r.support2 = b->atoms.size();

  std::vector<std::vector<Interval>> ia, ib;
  for (const SetAtom& s : a->atoms) ia.push_back(s.set.Intervals());
  for (const SetAtom& s : b->atoms) ib.push_back(s.set.Intervals());
  std::vector<double> cost;
  cost.reserve(ia.size() * ib.size());
  for (const auto& x : ia) {
    for (const auto& y : ib) {
      cost.push_back(std::min(1.0, HausdorffDistance(std::span<const Interval>(x),
                                                     std::span<const Interval>(y))));
    }
  }
  std::vector<double> wa, wb;
  const double ta = a->AtomMass(), tb = b->AtomMass();
  for (const SetAtom& s : a->atoms) wa.push_back(s.p / ta);
  for (const SetAtom& s : b->atoms) wb.push_back(s.p / tb);
  r.value = std::clamp(SolveTransport(wa, wb, cost).cost, 0.0, 1.0);
  return r;
}

}  // namespace fwscale
