#include "fwscale/undergroup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fwscale/errors.hpp"

namespace fwscale {

std::string ToString(UndergroupKind kind) {
  return kind == UndergroupKind::kReal ? "real" : "stepmap";
}

UndergroupKind ParseUndergroupKind(const std::string& name) {
  if (name == "real") return UndergroupKind::kReal;
  if (name == "stepmap") return UndergroupKind::kStepMap;
  throw std::invalid_argument("unknown undergroup: " + name);
}

StepMap StepMap::Create(std::vector<Dyadic> jumps, std::vector<Dyadic> values) {
  if (values.size() != jumps.size() + 1) {
    throw std::invalid_argument("step map needs |B| = |A| + 1");
  }
  const Dyadic zero = Dyadic::FromInt(0);
  const Dyadic one = Dyadic::FromInt(1);
  auto inside = [&](const Dyadic& p) { return zero < p && p < one; };
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    if (!inside(jumps[i])) throw std::invalid_argument("jump outside (0,1)");
    if (i > 0 && !(jumps[i - 1] < jumps[i])) {
      throw std::invalid_argument("jumps must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!inside(values[i])) throw std::invalid_argument("value outside (0,1)");
    if (i > 0 && values[i] < values[i - 1]) {
      throw std::invalid_argument("values must be non-decreasing");
    }
  }

  StepMap f;
  f.unit_ = false;
  f.values_.push_back(values[0]);
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    // Removable jump: b_k == b_{k+1}.
    if (values[k + 1] == f.values_.back()) continue;
    f.jumps_.push_back(jumps[k]);
    f.values_.push_back(values[k + 1]);
  }
  return f;
}

std::optional<double> StepMap::Evaluate(double x) const {
  if (unit_) return x;
  std::size_t k = 0;
  for (const Dyadic& a : jumps_) {
    const double ad = a.ToDouble();
    if (x == ad) return std::nullopt;
    if (x > ad) ++k;
  }
  return values_[k].ToDouble();
}

std::strong_ordering operator<=>(const StepMap& a, const StepMap& b) {
  if (a.unit_ != b.unit_) {
    return a.unit_ ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (auto c = a.jumps_ <=> b.jumps_; c != 0) return c;
  return a.values_ <=> b.values_;
}

bool operator==(const StepMap& a, const StepMap& b) {
  return a.unit_ == b.unit_ && a.jumps_ == b.jumps_ && a.values_ == b.values_;
}

UndergroupKind KindOf(const Element& e) {
  return std::holds_alternative<RealElement>(e) ? UndergroupKind::kReal
                                                : UndergroupKind::kStepMap;
}

Element UnitOf(UndergroupKind kind) {
  if (kind == UndergroupKind::kReal) return RealElement{0.0};
  return StepMap::Unit();
}

bool IsUnit(const Element& e) {
  if (const auto* r = std::get_if<RealElement>(&e)) return r->x == 0.0;
  return std::get<StepMap>(e).is_unit();
}

namespace {

std::optional<StepMap> ComposeStep(const StepMap& f, const StepMap& g) {
  if (f.is_unit()) return g;
  if (g.is_unit()) return f;
  const auto& b = f.values();
  const auto& c = g.jumps();
  const auto& d = g.values();

  // j = #{c < b_k}; B is sorted so j only moves forward.
  std::vector<std::size_t> slot(b.size());
  std::size_t j = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    while (j < c.size() && c[j] < b[k]) ++j;
    if (j < c.size() && c[j] == b[k]) return std::nullopt;
    slot[k] = j;
  }

  std::vector<Dyadic> jumps;
  std::vector<Dyadic> values{d[slot[0]]};
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    if (slot[k + 1] != slot[k]) {
      jumps.push_back(f.jumps()[k]);
      values.push_back(d[slot[k + 1]]);
    }
  }
  return StepMap::Create(std::move(jumps), std::move(values));
}

}  // namespace

std::optional<Element> Compose(const Element& f, const Element& g) {
  if (f.index() != g.index()) throw MixedUndergroup();
  if (const auto* x = std::get_if<RealElement>(&f)) {
    return RealElement{x->x + std::get<RealElement>(g).x};
  }
  auto h = ComposeStep(std::get<StepMap>(f), std::get<StepMap>(g));
  if (!h) return std::nullopt;
  return Element(std::move(*h));
}

std::vector<Segment> StepMapGraph(const StepMap& f) {
  if (f.is_unit()) return {{0.0, 0.0, 1.0, 1.0}};
  std::vector<Segment> out;
  const auto& a = f.jumps();
  const auto& b = f.values();
  double x = 0.0;
  double y = b[0].ToDouble();
  out.push_back({0.0, 0.0, 0.0, y});
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ak = a[k].ToDouble();
    const double next = b[k + 1].ToDouble();
    out.push_back({x, y, ak, y});
    out.push_back({ak, std::min(y, next), ak, std::max(y, next)});
    x = ak;
    y = next;
  }
  out.push_back({x, y, 1.0, y});
  out.push_back({1.0, y, 1.0, 1.0});
  return out;
}

namespace {

double Dist(double u, double lo, double hi) {
  if (u < lo) return lo - u;
  if (u > hi) return u - hi;
  return 0.0;
}

enum class Orientation { kHorizontal, kVertical, kDiagonal };

Orientation OrientationOf(const Segment& s) {
  if (s.x0 != s.x1 && s.y0 != s.y1) return Orientation::kDiagonal;
  if (s.y0 == s.y1 && s.x0 != s.x1) return Orientation::kHorizontal;
  return Orientation::kVertical;  // includes degenerate points
}

// d(p(u), t) = offset + sum of dist(u, [lo_i, hi_i]) over at most two terms.
struct DistFn {
  double offset = 0.0;
  int terms = 0;
  std::array<double, 2> lo{}, hi{};

  void Add(double l, double h) {
    lo[terms] = std::min(l, h);
    hi[terms] = std::max(l, h);
    ++terms;
  }
  double operator()(double u) const {
    double v = offset;
    for (int i = 0; i < terms; ++i) v += Dist(u, lo[i], hi[i]);
    return v;
  }
};

// Distance from a point moving along `s` to the fixed segment `t`, as a
// function of the moving coordinate.
DistFn MakeDistFn(const Segment& s, Orientation so, const Segment& t) {
  DistFn fn;
  const Orientation to = OrientationOf(t);
  const double tx0 = std::min(t.x0, t.x1), tx1 = std::max(t.x0, t.x1);
  const double ty0 = std::min(t.y0, t.y1), ty1 = std::max(t.y0, t.y1);
  switch (so) {
    case Orientation::kHorizontal:
      if (to == Orientation::kDiagonal) {
        fn.Add(s.y0, s.y0);
      } else {
        fn.offset = Dist(s.y0, ty0, ty1);
        fn.Add(tx0, tx1);
      }
      break;
    case Orientation::kVertical:
      if (to == Orientation::kDiagonal) {
        fn.Add(s.x0, s.x0);
      } else {
        fn.offset = Dist(s.x0, tx0, tx1);
        fn.Add(ty0, ty1);
      }
      break;
    case Orientation::kDiagonal:
      if (to != Orientation::kDiagonal) {
        fn.Add(tx0, tx1);
        fn.Add(ty0, ty1);
      }
      break;
  }
  return fn;
}

// max over p in s of min over t in targets of d_l1(p, t).
double DirectedFromSegment(const Segment& s, const std::vector<Segment>& targets) {
  const Orientation so = OrientationOf(s);
  double u0, u1;
  if (so == Orientation::kVertical) {
    u0 = std::min(s.y0, s.y1);
    u1 = std::max(s.y0, s.y1);
  } else {
    u0 = std::min(s.x0, s.x1);
    u1 = std::max(s.x0, s.x1);
  }

  std::vector<DistFn> fns;
  fns.reserve(targets.size());
  std::vector<double> breaks{u0, u1};
  for (const Segment& t : targets) {
    fns.push_back(MakeDistFn(s, so, t));
    const DistFn& fn = fns.back();
    for (int i = 0; i < fn.terms; ++i) {
      for (double p : {fn.lo[i], fn.hi[i]}) {
        if (p > u0 && p < u1) breaks.push_back(p);
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto envelope = [&](double u) {
    double best = std::numeric_limits<double>::infinity();
    for (const DistFn& fn : fns) best = std::min(best, fn(u));
    return best;
  };

  double result = 0.0;
  for (double u : breaks) result = std::max(result, envelope(u));

  // Between consecutive breakpoints every function is linear with an integer
  // slope in [-2, 2]; keep the lowest line per slope and test the crossings.
  constexpr int kSlopes = 5;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const double mid = 0.5 * (a + b);
    std::array<double, kSlopes> at_a;
    at_a.fill(std::numeric_limits<double>::infinity());
    for (const DistFn& fn : fns) {
      int slope = 0;
      for (int k = 0; k < fn.terms; ++k) {
        if (mid < fn.lo[k]) --slope;
        if (mid > fn.hi[k]) ++slope;
      }
      at_a[slope + 2] = std::min(at_a[slope + 2], fn(a));
    }
    for (int p = 0; p < kSlopes; ++p) {
      if (!std::isfinite(at_a[p])) continue;
      for (int q = p + 1; q < kSlopes; ++q) {
        if (!std::isfinite(at_a[q])) continue;
        // at_a[p] + (p-2)(u-a) == at_a[q] + (q-2)(u-a)
        const double u = a + (at_a[p] - at_a[q]) / static_cast<double>(q - p);
        if (u > a && u < b) result = std::max(result, envelope(u));
      }
    }
  }
  return result;
}

double Directed(const std::vector<Segment>& from, const std::vector<Segment>& to) {
  double result = 0.0;
  for (const Segment& s : from) result = std::max(result, DirectedFromSegment(s, to));
  return result;
}

}  // namespace

double HausdorffL1(const std::vector<Segment>& a, const std::vector<Segment>& b) {
  return std::max(Directed(a, b), Directed(b, a));
}

double Metric(const Element& f, const Element& g) {
  if (f.index() != g.index()) throw MixedUndergroup();
  if (const auto* x = std::get_if<RealElement>(&f)) {
    return std::min(1.0, std::fabs(x->x - std::get<RealElement>(g).x));
  }
  const auto& sf = std::get<StepMap>(f);
  const auto& sg = std::get<StepMap>(g);
  if (sf == sg) return 0.0;
  return std::min(1.0, HausdorffL1(StepMapGraph(sf), StepMapGraph(sg)));
}

bool ElementLess(const Element& a, const Element& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (const auto* x = std::get_if<RealElement>(&a)) {
    return x->x < std::get<RealElement>(b).x;
  }
  return std::get<StepMap>(a) < std::get<StepMap>(b);
}

bool ApproxEqual(const Element& a, const Element& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<RealElement>(&a)) {
    const double y = std::get<RealElement>(b).x;
    return std::fabs(x->x - y) <=
           kRealMergeTolerance * std::max(1.0, std::max(std::fabs(x->x), std::fabs(y)));
  }
  return std::get<StepMap>(a) == std::get<StepMap>(b);
}

std::string DebugString(const Element& e) {
  std::ostringstream os;
  if (const auto* x = std::get_if<RealElement>(&e)) {
    os << x->x;
    return os.str();
  }
  const auto& f = std::get<StepMap>(e);
  if (f.is_unit()) return "e";
  os << "({";
  for (std::size_t i = 0; i < f.jumps().size(); ++i) {
    os << (i ? "," : "") << f.jumps()[i].ToDouble();
  }
  os << "},{";
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    os << (i ? "," : "") << f.values()[i].ToDouble();
  }
  os << "})";
  return os.str();
}

}  // namespace fwscale
