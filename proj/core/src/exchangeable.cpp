#include "fwscale/exchangeable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fwscale/errors.hpp"
#include "fwscale/walsh.hpp"

namespace fwscale {
namespace {

// Entries M_{j,w} with j <= min(w, N-w), stored per column w <= N/2. The
// three-term recurrence in j is only run inside that triangle, where it is
// stable; the other entries follow from M_{j,w} = M_{w,j},
// M_{j,N-w} = (-1)^j M_{j,w} and M_{N-j,w} = (-1)^w M_{j,w}.
class Krawtchouk {
 public:
  explicit Krawtchouk(int n) : n_(n), cols_(n / 2 + 1) {
    const long double lg_n = std::lgamma(static_cast<long double>(n) + 1);
    const long double half_ln2 = 0.5L * n * std::log(2.0L);
    for (int w = 0; w <= n / 2; ++w) {
      auto& col = cols_[w];
      col.resize(w + 1);
      const long double log_m0 =
          0.5L * (lg_n - std::lgamma(static_cast<long double>(w) + 1) -
                  std::lgamma(static_cast<long double>(n - w) + 1)) -
          half_ln2;
      long double prev = 0.0L;
      long double cur = std::exp(log_m0);
      col[0] = static_cast<double>(cur);
      for (int j = 0; j < w; ++j) {
        const long double next =
            ((n - 2.0L * w) * cur - std::sqrt(static_cast<long double>(j) * (n - j + 1)) * prev) /
            std::sqrt((j + 1.0L) * (n - j));
        prev = cur;
        cur = next;
        col[j + 1] = static_cast<double>(cur);
      }
    }
  }

  double operator()(int j, int w) const {
    double sign = 1.0;
    if (2 * w > n_) {
      if (j & 1) sign = -sign;
      w = n_ - w;
    }
    if (j <= w) return sign * cols_[w][j];
    if (j <= n_ - w) {
      // M_{j,w} = M_{w,j}; reflect the column j if it is past the middle.
      if (2 * j > n_) {
        if (w & 1) sign = -sign;
        return sign * cols_[n_ - j][w];
      }
      return sign * cols_[j][w];
    }
    if (w & 1) sign = -sign;
    return sign * cols_[w][n_ - j];
  }

 private:
  int n_;
  std::vector<std::vector<double>> cols_;
};

long double LogBinomial(int n, int k) {
  return std::lgamma(static_cast<long double>(n) + 1) -
         std::lgamma(static_cast<long double>(k) + 1) -
         std::lgamma(static_cast<long double>(n - k) + 1);
}

// C(m, j) / C(n, j).
double BinomialRatio(int m, int n, int j) {
  if (m < j) return 0.0;
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= static_cast<double>(m - i) / (n - i);
  return r;
}

// Subset of {0..n-1} of size k with colex rank `rank` (approximate for very
// large binomials, which is harmless for resampling).
std::vector<int> UnrankColex(long double rank, int n, int k) {
  std::vector<int> out(k);
  int upper = n;
  for (int i = k; i >= 1; --i) {
    int c = i - 1;
    int lo = i - 1, hi = upper - 1;
    while (lo < hi) {
      const int mid = lo + (hi - lo + 1) / 2;
      if (std::exp(LogBinomial(mid, i)) <= rank + 0.5L) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    c = lo;
    if (c >= i) rank -= std::exp(LogBinomial(c, i));
    if (rank < 0) rank = 0;
    out[i - 1] = c;
    upper = c;
  }
  return out;
}

}  // namespace

std::vector<double> KrawtchoukMatrix(int cells) {
  if (cells < 2 || cells % 2 != 0) throw std::invalid_argument("cells must be even");
  Krawtchouk k(cells);
  std::vector<double> m(static_cast<std::size_t>(cells + 1) * (cells + 1));
  for (int j = 0; j <= cells; ++j) {
    for (int w = 0; w <= cells; ++w) m[static_cast<std::size_t>(j) * (cells + 1) + w] = k(j, w);
  }
  return m;
}

bool ExchangeableLaw::Applicable(const AtomicMeasure& mu1, int cells) {
  if (mu1.kind() != UndergroupKind::kReal || mu1.size() != 2) return false;
  if (cells < 2 || cells % 2 != 0) return false;
  const auto& a = mu1.atoms();
  return std::fabs(a[0].weight - 0.5) <= 1e-12 && std::fabs(a[1].weight - 0.5) <= 1e-12;
}

ExchangeableLaw ExchangeableLaw::Compute(const Functional& psi,
                                         const AtomicMeasure& mu1, int cells) {
  if (mu1.kind() != UndergroupKind::kReal) {
    throw std::invalid_argument("exchangeable law needs the real-line undergroup");
  }
  if (cells < 2 || cells % 2 != 0) {
    throw std::invalid_argument("exchangeable law needs an even cell count");
  }
  const auto [f1, f2] = TwoAtomicSigns(mu1);
  const double lo = std::get<RealElement>(f1).x;
  const double hi = std::get<RealElement>(f2).x;
  const int n = cells;

  std::vector<double> phi(n + 1), sqrt_b(n + 1);
  const long double half_ln2 = 0.5L * n * std::log(2.0L);
  double c = 0.0;
  for (int w = 0; w <= n; ++w) {
    const double x = (n - w) * lo + w * hi;
    phi[w] = psi(RealElement{x});
    sqrt_b[w] = static_cast<double>(std::exp(0.5L * LogBinomial(n, w) - half_ln2));
    c += sqrt_b[w] * sqrt_b[w] * phi[w] * phi[w];
  }
  if (!(c > 0.0)) throw ZeroFunctional();

  Krawtchouk m(n);
  std::vector<double> v(n + 1);
  for (int w = 0; w <= n; ++w) v[w] = sqrt_b[w] * phi[w] / std::sqrt(c);

  ExchangeableLaw law;
  law.cells_ = n;
  law.c_n_ = c;
  law.size_p_.resize(n + 1);
  double total = 0.0;
  for (int j = 0; j <= n; ++j) {
    double r = 0.0;
    for (int w = 0; w <= n; ++w) r += m(j, w) * v[w];
    law.size_p_[j] = r * r;
    total += r * r;
  }
  // Orthonormality makes the total 1 up to rounding.
  for (double& p : law.size_p_) p /= total;
  return law;
}

double ExchangeableLaw::ExpectedLebesgue() const {
  double e = 0.0;
  for (int j = 0; j <= cells_; ++j) e += j * size_p_[j];
  return e / cells_;
}

double ExchangeableLaw::HitProbability(int k) const {
  double miss = 0.0;
  for (int j = 0; j <= cells_; ++j) miss += size_p_[j] * BinomialRatio(cells_ - k, cells_, j);
  return 1.0 - miss;
}

double ExchangeableLaw::PointHit(double t) const {
  const double scaled = t * cells_;
  const double cell = std::floor(scaled);
  if (scaled == cell && t > 0.0 && t < 1.0) return HitProbability(2);
  return HitProbability(1);
}

double ExchangeableLaw::SubsetProbability(const ClosedSet& e) const {
  int inside = 0;
  for (int i = 0; i < cells_; ++i) {
    if (IsSubset(ClosedSet::Create(cells_, {i}), e)) ++inside;
  }
  double p = 0.0;
  for (int j = 0; j <= cells_; ++j) p += size_p_[j] * BinomialRatio(inside, cells_, j);
  return p;
}

SpectralMeasure ExchangeableLaw::Atoms(std::size_t atom_cap, double floor) const {
  SpectralMeasure nu;
  nu.resolution = cells_;
  nu.pitch_log2 = PitchLog2Of(cells_);
  for (int j = 0; j <= cells_; ++j) {
    const double p = size_p_[j];
    if (p <= floor) {
      nu.dropped_mass += p;
      continue;
    }
    const long double count = std::exp(LogBinomial(cells_, j));
    if (count > static_cast<long double>(atom_cap) + 0.5L) {
      nu.dropped_mass += p;
      continue;
    }
    const double each = p / std::round(static_cast<double>(count));
    // Lexicographic enumeration of j-subsets.
    std::vector<int> pick(j);
    for (int i = 0; i < j; ++i) pick[i] = i;
    while (true) {
      nu.atoms.push_back({ClosedSet::Create(cells_, pick), each});
      int i = j - 1;
      while (i >= 0 && pick[i] == cells_ - j + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int k = i + 1; k < j; ++k) pick[k] = pick[k - 1] + 1;
    }
  }
  return nu;
}

SpectralMeasure ExchangeableLaw::Resample(std::size_t k) const {
  SpectralMeasure nu;
  nu.resolution = cells_;
  nu.pitch_log2 = PitchLog2Of(cells_);
  std::vector<SetAtom> draws;
  double before = 0.0;
  int j = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double u = (i + 0.5) / static_cast<double>(k);
    while (j < cells_ && before + size_p_[j] <= u) before += size_p_[j++];
    const double frac = size_p_[j] > 0.0 ? std::clamp((u - before) / size_p_[j], 0.0, 1.0) : 0.0;
    const long double count = std::exp(LogBinomial(cells_, j));
    const long double rank = std::min<long double>(std::floor(frac * count), count - 1);
    draws.push_back({ClosedSet::Create(cells_, UnrankColex(rank, cells_, j)), 1.0 / k});
  }
  std::sort(draws.begin(), draws.end(),
            [](const SetAtom& a, const SetAtom& b) { return a.set < b.set; });
  for (SetAtom& d : draws) {
    if (!nu.atoms.empty() && nu.atoms.back().set == d.set) {
      nu.atoms.back().p += d.p;
    } else {
      nu.atoms.push_back(std::move(d));
    }
  }
  return nu;
}

}  // namespace fwscale
