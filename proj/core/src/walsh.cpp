#include "fwscale/walsh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fwscale/errors.hpp"

namespace fwscale {
namespace {

void CheckCap(int n, int cap) {
  if (n < 0) throw std::invalid_argument("negative number of signs");
  if (n > cap) {
    throw CapExceeded("n = " + std::to_string(n) + " exceeds the Walsh cap " +
                      std::to_string(cap));
  }
}

}  // namespace

SignFunction SignFunction::Create(int n, std::vector<double> values) {
  if (n < 0 || n > 62) throw std::invalid_argument("bad number of signs");
  if (values.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("table length must be 2^n");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("table entries must be finite");
  }
  return SignFunction{n, std::move(values)};
}

SignFunction SignFunction::FromTable(std::vector<double> values) {
  const std::size_t len = values.size();
  if (len == 0 || (len & (len - 1)) != 0) {
    throw std::invalid_argument("table length must be a power of two");
  }
  int n = 0;
  while ((std::size_t{1} << n) < len) ++n;
  return Create(n, std::move(values));
}

void FastWalshHadamard(std::span<double> x) {
  const std::size_t len = x.size();
  for (std::size_t h = 1; h < len; h <<= 1) {
    for (std::size_t i = 0; i < len; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = x[j];
        const double b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
      }
    }
  }
}

// With bit k-1 set meaning tau_k = +1, sum_tau phi(tau) tau_S picks up a
// minus sign for every coordinate in S whose bit is clear. The butterfly
// gives sum_b phi(b) (-1)^{|b & S|}, so flip by (-1)^{|S|}.
WalshSpectrum WalshTransform(const SignFunction& phi, int cap) {
  CheckCap(phi.n, cap);
  WalshSpectrum out{phi.n, phi.values};
  FastWalshHadamard(out.coefficients);
  const double scale = std::ldexp(1.0, -phi.n);
  for (std::size_t s = 0; s < out.coefficients.size(); ++s) {
    const double sign = (__builtin_popcountll(s) & 1) ? -1.0 : 1.0;
    out.coefficients[s] *= sign * scale;
  }
  return out;
}

SignFunction InverseWalsh(const WalshSpectrum& spectrum) {
  SignFunction out{spectrum.n, spectrum.coefficients};
  for (std::size_t s = 0; s < out.values.size(); ++s) {
    if (__builtin_popcountll(s) & 1) out.values[s] = -out.values[s];
  }
  FastWalshHadamard(out.values);
  return out;
}

double MeanSquare(const SignFunction& phi) {
  double sum = 0.0;
  for (double v : phi.values) sum += v * v;
  return std::ldexp(sum, -phi.n);
}

double ParsevalResidual(const SignFunction& phi, const WalshSpectrum& spectrum) {
  double sum = 0.0;
  for (double c : spectrum.coefficients) sum += c * c;
  return sum - MeanSquare(phi);
}

std::pair<Element, Element> TwoAtomicSigns(const AtomicMeasure& mu1) {
  if (mu1.size() != 2) {
    throw NotTwoAtomic("measure has " + std::to_string(mu1.size()) + " atoms");
  }
  const auto& atoms = mu1.atoms();
  if (std::fabs(atoms[0].weight - 0.5) > 1e-12 || std::fabs(atoms[1].weight - 0.5) > 1e-12) {
    throw NotTwoAtomic("atoms are not equiprobable");
  }
  return {atoms[0].element, atoms[1].element};
}

SignFunction FunctionalTable(const Functional& psi, const AtomicMeasure& mu1, int n,
                             int cap) {
  CheckCap(n, cap);
  const auto signs = TwoAtomicSigns(mu1);
  const Element& f1 = signs.first;
  const Element& f2 = signs.second;
  const std::size_t len = std::size_t{1} << n;
  std::vector<double> values(len);
  // Depth first over words so that shared prefixes are composed once.
  auto visit = [&](auto&& self, int k, const Element& prefix, std::size_t b) -> void {
    if (k == n) {
      values[b] = psi(prefix);
      return;
    }
    for (int bit = 0; bit < 2; ++bit) {
      auto next = Compose(prefix, bit ? f2 : f1);
      const std::size_t word = b | (static_cast<std::size_t>(bit) << k);
      if (!next) {
        throw UndefinedComposition("word " + std::to_string(word) + " at factor " +
                                   std::to_string(k + 1));
      }
      self(self, k + 1, *next, word);
    }
  };
  visit(visit, 0, UnitOf(mu1.kind()), 0);
  return SignFunction{n, std::move(values)};
}

SpectralMeasure SpectralMeasureFromTable(const SignFunction& phi, int cap) {
  CheckCap(phi.n, cap);
  const double c = MeanSquare(phi);
  if (!(c > 0.0)) throw ZeroFunctional();
  WalshSpectrum spectrum = WalshTransform(phi, cap);
  const int cells = phi.n == 0 ? 1 : phi.n;
  SpectralMeasure nu;
  nu.resolution = cells;
  nu.pitch_log2 = PitchLog2Of(cells);
  for (std::size_t s = 0; s < spectrum.coefficients.size(); ++s) {
    const double p = spectrum.coefficients[s] * spectrum.coefficients[s] / c;
    if (p > 0.0) nu.atoms.push_back({ClosedSet::FromMask(cells, s), p});
  }
  return nu;
}

SpectralMeasure SpectralMeasureExact(const Functional& psi, const AtomicMeasure& mu1,
                                     int n, int cap) {
  return SpectralMeasureFromTable(FunctionalTable(psi, mu1, n, cap), cap);
}

double SpectralMassWithin(const WalshSpectrum& spectrum, std::uint64_t mask) {
  double sum = 0.0;
  for (std::size_t s = 0; s < spectrum.coefficients.size(); ++s) {
    if ((s & ~mask) == 0) sum += spectrum.coefficients[s] * spectrum.coefficients[s];
  }
  return sum;
}

double ConditionalMeanSquare(const SignFunction& phi, std::uint64_t mask) {
  const std::size_t len = phi.values.size();
  mask &= len - 1;
  // Average over the free coordinates by grouping entries on b & mask.
  std::vector<double> sums(len, 0.0);
  for (std::size_t b = 0; b < len; ++b) sums[b & mask] += phi.values[b];
  const int free = phi.n - __builtin_popcountll(mask);
  const double group = std::ldexp(1.0, free);
  double total = 0.0;
  for (std::size_t b = 0; b < len; ++b) {
    if ((b & ~mask) != 0) continue;
    const double mean = sums[b] / group;
    total += mean * mean;
  }
  return std::ldexp(total, -(phi.n - free));
}

double IntervalSecondMoment(const SignFunction& phi, int u, int v) {
  if (u < 0 || v > phi.n || u > v) throw std::invalid_argument("bad interval");
  std::uint64_t mask = 0;
  for (int k = u; k < v; ++k) mask |= std::uint64_t{1} << k;
  return ConditionalMeanSquare(phi, mask);
}

}  // namespace fwscale
