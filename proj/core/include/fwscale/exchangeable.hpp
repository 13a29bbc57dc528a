#pragma once

#include <cstddef>
#include <vector>

#include "fwscale/closed_set.hpp"
#include "fwscale/functional.hpp"
#include "fwscale/measures.hpp"

namespace fwscale {

// Exact spectral law when psi(X_{0,N}) depends on the signs only through
// their sum: two-atomic increments on the (commutative) real line. The law
// is uniform over cell sets of a given size, so it is described by
// P(|S| = j), j = 0..N, obtained from the orthonormal Krawtchouk basis.
class ExchangeableLaw {
 public:
  // Throws NotTwoAtomic, ZeroFunctional, or std::invalid_argument for a
  // step-map measure or an odd cell count.
  static ExchangeableLaw Compute(const Functional& psi, const AtomicMeasure& mu1,
                                 int cells);

  // Applicable when Compute would succeed on the measure and cell count.
  static bool Applicable(const AtomicMeasure& mu1, int cells);

  int cells() const { return cells_; }
  // Mean square of psi under the product measure.
  double c_n() const { return c_n_; }
  const std::vector<double>& size_probability() const { return size_p_; }

  double ExpectedLebesgue() const;
  // Pr{S meets a given set of k cells}.
  double HitProbability(int k) const;
  // Pr{t in S}: one cell, or two when t is a cell boundary inside (0,1).
  double PointHit(double t) const;
  // Pr{S subset E} for a set E at any resolution.
  double SubsetProbability(const ClosedSet& e) const;

  // All atoms of sizes with at most `atom_cap` subsets and probability above
  // `floor`; the rest is reported as dropped mass.
  SpectralMeasure Atoms(std::size_t atom_cap, double floor = 1e-15) const;
  // k equal-weight systematic draws from the full law, merged.
  SpectralMeasure Resample(std::size_t k) const;

 private:
  int cells_ = 0;
  double c_n_ = 0.0;
  std::vector<double> size_p_;
};

// Rows of the orthonormal symmetric Krawtchouk matrix for N = cells (even),
// dense (N+1) x (N+1), row-major. Exposed for tests.
std::vector<double> KrawtchoukMatrix(int cells);

}  // namespace fwscale
