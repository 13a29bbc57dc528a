#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fwscale/closed_set.hpp"
#include "fwscale/functional.hpp"
#include "fwscale/measures.hpp"

namespace fwscale {

inline constexpr int kDefaultWalshCap = 24;

// phi on {-1,+1}^n; entry b is phi(tau) with tau_k = +1 iff bit k-1 of b is set.
struct SignFunction {
  int n = 0;
  std::vector<double> values;

  // Checks the table length (2^n) and finiteness.
  static SignFunction Create(int n, std::vector<double> values);
  // n = log2 of the table length; throws when it is not a power of two.
  static SignFunction FromTable(std::vector<double> values);
};

// Coefficient b is phi^(S) for S = {k : bit k-1 of b set}.
struct WalshSpectrum {
  int n = 0;
  std::vector<double> coefficients;
};

// Unnormalized in-place butterfly: x <- H x with H the +-1 Hadamard matrix.
void FastWalshHadamard(std::span<double> x);

WalshSpectrum WalshTransform(const SignFunction& phi, int cap = kDefaultWalshCap);
SignFunction InverseWalsh(const WalshSpectrum& spectrum);

// sum_S phi^(S)^2 - 2^-n sum_tau phi(tau)^2.
double ParsevalResidual(const SignFunction& phi, const WalshSpectrum& spectrum);

// The two atoms of an equiprobable two-point measure: (tau = -1, tau = +1).
std::pair<Element, Element> TwoAtomicSigns(const AtomicMeasure& mu1);

// Entry b is psi(X_{0,1} ... X_{n-1,n}) with X_{k-1,k} = f1 or f2 according
// to bit k-1 of b. Every word is composed in full; an undefined word raises
// UndefinedComposition.
SignFunction FunctionalTable(const Functional& psi, const AtomicMeasure& mu1, int n,
                             int cap = kDefaultWalshCap);

// Law of S with Pr{S = union of cells in S} = phi^(S)^2 after scaling phi to
// unit mean square. Throws ZeroFunctional.
SpectralMeasure SpectralMeasureFromTable(const SignFunction& phi,
                                         int cap = kDefaultWalshCap);
SpectralMeasure SpectralMeasureExact(const Functional& psi, const AtomicMeasure& mu1,
                                     int n, int cap = kDefaultWalshCap);

// Mean square of phi over the 2^n equally likely sign patterns.
double MeanSquare(const SignFunction& phi);

// sum of phi^(S)^2 over S contained in the coordinate mask.
double SpectralMassWithin(const WalshSpectrum& spectrum, std::uint64_t mask);

// E|E[phi | tau_k, k in mask]|^2 by direct averaging over the table.
double ConditionalMeanSquare(const SignFunction& phi, std::uint64_t mask);

// The same for the coordinates u+1..v (cells u..v-1).
double IntervalSecondMoment(const SignFunction& phi, int u, int v);

}  // namespace fwscale
