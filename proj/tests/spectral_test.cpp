#include "fwscale/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fwscale/errors.hpp"
#include "fwscale/walsh.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace fwscale {
namespace {

using testing::Rng;

// E|E[psi | increments of cells in mask]|^2 by enumerating every word.
double EnumeratedConditional(const Functional& psi, const AtomicMeasure& mu, int cells,
                             std::uint64_t mask) {
  const int k = static_cast<int>(mu.size());
  std::size_t words = 1;
  for (int i = 0; i < cells; ++i) words *= k;
  std::map<std::vector<int>, std::pair<double, double>> groups;  // key -> (mass, sum)
  std::vector<int> digits(cells);
  for (std::size_t w = 0; w < words; ++w) {
    std::size_t r = w;
    double p = 1.0;
    Element x = UnitOf(mu.kind());
    std::vector<int> key;
    for (int i = 0; i < cells; ++i) {
      digits[i] = static_cast<int>(r % k);
      r /= k;
      p *= mu.atoms()[digits[i]].weight;
      x = *Compose(x, mu.atoms()[digits[i]].element);
      key.push_back(mask >> i & 1 ? digits[i] : -1);
    }
    auto& g = groups[key];
    g.first += p;
    g.second += p * psi(x);
  }
  double total = 0.0;
  for (const auto& [key, g] : groups) total += g.second * g.second / g.first;
  return total;
}

TEST(MobiusInvertTest, MatchesSubsetSums) {
  Rng rng(61);
  const int n = 5;
  std::vector<double> p(32);
  for (double& v : p) v = testing::UniformReal(rng, 0, 1);
  std::vector<double> q(32, 0.0);
  for (std::size_t e = 0; e < 32; ++e) {
    for (std::size_t s = 0; s < 32; ++s) {
      if ((s & e) == s) q[e] += p[s];
    }
  }
  const auto back = MobiusInvert(q, n);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(back[i], p[i], 1e-13);
}

TEST(CellsTest, InsideAndAt) {
  const auto inside = CellsInside(ClosedSet::Range(2, 0, 1), 8);
  EXPECT_EQ(inside, (std::vector<bool>{true, true, true, true, false, false, false, false}));
  EXPECT_EQ(CellsAt(0.5, 4), (std::vector<int>{1, 2}));
  EXPECT_EQ(CellsAt(0.3, 4), (std::vector<int>{1}));
  EXPECT_EQ(CellsAt(1.0, 4), (std::vector<int>{3}));
  EXPECT_EQ(CellsAt(0.0, 4), (std::vector<int>{0}));
}

TEST(SecondMomentTest, ExactMatchesEnumeration) {
  Rng rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const AtomicMeasure mu = testing::RandomLatticeMeasure(rng, 2, 3);
    const Functional psi = testing::RandomPointFunctional(rng);
    const GridSpec grid{mu, 5};
    const EstimatorReport c = SecondMoment(psi, grid, {});
    EXPECT_TRUE(c.exact);
    EXPECT_NEAR(c.value, EnumeratedConditional(psi, mu, 5, 31), 1e-12);
  }
}

TEST(ConditionalSecondMomentTest, ExactMatchesEnumeration) {
  Rng rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const AtomicMeasure mu = testing::RandomLatticeMeasure(rng, 2, 3);
    const Functional psi = testing::RandomPointFunctional(rng);
    const int cells = 5;
    const ClosedSet e = testing::RandomClosedSet(rng, cells);
    const GridSpec grid{mu, cells};
    const double c = EnumeratedConditional(psi, mu, cells, 31);
    if (c < 1e-9) continue;
    const EstimatorReport r = ConditionalSecondMoment(psi, grid, e, {});
    EXPECT_NEAR(r.value, EnumeratedConditional(psi, mu, cells, e.Mask()) / c, 1e-12);
  }
}

TEST(ConditionalSecondMomentTest, MonteCarloAgreesWithExact) {
  Rng rng(64);
  Budget mc;
  mc.mode = Mode::kMonteCarlo;
  mc.mc_samples = 40000;
  int within = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const AtomicMeasure mu = testing::RandomTwoAtomic(rng, UndergroupKind::kStepMap);
    const Functional psi = testing::RandomPointFunctional(rng);
    const ClosedSet e = testing::RandomClosedSet(rng, 6);
    const GridSpec grid{mu, 6};
    const double exact = ConditionalSecondMoment(psi, grid, e, {}).value;
    mc.seed = trial;
    const EstimatorReport r = ConditionalSecondMoment(psi, grid, e, mc);
    EXPECT_FALSE(r.exact);
    if (std::fabs(r.value - exact) <= 4 * r.std_error + 1e-12) ++within;
  }
  EXPECT_GE(within, 9);
}

TEST(SpectralMeasureIeTest, EqualsWalshPathForTwoAtoms) {
  Rng rng(65);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = testing::UniformInt(rng, 1, 8);
    const AtomicMeasure mu = testing::RandomTwoAtomic(rng, UndergroupKind::kStepMap);
    const Functional psi = testing::RandomPointFunctional(rng);
    const IeResult ie = SpectralMeasureIe(psi, {mu, n}, {});
    const SpectralMeasure exact = SpectralMeasureExact(psi, mu, n);
    std::map<std::uint64_t, double> a;
    for (const SetAtom& s : ie.measure.atoms) a[s.set.Mask()] = s.p;
    for (const SetAtom& s : exact.atoms) EXPECT_NEAR(a[s.set.Mask()], s.p, 1e-10);
    EXPECT_FALSE(ie.negative_mass);
  }
}

TEST(SpectralMeasureIeTest, ThreeAtomsMatchEnumeration) {
  Rng rng(66);
  const AtomicMeasure mu = testing::RandomLatticeMeasure(rng, 2, 3);
  const Functional psi = testing::RandomPointFunctional(rng);
  const int cells = 4;
  const IeResult ie = SpectralMeasureIe(psi, {mu, cells}, {});
  const double c = EnumeratedConditional(psi, mu, cells, 15);
  for (std::uint64_t e = 0; e < 16; ++e) {
    EXPECT_NEAR(ie.subset_probability[e], EnumeratedConditional(psi, mu, cells, e) / c, 1e-12);
  }
}

TEST(SpectralMeasureIeTest, MonteCarloModeReportsErrors) {
  Rng rng(67);
  const AtomicMeasure mu = testing::RandomTwoAtomic(rng, UndergroupKind::kReal);
  const Functional psi = testing::RandomPointFunctional(rng, 0.0);
  Budget b;
  b.mode = Mode::kMonteCarlo;
  b.mc_samples = 20000;
  const IeResult ie = SpectralMeasureIe(psi, {mu, 4}, b);
  EXPECT_FALSE(ie.exact);
  double total = 0.0;
  for (const SetAtom& s : ie.measure.atoms) total += s.p;
  EXPECT_NEAR(total + ie.measure.dropped_mass, 1.0, 1e-12);
  b.mc_samples = 0;
  EXPECT_THROW(SpectralMeasureIe(psi, {mu, 4}, b), BudgetExceeded);
}

TEST(SpectralMeasureIeTest, ConstantFunctionalGivesEmptySet) {
  const Functional one =
      Functional::PointEvaluation("constant", 0.0, [](double) { return 1.0; }, 1.0);
  Rng rng(68);
  const IeResult ie =
      SpectralMeasureIe(one, {testing::RandomTwoAtomic(rng, UndergroupKind::kReal), 3}, {});
  ASSERT_EQ(ie.measure.atoms.size(), 1u);
  EXPECT_TRUE(ie.measure.atoms[0].set.empty());
  EXPECT_NEAR(ie.measure.atoms[0].p, 1.0, 1e-15);
}

TEST(EstimateSetStatisticsTest, AgreesWithExactLaw) {
  Rng rng(69);
  const AtomicMeasure mu = testing::RandomTwoAtomic(rng, UndergroupKind::kStepMap);
  const Functional psi = testing::RandomPointFunctional(rng);
  const int n = 6;
  const SpectralMeasure exact = SpectralMeasureExact(psi, mu, n);
  Budget b;
  b.mode = Mode::kMonteCarlo;
  b.mc_samples = 50000;
  b.seed = 3;
  const std::vector<double> ts = {0.1, 0.5, 0.9};
  const std::vector<ClosedSet> family = {ClosedSet::Range(2, 0, 1), ClosedSet::Full(4)};
  const SetStatistics st = EstimateSetStatistics(psi, {mu, n}, ts, family, b);
  EXPECT_NEAR(st.expected_lebesgue.value, exact.ExpectedLebesgue(),
              5 * st.expected_lebesgue.std_error + 1e-12);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_NEAR(st.point_hits[i].value, exact.PointHit(ts[i]),
                5 * st.point_hits[i].std_error + 1e-12);
  }
  const auto profile = SubsetProbabilityProfile(exact, family);
  for (std::size_t i = 0; i < family.size(); ++i) {
    EXPECT_NEAR(st.profile[i].value, profile[i].p, 5 * st.profile[i].std_error + 1e-12);
  }
}

TEST(MonteCarloTest, ThreadCountDoesNotChangeResults) {
  Rng rng(70);
  const AtomicMeasure mu = testing::RandomTwoAtomic(rng, UndergroupKind::kStepMap);
  const Functional psi = testing::RandomPointFunctional(rng);
  Budget b;
  b.mode = Mode::kMonteCarlo;
  b.mc_samples = 10000;
  b.seed = 9;
  const EstimatorReport one = ConditionalSecondMoment(psi, {mu, 8}, ClosedSet::Range(2, 0, 1), b);
  b.threads = 3;
  const EstimatorReport three =
      ConditionalSecondMoment(psi, {mu, 8}, ClosedSet::Range(2, 0, 1), b);
  EXPECT_EQ(one.value, three.value);
  EXPECT_EQ(one.std_error, three.std_error);
}

}  // namespace
}  // namespace fwscale
