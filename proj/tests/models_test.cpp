#include "fwscale/models.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fwscale/errors.hpp"

namespace fwscale {
namespace {

// Site positions after one step, simulated on doubles: crossing neighbours
// meet halfway, everyone else moves a full lattice step, and the result is
// kept inside the initial occupied range.
std::vector<double> SimulatedPositions(int n, int m, unsigned pattern) {
  const int k = (n + 1) / 2;
  const double step = std::ldexp(1.0, -k);
  const int j0 = ((1 << k) - m) / 2;
  std::vector<double> start(m), end(m);
  for (int i = 0; i < m; ++i) start[i] = (j0 + i + 0.5) * step;
  for (int i = 0; i < m; ++i) {
    const bool up = pattern >> i & 1;
    if (up) {
      const bool meets = i + 1 < m && !(pattern >> (i + 1) & 1);
      end[i] = start[i] + (meets ? step / 2 : step);
    } else {
      const bool meets = i > 0 && (pattern >> (i - 1) & 1);
      end[i] = start[i] - (meets ? step / 2 : step);
    }
    end[i] = std::clamp(end[i], start[0], start[m - 1]);
  }
  return end;
}

TEST(RandomWalkStepTest, Scaling) {
  const AtomicMeasure mu = RandomWalkStep(4);
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_DOUBLE_EQ(std::get<RealElement>(mu.atoms()[1].element).x, 0.25);
  EXPECT_DOUBLE_EQ(mu.atoms()[0].weight, 0.5);
}

TEST(CoalescingFlowTest, MapsSendCellsToSimulatedPositions) {
  for (int n = 1; n <= 6; ++n) {
    const CoalescingLevel level = BuildCoalescingLevel(n, 0, "reflect");
    const int m = level.sites;
    EXPECT_EQ(m, std::min(1 << ((n + 1) / 2), 8));
    for (unsigned p = 0; p < (1u << m); ++p) {
      const StepMap f = CoalescingMap(level, p);
      const std::vector<double> expected = SimulatedPositions(n, m, p);
      std::vector<double> cuts = {0.0};
      for (const Dyadic& b : level.boundaries) cuts.push_back(b.ToDouble());
      cuts.push_back(1.0);
      for (int i = 0; i < m; ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const auto y = f.Evaluate(mid);
        ASSERT_TRUE(y.has_value());
        EXPECT_DOUBLE_EQ(*y, expected[i]) << "n=" << n << " pattern=" << p << " site=" << i;
      }
    }
  }
}

TEST(CoalescingFlowTest, EveryWordComposes) {
  for (int n = 1; n <= 4; ++n) {
    const CoalescingLevel level = BuildCoalescingLevel(n, 0, "reflect");
    EXPECT_TRUE(ConvolutionPower(level.measure, 1 << n).has_value()) << n;
  }
}

TEST(CoalescingFlowTest, BoundariesAreDeterministicAndOffLattice) {
  const CoalescingLevel a = BuildCoalescingLevel(4, 0, "reflect");
  const CoalescingLevel b = BuildCoalescingLevel(4, 0, "reflect");
  EXPECT_EQ(a.boundaries, b.boundaries);
  EXPECT_TRUE(a.perturbed);
  for (const Dyadic& d : a.boundaries) EXPECT_EQ(d.log2den(), a.lattice_log2 + 2);
}

TEST(CoalescingFlowTest, RejectsOtherBoundaryRules) {
  EXPECT_THROW(BuildCoalescingLevel(3, 0, "absorb"), std::invalid_argument);
}

TEST(BuiltinModelTest, NamesAndDefaults) {
  const ModelSpec rw = BuiltinModel("random_walk");
  EXPECT_EQ(rw.kind, UndergroupKind::kReal);
  EXPECT_TRUE(rw.limit.has_value());
  EXPECT_EQ(rw.psi.name(), "endpoint_clamped");
  const ModelSpec cf = BuiltinModel("coalescing_flow");
  EXPECT_EQ(cf.kind, UndergroupKind::kStepMap);
  EXPECT_FALSE(cf.limit.has_value());
  EXPECT_EQ(cf.psi.name(), "threshold");
  EXPECT_THROW(BuiltinModel("sticky_walk"), UnknownModel);
}

TEST(MakeFunctionalTest, ClampedFunctionalsHaveUnitNormUnderGaussian) {
  ModelOptions options;
  const Functional e = MakeFunctional(UndergroupKind::kReal, "endpoint_clamped", options);
  const Functional q = MakeFunctional(UndergroupKind::kReal, "second_chaos", options);
  // Midpoint rule against the standard normal density.
  double e2 = 0.0, q1 = 0.0, q2 = 0.0;
  const double h = 1e-3;
  for (double x = -10 + h / 2; x < 10; x += h) {
    const double w = std::exp(-x * x / 2) / std::sqrt(2 * M_PI) * h;
    const double ev = e(RealElement{x}), qv = q(RealElement{x});
    e2 += w * ev * ev;
    q1 += w * qv;
    q2 += w * qv * qv;
  }
  EXPECT_NEAR(e2, 1.0, 1e-6);
  EXPECT_NEAR(q1, 0.0, 1e-6);
  EXPECT_NEAR(q2, 1.0, 1e-6);
  EXPECT_THROW(MakeFunctional(UndergroupKind::kStepMap, "endpoint", options),
               std::invalid_argument);
}

}  // namespace
}  // namespace fwscale
