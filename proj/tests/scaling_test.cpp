#include "fwscale/scaling.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fwscale/errors.hpp"

namespace fwscale {
namespace {

ModelSpec RandomWalk(const std::string& psi, int lo, int hi) {
  ModelOptions options;
  options.psi = psi;
  options.level_lo = lo;
  options.level_hi = hi;
  return BuiltinModel("random_walk", options);
}

TEST(RunLevelTest, FirstChaosIsExact) {
  const LevelResult l = RunLevel(RandomWalk("endpoint", 3, 3), 3, {});
  EXPECT_EQ(l.method, "krawtchouk");
  EXPECT_EQ(l.cells, 8);
  EXPECT_NEAR(l.c_n.value, 1.0, 1e-12);
  EXPECT_NEAR(l.expected_lebesgue.value, 0.125, 1e-12);
  ASSERT_TRUE(l.measure.has_value());
  EXPECT_EQ(l.measure->atoms.size(), 8u);
  EXPECT_NEAR(l.mean_count.value, 1.0, 1e-12);
}

TEST(RunLevelTest, MonteCarloModeHasErrors) {
  ScalingConfig config;
  config.budget.mode = Mode::kMonteCarlo;
  config.budget.mc_samples = 5000;
  const LevelResult l = RunLevel(RandomWalk("second_chaos", 4, 4), 4, config);
  EXPECT_EQ(l.method, "monte-carlo");
  EXPECT_FALSE(l.expected_lebesgue.exact);
  EXPECT_GT(l.expected_lebesgue.std_error, 0.0);
  EXPECT_FALSE(l.measure.has_value());
  EXPECT_EQ(l.point_hits.size(), config.t_grid.size());
}

TEST(RunLevelTest, CoalescingUsesInclusionExclusion) {
  const ModelSpec spec = BuiltinModel("coalescing_flow");
  const LevelResult l = RunLevel(spec, 2, {});
  EXPECT_EQ(l.method, "inclusion-exclusion");
  ASSERT_TRUE(l.measure.has_value());
  double total = l.measure->dropped_mass;
  for (const SetAtom& a : l.measure->atoms) total += a.p;
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(RunLevelTest, ExactModeRefusesLargeGrids) {
  ScalingConfig config;
  config.budget.mode = Mode::kExact;
  EXPECT_THROW(RunLevel(BuiltinModel("coalescing_flow"), 5, config), BudgetExceeded);
}

TEST(RunScalingExperimentTest, RandomWalkTrends) {
  const ConvergenceReport r = RunScalingExperiment(RandomWalk("", 2, 6), {});
  ASSERT_EQ(r.levels.size(), 5u);
  for (std::size_t i = 0; i + 1 < r.levels.size(); ++i) {
    ASSERT_TRUE(r.levels[i].kr_next.has_value());
  }
  EXPECT_FALSE(r.levels.back().kr_next.has_value());
  for (std::size_t i = 0; i + 2 < r.levels.size(); ++i) {
    EXPECT_GT(*r.levels[i].kr_next, *r.levels[i + 1].kr_next);
  }
  ASSERT_TRUE(r.condition41.has_value());
  EXPECT_EQ(r.condition41->rows.size(), 5u);
  EXPECT_TRUE(r.flags.lebesgue_nonincreasing);
  EXPECT_TRUE(r.flags.point_hit_nonincreasing);
  EXPECT_TRUE(r.flags.condition41_nonincreasing);
  EXPECT_TRUE(r.flags.kr_nonincreasing);
}

TEST(RunScalingExperimentTest, SingleLevelHasNoKrNext) {
  ScalingConfig config;
  config.condition41 = false;
  const ConvergenceReport r = RunScalingExperiment(RandomWalk("", 3, 3), config);
  ASSERT_EQ(r.levels.size(), 1u);
  EXPECT_FALSE(r.levels[0].kr_next.has_value());
  EXPECT_THROW(FinitenessHeuristic(r), InsufficientLevels);
}

TEST(FinitenessHeuristicTest, Flags) {
  ConvergenceReport r;
  for (int n = 2; n <= 4; ++n) {
    LevelResult l;
    l.n = n;
    l.cells = 1 << n;
    l.count_distribution = {0.0, 1.0};
    l.mean_count.value = 1.0;
    r.levels.push_back(l);
  }
  EXPECT_EQ(FinitenessHeuristic(r).flag, "classical-consistent");
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    r.levels[i].count_distribution.clear();
    r.levels[i].mean_count.value = std::pow(2.0, static_cast<double>(i));
  }
  EXPECT_EQ(FinitenessHeuristic(r).flag, "nonclassical-suspect");
  r.levels[1].mean_count.value = 1.1;
  r.levels[2].mean_count.value = 2.0;
  EXPECT_EQ(FinitenessHeuristic(r).flag, "inconclusive");
}

}  // namespace
}  // namespace fwscale
