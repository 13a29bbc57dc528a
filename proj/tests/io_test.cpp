#include "fwscale/io.hpp"

#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "support/generators.hpp"

namespace fwscale {
namespace {

using testing::Rng;

TEST(FormatDoubleTest, RoundTrips) {
  Rng rng(81);
  for (int i = 0; i < 1000; ++i) {
    const double x = testing::UniformReal(rng, -1e6, 1e6) * std::pow(10.0, testing::UniformInt(rng, -20, 20));
    EXPECT_EQ(std::stod(FormatDouble(x)), x);
  }
  EXPECT_EQ(FormatDouble(-0.0), "0");
  EXPECT_EQ(FormatDouble(0.5), "0.5");
}

TEST(ElementJsonTest, RoundTrips) {
  Rng rng(82);
  for (int i = 0; i < 200; ++i) {
    const Element e = testing::RandomElement(rng, i % 2 ? UndergroupKind::kReal
                                                        : UndergroupKind::kStepMap);
    EXPECT_EQ(ElementFromJson(ElementToJson(e)), e);
  }
  EXPECT_EQ(ElementToJson(StepMap::Unit()), R"({"unit":true})");
}

TEST(ElementJsonTest, AcceptsDecimalPoints) {
  const Element e = ElementFromJson(R"({"A":[0.5],"B":[0.25,0.75]})");
  EXPECT_EQ(e, Element(StepMap::Create({Dyadic(1, 1)}, {Dyadic(1, 2), Dyadic(3, 2)})));
  EXPECT_THROW(ElementFromJson(R"({"A":[1e-30],"B":[0.25,0.75]})"), std::invalid_argument);
  EXPECT_THROW(ElementFromJson("{"), std::invalid_argument);
}

TEST(MeasureJsonTest, RoundTrips) {
  Rng rng(83);
  for (UndergroupKind kind : {UndergroupKind::kReal, UndergroupKind::kStepMap}) {
    const AtomicMeasure mu = testing::RandomMeasure(rng, kind, 5);
    const AtomicMeasure back = MeasureFromJson(MeasureToJson(mu));
    ASSERT_EQ(back.size(), mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      EXPECT_EQ(back.atoms()[i].element, mu.atoms()[i].element);
      EXPECT_EQ(back.atoms()[i].weight, mu.atoms()[i].weight);
    }
  }
}

TEST(SpectralMeasureJsonTest, RoundTrips) {
  SpectralMeasure nu;
  nu.resolution = 8;
  nu.pitch_log2 = 3;
  nu.atoms = {{ClosedSet::Create(8, {}), 0.25}, {ClosedSet::Create(8, {1, 5}), 0.75}};
  const SpectralMeasure back = SpectralMeasureFromJson(SpectralMeasureToJson(nu));
  EXPECT_EQ(back.resolution, 8);
  EXPECT_EQ(back.pitch_log2, 3);
  ASSERT_EQ(back.atoms.size(), 2u);
  EXPECT_EQ(back.atoms[1].set, nu.atoms[1].set);
  EXPECT_EQ(back.atoms[1].p, 0.75);
}

TEST(SignFunctionBinaryTest, RoundTrips) {
  Rng rng(84);
  const SignFunction phi = testing::RandomSignFunction(rng, 6);
  std::stringstream ss;
  WriteSignFunctionBinary(ss, phi);
  EXPECT_EQ(ss.str().size(), 8u + 8u * 64);
  EXPECT_EQ(static_cast<unsigned char>(ss.str()[0]), 64);
  const SignFunction back = ReadSignFunctionBinary(ss);
  EXPECT_EQ(back.values, phi.values);
  std::stringstream truncated(ss.str().substr(0, 20));
  EXPECT_THROW(ReadSignFunctionBinary(truncated), std::invalid_argument);
}

TEST(ParseTableTest, Formats) {
  EXPECT_EQ(ParseTable("[1, 2.5]"), (std::vector<double>{1.0, 2.5}));
  EXPECT_EQ(ParseTable("1 2\n3,4"), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_THROW(ParseTable("1 x"), std::invalid_argument);
  EXPECT_THROW(ParseTable("[1, \"a\"]"), std::invalid_argument);
}

TEST(CsvTest, Headers) {
  ConvergenceReport r;
  LevelResult l;
  l.n = 2;
  l.c_n.value = 1.0;
  r.levels.push_back(l);
  EXPECT_EQ(LevelsCsv(r).substr(0, 48), "level,c_n,E_leb,max_point_hit,kr_next,cells_mean");
  EXPECT_NE(LevelsCsv(r).find("\n2,1,0,0,,0\n"), std::string::npos);
  Condition41Table t;
  t.rows.push_back({3, 1.0, 0.125, 512, false});
  EXPECT_EQ(Condition41Csv(t), "n,t,kr,m_discretization\n3,1,0.125,512\n");
  EXPECT_EQ(ProfileCsv({ClosedSet::Create(4, {0, 3})}, {EstimatorReport{0.5, 0.0}}),
            "set,p,std_error\n0:0.25+0.75:1,0.5,0\n");
}

TEST(ReportJsonTest, IsValidJson) {
  ConvergenceReport r;
  r.model = "random_walk";
  r.t_grid = {0.5};
  r.e_family = {ClosedSet::Full(1)};
  LevelResult l;
  l.n = 2;
  l.point_hits = {EstimatorReport{0.5, 0.1, false, 100, {}}};
  l.profile = {EstimatorReport{}};
  r.levels.push_back(l);
  const auto j = nlohmann::json::parse(ReportToJson(r, nullptr));
  EXPECT_EQ(j["levels"][0]["point_hits"][0]["mode"], "mc");
  EXPECT_TRUE(j["finiteness"].is_null());
  EXPECT_TRUE(j["levels"][0]["kr_next"].is_null());
}

}  // namespace
}  // namespace fwscale
