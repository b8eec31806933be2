#include <gtest/gtest.h>

#include "qdisc/suites.hpp"

using namespace qdisc;

namespace {

OptimizerConfig cfg() {
  OptimizerConfig c;
  c.starts = 16;
  return c;
}

}  // namespace

TEST(Suites, NamesAreRunnable) {
  EXPECT_EQ(suite_names().size(), 8u);
  EXPECT_THROW(run_suite("no-such-suite", 1, 1, cfg()), InvariantError);
}

TEST(Suites, SmallBatteriesPass) {
  for (const std::string name : {"koashi-winter", "holevo-identity", "inequality-chain", "norm-bounds",
                                 "classicality-equivalence", "steering-completeness"}) {
    const SuiteReport r = run_suite(name, 3, 4, cfg());
    EXPECT_TRUE(r.pass) << name << " worst residual " << r.worst_residual;
    EXPECT_EQ(r.cases.size(), 4u);
  }
}

TEST(Suites, LinoptAndReductionBatteries) {
  EXPECT_TRUE(run_suite("linopt-equality", 5, 2, cfg()).pass);
  const SuiteReport red = run_suite("reduction-soundness", 5, 2, cfg());
  EXPECT_TRUE(red.pass) << red.worst_residual;
  EXPECT_EQ(red.cases[0].label, "yes");
  EXPECT_EQ(red.cases[1].label, "no");
}

TEST(Suites, DefaultCountsAndDeterministicAggregation) {
  OptimizerConfig c = cfg();
  c.threads = 1;
  const SuiteReport a = run_suite("steering-completeness", 9, 0, c);
  EXPECT_EQ(a.count, 100);
  c.threads = 4;
  const SuiteReport b = run_suite("steering-completeness", 9, 0, c);
  EXPECT_EQ(io::to_json(a).dump(), io::to_json(b).dump());
  EXPECT_EQ(io::to_csv(a), io::to_csv(b));
}

TEST(Suites, FailingCheckIsReported) {
  SuiteReport r;
  r.name = "x";
  r.cases.push_back({0, "a", {{"v", 1.0}}, {{"c", 0.5, 0.1}}});
  r.cases.push_back({1, "b", {{"w", 2.0}}, {{"d", 0.0, 0.1}}});
  EXPECT_FALSE(r.cases[0].passed());
  EXPECT_TRUE(r.cases[1].passed());
  const std::string csv = io::to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,label,v,w,residual:c,pass:c,residual:d,pass:d,pass");
  EXPECT_NE(csv.find("\n0,a,1,,0.5,0,,,0\n"), std::string::npos);
}
