#include <gtest/gtest.h>

#include <cmath>

#include "ncrate/analytic.hpp"
#include "ncrate/montecarlo.hpp"

using namespace ncrate;

TEST(EstimatePlr, UnbiasedAgainstAnalyticRlnc) {
  const auto spec = CodeSpec::make(Scheme::rlnc, 4, 6);
  const auto net = LineNetwork::uniform(2, 0.1);
  const double exact = plr_rlnc(spec, net);
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const PlrEstimate e = estimate_plr(spec, net, 2000, seed);
    covered += std::abs(e.mean - exact) <= 3 * e.trial_ci_halfwidth;
  }
  EXPECT_GE(covered, 99);
}

TEST(EstimatePlr, SameSeedIsBitIdenticalForAnyJobCount) {
  const auto spec = CodeSpec::make(Scheme::snc_s, 6, 10);
  const auto net = LineNetwork::uniform(3, 0.2);
  MonteCarloOptions one, four;
  four.jobs = 4;
  const PlrEstimate a = estimate_plr(spec, net, 3000, 42, one);
  const PlrEstimate b = estimate_plr(spec, net, 3000, 42, four);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, estimate_plr(spec, net, 3000, 42, one));
}

TEST(EstimatePlr, SeedHalvesAgree) {
  const auto spec = CodeSpec::make(Scheme::snc, 6, 9);
  const auto net = LineNetwork::uniform(2, 0.2);
  const PlrEstimate a = estimate_plr(spec, net, 4000, 1001);
  const PlrEstimate b = estimate_plr(spec, net, 4000, 2002);
  EXPECT_LE(std::abs(a.mean - b.mean), std::hypot(a.trial_ci_halfwidth, b.trial_ci_halfwidth) * 1.5);
}

TEST(EstimatePlr, IntervalFields) {
  const auto spec = CodeSpec::make(Scheme::rlnc, 8, 10);
  const PlrEstimate e = estimate_plr(spec, LineNetwork::uniform(2, 0.2), 1000, 3);
  EXPECT_EQ(e.trials, 1000u);
  EXPECT_EQ(e.packets_observed, 8000u);
  EXPECT_EQ(e.reports, 1000u);
  EXPECT_NEAR(e.ci_halfwidth, 1.96 * std::sqrt(e.mean * (1 - e.mean) / 8000.0), 1e-15);
  EXPECT_GT(e.trial_ci_halfwidth, e.ci_halfwidth);
  EXPECT_GE(e.report_failure_rate, e.mean);
}

TEST(EstimatePlr, SwncExcludesWarmupGroups) {
  const auto spec = CodeSpec::make(Scheme::swnc, 4, 8);
  MonteCarloOptions o;
  o.swnc_groups = 10;
  o.warmup_groups = 2;
  const PlrEstimate e = estimate_plr(spec, LineNetwork::uniform(2, 0.2), 100, 3, o);
  EXPECT_EQ(e.reports, 800u);
  EXPECT_EQ(e.packets_observed, 1600u);
  o.warmup_groups = 10;
  EXPECT_THROW(estimate_plr(spec, LineNetwork::uniform(2, 0.2), 100, 3, o), std::invalid_argument);
}

TEST(EstimatePlr, CurveIsMonotoneInRate) {
  std::vector<CodeSpec> family;
  for (std::size_t k = 2; k <= 16; k += 2) family.push_back(CodeSpec::make(Scheme::snc_s, k, 20));
  const auto curve = estimate_plr_curve(family, LineNetwork::uniform(2, 0.2), 2000, 6);
  ASSERT_EQ(curve.size(), family.size());
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_GT(curve[i].first, curve[i - 1].first);
    EXPECT_GE(curve[i].second.mean + curve[i].second.trial_ci_halfwidth, curve[i - 1].second.mean);
  }
  EXPECT_GT(curve.back().second.mean, curve.front().second.mean);
}

TEST(EstimatePlr, RejectsZeroTrials) {
  EXPECT_THROW(estimate_plr(CodeSpec::make(Scheme::rlnc, 2, 4), LineNetwork({0.1}), 0, 1), std::invalid_argument);
}
