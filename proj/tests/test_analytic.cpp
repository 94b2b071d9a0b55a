#include <gtest/gtest.h>

#include <limits>

#include "ncrate/analytic.hpp"
#include "oracles.hpp"

using namespace ncrate;

TEST(Binomial, Pmf) {
  EXPECT_NEAR(binom_pmf(4, 4, 0.8), 0.4096, 1e-12);
  EXPECT_NEAR(binom_pmf(3, 4, 0.8), 0.4096, 1e-12);
  EXPECT_DOUBLE_EQ(binom_pmf(0, 5, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(binom_pmf(5, 5, 1.0), 1.0);
  EXPECT_THROW(binom_pmf(5, 4, 0.5), std::out_of_range);
  for (std::size_t n : {1u, 7u, 40u})
    for (std::size_t k = 0; k <= n; ++k) EXPECT_NEAR(binom_pmf(k, n, 0.3), oracle::binom_pmf(k, n, 0.3), 1e-12);
}

TEST(PlrRlnc, FiniteFieldRankPenalty) {
  // No erasures: only the chance that two random vectors over GF(2) fail to span.
  EXPECT_NEAR(plr_rlnc(2, 2, LineNetwork({0.0}), 2.0), 0.625, 1e-12);
  EXPECT_NEAR(plr_rlnc(CodeSpec::make(Scheme::rlnc, 2, 2, GfField::standard(1)), LineNetwork({0.0})), 0.625, 1e-12);
  EXPECT_DOUBLE_EQ(plr_rlnc(4, 4, LineNetwork({0.0})), 0.0);
}

TEST(PlrRlnc, InfiniteFieldBinomialTail) {
  EXPECT_NEAR(plr_rlnc(3, 4, LineNetwork({0.2})), 0.1808, 1e-12);
  EXPECT_NEAR(plr_rlnc(3, 4, LineNetwork({0.2}), 65536.0), 0.1808062502, 1e-9);
}

TEST(PlrRlnc, MatchesOracleOnGrid) {
  for (double q : {2.0, 16.0, 256.0, std::numeric_limits<double>::infinity()})
    for (double d : {0.05, 0.2})
      for (std::size_t h : {1u, 2u, 5u})
        for (std::size_t n : {4u, 16u, 33u})
          for (std::size_t k = 1; k <= n; k += 3) {
            const double got = plr_rlnc(k, n, LineNetwork::uniform(h, d), q);
            const double want = oracle::plr_rlnc(k, n, std::vector<double>(h, d), q);
            ASSERT_NEAR(got, want, 1e-10 + 1e-9 * want) << q << " " << d << " " << h << " " << n << " " << k;
          }
}

TEST(PlrRlnc, KeepsRelativePrecisionForTinyLosses) {
  const double v = plr_rlnc(10, 200, LineNetwork::uniform(2, 0.05));
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1e-100);
}

TEST(PlrRlnc, RejectsInvalidArguments) {
  EXPECT_THROW(plr_rlnc(0, 4, LineNetwork({0.1})), SpecError);
  EXPECT_THROW(plr_rlnc(5, 4, LineNetwork({0.1})), SpecError);
  EXPECT_THROW(plr_rlnc(CodeSpec::make(Scheme::snc, 2, 4), LineNetwork({0.1})), SpecError);
}

TEST(PlrRlnc, MonotoneInKAndHops) {
  for (std::size_t n : {8u, 32u, 64u}) {
    for (std::size_t k = 2; k <= n; ++k) {
      EXPECT_GE(plr_rlnc(k, n, LineNetwork::uniform(2, 0.05), 256.0),
                plr_rlnc(k - 1, n, LineNetwork::uniform(2, 0.05), 256.0));
    }
    for (std::size_t h = 2; h <= 6; ++h) {
      EXPECT_GE(plr_rlnc(n / 2, n, LineNetwork::uniform(h, 0.2)), plr_rlnc(n / 2, n, LineNetwork::uniform(h - 1, 0.2)));
    }
  }
}

TEST(Entropy, KnownValues) {
  EXPECT_NEAR(entropy_H(0.75, 0.8), 0.007382, 1e-6);
  EXPECT_NEAR(entropy_H(1.0, 0.8), 0.223144, 1e-6);
  EXPECT_DOUBLE_EQ(entropy_H(0.8, 0.8), 0.0);
  EXPECT_THROW(entropy_H(0.5, 0.0), std::domain_error);
  EXPECT_THROW(entropy_H(0.5, 1.0), std::domain_error);
}

TEST(NormalCdf, MatchesNumericIntegration) {
  for (double y : {-3.0, -1.0, 0.0, 0.5, 1.33609, 2.5}) EXPECT_NEAR(std_normal_cdf(y), oracle::normal_cdf(y), 1e-9);
  EXPECT_NEAR(std_normal_cdf(1.33609), 0.9092400709, 1e-9);
}

TEST(Zubkov, HandAnchors) {
  EXPECT_NEAR(zubkov_C(3, 4, 0.8), 0.40399714, 1e-7);
  EXPECT_NEAR(zubkov_C(4, 4, 0.8), 0.90924080, 1e-7);
  // Hand-rounded anchors.
  EXPECT_NEAR(zubkov_C(3, 4, 0.8), 0.40399, 2e-5);
  EXPECT_NEAR(zubkov_C(4, 4, 0.8), 0.90923, 2e-5);
  const double cdf = oracle::binom_cdf(3, 4, 0.8);
  EXPECT_NEAR(cdf, 0.5904, 1e-12);
  EXPECT_LE(zubkov_C(3, 4, 0.8), cdf);
  EXPECT_GE(zubkov_C(4, 4, 0.8), cdf);
}

TEST(Zubkov, MatchesOracle) {
  for (std::size_t n : {4u, 20u, 64u})
    for (std::size_t m = 0; m <= n; ++m)
      for (double p : {0.8, 0.95}) ASSERT_NEAR(zubkov_C(m, n, p), oracle::zubkov(m, n, p), 1e-8);
}

TEST(Bounds, SandwichExactPlr) {
  for (double d : {0.05, 0.2})
    for (std::size_t h : {1u, 2u, 5u})
      for (std::size_t n = 1; n <= 64; ++n)
        for (std::size_t k = 1; k <= n; ++k) {
          const LineNetwork net = LineNetwork::uniform(h, d);
          const BoundPair b = plr_rlnc_bounds(k, n, net);
          const double exact = plr_rlnc(k, n, net);
          ASSERT_LE(b.lower, exact + 1e-12) << d << " " << h << " " << n << " " << k;
          ASSERT_GE(b.upper, exact - 1e-12) << d << " " << h << " " << n << " " << k;
        }
}

TEST(Bounds, GaussianUpperIsMonotoneInRate) {
  for (double d : {0.05, 0.2})
    for (std::size_t h : {1u, 2u, 5u})
      for (std::size_t n : {8u, 64u, 512u}) {
        const LineNetwork net = LineNetwork::uniform(h, d);
        double prev = 0.0;
        for (int i = 1; i <= 1000; ++i) {
          const double v = plr_gaussian_upper(i / 1000.0, n, net);
          ASSERT_GE(v, prev) << d << " " << h << " " << n << " " << i;
          prev = v;
        }
      }
}

TEST(Bounds, GaussianUpperAtGridRatesEqualsUpperBound) {
  const LineNetwork net = LineNetwork::uniform(2, 0.05);
  for (std::size_t k = 1; k <= 20; ++k) EXPECT_NEAR(plr_gaussian_upper(k / 20.0, 20, net), plr_rlnc_bounds(k, 20, net).upper, 1e-12);
}
