#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wmsim/correlation.hpp"
#include "wmsim/error.hpp"
#include "wmsim/protocol.hpp"

using namespace wmsim;
using namespace wmsim::corr;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Joint, SumsToOneAndMarginalsHalf) {
  for (int N : {1, 2, 7, 40})
    for (double a : {0.0, 0.1 * pi, 0.18 * pi, pi / 2})
      for (double phi : {0.0, 0.3, pi / 3, 2.0}) {
        const auto j = joint_distribution(N, a, phi, 1.0);
        EXPECT_NEAR(j.p_pp + j.p_pm + j.p_mp + j.p_mm, 1.0, 1e-12);
        EXPECT_NEAR(j.p_pp + j.p_pm, 0.5, 1e-15);
        EXPECT_NEAR(j.p_pp + j.p_mp, 0.5, 1e-15);
        EXPECT_GE(std::min({j.p_pp, j.p_pm, j.p_mp, j.p_mm}), 0.0);
      }
}

TEST(Joint, FullStrengthFirstLag) {
  const auto j = joint_distribution(1, pi / 2, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(j.p_pp, 0.5);
  EXPECT_DOUBLE_EQ(j.p_pm, 0.0);
}

TEST(Joint, DecorrelatesAtLargeN) {
  const auto j = joint_distribution(5000, 0.3, 0.2, 1.0);
  EXPECT_NEAR(j.p_pp, 0.25, 1e-15);
  EXPECT_NEAR(j.p_pm, 0.25, 1e-15);
}

TEST(Joint, RejectsLagZero) { EXPECT_THROW(joint_distribution(0, 0.3, 0.2, 1.0), Error); }

TEST(Joint, InvalidDistributionRejected) {
  JointDistribution j{0.5, 0.5, 0.5, -0.5};
  EXPECT_THROW(j.validate(), Error);
}

TEST(CorrIx, EqualsBruteForceSumOverOutcomes) {
  for (int N = 1; N <= 30; ++N) {
    const auto j = joint_distribution(N, 0.2, 0.7, 0.5);
    const double ps[2][2] = {{j.p_pp, j.p_pm}, {j.p_mp, j.p_mm}};
    double s = 0;
    for (int m = 0; m < 2; ++m)
      for (int l = 0; l < 2; ++l) s += (m ? -0.5 : 0.5) * (l ? -0.5 : 0.5) * ps[m][l];
    EXPECT_NEAR(corr_Ix(N, 0.2, 0.7, 0.5), 4 * s, 1e-15);
    EXPECT_NEAR(corr_Ix(N, 0.2, 0.7, 0.5), x_N(N, 0.2, 0.7, 0.5), 1e-15);
  }
}

TEST(CorrIx, FirstLagAndUnitaryLimit) {
  EXPECT_NEAR(corr_Ix(1, 0.3, 2.0, 0.25), std::sin(0.3) * std::cos(0.5), 1e-15);
  for (int N = 1; N < 20; ++N) EXPECT_NEAR(corr_Ix_normalized(N, 0.0, 2.0, 0.25), std::cos(0.5 * N), 1e-15);
}

TEST(CorrSz, RatiosAndZeroStrength) {
  for (int N = 1; N <= 40; ++N) {
    const double a = 0.18 * pi, w = 0.471238898, tf = 1.0;
    EXPECT_NEAR(corr_Sz(N, a, w, tf), std::sin(a) * corr_Ix(N, a, w, tf), 1e-15);
    const double n = corr_Ix_normalized(N, a, w, tf);
    if (std::abs(n) > 1e-6) EXPECT_NEAR(corr_Sz(N, a, w, tf) / n, std::sin(a) * std::sin(a), 1e-12);
    EXPECT_EQ(corr_Sz(N, 0.0, w, tf), 0.0);
  }
}

TEST(Analytic, SeriesShape) {
  const auto s = analytic_series(SeriesKind::AnalyticSz, 12, 0.3, 1.0, 0.4);
  ASSERT_EQ(s.size(), 12u);
  EXPECT_EQ(s.lags.front(), 1);
  EXPECT_TRUE(s.errors.empty());
  EXPECT_EQ(s.find(5), 4);
  EXPECT_EQ(s.find(0), -1);
  EXPECT_THROW(analytic_series(SeriesKind::Empirical, 3, 0.3, 1.0, 0.4), Error);
}

TEST(Analytic, KindStringsRoundTrip) {
  for (auto k : {SeriesKind::AnalyticIx, SeriesKind::AnalyticSz, SeriesKind::Empirical})
    EXPECT_EQ(series_kind_from_string(to_string(k)), k);
  EXPECT_THROW(series_kind_from_string("nope"), Error);
}

TEST(Empirical, ConstantSeries) {
  const std::vector<double> s(101, 3.0);
  const auto c = empirical_corr(s, 50);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c.lags[i], static_cast<int>(i));
    EXPECT_DOUBLE_EQ(c.values[i], 9.0);
    EXPECT_EQ(c.errors[i], 0.0);
  }
}

TEST(Empirical, AlternatingSeries) {
  std::vector<double> s(200);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = i % 2 ? -1 : 1;
  const auto c = empirical_corr(s, 10);
  for (int n = 0; n <= 10; ++n) EXPECT_DOUBLE_EQ(c.values[n], n % 2 ? -1.0 : 1.0);
}

TEST(Empirical, DivisorIsKMinusN) {
  const std::vector<double> s{1, 2, 3, 4, 5};
  const auto c = empirical_corr(s, 2);
  EXPECT_DOUBLE_EQ(c.values[1], (2 + 6 + 12 + 20) / 4.0);
  EXPECT_DOUBLE_EQ(c.values[2], (3 + 8 + 15) / 3.0);
}

TEST(Empirical, TooShortRejected) {
  EXPECT_THROW(empirical_corr(std::vector<double>(10, 1.0), 5), Error);
  EXPECT_NO_THROW(empirical_corr(std::vector<double>(11, 1.0), 5));
}

TEST(Empirical, CoinFlipsAreUncorrelated) {
  std::mt19937_64 g(123);
  std::bernoulli_distribution b(0.5);
  std::vector<double> s(1000000);
  for (auto& v : s) v = b(g) ? 1 : -1;
  const auto c = empirical_corr(s, 20);
  for (int n = 1; n <= 20; ++n) EXPECT_LT(std::abs(c.values[n]), 3 / std::sqrt(1e6 - n));
}

TEST(Empirical, PooledRunsMatchConcatenatedProducts) {
  const std::vector<std::vector<double>> runs{{1, -1, 1, 1, -1}, {-1, -1, 1, -1, 1}};
  const auto c = empirical_corr(runs, 2);
  // lag 1: run 0 -> -1 -1 1 -1, run 1 -> 1 -1 -1 -1
  EXPECT_DOUBLE_EQ(c.values[1], -4.0 / 8.0);
}

TEST(Empirical, ConditionedOutcomesMatchCorrSz) {
  // Stationary stream: E[o_i o_{i+N}] = sin^2 a * (exact prepolarized x_N).
  const double a = 0.18 * pi, phi = 27 * pi / 180;
  std::vector<std::vector<double>> runs;
  protocol::ProtocolConfig cfg;
  cfg.alpha = a;
  cfg.omega = phi;
  cfg.t_f = 1;
  cfg.n_steps = 4000;
  for (int r = 0; r < 25; ++r) {
    Rng rng = make_rng(77, r);
    const auto t = protocol::sample_trajectory(cfg, rng, protocol::BackAction::Conditioned);
    runs.emplace_back(t.outcomes.begin(), t.outcomes.end());
  }
  const auto c = empirical_corr(runs, 10);
  // x before the N-th readout: N-1 averaged cycles from (1, 0), then one precession.
  protocol::BlochVector v{1, 0, 0};
  for (int n = 1; n <= 10; ++n) {
    const double xn = std::cos(phi) * v.x - std::sin(phi) * v.y;
    EXPECT_NEAR(c.values[n], std::sin(a) * std::sin(a) * xn, 4 * c.errors[n]) << n;
    v = protocol::recurrence_step(v, a, phi);
  }
}

TEST(Entropy, FixtureValue) {
  EXPECT_NEAR(relative_entropy({0.65, 0.35}, {0.5 * (1 + std::cos(0.4)), 0.5 * (1 - std::cos(0.4))}),
              0.5100080093762878, 1e-14);
}

TEST(Entropy, EqualIsZero) {
  EXPECT_EQ(relative_entropy({0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}), 0.0);
  EXPECT_EQ(relative_entropy({1.0, 0.0}, {1.0, 0.0}), 0.0);
}

TEST(Entropy, GibbsInequality) {
  std::mt19937_64 g(21);
  std::gamma_distribution<double> ga(1.0);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> P(4), Q(4);
    double sp = 0, sq = 0;
    for (int k = 0; k < 4; ++k) {
      sp += P[k] = ga(g);
      sq += Q[k] = ga(g);
    }
    for (int k = 0; k < 4; ++k) {
      P[k] /= sp;
      Q[k] /= sq;
    }
    EXPECT_GE(relative_entropy(P, Q), 0.0);
  }
}

TEST(Entropy, InputErrors) {
  EXPECT_THROW(relative_entropy({0.5, 0.5}, {1.0, 0.0}), Error);  // support
  EXPECT_THROW(relative_entropy({1.2, -0.2}, {0.5, 0.5}), Error);
  EXPECT_THROW(relative_entropy({0.5, 0.4}, {0.5, 0.5}), Error);
  EXPECT_THROW(relative_entropy({0.5, 0.5}, {1.0}), Error);
}

TEST(Entropy, SzIxBoundaryIsExactMatch) {
  // x_1 sin a = cos(w t_f) = 1: both distributions are (1, 0).
  EXPECT_EQ(entropy_Sz_Ix(1, pi / 2, 0.0, 1.0), 0.0);
}

TEST(Entropy, SzIxDecreasesTowardStrongFirstLag) {
  const double wt = 0.05;
  double prev = INFINITY;
  for (double a = 0.1; a <= pi / 2 + 1e-12; a += 0.1) {
    const double h = entropy_Sz_Ix(1, std::min(a, pi / 2), wt, 1.0);
    EXPECT_LT(h, prev);
    prev = h;
  }
  // and over N at fixed strong measurement
  prev = -1;
  for (int N = 1; N <= 5; ++N) {
    const double h = entropy_Sz_Ix(N, 1.4, wt, 1.0);
    EXPECT_GT(h, prev);
    prev = h;
  }
}
