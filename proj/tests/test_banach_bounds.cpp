#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>

#include "tracelab/banach_bounds.hpp"
#include "tracelab/generators.hpp"

using namespace tracelab;

TEST(TailBegin, DyadicConvention) {
  EXPECT_EQ(tail_begin(std::size_t{1} << 20, 0.25), (std::size_t{1} << 15) - 1);
  EXPECT_EQ(tail_begin(16, 0.25), 7u);
  EXPECT_EQ(tail_begin(1, 0.25), 0u);
}

TEST(Ladder, Geometric) {
  EXPECT_EQ(geometric_ladder(8, 16), (std::vector<std::size_t>{8, 16}));
  EXPECT_EQ(geometric_ladder(1, 10), (std::vector<std::size_t>{1, 2, 4, 8, 10}));
}

TEST(Sucheston, ConstantIsStablePoint) {
  auto b = sucheston_bounds(RealTruncation(std::vector<double>(1 << 12, 0.25)));
  EXPECT_DOUBLE_EQ(b.sup_est, 0.25);
  EXPECT_DOUBLE_EQ(b.inf_est, 0.25);
  EXPECT_EQ(b.reliability, Reliability::stable);
  EXPECT_TRUE(b.contains(0.25));
}

TEST(Sucheston, MatchesBruteForceWindowSweep) {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(3000);
  for (auto& v : x) v = u(g);
  SuchestonOptions opt;
  opt.k_min = 4;
  opt.k_max = 64;
  opt.m_min = 0;
  auto b = sucheston_bounds(RealTruncation(x), opt);
  for (std::size_t j = 0; j < b.k_ladder.size(); ++j) {
    std::size_t k = b.k_ladder[j];
    double hi = -1e300, lo = 1e300;
    for (std::size_t m = 0; m + k <= x.size(); ++m) {
      double s = 0.0;
      for (std::size_t i = m; i < m + k; ++i) s += x[i];
      hi = std::max(hi, s / static_cast<double>(k));
      lo = std::min(lo, s / static_cast<double>(k));
    }
    EXPECT_NEAR(b.sup_by_k[j], hi, 1e-12);
    EXPECT_NEAR(b.inf_by_k[j], lo, 1e-12);
  }
}

TEST(Sucheston, AlternatingDyadicSpansMinusOneToOne) {
  std::vector<double> x(std::size_t{1} << 20);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = x_alt_dyadic_value(k);
  auto b = sucheston_bounds(RealTruncation(x));
  EXPECT_NEAR(b.sup_est, 1.0, 0.02);
  EXPECT_NEAR(b.inf_est, -1.0, 0.02);
}

TEST(Sucheston, Preconditions) {
  RealTruncation x(std::vector<double>(40, 1.0));
  SuchestonOptions opt;
  EXPECT_THROW(sucheston_bounds(x, opt), precondition_error);
  opt.k_min = 2;
  opt.k_max = 8;
  opt.m_min = 30;
  EXPECT_EQ(sucheston_bounds(x, opt).reliability, Reliability::horizon_limited);
  opt.k_max = 0;
  EXPECT_THROW(sucheston_bounds(x, opt), precondition_error);
}

TEST(Lorentz, ConvergentAndDivergent) {
  std::vector<double> x(std::size_t{1} << 16);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = 2.0 + 1.0 / static_cast<double>(k + 1);
  auto r = lorentz_test(RealTruncation(x));
  EXPECT_EQ(r.verdict.status, ConvergenceStatus::convergent);
  EXPECT_NEAR(*r.verdict.limit_est, 2.0, 1e-3);

  for (std::size_t k = 0; k < x.size(); ++k) x[k] = y_dif2_value(k);
  EXPECT_EQ(lorentz_test(RealTruncation(x)).verdict.status, ConvergenceStatus::divergent);
}

TEST(Probe, ShortTailIsUndecided) {
  auto v = convergence_probe(RealTruncation({1.0, 1.0, 1.0, 1.0}));
  EXPECT_EQ(v.status, ConvergenceStatus::undecided);
  EXPECT_FALSE(v.limit_est);
}

TEST(Probe, OscillationDecides) {
  std::vector<double> x(4096);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = k % 2 == 0 ? 1.0 : 0.0;
  auto v = convergence_probe(RealTruncation(x));
  EXPECT_EQ(v.status, ConvergenceStatus::divergent);
  EXPECT_DOUBLE_EQ(v.osc_tail, 1.0);
  auto c = convergence_probe(RealTruncation(x), 0.25, 1.5);
  EXPECT_EQ(c.status, ConvergenceStatus::convergent);
  EXPECT_NEAR(*c.limit_est, 0.5, 1e-3);
}

TEST(GammaTail, AgreesWithRegularizedGamma) {
  for (int m = 1; m <= 12; ++m)
    for (double s : {0.5, 3.0, 10.0, 48.0})
      EXPECT_NEAR(gamma_tail(m, s), boost::math::gamma_q(static_cast<double>(m), s), 1e-13);
  EXPECT_EQ(gamma_tail(0, 1.0), 0.0);
}

TEST(IteratedGap, ConstantHasNoGap) {
  auto g = iterated_cesaro_gap(RealTruncation(std::vector<double>(1 << 14, 3.0)));
  EXPECT_EQ(g.method, "discrete");
  for (const auto& r : g.rows) EXPECT_NEAR(r.gap(), 0.0, 1e-12);
  EXPECT_NEAR(g.value_est, 3.0, 1e-12);
}

TEST(IteratedGap, StartWeightCapsIterates) {
  IteratedOptions io;
  io.cap_by_start_weight = true;
  auto g = iterated_cesaro_gap(RealTruncation(std::vector<double>(1 << 14, 1.0)), io);
  EXPECT_LT(g.m_used, 8);
  EXPECT_LE(g.start_weight, io.max_start_weight);
  io.m_max = 13;
  EXPECT_THROW(iterated_cesaro_gap(RealTruncation({1.0}), io), precondition_error);
}

TEST(IteratedGap, LogRunsOnYDif2) {
  auto runs = gen_y_dif2().value_runs(64.0);
  auto g = iterated_hardy_gap(runs);
  EXPECT_EQ(g.method, "log-runs");
  EXPECT_EQ(g.m_used, 8);
  EXPECT_EQ(g.reliability, Reliability::stable);
  EXPECT_NEAR(g.rows[1].liminf, 4.0 / 3.0, 0.01);
  EXPECT_NEAR(g.rows[1].limsup, 5.0 / 3.0, 0.01);
  EXPECT_LE(g.last().gap(), 1e-3);
  EXPECT_NEAR(g.value_est, 1.5, 1e-3);
  for (std::size_t m = 2; m < g.rows.size(); ++m) EXPECT_LE(g.rows[m].gap(), g.rows[m - 1].gap() + 1e-12);
}

TEST(Windows, AveragesMatchDirectSums) {
  std::vector<Window> w = {{0, 1}, {5, 10}, {1000000, 3}};
  auto a = window_averages([](std::uint64_t i) { return static_cast<double>(i); }, w);
  EXPECT_DOUBLE_EQ(a[0].average, 0.0);
  EXPECT_DOUBLE_EQ(a[1].average, 9.5);
  EXPECT_DOUBLE_EQ(a[2].average, 1000001.0);
  std::vector<Window> empty = {{0, 0}};
  EXPECT_THROW(window_averages([](std::uint64_t) { return 0.0; }, empty), precondition_error);
}
