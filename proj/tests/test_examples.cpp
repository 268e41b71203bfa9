#include <gtest/gtest.h>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <set>

#include "tracelab/generators.hpp"

using namespace tracelab;

namespace {

// Checks a run-length form against pointwise values at the midpoint of each
// index cell [k, k+1), i.e. s = log(k + 1/2).
void expect_runs_match_values(const LogRuns& runs, const RealSequence& seq, std::uint64_t count) {
  EXPECT_EQ(runs.head(), seq.value_at(0));
  std::size_t r = 0;
  for (std::uint64_t k = 1; k < count; ++k) {
    double s = std::log(static_cast<double>(k) + 0.5);
    while (r + 1 < runs.runs().size() && runs.runs()[r + 1].s_begin <= s) ++r;
    ASSERT_EQ(runs.runs()[r].value, seq.value_at(k)) << "k=" << k;
  }
}

}  // namespace

TEST(Harmonic, BlockSumsAgainstDigamma) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  for (std::size_t n : {0u, 3u, 9u, 10u, 17u, 30u, 45u, 59u, 60u, 200u}) {
    Big a = boost::multiprecision::ldexp(Big(1), static_cast<int>(n));
    Big exact = boost::math::digamma(2 * a) - boost::math::digamma(a);
    EXPECT_NEAR(harmonic_block_sum(n), exact.convert_to<double>(), 3e-16) << "n=" << n;
  }
}

TEST(Harmonic, BlockSumsMatchPointwise) {
  auto h = gen_harmonic();
  for (std::size_t n = 0; n <= 20; ++n) {
    double direct = pairwise_sum<double>(block_begin(n), block_end(n), [&](std::uint64_t k) { return h.value_at(k); });
    EXPECT_NEAR(h.block_sum_at(n), direct, 1e-14);
  }
}

TEST(Harmonic, BlockRunsReachLongHorizons) {
  auto r = gen_harmonic().block_runs(64.0);
  EXPECT_GE(r.s_end(), 64.0);
  EXPECT_EQ(r.runs().back().value, std::log(2.0));
}

TEST(AnExponents, MatchesBruteForceSet) {
  for (std::uint64_t n : {1u, 2u, 4u, 7u}) {
    std::set<std::uint64_t> E;
    for (std::uint64_t i = 0; n * (i + 2) * (i + 2) < 5000; ++i)
      for (std::uint64_t j = 0; j <= i; ++j) E.insert(j + n * (i + 2) * (i + 2));
    AnExponents ex(n);
    for (std::uint64_t m = 0; m < 4000; ++m) {
      EXPECT_EQ(ex.next(m), *E.lower_bound(m)) << "n=" << n << " m=" << m;
      EXPECT_EQ(ex.contains(m), E.count(m) == 1);
    }
  }
  EXPECT_THROW(AnExponents(0), precondition_error);
}

TEST(An, BlockSumsAndWeightedSupsMatchPointwise) {
  for (std::uint64_t n : {1u, 2u, 4u}) {
    auto mu = gen_an(n);
    for (std::size_t m = 0; m <= 22; ++m) {
      double direct = 0.0, wsup = 0.0;
      for (std::uint64_t k = block_begin(m); k < block_end(m); ++k) {
        double v = mu.value_at(k);
        direct += v;
        wsup = std::max(wsup, static_cast<double>(k + 1) * v);
      }
      EXPECT_NEAR(mu.block_sum_at(m), direct, 1e-15 * std::max(1.0, direct));
      EXPECT_DOUBLE_EQ(mu.block_weighted_sup(m), wsup);
    }
  }
}

TEST(An, WindowTotalsMatchDirectSums) {
  for (std::uint64_t n : {1u, 2u, 4u}) {
    auto mu = gen_an(n);
    for (std::uint64_t k = 1; k <= 30; ++k) {
      std::uint64_t M = n * (k + 2) * (k + 2);
      double s = 0.0;
      for (std::uint64_t m = M; m < M + k; ++m) s += mu.block_sum_at(m);
      EXPECT_NEAR(s, an_window_block_total(n, k), 1e-13);
    }
  }
}

TEST(An, NormsAndHorizon) {
  auto mu = gen_an(2, 5000);
  EXPECT_EQ(quasi_norm_l1inf(mu, 5000).value, 1.0);
  EXPECT_LE(norm_m1inf(mu, 5000).value, 1.0);
  EXPECT_THROW(mu.block_sum_at(5000), horizon_error);
  EXPECT_NEAR(mu.block_runs(1e9).s_end(), std::log(5000.0), 1e-9);
}

TEST(YDif1, ValuesAndRuns) {
  // y_k = 2 exactly on [2^n, 2^n + n], n >= 1.
  EXPECT_EQ(y_dif1_value(2), 2.0);
  EXPECT_EQ(y_dif1_value(3), 2.0);
  EXPECT_EQ(y_dif1_value(4), 2.0);
  EXPECT_EQ(y_dif1_value(6), 2.0);
  EXPECT_EQ(y_dif1_value(7), 1.0);
  EXPECT_EQ(y_dif1_value(1024 + 10), 2.0);
  EXPECT_EQ(y_dif1_value(1024 + 11), 1.0);
  auto y = gen_y_dif1();
  expect_runs_match_values(y.value_runs(std::log(70000.0)), y, 65536);
}

TEST(YDif2, ValuesAndRuns) {
  // y_k = 2 on (4^n, 2 * 4^n].
  EXPECT_EQ(y_dif2_value(4), 1.0);
  EXPECT_EQ(y_dif2_value(5), 2.0);
  EXPECT_EQ(y_dif2_value(8), 2.0);
  EXPECT_EQ(y_dif2_value(9), 1.0);
  EXPECT_EQ(y_dif2_value(17), 2.0);
  EXPECT_EQ(y_dif2_value(33), 1.0);
  auto y = gen_y_dif2();
  expect_runs_match_values(y.value_runs(std::log(70000.0)), y, 65536);
}

TEST(XAltDyadic, ValuesAndRuns) {
  EXPECT_EQ(x_alt_dyadic_value(0), 1.0);
  EXPECT_EQ(x_alt_dyadic_value(2), 1.0);
  EXPECT_EQ(x_alt_dyadic_value(3), -1.0);
  EXPECT_EQ(x_alt_dyadic_value(4), -1.0);
  EXPECT_EQ(x_alt_dyadic_value(5), 1.0);
  auto x = gen_x_alt_dyadic();
  expect_runs_match_values(x.value_runs(std::log(70000.0)), x, 65536);
}

TEST(DiagOfD, OrderingPrecondition) {
  RealSequence::Parts p;
  p.value = [](std::uint64_t k) { return k == 1 ? 3.0 : 1.0; };
  p.sup_bound = 3.0;
  EXPECT_THROW(gen_diag_of_D(RealSequence(std::move(p))), precondition_error);
  auto op = gen_diag_of_D(gen_x_alt_dyadic());
  EXPECT_EQ(op.kind, OperatorKind::self_adjoint);
  EXPECT_EQ(gen_diag_of_D(gen_y_dif1()).kind, OperatorKind::diagonal_positive);
}

TEST(Generators, BlockPointwiseConsistencyOfD) {
  for (const auto& y : {gen_y_dif1(), gen_y_dif2(), gen_x_alt_dyadic()}) {
    auto d = pietsch_D(y);
    for (std::size_t n = 0; n <= 18; ++n) {
      double direct = pairwise_sum<double>(block_begin(n), block_end(n), [&](std::uint64_t k) { return d.value_at(k); });
      EXPECT_NEAR(d.block_sum_at(n), direct, 1e-13);
    }
  }
}
