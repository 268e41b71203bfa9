#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "tracelab/quadrature.hpp"
#include "tracelab/residue.hpp"

using namespace tracelab;

TEST(Quadrature, PolynomialsAndOscillation) {
  auto r = adaptive_simpson([](double x) { return x * x * x; }, 0.0, 2.0, 1e-12);
  EXPECT_NEAR(r.value, 4.0, 1e-12);
  EXPECT_LE(r.error, 1e-12);
  auto f = [](double z) { return std::sin(z / std::log(z)); };
  double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 2.0, 60.0, 15, 1e-14);
  EXPECT_NEAR(integrate_panels(f, 2.0, 60.0, 1e-11).value, ref, 1e-10);
  EXPECT_NEAR(adaptive_simpson(f, 60.0, 2.0, 1e-11).value, -ref, 1e-10);
  EXPECT_THROW(adaptive_simpson(f, 0.0, 1.0, 0.0), precondition_error);
  EXPECT_THROW(adaptive_simpson([](double x) { return 1.0 / x; }, -1.0, 1.0, 1e-12, 20), convergence_error);
}

TEST(Symbols, SphereArea) {
  EXPECT_NEAR(sphere_area(1), 2.0, 1e-15);
  EXPECT_NEAR(sphere_area(2), 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 4.0 * std::numbers::pi, 1e-14);
  EXPECT_THROW(sphere_area(0), precondition_error);
}

TEST(Symbols, InversePowerBlocksAreExact) {
  for (int d : {1, 2, 4}) {
    auto b = block_integrals(inverse_power(d), 200);
    for (std::size_t n = 0; n < 200; ++n) EXPECT_NEAR(b.values[n], std::log(2.0) / d, 1e-12);
    EXPECT_LE(b.max_error, kDefaultQuadTolerance);
    EXPECT_EQ(b.clipping_constant, 0.0);
  }
}

TEST(Symbols, ClippingBelowUnitRadius) {
  auto b = block_integrals(inverse_power(1, std::nullopt, 0.5), 4);
  EXPECT_NEAR(b.clipping_constant, std::log(2.0), 1e-12);
}

TEST(ResSequence, InversePowerClosedForm) {
  auto sym = inverse_power(2);
  auto grid = geometric_grid(10.0, 1e6, 20);
  auto r = res_sequence(sym, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(r.values[i], std::log(grid[i]) / 2.0 / std::log(2.0 + grid[i]), 1e-12);
  EXPECT_THROW(res_sequence(sym, {5.0, 3.0}), precondition_error);
}

TEST(ResSequence, QExampleBoundedByLogLog) {
  auto sym = q_example(2);
  auto r = res_sequence(sym, geometric_grid(1e3, 1e6, 40));
  for (std::size_t i = 0; i < r.n.size(); ++i) {
    double n = r.n[i];
    EXPECT_LE(std::abs(r.values[i]), 6.0 * std::log(std::log(n)) / std::log(n));
  }
}

TEST(Anchors, SolveTheDefiningEquation) {
  for (int n : {2, 3, 4}) {
    double c = std::ldexp(std::numbers::pi, n * n) + 0.5 * std::numbers::pi;
    double z = anchor_z(n);
    EXPECT_NEAR(z / std::log(z), c, 1e-9 * c);
    EXPECT_GT(z, std::numbers::e);
  }
  EXPECT_THROW(anchor_z(1), precondition_error);
  EXPECT_THROW(anchor_z(40), precondition_error);
}

TEST(Anchors, WindowAverageNearLog2OverD) {
  for (int d : {1, 2}) {
    auto w = anchor_window(q_example(d), 4, 0.5 * std::numbers::pi);
    EXPECT_EQ(w.length, 4u);
    EXPECT_EQ(w.start, static_cast<std::uint64_t>(std::floor(w.z * d / std::log(2.0))));
    EXPECT_GT(w.average, std::log(2.0) / d - 0.1);
    auto lo = anchor_window(q_example(d), 4, 1.5 * std::numbers::pi);
    EXPECT_LT(lo.average, -std::log(2.0) / d + 0.1);
  }
}

TEST(Modulated, DetectsGrowthAndDivergence) {
  auto grid = default_modulated_grid();
  for (int d : {1, 2, 4}) {
    auto q = modulated_check(q_example(d), grid);
    EXPECT_TRUE(q.pass);
    EXPECT_FALSE(q.divergent);
    auto half = modulated_check(inverse_power(d, 0.5 * d), grid);
    EXPECT_TRUE(half.divergent);
    EXPECT_FALSE(half.pass);
  }
  // q = r^{-d}: F(t)^2 = ((1 + t)/t)^d W Vol / d exactly.
  auto sym = inverse_power(2);
  auto f = modulated_check(sym, {10.0, 100.0, 1000.0, 10000.0});
  EXPECT_NEAR(f.F[0], std::sqrt(1.21 * sym.radial_factor() / 2.0), 1e-9);
  EXPECT_NEAR(f.F[3], std::sqrt(1.0001 * 1.0001 * sym.radial_factor() / 2.0), 1e-9);
  EXPECT_THROW(modulated_check(sym, {10.0, 100.0}), precondition_error);
}

TEST(Ctt, NormalizationAndZeroSymbol) {
  EXPECT_NEAR(ctt_normalization(1), 1.0 / (2.0 * std::numbers::pi * std::log(2.0)), 1e-15);
  auto b = block_integrals(zero_symbol(3), 64);
  auto t = ctt_trace_interval(zero_symbol(3), b.values);
  EXPECT_EQ(t.interval.sup_est, 0.0);
  EXPECT_EQ(t.interval.inf_est, 0.0);
  CttOptions o;
  o.normalization = 2.0;
  auto p = ctt_trace_interval(inverse_power(1), block_integrals(inverse_power(1), 256).values, o);
  EXPECT_NEAR(p.interval.sup_est, 2.0 * std::log(2.0), 1e-12);
}

TEST(Report, QExampleResidueVanishes) {
  ResidueOptions o;
  o.anchors = {3};
  auto r = residue_report(q_example(2), o);
  EXPECT_EQ(r.res_scalar.status, ConvergenceStatus::convergent);
  EXPECT_NEAR(*r.res_scalar.limit_est, 0.0, 0.02);
  EXPECT_NEAR(*r.wodzicki_residue, 2.0 * *r.res_scalar.limit_est, 1e-15);
  EXPECT_EQ(r.lorentz.verdict.status, ConvergenceStatus::divergent);
  EXPECT_LE(r.quadrature_error_bound, 1e-9);
  EXPECT_TRUE(r.modulated.pass);
}

TEST(Report, InversePowerTraceFormula) {
  auto r = residue_report(inverse_power(2));
  EXPECT_NEAR(*r.res_scalar.limit_est, 0.5, 0.02);
  EXPECT_EQ(r.lorentz.verdict.status, ConvergenceStatus::convergent);
  EXPECT_NEAR(*r.lorentz.verdict.limit_est, std::log(2.0) * *r.res_scalar.limit_est, 0.02);
  EXPECT_TRUE(r.flags.empty());
}

TEST(Profile, CsvMatchesAnalyticSymbol) {
  std::string path = ::testing::TempDir() + "profile.csv";
  {
    std::ofstream f(path);
    f << "# r,q\n";
    for (int i = 0; i <= 4000; ++i) {
      double r = 1.0 + 0.01 * i;
      f << r << "," << 1.0 / r << "\n";
    }
  }
  auto sym = read_profile_csv(1, path);
  auto exact = inverse_power(1);
  for (std::uint64_t n = 0; n < 5; ++n)
    EXPECT_NEAR(block_integral(sym, n).value, block_integral(exact, n).value, 1e-4);
  EXPECT_THROW(read_profile_csv(1, "/nonexistent/profile.csv"), error);
  EXPECT_THROW(csv_profile(1, {2.0, 1.0}, {1.0, 1.0}), precondition_error);
  std::remove(path.c_str());
}
