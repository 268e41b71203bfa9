#include <gtest/gtest.h>

#include <cmath>

#include "tracelab/generators.hpp"
#include "tracelab/measurability.hpp"

using namespace tracelab;

namespace {
constexpr std::size_t kBlocks = std::size_t{1} << 20;
using S = MeasurabilityStatus;
}  // namespace

TEST(Classify, HarmonicIsMeasurableEverywhere) {
  auto d = classify(gen_diag("harmonic", gen_harmonic()), kBlocks);
  for (const auto* v : {&d.pt, &d.dixmier, &d.connes_dixmier, &d.dm}) {
    EXPECT_EQ(v->status, S::measurable);
    EXPECT_NEAR(v->value->real(), 1.0, 0.01);
  }
  EXPECT_NEAR(d.trace_interval.inf_est, 1.0, 0.01);
  EXPECT_NEAR(d.trace_interval.sup_est, 1.0, 0.01);
  EXPECT_TRUE(d.tauberian.pass);
  EXPECT_EQ(d.dm_detail.method, "log-runs");
}

TEST(Classify, YDif1SeparatesPtFromDixmier) {
  auto d = classify(gen_diag_of_D(gen_y_dif1()), kBlocks);
  EXPECT_EQ(d.pt.status, S::not_measurable);
  EXPECT_EQ(d.dixmier.status, S::measurable);
  EXPECT_NEAR(d.dixmier.value->real(), 1.0, 0.02);
  EXPECT_EQ(d.connes_dixmier.status, S::measurable);
  EXPECT_NEAR(d.trace_interval.inf_est, 1.0, 0.05);
  EXPECT_NEAR(d.trace_interval.sup_est, 2.0, 0.05);
}

TEST(Classify, YDif2SeparatesDixmierFromDm) {
  auto d = classify(gen_diag_of_D(gen_y_dif2()), kBlocks);
  EXPECT_EQ(d.dixmier.status, S::not_measurable);
  EXPECT_EQ(d.connes_dixmier.status, S::not_measurable);
  EXPECT_EQ(d.dm.status, S::measurable);
  EXPECT_NEAR(d.dm.value->real(), 1.5, 0.03);
}

TEST(Classify, AlternatingDyadic) {
  auto d = classify(gen_diag_of_D(gen_x_alt_dyadic()), kBlocks);
  EXPECT_EQ(d.pt.status, S::not_measurable);
  EXPECT_EQ(d.dixmier.status, S::not_measurable);
  EXPECT_EQ(d.dm.status, S::measurable);
  EXPECT_NEAR(d.dm.value->real(), 0.0, 0.03);
  EXPECT_EQ(d.dixmier.status, d.connes_dixmier.status);
}

TEST(Classify, ComplexEigenvaluesGiveRectangle) {
  std::vector<std::complex<double>> v(std::size_t{1} << 12);
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = {1.0, -0.5};
  auto blocks = sequence_from_block_sums(ComplexTruncation(v));
  auto op = make_operator("complex", OperatorKind::general, blocks);
  auto d = classify(op, v.size());
  EXPECT_TRUE(d.is_complex);
  ASSERT_TRUE(d.trace_interval_im);
  EXPECT_NEAR(d.trace_interval_im->sup_est, -0.5 / std::log(2.0), 1e-12);
  EXPECT_EQ(d.dixmier.status, S::measurable);
  EXPECT_NEAR(d.dixmier.value->imag(), -0.5 / std::log(2.0), 1e-9);
  EXPECT_NE(std::find(d.flags.begin(), d.flags.end(), "complex eigenvalues: intervals form a rectangle"),
            d.flags.end());
}

TEST(Classify, HorizonErrors) {
  EXPECT_THROW(classify(gen_diag_of_D(gen_y_dif1()), 3), horizon_error);
  auto h = gen_diag("x", sequence_from_values(RealTruncation(std::vector<double>(100, 0.0))));
  EXPECT_THROW(classify(h, 20), horizon_error);
}

TEST(Classify, ShortHorizonFallsBackToDiscreteIterates) {
  auto d = classify(gen_diag("a-2", gen_an(2)), std::size_t{1} << 14);
  EXPECT_EQ(d.dm_detail.method, "discrete");
  EXPECT_LE(d.dm_detail.start_weight, 0.05);
}

TEST(Tauberian, SlopeIdentity) {
  std::vector<double> x(10000);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::sin(0.37 * static_cast<double>(k)) + 0.5;
  auto t = tauberian_check(RealTruncation(x));
  EXPECT_LE(t.identity_residual, 1e-12);
  EXPECT_DOUBLE_EQ(t.bound, -2.0 * *std::max_element(x.begin(), x.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  }));
  EXPECT_TRUE(t.pass);
}

TEST(TraceInterval, RealAndGeneralWarnings) {
  auto t = trace_interval(gen_diag_of_D(gen_y_dif1()), kBlocks);
  EXPECT_NEAR(t.re.inf_est, 1.0, 0.05);
  EXPECT_NEAR(t.re.sup_est, 2.0, 0.05);
  EXPECT_FALSE(t.im);
  auto g = make_operator("g", OperatorKind::general, sequence_from_block_sums(RealTruncation(std::vector<double>(64, 1.0))));
  EXPECT_EQ(trace_interval(g, 64).warnings.size(), 1u);
}

TEST(OperatorModel, RejectsIncreasingModulus) {
  EXPECT_THROW(make_operator("bad", OperatorKind::general, sequence_from_values(RealTruncation({1.0, 2.0}))),
               precondition_error);
  RealSequence::Parts p;
  p.value = [](std::uint64_t k) { return static_cast<double>(k); };
  p.sup_bound = 1.0;
  EXPECT_THROW(gen_diag("inc", RealSequence(std::move(p))), precondition_error);
}
