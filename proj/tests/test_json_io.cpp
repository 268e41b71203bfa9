#include <gtest/gtest.h>

#include "tracelab/generators.hpp"
#include "tracelab/json_io.hpp"

using namespace tracelab;

TEST(Json, TraceDiagnosticsSchema) {
  auto d = classify(gen_diag_of_D(gen_y_dif1()), std::size_t{1} << 16);
  auto j = to_json(d);
  for (const char* k : {"label", "n_blocks", "phi_tail", "trace_interval", "pt", "dixmier", "connes_dixmier", "dm",
                        "tauberian", "flags"})
    EXPECT_TRUE(j.contains(k)) << k;
  for (const char* k : {"inf", "sup", "reliability"}) EXPECT_TRUE(j["trace_interval"].contains(k));
  for (const char* k : {"status", "value"}) EXPECT_TRUE(j["dixmier"].contains(k));
  for (const char* k : {"slope_min", "bound", "pass"}) EXPECT_TRUE(j["tauberian"].contains(k));
  EXPECT_EQ(j["pt"]["status"], "not-measurable");
  EXPECT_TRUE(j["dixmier"]["value"].is_number());
  EXPECT_EQ(j["phi_tail"].size(), kPhiTailEntries);
  EXPECT_EQ(j.dump(), to_json(classify(gen_diag_of_D(gen_y_dif1()), std::size_t{1} << 16)).dump());
}

TEST(Json, ComplexValuesAreObjects) {
  std::vector<std::complex<double>> v(256, {1.0, 2.0});
  auto op = make_operator("c", OperatorKind::general, sequence_from_block_sums(ComplexTruncation(v)));
  auto j = to_json(classify(op, v.size()));
  EXPECT_TRUE(j["dixmier"]["value"].contains("re"));
  EXPECT_TRUE(j["dixmier"]["value"].contains("im"));
  EXPECT_TRUE(j.contains("trace_interval_im"));
}

TEST(Json, ResidueAndVerifyReports) {
  ResidueOptions o;
  o.n_blocks = 1024;
  auto r = to_json(residue_report(inverse_power(1), o));
  for (const char* k : {"res_seq", "res_scalar", "block_integrals", "trace_interval", "modulated_exponent",
                        "quadrature_error_bound"})
    EXPECT_TRUE(r.contains(k)) << k;
  VerifyOptions vo;
  vo.only = {"2"};
  auto rep = to_json(run_acceptance(vo));
  EXPECT_EQ(rep["criteria"].size(), 1u);
  EXPECT_EQ(rep["criteria"][0]["pass"], true);
}
