#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracelab/acceptance.hpp"
#include "tracelab/banach_bounds.hpp"
#include "tracelab/measurability.hpp"
#include "tracelab/residue.hpp"

namespace tracelab {

using Json = nlohmann::ordered_json;

inline constexpr std::size_t kPhiTailEntries = 16;

inline Json to_json(std::complex<double> v, bool complex_valued) {
  if (!complex_valued) return v.real();
  return Json{{"re", v.real()}, {"im", v.imag()}};
}

inline Json to_json(const BanachInterval& b) {
  Json j;
  j["inf"] = b.inf_est;
  j["sup"] = b.sup_est;
  j["reliability"] = to_string(b.reliability);
  j["k_ladder"] = b.k_ladder;
  j["inf_by_k"] = b.inf_by_k;
  j["sup_by_k"] = b.sup_by_k;
  j["m_min"] = b.m_min;
  j["m_horizon"] = b.m_horizon;
  return j;
}

inline Json to_json(const ConvergenceVerdict& v) {
  Json j;
  j["status"] = to_string(v.status);
  j["limit"] = v.limit_est ? Json(*v.limit_est) : Json(nullptr);
  j["osc_tail"] = v.osc_tail;
  j["tail_min"] = v.tail_min;
  j["tail_max"] = v.tail_max;
  j["tail_begin"] = v.tail_begin;
  return j;
}

inline Json to_json(const ClassVerdict& v, bool complex_valued) {
  Json j;
  j["status"] = to_string(v.status);
  j["value"] = v.value ? to_json(*v.value, complex_valued) : Json(nullptr);
  j["spread"] = v.spread;
  return j;
}

inline Json to_json(const IteratedGap& g) {
  Json rows = Json::array();
  for (const auto& r : g.rows) rows.push_back({{"m", r.m}, {"liminf", r.liminf}, {"limsup", r.limsup}, {"gap", r.gap()}});
  return {{"method", g.method},         {"m_used", g.m_used},
          {"start_weight", g.start_weight}, {"reliability", to_string(g.reliability)},
          {"value", g.value_est},       {"rows", rows}};
}

template <class T>
Json tail_values(const Truncation<T>& x, std::size_t count = kPhiTailEntries) {
  Json a = Json::array();
  std::size_t b = x.size() > count ? x.size() - count : 0;
  for (std::size_t i = b; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

inline Json to_json(const TraceDiagnostics& d) {
  Json j;
  j["label"] = d.label;
  j["n_blocks"] = d.n_blocks;
  j["phi_tail"] = tail_values(d.phi);
  Json ti = {{"inf", d.trace_interval.inf_est},
             {"sup", d.trace_interval.sup_est},
             {"reliability", to_string(d.trace_interval.reliability)}};
  j["trace_interval"] = ti;
  j["pt"] = to_json(d.pt, d.is_complex);
  j["dixmier"] = to_json(d.dixmier, d.is_complex);
  j["connes_dixmier"] = to_json(d.connes_dixmier, d.is_complex);
  j["dm"] = to_json(d.dm, d.is_complex);
  j["tauberian"] = {{"slope_min", d.tauberian.slope_min}, {"bound", d.tauberian.bound}, {"pass", d.tauberian.pass}};
  j["flags"] = d.flags;
  if (d.is_complex) {
    if (d.phi_im) j["phi_tail_im"] = tail_values(*d.phi_im);
    if (d.trace_interval_im)
      j["trace_interval_im"] = {{"inf", d.trace_interval_im->inf_est},
                                {"sup", d.trace_interval_im->sup_est},
                                {"reliability", to_string(d.trace_interval_im->reliability)}};
  }
  j["dm_detail"] = to_json(d.dm_detail);
  return j;
}

inline Json to_json(const AnchorWindow& w) {
  return {{"n", w.n}, {"z", w.z}, {"start", w.start}, {"length", w.length}, {"average", w.average}, {"error", w.error}};
}

inline Json to_json(const ResidueReport& r) {
  Json j;
  j["label"] = r.label;
  j["dim"] = r.dim;
  Json res = Json::array();
  for (std::size_t i = 0; i < r.res.n.size(); ++i) res.push_back({{"n", r.res.n[i]}, {"res", r.res.values[i]}});
  j["res_seq"] = res;
  j["res_scalar"] = to_json(r.res_scalar);
  j["wodzicki_residue"] = r.wodzicki_residue ? Json(*r.wodzicki_residue) : Json(nullptr);
  j["block_integrals"] = {{"count", r.blocks.values.size()},
                          {"tail", tail_values(r.blocks.values)},
                          {"max_error", r.blocks.max_error},
                          {"total_error", r.blocks.total_error},
                          {"clipping_constant", r.blocks.clipping_constant}};
  j["dixmier"] = to_json(r.dixmier);
  j["lorentz"] = {{"verdict", to_json(r.lorentz.verdict)}, {"interval", to_json(r.lorentz.interval)}};
  Json anchors_sup = Json::array(), anchors_inf = Json::array();
  for (const auto& w : r.trace.sup_anchors) anchors_sup.push_back(to_json(w));
  for (const auto& w : r.trace.inf_anchors) anchors_inf.push_back(to_json(w));
  j["trace_interval"] = {{"inf", r.trace.interval.inf_est},
                         {"sup", r.trace.interval.sup_est},
                         {"reliability", to_string(r.trace.interval.reliability)},
                         {"normalization", r.trace.normalization},
                         {"raw_inf", r.trace.raw_inf},
                         {"raw_sup", r.trace.raw_sup},
                         {"sup_anchors", anchors_sup},
                         {"inf_anchors", anchors_inf}};
  j["modulated_exponent"] = r.modulated.exponent;
  j["modulated"] = {{"pass", r.modulated.pass}, {"divergent", r.modulated.divergent}};
  j["quadrature_error_bound"] = r.quadrature_error_bound;
  j["flags"] = r.flags;
  return j;
}

inline Json to_json(const CriterionResult& r) {
  Json m = Json::object();
  for (const auto& [k, v] : r.measured) m[k] = v;
  return {{"id", r.id}, {"name", r.name}, {"tags", r.tags}, {"pass", r.pass}, {"measured", m}, {"detail", r.detail}};
}

inline Json to_json(const VerifyReport& rep) {
  Json a = Json::array();
  for (const auto& r : rep.results) a.push_back(to_json(r));
  return {{"seed", rep.seed}, {"pass", rep.all_pass()}, {"criteria", a}};
}

}  // namespace tracelab
