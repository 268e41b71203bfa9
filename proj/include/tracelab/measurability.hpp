#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tracelab/banach_bounds.hpp"
#include "tracelab/common.hpp"
#include "tracelab/operator_model.hpp"
#include "tracelab/seq_core.hpp"
#include "tracelab/transforms.hpp"

namespace tracelab {

enum class MeasurabilityStatus { measurable, not_measurable, undecided };

inline const char* to_string(MeasurabilityStatus s) {
  switch (s) {
    case MeasurabilityStatus::measurable: return "measurable";
    case MeasurabilityStatus::not_measurable: return "not-measurable";
    case MeasurabilityStatus::undecided: return "undecided";
  }
  return "?";
}

struct ClassVerdict {
  MeasurabilityStatus status = MeasurabilityStatus::undecided;
  // Trace value when measurable; otherwise the best available estimate.
  std::optional<std::complex<double>> value;
  // Spread of the underlying estimator (gap or tail oscillation).
  double spread = 0.0;
};

struct TauberianResult {
  double slope_min = 0.0;
  double bound = 0.0;
  bool pass = true;
  // max_n |n((Cx)_n - (Cx)_{n-1}) - (x_n - (Cx)_n)|
  double identity_residual = 0.0;
};

struct TraceDiagnostics {
  std::string label;
  std::size_t n_blocks = 0;
  bool is_complex = false;
  RealTruncation phi{std::vector<double>{0.0}};
  std::optional<RealTruncation> phi_im;
  BanachInterval trace_interval;
  std::optional<BanachInterval> trace_interval_im;
  ClassVerdict pt;
  ClassVerdict dixmier;
  ClassVerdict connes_dixmier;
  ClassVerdict dm;
  IteratedGap dm_detail;
  TauberianResult tauberian;
  std::vector<std::string> flags;
};

struct ClassifyOptions {
  SuchestonOptions sucheston;
  double tolerance = kDefaultTolerance;
  double tail_fraction = kDefaultTailFraction;
  IteratedOptions iterated;
  // gap(m_max) threshold for the iterated-Cesaro criterion
  double dm_gap_tolerance = 0.1;
  // Use the run-length Phi form when the model supplies one.
  bool prefer_runs = true;
};

// slope_n = n((Cx)_n - (Cx)_{n-1}) = x_n - (Cx)_n, bounded below by -2||x||.
inline TauberianResult tauberian_check(const RealTruncation& x) {
  TauberianResult r;
  long double sum = 0.0L, prev_c = 0.0L, sup = 0.0L, residual = 0.0L;
  long double slope_min = 0.0L;
  for (std::size_t n = 0; n < x.size(); ++n) {
    long double xn = x[n];
    sup = std::max(sup, std::abs(xn));
    sum += xn;
    long double c = sum / static_cast<long double>(n + 1);
    if (n > 0) {
      long double slope = static_cast<long double>(n) * (c - prev_c);
      long double rhs = xn - c;
      residual = std::max(residual, std::abs(slope - rhs));
      slope_min = n == 1 ? slope : std::min(slope_min, slope);
    }
    prev_c = c;
  }
  r.slope_min = static_cast<double>(slope_min);
  r.bound = -2.0 * static_cast<double>(sup);
  r.pass = r.slope_min >= r.bound - 1e-9;
  r.identity_residual = static_cast<double>(residual);
  return r;
}

namespace detail {

struct PartResult {
  LorentzResult lorentz;
  ConvergenceVerdict dixmier;
  ConvergenceVerdict connes_dixmier;
  IteratedGap dm;
};

inline MeasurabilityStatus from_convergence(ConvergenceStatus s) {
  switch (s) {
    case ConvergenceStatus::convergent: return MeasurabilityStatus::measurable;
    case ConvergenceStatus::divergent: return MeasurabilityStatus::not_measurable;
    default: return MeasurabilityStatus::undecided;
  }
}

struct RealVerdict {
  MeasurabilityStatus status = MeasurabilityStatus::undecided;
  double value = 0.0;
  double spread = 0.0;
};

inline RealVerdict verdict_of(const ConvergenceVerdict& v, double fallback) {
  return {from_convergence(v.status), v.limit_est.value_or(fallback), v.osc_tail};
}

// gap(m_max) <= tol with gaps nonincreasing over the last three m.
inline RealVerdict dm_verdict(const IteratedGap& g, double gap_tol) {
  RealVerdict v;
  v.value = g.value_est;
  v.spread = g.last().gap();
  const auto& r = g.rows;
  bool monotone = r.size() >= 3;
  constexpr double kSlack = 1e-6;
  for (std::size_t i = r.size() >= 3 ? r.size() - 2 : 1; i < r.size() && monotone; ++i)
    monotone = r[i].gap() <= r[i - 1].gap() + kSlack;
  if (g.reliability != Reliability::stable) {
    v.status = MeasurabilityStatus::undecided;
  } else if (v.spread <= gap_tol && monotone) {
    v.status = MeasurabilityStatus::measurable;
  } else if (v.spread > gap_tol && !monotone) {
    v.status = MeasurabilityStatus::not_measurable;
  } else {
    v.status = MeasurabilityStatus::undecided;
  }
  return v;
}

inline PartResult classify_part(const RealTruncation& phi, const std::optional<LogRuns>& runs,
                                const ClassifyOptions& opt) {
  PartResult r;
  SuchestonOptions so = opt.sucheston;
  so.tolerance = opt.tolerance;
  so.tail_fraction = opt.tail_fraction;
  so.k_max = std::min(so.k_max, phi.size() / 4);
  so.k_min = std::min(so.k_min, so.k_max);
  if (so.k_max == 0) throw horizon_error("classify: too few blocks for any window");
  r.lorentz = lorentz_test(phi, so);
  auto c1 = cesaro(phi);
  r.dixmier = convergence_probe(c1, opt.tail_fraction, opt.tolerance);
  r.connes_dixmier = convergence_probe(cesaro(c1), opt.tail_fraction, opt.tolerance);
  IteratedOptions io = opt.iterated;
  io.tail_fraction = opt.tail_fraction;
  if (runs && runs->s_end() >= io.s_stop * (1.0 - 1e-12)) {
    r.dm = iterated_hardy_gap(*runs, io);
  } else {
    io.cap_by_start_weight = true;
    r.dm = iterated_cesaro_gap(phi, io);
  }
  return r;
}

inline ClassVerdict combine(const RealVerdict& re, const std::optional<RealVerdict>& im) {
  ClassVerdict out;
  if (!im) {
    out.status = re.status;
    out.value = std::complex<double>(re.value, 0.0);
    out.spread = re.spread;
    return out;
  }
  if (re.status == MeasurabilityStatus::not_measurable || im->status == MeasurabilityStatus::not_measurable)
    out.status = MeasurabilityStatus::not_measurable;
  else if (re.status == MeasurabilityStatus::measurable && im->status == MeasurabilityStatus::measurable)
    out.status = MeasurabilityStatus::measurable;
  else
    out.status = MeasurabilityStatus::undecided;
  out.value = std::complex<double>(re.value, im->value);
  out.spread = std::max(re.spread, im->spread);
  return out;
}

inline int chain_rank(MeasurabilityStatus s) {
  return s == MeasurabilityStatus::measurable ? 1 : s == MeasurabilityStatus::not_measurable ? -1 : 0;
}

}  // namespace detail

inline std::pair<RealTruncation, std::optional<RealTruncation>> phi_parts(const OperatorModel& op,
                                                                           std::size_t n_blocks) {
  if (const auto* rs = std::get_if<RealSequence>(&op.eigen_seq)) return {block_sums_phi(*rs, n_blocks), std::nullopt};
  auto c = block_sums_phi(std::get<ComplexSequence>(op.eigen_seq), n_blocks);
  std::vector<double> re(c.size()), im(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    re[i] = c[i].real();
    im[i] = c[i].imag();
  }
  return {RealTruncation(std::move(re)), RealTruncation(std::move(im))};
}

inline std::optional<LogRuns> phi_runs_of(const OperatorModel& op, double s_stop) {
  const auto* rs = std::get_if<RealSequence>(&op.eigen_seq);
  if (!rs || !rs->has_block_runs()) return std::nullopt;
  return phi_runs(*rs, s_stop);
}

inline TraceDiagnostics classify(const OperatorModel& op, std::size_t n_blocks, const ClassifyOptions& opt = {}) {
  TraceDiagnostics d;
  d.label = op.label;
  d.n_blocks = n_blocks;
  d.is_complex = op.is_complex();
  auto [phi, phi_im] = phi_parts(op, n_blocks);
  std::optional<LogRuns> runs;
  if (opt.prefer_runs) runs = phi_runs_of(op, opt.iterated.s_stop);

  detail::PartResult re = detail::classify_part(phi, runs, opt);
  std::optional<detail::PartResult> im;
  if (phi_im) im = detail::classify_part(*phi_im, std::nullopt, opt);

  auto pick = [&](auto&& fn) -> std::pair<detail::RealVerdict, std::optional<detail::RealVerdict>> {
    std::optional<detail::RealVerdict> b;
    if (im) b = fn(*im);
    return {fn(re), b};
  };
  auto lorentz = [](const detail::PartResult& p) {
    return detail::RealVerdict{detail::from_convergence(p.lorentz.verdict.status), p.lorentz.interval.midpoint(),
                               p.lorentz.interval.gap()};
  };
  auto [pt_re, pt_im] = pick(lorentz);
  d.pt = detail::combine(pt_re, pt_im);
  auto [dx_re, dx_im] = pick([](const detail::PartResult& p) {
    return detail::verdict_of(p.dixmier, 0.5 * (p.dixmier.tail_min + p.dixmier.tail_max));
  });
  d.dixmier = detail::combine(dx_re, dx_im);
  auto [cd_re, cd_im] = pick([](const detail::PartResult& p) {
    return detail::verdict_of(p.connes_dixmier, 0.5 * (p.connes_dixmier.tail_min + p.connes_dixmier.tail_max));
  });
  d.connes_dixmier = detail::combine(cd_re, cd_im);
  double gap_tol = opt.dm_gap_tolerance;
  auto [dm_re, dm_im] = pick([gap_tol](const detail::PartResult& p) { return detail::dm_verdict(p.dm, gap_tol); });
  d.dm = detail::combine(dm_re, dm_im);
  d.dm_detail = re.dm;

  d.trace_interval = re.lorentz.interval;
  if (im) d.trace_interval_im = im->lorentz.interval;
  d.tauberian = tauberian_check(phi);
  if (phi_im) {
    auto t = tauberian_check(*phi_im);
    d.tauberian.slope_min = std::min(d.tauberian.slope_min, t.slope_min);
    d.tauberian.bound = std::min(d.tauberian.bound, t.bound);
    d.tauberian.pass = d.tauberian.pass && t.pass;
    d.tauberian.identity_residual = std::max(d.tauberian.identity_residual, t.identity_residual);
  }
  d.phi = std::move(phi);
  d.phi_im = std::move(phi_im);

  // Inclusion chain PT => D = C => D_M; an undecided lower class never counts
  // as a violation.
  const std::pair<const char*, const ClassVerdict*> chain[] = {
      {"pt", &d.pt}, {"dixmier", &d.dixmier}, {"connes_dixmier", &d.connes_dixmier}, {"dm", &d.dm}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      if (chain[i].second->status == MeasurabilityStatus::measurable &&
          chain[j].second->status == MeasurabilityStatus::not_measurable)
        d.flags.push_back(std::string("chain-violation: ") + chain[i].first + " measurable but " + chain[j].first +
                          " not-measurable");
  if (d.dixmier.status != MeasurabilityStatus::undecided && d.connes_dixmier.status != MeasurabilityStatus::undecided &&
      d.dixmier.status != d.connes_dixmier.status)
    d.flags.push_back("dixmier/connes-dixmier verdicts disagree");
  if (d.dixmier.status == MeasurabilityStatus::measurable &&
      d.connes_dixmier.status == MeasurabilityStatus::measurable &&
      std::abs(*d.dixmier.value - *d.connes_dixmier.value) > 2.0 * opt.tolerance)
    d.flags.push_back("dixmier/connes-dixmier limits differ");
  if (d.pt.status == MeasurabilityStatus::measurable && d.dixmier.status == MeasurabilityStatus::measurable &&
      std::abs(*d.pt.value - *d.dixmier.value) > 2.0 * opt.tolerance)
    d.flags.push_back("pt/dixmier values differ");
  if (!d.tauberian.pass) d.flags.push_back("tauberian slope below bound");
  if (d.trace_interval.reliability != Reliability::stable)
    d.flags.push_back(std::string("trace interval ") + to_string(d.trace_interval.reliability));
  if (d.dm_detail.method == "discrete") d.flags.push_back("dm from discrete iterates (m capped at " +
                                                           std::to_string(d.dm_detail.m_used) + ")");
  if (d.is_complex) d.flags.push_back("complex eigenvalues: intervals form a rectangle");
  return d;
}

struct TraceInterval {
  BanachInterval re;
  std::optional<BanachInterval> im;
  std::vector<std::string> warnings;
};

inline TraceInterval trace_interval(const OperatorModel& op, std::size_t n_blocks, const SuchestonOptions& opt = {}) {
  TraceInterval out;
  auto [phi, phi_im] = phi_parts(op, n_blocks);
  SuchestonOptions so = opt;
  so.k_max = std::min(so.k_max, phi.size() / 4);
  so.k_min = std::min(so.k_min, so.k_max);
  if (so.k_max == 0) throw horizon_error("trace_interval: too few blocks for any window");
  out.re = sucheston_bounds(phi, so);
  if (phi_im) {
    out.im = sucheston_bounds(*phi_im, so);
    out.warnings.push_back("complex eigenvalues: real and imaginary intervals form a rectangle");
  }
  if (op.kind == OperatorKind::general && !phi_im)
    out.warnings.push_back("general operator: interval computed from eigenvalues only");
  return out;
}

}  // namespace tracelab
