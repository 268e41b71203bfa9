#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tracelab/banach_bounds.hpp"
#include "tracelab/common.hpp"
#include "tracelab/quadrature.hpp"
#include "tracelab/seq_core.hpp"
#include "tracelab/transforms.hpp"

namespace tracelab {

inline constexpr double kDefaultQuadTolerance = 1e-9;

// Vol(S^{d-1}) = 2 pi^{d/2} / Gamma(d/2)
inline double sphere_area(int d) {
  if (d < 1) throw precondition_error("sphere_area: dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// Radial symbol p(x, s) = w(x) q(|s|) reduced to one dimension. It is stored
// through g(z) = r^d q(r) at r = e^z, so that q(r) r^{d-1} dr = g(z) dz.
struct RadialSymbol {
  int dim = 1;
  std::function<double(double)> log_density;
  double r_min = 1.0;
  // W = int |phi(x)|^2 dx
  double x_weight = 1.0;
  std::string label;

  double surface() const { return sphere_area(dim); }
  double radial_factor() const { return x_weight * surface(); }
  double z_min() const { return std::log(r_min); }
  double q(double r) const { return r < r_min ? 0.0 : log_density(std::log(r)) / std::pow(r, dim); }
};

namespace detail {
inline void check_dim(int d) {
  if (d < 1) throw precondition_error("symbol dimension must be at least 1");
}
}  // namespace detail

// q(r) = r^{-d} sin(log r / log log r) on r >= 4, with W = 1/Vol(S^{d-1}).
inline RadialSymbol q_example(int d) {
  detail::check_dim(d);
  return {d, [](double z) { return std::sin(z / std::log(z)); }, 4.0, 1.0 / sphere_area(d), "q-example"};
}

// q(r) = r^{-p} on r >= r_min.
inline RadialSymbol inverse_power(int d, std::optional<double> p = std::nullopt, double r_min = 1.0,
                                  std::optional<double> weight = std::nullopt) {
  detail::check_dim(d);
  if (!(r_min > 0.0)) throw precondition_error("inverse_power: r_min must be positive");
  double e = static_cast<double>(d) - p.value_or(static_cast<double>(d));
  return {d, [e](double z) { return e == 0.0 ? 1.0 : std::exp(e * z); }, r_min, weight.value_or(1.0 / sphere_area(d)),
          "inverse-power"};
}

inline RadialSymbol zero_symbol(int d) {
  detail::check_dim(d);
  return {d, [](double) { return 0.0; }, 1.0, 1.0 / sphere_area(d), "zero"};
}

// Profile q given at increasing radii, linearly interpolated, zero beyond the
// last radius.
inline RadialSymbol csv_profile(int d, std::vector<double> r, std::vector<double> q,
                                std::optional<double> weight = std::nullopt) {
  detail::check_dim(d);
  if (r.size() < 2 || r.size() != q.size()) throw precondition_error("csv_profile: need at least two (r, q) rows");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0) || (i > 0 && !(r[i] > r[i - 1])))
      throw precondition_error("csv_profile: radii must be positive and increasing");
    if (!std::isfinite(q[i])) throw precondition_error("csv_profile: non-finite q");
  }
  double r0 = r.front();
  auto rr = std::make_shared<const std::vector<double>>(std::move(r));
  auto qq = std::make_shared<const std::vector<double>>(std::move(q));
  auto g = [rr, qq, d](double z) {
    double x = std::exp(z);
    const auto& R = *rr;
    if (x < R.front() || x > R.back()) return 0.0;
    auto it = std::upper_bound(R.begin(), R.end(), x);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - R.begin()), R.size() - 1);
    std::size_t j = i - 1;
    double t = (x - R[j]) / (R[i] - R[j]);
    double qv = (*qq)[j] + t * ((*qq)[i] - (*qq)[j]);
    return qv * std::pow(x, d);
  };
  return {d, g, r0, weight.value_or(1.0 / sphere_area(d)), "csv-profile"};
}

inline RadialSymbol read_profile_csv(int d, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw error("cannot open '" + path + "'");
  std::vector<double> r, q;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw precondition_error("profile csv line " + std::to_string(lineno) + ": expected r,q");
    try {
      r.push_back(std::stod(line.substr(0, comma)));
      q.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw precondition_error("profile csv line " + std::to_string(lineno) + ": bad number");
    }
  }
  return csv_profile(d, std::move(r), std::move(q));
}

// W Vol int_{z0}^{z1} g(z) dz, clipped below at log r_min.
inline QuadResult radial_integral(const RadialSymbol& sym, double z0, double z1, double tol = kDefaultQuadTolerance) {
  z0 = std::max(z0, sym.z_min());
  if (!(z1 > z0)) return {};
  double c = sym.radial_factor();
  auto r = integrate_panels(sym.log_density, z0, z1, tol / std::max(c, 1e-300));
  r.value *= c;
  r.error *= c;
  return r;
}

// z-range of block n: 2^{n/d} < |s| <= 2^{(n+1)/d}
inline std::pair<double, double> block_z_range(int d, std::uint64_t n) {
  double w = kLog2 / d;
  return {static_cast<double>(n) * w, static_cast<double>(n + 1) * w};
}

inline QuadResult block_integral(const RadialSymbol& sym, std::uint64_t n, double tol = kDefaultQuadTolerance) {
  auto [a, b] = block_z_range(sym.dim, n);
  return radial_integral(sym, a, b, tol);
}

struct BlockIntegrals {
  RealTruncation values{std::vector<double>{0.0}};
  std::vector<double> errors;
  double max_error = 0.0;
  double total_error = 0.0;
  // Symbol mass below r = 1 that no block covers.
  double clipping_constant = 0.0;
};

inline BlockIntegrals block_integrals(const RadialSymbol& sym, std::size_t n_blocks,
                                      double tol = kDefaultQuadTolerance) {
  if (n_blocks == 0) throw precondition_error("block_integrals: n_blocks must be positive");
  std::vector<double> v(n_blocks), e(n_blocks);
  parallel_for(n_blocks, [&](std::size_t n) {
    auto r = block_integral(sym, n, tol);
    v[n] = r.value;
    e[n] = r.error;
  });
  BlockIntegrals out;
  out.values = RealTruncation(std::move(v));
  for (double x : e) {
    out.max_error = std::max(out.max_error, x);
    out.total_error += x;
  }
  out.errors = std::move(e);
  if (sym.r_min < 1.0) out.clipping_constant = std::abs(radial_integral(sym, sym.z_min(), 0.0, tol).value);
  return out;
}

struct ResSequence {
  std::vector<double> n;
  RealTruncation values{std::vector<double>{0.0}};
  double error_bound = 0.0;
};

// Res_n = (1/log(2+n)) W Vol int_{log r_min}^{(1/d) log n} g(z) dz on an
// increasing grid of n, integrating consecutive increments.
inline ResSequence res_sequence(const RadialSymbol& sym, const std::vector<double>& n_grid,
                                double tol = kDefaultQuadTolerance) {
  if (n_grid.empty()) throw precondition_error("res_sequence: empty grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    if (!(n_grid[i] >= 1.0) || (i > 0 && !(n_grid[i] > n_grid[i - 1])))
      throw precondition_error("res_sequence: grid must be increasing and >= 1");
  ResSequence out;
  out.n = n_grid;
  std::vector<double> v(n_grid.size());
  double z_prev = sym.z_min();
  CompensatedSum acc;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    double z = std::log(n_grid[i]) / sym.dim;
    if (z > z_prev) {
      auto r = radial_integral(sym, z_prev, z, tol);
      acc.add(r.value);
      out.error_bound += r.error;
      z_prev = z;
    }
    v[i] = acc.value() / std::log(2.0 + n_grid[i]);
  }
  out.values = RealTruncation(std::move(v));
  return out;
}

inline std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw precondition_error("geometric_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> g(count);
  double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = std::round(lo * std::exp(step * static_cast<double>(i)));
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

// t from 10 to 1e60: long enough in log t for slowly oscillating profiles to
// show a saturated envelope.
inline std::vector<double> default_modulated_grid() {
  std::vector<double> g(64);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(10.0, 1.0 + 59.0 * static_cast<double>(i) / 63.0);
  return g;
}

struct ModulatedResult {
  std::vector<double> t;
  std::vector<double> F;
  double exponent = 0.0;
  bool pass = true;
  bool divergent = false;
};

// F(t) = (1+t)^{d/2} (W Vol int_{log t}^inf g^2 e^{-dz} dz)^{1/2}; the
// exponent is the least-squares slope of log(running max of F) against
// log t over the second half of the grid.
inline ModulatedResult modulated_check(const RadialSymbol& sym, const std::vector<double>& t_grid,
                                       double tol = kDefaultQuadTolerance) {
  if (t_grid.size() < 4) throw precondition_error("modulated_check: need at least 4 grid points");
  ModulatedResult out;
  out.t = t_grid;
  out.F.resize(t_grid.size());
  int d = sym.dim;
  constexpr double kCap = 745.0;
  parallel_for(t_grid.size(), [&](std::size_t i) {
    double t = t_grid[i];
    if (!(t > 0.0)) throw precondition_error("modulated_check: t must be positive");
    // t^d int_{log t}^inf g^2 e^{-dz} dz = int_0^inf g(log t + u)^2 e^{-du} du
    double z0 = std::max(std::log(t), sym.z_min());
    double shift = std::log(t);
    auto h = [&](double u) {
      double g = sym.log_density(z0 + u);
      return g * g * std::exp(-d * (z0 + u - shift));
    };
    CompensatedSum acc;
    int quiet = 0;
    bool converged = false;
    for (double u = 0.0; u < kCap; u += 1.0) {
      double chunk;
      try {
        chunk = adaptive_simpson(h, u, u + 1.0, tol * 1e-3 * std::max(1.0, std::abs(acc.value()))).value;
      } catch (const convergence_error&) {
        break;
      }
      if (!std::isfinite(chunk)) break;
      acc.add(chunk);
      if (std::abs(chunk) <= 1e-16 * std::abs(acc.value())) {
        if (++quiet >= 3) {
          converged = true;
          break;
        }
      } else {
        quiet = 0;
      }
    }
    if (!converged) {
      out.F[i] = std::numeric_limits<double>::infinity();
      return;
    }
    double scaled_tail = sym.radial_factor() * std::max(acc.value(), 0.0);
    out.F[i] = std::pow(1.0 + 1.0 / t, 0.5 * d) * std::sqrt(scaled_tail);
  });
  for (double f : out.F)
    if (!std::isfinite(f)) out.divergent = true;
  if (out.divergent) {
    out.exponent = std::numeric_limits<double>::infinity();
    out.pass = false;
    return out;
  }
  std::vector<double> env(out.F.size());
  double run = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) env[i] = run = std::max(run, out.F[i]);
  if (run == 0.0) {
    out.exponent = 0.0;
    out.pass = true;
    return out;
  }
  std::size_t start = env.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (std::size_t i = start; i < env.size(); ++i) {
    if (env[i] <= 0.0) continue;
    double x = std::log(out.t[i]), y = std::log(env[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    cnt += 1;
  }
  double den = cnt * sxx - sx * sx;
  out.exponent = (cnt >= 2 && den > 0) ? (cnt * sxy - sx * sy) / den : 0.0;
  out.pass = out.exponent <= 0.05;
  return out;
}

// Solves z / log z = 2^{n^2} pi + phase by safeguarded Newton from z = c log c.
inline double anchor_z(int n, double phase = 0.5 * std::numbers::pi) {
  if (n < 2) throw precondition_error("anchor_z: n must be at least 2");
  if (n * n > 1000) throw precondition_error("anchor_z: 2^{n^2} overflows");
  double c = std::ldexp(std::numbers::pi, n * n) + phase;
  double z = c * std::log(c);
  for (int it = 0; it < 200; ++it) {
    double lz = std::log(z);
    double f = z / lz - c;
    if (std::abs(f) <= 1e-10 * c) return z;
    double fp = (lz - 1.0) / (lz * lz);
    double next = z - f / fp;
    // stay on the increasing branch z > e
    if (!(next > std::numbers::e)) next = 0.5 * (z + std::numbers::e);
    z = next;
  }
  throw convergence_error("anchor_z: Newton did not converge for n=" + std::to_string(n));
}

struct AnchorWindow {
  int n = 0;
  double z = 0.0;
  std::uint64_t start = 0;
  std::size_t length = 0;
  double average = 0.0;
  double error = 0.0;
};

// Block-integral window of length n starting at floor(z_n d / log 2).
inline AnchorWindow anchor_window(const RadialSymbol& sym, int n, double phase, double tol = kDefaultQuadTolerance) {
  AnchorWindow w;
  w.n = n;
  w.z = anchor_z(n, phase);
  w.start = static_cast<std::uint64_t>(std::floor(w.z * sym.dim / kLog2));
  w.length = static_cast<std::size_t>(n);
  CompensatedSum s;
  for (std::size_t i = 0; i < w.length; ++i) {
    auto r = block_integral(sym, w.start + i, tol);
    s.add(r.value);
    w.error = std::max(w.error, r.error);
  }
  w.average = s.value() / static_cast<double>(w.length);
  return w;
}

struct CttOptions {
  // Defaults to 1/((2 pi)^d log 2).
  std::optional<double> normalization;
  SuchestonOptions sucheston;
  std::vector<int> anchors;
  double tol = kDefaultQuadTolerance;
};

struct CttTraceInterval {
  // Scaled interval: dense Sucheston bounds widened by the anchor windows.
  BanachInterval interval;
  // Unscaled bounds of the block-integral sequence.
  double raw_sup = 0.0;
  double raw_inf = 0.0;
  double normalization = 1.0;
  std::vector<AnchorWindow> sup_anchors;
  std::vector<AnchorWindow> inf_anchors;
};

inline double ctt_normalization(int d) { return 1.0 / (std::pow(2.0 * std::numbers::pi, d) * kLog2); }

inline CttTraceInterval ctt_trace_interval(const RadialSymbol& sym, const RealTruncation& blocks,
                                           const CttOptions& opt = {}) {
  CttTraceInterval out;
  out.normalization = opt.normalization.value_or(ctt_normalization(sym.dim));
  SuchestonOptions so = opt.sucheston;
  so.k_max = std::min(so.k_max, blocks.size() / 4);
  so.k_min = std::min(so.k_min, so.k_max);
  if (so.k_max == 0) throw horizon_error("ctt_trace_interval: too few blocks");
  auto dense = sucheston_bounds(blocks, so);
  out.raw_sup = dense.sup_est;
  out.raw_inf = dense.inf_est;
  for (int n : opt.anchors) {
    out.sup_anchors.push_back(anchor_window(sym, n, 0.5 * std::numbers::pi, opt.tol));
    out.inf_anchors.push_back(anchor_window(sym, n, 1.5 * std::numbers::pi, opt.tol));
  }
  // Anchored windows sit far past the dense horizon; the largest anchor is
  // the Sucheston-style estimate at the longest window.
  if (!out.sup_anchors.empty()) {
    out.raw_sup = std::max(out.raw_sup, out.sup_anchors.back().average);
    out.raw_inf = std::min(out.raw_inf, out.inf_anchors.back().average);
  }
  out.interval = dense;
  double c = out.normalization;
  out.interval.sup_est = c * out.raw_sup;
  out.interval.inf_est = c * out.raw_inf;
  for (auto& v : out.interval.sup_by_k) v *= c;
  for (auto& v : out.interval.inf_by_k) v *= c;
  return out;
}

struct ResidueOptions {
  std::size_t n_blocks = std::size_t{1} << 16;
  double n_min = 1e3;
  double n_max = 1e6;
  std::size_t grid_points = 64;
  std::vector<int> anchors;
  double tol = kDefaultQuadTolerance;
  double tolerance = kDefaultTolerance;
  double tail_fraction = kDefaultTailFraction;
  std::optional<double> normalization;
  std::vector<double> modulated_grid;
};

struct ResidueReport {
  std::string label;
  int dim = 1;
  ResSequence res;
  // Res along dyadic radii: prefix of block integrals through block N-1
  // over log(2 + 2^N), N = 1..n_blocks.
  RealTruncation res_blocks{std::vector<double>{0.0}};
  ConvergenceVerdict res_scalar;
  // d * Res, the classical residue int_{S^{d-1}} p_{-d}.
  std::optional<double> wodzicki_residue;
  BlockIntegrals blocks;
  ConvergenceVerdict dixmier;
  LorentzResult lorentz;
  CttTraceInterval trace;
  ModulatedResult modulated;
  double quadrature_error_bound = 0.0;
  std::vector<std::string> flags;
};

inline ResidueReport residue_report(const RadialSymbol& sym, const ResidueOptions& opt = {}) {
  ResidueReport rep;
  rep.label = sym.label;
  rep.dim = sym.dim;
  rep.res = res_sequence(sym, geometric_grid(opt.n_min, opt.n_max, opt.grid_points), opt.tol);
  rep.blocks = block_integrals(sym, opt.n_blocks, opt.tol);

  std::vector<double> rb(opt.n_blocks);
  CompensatedSum prefix;
  for (std::size_t N = 1; N <= opt.n_blocks; ++N) {
    prefix.add(rep.blocks.values[N - 1]);
    double log_norm = static_cast<double>(N) * kLog2 + std::log1p(std::ldexp(2.0, -static_cast<int>(N)));
    rb[N - 1] = prefix.value() / log_norm;
  }
  rep.res_blocks = RealTruncation(std::move(rb));
  rep.res_scalar = convergence_probe(rep.res_blocks, opt.tail_fraction, opt.tolerance);
  if (rep.res_scalar.limit_est) rep.wodzicki_residue = sym.dim * *rep.res_scalar.limit_est;

  rep.dixmier = convergence_probe(cesaro(rep.blocks.values), opt.tail_fraction, opt.tolerance);
  SuchestonOptions so;
  so.tolerance = opt.tolerance;
  so.tail_fraction = opt.tail_fraction;
  rep.lorentz = lorentz_test(rep.blocks.values, so);
  CttOptions co;
  co.normalization = opt.normalization;
  co.sucheston = so;
  co.anchors = opt.anchors;
  co.tol = opt.tol;
  rep.trace = ctt_trace_interval(sym, rep.blocks.values, co);
  rep.modulated = modulated_check(sym, opt.modulated_grid.empty() ? default_modulated_grid() : opt.modulated_grid, opt.tol);

  rep.quadrature_error_bound = rep.blocks.max_error;
  for (const auto& w : rep.trace.sup_anchors) rep.quadrature_error_bound = std::max(rep.quadrature_error_bound, w.error);
  for (const auto& w : rep.trace.inf_anchors) rep.quadrature_error_bound = std::max(rep.quadrature_error_bound, w.error);

  if (rep.lorentz.verdict.status == ConvergenceStatus::convergent && rep.res_scalar.limit_est) {
    double expected = kLog2 * *rep.res_scalar.limit_est;
    if (std::abs(*rep.lorentz.verdict.limit_est - expected) > 2.0 * opt.tolerance)
      rep.flags.push_back("block-integral limit differs from log 2 * Res");
  }
  if (!rep.modulated.pass) rep.flags.push_back("symbol fails the Laplacian-modulated growth check");
  if (rep.blocks.clipping_constant > 0.0) rep.flags.push_back("mass below r = 1 is outside every block");
  return rep;
}

}  // namespace tracelab
