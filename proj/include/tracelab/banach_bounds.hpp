#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracelab/common.hpp"
#include "tracelab/log_runs.hpp"
#include "tracelab/seq_core.hpp"
#include "tracelab/transforms.hpp"

namespace tracelab {

enum class Reliability { stable, still_decreasing, horizon_limited };

inline const char* to_string(Reliability r) {
  switch (r) {
    case Reliability::stable: return "stable";
    case Reliability::still_decreasing: return "still-decreasing";
    case Reliability::horizon_limited: return "horizon-limited";
  }
  return "?";
}

// Estimated range {B(x) : B a Banach limit} from window averages
// (1/k) sum_{i=m}^{m+k-1} x_i over a geometric ladder of k.
struct BanachInterval {
  double sup_est = 0.0;
  double inf_est = 0.0;
  std::vector<std::size_t> k_ladder;
  std::size_t m_min = 0;
  std::size_t m_horizon = 0;
  std::vector<double> sup_by_k;
  std::vector<double> inf_by_k;
  Reliability reliability = Reliability::horizon_limited;

  double gap() const { return sup_est - inf_est; }
  double midpoint() const { return 0.5 * (sup_est + inf_est); }
  bool contains(double v, double slack = 0.0) const { return v >= inf_est - slack && v <= sup_est + slack; }
};

enum class ConvergenceStatus { convergent, divergent, undecided };

inline const char* to_string(ConvergenceStatus s) {
  switch (s) {
    case ConvergenceStatus::convergent: return "convergent";
    case ConvergenceStatus::divergent: return "divergent";
    case ConvergenceStatus::undecided: return "undecided";
  }
  return "?";
}

struct ConvergenceVerdict {
  ConvergenceStatus status = ConvergenceStatus::undecided;
  std::optional<double> limit_est;
  double osc_tail = 0.0;
  double tail_min = 0.0;
  double tail_max = 0.0;
  std::size_t tail_begin = 0;
};

inline constexpr double kDefaultTolerance = 0.02;
inline constexpr double kDefaultTailFraction = 0.25;

// First index of the trailing tail_fraction of a length-N window, measured
// on the dyadic scale: indices n with log2(n+1) >= (1 - f) log2 N.
inline std::size_t tail_begin(std::size_t N, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw precondition_error("tail_fraction must lie in (0, 1]");
  double start = std::pow(static_cast<double>(N), 1.0 - tail_fraction) - 1.0;
  auto b = static_cast<std::size_t>(std::max(0.0, std::floor(start)));
  return std::min(b, N - 1);
}

struct SuchestonOptions {
  std::size_t k_min = 8;
  std::size_t k_max = 16;
  double tolerance = kDefaultTolerance;
  double tail_fraction = kDefaultTailFraction;
  // Overrides for the window-start range; defaults to the tail start and N - k.
  std::optional<std::size_t> m_min;
  std::optional<std::size_t> m_horizon;
};

inline std::vector<std::size_t> geometric_ladder(std::size_t k_min, std::size_t k_max) {
  std::vector<std::size_t> ladder;
  for (std::size_t k = std::max<std::size_t>(1, k_min); k <= k_max; k *= 2) ladder.push_back(k);
  if (ladder.empty() || ladder.back() != k_max) ladder.push_back(k_max);
  return ladder;
}

inline BanachInterval sucheston_bounds(const RealTruncation& x, const SuchestonOptions& opt = {}) {
  std::size_t N = x.size();
  if (opt.k_max == 0) throw precondition_error("sucheston_bounds: k_max must be positive");
  if (opt.k_max > N / 4)
    throw precondition_error("sucheston_bounds: k_max " + std::to_string(opt.k_max) + " too large for truncation of length " +
                             std::to_string(N));
  BanachInterval out;
  out.k_ladder = geometric_ladder(opt.k_min, opt.k_max);
  out.m_min = opt.m_min.value_or(tail_begin(N, opt.tail_fraction));
  out.m_horizon = std::min(opt.m_horizon.value_or(N - 1), N - 1);
  if (out.m_min > out.m_horizon) throw precondition_error("sucheston_bounds: empty window-start range");

  std::vector<long double> P(N + 1, 0.0L);
  for (std::size_t i = 0; i < N; ++i) P[i + 1] = P[i] + static_cast<long double>(x[i]);

  std::size_t L = out.k_ladder.size();
  out.sup_by_k.assign(L, -std::numeric_limits<double>::infinity());
  out.inf_by_k.assign(L, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> counts(L, 0);
  parallel_for(L, [&](std::size_t j) {
    std::size_t k = out.k_ladder[j];
    if (k > N) return;
    std::size_t last = std::min(out.m_horizon, N - k);
    long double hi = -std::numeric_limits<long double>::infinity();
    long double lo = std::numeric_limits<long double>::infinity();
    for (std::size_t m = out.m_min; m <= last; ++m) {
      long double a = (P[m + k] - P[m]) / static_cast<long double>(k);
      hi = std::max(hi, a);
      lo = std::min(lo, a);
    }
    counts[j] = last >= out.m_min ? last - out.m_min + 1 : 0;
    out.sup_by_k[j] = static_cast<double>(hi);
    out.inf_by_k[j] = static_cast<double>(lo);
  });
  if (counts.back() == 0) throw precondition_error("sucheston_bounds: no window fits the start range");
  out.sup_est = out.sup_by_k.back();
  out.inf_est = out.inf_by_k.back();
  if (L < 2 || counts.back() < opt.k_max) {
    out.reliability = Reliability::horizon_limited;
  } else if (std::abs(out.sup_by_k[L - 1] - out.sup_by_k[L - 2]) > opt.tolerance ||
             std::abs(out.inf_by_k[L - 1] - out.inf_by_k[L - 2]) > opt.tolerance) {
    out.reliability = Reliability::still_decreasing;
  } else {
    out.reliability = Reliability::stable;
  }
  return out;
}

struct LorentzResult {
  ConvergenceVerdict verdict;
  BanachInterval interval;
};

// Almost convergent iff the Sucheston gap is within tolerance on a stable ladder.
inline LorentzResult lorentz_test(const RealTruncation& x, const SuchestonOptions& opt = {}) {
  LorentzResult r{{}, sucheston_bounds(x, opt)};
  const auto& I = r.interval;
  r.verdict.osc_tail = I.gap();
  r.verdict.tail_min = I.inf_est;
  r.verdict.tail_max = I.sup_est;
  r.verdict.tail_begin = I.m_min;
  if (I.reliability == Reliability::stable) {
    r.verdict.status = I.gap() <= opt.tolerance ? ConvergenceStatus::convergent : ConvergenceStatus::divergent;
  } else {
    r.verdict.status = ConvergenceStatus::undecided;
  }
  if (r.verdict.status == ConvergenceStatus::convergent) r.verdict.limit_est = I.midpoint();
  return r;
}

inline ConvergenceVerdict convergence_probe(const RealTruncation& x, double tail_fraction = kDefaultTailFraction,
                                            double tolerance = kDefaultTolerance) {
  ConvergenceVerdict v;
  std::size_t N = x.size();
  v.tail_begin = tail_begin(N, tail_fraction);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  CompensatedSum mean;
  for (std::size_t i = v.tail_begin; i < N; ++i) {
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
    mean.add(x[i]);
  }
  std::size_t count = N - v.tail_begin;
  v.tail_min = lo;
  v.tail_max = hi;
  v.osc_tail = hi - lo;
  if (count < 8) {
    v.status = ConvergenceStatus::undecided;
  } else {
    v.status = v.osc_tail <= tolerance ? ConvergenceStatus::convergent : ConvergenceStatus::divergent;
  }
  if (v.status == ConvergenceStatus::convergent) v.limit_est = mean.value() / static_cast<double>(count);
  return v;
}

struct GapRow {
  int m = 0;
  double liminf = 0.0;
  double limsup = 0.0;
  double gap() const { return limsup - liminf; }
  double midpoint() const { return 0.5 * (limsup + liminf); }
};

struct IteratedGap {
  std::vector<GapRow> rows;
  double value_est = 0.0;
  int m_used = 0;
  // Mass of the C^m kernel still sitting on the first index at the tail
  // start: P(Gamma(m, 1) > log t_tail).
  double start_weight = 0.0;
  Reliability reliability = Reliability::horizon_limited;
  std::string method;

  const GapRow& last() const { return rows.back(); }
};

struct IteratedOptions {
  int m_max = 8;
  double tail_fraction = kDefaultTailFraction;
  double max_start_weight = 0.05;
  // Lower m until the start weight is acceptable instead of flagging.
  bool cap_by_start_weight = false;
  // Log-time horizon for the run-length path.
  double s_stop = 64.0;
};

// P(Gamma(m, 1) > s) = e^{-s} sum_{j<m} s^j / j!
inline double gamma_tail(int m, double s) {
  if (m <= 0) return 0.0;
  double term = std::exp(-s), acc = 0.0;
  for (int j = 0; j < m; ++j) {
    acc += term;
    term *= s / static_cast<double>(j + 1);
  }
  return std::min(1.0, acc);
}

namespace detail {

inline int capped_m(const IteratedOptions& opt, double s_tail) {
  if (opt.m_max < 0 || opt.m_max > kMaxCesaroIterates)
    throw precondition_error("iterated gap: m_max must lie in [0, " + std::to_string(kMaxCesaroIterates) + "]");
  int m = opt.m_max;
  if (opt.cap_by_start_weight)
    while (m > 0 && gamma_tail(m, s_tail) > opt.max_start_weight) --m;
  return m;
}

inline void finish_gap(IteratedGap& g, const IteratedOptions& opt, double s_tail) {
  g.start_weight = gamma_tail(g.m_used, s_tail);
  g.value_est = g.rows.back().midpoint();
  if (g.start_weight > opt.max_start_weight || g.m_used < 3)
    g.reliability = Reliability::horizon_limited;
  else
    g.reliability = Reliability::stable;
}

}  // namespace detail

// Literal discrete iterates C^m x on the truncation, m = 0..m_max.
inline IteratedGap iterated_cesaro_gap(const RealTruncation& x, const IteratedOptions& opt = {}) {
  std::size_t b = tail_begin(x.size(), opt.tail_fraction);
  double s_tail = std::log(static_cast<double>(b) + 1.0);
  IteratedGap g;
  g.method = "discrete";
  g.m_used = detail::capped_m(opt, s_tail);
  RealTruncation y = x;
  for (int m = 0; m <= g.m_used; ++m) {
    if (m > 0) y = cesaro(y);
    auto [lo, hi] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(b), y.end());
    g.rows.push_back({m, *lo, *hi});
  }
  detail::finish_gap(g, opt, s_tail);
  return g;
}

// Continuous iterates H^m pi(z) on a run-length form, sampled in log time
// over the trailing tail_fraction of [0, s_stop].
inline IteratedGap iterated_hardy_gap(const LogRuns& runs, const IteratedOptions& opt = {}) {
  double s_stop = std::min(opt.s_stop, runs.s_end());
  double s_tail = (1.0 - opt.tail_fraction) * s_stop;
  IteratedGap g;
  g.method = "log-runs";
  g.m_used = detail::capped_m(opt, s_tail);
  auto env = hardy_tail_envelope(runs, g.m_used, s_tail, s_stop);
  for (int m = 0; m <= g.m_used; ++m) g.rows.push_back({m, env.lo[m], env.hi[m]});
  detail::finish_gap(g, opt, s_tail);
  return g;
}

struct Window {
  std::uint64_t start = 0;
  std::size_t length = 0;
};

struct WindowAverage {
  Window window;
  double average = 0.0;
};

// Averages of term(i) over sparse windows; only the indices inside each
// window are evaluated.
inline std::vector<WindowAverage> window_averages(const std::function<double(std::uint64_t)>& term,
                                                  std::span<const Window> windows) {
  std::vector<WindowAverage> out(windows.size());
  parallel_for(windows.size(), [&](std::size_t j) {
    const Window& w = windows[j];
    if (w.length == 0) throw precondition_error("window_averages: empty window");
    CompensatedSum s;
    for (std::size_t i = 0; i < w.length; ++i) s.add(term(w.start + i));
    out[j] = {w, s.value() / static_cast<double>(w.length)};
  });
  return out;
}

}  // namespace tracelab
