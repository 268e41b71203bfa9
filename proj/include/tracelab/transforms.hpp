#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tracelab/common.hpp"
#include "tracelab/log_runs.hpp"
#include "tracelab/seq_core.hpp"

namespace tracelab {

inline constexpr int kMaxCesaroIterates = 12;

// (Sx) = (0, x_0, x_1, ...)
template <class T>
Truncation<T> shift_right(const Truncation<T>& x) {
  std::vector<T> v;
  v.reserve(x.size() + 1);
  v.push_back(T{});
  v.insert(v.end(), x.begin(), x.end());
  return Truncation<T>(std::move(v), x.summation());
}

// (Tx) = (x_1, x_2, ...)
template <class T>
Truncation<T> shift_left(const Truncation<T>& x) {
  if (x.size() < 2) throw precondition_error("shift_left: needs at least two values");
  return Truncation<T>(std::vector<T>(x.begin() + 1, x.end()), x.summation());
}

// (sigma_2 x) = (x_0, x_0, x_1, x_1, ...)
template <class T>
Truncation<T> dilate2(const Truncation<T>& x) {
  std::vector<T> v;
  v.reserve(2 * x.size());
  for (const auto& e : x) {
    v.push_back(e);
    v.push_back(e);
  }
  return Truncation<T>(std::move(v), x.summation());
}

template <class T>
BlockSequence<T> shift_right(const BlockSequence<T>& x) {
  if (!x.has_values()) throw precondition_error("shift_right: needs pointwise values");
  typename BlockSequence<T>::Parts p;
  p.name = "S(" + x.name() + ")";
  p.value = [x](std::uint64_t k) { return k == 0 ? T{} : x.value_at(k - 1); };
  p.sup_bound = x.sup_bound();
  if (x.value_horizon() != std::numeric_limits<std::uint64_t>::max()) p.value_horizon = x.value_horizon() + 1;
  return BlockSequence<T>(std::move(p));
}

template <class T>
BlockSequence<T> shift_left(const BlockSequence<T>& x) {
  if (!x.has_values()) throw precondition_error("shift_left: needs pointwise values");
  typename BlockSequence<T>::Parts p;
  p.name = "T(" + x.name() + ")";
  p.value = [x](std::uint64_t k) { return x.value_at(k + 1); };
  p.sup_bound = x.sup_bound();
  if (x.value_horizon() != std::numeric_limits<std::uint64_t>::max()) p.value_horizon = x.value_horizon() - 1;
  return BlockSequence<T>(std::move(p));
}

template <class T>
BlockSequence<T> dilate2(const BlockSequence<T>& x) {
  if (!x.has_values()) throw precondition_error("dilate2: needs pointwise values");
  typename BlockSequence<T>::Parts p;
  p.name = "sigma2(" + x.name() + ")";
  p.value = [x](std::uint64_t k) { return x.value_at(k / 2); };
  p.sup_bound = x.sup_bound();
  if (x.value_horizon() <= std::numeric_limits<std::uint64_t>::max() / 2) p.value_horizon = 2 * x.value_horizon();
  return BlockSequence<T>(std::move(p));
}

// (Dx)_k = log 2 * x_n / 2^n on block n. Block sums are log 2 * x_n exactly.
template <class T>
BlockSequence<T> pietsch_D(const BlockSequence<T>& y) {
  if (!y.has_values()) throw precondition_error("pietsch_D: needs pointwise values of y");
  if (!std::isfinite(y.sup_bound())) throw precondition_error("pietsch_D: y must have a finite sup bound");
  typename BlockSequence<T>::Parts p;
  p.name = "D(" + y.name() + ")";
  p.value = [y](std::uint64_t k) {
    std::size_t n = block_of(k);
    return y.value_at(n) * std::ldexp(kLog2, -static_cast<int>(n));
  };
  p.block = [y](std::size_t n) { return y.value_at(n) * kLog2; };
  p.weighted_sup = [y](std::size_t n) {
    return kLog2 * modulus(y.value_at(n)) * (2.0 - std::ldexp(1.0, -static_cast<int>(n)));
  };
  if (y.has_value_runs()) p.block_runs = [y](double s) { return y.value_runs(s).scaled(kLog2); };
  p.sup_bound = kLog2 * y.sup_bound();
  if (y.value_horizon() != std::numeric_limits<std::uint64_t>::max()) {
    p.block_horizon = static_cast<std::size_t>(y.value_horizon());
    if (p.block_horizon < 64) p.value_horizon = block_end(p.block_horizon);
  }
  return BlockSequence<T>(std::move(p));
}

template <class T>
BlockSequence<T> pietsch_D(const Truncation<T>& y) {
  return pietsch_D(sequence_from_values(y, "y"));
}

// Phi(x)_n = (1/log 2) * (sum of block n), for n < n_blocks.
template <class T>
Truncation<T> block_sums_phi(const BlockSequence<T>& x, std::size_t n_blocks) {
  if (n_blocks == 0) throw precondition_error("block_sums_phi: n_blocks must be positive");
  if (!x.has_block_sums() && n_blocks > BlockSequence<T>::kPointwiseBlockLimit)
    throw horizon_error("block_sums_phi: pointwise-only sequence '" + x.name() + "' refuses " +
                        std::to_string(n_blocks) + " blocks (limit " +
                        std::to_string(BlockSequence<T>::kPointwiseBlockLimit) + ")");
  if (n_blocks > x.block_horizon())
    throw horizon_error("block_sums_phi: '" + x.name() + "' provides only " + std::to_string(x.block_horizon()) +
                        " blocks, " + std::to_string(n_blocks) + " requested");
  std::vector<T> out(n_blocks);
  if (x.has_block_sums()) {
    for (std::size_t n = 0; n < n_blocks; ++n) out[n] = x.block_sum_at(n) / kLog2;
  } else {
    // Large blocks dominate the cost; visit them first so workers balance.
    parallel_for(n_blocks, [&](std::size_t i) {
      std::size_t n = n_blocks - 1 - i;
      out[n] = x.block_sum_at(n) / kLog2;
    });
  }
  return Truncation<T>(std::move(out));
}

// Run-length form of Phi(x) far past any materialisable horizon.
inline LogRuns phi_runs(const RealSequence& x, double s_max) { return x.block_runs(s_max).scaled(1.0 / kLog2); }

// (Cx)_n = (1/(n+1)) sum_{k<=n} x_k
template <class T>
Truncation<T> cesaro(const Truncation<T>& x) {
  auto s = prefix_sums<T>(x.values(), x.summation());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] /= static_cast<double>(i + 1);
  return Truncation<T>(std::move(s), x.summation());
}

template <class T>
Truncation<T> cesaro_iter(const Truncation<T>& x, int m) {
  if (m < 0 || m > kMaxCesaroIterates)
    throw precondition_error("cesaro_iter: m must lie in [0, " + std::to_string(kMaxCesaroIterates) + "]");
  Truncation<T> y = x;
  for (int i = 0; i < m; ++i) y = cesaro(y);
  return y;
}

// Step function on (0, T_max]: value v_i on [b_i, b_{i+1}), the last
// interval closed at T_max.
class PiecewiseConstantFunction {
 public:
  PiecewiseConstantFunction(std::vector<double> breakpoints, std::vector<double> values)
      : b_(std::move(breakpoints)), v_(std::move(values)) {
    if (b_.size() != v_.size() + 1 || v_.empty())
      throw precondition_error("PiecewiseConstantFunction: need one more breakpoint than values");
    if (b_.front() != 0.0) throw precondition_error("PiecewiseConstantFunction: domain must start at 0");
    for (std::size_t i = 0; i + 1 < b_.size(); ++i)
      if (!(b_[i] < b_[i + 1])) throw precondition_error("PiecewiseConstantFunction: breakpoints not increasing");
    cum_.resize(b_.size());
    CompensatedSum acc;
    cum_[0] = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      acc.add(v_[i] * (b_[i + 1] - b_[i]));
      cum_[i + 1] = acc.value();
    }
  }

  double t_max() const { return b_.back(); }
  const std::vector<double>& breakpoints() const { return b_; }
  const std::vector<double>& values() const { return v_; }

  double operator()(double t) const {
    check(t);
    return v_[segment(t)];
  }

  // Integral over (0, t].
  double integral(double t) const {
    check(t);
    std::size_t i = segment(t);
    return cum_[i] + v_[i] * (t - b_[i]);
  }

  std::size_t segment(double t) const {
    auto it = std::upper_bound(b_.begin(), b_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - b_.begin());
    return std::min(i == 0 ? 0 : i - 1, v_.size() - 1);
  }

  void check(double t) const {
    if (!(t > 0.0 && t <= t_max()))
      throw precondition_error("PiecewiseConstantFunction: t outside (0, " + std::to_string(t_max()) + "]");
  }

 private:
  std::vector<double> b_;
  std::vector<double> v_;
  std::vector<double> cum_;
};

// pi(x) = sum_k x_k chi_[k, k+1)
inline PiecewiseConstantFunction embed_pi(const RealTruncation& x) {
  std::vector<double> b(x.size() + 1);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<double>(i);
  return PiecewiseConstantFunction(std::move(b), std::vector<double>(x.begin(), x.end()));
}

// (Hf)(t) = (1/t) int_0^t f
inline double hardy_H(const PiecewiseConstantFunction& f, double t) { return f.integral(t) / t; }

// (Mf)(t) = (1/log t) int_1^t f(s) ds/s, integrated exactly per segment.
inline double log_hardy_M(const PiecewiseConstantFunction& f, double t) {
  if (!(t > 1.0)) throw precondition_error("log_hardy_M: t must exceed 1");
  f.check(t);
  const auto& b = f.breakpoints();
  const auto& v = f.values();
  CompensatedSum acc;
  for (std::size_t i = f.segment(1.0); i < v.size() && b[i] < t; ++i) {
    double lo = std::max(b[i], 1.0), hi = std::min(b[i + 1], t);
    if (hi > lo) acc.add(v[i] * std::log(hi / lo));
  }
  return acc.value() / std::log(t);
}

// (P_a f)(t) = f(t^a)
inline double power_sub(const PiecewiseConstantFunction& f, double a, double t) {
  if (!(t > 0.0)) throw precondition_error("power_sub: t must be positive");
  return f(std::pow(t, a));
}

struct Aux1Decomposition {
  RealTruncation z;
  RealTruncation u;
  RealTruncation v;
};

// Splits z = x - D(Phi(x)) as u - v with v a permutation of u: u is the
// running sum of z inside each block and v is u lagged by one within the block.
inline Aux1Decomposition aux1_decomposition(const RealTruncation& x) {
  std::size_t N = x.size();
  if (((N + 1) & N) != 0)
    throw precondition_error("aux1_decomposition: length must be 2^B - 1 (whole blocks)");
  for (std::size_t i = 0; i < N; ++i) {
    if (x[i] < 0.0) throw precondition_error("aux1_decomposition: input must be nonnegative");
    if (i > 0 && x[i] > x[i - 1]) throw precondition_error("aux1_decomposition: input not decreasing");
  }
  std::vector<double> z(N), u(N), v(N);
  std::size_t blocks = static_cast<std::size_t>(std::bit_width(N + 1)) - 1;
  for (std::size_t n = 0; n < blocks; ++n) {
    std::uint64_t s = block_begin(n), e = block_end(n) - 1;
    double total = pairwise_sum<double>(x.values().subspan(s, e - s + 1));
    double avg = std::ldexp(total, -static_cast<int>(n));
    CompensatedSum run;
    for (std::uint64_t k = s; k <= e; ++k) {
      z[k] = x[k] - avg;
      run.add(x[k]);
      double uk = run.value() - static_cast<double>(k - s + 1) * avg;
      u[k] = (k == e || uk < 0.0) ? 0.0 : uk;
      v[k] = k == s ? 0.0 : u[k - 1];
    }
  }
  return {RealTruncation(std::move(z)), RealTruncation(std::move(u)), RealTruncation(std::move(v))};
}

// Tail extremes of the Hardy iterates H^m pi(z), m = 0..m_max, over
// s = log t in [s_tail, s_stop]. In log time H is the causal filter
// h' = f - h, so a run of constant value c over width w advances the state
// (h_1..h_m) exactly:
//   h_j(w) = c + e^{-w} sum_{i<=j} (h_i(0) - c) w^{j-i}/(j-i)!
struct TailEnvelope {
  std::vector<double> lo;
  std::vector<double> hi;
  double s_tail = 0.0;
  double s_stop = 0.0;
};

namespace detail {

inline void hardy_advance(const std::vector<double>& h, double c, double w, std::vector<double>& out) {
  std::size_t m = h.size();
  double e = std::exp(-w);
  std::vector<double> pw(m);
  double term = 1.0;
  for (std::size_t p = 0; p < m; ++p) {
    pw[p] = term;
    term *= w / static_cast<double>(p + 1);
  }
  for (std::size_t j = 0; j < m; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= j; ++i) acc += (h[i] - c) * pw[j - i];
    out[j] = c + e * acc;
  }
}

}  // namespace detail

inline TailEnvelope hardy_tail_envelope(const LogRuns& runs, int m_max, double s_tail, double s_stop,
                                        double step = 1.0 / 64.0) {
  if (m_max < 0 || m_max > kMaxCesaroIterates)
    throw precondition_error("hardy_tail_envelope: m_max must lie in [0, " + std::to_string(kMaxCesaroIterates) + "]");
  if (!(s_tail >= 0.0 && s_tail < s_stop)) throw precondition_error("hardy_tail_envelope: need 0 <= s_tail < s_stop");
  if (runs.s_end() < s_stop * (1.0 - 1e-12))
    throw horizon_error("hardy_tail_envelope: runs end at s=" + std::to_string(runs.s_end()) + ", need " +
                        std::to_string(s_stop));
  std::size_t M = static_cast<std::size_t>(m_max);
  TailEnvelope env;
  env.lo.assign(M + 1, std::numeric_limits<double>::infinity());
  env.hi.assign(M + 1, -std::numeric_limits<double>::infinity());
  env.s_tail = s_tail;
  env.s_stop = s_stop;
  std::vector<double> h(M, runs.head()), tmp(M);
  auto record = [&](const std::vector<double>& state, double raw) {
    env.lo[0] = std::min(env.lo[0], raw);
    env.hi[0] = std::max(env.hi[0], raw);
    for (std::size_t j = 0; j < M; ++j) {
      env.lo[j + 1] = std::min(env.lo[j + 1], state[j]);
      env.hi[j + 1] = std::max(env.hi[j + 1], state[j]);
    }
  };
  for (const auto& r : runs.runs()) {
    if (r.s_begin >= s_stop) break;
    double w = std::min(r.width, s_stop - r.s_begin);
    double end = r.s_begin + w;
    if (end > s_tail) {
      double a = std::max(r.s_begin, s_tail);
      double first = s_tail + std::ceil((a - s_tail) / step) * step;
      if (a == r.s_begin) {
        detail::hardy_advance(h, r.value, a - r.s_begin, tmp);
        record(tmp, r.value);
      }
      for (double s = first; s < end; s += step) {
        detail::hardy_advance(h, r.value, s - r.s_begin, tmp);
        record(tmp, r.value);
      }
      detail::hardy_advance(h, r.value, w, tmp);
      record(tmp, r.value);
    }
    detail::hardy_advance(h, r.value, w, tmp);
    h.swap(tmp);
  }
  return env;
}

}  // namespace tracelab
