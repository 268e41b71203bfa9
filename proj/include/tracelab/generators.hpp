#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "tracelab/common.hpp"
#include "tracelab/log_runs.hpp"
#include "tracelab/operator_model.hpp"
#include "tracelab/seq_core.hpp"
#include "tracelab/transforms.hpp"

namespace tracelab {

inline constexpr std::uint64_t kDefaultPointwiseHorizon = std::uint64_t{1} << 20;
inline constexpr std::size_t kDefaultBlockHorizon = 1000000;

// sum_{k=2^n}^{2^{n+1}-1} 1/k = psi(2^{n+1}) - psi(2^n)
inline double harmonic_block_sum(std::size_t n) {
  if (n < 10) return pairwise_sum<double>(block_begin(n), block_end(n), [](std::uint64_t k) {
    return 1.0 / static_cast<double>(k + 1);
  });
  if (n >= 60) return kLog2;
  double u = std::ldexp(1.0, -static_cast<int>(n));
  double u2 = u * u;
  return kLog2 + u / 4.0 + u2 / 16.0 - u2 * u2 / 128.0 + u2 * u2 * u2 / 256.0;
}

inline RealSequence gen_harmonic() {
  RealSequence::Parts p;
  p.name = "harmonic";
  p.value = [](std::uint64_t k) { return 1.0 / (static_cast<double>(k) + 1.0); };
  p.block = harmonic_block_sum;
  p.weighted_sup = [](std::size_t) { return 1.0; };
  p.block_runs = [](double s_max) {
    LogRuns r(harmonic_block_sum(0));
    std::size_t n = 1;
    for (; n < 60 && std::log(static_cast<double>(n)) < s_max; ++n)
      r.push(std::log1p(1.0 / static_cast<double>(n)), harmonic_block_sum(n));
    r.push(std::max(0.0, s_max - r.s_end()), kLog2);
    return r;
  };
  p.sup_bound = 1.0;
  return RealSequence(std::move(p));
}

inline RealSequence gen_constant(double c, std::string name = "constant") {
  RealSequence::Parts p;
  p.name = std::move(name);
  p.value = [c](std::uint64_t) { return c; };
  p.value_runs = [c](double s_max) {
    LogRuns r(c);
    r.push(std::max(s_max, 0.0), c);
    return r;
  };
  p.sup_bound = std::abs(c);
  return RealSequence(std::move(p));
}

// Exponent set E = { j + n(i+2)^2 : 0 <= j <= i } of the operators A_n.
class AnExponents {
 public:
  explicit AnExponents(std::uint64_t n) : n_(n) {
    if (n == 0) throw precondition_error("gen_an: n must be at least 1");
  }

  std::uint64_t n() const { return n_; }

  // min { a in E : a >= m }
  std::uint64_t next(std::uint64_t m) const {
    // smallest i with n(i+2)^2 + i >= m
    auto top = [&](std::uint64_t i) { return n_ * (i + 2) * (i + 2) + i; };
    std::uint64_t i = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m) / static_cast<double>(n_)));
    i = i >= 2 ? i - 2 : 0;
    while (i > 0 && top(i - 1) >= m) --i;
    while (top(i) < m) ++i;
    return std::max(m, n_ * (i + 2) * (i + 2));
  }

  bool contains(std::uint64_t a) const { return next(a) == a; }

 private:
  std::uint64_t n_;
};

// mu(l, A_n) = 2^{-next(bit_width(l))}: the largest 2^{-a}, a in E, with l < 2^a.
inline RealSequence gen_an(std::uint64_t n, std::size_t block_horizon = kDefaultBlockHorizon) {
  auto E = std::make_shared<const AnExponents>(n);
  auto ex = [](std::uint64_t a) { return -static_cast<int>(std::min<std::uint64_t>(a, 1u << 30)); };
  RealSequence::Parts p;
  p.name = "a-n(" + std::to_string(n) + ")";
  p.value = [E, ex](std::uint64_t l) { return std::ldexp(1.0, ex(E->next(std::bit_width(l)))); };
  // Index 2^m - 1 has bit width m; the remaining 2^m - 1 indices have m + 1.
  p.block = [E, ex](std::size_t m) {
    std::uint64_t a = E->next(m), b = E->next(m + 1);
    double head = std::ldexp(1.0, ex(a));
    double run = std::ldexp(1.0, static_cast<int>(m) + ex(b)) - std::ldexp(1.0, ex(b));
    return head + run;
  };
  p.weighted_sup = [E, ex](std::size_t m) {
    std::uint64_t a = E->next(m), b = E->next(m + 1);
    double left = std::ldexp(1.0, static_cast<int>(m) + ex(a));
    double right = std::ldexp(1.0, static_cast<int>(m) + 1 + ex(b)) - std::ldexp(1.0, ex(b));
    return std::max(left, right);
  };
  p.block_runs = [E, ex, block_horizon](double s_max) {
    auto block = [&](std::uint64_t m) {
      std::uint64_t a = E->next(m), b = E->next(m + 1);
      return std::ldexp(1.0, ex(a)) + std::ldexp(1.0, static_cast<int>(m) + ex(b)) - std::ldexp(1.0, ex(b));
    };
    LogRuns r(block(0));
    double stop = std::min(std::exp(s_max), static_cast<double>(block_horizon));
    for (std::uint64_t m = 1; static_cast<double>(m) < stop; ++m)
      r.push(std::log1p(1.0 / static_cast<double>(m)), block(m));
    return r;
  };
  p.sup_bound = std::ldexp(1.0, ex(E->next(0)));
  p.block_horizon = block_horizon;
  return RealSequence(std::move(p));
}

// Sum of Phi-blocks m in [M, M+k-1] for M = n(k+2)^2 times log 2:
// k/2 + 2^{-M}(1 - 2^{-k}).
inline double an_window_block_total(std::uint64_t n, std::uint64_t k) {
  std::uint64_t M = n * (k + 2) * (k + 2);
  return static_cast<double>(k) / 2.0 +
         std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(M, 1u << 30))) * (1.0 - std::ldexp(1.0, -static_cast<int>(k)));
}

// y_k = 2 on [2^n, 2^n + n] for n >= 1, else 1.
inline double y_dif1_value(std::uint64_t k) {
  if (k < 2) return 1.0;
  unsigned n = static_cast<unsigned>(std::bit_width(k)) - 1;
  return k - (std::uint64_t{1} << n) <= n ? 2.0 : 1.0;
}

inline RealSequence gen_y_dif1() {
  RealSequence::Parts p;
  p.name = "y-dif1";
  p.value = y_dif1_value;
  p.value_runs = [](double s_max) {
    LogRuns r(1.0);
    r.push(kLog2, 1.0);
    for (int n = 1; r.s_end() < s_max; ++n) {
      double w = std::log1p(static_cast<double>(n + 1) * std::ldexp(1.0, -n));
      r.push(w, 2.0);
      r.push(kLog2 - w, 1.0);
    }
    return r;
  };
  p.sup_bound = 2.0;
  return RealSequence(std::move(p));
}

// y_k = 2 on (4^n, 2 * 4^n] for n >= 1, else 1.
inline double y_dif2_value(std::uint64_t k) {
  if (k < 2) return 1.0;
  unsigned p = static_cast<unsigned>(std::bit_width(k - 1)) - 1;
  return (p >= 2 && p % 2 == 0) ? 2.0 : 1.0;
}

inline RealSequence gen_y_dif2() {
  RealSequence::Parts p;
  p.name = "y-dif2";
  p.value = y_dif2_value;
  p.value_runs = [](double s_max) {
    LogRuns r(1.0);
    r.push(std::log(5.0), 1.0);
    for (int n = 1; r.s_end() < s_max; ++n) {
      double q = std::ldexp(1.0, 2 * n);
      r.push(std::log(2.0 - 1.0 / (q + 1.0)), 2.0);
      r.push(std::log(2.0 - 1.0 / (2.0 * q + 1.0)), 1.0);
    }
    return r;
  };
  p.sup_bound = 2.0;
  return RealSequence(std::move(p));
}

// x_k = (-1)^n on 2^n < k <= 2^{n+1}; x_0 = x_1 = 1.
inline double x_alt_dyadic_value(std::uint64_t k) {
  if (k < 2) return 1.0;
  unsigned n = static_cast<unsigned>(std::bit_width(k - 1)) - 1;
  return n % 2 == 0 ? 1.0 : -1.0;
}

inline RealSequence gen_x_alt_dyadic() {
  RealSequence::Parts p;
  p.name = "x-alt-dyadic";
  p.value = x_alt_dyadic_value;
  p.value_runs = [](double s_max) {
    LogRuns r(1.0);
    r.push(std::log(3.0), 1.0);
    for (int n = 1; r.s_end() < s_max; ++n) {
      double q = std::ldexp(1.0, n);
      r.push(std::log(2.0 - 1.0 / (q + 1.0)), n % 2 == 0 ? 1.0 : -1.0);
    }
    return r;
  };
  p.sup_bound = 1.0;
  return RealSequence(std::move(p));
}

// diag(Dy). Requires |y_n| >= |y_{n+1}|/2 so that Dy is already ordered by
// modulus; checked on the first `check_count` terms.
inline OperatorModel gen_diag_of_D(const RealSequence& y, std::uint64_t check_count = kDefaultPointwiseHorizon) {
  if (!y.has_values()) throw precondition_error("gen_diag_of_D: y needs pointwise values");
  std::uint64_t n_check = std::min(check_count, y.value_horizon());
  double prev = y.value_at(0);
  bool nonneg = prev >= 0.0;
  for (std::uint64_t n = 1; n < n_check; ++n) {
    double cur = y.value_at(n);
    if (std::abs(prev) < std::abs(cur) / 2.0)
      throw precondition_error("gen_diag_of_D: |y_n| >= |y_{n+1}|/2 fails at n=" + std::to_string(n - 1) +
                               " (D y would not be ordered by modulus)");
    nonneg = nonneg && cur >= 0.0;
    prev = cur;
  }
  return OperatorModel{"diag(D " + y.name() + ")",
                       nonneg ? OperatorKind::diagonal_positive : OperatorKind::self_adjoint,
                       AnySequence(pietsch_D(y)), std::nullopt};
}

inline OperatorModel gen_diag(std::string label, RealSequence mu) {
  check_nonincreasing_modulus(mu);
  return OperatorModel{std::move(label), OperatorKind::diagonal_positive, AnySequence(mu), mu};
}

}  // namespace tracelab
