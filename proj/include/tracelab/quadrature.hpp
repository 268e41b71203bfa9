#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "tracelab/common.hpp"

namespace tracelab {

struct QuadResult {
  double value = 0.0;
  // Sum of |S(left) + S(right) - S(whole)| over accepted leaves; the
  // Richardson-corrected value is typically far more accurate.
  double error = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

struct SimpsonState {
  const std::function<double(double)>* f;
  std::size_t evals = 0;
  double error = 0.0;
  int max_depth = 0;
};

inline double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm, double fb, double whole,
                          double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = (*st.f)(lm), frm = (*st.f)(rm);
  st.evals += 2;
  double h = (b - a) / 12.0;
  double left = h * (fa + 4.0 * flm + fm);
  double right = h * (fm + 4.0 * frm + fb);
  double diff = left + right - whole;
  if (depth >= 2 && std::abs(diff) <= tol) {
    st.error += std::abs(diff);
    return left + right + diff / 15.0;
  }
  if (depth >= st.max_depth)
    throw convergence_error("adaptive Simpson: tolerance not reached on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
  return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Adaptive Simpson with a fixed bisection rule, so results are reproducible.
// The reported error is at most `tol`.
inline QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                                   int max_depth = 48) {
  if (!(tol > 0.0)) throw precondition_error("adaptive_simpson: tolerance must be positive");
  QuadResult r;
  if (a == b) return r;
  if (b < a) {
    r = adaptive_simpson(f, b, a, tol, max_depth);
    r.value = -r.value;
    return r;
  }
  detail::SimpsonState st{&f, 3, 0.0, max_depth};
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  r.value = detail::simpson_rec(st, a, b, fa, fm, fb, whole, tol, 0);
  r.error = st.error;
  r.evaluations = st.evals;
  return r;
}

// Splits [a, b] into panels no wider than `panel` and integrates each to
// tol * width / (b - a).
inline QuadResult integrate_panels(const std::function<double(double)>& f, double a, double b, double tol,
                                   double panel = 1.0) {
  QuadResult total;
  if (a == b) return total;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  auto count = static_cast<std::size_t>(std::ceil((b - a) / panel));
  count = std::max<std::size_t>(count, 1);
  CompensatedSum acc;
  for (std::size_t i = 0; i < count; ++i) {
    double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(count);
    double hi = i + 1 == count ? b : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(count);
    auto r = adaptive_simpson(f, lo, hi, tol / static_cast<double>(count));
    acc.add(r.value);
    total.error += r.error;
    total.evaluations += r.evaluations;
  }
  total.value = sign * acc.value();
  return total;
}

}  // namespace tracelab
