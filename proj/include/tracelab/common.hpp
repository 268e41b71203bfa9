#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace tracelab {

inline constexpr double kLog2 = std::numbers::ln2;

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition.
class precondition_error : public error {
 public:
  using error::error;
};

// Requested horizon exceeds what the sequence (or its granularity) can supply.
class horizon_error : public error {
 public:
  using error::error;
};

// An iterative numerical method failed to reach its tolerance.
class convergence_error : public error {
 public:
  using error::error;
};

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
bool is_finite(const T& v) {
  if constexpr (is_complex_v<T>)
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  else
    return std::isfinite(v);
}

enum class Summation { pairwise, compensated };

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

template <class T, class F>
T pairwise_sum_fn(std::uint64_t begin, std::uint64_t end, const F& f) {
  constexpr std::uint64_t kLeaf = 128;
  if (end - begin <= kLeaf) {
    T acc{};
    for (std::uint64_t k = begin; k < end; ++k) acc += f(k);
    return acc;
  }
  std::uint64_t mid = begin + (end - begin) / 2;
  return pairwise_sum_fn<T>(begin, mid, f) + pairwise_sum_fn<T>(mid, end, f);
}

}  // namespace detail

// Sum f(k) for k in [begin, end) with pairwise cascading.
template <class T, class F>
T pairwise_sum(std::uint64_t begin, std::uint64_t end, const F& f) {
  if (end <= begin) return T{};
  return detail::pairwise_sum_fn<T>(begin, end, f);
}

template <class T>
T pairwise_sum(std::span<const T> v) {
  return pairwise_sum<T>(0, v.size(), [&](std::uint64_t k) { return v[k]; });
}

template <class T>
T compensated_sum(std::span<const T> v) {
  if constexpr (is_complex_v<T>) {
    CompensatedSum re, im;
    for (const auto& x : v) {
      re.add(x.real());
      im.add(x.imag());
    }
    return T(re.value(), im.value());
  } else {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value();
  }
}

// Worker cap from TRACELAB_THREADS, defaulting to the hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TRACELAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(std::min<long>(v, 1024));
  }
  return hw;
}

// Runs f(i) for i in [0, n). Each index is visited exactly once, so results
// written to per-index slots are independent of scheduling.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) f(i);
        } catch (...) {
          std::lock_guard lock(guard);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

inline double ipow2(int e) { return std::ldexp(1.0, e); }

inline std::uint64_t block_begin(std::size_t n) { return (std::uint64_t{1} << n) - 1; }
inline std::uint64_t block_end(std::size_t n) { return (std::uint64_t{1} << (n + 1)) - 1; }

// Block n containing index k, i.e. k in [2^n - 1, 2^{n+1} - 2].
inline std::size_t block_of(std::uint64_t k) {
  return static_cast<std::size_t>(std::bit_width(k + 1)) - 1;
}

}  // namespace tracelab
