#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tracelab/common.hpp"
#include "tracelab/log_runs.hpp"

namespace tracelab {

template <class T>
double modulus(const T& v) {
  return std::abs(v);
}

// Finite window of a sequence. Immutable once built.
template <class T = double>
class Truncation {
 public:
  using value_type = T;

  explicit Truncation(std::vector<T> values, Summation mode = Summation::pairwise)
      : values_(std::move(values)), mode_(mode) {
    if (values_.empty()) throw precondition_error("Truncation: length must be at least 1");
    for (const auto& v : values_)
      if (!is_finite(v)) throw precondition_error("Truncation: non-finite value");
  }

  std::size_t size() const { return values_.size(); }
  const T& operator[](std::size_t i) const { return values_[i]; }
  std::span<const T> values() const { return values_; }
  Summation summation() const { return mode_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  double sup_abs() const {
    double s = 0.0;
    for (const auto& v : values_) s = std::max(s, modulus(v));
    return s;
  }

 private:
  std::vector<T> values_;
  Summation mode_;
};

using RealTruncation = Truncation<double>;
using ComplexTruncation = Truncation<std::complex<double>>;

enum class Granularity { pointwise, block, both };

inline const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::pointwise: return "pointwise";
    case Granularity::block: return "block";
    case Granularity::both: return "both";
  }
  return "?";
}

// A bounded sequence exposing pointwise values, exact dyadic block sums, or
// both. Block n covers indices [2^n - 1, 2^{n+1} - 2].
template <class T = double>
class BlockSequence {
 public:
  using value_type = T;
  using ValueFn = std::function<T(std::uint64_t)>;
  using BlockFn = std::function<T(std::size_t)>;
  using WeightedSupFn = std::function<double(std::size_t)>;
  using RunsFn = std::function<LogRuns(double)>;

  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
  // Largest block that pointwise evaluation will sum directly.
  static constexpr std::size_t kPointwiseBlockLimit = 30;

  struct Parts {
    std::string name;
    ValueFn value;
    BlockFn block;
    // sup over block n of (k+1)|x_k|
    WeightedSupFn weighted_sup;
    // runs of x itself, indexed by k
    RunsFn value_runs;
    // runs of the block sums, indexed by block n
    RunsFn block_runs;
    double sup_bound = std::numeric_limits<double>::infinity();
    std::size_t block_horizon = kUnbounded;
    std::uint64_t value_horizon = std::numeric_limits<std::uint64_t>::max();
  };

  explicit BlockSequence(Parts parts) : p_(std::move(parts)) {
    if (!p_.value && !p_.block)
      throw precondition_error("BlockSequence: needs pointwise values or block sums");
    if (!(p_.sup_bound >= 0.0)) throw precondition_error("BlockSequence: negative sup bound");
  }

  const std::string& name() const { return p_.name; }
  static constexpr bool is_complex() { return is_complex_v<T>; }
  double sup_bound() const { return p_.sup_bound; }
  std::size_t block_horizon() const { return p_.block_horizon; }
  std::uint64_t value_horizon() const { return p_.value_horizon; }

  Granularity granularity() const {
    if (p_.value && p_.block) return Granularity::both;
    return p_.value ? Granularity::pointwise : Granularity::block;
  }
  bool has_values() const { return static_cast<bool>(p_.value); }
  bool has_block_sums() const { return static_cast<bool>(p_.block); }
  bool has_value_runs() const { return static_cast<bool>(p_.value_runs); }
  bool has_block_runs() const { return static_cast<bool>(p_.block_runs); }

  T value_at(std::uint64_t k) const {
    if (!p_.value) throw horizon_error(label() + "no pointwise values (block-only sequence)");
    if (k >= p_.value_horizon) throw horizon_error(label() + "index beyond pointwise horizon");
    return p_.value(k);
  }

  T block_sum_at(std::size_t n) const {
    if (n >= p_.block_horizon)
      throw horizon_error(label() + "block " + std::to_string(n) + " beyond horizon " +
                          std::to_string(p_.block_horizon));
    if (p_.block) return p_.block(n);
    check_pointwise_block(n);
    return pairwise_sum<T>(block_begin(n), block_end(n), p_.value);
  }

  double block_weighted_sup(std::size_t n) const {
    if (n >= p_.block_horizon) throw horizon_error(label() + "block beyond horizon");
    if (p_.weighted_sup) return p_.weighted_sup(n);
    if (!p_.value) throw horizon_error(label() + "no weighted block supremum available");
    check_pointwise_block(n);
    double s = 0.0;
    for (std::uint64_t k = block_begin(n); k < block_end(n); ++k)
      s = std::max(s, static_cast<double>(k + 1) * modulus(p_.value(k)));
    return s;
  }

  LogRuns value_runs(double s_max) const {
    if (!p_.value_runs) throw horizon_error(label() + "no run-length form");
    return p_.value_runs(s_max);
  }
  LogRuns block_runs(double s_max) const {
    if (!p_.block_runs) throw horizon_error(label() + "no block run-length form");
    return p_.block_runs(s_max);
  }

  const Parts& parts() const { return p_; }

 private:
  std::string label() const { return p_.name.empty() ? std::string() : p_.name + ": "; }

  void check_pointwise_block(std::size_t n) const {
    if (n > kPointwiseBlockLimit)
      throw horizon_error(label() + "pointwise block sums refused beyond block " +
                          std::to_string(kPointwiseBlockLimit));
    if (block_end(n) > p_.value_horizon) throw horizon_error(label() + "block beyond pointwise data");
  }

  Parts p_;
};

using RealSequence = BlockSequence<double>;
using ComplexSequence = BlockSequence<std::complex<double>>;

template <class T>
std::vector<T> prefix_sums(std::span<const T> x, Summation mode) {
  std::vector<T> out(x.size());
  if (mode == Summation::compensated) {
    if constexpr (is_complex_v<T>) {
      CompensatedSum re, im;
      for (std::size_t i = 0; i < x.size(); ++i) {
        re.add(x[i].real());
        im.add(x[i].imag());
        out[i] = T(re.value(), im.value());
      }
    } else {
      CompensatedSum s;
      for (std::size_t i = 0; i < x.size(); ++i) {
        s.add(x[i]);
        out[i] = s.value();
      }
    }
    return out;
  }
  // Chunked: local running sums plus pairwise chunk totals keep the error
  // growth at O(N/chunk) rather than O(N).
  constexpr std::size_t kChunk = 256;
  T offset{};
  for (std::size_t c = 0; c < x.size(); c += kChunk) {
    std::size_t e = std::min(x.size(), c + kChunk);
    T local{};
    for (std::size_t i = c; i < e; ++i) {
      local += x[i];
      out[i] = offset + local;
    }
    offset += pairwise_sum<T>(x.subspan(c, e - c));
  }
  return out;
}

template <class T>
Truncation<T> partial_sums(const Truncation<T>& x) {
  return Truncation<T>(prefix_sums<T>(x.values(), x.summation()), x.summation());
}

template <class T>
Truncation<double> decreasing_rearrangement(const Truncation<T>& x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = modulus(x[i]);
  std::sort(v.begin(), v.end(), std::greater<>());
  return Truncation<double>(std::move(v), x.summation());
}

struct NormEstimate {
  double value = 0.0;
  std::size_t argmax = 0;
  // Running max still attained in the final 10% of the evaluated range.
  bool possibly_divergent = false;
};

inline bool in_final_tenth(std::size_t i, std::size_t n) { return n >= 10 && 10 * i >= 9 * n; }

// max over n < N of (n+1) x*_n
template <class T>
NormEstimate quasi_norm_l1inf(const Truncation<T>& x) {
  auto r = decreasing_rearrangement(x);
  NormEstimate e;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double w = static_cast<double>(i + 1) * r[i];
    if (w >= e.value && w > 0.0) {
      e.value = w;
      e.argmax = i;
    }
  }
  e.possibly_divergent = e.value > 0.0 && in_final_tenth(e.argmax, r.size());
  return e;
}

// Block-level form for sequences already ordered by nonincreasing modulus:
// max over blocks of sup (k+1)|x_k|. argmax is a block index.
template <class T>
NormEstimate quasi_norm_l1inf(const BlockSequence<T>& x, std::size_t n_blocks) {
  NormEstimate e;
  for (std::size_t n = 0; n < n_blocks; ++n) {
    double w = x.block_weighted_sup(n);
    if (w >= e.value && w > 0.0) {
      e.value = w;
      e.argmax = n;
    }
  }
  e.possibly_divergent = e.value > 0.0 && in_final_tenth(e.argmax, n_blocks);
  return e;
}

struct M1InfEstimate {
  double value = 0.0;
  std::size_t argmax = 0;
  // partial-sum/log(n+2) at the last evaluated prefix
  double final_ratio = 0.0;
  bool possibly_divergent = false;
  // ratio at every evaluated prefix
  std::vector<double> ratios;
};

namespace detail {

inline M1InfEstimate summarize_m1inf(std::vector<double> ratios) {
  M1InfEstimate e;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] >= e.value && ratios[i] > 0.0) {
      e.value = ratios[i];
      e.argmax = i;
    }
  }
  if (!ratios.empty()) e.final_ratio = ratios.back();
  e.possibly_divergent = e.value > 0.0 && in_final_tenth(e.argmax, ratios.size());
  e.ratios = std::move(ratios);
  return e;
}

}  // namespace detail

// sup over prefixes of (sum_{k<=n} x*_k) / log(n+2). The input is rearranged
// first, which leaves already decreasing nonnegative data unchanged.
template <class T>
M1InfEstimate norm_m1inf(const Truncation<T>& x) {
  auto r = decreasing_rearrangement(x);
  auto s = prefix_sums<double>(r.values(), r.summation());
  std::vector<double> ratios(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) ratios[i] = s[i] / std::log(static_cast<double>(i) + 2.0);
  return detail::summarize_m1inf(std::move(ratios));
}

// Block mode: evaluates at right endpoints n = 2^{m+1} - 2, where
// log(n+2) = (m+1) log 2. Requires nonnegative nonincreasing data.
inline M1InfEstimate norm_m1inf(const BlockSequence<double>& x, std::size_t n_blocks) {
  std::vector<double> ratios(n_blocks);
  CompensatedSum prefix;
  for (std::size_t m = 0; m < n_blocks; ++m) {
    double b = x.block_sum_at(m);
    if (b < 0.0) throw precondition_error("norm_m1inf: negative block sum");
    prefix.add(b);
    ratios[m] = prefix.value() / (static_cast<double>(m + 1) * kLog2);
  }
  return detail::summarize_m1inf(std::move(ratios));
}

// Sequence backed by a finite array. Indices past the data are outside the
// horizon rather than implicitly zero.
template <class T>
BlockSequence<T> sequence_from_values(const Truncation<T>& x, std::string name = "data") {
  auto data = std::make_shared<const std::vector<T>>(x.values().begin(), x.values().end());
  std::size_t n_full = static_cast<std::size_t>(std::bit_width(x.size() + 1)) - 1;
  std::vector<T> sums(n_full);
  for (std::size_t n = 0; n < n_full; ++n)
    sums[n] = pairwise_sum<T>(x.values().subspan(block_begin(n), block_end(n) - block_begin(n)));
  auto blocks = std::make_shared<const std::vector<T>>(std::move(sums));
  typename BlockSequence<T>::Parts p;
  p.name = std::move(name);
  p.value = [data](std::uint64_t k) { return (*data)[k]; };
  p.block = [blocks](std::size_t n) { return (*blocks)[n]; };
  p.weighted_sup = [data](std::size_t n) {
    double s = 0.0;
    for (std::uint64_t k = block_begin(n); k < block_end(n); ++k)
      s = std::max(s, static_cast<double>(k + 1) * modulus((*data)[k]));
    return s;
  };
  if constexpr (!is_complex_v<T>) {
    p.value_runs = [data](double) { return LogRuns::from_values(*data); };
  }
  p.sup_bound = x.sup_abs();
  p.block_horizon = n_full;
  p.value_horizon = x.size();
  return BlockSequence<T>(std::move(p));
}

// Sequence known only through its block sums b_0..b_{N-1}.
template <class T>
BlockSequence<T> sequence_from_block_sums(const Truncation<T>& b, std::string name = "blocks") {
  auto data = std::make_shared<const std::vector<T>>(b.values().begin(), b.values().end());
  typename BlockSequence<T>::Parts p;
  p.name = std::move(name);
  p.block = [data](std::size_t n) { return (*data)[n]; };
  if constexpr (!is_complex_v<T>) {
    p.block_runs = [data](double) { return LogRuns::from_values(*data); };
  }
  p.block_horizon = b.size();
  return BlockSequence<T>(std::move(p));
}

// CSV: one scalar or `re,im` per line. A header line
// `# granularity=pointwise|block` selects whether lines are values or block sums.
struct CsvSequence {
  Granularity granularity = Granularity::pointwise;
  bool complex = false;
  std::vector<std::complex<double>> values;
};

inline CsvSequence read_sequence_csv(std::istream& in) {
  CsvSequence out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto parse = [&](const std::string& tok) {
    std::string t = trim(tok);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v))
      throw precondition_error("csv line " + std::to_string(lineno) + ": bad number '" + t + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      auto pos = t.find("granularity=");
      if (pos != std::string::npos) {
        std::string g = trim(t.substr(pos + 12));
        if (g == "pointwise")
          out.granularity = Granularity::pointwise;
        else if (g == "block")
          out.granularity = Granularity::block;
        else
          throw precondition_error("csv: unknown granularity '" + g + "'");
      }
      continue;
    }
    auto comma = t.find(',');
    if (comma == std::string::npos) {
      out.values.emplace_back(parse(t), 0.0);
    } else {
      if (t.find(',', comma + 1) != std::string::npos)
        throw precondition_error("csv line " + std::to_string(lineno) + ": too many fields");
      out.values.emplace_back(parse(t.substr(0, comma)), parse(t.substr(comma + 1)));
      out.complex = true;
    }
  }
  if (out.values.empty()) throw precondition_error("csv: no values");
  return out;
}

inline CsvSequence read_sequence_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw error("cannot open '" + path + "'");
  return read_sequence_csv(f);
}

using AnySequence = std::variant<RealSequence, ComplexSequence>;

inline AnySequence sequence_from_csv(const CsvSequence& csv, const std::string& name) {
  auto build = [&](auto trunc) -> AnySequence {
    if (csv.granularity == Granularity::block) return sequence_from_block_sums(trunc, name);
    return sequence_from_values(trunc, name);
  };
  if (csv.complex) return build(ComplexTruncation(csv.values));
  std::vector<double> re(csv.values.size());
  for (std::size_t i = 0; i < re.size(); ++i) re[i] = csv.values[i].real();
  return build(RealTruncation(std::move(re)));
}

}  // namespace tracelab
