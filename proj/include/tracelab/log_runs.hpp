#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "tracelab/common.hpp"

namespace tracelab {

struct LogRun {
  double s_begin;
  double width;
  double value;
};

// Run-length form of pi(z) in the variable s = log t. The step function
// z_k on [k, k+1) is stored as `head` on (0, 1] followed by constant runs
// covering [0, s_end) in s. Generators build these analytically, which
// reaches indices far beyond anything that could be materialised.
class LogRuns {
 public:
  explicit LogRuns(double head) : head_(head) {}

  // Appends a run of the given log-width, merging equal neighbours.
  void push(double width, double value) {
    if (!(width >= 0.0) || !std::isfinite(value))
      throw precondition_error("LogRuns: invalid run");
    if (width == 0.0) return;
    if (!runs_.empty() && runs_.back().value == value) {
      runs_.back().width += width;
    } else {
      runs_.push_back({s_end_, width, value});
    }
    s_end_ += width;
  }

  double head() const { return head_; }
  const std::vector<LogRun>& runs() const { return runs_; }
  double s_end() const { return s_end_; }

  LogRuns scaled(double c) const {
    LogRuns out(head_ * c);
    for (const auto& r : runs_) out.push(r.width, r.value * c);
    return out;
  }

  // Index-domain values z_0..z_{N-1}; the horizon ends at s = log N.
  static LogRuns from_values(std::span<const double> z) {
    if (z.empty()) throw precondition_error("LogRuns: empty sequence");
    LogRuns out(z[0]);
    std::size_t k = 1;
    while (k < z.size()) {
      std::size_t e = k;
      while (e + 1 < z.size() && z[e + 1] == z[k]) ++e;
      double width = std::log1p(static_cast<double>(e + 1 - k) / static_cast<double>(k));
      out.push(width, z[k]);
      k = e + 1;
    }
    return out;
  }

 private:
  double head_;
  std::vector<LogRun> runs_;
  double s_end_ = 0.0;
};

}  // namespace tracelab
