#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tracelab/common.hpp"
#include "tracelab/log_runs.hpp"

using namespace tracelab;

TEST(Blocks, IndexRanges) {
  EXPECT_EQ(block_begin(0), 0u);
  EXPECT_EQ(block_end(0), 1u);
  EXPECT_EQ(block_begin(3), 7u);
  EXPECT_EQ(block_end(3), 15u);
  for (std::uint64_t k = 0; k < 5000; ++k) {
    std::size_t n = block_of(k);
    EXPECT_LE(block_begin(n), k);
    EXPECT_LT(k, block_end(n));
  }
}

TEST(Summation, PairwiseMatchesExactIntegerSum) {
  auto s = pairwise_sum<double>(0, 1u << 20, [](std::uint64_t k) { return static_cast<double>(k); });
  EXPECT_EQ(s, 0.5 * static_cast<double>(1u << 20) * static_cast<double>((1u << 20) - 1));
}

TEST(Summation, CompensatedRecoversCancelledTerms) {
  std::vector<double> v = {1.0, 1e100, 1.0, -1e100};
  EXPECT_EQ(compensated_sum<double>(v), 2.0);
}

TEST(Summation, EmptyRangeIsZero) { EXPECT_EQ(pairwise_sum<double>(5, 5, [](std::uint64_t) { return 1.0; }), 0.0); }

TEST(ParallelFor, VisitsEveryIndexOnce) {
  setenv("TRACELAB_THREADS", "4", 1);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  unsetenv("TRACELAB_THREADS");
}

TEST(ParallelFor, PropagatesExceptions) {
  setenv("TRACELAB_THREADS", "3", 1);
  EXPECT_THROW(parallel_for(100, [](std::size_t i) {
                 if (i == 57) throw std::runtime_error("boom");
               }),
               std::runtime_error);
  unsetenv("TRACELAB_THREADS");
}

TEST(ParallelFor, WorkerCountFromEnvironment) {
  setenv("TRACELAB_THREADS", "2", 1);
  EXPECT_EQ(worker_count(), 2u);
  setenv("TRACELAB_THREADS", "junk", 1);
  EXPECT_GE(worker_count(), 1u);
  unsetenv("TRACELAB_THREADS");
}

TEST(LogRuns, MergesEqualNeighbours) {
  LogRuns r(1.0);
  r.push(0.5, 2.0);
  r.push(0.25, 2.0);
  r.push(0.0, 7.0);
  r.push(1.0, 3.0);
  ASSERT_EQ(r.runs().size(), 2u);
  EXPECT_DOUBLE_EQ(r.runs()[0].width, 0.75);
  EXPECT_DOUBLE_EQ(r.runs()[1].s_begin, 0.75);
  EXPECT_DOUBLE_EQ(r.s_end(), 1.75);
  EXPECT_THROW(r.push(-1.0, 1.0), precondition_error);
}

TEST(LogRuns, FromValuesCoversLogHorizon) {
  std::vector<double> z = {5.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0, 1.0};
  auto r = LogRuns::from_values(z);
  EXPECT_EQ(r.head(), 5.0);
  EXPECT_NEAR(r.s_end(), std::log(8.0), 1e-15);
  ASSERT_EQ(r.runs().size(), 3u);
  EXPECT_NEAR(r.runs()[0].width, std::log(3.0), 1e-15);
  EXPECT_NEAR(r.runs()[1].width, std::log(7.0 / 3.0), 1e-15);
  auto s = r.scaled(2.0);
  EXPECT_EQ(s.head(), 10.0);
  EXPECT_EQ(s.runs()[1].value, 4.0);
}
