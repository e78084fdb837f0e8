#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "satpin/parallel.hpp"

using namespace satpin;

TEST(Parallel, VisitsEveryIndexOnce) {
  for (unsigned workers : {1u, 3u, 8u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(0, hits.size(), [&](std::size_t i) { ++hits[i]; }, workers);
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(Parallel, EmptyRangeIsNoOp) {
  std::atomic<int> n{0};
  parallel_for(5, 5, [&](std::size_t) { ++n; }, 4);
  EXPECT_EQ(n.load(), 0);
}

TEST(Parallel, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(
                   0, 100,
                   [](std::size_t i) {
                     if (i == 77) throw std::runtime_error("boom");
                   },
                   4),
               std::runtime_error);
}
