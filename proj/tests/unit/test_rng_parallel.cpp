#include "ncbm/parallel.hpp"
#include "ncbm/rng.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <set>
#include <stdexcept>
#include <vector>

using namespace ncbm;

TEST(RngStream, Deterministic) {
  RngStream a(42, 3, 1);
  RngStream b(42, 3, 1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
  EXPECT_EQ(RngStream(42, 3).key(), RngStream(42, 3).key());
}

TEST(RngStream, SubstreamIgnoresParentConsumption) {
  RngStream fresh(7);
  RngStream used(7);
  for (int i = 0; i < 17; ++i) used.normal();
  RngStream c1 = fresh.substream(5);
  RngStream c2 = used.substream(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(c1.uniform(), c2.uniform());
}

TEST(RngStream, DistinctKeys) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t r = 0; r < 200; ++r) {
      keys.insert(RngStream(s, r).key());
      keys.insert(RngStream(s, r, 0).key());
      keys.insert(RngStream(s, r, 1).key());
    }
  }
  EXPECT_EQ(keys.size(), 4u * 200u * 3u);
}

TEST(RngStream, UniformOpenInterval) {
  RngStream rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngStream, DefaultSeedFromEnvironment) {
  ::setenv("NCBM_SEED", "987654321", 1);
  EXPECT_EQ(default_seed(), 987654321u);
  ::unsetenv("NCBM_SEED");
}

TEST(ParallelFor, ResultsIndependentOfThreadCount) {
  auto run = [](unsigned threads) {
    set_thread_count(threads);
    std::vector<double> out(1000);
    parallel_for(out.size(), [&](std::size_t i) {
      RngStream rng(5, i);
      out[i] = rng.normal();
    });
    return out;
  };
  const auto a = run(1);
  const auto b = run(4);
  const auto c = run(7);
  set_thread_count(0);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(ParallelFor, PropagatesExceptions) {
  set_thread_count(3);
  EXPECT_THROW(parallel_for(100, [](std::size_t i) {
                 if (i == 57) throw std::runtime_error("boom");
               }),
               std::runtime_error);
  set_thread_count(0);
}
