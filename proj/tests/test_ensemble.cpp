#include <gtest/gtest.h>

#include "wegnerlab/ensemble.hpp"

using namespace wegnerlab;

namespace {

std::vector<double> coupling_moments(const CanonicalModel&, const Realization& r, const GridSpec&) {
  double s = 0.0, s2 = 0.0;
  for (double w : r.couplings) {
    s += w;
    s2 += w * w;
  }
  return {s, s2, static_cast<double>(r.stream_id)};
}

EnsembleConfig small_config(std::size_t count) {
  EnsembleConfig c;
  c.master_seed = 12345;
  c.realizations = count;
  c.grid.box_length = 8;
  c.grid.points_per_cell = 8;
  return c;
}

TEST(Ensemble, ResultsIndependentOfWorkerCount) {
  const auto config = small_config(64);
  const auto one = run_ensemble(config, coupling_moments, 1);
  for (unsigned w : {2u, 3u, 8u}) {
    const auto many = run_ensemble(config, coupling_moments, w);
    EXPECT_EQ(many.samples, one.samples);
    EXPECT_EQ(many.mean, one.mean);
    EXPECT_EQ(many.standard_error, one.standard_error);
    EXPECT_EQ(many.seeds_digest, one.seeds_digest);
  }
}

TEST(Ensemble, PrefixOfLargerRunIsSmallerRun) {
  const auto small = run_ensemble(small_config(10), coupling_moments, 4);
  const auto large = run_ensemble(small_config(25), coupling_moments, 4);
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(small.sample(r, j), large.sample(r, j));
  EXPECT_NE(small.seeds_digest, large.seeds_digest);
}

TEST(Ensemble, RealizationsUseDistinctStreams) {
  const auto result = run_ensemble(small_config(5), coupling_moments, 2);
  for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(result.sample(r, 2), static_cast<double>(r));
  EXPECT_NE(result.sample(0, 0), result.sample(1, 0));
}

TEST(Ensemble, MeanAndStandardError) {
  const auto result = run_ensemble(small_config(4), coupling_moments, 1);
  double mean = 0.0;
  for (std::size_t r = 0; r < 4; ++r) mean += result.sample(r, 0);
  mean /= 4;
  double ss = 0.0;
  for (std::size_t r = 0; r < 4; ++r) ss += (result.sample(r, 0) - mean) * (result.sample(r, 0) - mean);
  EXPECT_DOUBLE_EQ(result.mean[0], mean);
  EXPECT_DOUBLE_EQ(result.standard_error[0], std::sqrt(ss / 3.0) / 2.0);
}

TEST(Ensemble, FailureReportsLowestRealization) {
  auto failing = [](const CanonicalModel&, const Realization& r, const GridSpec&) -> std::vector<double> {
    if (r.stream_id == 7 || r.stream_id == 19) throw NumericalFault("boom");
    return {1.0};
  };
  for (unsigned w : {1u, 4u}) {
    try {
      run_ensemble(small_config(32), failing, w);
      FAIL() << "expected EnsembleFailure";
    } catch (const EnsembleFailure& e) {
      EXPECT_EQ(e.realization(), 7u);
      EXPECT_EQ(e.master_seed(), 12345u);
    }
  }
}

TEST(Ensemble, RejectsEmptyRun) {
  EXPECT_THROW(run_ensemble(small_config(0), coupling_moments), ConfigError);
}

TEST(Ensemble, ProgressReachesTotal) {
  std::atomic<std::size_t> last{0};
  run_ensemble(small_config(20), coupling_moments, 3, [&](std::size_t done, std::size_t total) {
    EXPECT_EQ(total, 20u);
    std::size_t prev = last.load();
    while (done > prev && !last.compare_exchange_weak(prev, done)) {
    }
  });
  EXPECT_EQ(last.load(), 20u);
}

TEST(Ensemble, WorkerCountFromEnvironment) {
  setenv("WEGNERLAB_WORKERS", "3", 1);
  EXPECT_EQ(default_worker_count(), 3u);
  setenv("WEGNERLAB_WORKERS", "junk", 1);
  EXPECT_GE(default_worker_count(), 1u);
  unsetenv("WEGNERLAB_WORKERS");
}

}  // namespace
