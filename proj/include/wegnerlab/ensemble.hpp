#pragma once

/// Order-independent Monte Carlo over disorder realizations.
///
/// Realization r draws its couplings from CounterStream(master_seed, r), so
/// its inputs do not depend on the worker count, on the scheduling, or on how
/// many realizations are requested. Per-realization results are buffered and
/// reduced in ascending r.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wegnerlab/errors.hpp"
#include "wegnerlab/model.hpp"
#include "wegnerlab/operator.hpp"
#include "wegnerlab/random.hpp"

namespace wegnerlab {

struct EnsembleConfig {
  std::uint64_t master_seed = 1;
  std::size_t realizations = 1000;
  CanonicalModel model;
  GridSpec grid;

  void validate() const {
    if (realizations < 1) throw ConfigError("need at least one realization", "run.realizations");
    grid.validate();
  }
};

struct EnsembleResult {
  std::size_t realizations = 0;
  std::size_t dimension = 0;
  std::vector<double> samples;  // row r holds realization r's statistic
  std::vector<double> mean;
  std::vector<double> standard_error;
  std::string seeds_digest;

  double sample(std::size_t r, std::size_t j) const { return samples[r * dimension + j]; }
};

/// Statistic contract: a pure function of (model, realization, grid).
using Statistic =
    std::function<std::vector<double>(const CanonicalModel&, const Realization&, const GridSpec&)>;

/// Called from worker threads with the number of finished realizations.
using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// The realization the ensemble uses for index r.
inline Realization ensemble_realization(const EnsembleConfig& config, std::size_t r) {
  CounterStream stream(config.master_seed, r);
  return sample_couplings(config.model.coupling, stream,
                          coupled_sites(config.model, config.grid.box_length),
                          config.grid.box_length);
}

/// Worker count from WEGNERLAB_WORKERS, else the hardware concurrency.
inline unsigned default_worker_count() {
  if (const char* env = std::getenv("WEGNERLAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

}  // namespace detail

/// Digest of the (seed, r) stream keys of the first `count` realizations.
inline std::string seeds_digest(std::uint64_t master_seed, std::size_t count) {
  std::uint64_t h = detail::mix64(master_seed ^ 0x243f6a8885a308d3ULL);
  for (std::size_t r = 0; r < count; ++r) h = detail::mix64(h ^ detail::mix64(r + 1));
  return detail::hex64(h);
}

/// out[i] = fn(i) for i < count on up to `workers` threads. If any call
/// throws, the exception of the lowest failing index is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, unsigned workers, F fn) {
  std::vector<T> out(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex failure_mutex;
  std::optional<std::size_t> failed_index;
  std::exception_ptr failure;
  auto work = [&] {
    while (!abort.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failed_index || i < *failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
        abort = true;
        return;
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline EnsembleResult run_ensemble(const EnsembleConfig& config, const Statistic& statistic,
                                   unsigned workers = 1, const ProgressCallback& progress = {}) {
  config.validate();
  const std::size_t count = config.realizations;
  std::vector<std::vector<double>> values(count);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> abort{false};
  std::mutex failure_mutex;
  std::optional<std::size_t> failed_index;
  std::string failure_message;

  auto work = [&] {
    while (!abort.load(std::memory_order_relaxed)) {
      const std::size_t r = next.fetch_add(1);
      if (r >= count) return;
      try {
        values[r] = statistic(config.model, ensemble_realization(config, r), config.grid);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failed_index || r < *failed_index) {
          failed_index = r;
          failure_message = e.what();
        }
        abort = true;
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) progress(finished, count);
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failed_index)
    throw EnsembleFailure("statistic failed on realization " + std::to_string(*failed_index) +
                              " (seed " + std::to_string(config.master_seed) +
                              "): " + failure_message,
                          config.master_seed, *failed_index);

  EnsembleResult out;
  out.realizations = count;
  out.dimension = values.front().size();
  out.samples.reserve(count * out.dimension);
  for (std::size_t r = 0; r < count; ++r) {
    if (values[r].size() != out.dimension)
      throw EnsembleFailure("statistic changed its dimension at realization " + std::to_string(r),
                            config.master_seed, r);
    out.samples.insert(out.samples.end(), values[r].begin(), values[r].end());
  }
  out.mean.assign(out.dimension, 0.0);
  out.standard_error.assign(out.dimension, 0.0);
  for (std::size_t r = 0; r < count; ++r)
    for (std::size_t j = 0; j < out.dimension; ++j) out.mean[j] += out.sample(r, j);
  for (double& m : out.mean) m /= static_cast<double>(count);
  if (count > 1) {
    for (std::size_t j = 0; j < out.dimension; ++j) {
      double ss = 0.0;
      for (std::size_t r = 0; r < count; ++r) {
        const double d = out.sample(r, j) - out.mean[j];
        ss += d * d;
      }
      const double sd = std::sqrt(ss / static_cast<double>(count - 1));
      out.standard_error[j] = sd / std::sqrt(static_cast<double>(count));
    }
  }
  out.seeds_digest = seeds_digest(config.master_seed, count);
  return out;
}

}  // namespace wegnerlab
