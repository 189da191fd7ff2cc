#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace wegnerlab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Pure function of (counter, key).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Counter-mode random stream keyed by (master seed, stream id).
///
/// Draw i of stream r is a pure function of (seed, r, i): streams need no
/// shared state, and the first draws of stream r never depend on how many
/// other streams exist. Satisfies UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  CounterStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (buffered_ == 0) refill();
    return buffer_[2 - buffered_--];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  /// Number of 64-bit words drawn so far.
  std::uint64_t position() const { return 2 * block_ - buffered_; }

 private:
  void refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox4x32(ctr, key);
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    buffered_ = 2;
    ++block_;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace wegnerlab
