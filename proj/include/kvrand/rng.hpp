#ifndef KVRAND_RNG_HPP
#define KVRAND_RNG_HPP

#include <cstdint>
#include <limits>

namespace kvrand {

__extension__ using uint128 = unsigned __int128;

/**
 * Seedable uniform source with independent streams.
 *
 * The generator is PCG-XSL-RR 128/64 (period 2^128). The seed and the stream
 * id are each passed through SplitMix64 before seeding: the seed selects the
 * starting state, the stream id selects the odd increment. This algorithm is
 * part of the file-format contract: changing it changes every sample file.
 *
 * Satisfies UniformRandomBitGenerator so it can drive <random> adaptors.
 */
class UniformSource {
 public:
  using result_type = std::uint64_t;

  explicit UniformSource(std::uint64_t seed, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Unbiased integer in [0, n); n must be >= 1.
  std::uint64_t next_index(std::uint64_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 64-bit words produced so far.
  std::uint64_t drawn() const noexcept { return drawn_; }

 private:
  uint128 state_ = 0;
  uint128 increment_ = 0;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t drawn_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace kvrand

#endif  // KVRAND_RNG_HPP
