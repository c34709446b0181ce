#include "kvrand/rng.hpp"

namespace kvrand {

namespace {

constexpr uint128 kMultiplier =
    (static_cast<uint128>(2549297995355413924ULL) << 64) | 4865540595714422341ULL;

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

UniformSource::UniformSource(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  const std::uint64_t s_hi = splitmix64(seed);
  const std::uint64_t s_lo = splitmix64(s_hi ^ 0xda3e39cb94b95bdbULL);
  const std::uint64_t i_hi = splitmix64(stream_id ^ 0x853c49e6748fea9bULL);
  const std::uint64_t i_lo = splitmix64(i_hi);
  increment_ = ((static_cast<uint128>(i_hi) << 64) | i_lo) | 1u;
  state_ = 0;
  state_ = state_ * kMultiplier + increment_;
  state_ += (static_cast<uint128>(s_hi) << 64) | s_lo;
  state_ = state_ * kMultiplier + increment_;
}

std::uint64_t UniformSource::next_u64() {
  state_ = state_ * kMultiplier + increment_;
  ++drawn_;
  const auto hi = static_cast<std::uint64_t>(state_ >> 64);
  const auto lo = static_cast<std::uint64_t>(state_);
  const unsigned rot = static_cast<unsigned>(hi >> 58);
  const std::uint64_t x = hi ^ lo;
  return (x >> rot) | (x << ((64u - rot) & 63u));
}

std::uint64_t UniformSource::next_index(std::uint64_t n) {
  // Reject the 2^64 mod n lowest words so every residue is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

}  // namespace kvrand
