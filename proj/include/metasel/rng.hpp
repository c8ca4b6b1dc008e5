#pragma once

#include <cstdint>

namespace metasel {

// PCG64 (XSL-RR 128/64). Distinct stream ids select distinct odd increments,
// giving independent sequences for the same seed.
class Rng {
  using u128 = unsigned __int128;

 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : state_(0), inc_((static_cast<u128>(stream_id) << 1u) | 1u) {
    next_u64();
    state_ += seed;
    next_u64();
  }

  std::uint64_t next_u64() {
    const u128 old = state_;
    state_ = old * mult_ + inc_;
    const std::uint64_t xored =
        static_cast<std::uint64_t>(old >> 64) ^ static_cast<std::uint64_t>(old);
    const unsigned rot = static_cast<unsigned>(old >> 122);
    return (xored >> rot) | (xored << ((-rot) & 63u));
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static constexpr u128 mult_ =
      (static_cast<u128>(2549297995355413924ULL) << 64) | 4865540595714422341ULL;
  u128 state_;
  u128 inc_;
};

}  // namespace metasel
