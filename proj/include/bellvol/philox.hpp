#pragma once

#include <array>
#include <cstdint>

namespace bellvol {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// Stateless: output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int r = 0; r < kRounds; ++r) {
      if (r > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// Maps 64 random bits onto [0, 1) with 52 bits of resolution via the
/// exponent trick (identical in the scalar and vector samplers).
inline double bits_to_unit(std::uint64_t bits) {
  const std::uint64_t pattern = (bits >> 12) | 0x3FF0000000000000ull;
  double d;
  static_assert(sizeof d == sizeof pattern);
  __builtin_memcpy(&d, &pattern, sizeof d);
  return d - 1.0;
}

/// Uniform coordinate `coord` of sample `index` for the given seed. Two
/// coordinates share one Philox block: counter = (index lo, index hi, coord/2, 0).
inline double uniform_coordinate(std::uint64_t seed, std::uint64_t index, std::uint32_t coord) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                static_cast<std::uint32_t>(index >> 32), coord / 2u, 0u};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const auto w = Philox4x32::generate(ctr, key);
  const std::uint64_t bits = (coord % 2u == 0u) ? (std::uint64_t{w[0]} << 32 | w[1])
                                                 : (std::uint64_t{w[2]} << 32 | w[3]);
  return bits_to_unit(bits);
}

}  // namespace bellvol
