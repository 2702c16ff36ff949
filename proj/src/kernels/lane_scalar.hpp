#pragma once

// Width-1 lanes. Included inside the per-ISA namespace of each kernel TU.

struct LaneF1 {
  static constexpr std::size_t width = 1;
  using Mask = bool;

  double v;

  LaneF1() = default;
  LaneF1(double x) : v(x) {}

  static LaneF1 load(const double* p) { return LaneF1(*p); }
  void store(double* p) const { *p = v; }

  friend LaneF1 operator+(LaneF1 a, LaneF1 b) { return a.v + b.v; }
  friend LaneF1 operator-(LaneF1 a, LaneF1 b) { return a.v - b.v; }
  friend LaneF1 operator*(LaneF1 a, LaneF1 b) { return a.v * b.v; }
  friend LaneF1 neg(LaneF1 a) { return -a.v; }
  friend LaneF1 abs(LaneF1 a) { return std::fabs(a.v); }
  friend LaneF1 sqrt(LaneF1 a) { return std::sqrt(a.v); }
  friend LaneF1 floor(LaneF1 a) { return std::floor(a.v); }
  friend LaneF1 max(LaneF1 a, LaneF1 b) { return a.v > b.v ? a.v : b.v; }
  friend Mask cmp_eq(LaneF1 a, LaneF1 b) { return a.v == b.v; }
  friend Mask cmp_ge(LaneF1 a, LaneF1 b) { return a.v >= b.v; }
  friend LaneF1 select(Mask m, LaneF1 a, LaneF1 b) { return m ? a : b; }
};

inline bool mask_or(bool a, bool b) { return a || b; }

struct LaneU1 {
  static constexpr std::size_t width = 1;

  std::uint64_t v;

  LaneU1() = default;
  LaneU1(std::uint64_t x) : v(x) {}

  static LaneU1 iota(std::uint64_t base) { return LaneU1(base); }

  friend LaneU1 operator^(LaneU1 a, LaneU1 b) { return a.v ^ b.v; }
  friend LaneU1 operator&(LaneU1 a, LaneU1 b) { return a.v & b.v; }
  friend LaneU1 operator|(LaneU1 a, LaneU1 b) { return a.v | b.v; }
  // Low 32 bits of each operand, full 64-bit product.
  friend LaneU1 mul32(LaneU1 a, LaneU1 b) {
    return (a.v & 0xFFFFFFFFull) * (b.v & 0xFFFFFFFFull);
  }
  // (bits >> 12 | exponent of 1.0) - 1.0
  friend LaneF1 to_unit(LaneU1 bits) {
    const std::uint64_t pattern = (bits.v >> 12) | 0x3FF0000000000000ull;
    double d;
    std::memcpy(&d, &pattern, sizeof d);
    return d - 1.0;
  }
};

template <int N>
LaneU1 shl(LaneU1 a) { return a.v << N; }
template <int N>
LaneU1 shr(LaneU1 a) { return a.v >> N; }

template <>
struct LaneTraits<LaneF1> {
  using U = LaneU1;
};
