#pragma once

// 4 x f64 lanes on AVX2. Only FMA-free instructions are used so results
// match the width-1 lanes bit for bit.

struct LaneF4 {
  static constexpr std::size_t width = 4;
  using Mask = __m256d;

  __m256d v;

  LaneF4() = default;
  LaneF4(__m256d x) : v(x) {}
  LaneF4(double x) : v(_mm256_set1_pd(x)) {}

  static LaneF4 load(const double* p) { return _mm256_loadu_pd(p); }
  void store(double* p) const { _mm256_storeu_pd(p, v); }

  friend LaneF4 operator+(LaneF4 a, LaneF4 b) { return _mm256_add_pd(a.v, b.v); }
  friend LaneF4 operator-(LaneF4 a, LaneF4 b) { return _mm256_sub_pd(a.v, b.v); }
  friend LaneF4 operator*(LaneF4 a, LaneF4 b) { return _mm256_mul_pd(a.v, b.v); }
  friend LaneF4 neg(LaneF4 a) { return _mm256_xor_pd(a.v, _mm256_set1_pd(-0.0)); }
  friend LaneF4 abs(LaneF4 a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a.v); }
  friend LaneF4 sqrt(LaneF4 a) { return _mm256_sqrt_pd(a.v); }
  friend LaneF4 floor(LaneF4 a) { return _mm256_floor_pd(a.v); }
  // Same NaN/tie behaviour as `a > b ? a : b`.
  friend LaneF4 max(LaneF4 a, LaneF4 b) {
    return _mm256_blendv_pd(b.v, a.v, _mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ));
  }
  friend Mask cmp_eq(LaneF4 a, LaneF4 b) { return _mm256_cmp_pd(a.v, b.v, _CMP_EQ_OQ); }
  friend Mask cmp_ge(LaneF4 a, LaneF4 b) { return _mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ); }
  friend LaneF4 select(Mask m, LaneF4 a, LaneF4 b) { return _mm256_blendv_pd(b.v, a.v, m); }
};

inline __m256d mask_or(__m256d a, __m256d b) { return _mm256_or_pd(a, b); }

struct LaneU4 {
  static constexpr std::size_t width = 4;

  __m256i v;

  LaneU4() = default;
  LaneU4(__m256i x) : v(x) {}
  LaneU4(std::uint64_t x) : v(_mm256_set1_epi64x(static_cast<long long>(x))) {}

  static LaneU4 iota(std::uint64_t base) {
    return _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(base)),
                            _mm256_set_epi64x(3, 2, 1, 0));
  }

  friend LaneU4 operator^(LaneU4 a, LaneU4 b) { return _mm256_xor_si256(a.v, b.v); }
  friend LaneU4 operator&(LaneU4 a, LaneU4 b) { return _mm256_and_si256(a.v, b.v); }
  friend LaneU4 operator|(LaneU4 a, LaneU4 b) { return _mm256_or_si256(a.v, b.v); }
  friend LaneU4 mul32(LaneU4 a, LaneU4 b) { return _mm256_mul_epu32(a.v, b.v); }
  friend LaneF4 to_unit(LaneU4 bits) {
    const __m256i pattern =
        _mm256_or_si256(_mm256_srli_epi64(bits.v, 12), _mm256_set1_epi64x(0x3FF0000000000000ll));
    return _mm256_sub_pd(_mm256_castsi256_pd(pattern), _mm256_set1_pd(1.0));
  }
};

template <int N>
LaneU4 shl(LaneU4 a) { return _mm256_slli_epi64(a.v, N); }
template <int N>
LaneU4 shr(LaneU4 a) { return _mm256_srli_epi64(a.v, N); }

template <>
struct LaneTraits<LaneF4> {
  using U = LaneU4;
};
