#pragma once

// Lane-generic kernel bodies. Included inside a per-ISA namespace after the
// lane headers; every function is instantiated once per lane type.

constexpr double kTwoPiK = 6.283185307179586476925286766559;

// Cephes sin/cos minimax coefficients on [-pi/4, pi/4].
constexpr double kSinCoef[6] = {1.58962301576546568060E-10, -2.50507477628578072866E-8,
                                2.75573136213857245213E-6,  -1.98412698295895385996E-4,
                                8.33333333332211858878E-3,  -1.66666666666666307295E-1};
constexpr double kCosCof[6] = {-1.13585365213876817300E-11, 2.08757008419747316778E-9,
                               -2.75573141792967388112E-7,  2.48015872888517045348E-5,
                               -1.38888888888730564116E-3,  4.16666666666665929218E-2};

/// sin and cos of 2pi*t. Reduction is done in turns: t - q/4 is exact, so
/// the reduced angle carries a single rounding.
template <class F>
inline void sincos_turns_lane(F t, F& s_out, F& c_out) {
  const F q = floor(t * F(4.0) + F(0.5));
  const F r = (t - q * F(0.25)) * F(kTwoPiK);
  const F z = r * r;

  F ps = F(kSinCoef[0]);
  F pc = F(kCosCof[0]);
  for (int n = 1; n < 6; ++n) {
    ps = ps * z + F(kSinCoef[n]);
    pc = pc * z + F(kCosCof[n]);
  }
  const F sin_r = r + r * z * ps;
  const F cos_r = F(1.0) - F(0.5) * z + z * z * pc;

  const F quadrant = q - F(4.0) * floor(q * F(0.25));
  const auto q1 = cmp_eq(quadrant, F(1.0));
  const auto q2 = cmp_eq(quadrant, F(2.0));
  const auto q3 = cmp_eq(quadrant, F(3.0));
  const auto swap = mask_or(q1, q3);
  F s = select(swap, cos_r, sin_r);
  F c = select(swap, sin_r, cos_r);
  s = select(cmp_ge(quadrant, F(2.0)), neg(s), s);
  c = select(mask_or(q1, q2), neg(c), c);
  s_out = s;
  c_out = c;
}

template <class Wide, class Narrow, class Body>
inline void for_lanes(std::size_t count, Body&& body) {
  std::size_t i = 0;
  for (; i + Wide::width <= count; i += Wide::width) body(Wide{}, i);
  for (; i < count; ++i) body(Narrow{}, i);
}

// ---------------------------------------------------------------------------
// Philox4x32-10 fill

struct RoundKeys {
  std::uint64_t k0[10];
  std::uint64_t k1[10];
};

inline RoundKeys round_keys(std::uint64_t seed) {
  RoundKeys rk{};
  std::uint32_t a = static_cast<std::uint32_t>(seed);
  std::uint32_t b = static_cast<std::uint32_t>(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      a += 0x9E3779B9u;
      b += 0xBB67AE85u;
    }
    rk.k0[r] = a;
    rk.k1[r] = b;
  }
  return rk;
}

template <class F>
inline void fill_lane(const RoundKeys& rk, std::uint64_t index, int coords, double* out,
                      std::size_t stride, std::size_t i) {
  using U = typename LaneTraits<F>::U;
  const U lo_mask(0xFFFFFFFFull);
  const U m0(0xD2511F53ull);
  const U m1(0xCD9E8D57ull);
  const U idx = U::iota(index);
  const U c0 = idx & lo_mask;
  const U c1 = shr<32>(idx);
  for (int g = 0; 2 * g < coords; ++g) {
    U x0 = c0, x1 = c1, x2(static_cast<std::uint64_t>(g)), x3(std::uint64_t{0});
    for (int r = 0; r < 10; ++r) {
      const U p0 = mul32(m0, x0);
      const U p1 = mul32(m1, x2);
      x0 = shr<32>(p1) ^ x1 ^ U(rk.k0[r]);
      x1 = p1 & lo_mask;
      x2 = shr<32>(p0) ^ x3 ^ U(rk.k1[r]);
      x3 = p0 & lo_mask;
    }
    to_unit(shl<32>(x0) | x1).store(out + static_cast<std::size_t>(2 * g) * stride + i);
    if (2 * g + 1 < coords) {
      to_unit(shl<32>(x2) | x3).store(out + static_cast<std::size_t>(2 * g + 1) * stride + i);
    }
  }
}

// ---------------------------------------------------------------------------
// Qubit functionals

template <class F>
struct Dir {
  F x, y, z;
};

template <class F>
inline Dir<F> load_direction(const double* coords, std::size_t stride, std::size_t i, int k) {
  const F u = F::load(coords + static_cast<std::size_t>(2 * k) * stride + i);
  const F t = F::load(coords + static_cast<std::size_t>(2 * k + 1) * stride + i);
  const F ct = u * F(2.0) - F(1.0);
  const F st = sqrt(max(F(1.0) - ct * ct, F(0.0)));
  F s, c;
  sincos_turns_lane(t, s, c);
  return {st * c, st * s, ct};
}

template <class F>
inline Dir<F> apply_t(const QubitCorrelationData& q, const Dir<F>& b) {
  return {F(q.T[0][0]) * b.x + F(q.T[0][1]) * b.y + F(q.T[0][2]) * b.z,
          F(q.T[1][0]) * b.x + F(q.T[1][1]) * b.y + F(q.T[1][2]) * b.z,
          F(q.T[2][0]) * b.x + F(q.T[2][1]) * b.y + F(q.T[2][2]) * b.z};
}

template <class F>
inline F dot3(const Dir<F>& a, const Dir<F>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class F>
inline F dot3(const Dir<F>& a, const Vec3& b) {
  return a.x * F(b[0]) + a.y * F(b[1]) + a.z * F(b[2]);
}

template <class F>
inline F chsh_lane(const BatchProblem& p, const double* coords, std::size_t stride, std::size_t i) {
  const auto a = load_direction<F>(coords, stride, i, 0);
  const auto b = load_direction<F>(coords, stride, i, 1);
  const auto c = load_direction<F>(coords, stride, i, 2);
  const auto d = load_direction<F>(coords, stride, i, 3);
  const auto tb = apply_t(p.qubit, b);
  const auto td = apply_t(p.qubit, d);
  return abs(dot3(a, tb) - dot3(a, td)) + dot3(c, td) + dot3(c, tb);
}

template <class F>
inline F bell_original_lane(const BatchProblem& p, const double* coords, std::size_t stride,
                            std::size_t i) {
  const auto a = load_direction<F>(coords, stride, i, 0);
  const auto b = load_direction<F>(coords, stride, i, 1);
  const auto d = load_direction<F>(coords, stride, i, 2);
  const auto tb = apply_t(p.qubit, b);
  const auto td = apply_t(p.qubit, d);
  return abs(dot3(a, tb) - dot3(a, td)) + dot3(d, td) + dot3(d, tb);
}

template <class F>
inline F i3322_lane(const BatchProblem& p, const double* coords, std::size_t stride, std::size_t i) {
  Dir<F> alice[3], bob_t[3];
  F ra[3], rb[3];
  for (int k = 0; k < 3; ++k) {
    alice[k] = load_direction<F>(coords, stride, i, k);
    const auto b = load_direction<F>(coords, stride, i, 3 + k);
    bob_t[k] = apply_t(p.qubit, b);
    ra[k] = dot3(alice[k], p.qubit.r_a);
    rb[k] = dot3(b, p.qubit.r_b);
  }
  auto ppp = [&](int x, int y) {
    return F(0.25) * (F(1.0) + ra[x] + rb[y] + dot3(alice[x], bob_t[y]));
  };
  const F pa1 = F(0.5) * (F(1.0) + ra[0]);
  const F pb1 = F(0.5) * (F(1.0) + rb[0]);
  const F pb2 = F(0.5) * (F(1.0) + rb[1]);
  return ppp(0, 0) + ppp(0, 1) + ppp(0, 2) + ppp(1, 0) + ppp(1, 1) - ppp(1, 2) + ppp(2, 0) -
         ppp(2, 1) - pa1 - F(2.0) * pb1 - pb2;
}

// ---------------------------------------------------------------------------
// CGLMP

template <int D>
struct Roots {
  double re[D][D];
  double im[D][D];
};

template <int D>
inline const Roots<D>& roots_of_unity() {
  static const Roots<D> table = [] {
    Roots<D> r{};
    for (int j = 0; j < D; ++j) {
      for (int m = 0; m < D; ++m) {
        const int e = (j * m) % D;
        r.re[j][m] = std::cos(kTwoPiK * e / D);
        r.im[j][m] = std::sin(kTwoPiK * e / D);
      }
    }
    // Exact values where they exist, so d = 4 multiplies by 0 and +-1.
    for (int j = 0; j < D; ++j) {
      for (int m = 0; m < D; ++m) {
        if (std::fabs(r.re[j][m]) < 1e-15) r.re[j][m] = 0.0;
        if (std::fabs(r.im[j][m]) < 1e-15) r.im[j][m] = 0.0;
      }
    }
    return r;
  }();
  return table;
}

template <class F, int D>
inline F cglmp_lane(const BatchProblem& p, const double* coords, std::size_t stride, std::size_t i) {
  const auto& w = roots_of_unity<D>();
  F ac[2][D], as[2][D], bc[2][D], bs[2][D];
  for (int s = 0; s < 2; ++s) {
    for (int j = 0; j < D; ++j) {
      sincos_turns_lane(F::load(coords + static_cast<std::size_t>(s * D + j) * stride + i), as[s][j],
                        ac[s][j]);
      sincos_turns_lane(F::load(coords + static_cast<std::size_t>(2 * D + s * D + j) * stride + i),
                        bs[s][j], bc[s][j]);
    }
  }
  // diff[a][b][m] = P(A_a - B_b = m mod D)
  F diff[2][2][D];
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      F zr[D], zi[D];
      for (int j = 0; j < D; ++j) {
        const F amp(p.amp[static_cast<std::size_t>(j)]);
        zr[j] = amp * (ac[a][j] * bc[b][j] - as[a][j] * bs[b][j]);
        zi[j] = amp * (as[a][j] * bc[b][j] + ac[a][j] * bs[b][j]);
      }
      for (int m = 0; m < D; ++m) {
        F fr = zr[0];
        F fi = zi[0];
        for (int j = 1; j < D; ++j) {
          fr = fr + (zr[j] * F(w.re[j][m]) - zi[j] * F(w.im[j][m]));
          fi = fi + (zr[j] * F(w.im[j][m]) + zi[j] * F(w.re[j][m]));
        }
        diff[a][b][m] = fr * fr + fi * fi + F(p.noise_offset);
      }
    }
  }
  auto at = [&](int a, int b, int m) -> const F& { return diff[a][b][((m % D) + D) % D]; };
  F total(0.0);
  for (int k = 0; k < D / 2; ++k) {
    const F weight(1.0 - 2.0 * k / (D - 1.0));
    const F plus = at(0, 0, k) + at(1, 0, -k - 1) + at(1, 1, k) + at(0, 1, -k);
    const F minus = at(0, 0, -k - 1) + at(1, 0, k) + at(1, 1, -k - 1) + at(0, 1, k + 1);
    total = total + weight * (plus - minus);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Entry points

template <class Wide, class Narrow>
inline void fill_uniforms_impl(std::uint64_t seed, std::uint64_t first_index, std::size_t count,
                               int coords, double* out, std::size_t stride) {
  const RoundKeys rk = round_keys(seed);
  for_lanes<Wide, Narrow>(count, [&](auto tag, std::size_t i) {
    using F = decltype(tag);
    fill_lane<F>(rk, first_index + i, coords, out, stride, i);
  });
}

template <class Wide, class Narrow>
inline void evaluate_batch_impl(const BatchProblem& p, const double* coords, std::size_t stride,
                                std::size_t count, double* values) {
  auto run = [&](auto lane_fn) {
    for_lanes<Wide, Narrow>(count,
                            [&](auto tag, std::size_t i) { lane_fn(tag, i).store(values + i); });
  };
  switch (p.kind) {
    case FunctionalKind::chsh:
      run([&](auto tag, std::size_t i) { return chsh_lane<decltype(tag)>(p, coords, stride, i); });
      break;
    case FunctionalKind::bell_original:
      run([&](auto tag, std::size_t i) {
        return bell_original_lane<decltype(tag)>(p, coords, stride, i);
      });
      break;
    case FunctionalKind::i3322:
      run([&](auto tag, std::size_t i) { return i3322_lane<decltype(tag)>(p, coords, stride, i); });
      break;
    case FunctionalKind::cglmp3:
      run([&](auto tag, std::size_t i) { return cglmp_lane<decltype(tag), 3>(p, coords, stride, i); });
      break;
    case FunctionalKind::cglmp4:
      run([&](auto tag, std::size_t i) { return cglmp_lane<decltype(tag), 4>(p, coords, stride, i); });
      break;
  }
}

template <class Wide, class Narrow>
inline void sincos_impl(const double* t, double* s, double* c, std::size_t count) {
  for_lanes<Wide, Narrow>(count, [&](auto tag, std::size_t i) {
    using F = decltype(tag);
    F sv, cv;
    sincos_turns_lane(F::load(t + i), sv, cv);
    sv.store(s + i);
    cv.store(c + i);
  });
}
