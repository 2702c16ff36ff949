#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "bellvol/bell.hpp"
#include "bellvol/state.hpp"

namespace bellvol::kernels {

/// Instruction-set variants of the batch kernels. All variants produce
/// bit-identical output; they differ only in speed.
enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
Isa parse_isa(std::string_view name);
bool isa_supported(Isa isa);
/// BELLVOL_KERNEL=scalar|avx2 overrides; otherwise the widest supported.
Isa default_isa();

/// State-dependent constants hoisted out of the per-sample loop.
struct BatchProblem {
  FunctionalKind kind = FunctionalKind::chsh;
  QubitCorrelationData qubit{};
  int d = 0;
  // c_j * sqrt((1 - F) / d): then P(A - B = m) = |sum_j amp_j w^{jm} ...|^2 + F/d.
  std::array<double, 4> amp{};
  double noise_offset = 0.0;

  static BatchProblem make(const BellFunctional& f, const BipartiteState& state);
};

/// Writes `coords` uniform variates for samples first_index .. first_index+count
/// in coordinate-major order: out[c * stride + i]. Same numbers as
/// uniform_coordinate().
void fill_uniforms(Isa isa, std::uint64_t seed, std::uint64_t first_index, std::size_t count,
                   int coords, std::span<double> out, std::size_t stride);

/// Evaluates the functional on `count` points given as unit variates in the
/// layout above. Sphere directions take (cos-theta variate, phi turns) pairs
/// with cos(theta) = 2u - 1; phases are given in turns (phi / 2pi).
void evaluate_batch(Isa isa, const BatchProblem& problem, std::span<const double> coords,
                    std::size_t stride, std::size_t count, std::span<double> values);

/// Polynomial sine/cosine of 2pi*t used by the kernels; exposed for tests.
void sincos_turns(Isa isa, std::span<const double> turns, std::span<double> sin_out,
                  std::span<double> cos_out);

}  // namespace bellvol::kernels
