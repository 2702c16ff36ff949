#include <cmath>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "bellvol/error.hpp"
#include "kernels_internal.hpp"

namespace bellvol::kernels {

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw Error(ErrorKind::invalid_parameter, fmt::format("unknown kernel variant '{}'", name));
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(BELLVOL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa default_isa() {
  static const Isa chosen = [] {
    if (const char* env = std::getenv("BELLVOL_KERNEL"); env != nullptr && *env != '\0') {
      const Isa wanted = parse_isa(env);
      if (!isa_supported(wanted)) {
        throw Error(ErrorKind::invalid_parameter,
                    fmt::format("kernel variant '{}' is not supported on this CPU", env));
      }
      return wanted;
    }
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  }();
  return chosen;
}

namespace {

void require_supported(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorKind::invalid_parameter,
                fmt::format("kernel variant '{}' is not available", isa_name(isa)));
  }
}

}  // namespace

BatchProblem BatchProblem::make(const BellFunctional& f, const BipartiteState& state) {
  if (state.local_dim() != f.local_dim()) {
    throw Error(ErrorKind::unsupported_dimension,
                fmt::format("{} needs d = {} but the state has d = {}", f.name(), f.local_dim(),
                            state.local_dim()));
  }
  BatchProblem p;
  p.kind = f.kind;
  if (f.is_cglmp()) {
    const int d = state.local_dim();
    const double scale = std::sqrt((1.0 - state.noise_fraction()) / d);
    p.d = d;
    for (int j = 0; j < d; ++j) p.amp[static_cast<std::size_t>(j)] = state.amplitudes()[j] * scale;
    p.noise_offset = state.noise_fraction() / d;
  } else {
    p.d = 2;
    p.qubit = qubit_correlation_data(state);
  }
  return p;
}

void fill_uniforms(Isa isa, std::uint64_t seed, std::uint64_t first_index, std::size_t count,
                   int coords, std::span<double> out, std::size_t stride) {
  if (count > stride || out.size() < static_cast<std::size_t>(coords) * stride) {
    throw Error(ErrorKind::invalid_parameter, "uniform buffer too small");
  }
  require_supported(isa);
#if defined(BELLVOL_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2_impl::fill_uniforms(seed, first_index, count, coords, out.data(), stride);
#endif
  scalar_impl::fill_uniforms(seed, first_index, count, coords, out.data(), stride);
}

void evaluate_batch(Isa isa, const BatchProblem& problem, std::span<const double> coords,
                    std::size_t stride, std::size_t count, std::span<double> values) {
  const int ncoords = problem.kind == FunctionalKind::chsh            ? 8
                      : problem.kind == FunctionalKind::bell_original ? 6
                      : problem.kind == FunctionalKind::i3322         ? 12
                                                                      : 4 * problem.d;
  if (count > stride || coords.size() < static_cast<std::size_t>(ncoords) * stride ||
      values.size() < count) {
    throw Error(ErrorKind::invalid_parameter, "batch buffers too small");
  }
  require_supported(isa);
#if defined(BELLVOL_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2_impl::evaluate_batch(problem, coords.data(), stride, count, values.data());
#endif
  scalar_impl::evaluate_batch(problem, coords.data(), stride, count, values.data());
}

void sincos_turns(Isa isa, std::span<const double> turns, std::span<double> sin_out,
                  std::span<double> cos_out) {
  if (sin_out.size() < turns.size() || cos_out.size() < turns.size()) {
    throw Error(ErrorKind::invalid_parameter, "sincos output too small");
  }
  require_supported(isa);
#if defined(BELLVOL_HAVE_AVX2)
  if (isa == Isa::avx2) {
    return avx2_impl::sincos_turns(turns.data(), sin_out.data(), cos_out.data(), turns.size());
  }
#endif
  scalar_impl::sincos_turns(turns.data(), sin_out.data(), cos_out.data(), turns.size());
}

}  // namespace bellvol::kernels
