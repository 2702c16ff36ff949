#pragma once

#include <cstddef>
#include <cstdint>

#include "bellvol/kernels.hpp"

namespace bellvol::kernels {

#define BELLVOL_DECLARE_KERNELS(ns)                                                              \
  namespace ns {                                                                                 \
  void fill_uniforms(std::uint64_t seed, std::uint64_t first_index, std::size_t count,          \
                     int coords, double* out, std::size_t stride);                              \
  void evaluate_batch(const BatchProblem& p, const double* coords, std::size_t stride,          \
                      std::size_t count, double* values);                                       \
  void sincos_turns(const double* t, double* s, double* c, std::size_t count);                  \
  }

BELLVOL_DECLARE_KERNELS(scalar_impl)
#if defined(BELLVOL_HAVE_AVX2)
BELLVOL_DECLARE_KERNELS(avx2_impl)
#endif

#undef BELLVOL_DECLARE_KERNELS

}  // namespace bellvol::kernels
