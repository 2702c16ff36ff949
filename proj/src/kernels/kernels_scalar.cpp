#include <cmath>
#include <cstdint>
#include <cstring>

#include "kernels_internal.hpp"

namespace bellvol::kernels::scalar_impl {

template <class F>
struct LaneTraits;

#include "lane_scalar.hpp"
#include "kernel_body.hpp"

void fill_uniforms(std::uint64_t seed, std::uint64_t first_index, std::size_t count, int coords,
                   double* out, std::size_t stride) {
  fill_uniforms_impl<LaneF1, LaneF1>(seed, first_index, count, coords, out, stride);
}

void evaluate_batch(const BatchProblem& p, const double* coords, std::size_t stride,
                    std::size_t count, double* values) {
  evaluate_batch_impl<LaneF1, LaneF1>(p, coords, stride, count, values);
}

void sincos_turns(const double* t, double* s, double* c, std::size_t count) {
  sincos_impl<LaneF1, LaneF1>(t, s, c, count);
}

}  // namespace bellvol::kernels::scalar_impl
