#include "bellvol/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "bellvol/error.hpp"
#include "bellvol/philox.hpp"

namespace bellvol {

std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Clamp so the interval always contains p despite rounding at p = 0 or 1.
  return {std::clamp(std::min(centre - half, p), 0.0, 1.0), std::clamp(std::max(centre + half, p), 0.0, 1.0)};
}

VolumeEstimate make_estimate(std::uint64_t hits, std::uint64_t samples) {
  if (samples == 0) throw Error(ErrorKind::invalid_parameter, "sample count must be at least 1");
  if (hits > samples) throw Error(ErrorKind::invalid_parameter, "hit count exceeds sample count");
  VolumeEstimate e;
  e.hits = hits;
  e.samples = samples;
  e.fraction = static_cast<double>(hits) / static_cast<double>(samples);
  e.std_error = std::sqrt(e.fraction * (1.0 - e.fraction) / static_cast<double>(samples));
  std::tie(e.ci_low, e.ci_high) = wilson_interval(hits, samples);
  e.value = e.fraction;
  e.value_std_error = e.std_error;
  return e;
}

int default_worker_count() {
  if (const char* env = std::getenv("BELLVOL_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

void check_problem(const BipartiteState& state, const BellFunctional& f, const SettingsSpace& space) {
  if (!(space == f.space())) {
    throw Error(ErrorKind::arity_mismatch,
                fmt::format("{} is evaluated on {}, not {}", f.name(), f.space().describe(), space.describe()));
  }
  if (state.local_dim() != f.local_dim()) {
    throw Error(ErrorKind::unsupported_dimension,
                fmt::format("{} needs d = {} but the state has d = {}", f.name(), f.local_dim(),
                            state.local_dim()));
  }
}

// Runs fn(worker, block) for every block, striding blocks across workers.
template <class Fn>
void for_blocks(std::uint64_t blocks, int workers, Fn&& fn) {
  const auto w = static_cast<std::uint64_t>(std::max(1, workers));
  if (w == 1 || blocks <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) fn(0, b);
    return;
  }
  std::vector<std::jthread> pool;
  const auto used = std::min(w, blocks);
  pool.reserve(used);
  for (std::uint64_t t = 0; t < used; ++t) {
    pool.emplace_back([&, t] {
      for (std::uint64_t b = t; b < blocks; b += used) fn(t, b);
    });
  }
}

}  // namespace

std::uint64_t count_hits(const BipartiteState& state, const BellFunctional& f, std::uint64_t first,
                         std::uint64_t count, std::uint64_t seed, const EstimatorOptions& options) {
  if (options.margin < 0.0) throw Error(ErrorKind::invalid_parameter, "margin must be >= 0");
  if (options.block_size == 0) throw Error(ErrorKind::invalid_parameter, "block size must be >= 1");
  const auto problem = kernels::BatchProblem::make(f, state);
  const auto isa = options.isa.value_or(kernels::default_isa());
  const int coords = f.space().coordinate_count();
  const std::size_t bs = options.block_size;
  const double threshold = local_bound(f) + options.margin;
  const int workers = options.workers > 0 ? options.workers : default_worker_count();
  const std::uint64_t blocks = (count + bs - 1) / bs;

  std::vector<std::uint64_t> per_worker(static_cast<std::size_t>(std::max(1, workers)), 0);
  std::vector<std::vector<double>> uniforms(per_worker.size());
  std::vector<std::vector<double>> values(per_worker.size());

  for_blocks(blocks, workers, [&](std::uint64_t w, std::uint64_t b) {
    auto& u = uniforms[w];
    auto& v = values[w];
    if (u.empty()) {
      u.resize(static_cast<std::size_t>(coords) * bs);
      v.resize(bs);
    }
    const std::uint64_t start = b * bs;
    const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(bs, count - start));
    kernels::fill_uniforms(isa, seed, first + start, n, coords, u, bs);
    kernels::evaluate_batch(isa, problem, u, bs, n, v);
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += v[i] > threshold ? 1u : 0u;
    per_worker[w] += hits;
  });

  std::uint64_t total = 0;
  for (auto h : per_worker) total += h;
  return total;
}

VolumeEstimate estimate_volume(const BipartiteState& state, const BellFunctional& f,
                               const SettingsSpace& space, std::uint64_t samples, std::uint64_t seed,
                               const EstimatorOptions& options) {
  check_problem(state, f, space);
  if (samples == 0) throw Error(ErrorKind::invalid_parameter, "sample count must be at least 1");
  return make_estimate(count_hits(state, f, 0, samples, seed, options), samples);
}

VolumeEstimate estimate_volume_to_stderr(const BipartiteState& state, const BellFunctional& f,
                                         const SettingsSpace& space, double target_std_error,
                                         std::uint64_t chunk, std::uint64_t max_samples,
                                         std::uint64_t seed, const EstimatorOptions& options) {
  check_problem(state, f, space);
  if (!(target_std_error > 0.0)) throw Error(ErrorKind::invalid_parameter, "target stderr must be > 0");
  if (chunk == 0 || max_samples == 0) throw Error(ErrorKind::invalid_parameter, "chunk and max samples must be >= 1");
  std::uint64_t hits = 0;
  std::uint64_t n = 0;
  while (n < max_samples) {
    const auto take = std::min(chunk, max_samples - n);
    hits += count_hits(state, f, n, take, seed, options);
    n += take;
    // Require a few hits before trusting the binomial stderr.
    const auto e = make_estimate(hits, n);
    if (hits >= 10 && e.std_error <= target_std_error) break;
  }
  return make_estimate(hits, n);
}

CalibrationResult calibrate_estimator(const KnownRegion& region, std::uint64_t samples, std::uint64_t seed,
                                      int workers) {
  if (samples == 0) throw Error(ErrorKind::invalid_parameter, "sample count must be at least 1");
  const auto& space = region.space;
  const int coords = space.coordinate_count();
  const bool spheres = space.kind() == SettingsSpace::Kind::spheres;
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  const int w = workers > 0 ? workers : default_worker_count();
  std::vector<std::uint64_t> per_worker(static_cast<std::size_t>(std::max(1, w)), 0);
  for_blocks(blocks, w, [&](std::uint64_t worker, std::uint64_t b) {
    std::vector<double> x(static_cast<std::size_t>(coords));
    const std::uint64_t end = std::min(samples, (b + 1) * kBlock);
    std::uint64_t hits = 0;
    for (std::uint64_t i = b * kBlock; i < end; ++i) {
      for (int c = 0; c < coords; ++c) {
        const double u = uniform_coordinate(seed, i, static_cast<std::uint32_t>(c));
        // Sphere pairs: (cos theta, phi); torus: phase.
        x[static_cast<std::size_t>(c)] =
            spheres && c % 2 == 0 ? 2.0 * u - 1.0 : 2.0 * std::numbers::pi * u;
      }
      hits += region.contains(x) ? 1u : 0u;
    }
    per_worker[worker] += hits;
  });
  std::uint64_t hits = 0;
  for (auto h : per_worker) hits += h;

  CalibrationResult out{region, make_estimate(hits, samples), 0.0, false};
  const double se = std::sqrt(region.fraction * (1.0 - region.fraction) / static_cast<double>(samples));
  out.z_score = se > 0.0 ? (out.estimate.fraction - region.fraction) / se
                         : (out.estimate.fraction == region.fraction ? 0.0 : INFINITY);
  out.passed = std::abs(out.z_score) <= 4.0;
  return out;
}

std::vector<KnownRegion> standard_calibration_regions() {
  constexpr double pi = std::numbers::pi;
  return {
      {"torus12_half", SettingsSpace::torus(12), [](std::span<const double> x) { return x[0] < pi; }, 0.5},
      {"spheres4_cap", SettingsSpace::spheres(4), [](std::span<const double> x) { return x[0] > 0.5; }, 0.25},
      {"torus2_triangle", SettingsSpace::torus(2),
       [](std::span<const double> x) { return x[0] + x[1] < 2.0 * pi; }, 0.5},
  };
}

std::map<std::string, VolumeEstimate> relative_normalize(const std::map<std::string, VolumeEstimate>& estimates,
                                                         const std::string& reference) {
  const auto it = estimates.find(reference);
  if (it == estimates.end()) {
    throw Error(ErrorKind::undefined_normalization, fmt::format("reference '{}' not present", reference));
  }
  const auto& ref = it->second;
  if (!(ref.fraction > 0.0)) {
    throw Error(ErrorKind::undefined_normalization,
                fmt::format("reference '{}' has zero violation fraction", reference));
  }
  const double ref_rel = ref.std_error / ref.fraction;
  std::map<std::string, VolumeEstimate> out;
  for (const auto& [label, e] : estimates) {
    VolumeEstimate r = e;
    r.normalization = NormalizationMode::relative;
    r.reference_label = reference;
    r.reference_fraction = ref.fraction;
    r.value = e.fraction / ref.fraction;
    if (label == reference) {
      r.value_std_error = 0.0;
    } else {
      const double rel = e.fraction > 0.0 ? e.std_error / e.fraction : 0.0;
      r.value_std_error = r.value * std::sqrt(rel * rel + ref_rel * ref_rel);
    }
    out.emplace(label, r);
  }
  return out;
}

}  // namespace bellvol
