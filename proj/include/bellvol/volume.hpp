#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bellvol/bell.hpp"
#include "bellvol/kernels.hpp"
#include "bellvol/settings.hpp"
#include "bellvol/state.hpp"

namespace bellvol {

enum class NormalizationMode { absolute, relative };

struct VolumeEstimate {
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  double fraction = 0.0;   // hits / samples = vol(Gamma) / vol(X)
  double std_error = 0.0;  // sqrt(p(1-p)/N)
  double ci_low = 0.0;     // 95% Wilson interval
  double ci_high = 0.0;
  NormalizationMode normalization = NormalizationMode::absolute;
  std::string reference_label;     // relative mode only
  double reference_fraction = 0.0;  // relative mode only
  double value = 0.0;
  double value_std_error = 0.0;
};

/// Wilson score interval for hits/n at the given normal quantile.
std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z = 1.959963984540054);

/// Absolute-mode estimate from raw counts.
VolumeEstimate make_estimate(std::uint64_t hits, std::uint64_t samples);

/// Worker count from BELLVOL_WORKERS, else the hardware concurrency.
int default_worker_count();

struct EstimatorOptions {
  int workers = 0;  // 0: default_worker_count()
  std::size_t block_size = 4096;
  std::optional<kernels::Isa> isa;  // unset: kernels::default_isa()
  /// Counts I > bound + margin instead of I > bound (margin >= 0).
  double margin = 0.0;
};

/// Monte Carlo estimate of the violation fraction. Sample i of the run is
/// a pure function of (seed, i), so the hit count is identical for any
/// worker count or block size.
VolumeEstimate estimate_volume(const BipartiteState& state, const BellFunctional& f,
                               const SettingsSpace& space, std::uint64_t samples, std::uint64_t seed,
                               const EstimatorOptions& options = {});

/// Grows the sample count in chunks of `chunk` until std_error <= target
/// or max_samples is reached. The result equals estimate_volume() at the
/// final sample count.
VolumeEstimate estimate_volume_to_stderr(const BipartiteState& state, const BellFunctional& f,
                                         const SettingsSpace& space, double target_std_error,
                                         std::uint64_t chunk, std::uint64_t max_samples,
                                         std::uint64_t seed, const EstimatorOptions& options = {});

/// Hit count for samples [first, first + count) of a seed. Building block
/// of the estimators above.
std::uint64_t count_hits(const BipartiteState& state, const BellFunctional& f, std::uint64_t first,
                         std::uint64_t count, std::uint64_t seed, const EstimatorOptions& options = {});

/// A region of X with analytically known measure. The predicate receives
/// physical coordinates: (cos theta, phi) per direction for sphere spaces,
/// phases in radians for tori.
struct KnownRegion {
  std::string name;
  SettingsSpace space;
  std::function<bool(std::span<const double>)> contains;
  double fraction = 0.0;
};

struct CalibrationResult {
  KnownRegion region;
  VolumeEstimate estimate;
  double z_score = 0.0;  // (p_hat - q) / stderr, with stderr from q
  bool passed = false;   // |z| <= 4
};

CalibrationResult calibrate_estimator(const KnownRegion& region, std::uint64_t samples, std::uint64_t seed,
                                      int workers = 0);

/// Half-torus in 12-D, spherical cap cos(theta_1) > 1/2 on 4 spheres, and
/// the triangle phi1 + phi2 < 2pi on the 2-torus.
std::vector<KnownRegion> standard_calibration_regions();

/// Rescales values so the reference entry is 1; first-order error
/// propagation for the ratio of two proportions.
std::map<std::string, VolumeEstimate> relative_normalize(const std::map<std::string, VolumeEstimate>& estimates,
                                                         const std::string& reference);

}  // namespace bellvol
