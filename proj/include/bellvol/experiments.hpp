#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellvol/bell.hpp"
#include "bellvol/optimizer.hpp"
#include "bellvol/settings.hpp"
#include "bellvol/state.hpp"
#include "bellvol/volume.hpp"

namespace bellvol {

/// Common random numbers (one seed for every grid point) or an
/// independent stream per grid point.
enum class SweepSampling { common, independent };

struct MonteCarloSpec {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  int workers = 0;
  SweepSampling sampling = SweepSampling::common;
};

struct SweepRow {
  std::vector<double> params;  // family parameter(s)
  double noise = 0.0;
  std::string entanglement_kind;  // "entropy", "concurrence" or "none"
  double entanglement = 0.0;      // bits for entropy
  double entanglement_norm = 0.0;  // entropy / log2 d; concurrence as is
  double i_max = 0.0;
  VolumeEstimate volume;
};

/// Seed used for grid point `index` under the given sampling mode.
std::uint64_t grid_seed(const MonteCarloSpec& mc, std::size_t index);

/// One row per grid point. `grid` holds the family parameters for each
/// point (one value for alpha/gamma, two for lambda).
std::vector<SweepRow> sweep_family(StateFamily family, const std::vector<std::vector<double>>& grid,
                                   const BellFunctional& f, const MonteCarloSpec& mc, double noise,
                                   const OptimizerConfig& optimizer);

/// Fixed alpha, varying white-noise fraction; entanglement is the concurrence.
std::vector<SweepRow> noise_sweep(double alpha, const std::vector<double>& noise_grid, const BellFunctional& f,
                                  const MonteCarloSpec& mc, const OptimizerConfig& optimizer);

std::size_t argmax_volume(const std::vector<SweepRow>& rows);
std::size_t argmax_i_max(const std::vector<SweepRow>& rows);

/// First row whose Wilson upper bound falls below `threshold`.
std::optional<std::size_t> first_vanishing(const std::vector<SweepRow>& rows, double threshold);

/// A single phase coordinate: party 0 = Alice (phi), 1 = Bob (varphi);
/// setting and basis index are 0-based.
struct PhaseAxis {
  int party = 0;
  int setting = 0;
  int j = 0;

  /// phi1(0) / varphi2(2) notation with 1-based settings.
  std::string name() const;
  static PhaseAxis parse(const std::string& name);
  double& in(PhaseSettings& x) const;
};

/// The CGLMP(3) optimum for the maximally entangled state:
/// phi1(j) = 0, phi2(j) = pi j/3, varphi1(j) = pi j/6 = -varphi2(j).
PhaseSettings cglmp3_optimal_phases();

/// Two readings of the section fixed point "phi2(0)=phi2(1)=pi j/6".
/// bound_j: phi2(j) = pi j/6 for every j. constant: phi2(0) = phi2(1) = pi/6.
/// Both set varphi1(j) = 0 and keep the rest at the optimum.
enum class SectionReading { bound_j, constant };

PhaseSettings section_fixed_point(SectionReading reading);

struct SectionGrid {
  PhaseAxis axis1;
  PhaseAxis axis2;
  int resolution = 0;
  PhaseSettings fixed_point;
  std::vector<std::uint8_t> mask;  // row-major [axis1 cell][axis2 cell]
  std::uint64_t violating_cells = 0;
  double area = 0.0;  // violating cells * (2pi / resolution)^2

  bool at(int i, int j) const { return mask[static_cast<std::size_t>(i * resolution + j)] != 0; }
};

/// Evaluates violation at every cell centre of the (axis1, axis2) plane
/// through `fixed_point`.
SectionGrid section_2d(const BipartiteState& state, const BellFunctional& f, const PhaseSettings& fixed_point,
                       const PhaseAxis& axis1, const PhaseAxis& axis2, int resolution);

struct SurveyResult {
  std::vector<SweepRow> rows;  // grid rows, then the reference rows
  std::size_t grid_points = 0;
  std::size_t argmax = 0;  // over grid rows only
  std::optional<std::size_t> unit_row;       // (1, 1)
  std::optional<std::size_t> reference_row;  // (ref, ref)
  double volume_ratio = 0.0;                 // V(1,1) / V(ref, ref)
  double volume_ratio_std_error = 0.0;
};

/// CGLMP(4) survey over lambda_axis x lambda_axis plus the two reference
/// states (1, 1) and (reference, reference).
SurveyResult survey_region(const std::vector<double>& lambda_axis, double reference, const MonteCarloSpec& mc,
                           const OptimizerConfig& optimizer);

/// Inclusive start:stop:step grid with the step count rounded.
std::vector<double> linear_grid(double start, double stop, double step);

}  // namespace bellvol
