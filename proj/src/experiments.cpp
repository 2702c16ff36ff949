#include "bellvol/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>

#include <fmt/format.h>

#include "bellvol/error.hpp"
#include "bellvol/kernels.hpp"

namespace bellvol {

namespace {

constexpr double kPi = std::numbers::pi;

BipartiteState family_state(StateFamily family, const std::vector<double>& params, double noise) {
  return make_state(FamilySpec{family, params, noise});
}

SweepRow make_row(const BipartiteState& state, std::vector<double> params, const BellFunctional& f,
                  const MonteCarloSpec& mc, std::size_t index, const OptimizerConfig& optimizer) {
  SweepRow row;
  row.params = std::move(params);
  row.noise = state.noise_fraction();
  const int d = state.local_dim();
  if (state.is_pure()) {
    row.entanglement_kind = "entropy";
    row.entanglement = entropy_of_entanglement(state);
    row.entanglement_norm = row.entanglement / std::log2(static_cast<double>(d));
  } else if (d == 2) {
    row.entanglement_kind = "concurrence";
    row.entanglement = concurrence_two_qubit(state);
    row.entanglement_norm = row.entanglement;
  } else {
    row.entanglement_kind = "none";
  }
  row.i_max = maximize_bell(state, f, f.space(), optimizer).value;
  EstimatorOptions opts;
  opts.workers = mc.workers;
  row.volume = estimate_volume(state, f, f.space(), mc.samples, grid_seed(mc, index), opts);
  return row;
}

}  // namespace

std::uint64_t grid_seed(const MonteCarloSpec& mc, std::size_t index) {
  if (mc.sampling == SweepSampling::common) return mc.seed;
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = mc.seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<SweepRow> sweep_family(StateFamily family, const std::vector<std::vector<double>>& grid,
                                   const BellFunctional& f, const MonteCarloSpec& mc, double noise,
                                   const OptimizerConfig& optimizer) {
  if (grid.empty()) throw Error(ErrorKind::invalid_parameter, "sweep grid is empty");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rows.push_back(make_row(family_state(family, grid[i], noise), grid[i], f, mc, i, optimizer));
  }
  return rows;
}

std::vector<SweepRow> noise_sweep(double alpha, const std::vector<double>& noise_grid, const BellFunctional& f,
                                  const MonteCarloSpec& mc, const OptimizerConfig& optimizer) {
  if (noise_grid.empty()) throw Error(ErrorKind::invalid_parameter, "noise grid is empty");
  std::vector<SweepRow> rows;
  rows.reserve(noise_grid.size());
  for (std::size_t i = 0; i < noise_grid.size(); ++i) {
    auto row = make_row(make_alpha_qubit(alpha, noise_grid[i]), {alpha}, f, mc, i, optimizer);
    if (row.entanglement_kind == "entropy" && f.local_dim() == 2) {
      // Concurrence column throughout, including the pure endpoint.
      row.entanglement_kind = "concurrence";
      row.entanglement = concurrence_two_qubit(make_alpha_qubit(alpha, noise_grid[i]));
      row.entanglement_norm = row.entanglement;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t argmax_volume(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw Error(ErrorKind::invalid_parameter, "no rows");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].volume.fraction > rows[best].volume.fraction) best = i;
  }
  return best;
}

std::size_t argmax_i_max(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw Error(ErrorKind::invalid_parameter, "no rows");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].i_max > rows[best].i_max) best = i;
  }
  return best;
}

std::optional<std::size_t> first_vanishing(const std::vector<SweepRow>& rows, double threshold) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].volume.ci_high < threshold) return i;
  }
  return std::nullopt;
}

std::string PhaseAxis::name() const {
  return fmt::format("{}{}({})", party == 0 ? "phi" : "varphi", setting + 1, j);
}

PhaseAxis PhaseAxis::parse(const std::string& name) {
  static const std::regex re(R"(^(phi|varphi)([12])\((\d)\)$)");
  std::smatch m;
  if (!std::regex_match(name, m, re)) {
    throw Error(ErrorKind::invalid_parameter,
                fmt::format("axis '{}' is not of the form phi<1|2>(j) or varphi<1|2>(j)", name));
  }
  return {m[1] == "phi" ? 0 : 1, std::stoi(m[2]) - 1, std::stoi(m[3])};
}

double& PhaseAxis::in(PhaseSettings& x) const {
  if (setting < 0 || setting > 1 || j < 0 || j >= x.d) {
    throw Error(ErrorKind::invalid_parameter, fmt::format("axis {} is not a coordinate of the d = {} space", name(), x.d));
  }
  return party == 0 ? x.alice_phase(setting, j) : x.bob_phase(setting, j);
}

PhaseSettings cglmp3_optimal_phases() {
  auto x = PhaseSettings::zeros(3);
  for (int j = 0; j < 3; ++j) {
    x.alice_phase(0, j) = 0.0;
    x.alice_phase(1, j) = kPi * j / 3.0;
    x.bob_phase(0, j) = kPi * j / 6.0;
    x.bob_phase(1, j) = -kPi * j / 6.0;
  }
  return x;
}

PhaseSettings section_fixed_point(SectionReading reading) {
  auto x = cglmp3_optimal_phases();
  if (reading == SectionReading::bound_j) {
    for (int j = 0; j < 3; ++j) x.alice_phase(1, j) = kPi * j / 6.0;
  } else {
    x.alice_phase(1, 0) = kPi / 6.0;
    x.alice_phase(1, 1) = kPi / 6.0;
  }
  for (int j = 0; j < 3; ++j) x.bob_phase(0, j) = 0.0;
  return x;
}

SectionGrid section_2d(const BipartiteState& state, const BellFunctional& f, const PhaseSettings& fixed_point,
                       const PhaseAxis& axis1, const PhaseAxis& axis2, int resolution) {
  if (!f.is_cglmp()) throw Error(ErrorKind::invalid_parameter, "sections are defined for CGLMP phase spaces");
  if (resolution < 2) throw Error(ErrorKind::invalid_parameter, "section resolution must be >= 2");
  if (fixed_point.d != f.local_dim()) {
    throw Error(ErrorKind::arity_mismatch, "fixed point does not match the functional's dimension");
  }
  if (axis1.party == axis2.party && axis1.setting == axis2.setting && axis1.j == axis2.j) {
    throw Error(ErrorKind::invalid_parameter, "section axes must differ");
  }
  SectionGrid grid{axis1, axis2, resolution, fixed_point, {}, 0, 0.0};
  {
    auto probe = fixed_point;
    (void)axis1.in(probe);
    (void)axis2.in(probe);
  }
  const auto problem = kernels::BatchProblem::make(f, state);
  const auto isa = kernels::default_isa();
  const int d = fixed_point.d;
  const int coords = 4 * d;
  const auto r = static_cast<std::size_t>(resolution);
  const double cell = 1.0 / resolution;  // in turns

  // Base coordinates in turns, layout matching the sampler.
  std::vector<double> base(static_cast<std::size_t>(coords));
  for (int i = 0; i < 2 * d; ++i) {
    base[static_cast<std::size_t>(i)] = fixed_point.alice[static_cast<std::size_t>(i)] / (2.0 * kPi);
    base[static_cast<std::size_t>(2 * d + i)] = fixed_point.bob[static_cast<std::size_t>(i)] / (2.0 * kPi);
  }
  auto coord_index = [d](const PhaseAxis& a) { return (a.party == 0 ? 0 : 2 * d) + a.setting * d + a.j; };
  const auto c1 = static_cast<std::size_t>(coord_index(axis1));
  const auto c2 = static_cast<std::size_t>(coord_index(axis2));

  grid.mask.assign(r * r, 0);
  std::vector<double> buf(static_cast<std::size_t>(coords) * r);
  std::vector<double> values(r);
  const double bound = local_bound(f);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t c = 0; c < static_cast<std::size_t>(coords); ++c) {
      std::fill_n(buf.begin() + static_cast<std::ptrdiff_t>(c * r), r, base[c]);
    }
    std::fill_n(buf.begin() + static_cast<std::ptrdiff_t>(c1 * r), r, (static_cast<double>(i) + 0.5) * cell);
    for (std::size_t j = 0; j < r; ++j) buf[c2 * r + j] = (static_cast<double>(j) + 0.5) * cell;
    kernels::evaluate_batch(isa, problem, buf, r, r, values);
    for (std::size_t j = 0; j < r; ++j) {
      if (values[j] > bound) {
        grid.mask[i * r + j] = 1;
        ++grid.violating_cells;
      }
    }
  }
  const double cell_area = std::pow(2.0 * kPi / resolution, 2);
  grid.area = static_cast<double>(grid.violating_cells) * cell_area;
  return grid;
}

SurveyResult survey_region(const std::vector<double>& lambda_axis, double reference, const MonteCarloSpec& mc,
                           const OptimizerConfig& optimizer) {
  if (lambda_axis.empty()) throw Error(ErrorKind::invalid_parameter, "lambda grid is empty");
  const auto f = BellFunctional{FunctionalKind::cglmp4};
  std::vector<std::vector<double>> points;
  for (double l1 : lambda_axis) {
    for (double l2 : lambda_axis) points.push_back({l1, l2});
  }
  SurveyResult out;
  out.grid_points = points.size();
  auto find = [&](double a, double b) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (std::abs(points[i][0] - a) < 1e-9 && std::abs(points[i][1] - b) < 1e-9) return i;
    }
    return std::nullopt;
  };
  out.unit_row = find(1.0, 1.0);
  out.reference_row = find(reference, reference);
  if (!out.unit_row) {
    out.unit_row = points.size();
    points.push_back({1.0, 1.0});
  }
  if (!out.reference_row) {
    out.reference_row = points.size();
    points.push_back({reference, reference});
  }
  out.rows = sweep_family(StateFamily::lambda_ququart, points, f, mc, 0.0, optimizer);
  std::vector<SweepRow> grid_rows(out.rows.begin(), out.rows.begin() + static_cast<std::ptrdiff_t>(out.grid_points));
  out.argmax = argmax_volume(grid_rows);
  const auto& unit = out.rows[*out.unit_row].volume;
  const auto& ref = out.rows[*out.reference_row].volume;
  if (ref.fraction > 0.0) {
    const auto rel = relative_normalize({{"unit", unit}, {"ref", ref}}, "ref");
    out.volume_ratio = rel.at("unit").value;
    out.volume_ratio_std_error = rel.at("unit").value_std_error;
  }
  return out;
}

std::vector<double> linear_grid(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) {
    throw Error(ErrorKind::invalid_parameter, fmt::format("bad grid {}:{}:{}", start, stop, step));
  }
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    // Round to 12 significant decimals so 0.1-steps print cleanly.
    const double v = start + static_cast<double>(i) * step;
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

}  // namespace bellvol
