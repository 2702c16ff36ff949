#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bellvol/bell.hpp"
#include "bellvol/settings.hpp"
#include "bellvol/state.hpp"

namespace bellvol {

struct OptimizerConfig {
  int restarts = 64;
  int max_iterations = 2000;  // per Nelder-Mead run
  double tolerance = 1e-9;    // value spread; the simplex must also shrink below sqrt(tolerance)
  std::uint64_t seed = 1;
  int polish_rounds = 3;             // re-seeded simplex runs from the best vertex
  double agreement_tolerance = 1e-6;  // for restarts_agreeing
  int workers = 0;                   // 0: default_worker_count()
};

struct MaxResult {
  double value = 0.0;
  SettingsPoint argmax;
  int restarts_agreeing = 0;
  std::uint64_t evaluations = 0;
  std::vector<double> restart_values;

  bool low_confidence() const { return restarts_agreeing < 3; }
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  std::uint64_t evaluations = 0;
};

/// Minimizes f from x0 with an axis-aligned initial simplex of edge `step`.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, double step, int max_iterations, double tolerance);

/// Multi-start maximization of the functional over its settings space.
MaxResult maximize_bell(const BipartiteState& state, const BellFunctional& f, const SettingsSpace& space,
                        const OptimizerConfig& config = {});

/// Closed-form CHSH maximum 2 sqrt(s1^2 + s2^2) over the two largest
/// singular values of T.
double horodecki_chsh_max(const QubitCorrelationData& data);

}  // namespace bellvol
