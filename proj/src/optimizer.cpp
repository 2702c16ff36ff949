#include "bellvol/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "bellvol/error.hpp"
#include "bellvol/kernels.hpp"
#include "bellvol/volume.hpp"

namespace bellvol {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, double step, int max_iterations, double tolerance) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  NelderMeadResult res;
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);
  res.evaluations = n + 1;

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto point_along = [&](double t, std::vector<double>& out) {
    // centroid + t * (centroid - worst)
    const auto& worst = simplex[order[n]];
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  int it = 0;
  for (; it < max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const double best = fv[order[0]];
    const double worst = fv[order[n]];
    double diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        diameter = std::max(diameter, std::abs(simplex[order[i]][j] - simplex[order[0]][j]));
      }
    }
    if (worst - best <= tolerance && diameter <= std::sqrt(tolerance)) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[i]][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    point_along(1.0, xr);
    const double fr = f(xr);
    ++res.evaluations;
    const double second_worst = fv[order[n - 1]];
    if (fr < best) {
      point_along(2.0, xe);
      const double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        simplex[order[n]] = xe;
        fv[order[n]] = fe;
      } else {
        simplex[order[n]] = xr;
        fv[order[n]] = fr;
      }
      continue;
    }
    if (fr < second_worst) {
      simplex[order[n]] = xr;
      fv[order[n]] = fr;
      continue;
    }
    // Outside contraction if the reflection improved on the worst, inside otherwise.
    const bool outside = fr < worst;
    point_along(outside ? 0.5 : -0.5, xc);
    const double fc = f(xc);
    ++res.evaluations;
    if (outside ? fc <= fr : fc < worst) {
      simplex[order[n]] = xc;
      fv[order[n]] = fc;
      continue;
    }
    const auto& xb = simplex[order[0]];
    for (std::size_t i = 1; i <= n; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t j = 0; j < n; ++j) v[j] = xb[j] + 0.5 * (v[j] - xb[j]);
      fv[order[i]] = f(v);
      ++res.evaluations;
    }
  }
  const auto best_it = std::min_element(fv.begin(), fv.end());
  res.x = simplex[static_cast<std::size_t>(best_it - fv.begin())];
  res.fx = *best_it;
  res.iterations = it;
  return res;
}

double horodecki_chsh_max(const QubitCorrelationData& data) {
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) t(i, j) = data.T[i][j];
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(t);
  const auto s = svd.singularValues();  // descending
  return 2.0 * std::sqrt(s(0) * s(0) + s(1) * s(1));
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Objective = std::function<double(std::span<const double>)>;

Vec3 unit_from(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

// Returns I(params) for the parameter layout of to_parameters().
Objective make_objective(const BipartiteState& state, const BellFunctional& f) {
  if (f.is_cglmp()) {
    const auto problem = kernels::BatchProblem::make(f, state);
    const int n = 4 * state.local_dim();
    return [problem, n](std::span<const double> p) {
      thread_local std::vector<double> turns;
      turns.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) turns[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] / kTwoPi;
      double value = 0.0;
      kernels::evaluate_batch(kernels::Isa::scalar, problem, turns, 1, 1, std::span<double>(&value, 1));
      return value;
    };
  }
  const auto data = qubit_correlation_data(state);
  switch (f.kind) {
    case FunctionalKind::chsh:
      return [data](std::span<const double> p) {
        const Vec3 a = unit_from(p[0], p[1]), b = unit_from(p[2], p[3]);
        const Vec3 c = unit_from(p[4], p[5]), d = unit_from(p[6], p[7]);
        return combine::chsh(correlation(data, a, b), correlation(data, a, d), correlation(data, c, d),
                             correlation(data, c, b));
      };
    case FunctionalKind::bell_original:
      return [data](std::span<const double> p) {
        const Vec3 a = unit_from(p[0], p[1]), b = unit_from(p[2], p[3]), d = unit_from(p[4], p[5]);
        return combine::chsh(correlation(data, a, b), correlation(data, a, d), correlation(data, d, d),
                             correlation(data, d, b));
      };
    case FunctionalKind::i3322:
      return [data](std::span<const double> p) {
        std::array<Vec3, 3> alice{}, bob{};
        for (std::size_t i = 0; i < 3; ++i) {
          alice[i] = unit_from(p[2 * i], p[2 * i + 1]);
          bob[i] = unit_from(p[6 + 2 * i], p[7 + 2 * i]);
        }
        auto dot = [](const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; };
        std::array<std::array<double, 3>, 3> pp{};
        for (std::size_t i = 0; i < 3; ++i) {
          for (std::size_t j = 0; j < 3; ++j) {
            pp[i][j] = 0.25 * (1.0 + dot(alice[i], data.r_a) + dot(bob[j], data.r_b) +
                               correlation(data, alice[i], bob[j]));
          }
        }
        return combine::i3322(pp, 0.5 * (1.0 + dot(alice[0], data.r_a)), 0.5 * (1.0 + dot(bob[0], data.r_b)),
                              0.5 * (1.0 + dot(bob[1], data.r_b)));
      };
    default:
      break;
  }
  throw Error(ErrorKind::invalid_parameter, "unsupported functional");
}

struct RestartOutcome {
  double value = -INFINITY;
  std::vector<double> params;
  std::uint64_t evaluations = 0;
};

RestartOutcome run_restart(const Objective& objective, const SettingsSpace& space, const OptimizerConfig& config,
                           int restart) {
  auto x = to_parameters(sample_settings(space, config.seed, static_cast<std::uint64_t>(restart)));
  const auto neg = [&](std::span<const double> p) { return -objective(p); };
  RestartOutcome out;
  auto nm = nelder_mead(neg, std::move(x), 0.6, config.max_iterations, config.tolerance);
  out.evaluations += nm.evaluations;
  for (int round = 0; round < config.polish_rounds; ++round) {
    auto again = nelder_mead(neg, nm.x, 0.05, config.max_iterations, config.tolerance);
    out.evaluations += again.evaluations;
    const double gain = nm.fx - again.fx;
    if (again.fx < nm.fx) nm = std::move(again);
    if (gain <= config.tolerance) break;
  }
  out.value = -nm.fx;
  out.params = std::move(nm.x);
  return out;
}

}  // namespace

MaxResult maximize_bell(const BipartiteState& state, const BellFunctional& f, const SettingsSpace& space,
                        const OptimizerConfig& config) {
  if (!(space == f.space())) {
    throw Error(ErrorKind::arity_mismatch,
                fmt::format("{} is evaluated on {}, not {}", f.name(), f.space().describe(), space.describe()));
  }
  if (state.local_dim() != f.local_dim()) {
    throw Error(ErrorKind::unsupported_dimension,
                fmt::format("{} needs d = {} but the state has d = {}", f.name(), f.local_dim(),
                            state.local_dim()));
  }
  if (config.restarts < 1) throw Error(ErrorKind::invalid_parameter, "restarts must be >= 1");
  if (!(config.tolerance > 0.0)) throw Error(ErrorKind::invalid_parameter, "tolerance must be > 0");

  const Objective objective = make_objective(state, f);
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.restarts));
  const int workers = std::min(config.restarts, config.workers > 0 ? config.workers : default_worker_count());
  if (workers <= 1) {
    for (int r = 0; r < config.restarts; ++r) outcomes[static_cast<std::size_t>(r)] = run_restart(objective, space, config, r);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < config.restarts; r += workers) {
          outcomes[static_cast<std::size_t>(r)] = run_restart(objective, space, config, r);
        }
      });
    }
  }

  // Ties go to the lowest restart index.
  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    if (outcomes[r].value > outcomes[best].value) best = r;
  }
  MaxResult result;
  result.value = outcomes[best].value;
  result.argmax = canonicalize(point_from_parameters(space, outcomes[best].params));
  for (const auto& o : outcomes) {
    result.restart_values.push_back(o.value);
    result.evaluations += o.evaluations;
    if (result.value - o.value <= config.agreement_tolerance) ++result.restarts_agreeing;
  }
  // Report the value at the canonical argmax so re-evaluation matches exactly.
  result.value = evaluate(f, state, result.argmax).value;
  return result;
}

}  // namespace bellvol
