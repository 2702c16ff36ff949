#include "bellvol/bell.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>

#include <fmt/format.h>

#include "bellvol/error.hpp"

namespace bellvol {

BellFunctional BellFunctional::parse(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "chsh") return {FunctionalKind::chsh};
  if (lower == "bell" || lower == "bell_original" || lower == "bell-original") {
    return {FunctionalKind::bell_original};
  }
  if (lower == "i3322" || lower == "3322") return {FunctionalKind::i3322};
  if (lower == "cglmp3" || lower == "i3") return {FunctionalKind::cglmp3};
  if (lower == "cglmp4" || lower == "i4") return {FunctionalKind::cglmp4};
  throw Error(ErrorKind::invalid_parameter, fmt::format("unknown functional '{}'", name));
}

std::string BellFunctional::name() const {
  switch (kind) {
    case FunctionalKind::chsh: return "chsh";
    case FunctionalKind::bell_original: return "bell";
    case FunctionalKind::i3322: return "i3322";
    case FunctionalKind::cglmp3: return "cglmp3";
    case FunctionalKind::cglmp4: return "cglmp4";
  }
  return "?";
}

int BellFunctional::local_dim() const {
  switch (kind) {
    case FunctionalKind::cglmp3: return 3;
    case FunctionalKind::cglmp4: return 4;
    default: return 2;
  }
}

SettingsSpace BellFunctional::space() const {
  switch (kind) {
    case FunctionalKind::chsh: return SettingsSpace::spheres(4);
    case FunctionalKind::bell_original: return SettingsSpace::spheres(3);
    case FunctionalKind::i3322: return SettingsSpace::spheres(6);
    case FunctionalKind::cglmp3: return SettingsSpace::torus(12);
    case FunctionalKind::cglmp4: return SettingsSpace::torus(16);
  }
  throw Error(ErrorKind::invalid_parameter, "unknown functional");
}

double local_bound(const BellFunctional& f) {
  switch (f.kind) {
    case FunctionalKind::i3322: return 0.0;
    default: return 2.0;
  }
}

BellEvaluation make_evaluation(double value, double bound) { return {value, bound, value > bound}; }

double correlation(const QubitCorrelationData& data, const Vec3& a, const Vec3& b) {
  double e = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) e += a[i] * data.T[i][j] * b[j];
  }
  return e;
}

namespace {

const std::vector<Direction>& directions_of(const SettingsPoint& x, std::size_t arity, const char* who) {
  const auto* dirs = std::get_if<DirectionSettings>(&x);
  if (dirs == nullptr || dirs->directions.size() != arity) {
    throw Error(ErrorKind::arity_mismatch, fmt::format("{} needs {} directions", who, arity));
  }
  return dirs->directions;
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double p_plus_plus(const QubitCorrelationData& data, const Vec3& a, const Vec3& b) {
  return 0.25 * (1.0 + dot(a, data.r_a) + dot(b, data.r_b) + correlation(data, a, b));
}

}  // namespace

namespace combine {

double chsh(double e_ab, double e_ad, double e_cd, double e_cb) {
  return std::abs(e_ab - e_ad) + e_cd + e_cb;
}

double i3322(const std::array<std::array<double, 3>, 3>& p, double pa1, double pb1, double pb2) {
  return p[0][0] + p[0][1] + p[0][2] + p[1][0] + p[1][1] - p[1][2] + p[2][0] - p[2][1] - pa1 -
         2.0 * pb1 - pb2;
}

double cglmp(int d, const DifferenceTable& diff) {
  auto at = [&](int a, int b, int m) {
    return diff[a][b][static_cast<std::size_t>(((m % d) + d) % d)];
  };
  double total = 0.0;
  for (int k = 0; k < d / 2; ++k) {
    const double w = 1.0 - 2.0 * k / (d - 1.0);
    // P(A1=B1+k) + P(B1=A2+k+1) + P(A2=B2+k) + P(B2=A1+k)
    const double plus = at(0, 0, k) + at(1, 0, -k - 1) + at(1, 1, k) + at(0, 1, -k);
    // P(A1=B1-k-1) + P(B1=A2-k) + P(A2=B2-k-1) + P(B2=A1-k-1)
    const double minus = at(0, 0, -k - 1) + at(1, 0, k) + at(1, 1, -k - 1) + at(0, 1, k + 1);
    total += w * (plus - minus);
  }
  return total;
}

}  // namespace combine

BellEvaluation chsh_value(const QubitCorrelationData& data, const SettingsPoint& x) {
  const auto& dirs = directions_of(x, 4, "CHSH");
  const Vec3 a = dirs[0].unit(), b = dirs[1].unit(), c = dirs[2].unit(), d = dirs[3].unit();
  return make_evaluation(combine::chsh(correlation(data, a, b), correlation(data, a, d),
                                       correlation(data, c, d), correlation(data, c, b)),
                         2.0);
}

BellEvaluation bell_original_value(const QubitCorrelationData& data, const SettingsPoint& x) {
  const auto& dirs = directions_of(x, 3, "Bell's original inequality");
  const Vec3 a = dirs[0].unit(), b = dirs[1].unit(), d = dirs[2].unit();
  return make_evaluation(combine::chsh(correlation(data, a, b), correlation(data, a, d),
                                       correlation(data, d, d), correlation(data, d, b)),
                         2.0);
}

BellEvaluation i3322_value(const QubitCorrelationData& data, const SettingsPoint& x) {
  const auto& dirs = directions_of(x, 6, "I3322");
  std::array<Vec3, 3> alice{}, bob{};
  for (int i = 0; i < 3; ++i) {
    alice[i] = dirs[i].unit();
    bob[i] = dirs[3 + i].unit();
  }
  std::array<std::array<double, 3>, 3> p{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) p[i][j] = p_plus_plus(data, alice[i], bob[j]);
  }
  const double pa1 = 0.5 * (1.0 + dot(alice[0], data.r_a));
  const double pb1 = 0.5 * (1.0 + dot(bob[0], data.r_b));
  const double pb2 = 0.5 * (1.0 + dot(bob[1], data.r_b));
  return make_evaluation(combine::i3322(p, pa1, pb1, pb2), 0.0);
}

namespace {

void check_phase_shape(const BipartiteState& state, const PhaseSettings& x) {
  const int d = state.local_dim();
  if (d != 3 && d != 4) {
    throw Error(ErrorKind::unsupported_dimension,
                fmt::format("CGLMP is implemented for d = 3, 4 (state has d = {})", d));
  }
  if (x.d != d || x.alice.size() != static_cast<std::size_t>(2 * d) ||
      x.bob.size() != static_cast<std::size_t>(2 * d)) {
    throw Error(ErrorKind::arity_mismatch,
                fmt::format("phase settings must be 2x{} per party (got d = {})", d, x.d));
  }
}

// Full d x d port table for one pair of settings.
std::vector<double> joint_table(const BipartiteState& state, const PhaseSettings& x, int a, int b) {
  const int d = state.local_dim();
  const auto c = state.amplitudes();
  const double f = state.noise_fraction();
  std::vector<double> table(static_cast<std::size_t>(d * d));
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      std::complex<double> amp{0.0, 0.0};
      for (int j = 0; j < d; ++j) {
        const double phase = x.alice_phase(a, j) + x.bob_phase(b, j) +
                             2.0 * std::numbers::pi * j * ((k + l) % d) / d;
        amp += c[j] * std::polar(1.0, phase);
      }
      table[static_cast<std::size_t>(k * d + l)] =
          (1.0 - f) * std::norm(amp) / (d * d) + f / (d * d);
    }
  }
  return table;
}

}  // namespace

double cglmp_joint_prob(const BipartiteState& state, const PhaseSettings& x, int a, int b, int k, int l) {
  check_phase_shape(state, x);
  const int d = state.local_dim();
  if (a < 0 || a > 1 || b < 0 || b > 1 || k < 0 || k >= d || l < 0 || l >= d) {
    throw Error(ErrorKind::index_out_of_range,
                fmt::format("setting/outcome index out of range (a={}, b={}, k={}, l={})", a, b, k, l));
  }
  return joint_table(state, x, a, b)[static_cast<std::size_t>(k * d + l)];
}

BellEvaluation cglmp_value(const BipartiteState& state, const PhaseSettings& x) {
  check_phase_shape(state, x);
  const int d = state.local_dim();
  combine::DifferenceTable diff;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto table = joint_table(state, x, a, b);
      auto& row = diff[a][b];
      row.assign(static_cast<std::size_t>(d), 0.0);
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
          const int m = ((k - bob_outcome(l, d)) % d + d) % d;
          row[static_cast<std::size_t>(m)] += table[static_cast<std::size_t>(k * d + l)];
        }
      }
    }
  }
  return make_evaluation(combine::cglmp(d, diff), 2.0);
}

BellEvaluation evaluate(const BellFunctional& f, const BipartiteState& state, const SettingsPoint& x) {
  if (state.local_dim() != f.local_dim()) {
    throw Error(ErrorKind::unsupported_dimension,
                fmt::format("{} needs d = {} but the state has d = {}", f.name(), f.local_dim(),
                            state.local_dim()));
  }
  switch (f.kind) {
    case FunctionalKind::chsh: return chsh_value(qubit_correlation_data(state), x);
    case FunctionalKind::bell_original: return bell_original_value(qubit_correlation_data(state), x);
    case FunctionalKind::i3322: return i3322_value(qubit_correlation_data(state), x);
    case FunctionalKind::cglmp3:
    case FunctionalKind::cglmp4: {
      const auto* ph = std::get_if<PhaseSettings>(&x);
      if (ph == nullptr) throw Error(ErrorKind::arity_mismatch, "CGLMP needs phase settings");
      return cglmp_value(state, *ph);
    }
  }
  throw Error(ErrorKind::invalid_parameter, "unknown functional");
}

}  // namespace bellvol
