#pragma once

// Independent oracles shared by the unit tests and the acceptance runner.
// Everything here is computed from dense matrices or by brute force and
// never goes through the library's closed forms.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bellvol/bell.hpp"
#include "bellvol/settings.hpp"
#include "bellvol/state.hpp"

namespace support {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

inline Eigen::MatrixXcd density_matrix(const bellvol::BipartiteState& s) {
  const int d = s.local_dim();
  const int n = d * d;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
  for (int j = 0; j < d; ++j) psi(j * d + j) = s.amplitudes()[static_cast<std::size_t>(j)];
  const double f = s.noise_fraction();
  Eigen::MatrixXcd rho = (1.0 - f) * psi * psi.adjoint();
  rho += (f / n) * Eigen::MatrixXcd::Identity(n, n);
  return rho;
}

/// Port-k vector of an interferometer with phases `phases` (one per basis state).
inline Eigen::VectorXcd port_vector(const std::vector<double>& phases, int k) {
  const int d = static_cast<int>(phases.size());
  Eigen::VectorXcd u(d);
  for (int j = 0; j < d; ++j) {
    u(j) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), phases[static_cast<std::size_t>(j)] +
                                                                     2.0 * kPi * j * k / d);
  }
  return u;
}

/// P(port k, port l) from the dense density matrix.
inline double dense_cglmp_prob(const bellvol::BipartiteState& s, const bellvol::PhaseSettings& x, int a, int b,
                               int k, int l) {
  const int d = s.local_dim();
  std::vector<double> pa(static_cast<std::size_t>(d)), pb(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    pa[static_cast<std::size_t>(j)] = x.alice_phase(a, j);
    pb[static_cast<std::size_t>(j)] = x.bob_phase(b, j);
  }
  const Eigen::VectorXcd u = port_vector(pa, k);
  const Eigen::VectorXcd v = port_vector(pb, l);
  // <e|psi> = sum u_j1 v_j2 psi_(j1 j2), so e is the conjugated product.
  Eigen::VectorXcd e(d * d);
  for (int j1 = 0; j1 < d; ++j1) {
    for (int j2 = 0; j2 < d; ++j2) e(j1 * d + j2) = std::conj(u(j1) * v(j2));
  }
  return (e.adjoint() * density_matrix(s) * e)(0, 0).real();
}

/// CGLMP(3) written term by term (eight probabilities, four of each sign).
inline double literal_cglmp3(const bellvol::BipartiteState& s, const bellvol::PhaseSettings& x) {
  const int d = 3;
  // P(A_a = alpha, B_b = beta) with Bob's label beta = -port mod d.
  auto joint = [&](int a, int b, int alpha, int beta) {
    for (int l = 0; l < d; ++l) {
      if (bellvol::bob_outcome(l, d) == beta) return bellvol::cglmp_joint_prob(s, x, a, b, alpha, l);
    }
    return 0.0;
  };
  auto prob = [&](int a, int b, auto rel) {
    double p = 0.0;
    for (int al = 0; al < d; ++al) {
      for (int be = 0; be < d; ++be) {
        if (rel(al, be)) p += joint(a, b, al, be);
      }
    }
    return p;
  };
  auto mod = [](int v) { return ((v % 3) + 3) % 3; };
  const double p1 = prob(0, 0, [](int A, int B) { return A == B; });                  // A1 = B1
  const double p2 = prob(1, 0, [&](int A, int B) { return B == mod(A + 1); });        // B1 = A2 + 1
  const double p3 = prob(1, 1, [](int A, int B) { return A == B; });                  // A2 = B2
  const double p4 = prob(0, 1, [](int A, int B) { return B == A; });                  // B2 = A1
  const double m1 = prob(0, 0, [&](int A, int B) { return A == mod(B - 1); });        // A1 = B1 - 1
  const double m2 = prob(1, 0, [](int A, int B) { return B == A; });                  // B1 = A2
  const double m3 = prob(1, 1, [&](int A, int B) { return A == mod(B - 1); });        // A2 = B2 - 1
  const double m4 = prob(0, 1, [&](int A, int B) { return B == mod(A - 1); });        // B2 = A1 - 1
  return (p1 + p2 + p3 + p4) - (m1 + m2 + m3 + m4);
}

inline Eigen::Matrix2cd pauli(int i) {
  Eigen::Matrix2cd m;
  switch (i) {
    case 0: m << 0, 1, 1, 0; break;
    case 1: m << 0, cd(0, -1), cd(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Eigen::Matrix2cd spin_along(const bellvol::Vec3& n) {
  return n[0] * pauli(0) + n[1] * pauli(1) + n[2] * pauli(2);
}

inline Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return k;
}

/// Tr(rho (a.sigma) x (b.sigma)) from the dense 4x4 density matrix.
inline double dense_correlation(const bellvol::BipartiteState& s, const bellvol::Vec3& a, const bellvol::Vec3& b) {
  const Eigen::MatrixXcd rho = density_matrix(s);
  return (rho * kron(spin_along(a), spin_along(b))).trace().real();
}

inline double dense_marginal_a(const bellvol::BipartiteState& s, const bellvol::Vec3& a) {
  const Eigen::MatrixXcd rho = density_matrix(s);
  return (rho * kron(spin_along(a), Eigen::Matrix2cd::Identity())).trace().real();
}

inline double dense_marginal_b(const bellvol::BipartiteState& s, const bellvol::Vec3& b) {
  const Eigen::MatrixXcd rho = density_matrix(s);
  return (rho * kron(Eigen::Matrix2cd::Identity(), spin_along(b))).trace().real();
}

/// Maximum of CHSH over all deterministic +-1 assignments.
inline double deterministic_max_chsh() {
  double best = -1e300;
  for (int m = 0; m < 16; ++m) {
    const double a = (m & 1) ? 1 : -1, c = (m & 2) ? 1 : -1, b = (m & 4) ? 1 : -1, d = (m & 8) ? 1 : -1;
    best = std::max(best, bellvol::combine::chsh(a * b, a * d, c * d, c * b));
  }
  return best;
}

/// Maximum of I3322 (Collins-Gisin form) over deterministic 0/1 strategies.
inline double deterministic_max_i3322() {
  double best = -1e300;
  for (int m = 0; m < 64; ++m) {
    std::array<double, 3> a{}, b{};
    for (int i = 0; i < 3; ++i) {
      a[static_cast<std::size_t>(i)] = (m >> i) & 1;
      b[static_cast<std::size_t>(i)] = (m >> (3 + i)) & 1;
    }
    std::array<std::array<double, 3>, 3> pp{};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) pp[i][j] = a[i] * b[j];
    }
    best = std::max(best, bellvol::combine::i3322(pp, a[0], b[0], b[1]));
  }
  return best;
}

/// Maximum of CGLMP(d) over all d^4 deterministic strategies.
inline double deterministic_max_cglmp(int d) {
  double best = -1e300;
  for (int A1 = 0; A1 < d; ++A1) {
    for (int A2 = 0; A2 < d; ++A2) {
      for (int B1 = 0; B1 < d; ++B1) {
        for (int B2 = 0; B2 < d; ++B2) {
          const int A[2] = {A1, A2};
          const int B[2] = {B1, B2};
          bellvol::combine::DifferenceTable diff;
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
              auto& row = diff[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
              row.assign(static_cast<std::size_t>(d), 0.0);
              row[static_cast<std::size_t>(((A[a] - B[b]) % d + d) % d)] = 1.0;
            }
          }
          best = std::max(best, bellvol::combine::cglmp(d, diff));
        }
      }
    }
  }
  return best;
}

inline bellvol::BipartiteState random_state(std::mt19937_64& rng, int d, bool noisy) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> c(static_cast<std::size_t>(d));
  for (auto& v : c) v = u(rng);
  return bellvol::BipartiteState(c, noisy ? std::uniform_real_distribution<double>(0.0, 1.0)(rng) : 0.0);
}

inline bellvol::PhaseSettings random_phases(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-2.0 * kPi, 4.0 * kPi);
  auto x = bellvol::PhaseSettings::zeros(d);
  for (auto& v : x.alice) v = u(rng);
  for (auto& v : x.bob) v = u(rng);
  return x;
}

inline bellvol::DirectionSettings random_directions(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> th(0.0, kPi), ph(0.0, 2.0 * kPi);
  bellvol::DirectionSettings x;
  for (int i = 0; i < n; ++i) x.directions.push_back({th(rng), ph(rng)});
  return x;
}

}  // namespace support
