#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "bellvol/settings.hpp"
#include "bellvol/state.hpp"

namespace bellvol {

enum class FunctionalKind { chsh, bell_original, i3322, cglmp3, cglmp4 };

struct BellFunctional {
  FunctionalKind kind = FunctionalKind::chsh;

  /// Accepts chsh, bell, i3322, cglmp3, cglmp4 (case-insensitive).
  static BellFunctional parse(std::string_view name);
  std::string name() const;
  /// Local dimension of the states this functional is defined for.
  int local_dim() const;
  /// Settings space the functional's arguments live in.
  SettingsSpace space() const;
  bool is_cglmp() const { return kind == FunctionalKind::cglmp3 || kind == FunctionalKind::cglmp4; }

  bool operator==(const BellFunctional&) const = default;
};

/// Maximum over deterministic local strategies: CHSH and Bell 2, I3322 0
/// (Collins-Gisin form), CGLMP 2.
double local_bound(const BellFunctional& f);

struct BellEvaluation {
  double value = 0.0;
  double bound = 0.0;
  bool violated = false;  // value > bound, strictly
};

BellEvaluation make_evaluation(double value, double bound);

/// E(a, b) = a^T T b.
double correlation(const QubitCorrelationData& data, const Vec3& a, const Vec3& b);

/// Directions (a, b, c, d); a, c belong to Alice and b, d to Bob.
///   I = |E(a,b) - E(a,d)| + E(c,d) + E(c,b)
BellEvaluation chsh_value(const QubitCorrelationData& data, const SettingsPoint& x);
/// Directions (a, b, d) with c := d.
BellEvaluation bell_original_value(const QubitCorrelationData& data, const SettingsPoint& x);
/// Directions (A1, A2, A3, B1, B2, B3), Collins-Gisin zero-bound form.
BellEvaluation i3322_value(const QubitCorrelationData& data, const SettingsPoint& x);

/// Joint probability that Alice's interferometer for setting `a` fires
/// port k and Bob's for setting `b` fires port l (settings are 0-based):
///
///   A(k,l) = 1/d sum_j c_j exp(i[phi_a(j) + varphi_b(j)]) exp(i 2pi/d j(k+l))
///   P = (1 - F)|A|^2 + F/d^2
double cglmp_joint_prob(const BipartiteState& state, const PhaseSettings& x, int a, int b, int k, int l);

/// Bob's outcome label for detector port l. The functional reads Bob's
/// result as -l mod d; with this labelling the interferometer phases above
/// reproduce the known CGLMP optimum.
inline int bob_outcome(int port, int d) { return (d - port) % d; }

/// CGLMP functional (d = 3 or 4), bound 2.
BellEvaluation cglmp_value(const BipartiteState& state, const PhaseSettings& x);

/// Dispatches on the functional; throws on dimension/arity mismatch.
BellEvaluation evaluate(const BellFunctional& f, const BipartiteState& state, const SettingsPoint& x);

/// Functional formulas on raw statistics. Shared by the evaluators and the
/// deterministic-strategy bound checks.
namespace combine {

double chsh(double e_ab, double e_ad, double e_cd, double e_cb);

/// p_pp[i][j] = P(+,+ | A_i, B_j); marginals P_A(+|A1), P_B(+|B1), P_B(+|B2).
double i3322(const std::array<std::array<double, 3>, 3>& p_pp, double pa1, double pb1, double pb2);

/// diff[a][b][m] = P(A_a - B_b = m mod d).
using DifferenceTable = std::array<std::array<std::vector<double>, 2>, 2>;
double cglmp(int d, const DifferenceTable& diff);

}  // namespace combine

}  // namespace bellvol
