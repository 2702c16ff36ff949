#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace bellvol {

/// Which one-parameter family a state was built from. Only used for
/// reporting; evaluators work off the amplitudes.
enum class StateFamily { alpha_qubit, gamma_qutrit, lambda_ququart };

/// Two d-level systems in Schmidt-diagonal form, optionally mixed with
/// white noise:
///
///   rho = (1 - F) |psi><psi| + F * I / d^2,   |psi> = sum_j c_j |jj>
///
/// Amplitudes are real, nonnegative, and normalized on construction.
class BipartiteState {
 public:
  BipartiteState(std::vector<double> amplitudes, double noise_fraction);

  int local_dim() const noexcept { return static_cast<int>(amplitudes_.size()); }
  std::span<const double> amplitudes() const noexcept { return amplitudes_; }
  double noise_fraction() const noexcept { return noise_fraction_; }
  bool is_pure() const noexcept { return noise_fraction_ == 0.0; }

 private:
  std::vector<double> amplitudes_;
  double noise_fraction_;
};

struct FamilySpec {
  StateFamily family = StateFamily::alpha_qubit;
  // alpha (qubit), gamma (qutrit) or (lambda1, lambda2) (ququart).
  std::vector<double> params;
  double noise = 0.0;

  std::string describe() const;
};

BipartiteState make_state(const FamilySpec& spec);
BipartiteState make_alpha_qubit(double alpha, double noise = 0.0);
BipartiteState make_gamma_qutrit(double gamma, double noise = 0.0);
BipartiteState make_lambda_ququart(double lambda1, double lambda2, double noise = 0.0);

/// Squared Schmidt coefficients, sorted descending.
struct SchmidtSpectrum {
  std::vector<double> probabilities;
};

SchmidtSpectrum schmidt_spectrum(const BipartiteState& state);

/// Entropy of entanglement in bits; in [0, log2 d].
double entropy_of_entanglement(const BipartiteState& state);

/// Wootters concurrence; d = 2 only, any noise fraction.
double concurrence_two_qubit(const BipartiteState& state);

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// T_ij = <sigma_i (x) sigma_j> and the two Bloch vectors, so that
/// E(a, b) = a^T T b and P(+,+) = (1 + a.rA + b.rB + a^T T b) / 4.
struct QubitCorrelationData {
  Mat3 T{};
  Vec3 r_a{};
  Vec3 r_b{};
};

QubitCorrelationData qubit_correlation_data(const BipartiteState& state);

}  // namespace bellvol
