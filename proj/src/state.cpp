#include "bellvol/state.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "bellvol/error.hpp"

namespace bellvol {

namespace {

void require(bool ok, ErrorKind kind, const std::string& msg) {
  if (!ok) throw Error(kind, msg);
}

}  // namespace

BipartiteState::BipartiteState(std::vector<double> amplitudes, double noise_fraction)
    : amplitudes_(std::move(amplitudes)), noise_fraction_(noise_fraction) {
  const auto d = amplitudes_.size();
  require(d >= 2 && d <= 4, ErrorKind::invalid_parameter,
          fmt::format("local dimension must be 2, 3 or 4 (got {})", d));
  require(std::isfinite(noise_fraction) && noise_fraction >= 0.0 && noise_fraction <= 1.0,
          ErrorKind::invalid_parameter,
          fmt::format("noise fraction must lie in [0,1] (got {})", noise_fraction));
  double norm2 = 0.0;
  for (double c : amplitudes_) {
    require(std::isfinite(c) && c >= 0.0, ErrorKind::invalid_parameter,
            "Schmidt amplitudes must be finite and nonnegative");
    norm2 += c * c;
  }
  require(norm2 > 0.0, ErrorKind::invalid_parameter, "amplitude vector is zero");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& c : amplitudes_) c *= inv;
}

std::string FamilySpec::describe() const {
  std::string out;
  switch (family) {
    case StateFamily::alpha_qubit:
      out = fmt::format("alpha={}", params.at(0));
      break;
    case StateFamily::gamma_qutrit:
      out = fmt::format("gamma={}", params.at(0));
      break;
    case StateFamily::lambda_ququart:
      out = fmt::format("lambda={};{}", params.at(0), params.at(1));
      break;
  }
  if (noise != 0.0) out += fmt::format(";noise={}", noise);
  return out;
}

BipartiteState make_alpha_qubit(double alpha, double noise) {
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, ErrorKind::invalid_parameter,
          fmt::format("alpha must lie in [0,1] (got {})", alpha));
  return BipartiteState({alpha, std::sqrt(std::max(0.0, 1.0 - alpha * alpha))}, noise);
}

BipartiteState make_gamma_qutrit(double gamma, double noise) {
  require(std::isfinite(gamma) && gamma >= 0.0, ErrorKind::invalid_parameter,
          fmt::format("gamma must be >= 0 (got {})", gamma));
  return BipartiteState({1.0, gamma, 1.0}, noise);
}

BipartiteState make_lambda_ququart(double lambda1, double lambda2, double noise) {
  require(std::isfinite(lambda1) && std::isfinite(lambda2) && lambda1 >= 0.0 && lambda2 >= 0.0,
          ErrorKind::invalid_parameter,
          fmt::format("lambda1, lambda2 must be >= 0 (got {}, {})", lambda1, lambda2));
  return BipartiteState({1.0, lambda1, lambda2, 1.0}, noise);
}

BipartiteState make_state(const FamilySpec& spec) {
  const std::size_t want = spec.family == StateFamily::lambda_ququart ? 2 : 1;
  require(spec.params.size() == want, ErrorKind::invalid_parameter,
          fmt::format("state family expects {} parameter(s), got {}", want, spec.params.size()));
  switch (spec.family) {
    case StateFamily::alpha_qubit:
      return make_alpha_qubit(spec.params[0], spec.noise);
    case StateFamily::gamma_qutrit:
      return make_gamma_qutrit(spec.params[0], spec.noise);
    case StateFamily::lambda_ququart:
      return make_lambda_ququart(spec.params[0], spec.params[1], spec.noise);
  }
  throw Error(ErrorKind::invalid_parameter, "unknown state family");
}

SchmidtSpectrum schmidt_spectrum(const BipartiteState& state) {
  require(state.is_pure(), ErrorKind::unsupported_for_mixed,
          "Schmidt spectrum is only defined here for pure states (noise = 0)");
  SchmidtSpectrum out;
  out.probabilities.reserve(state.amplitudes().size());
  for (double c : state.amplitudes()) out.probabilities.push_back(c * c);
  std::sort(out.probabilities.begin(), out.probabilities.end(), std::greater<>());
  return out;
}

double entropy_of_entanglement(const BipartiteState& state) {
  require(state.is_pure(), ErrorKind::unsupported_for_mixed,
          "entropy of entanglement requires a pure state (noise = 0)");
  double e = 0.0;
  for (double p : schmidt_spectrum(state).probabilities) {
    if (p > 0.0) e -= p * std::log2(p);
  }
  return std::max(0.0, e);
}

namespace {

using Mat4c = Eigen::Matrix4cd;

Mat4c density_matrix_4x4(const BipartiteState& state) {
  // Basis order |00>, |01>, |10>, |11>.
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(0) = state.amplitudes()[0];
  psi(3) = state.amplitudes()[1];
  const double f = state.noise_fraction();
  return (1.0 - f) * psi * psi.adjoint() + (f / 4.0) * Mat4c::Identity();
}

Mat4c psd_sqrt(const Mat4c& m) {
  Eigen::SelfAdjointEigenSolver<Mat4c> es(m);
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double concurrence_two_qubit(const BipartiteState& state) {
  require(state.local_dim() == 2, ErrorKind::unsupported_dimension,
          fmt::format("concurrence is implemented for two qubits only (d = {})", state.local_dim()));
  const Mat4c rho = density_matrix_4x4(state);
  // sigma_y (x) sigma_y in the computational basis is the anti-diagonal (-1, 1, 1, -1).
  Mat4c yy = Mat4c::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Mat4c flipped = yy * rho.conjugate() * yy;
  const Mat4c s = psd_sqrt(rho);
  const Mat4c r = s * flipped * s;
  Eigen::SelfAdjointEigenSolver<Mat4c> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::clamp(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0);
}

QubitCorrelationData qubit_correlation_data(const BipartiteState& state) {
  require(state.local_dim() == 2, ErrorKind::unsupported_dimension,
          fmt::format("qubit correlation data needs d = 2 (got {})", state.local_dim()));
  const double a = state.amplitudes()[0];
  const double b = state.amplitudes()[1];
  const double keep = 1.0 - state.noise_fraction();
  QubitCorrelationData out;
  out.T[0][0] = keep * 2.0 * a * b;
  out.T[1][1] = -keep * 2.0 * a * b;
  out.T[2][2] = keep;
  out.r_a = {0.0, 0.0, keep * (a * a - b * b)};
  out.r_b = out.r_a;
  return out;
}

}  // namespace bellvol
