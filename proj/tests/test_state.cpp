#include <doctest.h>

#include <cmath>
#include <random>

#include "bellvol/error.hpp"
#include "bellvol/state.hpp"
#include "support.hpp"

using namespace bellvol;

TEST_CASE("amplitudes are normalized on construction") {
  const auto s = make_gamma_qutrit(0.792);
  double n = 0.0;
  for (double c : s.amplitudes()) n += c * c;
  CHECK(n == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.local_dim() == 3);
  CHECK(s.is_pure());
  CHECK(make_lambda_ququart(0.739, 0.739).local_dim() == 4);
}

TEST_CASE("invalid states are rejected") {
  CHECK_THROWS_AS(BipartiteState({1.0, 1.0}, 1.5), Error);
  CHECK_THROWS_AS(BipartiteState({1.0, 1.0}, -0.1), Error);
  CHECK_THROWS_AS(BipartiteState({1.0}, 0.0), Error);
  CHECK_THROWS_AS(BipartiteState({1, 1, 1, 1, 1}, 0.0), Error);
  CHECK_THROWS_AS(BipartiteState({0.0, 0.0}, 0.0), Error);
  CHECK_THROWS_AS(BipartiteState({1.0, -1.0}, 0.0), Error);
  CHECK_THROWS_AS(make_alpha_qubit(1.2), Error);
  CHECK_THROWS_AS(make_gamma_qutrit(-0.1), Error);
  CHECK_THROWS_AS(make_state(FamilySpec{StateFamily::lambda_ququart, {1.0}, 0.0}), Error);
}

TEST_CASE("family descriptions") {
  CHECK(FamilySpec{StateFamily::gamma_qutrit, {1.0}, 0.0}.describe() == "gamma=1");
  CHECK(FamilySpec{StateFamily::lambda_ququart, {1.0, 0.5}, 0.2}.describe() == "lambda=1;0.5;noise=0.2");
}

TEST_CASE("Schmidt spectrum is sorted and sums to one") {
  const auto s = make_lambda_ququart(0.6, 1.2);
  const auto sp = schmidt_spectrum(s).probabilities;
  REQUIRE(sp.size() == 4);
  double sum = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    sum += sp[i];
    if (i > 0) CHECK(sp[i - 1] >= sp[i]);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sp[0] == doctest::Approx(1.44 / (1 + 0.36 + 1.44 + 1)));
}

TEST_CASE("pure-state measures refuse mixed states") {
  const auto s = make_alpha_qubit(0.8, 0.1);
  try {
    (void)schmidt_spectrum(s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_for_mixed);
  }
  CHECK_THROWS_AS((void)entropy_of_entanglement(s), Error);
}

TEST_CASE("entropy of entanglement at known points") {
  CHECK(entropy_of_entanglement(make_alpha_qubit(1.0 / std::sqrt(2.0))) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(entropy_of_entanglement(make_alpha_qubit(1.0)) == doctest::Approx(0.0));
  CHECK(entropy_of_entanglement(make_gamma_qutrit(1.0)) == doctest::Approx(std::log2(3.0)).epsilon(1e-14));
  CHECK(entropy_of_entanglement(make_lambda_ququart(1.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-14));
  // Binary entropy of alpha^2.
  const double a = 0.6;
  const double p = a * a;
  const double h = -p * std::log2(p) - (1 - p) * std::log2(1 - p);
  CHECK(entropy_of_entanglement(make_alpha_qubit(a)) == doctest::Approx(h).epsilon(1e-13));
}

TEST_CASE("entropy is bounded by log2 d") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const int d = 2 + t % 3;
    const auto s = support::random_state(rng, d, false);
    const double e = entropy_of_entanglement(s);
    CHECK(e >= 0.0);
    CHECK(e <= std::log2(static_cast<double>(d)) + 1e-12);
  }
}

TEST_CASE("concurrence matches the closed form for noisy alpha states") {
  // C = max(0, 2 alpha beta (1 - F) - F / 2)
  for (double alpha : {0.3, 0.5, 1.0 / std::sqrt(2.0), 0.9, 1.0}) {
    for (double f : {0.0, 0.1, 0.3, 0.5, 0.8, 1.0}) {
      const double beta = std::sqrt(1 - alpha * alpha);
      const double expected = std::max(0.0, 2 * alpha * beta * (1 - f) - f / 2);
      CHECK(concurrence_two_qubit(make_alpha_qubit(alpha, f)) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  CHECK(concurrence_two_qubit(make_alpha_qubit(1.0 / std::sqrt(2.0), 0.5)) == doctest::Approx(0.25));
  CHECK_THROWS_AS((void)concurrence_two_qubit(make_gamma_qutrit(1.0)), Error);
}

TEST_CASE("correlation data agrees with the dense density matrix") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto s = support::random_state(rng, 2, true);
    const auto data = qubit_correlation_data(s);
    const auto x = support::random_directions(rng, 2);
    const Vec3 a = x.directions[0].unit();
    const Vec3 b = x.directions[1].unit();
    double e = 0.0, ma = 0.0, mb = 0.0;
    for (int i = 0; i < 3; ++i) {
      ma += a[i] * data.r_a[i];
      mb += b[i] * data.r_b[i];
      for (int j = 0; j < 3; ++j) e += a[i] * data.T[i][j] * b[j];
    }
    CHECK(e == doctest::Approx(support::dense_correlation(s, a, b)).epsilon(1e-12));
    CHECK(ma == doctest::Approx(support::dense_marginal_a(s, a)).epsilon(1e-12));
    CHECK(mb == doctest::Approx(support::dense_marginal_b(s, b)).epsilon(1e-12));
  }
}
