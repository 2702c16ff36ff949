#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bellvol/bell.hpp"
#include "bellvol/error.hpp"
#include "support.hpp"

using namespace bellvol;

namespace {

constexpr double kPi = std::numbers::pi;

DirectionSettings xz_directions(std::initializer_list<double> angles) {
  DirectionSettings x;
  for (double t : angles) x.directions.push_back(Direction::from_vector({std::sin(t), 0.0, std::cos(t)}));
  return x;
}

}  // namespace

TEST_CASE("functional names and spaces") {
  CHECK(BellFunctional::parse("CHSH").kind == FunctionalKind::chsh);
  CHECK(BellFunctional::parse("bell").kind == FunctionalKind::bell_original);
  CHECK(BellFunctional::parse("i3322").space() == SettingsSpace::spheres(6));
  CHECK(BellFunctional::parse("cglmp3").space() == SettingsSpace::torus(12));
  CHECK(BellFunctional::parse("cglmp4").space() == SettingsSpace::torus(16));
  CHECK(BellFunctional::parse("bell").space() == SettingsSpace::spheres(3));
  for (auto name : {"chsh", "bell", "i3322", "cglmp3", "cglmp4"}) {
    CHECK(BellFunctional::parse(name).name() == name);
  }
  CHECK_THROWS_AS(BellFunctional::parse("cglmp5"), Error);
}

TEST_CASE("local bounds equal the deterministic-strategy maxima exactly") {
  CHECK(support::deterministic_max_chsh() == 2.0);
  CHECK(support::deterministic_max_i3322() == 0.0);
  CHECK(support::deterministic_max_cglmp(3) == 2.0);
  CHECK(support::deterministic_max_cglmp(4) == 2.0);
  CHECK(local_bound(BellFunctional::parse("chsh")) == 2.0);
  CHECK(local_bound(BellFunctional::parse("bell")) == 2.0);
  CHECK(local_bound(BellFunctional::parse("i3322")) == 0.0);
  CHECK(local_bound(BellFunctional::parse("cglmp3")) == 2.0);
  CHECK(local_bound(BellFunctional::parse("cglmp4")) == 2.0);
}

TEST_CASE("CHSH reaches 2 sqrt 2 at the textbook settings") {
  const auto data = qubit_correlation_data(make_alpha_qubit(1.0 / std::sqrt(2.0)));
  // a = z, b = (z + x)/sqrt2, c = x, d = (x - z)/sqrt2 in the order (a, b, c, d).
  const auto x = xz_directions({0.0, kPi / 4, kPi / 2, 3 * kPi / 4});
  const auto e = chsh_value(data, x);
  CHECK(e.value == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(e.violated);
  CHECK(e.bound == 2.0);
}

TEST_CASE("Bell's original form is CHSH with c = d") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto data = qubit_correlation_data(support::random_state(rng, 2, true));
    const auto x = support::random_directions(rng, 3);
    DirectionSettings four{{x.directions[0], x.directions[1], x.directions[2], x.directions[2]}};
    CHECK(bell_original_value(data, x).value == doctest::Approx(chsh_value(data, four).value).epsilon(1e-14));
  }
}

TEST_CASE("Tsirelson ceiling holds for random states and settings") {
  std::mt19937_64 rng(17);
  const double ceiling = 2.0 * std::sqrt(2.0) + 1e-9;
  for (int t = 0; t < 20000; ++t) {
    const auto s = support::random_state(rng, 2, t % 2 == 1);
    const auto data = qubit_correlation_data(s);
    REQUIRE(chsh_value(data, support::random_directions(rng, 4)).value <= ceiling);
  }
}

TEST_CASE("qubit functionals agree with dense projector probabilities") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const auto s = support::random_state(rng, 2, true);
    const auto data = qubit_correlation_data(s);
    const auto x = support::random_directions(rng, 6);
    std::array<Vec3, 3> a{}, b{};
    for (std::size_t i = 0; i < 3; ++i) {
      a[i] = x.directions[i].unit();
      b[i] = x.directions[3 + i].unit();
    }
    std::array<std::array<double, 3>, 3> pp{};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        pp[i][j] = 0.25 * (1 + support::dense_marginal_a(s, a[i]) + support::dense_marginal_b(s, b[j]) +
                           support::dense_correlation(s, a[i], b[j]));
      }
    }
    const double pa1 = 0.5 * (1 + support::dense_marginal_a(s, a[0]));
    const double pb1 = 0.5 * (1 + support::dense_marginal_b(s, b[0]));
    const double pb2 = 0.5 * (1 + support::dense_marginal_b(s, b[1]));
    CHECK(i3322_value(data, x).value == doctest::Approx(combine::i3322(pp, pa1, pb1, pb2)).epsilon(1e-12));

    DirectionSettings four{{x.directions[0], x.directions[1], x.directions[2], x.directions[3]}};
    const double dense_chsh =
        combine::chsh(support::dense_correlation(s, four.directions[0].unit(), four.directions[1].unit()),
                      support::dense_correlation(s, four.directions[0].unit(), four.directions[3].unit()),
                      support::dense_correlation(s, four.directions[2].unit(), four.directions[3].unit()),
                      support::dense_correlation(s, four.directions[2].unit(), four.directions[1].unit()));
    CHECK(chsh_value(data, four).value == doctest::Approx(dense_chsh).epsilon(1e-12));
  }
}

TEST_CASE("CGLMP joint probabilities match the dense density matrix") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const int d = 3 + t % 2;
    const auto s = support::random_state(rng, d, t % 3 == 0);
    const auto x = support::random_phases(rng, d);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        for (int k = 0; k < d; ++k) {
          for (int l = 0; l < d; ++l) {
            CHECK(std::abs(cglmp_joint_prob(s, x, a, b, k, l) - support::dense_cglmp_prob(s, x, a, b, k, l)) <
                  1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("CGLMP probabilities are normalized with uniform marginals") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    const int d = 3 + t % 2;
    const auto s = support::random_state(rng, d, t % 2 == 0);
    const auto x = support::random_phases(rng, d);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        double total = 0.0;
        for (int k = 0; k < d; ++k) {
          double marginal = 0.0;
          for (int l = 0; l < d; ++l) {
            const double p = cglmp_joint_prob(s, x, a, b, k, l);
            CHECK(p >= -1e-15);
            marginal += p;
          }
          CHECK(std::abs(marginal - 1.0 / d) < 1e-10);
          total += marginal;
        }
        CHECK(std::abs(total - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("CGLMP(3) at the stated optimal phases") {
  auto x = PhaseSettings::zeros(3);
  for (int j = 0; j < 3; ++j) {
    x.alice_phase(0, j) = 0.0;
    x.alice_phase(1, j) = kPi * j / 3;
    x.bob_phase(0, j) = kPi * j / 6;
    x.bob_phase(1, j) = -kPi * j / 6;
  }
  const auto e = cglmp_value(make_gamma_qutrit(1.0), x);
  CHECK(e.value == doctest::Approx(2.8729340511723356).epsilon(1e-12));
  CHECK(e.violated);
  // Zero phases give the local value 2 exactly.
  CHECK(cglmp_value(make_gamma_qutrit(1.0), PhaseSettings::zeros(3)).value == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("literal CGLMP(3) expression equals the general form") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 500; ++t) {
    const auto s = support::random_state(rng, 3, t % 2 == 0);
    const auto x = support::random_phases(rng, 3);
    CHECK(std::abs(support::literal_cglmp3(s, x) - cglmp_value(s, x).value) < 1e-12);
  }
}

TEST_CASE("CGLMP is invariant under global phase shifts of a setting") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int t = 0; t < 200; ++t) {
    const int d = 3 + t % 2;
    const auto s = support::random_state(rng, d, false);
    const auto x = support::random_phases(rng, d);
    const double base = cglmp_value(s, x).value;
    for (int party = 0; party < 2; ++party) {
      for (int setting = 0; setting < 2; ++setting) {
        auto y = x;
        const double shift = u(rng);
        for (int j = 0; j < d; ++j) (party == 0 ? y.alice_phase(setting, j) : y.bob_phase(setting, j)) += shift;
        CHECK(std::abs(cglmp_value(s, y).value - base) < 1e-12);
      }
    }
    // Whole turns on any single coordinate change nothing.
    auto z = x;
    z.alice[static_cast<std::size_t>(t) % z.alice.size()] += 2 * kPi;
    z.bob[static_cast<std::size_t>(t + 1) % z.bob.size()] -= 4 * kPi;
    CHECK(std::abs(cglmp_value(s, z).value - base) < 1e-12);
  }
}

TEST_CASE("CGLMP is bounded by its algebraic maximum and vanishes for white noise") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 2000; ++t) {
    const int d = 3 + t % 2;
    const auto s = support::random_state(rng, d, false);
    const auto v = cglmp_value(s, support::random_phases(rng, d)).value;
    CHECK(v <= 4.0);
    CHECK(v >= -4.0);
  }
  const auto x = support::random_phases(rng, 4);
  CHECK(std::abs(cglmp_value(make_lambda_ququart(1, 1, 1.0), x).value) < 1e-14);
  const auto data = qubit_correlation_data(make_alpha_qubit(0.5, 1.0));
  CHECK(std::abs(chsh_value(data, support::random_directions(rng, 4)).value) < 1e-14);
}

TEST_CASE("Bob's outcome labels") {
  CHECK(bob_outcome(0, 3) == 0);
  CHECK(bob_outcome(1, 3) == 2);
  CHECK(bob_outcome(2, 3) == 1);
  CHECK(bob_outcome(3, 4) == 1);
}

TEST_CASE("dispatch rejects mismatched inputs") {
  const auto chsh = BellFunctional::parse("chsh");
  const auto cglmp3 = BellFunctional::parse("cglmp3");
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::config_error;
  };
  CHECK(kind_of([&] { (void)evaluate(cglmp3, make_alpha_qubit(0.5), PhaseSettings::zeros(3)); }) ==
        ErrorKind::unsupported_dimension);
  CHECK(kind_of([&] { (void)evaluate(chsh, make_alpha_qubit(0.5), xz_directions({0, 1, 2})); }) ==
        ErrorKind::arity_mismatch);
  CHECK(kind_of([&] { (void)evaluate(cglmp3, make_gamma_qutrit(1.0), PhaseSettings::zeros(4)); }) ==
        ErrorKind::arity_mismatch);
  CHECK(kind_of([&] { (void)cglmp_joint_prob(make_gamma_qutrit(1.0), PhaseSettings::zeros(3), 2, 0, 0, 0); }) ==
        ErrorKind::index_out_of_range);
  CHECK(evaluate(chsh, make_alpha_qubit(1.0), xz_directions({0, 1, 2, 3})).value <= 2.0 + 1e-15);
}
