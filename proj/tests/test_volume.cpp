#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "bellvol/error.hpp"
#include "bellvol/volume.hpp"

using namespace bellvol;

namespace {

const BellFunctional kChsh = BellFunctional::parse("chsh");
const BellFunctional kCglmp3 = BellFunctional::parse("cglmp3");
const BellFunctional kCglmp4 = BellFunctional::parse("cglmp4");

EstimatorOptions with_workers(int w, std::size_t block = 4096) {
  EstimatorOptions o;
  o.workers = w;
  o.block_size = block;
  return o;
}

}  // namespace

TEST_CASE("Wilson interval") {
  const auto [lo0, hi0] = wilson_interval(0, 1000000);
  CHECK(lo0 == 0.0);
  const double z = 1.959963984540054;
  CHECK(hi0 == doctest::Approx(z * z / (1e6 + z * z)).epsilon(1e-9));
  CHECK(hi0 < 1e-5);
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo < 0.5);
  CHECK(hi > 0.5);
  CHECK((0.5 - lo) == doctest::Approx(hi - 0.5));
  const auto [lo1, hi1] = wilson_interval(100, 100);
  CHECK(hi1 == 1.0);
  CHECK(lo1 < 1.0);
}

TEST_CASE("estimate invariants") {
  for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{7}, std::uint64_t{1000}}) {
    for (std::uint64_t h : {std::uint64_t{0}, std::uint64_t{1}, n / 2, n}) {
      if (h > n) continue;
      const auto e = make_estimate(h, n);
      CHECK(e.fraction >= 0.0);
      CHECK(e.fraction <= 1.0);
      CHECK(e.ci_low <= e.fraction);
      CHECK(e.ci_high >= e.fraction);
      CHECK(e.value >= 0.0);
      CHECK(e.normalization == NormalizationMode::absolute);
    }
  }
  CHECK_THROWS_AS(make_estimate(0, 0), Error);
  CHECK_THROWS_AS(make_estimate(5, 4), Error);
}

TEST_CASE("separable and fully noisy states never violate") {
  const auto e = estimate_volume(make_alpha_qubit(1.0), kChsh, kChsh.space(), 200000, 1);
  CHECK(e.hits == 0);
  CHECK(e.value == 0.0);
  CHECK(estimate_volume(make_gamma_qutrit(1.0, 1.0), kCglmp3, kCglmp3.space(), 100000, 1).hits == 0);
  CHECK(estimate_volume(make_lambda_ququart(1, 1, 1.0), kCglmp4, kCglmp4.space(), 100000, 1).hits == 0);
}

TEST_CASE("hit counts do not depend on worker count, block size or kernel") {
  const auto s = make_gamma_qutrit(1.0);
  const std::uint64_t n = 300001;
  const auto base = estimate_volume(s, kCglmp3, kCglmp3.space(), n, 5, with_workers(1));
  CHECK(base.hits > 0);
  for (int w : {4, 16}) {
    CHECK(estimate_volume(s, kCglmp3, kCglmp3.space(), n, 5, with_workers(w)).hits == base.hits);
  }
  for (std::size_t bs : {1u, 1000u, 65536u}) {
    CHECK(estimate_volume(s, kCglmp3, kCglmp3.space(), n, 5, with_workers(3, bs)).hits == base.hits);
  }
  EstimatorOptions scalar = with_workers(2);
  scalar.isa = kernels::Isa::scalar;
  CHECK(estimate_volume(s, kCglmp3, kCglmp3.space(), n, 5, scalar).hits == base.hits);
  if (kernels::isa_supported(kernels::Isa::avx2)) {
    EstimatorOptions avx = with_workers(2);
    avx.isa = kernels::Isa::avx2;
    CHECK(estimate_volume(s, kCglmp3, kCglmp3.space(), n, 5, avx).hits == base.hits);
  }
  CHECK(estimate_volume(s, kCglmp3, kCglmp3.space(), n, 6, with_workers(1)).hits != base.hits);
}

TEST_CASE("BELLVOL_WORKERS sets the default worker count") {
  setenv("BELLVOL_WORKERS", "3", 1);
  CHECK(default_worker_count() == 3);
  setenv("BELLVOL_WORKERS", "bogus", 1);
  CHECK(default_worker_count() >= 1);
  unsetenv("BELLVOL_WORKERS");
}

TEST_CASE("hit counts are additive over sample ranges") {
  const auto s = make_alpha_qubit(0.7);
  const auto all = count_hits(s, kChsh, 0, 100000, 9, with_workers(2));
  const auto a = count_hits(s, kChsh, 0, 37001, 9, with_workers(2));
  const auto b = count_hits(s, kChsh, 37001, 100000 - 37001, 9, with_workers(2));
  CHECK(all == a + b);
}

TEST_CASE("kernel hit counts agree with the reference evaluator") {
  const auto s = make_gamma_qutrit(0.9);
  const std::uint64_t n = 20000;
  std::uint64_t ref = 0;
  std::uint64_t near = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double v = evaluate(kCglmp3, s, sample_settings(kCglmp3.space(), 3, i)).value;
    ref += v > 2.0 ? 1u : 0u;
    near += std::abs(v - 2.0) < 1e-9 ? 1u : 0u;
  }
  const auto hits = count_hits(s, kCglmp3, 0, n, 3, with_workers(1));
  CHECK(hits + near >= ref);
  CHECK(ref + near >= hits);
}

TEST_CASE("a positive margin can only remove hits") {
  const auto s = make_alpha_qubit(1.0 / std::sqrt(2.0));
  std::uint64_t prev = ~0ull;
  for (double m : {0.0, 0.05, 0.2, 0.5, 0.9}) {
    EstimatorOptions o;
    o.margin = m;
    const auto h = estimate_volume(s, kChsh, kChsh.space(), 100000, 2, o).hits;
    CHECK(h <= prev);
    prev = h;
  }
  CHECK(prev == 0);  // 2 + 0.9 exceeds the Tsirelson value
  EstimatorOptions bad;
  bad.margin = -1.0;
  CHECK_THROWS_AS(estimate_volume(s, kChsh, kChsh.space(), 10, 2, bad), Error);
}

TEST_CASE("space and dimension mismatches are reported") {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::config_error;
  };
  CHECK(kind_of([] { (void)estimate_volume(make_alpha_qubit(0.7), kChsh, SettingsSpace::spheres(3), 10, 1); }) ==
        ErrorKind::arity_mismatch);
  CHECK(kind_of([] { (void)estimate_volume(make_alpha_qubit(0.7), kCglmp3, kCglmp3.space(), 10, 1); }) ==
        ErrorKind::unsupported_dimension);
  CHECK(kind_of([] { (void)estimate_volume(make_alpha_qubit(0.7), kChsh, kChsh.space(), 0, 1); }) ==
        ErrorKind::invalid_parameter);
}

TEST_CASE("stderr-targeted estimation equals a fixed-size run") {
  const auto s = make_alpha_qubit(0.75);
  const auto e = estimate_volume_to_stderr(s, kChsh, kChsh.space(), 1e-3, 10000, 1000000, 4);
  CHECK(e.std_error <= 1e-3);
  CHECK(e.samples % 10000 == 0);
  CHECK(estimate_volume(s, kChsh, kChsh.space(), e.samples, 4).hits == e.hits);
}

TEST_CASE("calibration regions reproduce their measures") {
  for (const auto& region : standard_calibration_regions()) {
    const auto r = calibrate_estimator(region, 1000000, 1, 2);
    CHECK_MESSAGE(r.passed, region.name << " z = " << r.z_score);
    CHECK(std::abs(r.estimate.fraction - region.fraction) < 0.002);
    // Independent of the worker count.
    CHECK(calibrate_estimator(region, 100000, 3, 1).estimate.hits ==
          calibrate_estimator(region, 100000, 3, 5).estimate.hits);
  }
}

TEST_CASE("relative normalization") {
  std::map<std::string, VolumeEstimate> m{{"A", make_estimate(100, 1000)}, {"B", make_estimate(50, 1000)}};
  const auto r = relative_normalize(m, "A");
  CHECK(r.at("A").value == doctest::Approx(1.0));
  CHECK(r.at("B").value == doctest::Approx(0.5));
  CHECK(r.at("B").normalization == NormalizationMode::relative);
  CHECK(r.at("B").reference_fraction == doctest::Approx(0.1));
  CHECK(r.at("A").value_std_error == 0.0);
  const double rel = std::sqrt(0.05 * 0.95 / 1000) / 0.05;
  const double ref_rel = std::sqrt(0.1 * 0.9 / 1000) / 0.1;
  CHECK(r.at("B").value_std_error == doctest::Approx(0.5 * std::sqrt(rel * rel + ref_rel * ref_rel)));
  std::map<std::string, VolumeEstimate> z{{"A", make_estimate(0, 1000)}, {"B", make_estimate(50, 1000)}};
  try {
    (void)relative_normalize(z, "A");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::undefined_normalization);
  }
  CHECK_THROWS_AS(relative_normalize(m, "C"), Error);
}
