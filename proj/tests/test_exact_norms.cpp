#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "morreylab/exact_norms.hpp"
#include "morreylab/grid_norms.hpp"

using namespace morreylab;

namespace {

// Random parameters landing in a prescribed regime m.
MorreyParams random_params_in_regime(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> qd(0.5, 2.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double q = qd(rng);
  double pLo, pHi;
  if (m == 1) {
    pLo = n * q;
    pHi = 3.0 * n * q;
  } else {
    pLo = n * q / m;
    pHi = n * q / (m - 1);
  }
  const double p = pLo + u(rng) * (pHi - pLo);
  return make_params(n, std::max(p, q), q);
}

AxisBox random_box(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> logSide(std::log(1e-2), std::log(1e2));
  std::vector<double> sides(n);
  for (double& s : sides) s = std::exp(logSide(rng));
  return make_box(std::move(sides));
}

}  // namespace

TEST_CASE("box indicator norm: named values") {
  // max(1, 4^{4/3-1}) for sides (1,4) at n=2, p=3/2, q=1.
  const NormValue v = box_indicator_norm(make_box({1.0, 4.0}),
                                         make_params(2, 1.5, 1.0));
  CHECK(v.kind == NormKind::exact);
  CHECK(v.value == doctest::Approx(std::cbrt(4.0)).epsilon(1e-12));
  CHECK(v.witness.find("R=4") != std::string::npos);

  // Unit cube: every candidate is 1.
  for (auto [n, p, q] : {std::tuple{1, 2.0, 1.0}, {2, 1.5, 1.0}, {3, 3.0, 3.0}}) {
    const NormValue unit = box_indicator_norm(
        make_box(std::vector<double>(n, 1.0)), make_params(n, p, q));
    CHECK(unit.value == 1.0);
  }

  // p = q collapses to |B|^{1/p}.
  const NormValue lp = box_indicator_norm(make_box({2.0, 3.0}),
                                          make_params(2, 2.0, 2.0));
  CHECK(lp.value == doctest::Approx(std::sqrt(6.0)).epsilon(1e-14));

  // Two-sided family (1, a) in the m = 2 regime: a^{1/q} a^{2/p-2/q}.
  const MorreyParams params = make_params(2, 1.5, 1.0);
  REQUIRE(regime_index(params).m == 2);
  for (double a : {1.0, 2.0, 5.0, 100.0}) {
    const NormValue got = box_indicator_norm(make_box({1.0, a}), params);
    const double expected =
        std::pow(a, 1.0 / params.q) * std::pow(a, 2.0 / params.p - 2.0 / params.q);
    CHECK(got.value == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("box indicator norm matches independent R sweep") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % n);
    const MorreyParams params = random_params_in_regime(rng, n, m);
    const AxisBox box = random_box(rng, n);
    const NormValue closed = box_indicator_norm(box, params);
    const NormValue swept = oracle_r_sweep(box.sides, params, {100000, 1e3});
    CHECK(swept.value <= closed.value * (1.0 + 1e-12));
    CHECK(std::abs(swept.value - closed.value) <=
          1e-9 * std::max(closed.value, 1.0));
  }
}

TEST_CASE("regime boundary: adjacent candidates coincide") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logSide(0.0, std::log(50.0));
  for (int n : {2, 3, 4}) {
    for (int m = 1; m < n; ++m) {
      const double q = 1.3;
      const double p = n * q / m;  // exactly on the m / m+1 boundary
      const MorreyParams params = make_params(n, p, q);
      std::vector<double> sides(n);
      for (double& s : sides) s = std::exp(logSide(rng));
      std::sort(sides.begin(), sides.end());
      const auto candidates = box_norm_candidates(sides, params);
      // At p = nq/m the formulas for regimes m and m+1 give the same value.
      const auto norm = box_indicator_norm(make_box(sides), params).value;
      const double cm = candidates[m - 1];
      const double cm1 = candidates[m];
      CHECK(std::max(cm, cm1) ==
            doctest::Approx(norm).epsilon(1e-12));
      // The boundary makes candidate m+1 / candidate m == (s_{m+1}/s_m)^0.
      CHECK(cm1 == doctest::Approx(cm).epsilon(1e-12));
    }
  }
}

TEST_CASE("slab indicator norm") {
  // Unit-thickness slab at n=2, p=2, q=1: sup_R R^{n/p-1/q} min(1,R)^{1/q} = 1.
  const NormValue unit = slab_indicator_norm({1.0}, make_params(2, 2.0, 1.0));
  CHECK(unit.value == 1.0);
  CHECK(unit.finite());

  const NormValue thick = slab_indicator_norm({8.0}, make_params(2, 4.0, 1.0));
  CHECK(thick.value == doctest::Approx(std::pow(8.0, 0.5)).epsilon(1e-13));

  const NormValue unbounded =
      slab_indicator_norm({1.0}, make_params(2, 1.0, 1.0));
  CHECK_FALSE(unbounded.finite());

  const NormValue fullSpace = slab_indicator_norm({}, make_params(2, 2.0, 1.0));
  CHECK_FALSE(fullSpace.finite());
  CHECK(fullSpace.witness.find("full-space") != std::string::npos);

  // All sides finite falls back to the box closed form.
  const NormValue asBox =
      slab_indicator_norm({1.0, 4.0}, make_params(2, 1.5, 1.0));
  CHECK(asBox.value == doctest::Approx(std::cbrt(4.0)).epsilon(1e-12));
}

TEST_CASE("slab norm is the monotone limit of stretched boxes") {
  const MorreyParams params = make_params(3, 4.0, 1.0);  // m = 1 regime
  const NormValue slab = slab_indicator_norm({2.0}, params);
  REQUIRE(slab.finite());
  double prev = 0.0;
  for (double T : {4.0, 64.0, 1024.0, 65536.0, 1e9}) {
    const NormValue box =
        box_indicator_norm(make_box({2.0, T, T}), params);
    CHECK(box.value >= prev - 1e-15);
    CHECK(box.value <= slab.value * (1.0 + 1e-12));
    prev = box.value;
  }
  CHECK(prev == doctest::Approx(slab.value).epsilon(1e-3));
}

TEST_CASE("dilation factors") {
  const MorreyParams p22 = make_params(2, 2.0, 1.0);
  CHECK(dilation_norm_factor(1.0, p22, Dilation::precompose) == 1.0);
  CHECK(dilation_norm_factor(16.0, make_params(2, 2.0, 2.0),
                             Dilation::precompose) ==
        doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK(dilation_norm_factor(8.0, make_params(1, 2.0, 1.0),
                             Dilation::support_scale) ==
        doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
}

TEST_CASE("scaling law against the closed form") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % n);
    const MorreyParams params = random_params_in_regime(rng, n, m);
    const AxisBox box = random_box(rng, n);
    const double base = box_indicator_norm(box, params).value;
    for (double t : {1.0 / 7.0, 1.0, 3.0, 16.0}) {
      AxisBox scaled = box;
      for (double& s : scaled.sides) s *= t;
      const double got = box_indicator_norm(scaled, params).value;
      const double expected =
          dilation_norm_factor(t, params, Dilation::support_scale) * base;
      CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("monotone in every side and bounded by |B|^{1/p}") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % n);
    const MorreyParams params = random_params_in_regime(rng, n, m);
    AxisBox box = random_box(rng, n);
    const double before = box_indicator_norm(box, params).value;

    CHECK(before <=
          std::pow(box_volume(box), 1.0 / params.p) * (1.0 + 1e-12));

    const int axis = static_cast<int>(rng() % n);
    box.sides[axis] *= 1.5;
    const double after = box_indicator_norm(box, params).value;
    CHECK(after >= before * (1.0 - 1e-12));
  }
  // Equality at p = q.
  const AxisBox box = make_box({0.3, 5.0, 1.7});
  const double norm =
      box_indicator_norm(box, make_params(3, 1.5, 1.5)).value;
  CHECK(norm == doctest::Approx(std::pow(box_volume(box), 1.0 / 1.5))
                    .epsilon(1e-13));
}

TEST_CASE("translation invariance") {
  const MorreyParams params = make_params(2, 1.5, 1.0);
  const double anchored =
      box_indicator_norm(make_box({1.0, 4.0}), params).value;
  const double translated =
      box_indicator_norm(make_box({-17.0, 3.25}, {1.0, 4.0}), params).value;
  CHECK(anchored == translated);
}

TEST_CASE("weak norm of indicators equals the strong norm") {
  for (double value : {1.0, std::cbrt(4.0), 0.0}) {
    const NormValue strong{value, NormKind::exact, "R=1 (breakpoint k=1)"};
    const NormValue weak = indicator_weak_norm(strong);
    CHECK(weak.value == value);
    CHECK(weak.kind == NormKind::exact);
    CHECK(weak.witness.find("weak = strong") != std::string::npos);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(
      box_indicator_norm(make_box({1.0, kInf}), make_params(2, 2.0, 1.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      box_indicator_norm(make_box({1.0}), make_params(2, 2.0, 1.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(slab_indicator_norm({1.0, 2.0}, make_params(1, 2.0, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(dilation_norm_factor(0.0, make_params(1, 1.0, 1.0),
                                       Dilation::precompose),
                  std::invalid_argument);
}
