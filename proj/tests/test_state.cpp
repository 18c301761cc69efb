#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "entacc/errors.hpp"
#include "entacc/kinetics.hpp"
#include "entacc/state.hpp"

using namespace entacc;

namespace {
const double kLn3Half = 0.5 * std::log(3.0);
const double kSqrt3Quarter = std::sqrt(3.0) / 4.0;
}  // namespace

TEST_CASE("branch ordering and signs") {
  CHECK(static_cast<int>(ContourBranch::D1) == 0);
  CHECK(static_cast<int>(ContourBranch::U1) == 1);
  CHECK(static_cast<int>(ContourBranch::D2) == 2);
  CHECK(static_cast<int>(ContourBranch::U2) == 3);
  CHECK(branch_sign(ContourBranch::D1) == -1);
  CHECK(branch_sign(ContourBranch::U1) == +1);
  CHECK(branch_sign(ContourBranch::D2) == -1);
  CHECK(branch_sign(ContourBranch::U2) == +1);
  CHECK(branch_name(ContourBranch::U2) == "u2");
}

TEST_CASE("init_thermal") {
  SUBCASE("x = 0 gives all components 1/2") {
    const auto s = init_thermal(thermal_point(0.0));
    for (double f : s.components()) CHECK(f == 0.5);
  }
  SUBCASE("x = ln(3)/2") {
    const auto s = init_thermal(thermal_point(kLn3Half));
    CHECK(s.f1() == doctest::Approx(kSqrt3Quarter).epsilon(1e-15));
    CHECK(s.f2() == doctest::Approx(kSqrt3Quarter).epsilon(1e-15));
    CHECK(s.f3() == doctest::Approx(kSqrt3Quarter).epsilon(1e-15));
    CHECK(s.f0() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s.f4() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s.f5() == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("fixed under zero couplings") {
    const auto th = thermal_point(0.7);
    const auto s = init_thermal(th);
    // built directly: make_couplings would reject Jt = 0
    EffectiveCouplings zero{0.0, 0.0, 0.0};
    const SlavedKineticModel model(zero, th);
    for (double d : model.rhs(s.components())) CHECK(d == 0.0);
    CHECK(reduced_rhs(s.f3(), zero, th) == 0.0);
  }
}

TEST_CASE("physicality window enforced at construction") {
  CHECK_NOTHROW(DistributionState(0.0, 1.0, -1.0, 0.5, 0.0, 0.0));
  CHECK_THROWS_AS(DistributionState(-0.1, 0.0, 0.0, 0.0, 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(DistributionState(1.1, 0.0, 0.0, 0.0, 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(DistributionState(0.5, 0.0, 0.0, 0.0, 1.5, 0.0), InvalidInput);
  CHECK_THROWS_AS(DistributionState(0.5, NAN, 0.0, 0.0, 0.0, 0.0), InvalidInput);
}

TEST_CASE("distribution matrix layout") {
  const auto s = init_thermal(thermal_point(0.0));
  const auto g = distribution_matrix(s, Ordering::Greater);
  CHECK(g[0][0] == -0.5);
  CHECK(g[1][1] == 0.5);
  CHECK(g[2][2] == -0.5);
  CHECK(g[3][3] == 0.5);

  const DistributionState t(0.1, 0.2, 0.3, 0.4, 0.5, 0.6);
  const auto m = distribution_matrix(t, Ordering::Greater);
  const Matrix4 expected{{{-0.1, -0.3, -0.4, -0.6},
                          {0.2, 0.9, -0.5, -0.4},
                          {0.4, 0.6, -0.1, -0.3},
                          {0.5, 0.4, 0.2, 0.9}}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(m[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-15));

  SUBCASE("lesser minus greater is diag(+1, -1, +1, -1)") {
    const auto l = distribution_matrix(t, Ordering::Lesser);
    const double diag[4] = {1.0, -1.0, 1.0, -1.0};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(l[i][j] - m[i][j] == doctest::Approx(i == j ? diag[i] : 0.0));
  }
  SUBCASE("inter-replica block vanishes without inter-replica weights") {
    const DistributionState u(0.3, 0.2, 0.1, 0.0, 0.0, 0.0);
    const auto z = distribution_matrix(u, Ordering::Greater);
    for (int i = 0; i < 2; ++i)
      for (int j = 2; j < 4; ++j) {
        CHECK(z[i][j] == 0.0);
        CHECK(z[j][i] == 0.0);
      }
  }
}

TEST_CASE("renyi_delta examples") {
  SUBCASE("slaved state at f3 = w2b vanishes for any thermal point") {
    for (double x : {-2.0, 0.0, 0.3, kLn3Half, 1.7}) {
      const auto th = thermal_point(x);
      CHECK(renyi_delta(SlavedState{th.w2b, th}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("slaved state at f3 = 0, x = ln(3)/2") {
    const auto th = thermal_point(kLn3Half);
    CHECK(renyi_delta(SlavedState{0.0, th}) == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-14));
    CHECK(renyi_delta(SlavedState{0.0, th}) == doctest::Approx(0.267949).epsilon(1e-6));
  }
  SUBCASE("raw thermal init gives 2 - 4 n2b") {
    for (double x : {0.0, 0.4, kLn3Half}) {
      const auto th = thermal_point(x);
      CHECK(renyi_delta(init_thermal(th)) == doctest::Approx(2.0 - 4.0 * th.n2b).epsilon(1e-14));
    }
  }
}

TEST_CASE("slaved expansion rules") {
  const auto th = thermal_point(0.35);
  const SlavedState s{0.2, th};
  const auto d = s.expand();
  CHECK(d.f0() == th.n2b);
  CHECK(d.f1() == th.w2b);
  CHECK(d.f2() == th.w2b);
  CHECK(d.f4() == doctest::Approx(th.n2b * 0.2 / th.w2b));
  CHECK(d.f5() == doctest::Approx((1.0 - th.n2b) * 0.2 / th.w2b));
  CHECK(d.f4() + d.f5() == doctest::Approx(0.2 / th.w2b).epsilon(1e-15));
  CHECK_THROWS_AS((SlavedState{-1.5, thermal_point(0.0)}.expand()), InvalidInput);
}

TEST_CASE("property: renyi_delta is affine along mixtures") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> s(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const DistributionState a(u(rng), s(rng), s(rng), s(rng), s(rng), s(rng));
    const DistributionState b(u(rng), s(rng), s(rng), s(rng), s(rng), s(rng));
    const double lam = u(rng);
    DistributionState::Components mix{};
    for (int z = 0; z < 6; ++z) mix[z] = lam * a[z] + (1.0 - lam) * b[z];
    REQUIRE(renyi_delta(DistributionState(mix)) ==
            doctest::Approx(lam * renyi_delta(a) + (1.0 - lam) * renyi_delta(b)).epsilon(1e-13));
  }
}

TEST_CASE("property: slaved entropy equals 2 (1 - 2 w)(1 - f3 / w)") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> xs(-3.0, 3.0);
  std::uniform_real_distribution<double> cs(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto th = thermal_point(xs(rng));
    const double f3 = cs(rng) * th.w2b;
    const double expected = (1.0 - 2.0 * th.w2b) * 2.0 * (1.0 - f3 / th.w2b);
    REQUIRE(renyi_delta(SlavedState{f3, th}) == doctest::Approx(expected).scale(1.0).epsilon(1e-13));
  }
}
