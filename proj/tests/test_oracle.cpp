#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "weakcorr/errors.hpp"
#include "weakcorr/kinematics.hpp"
#include "weakcorr/oracle.hpp"
#include "weakcorr/state.hpp"

using namespace weakcorr;
using namespace weakcorr::oracle;

namespace {

StateSpec general(double a, double b, double lambda) {
  StateSpec s;
  s.kind = StateKind::general_gaussian;
  s.a = a;
  s.b = b;
  s.lambda = lambda;
  return s;
}

StateSpec kind_only(StateKind k) {
  StateSpec s;
  s.kind = k;
  return s;
}

}  // namespace

// ---------------------------------------------------------------- closed forms

TEST_CASE("closed forms are mutually consistent") {
  const PhysicsParams masses[] = {{1.0, 1.0, 1.0}, {0.7, 2.0, 0.5}, {1.3, 0.8, 1.5}};
  const StateSpec specs[] = {general(0.5, 0.2, 0.3), general(0.8, -0.3, 0.1), general(0.4, 0.0, -0.6)};
  for (int k = 0; k < 3; ++k) {
    const auto& p = masses[k];
    const auto t = gaussian_truth(specs[k], p);
    const double hb = p.hbar;
    CHECK(t.sigma2_p1 == doctest::Approx(p.m1 * p.m1 * (t.mean_v1_sq + t.mean_u1_sq)));
    CHECK(t.sigma2_p2 == doctest::Approx(p.m2 * p.m2 * (t.mean_v2_sq + t.mean_u2_sq)));
    CHECK(t.c_p1p2 == doctest::Approx(p.m1 * p.m2 * (t.mean_v1v2 + t.mean_u1u2)));
    CHECK(t.mean_d1u2 == doctest::Approx(-2 * p.m1 / hb * t.mean_u1u2));
    CHECK(t.mean_d1v2 == doctest::Approx(-2 * p.m1 / hb * t.mean_u1v2));
    CHECK(t.mean_u1v2 == doctest::Approx(t.mean_u2v1));
    CHECK(t.mean_x1u1 == doctest::Approx(-hb / (2 * p.m1)));
    CHECK(t.re_cw == doctest::Approx(hb * hb * t.b));
    CHECK(t.im_cw == doctest::Approx(-hb * hb * t.lambda));
    CHECK(t.re_cw == doctest::Approx(p.m1 * p.m2 * 2 * t.mean_u1u2));
    CHECK(t.vq_origin == doctest::Approx(hb * hb * (t.a1 / (2 * p.m1) + t.a2 / (2 * p.m2))));
  }
}

TEST_CASE("closed forms for the named families") {
  StateSpec prod = kind_only(StateKind::product_gaussian);
  prod.sigma1 = 1.0;
  prod.sigma2 = 2.0;
  auto t = gaussian_truth(prod, {});
  CHECK(t.a1 == doctest::Approx(0.5));
  CHECK(t.a2 == doctest::Approx(0.125));
  CHECK(t.sigma2_p2 == doctest::Approx(0.0625));
  CHECK(t.mean_u1u2 == 0.0);

  StateSpec phase = kind_only(StateKind::phase_gaussian);
  phase.sigma = 1.0;
  phase.lambda = 0.3;
  auto tp = gaussian_truth(phase, {});
  CHECK(tp.sigma2_p2 == doctest::Approx(0.34));
  CHECK(tp.c_p1p2 == doctest::Approx(0.0));
}

TEST_CASE("closed forms need a Gaussian") {
  CHECK_THROWS_AS(gaussian_truth(kind_only(StateKind::cat), {}), ConfigurationError);
  CHECK_THROWS_AS(gaussian_truth(general(0.2, 0.3, 0.0), {}), ConfigurationError);
}

// ---------------------------------------------------------------- brute force

TEST_CASE("brute-force quadrature reproduces the closed forms") {
  const PhysicsParams p{1.0, 1.2, 0.8};
  const auto spec = general(0.5, 0.2, 0.3);
  const auto t = gaussian_truth(spec, p);
  const GridSpec grid{128, 128, -8, 8, -8, 8};
  const std::pair<Integrand, double> cases[] = {
      {Integrand::u1u2, t.mean_u1u2}, {Integrand::u1v2, t.mean_u1v2}, {Integrand::u2v1, t.mean_u2v1},
      {Integrand::v1v2, t.mean_v1v2}, {Integrand::u1_sq, t.mean_u1_sq}, {Integrand::v1_sq, t.mean_v1_sq},
      {Integrand::d1u2, t.mean_d1u2}, {Integrand::d1v2, t.mean_d1v2},  {Integrand::x1u1, t.mean_x1u1},
      {Integrand::re_cw, t.re_cw},    {Integrand::im_cw, t.im_cw}};
  for (const auto& [what, exact] : cases) {
    const auto r = brute_force_expectation(spec, grid, p, what, 2);
    INFO("integrand " << static_cast<int>(what));
    CHECK(std::abs(r.value - exact) < 5e-7);
    CHECK(std::abs(r.value - exact) <= std::abs(r.raw - exact));
  }
}

TEST_CASE("brute-force mean velocities vanish") {
  const auto spec = general(0.5, 0.2, 0.3);
  for (auto what : {Integrand::u1, Integrand::u2, Integrand::v1, Integrand::v2}) {
    CHECK(std::abs(brute_force_expectation(spec, {128, 128, -8, 8, -8, 8}, {}, what).value) < 1e-8);
  }
}

TEST_CASE("cat osmotic correlation agrees with the pipeline") {
  StateSpec cat = kind_only(StateKind::cat);
  cat.c = 2.0;
  cat.sigma = 0.5;
  const GridSpec grid{256, 256, -8, 8, -8, 8};
  const auto truth = brute_force_expectation(cat, grid, {}, Integrand::u1u2, 2);
  CHECK(truth.value == doctest::Approx(-1.8006e-6).epsilon(1e-3));
  auto ibp = integration_by_parts_check(make_state(cat, make_grid(grid), {}));
  CHECK(ibp.mean_u1u2 == doctest::Approx(truth.value).epsilon(1e-2));
}

TEST_CASE("integrand names") {
  CHECK(parse_integrand("u1v2") == Integrand::u1v2);
  CHECK(parse_integrand("vq2") == Integrand::vq2);
  CHECK_THROWS_AS(parse_integrand("w1"), UsageError);
}

TEST_CASE("brute-force argument checks") {
  const auto spec = general(0.5, 0.2, 0.3);
  CHECK_THROWS_AS(brute_force_expectation(spec, {64, 64, -8, 8, -8, 8}, {}, Integrand::u1, 0), UsageError);
  CHECK_THROWS_AS(brute_force_expectation(kind_only(StateKind::file), {64, 64, -8, 8, -8, 8}, {}, Integrand::u1),
                  ConfigurationError);
}

// ---------------------------------------------------------------- conjugate space

TEST_CASE("momentum-space dispersion matches the closed forms") {
  const GridSpec grid{256, 256, -8, 8, -8, 8};
  CHECK(momentum_space_dispersion(kind_only(StateKind::product_gaussian), grid, {}, 1) ==
        doctest::Approx(0.25).epsilon(4e-7));
  StateSpec phase = kind_only(StateKind::phase_gaussian);
  phase.sigma = 1.0;
  phase.lambda = 0.3;
  CHECK(momentum_space_dispersion(phase, grid, {}, 2) == doctest::Approx(0.34).epsilon(1e-6));
  CHECK_THROWS_AS(momentum_space_dispersion(phase, grid, {}, 3), UsageError);
}
