#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "weakcorr/errors.hpp"
#include "weakcorr/kinematics.hpp"
#include "weakcorr/state.hpp"

using namespace weakcorr;

namespace {

GridPtr desk() { return make_grid({257, 257, -8, 8, -8, 8}); }

// Largest |f - exact| over points with |x1|, |x2| <= 3.
template <typename F>
double central_error(const RealField& f, F exact) {
  const Grid& g = f.grid();
  double e = 0.0;
  for (std::size_t i = 0; i < g.n1(); ++i)
    for (std::size_t j = 0; j < g.n2(); ++j)
      if (std::abs(g.x1(i)) <= 3 && std::abs(g.x2(j)) <= 3)
        e = std::max(e, std::abs(f(i, j) - exact(g.x1(i), g.x2(j))));
  return e;
}

void all_ok(const std::vector<RouteCheck>& checks) {
  for (const auto& c : checks) {
    INFO(c.name << " residual " << c.residual);
    CHECK(c.ok());
  }
}

}  // namespace

// ---------------------------------------------------------------- velocities

TEST_CASE("osmotic velocity of a product Gaussian is -x/2") {
  auto v = velocity_fields(product_gaussian(desk(), {}, 1.0, 1.0));
  CHECK(central_error(v.u1, [](double x, double) { return -x / 2; }) < 1e-5);
  CHECK(central_error(v.u2, [](double, double y) { return -y / 2; }) < 1e-5);
  CHECK(central_error(v.v1, [](double, double) { return 0.0; }) < 1e-12);
}

TEST_CASE("phase Gaussian carries v2 = lambda x1") {
  auto v = velocity_fields(phase_gaussian(desk(), {}, 1.0, 0.3));
  CHECK(central_error(v.v2, [](double x, double) { return 0.3 * x; }) < 2e-5);
  CHECK(central_error(v.v1, [](double, double y) { return 0.3 * y; }) < 2e-5);
}

TEST_CASE("velocities scale inversely with mass") {
  auto light = velocity_fields(general_gaussian(desk(), {}, 0.5, 0.2, 0.3));
  auto heavy = velocity_fields(general_gaussian(desk(), {1.0, 2.0, 0.5}, 0.5, 0.2, 0.3));
  for (std::size_t k = 0; k < light.u1.size(); k += 101) {
    CHECK(heavy.u1[k] == doctest::Approx(light.u1[k] / 2));
    CHECK(heavy.v2[k] == doctest::Approx(light.v2[k] * 2));
  }
}

TEST_CASE("masked points carry zero velocity") {
  auto v = velocity_fields(product_gaussian(desk(), {}, 1.0, 1.0));
  CHECK_FALSE(v.mask(0, 0));
  CHECK(v.u1(0, 0) == 0.0);
  CHECK(v.log_grad1(0, 0) != cplx(0.0));
}

// ---------------------------------------------------------------- momentum

TEST_CASE("a plane-wave boost shifts the mean momentum") {
  auto wf = with_plane_phase(correlated_gaussian(desk(), {}, 0.5, 0.2), 0.7, -0.4);
  auto p1 = momentum_expectation(wf, 1);
  auto p2 = momentum_expectation(wf, 2);
  CHECK(p1.operator_route.real() == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(std::abs(p1.operator_route.imag()) < 1e-10);
  CHECK(p2.kinematic_route == doctest::Approx(-0.4).epsilon(1e-6));
  CHECK(p1.check.ok());
  CHECK(p2.check.ok());
}

TEST_CASE("momentum correlation of the Gaussian family") {
  auto corr = momentum_correlation(correlated_gaussian(desk(), {}, 0.5, 0.2));
  CHECK(corr.direct == doctest::Approx(0.1).epsilon(1e-5));
  CHECK(corr.osmotic_term == doctest::Approx(0.1).epsilon(1e-5));
  CHECK(std::abs(corr.velocity_term) < 1e-12);
  CHECK(corr.check.ok());

  auto phase = momentum_correlation(phase_gaussian(desk(), {}, 1.0, 0.3));
  CHECK(std::abs(phase.direct) < 1e-6);
  CHECK(phase.check.ok());

  // -m1 m2 hbar^2 lambda^2 b / (2 D) + hbar^2 b / 2 with D = a^2 - b^2
  auto gen = momentum_correlation(general_gaussian(desk(), {}, 0.5, 0.2, 0.3));
  const double expected = -0.09 * 0.2 / (2 * 0.21) + 0.1;
  CHECK(gen.direct == doctest::Approx(expected).epsilon(1e-5));
  CHECK(gen.check.ok());
}

TEST_CASE("momentum dispersion splits into flow and osmotic parts") {
  auto prod = momentum_dispersion(product_gaussian(desk(), {}, 1.0, 1.0), 1);
  CHECK(prod.sigma2_p == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(prod.m2_mean_u2 == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(std::abs(prod.m2_sigma2_v) < 1e-12);
  CHECK(prod.osmotic_split.ok());

  auto phase = momentum_dispersion(phase_gaussian(desk(), {}, 1.0, 0.3), 2);
  CHECK(phase.sigma2_p == doctest::Approx(0.34).epsilon(1e-6));
  CHECK(phase.m2_sigma2_v == doctest::Approx(0.09).epsilon(1e-6));
  CHECK(phase.osmotic_split.ok());
  CHECK(phase.potential_split.residual < 1e-5);
}

TEST_CASE("momentum dispersion rejects an out-of-range axis") {
  CHECK_THROWS_AS(momentum_dispersion(product_gaussian(desk(), {}, 1.0, 1.0), 3), UsageError);
}

// ---------------------------------------------------------------- quantum potential

TEST_CASE("quantum potential of a product Gaussian") {
  auto q = quantum_potential(product_gaussian(desk(), {}, 1.0, 1.0));
  CHECK(q.amplitude_route.vq_total(128, 128) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(q.velocity_route.vq_total(128, 128) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(central_error(q.amplitude_route.vq1, [](double x, double) { return 0.25 - x * x / 8; }) < 1e-5);
  CHECK(q.check.residual < 1e-5);
}

TEST_CASE("quantum potential scales with the inverse mass") {
  auto q = quantum_potential(product_gaussian(desk(), {1.0, 2.0, 1.0}, 1.0, 1.0));
  CHECK(q.amplitude_route.vq1(128, 128) == doctest::Approx(0.125).epsilon(1e-6));
  CHECK(q.amplitude_route.vq2(128, 128) == doctest::Approx(0.25).epsilon(1e-6));
}

// ---------------------------------------------------------------- identities

TEST_CASE("the commutator evaluates to i hbar") {
  for (double hbar : {1.0, 0.5}) {
    auto c = commutator_check(general_gaussian(desk(), {hbar, 1.0, 1.0}, 0.5, 0.2, 0.3), 1);
    CHECK(c.lhs.imag() == doctest::Approx(hbar).epsilon(1e-6));
    CHECK(std::abs(c.lhs.real()) < 1e-10);
    CHECK(c.check.ok());
    CHECK(c.deviation_from_ihbar < 1e-6);
  }
}

TEST_CASE("integration by parts of velocity gradients") {
  auto corr = integration_by_parts_check(correlated_gaussian(desk(), {}, 0.5, 0.2));
  CHECK(corr.mean_d1u2 == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(corr.mean_u1u2 == doctest::Approx(0.1).epsilon(1e-6));
  all_ok(corr.checks);

  auto phase = integration_by_parts_check(phase_gaussian(desk(), {}, 1.0, 0.3));
  CHECK(phase.mean_d1v2 == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(phase.mean_d2v1 == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(phase.mean_u1v2 == doctest::Approx(-0.15).epsilon(1e-6));
  all_ok(phase.checks);
}

TEST_CASE("osmotic stress terms") {
  auto corr = pi_terms(correlated_gaussian(desk(), {}, 0.5, 0.2));
  CHECK(corr.mean_pi_uu_12 == doctest::Approx(0.1).epsilon(1e-5));
  CHECK(corr.mean_u1u2_term == doctest::Approx(0.1).epsilon(1e-5));
  all_ok(corr.checks);

  auto gen = pi_terms(general_gaussian(desk(), {1.0, 2.0, 0.5}, 0.5, 0.2, 0.3));
  CHECK(std::abs(gen.mean_pi_uv_12) < 1e-6);
  all_ok(gen.checks);
}

TEST_CASE("a failed check raises a consistency error") {
  CHECK_NOTHROW(require({"fine", 1e-9, 1e-8}));
  CHECK_THROWS_AS(require({"broken", 1e-3, 1e-8}), NumericalConsistencyError);
}

TEST_CASE("spectral and fd4 agree on the product Gaussian") {
  auto wf = product_gaussian(make_grid({257, 257, -12, 12, -12, 12}), {}, 1.0, 1.0);
  AnalysisOptions spectral{Scheme::spectral, 1e-8};
  auto a = momentum_dispersion(wf, 1, spectral);
  CHECK(a.sigma2_p == doctest::Approx(0.25).epsilon(1e-8));
  auto fd = momentum_dispersion(wf, 1);
  CHECK(fd.sigma2_p == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("spectral scheme refuses a state that does not decay") {
  auto wf = product_gaussian(desk(), {}, 1.0, 1.0);
  CHECK_THROWS_AS(momentum_dispersion(wf, 1, {Scheme::spectral, 1e-8}), ConfigurationError);
}
