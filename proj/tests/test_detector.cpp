#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "weakcorr/detector.hpp"
#include "weakcorr/errors.hpp"

using namespace weakcorr;

namespace {

GridPtr desk() { return make_grid({256, 256, -8, 8, -8, 8}); }

EntanglementIndicators indicators_of(const WaveFunction& wf) { return indicators(wf, weak_correlation(wf)); }

}  // namespace

// ---------------------------------------------------------------- indicators

TEST_CASE("indicator values for the Gaussian family") {
  auto corr = indicators_of(correlated_gaussian(desk(), {}, 0.5, 0.2));
  CHECK(corr.iA_mean == doctest::Approx(0.4).epsilon(1e-5));
  CHECK(corr.iA_sup == doctest::Approx(0.8).epsilon(1e-4));
  CHECK(corr.iP_mean < 1e-10);
  CHECK(corr.iP_sup < 1e-10);

  auto phase = indicators_of(phase_gaussian(desk(), {}, 1.0, 0.3));
  CHECK(phase.iA_mean < 1e-6);
  CHECK(phase.iP_mean == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(phase.iP_sup == doctest::Approx(1.2).epsilon(1e-4));

  // iP_mean = sqrt(1 - (b/a)^2) for this family
  auto gen = indicators_of(general_gaussian(desk(), {}, 0.5, 0.2, 0.3));
  CHECK(gen.iA_mean == doctest::Approx(0.4).epsilon(1e-5));
  CHECK(gen.iP_mean == doctest::Approx(std::sqrt(0.84)).epsilon(1e-5));
  CHECK(gen.iP_sup == doctest::Approx(1.2).epsilon(1e-4));
}

TEST_CASE("a product state has vanishing indicators") {
  auto ind = indicators_of(product_gaussian(desk(), {}, 1.0, 0.8));
  CHECK(ind.iA_mean < 1e-8);
  CHECK(ind.iA_sup < 1e-4);
  CHECK(ind.iP_mean < 1e-8);
  CHECK(ind.iP_sup < 1e-10);
}

TEST_CASE("indicators ignore boosts and global phases") {
  auto wf = general_gaussian(desk(), {}, 0.5, 0.2, 0.3);
  auto base = indicators_of(wf);
  for (const auto& moved : {with_plane_phase(wf, 0.7, -0.3), with_global_phase(wf, 2.0)}) {
    auto ind = indicators_of(moved);
    CHECK(ind.iA_mean == doctest::Approx(base.iA_mean).epsilon(1e-6));
    CHECK(ind.iA_sup == doctest::Approx(base.iA_sup).epsilon(1e-4));
    CHECK(ind.iP_mean == doctest::Approx(base.iP_mean).epsilon(1e-6));
    CHECK(ind.iP_sup == doctest::Approx(base.iP_sup).epsilon(1e-4));
  }
}

// ---------------------------------------------------------------- classification

TEST_CASE("the two-by-two design lands in four classes") {
  CHECK(classify(indicators_of(product_gaussian(desk(), {}, 1.0, 1.0))).classification == Classification::product);
  CHECK(classify(indicators_of(correlated_gaussian(desk(), {}, 0.5, 0.2))).classification ==
        Classification::a_only);
  CHECK(classify(indicators_of(phase_gaussian(desk(), {}, 1.0, 0.3))).classification == Classification::p_only);
  CHECK(classify(indicators_of(general_gaussian(desk(), {}, 0.5, 0.2, 0.3))).classification ==
        Classification::ap);
}

TEST_CASE("classification thresholds") {
  EntanglementIndicators ind{2e-3, 0.0, 0.0, 5e-4};
  auto v = classify(ind, 1e-3);
  CHECK(v.classification == Classification::a_only);
  CHECK(v.iA_mean_above);
  CHECK_FALSE(v.iA_sup_above);
  CHECK_FALSE(v.iP_sup_above);
  CHECK(classify(ind, 1e-4).classification == Classification::ap);
  CHECK(classify({0.0, 0.0, 0.0, 0.0}).classification == Classification::product);
  CHECK(std::string(to_string(Classification::p_only)) == "P_ONLY");
  CHECK(std::string(to_string(Classification::ap)) == "AP");
}

TEST_CASE("tau must lie in (0, 0.1]") {
  EntanglementIndicators ind;
  CHECK_THROWS_AS(classify(ind, 0.0), UsageError);
  CHECK_THROWS_AS(classify(ind, 0.2), UsageError);
  CHECK_NOTHROW(classify(ind, 0.1));
}

TEST_CASE("the cat state is flagged by its inter-lobe saddle") {
  auto wf = cat_state(desk(), {}, 2.0, 0.5);
  auto ind = indicators_of(wf);
  CHECK(ind.iA_mean < 1e-3);
  CHECK(ind.iA_sup > 1.0);
  CHECK(classify(ind).classification == Classification::a_only);
}

TEST_CASE("a coarser mask removes the cat saddle") {
  auto wf = cat_state(desk(), {}, 2.0, 0.5);
  auto fine = weak_correlation(wf);
  auto coarse = weak_correlation(wf, {Scheme::fd4, 1e-6});
  CHECK(fine.mask(128, 128));
  CHECK_FALSE(coarse.mask(128, 128));
  CHECK(coarse.sup_re < fine.sup_re);
}

// ---------------------------------------------------------------- identity suite

TEST_CASE("the product state passes the identity suite") {
  auto report = identity_suite(product_gaussian(desk(), {}, 1.0, 1.0));
  for (const auto& r : report.residuals) {
    INFO(r.name << " residual " << r.residual);
    CHECK(r.pass);
  }
  CHECK(report.all_pass());
  CHECK(report.residuals.size() > 20);
  CHECK(report.at("weak_correlation_routes").residual < 1e-5);
  CHECK_THROWS(report.at("no_such_identity"));
}

TEST_CASE("a tolerance floor relaxes every check") {
  auto strict = identity_suite(phase_gaussian(desk(), {}, 1.0, 0.3));
  auto relaxed = identity_suite(phase_gaussian(desk(), {}, 1.0, 0.3), {}, 1e-4);
  CHECK(relaxed.all_pass());
  for (const auto& r : relaxed.residuals) CHECK(r.tolerance >= 1e-4);
  CHECK(strict.at("commutator_1").tolerance < 1e-4);
}

TEST_CASE("phase noise breaks the weak-correlation routes") {
  auto clean = general_gaussian(desk(), {}, 0.5, 0.2, 0.3);
  ComplexField psi = clean.psi();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> noise(-1e-2, 1e-2);
  for (auto& v : psi.values()) v *= std::polar(1.0, noise(rng));
  WaveFunction noisy(psi, clean.physics());
  noisy.normalize();
  auto report = identity_suite(noisy);
  CHECK_FALSE(report.at("weak_correlation_routes").pass);
  CHECK_FALSE(report.all_pass());
  CHECK(identity_suite(clean).at("weak_correlation_routes").pass);
}
