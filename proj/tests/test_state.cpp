#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "weakcorr/errors.hpp"
#include "weakcorr/state.hpp"

using namespace weakcorr;
namespace fs = std::filesystem;

namespace {

GridPtr desk() { return make_grid({128, 128, -8, 8, -8, 8}); }

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("weakcorr_state_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double marginal_variance(const WaveFunction& wf, int axis) {
  const Grid& g = wf.grid();
  RealField f(wf.grid_ptr());
  for (std::size_t i = 0; i < g.n1(); ++i)
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const double x = axis == 1 ? g.x1(i) : g.x2(j);
      f(i, j) = x * x * wf.rho()(i, j);
    }
  return integrate(f);
}

}  // namespace

// ---------------------------------------------------------------- factories

TEST_CASE("factories return normalized states") {
  PhysicsParams p;
  auto g = desk();
  for (const auto& wf : {product_gaussian(g, p, 1.0, 1.1), correlated_gaussian(g, p, 0.5, 0.2),
                         phase_gaussian(g, p, 1.0, 0.3), general_gaussian(g, p, 0.5, 0.2, 0.3),
                         cat_state(g, p, 2.0, 0.5)}) {
    CHECK(integrate(wf.rho()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wf.boundary_decay_ok());
    CHECK(wf.has_analytic());
    CHECK(wf.warnings().empty());
  }
}

TEST_CASE("product Gaussian has the requested widths") {
  auto wf = product_gaussian(desk(), {}, 1.0, 1.1);
  CHECK(marginal_variance(wf, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(marginal_variance(wf, 2) == doctest::Approx(1.21).epsilon(1e-9));
}

TEST_CASE("analytic amplitude matches the samples") {
  auto wf = general_gaussian(desk(), {}, 0.5, 0.2, 0.3);
  const Grid& g = wf.grid();
  for (std::size_t i = 30; i < 100; i += 13)
    for (std::size_t j = 20; j < 110; j += 17)
      CHECK(std::abs(wf.analytic(g.x1(i), g.x2(j)) - wf.psi()(i, j)) < 1e-15);
}

TEST_CASE("invalid parameters are configuration errors") {
  auto g = desk();
  CHECK_THROWS_AS(correlated_gaussian(g, {}, 0.5, 0.5), ConfigurationError);
  CHECK_THROWS_AS(correlated_gaussian(g, {}, -0.5, 0.0), ConfigurationError);
  CHECK_THROWS_AS(product_gaussian(g, {}, 0.0, 1.0), ConfigurationError);
  CHECK_THROWS_AS(cat_state(g, {}, 0.0, 0.5), ConfigurationError);
  CHECK_THROWS_AS(phase_gaussian(g, {0.0, 1.0, 1.0}, 1.0, 0.3), ConfigurationError);
}

TEST_CASE("a state that does not decay on the grid is refused") {
  auto small = make_grid({64, 64, -3, 3, -3, 3});
  CHECK_THROWS_AS(product_gaussian(small, {}, 1.0, 1.0), ConfigurationError);
}

TEST_CASE("make_state dispatches on kind") {
  StateSpec spec;
  spec.kind = parse_state_kind("phase_gaussian");
  spec.sigma = 1.0;
  spec.lambda = 0.3;
  auto a = make_state(spec, desk(), {});
  auto b = phase_gaussian(desk(), {}, 1.0, 0.3);
  CHECK(a.psi()(40, 70) == b.psi()(40, 70));
  CHECK(std::string(to_string(StateKind::cat)) == "cat");
  CHECK_THROWS_AS(parse_state_kind("bell"), ConfigurationError);
}

TEST_CASE("phase factors leave the density unchanged") {
  auto wf = correlated_gaussian(desk(), {}, 0.5, 0.2);
  auto boosted = with_plane_phase(wf, 0.7, -0.2);
  auto turned = with_global_phase(wf, 1.1);
  for (std::size_t k = 0; k < wf.rho().size(); k += 97) {
    CHECK(boosted.rho()[k] == doctest::Approx(wf.rho()[k]).epsilon(1e-13));
    CHECK(turned.rho()[k] == doctest::Approx(wf.rho()[k]).epsilon(1e-13));
  }
  const Grid& g = wf.grid();
  CHECK(std::abs(boosted.analytic(g.x1(50), g.x2(60)) - boosted.psi()(50, 60)) < 1e-15);
}

// ---------------------------------------------------------------- files

TEST_CASE("save and load round-trip bit for bit") {
  auto dir = scratch_dir("roundtrip");
  PhysicsParams p{1.0, 2.0, 0.5};
  auto wf = general_gaussian(make_grid({40, 36, -9, 9, -8, 8}), p, 0.5, 0.2, 0.3);
  const auto header = (dir / "state.json").string();
  save_wavefunction(wf, header);
  CHECK(fs::exists(dir / "state.csv"));
  auto back = load_wavefunction(header);
  CHECK(back.grid().n1() == 40);
  CHECK(back.grid().n2() == 36);
  CHECK(back.grid().spec().x1_min == -9.0);
  CHECK(back.physics().m1 == 2.0);
  CHECK(back.physics().m2 == 0.5);
  CHECK_FALSE(back.has_analytic());
  bool identical = true;
  for (std::size_t k = 0; k < wf.psi().size(); ++k) identical = identical && back.psi()[k] == wf.psi()[k];
  CHECK(identical);
  CHECK(back.warnings().empty());
}

TEST_CASE("loading rescales a state with the wrong norm and warns") {
  auto dir = scratch_dir("norm");
  auto wf = product_gaussian(desk(), {}, 1.0, 1.0);
  ComplexField doubled = wf.psi();
  for (auto& v : doubled.values()) v *= std::sqrt(2.0);
  WaveFunction raw(doubled, wf.physics());
  save_wavefunction(raw, (dir / "s.json").string());
  auto back = load_wavefunction((dir / "s.json").string());
  CHECK(back.initial_norm() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(integrate(back.rho()) == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(back.warnings().size() == 1);
  CHECK(back.warnings()[0].find("rescaled") != std::string::npos);
}

TEST_CASE("a non-finite sample is reported with its index") {
  auto dir = scratch_dir("nan");
  auto wf = product_gaussian(make_grid({20, 20, -8, 8, -8, 8}), {}, 1.0, 1.0);
  save_wavefunction(wf, (dir / "s.json").string());
  std::ifstream in(dir / "s.csv");
  std::string text, line;
  while (std::getline(in, line)) {
    if (line.rfind("3,7,", 0) == 0) line = "3,7,nan,0";
    text += line + "\n";
  }
  in.close();
  std::ofstream(dir / "s.csv") << text;
  try {
    load_wavefunction((dir / "s.json").string());
    FAIL("expected an input error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("(3,7)") != std::string::npos);
  }
}

TEST_CASE("missing and malformed files are input errors") {
  auto dir = scratch_dir("missing");
  try {
    load_wavefunction((dir / "absent.json").string());
    FAIL("expected an input error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("absent.json") != std::string::npos);
  }
  std::ofstream(dir / "bad.json") << "{\"n1\": 20}";
  CHECK_THROWS_AS(load_wavefunction((dir / "bad.json").string()), InputError);
}

TEST_CASE("a truncated body is an input error") {
  auto dir = scratch_dir("short");
  auto wf = product_gaussian(make_grid({20, 20, -8, 8, -8, 8}), {}, 1.0, 1.0);
  save_wavefunction(wf, (dir / "s.json").string());
  std::ifstream in(dir / "s.csv");
  std::string text, line;
  int kept = 0;
  while (std::getline(in, line) && kept++ < 100) text += line + "\n";
  in.close();
  std::ofstream(dir / "s.csv") << text;
  CHECK_THROWS_AS(load_wavefunction((dir / "s.json").string()), InputError);
}

TEST_CASE("a loaded state that does not decay is accepted with a warning") {
  auto dir = scratch_dir("edge");
  auto g = make_grid({32, 32, -3, 3, -3, 3});
  ComplexField psi(g);
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j) psi(i, j) = std::exp(-(g->x1(i) * g->x1(i) + g->x2(j) * g->x2(j)) / 4);
  WaveFunction wf(psi, {});
  wf.normalize();
  save_wavefunction(wf, (dir / "s.json").string());
  auto back = load_wavefunction((dir / "s.json").string());
  CHECK_FALSE(back.boundary_decay_ok());
  REQUIRE(back.warnings().size() == 1);
  CHECK(back.warnings()[0].find("edge") != std::string::npos);
}
