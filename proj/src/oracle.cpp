#include "weakcorr/oracle.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "weakcorr/errors.hpp"
#include "weakcorr/parallel.hpp"

namespace weakcorr::oracle {

namespace {

// Unnormalized amplitudes, written out independently of the state factories.
Amplitude amplitude_for(const StateSpec& spec) {
  switch (spec.kind) {
    case StateKind::product_gaussian: {
      const double s1 = spec.sigma1;
      const double s2 = spec.sigma2;
      return [s1, s2](double x1, double x2) {
        return cplx(std::exp(-(x1 * x1) / (4 * s1 * s1) - (x2 * x2) / (4 * s2 * s2)), 0.0);
      };
    }
    case StateKind::correlated_gaussian:
    case StateKind::phase_gaussian:
    case StateKind::general_gaussian: {
      double a = spec.a;
      double b = spec.b;
      double lam = spec.lambda;
      if (spec.kind == StateKind::correlated_gaussian) lam = 0.0;
      if (spec.kind == StateKind::phase_gaussian) {
        a = 1.0 / (2 * spec.sigma * spec.sigma);
        b = 0.0;
      }
      return [a, b, lam](double x1, double x2) {
        const double q = a * x1 * x1 + a * x2 * x2 + 2 * b * x1 * x2;
        return std::exp(cplx(-q / 2, lam * x1 * x2));
      };
    }
    case StateKind::cat: {
      const double c = spec.c;
      const double s = spec.sigma;
      return [c, s](double x1, double x2) {
        const double e1 = ((x1 - c) * (x1 - c) + (x2 - c) * (x2 - c)) / (4 * s * s);
        const double e2 = ((x1 + c) * (x1 + c) + (x2 + c) * (x2 + c)) / (4 * s * s);
        return cplx(std::exp(-e1) + std::exp(-e2), 0.0);
      };
    }
    case StateKind::file:
      break;
  }
  throw ConfigurationError("oracle needs a state with a closed-form amplitude");
}

struct Sums {
  double weighted = 0.0;  // integral of rho f
  double norm = 0.0;      // integral of rho
};

double evaluate(const Amplitude& psi, const PhysicsParams& ph, Integrand what, double x1, double x2,
                double d, cplx psi0) {
  const double h = ph.hbar;
  auto g = [&](int axis, double y1, double y2, cplx centre) {
    const cplx plus = axis == 1 ? psi(y1 + d, y2) : psi(y1, y2 + d);
    const cplx minus = axis == 1 ? psi(y1 - d, y2) : psi(y1, y2 - d);
    return (plus - minus) / (2 * d * centre);
  };
  auto u = [&](int axis, double y1, double y2, cplx centre) {
    return h / ph.mass(axis) * g(axis, y1, y2, centre).real();
  };
  auto v = [&](int axis, double y1, double y2, cplx centre) {
    return h / ph.mass(axis) * g(axis, y1, y2, centre).imag();
  };
  switch (what) {
    case Integrand::u1: return u(1, x1, x2, psi0);
    case Integrand::u2: return u(2, x1, x2, psi0);
    case Integrand::v1: return v(1, x1, x2, psi0);
    case Integrand::v2: return v(2, x1, x2, psi0);
    case Integrand::u1_sq: return std::pow(u(1, x1, x2, psi0), 2);
    case Integrand::u2_sq: return std::pow(u(2, x1, x2, psi0), 2);
    case Integrand::v1_sq: return std::pow(v(1, x1, x2, psi0), 2);
    case Integrand::v2_sq: return std::pow(v(2, x1, x2, psi0), 2);
    case Integrand::u1u2: return u(1, x1, x2, psi0) * u(2, x1, x2, psi0);
    case Integrand::u1v2: return u(1, x1, x2, psi0) * v(2, x1, x2, psi0);
    case Integrand::u2v1: return u(2, x1, x2, psi0) * v(1, x1, x2, psi0);
    case Integrand::v1v2: return v(1, x1, x2, psi0) * v(2, x1, x2, psi0);
    case Integrand::d1u2:
    case Integrand::d1v2: {
      auto f = [&](double y1) {
        const cplx centre = psi(y1, x2);
        return what == Integrand::d1u2 ? u(2, y1, x2, centre) : v(2, y1, x2, centre);
      };
      return (f(x1 + d) - f(x1 - d)) / (2 * d);
    }
    case Integrand::x1u1: return x1 * u(1, x1, x2, psi0);
    case Integrand::x2u2: return x2 * u(2, x1, x2, psi0);
    case Integrand::re_cw:
    case Integrand::im_cw: {
      const cplx mixed = (psi(x1 + d, x2 + d) - psi(x1 + d, x2 - d) - psi(x1 - d, x2 + d) +
                          psi(x1 - d, x2 - d)) /
                         (4 * d * d);
      const cplx cw = -h * h * (mixed / psi0 - g(1, x1, x2, psi0) * g(2, x1, x2, psi0));
      return what == Integrand::re_cw ? cw.real() : cw.imag();
    }
    case Integrand::vq1:
    case Integrand::vq2: {
      const int axis = what == Integrand::vq1 ? 1 : 2;
      const double a0 = std::abs(psi0);
      const double ap = std::abs(axis == 1 ? psi(x1 + d, x2) : psi(x1, x2 + d));
      const double am = std::abs(axis == 1 ? psi(x1 - d, x2) : psi(x1, x2 - d));
      return -h * h / (2 * ph.mass(axis)) * (ap - 2 * a0 + am) / (d * d * a0);
    }
  }
  return 0.0;
}

double refined_mean(const Amplitude& psi, const GridSpec& grid, const PhysicsParams& ph,
                    Integrand what, int factor) {
  const std::size_t n1 = (grid.n1 - 1) * static_cast<std::size_t>(factor) + 1;
  const std::size_t n2 = (grid.n2 - 1) * static_cast<std::size_t>(factor) + 1;
  const double h1 = (grid.x1_max - grid.x1_min) / static_cast<double>(n1 - 1);
  const double h2 = (grid.x2_max - grid.x2_min) / static_cast<double>(n2 - 1);
  // One shared difference step keeps the mixed stencil centred.
  const double d = std::min(h1, h2);
  std::vector<Sums> rows(n1);
  parallel_for(n1, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double x1 = grid.x1_min + static_cast<double>(i) * h1;
      const double wi = (i == 0 || i + 1 == n1) ? 0.5 : 1.0;
      Sums s;
      for (std::size_t j = 0; j < n2; ++j) {
        const double x2 = grid.x2_min + static_cast<double>(j) * h2;
        const double w = wi * ((j == 0 || j + 1 == n2) ? 0.5 : 1.0);
        const cplx p0 = psi(x1, x2);
        const double r = std::norm(p0);
        if (r == 0.0) continue;
        s.norm += w * r;
        s.weighted += w * r * evaluate(psi, ph, what, x1, x2, d, p0);
      }
      rows[i] = s;
    }
  });
  Sums total;
  for (const auto& s : rows) {
    total.norm += s.norm;
    total.weighted += s.weighted;
  }
  return total.weighted / total.norm;
}

}  // namespace

GaussianTruth gaussian_truth(const StateSpec& spec, const PhysicsParams& ph) {
  GaussianTruth t{};
  switch (spec.kind) {
    case StateKind::product_gaussian:
      t.a1 = 1.0 / (2 * spec.sigma1 * spec.sigma1);
      t.a2 = 1.0 / (2 * spec.sigma2 * spec.sigma2);
      break;
    case StateKind::correlated_gaussian:
      t.a1 = t.a2 = spec.a;
      t.b = spec.b;
      break;
    case StateKind::phase_gaussian:
      t.a1 = t.a2 = 1.0 / (2 * spec.sigma * spec.sigma);
      t.lambda = spec.lambda;
      break;
    case StateKind::general_gaussian:
      t.a1 = t.a2 = spec.a;
      t.b = spec.b;
      t.lambda = spec.lambda;
      break;
    default:
      throw ConfigurationError("closed forms exist only for the Gaussian families");
  }
  const double det = t.a1 * t.a2 - t.b * t.b;
  if (!(t.a1 > 0) || !(det > 0)) throw ConfigurationError("Gaussian is not normalizable");
  const double h = ph.hbar;
  const double m1 = ph.m1;
  const double m2 = ph.m2;
  const double lam = t.lambda;
  // Position covariance: [[a2, -b], [-b, a1]] / (2 det).
  const double s11 = t.a2 / (2 * det);
  const double s22 = t.a1 / (2 * det);
  const double s12 = -t.b / (2 * det);
  t.mean_u1u2 = h * h * t.b / (2 * m1 * m2);
  t.mean_u1v2 = -h * h * lam / (2 * m1 * m2);
  t.mean_u2v1 = t.mean_u1v2;
  t.mean_v1v2 = h * h * lam * lam * s12 / (m1 * m2);
  t.mean_u1_sq = h * h * t.a1 / (2 * m1 * m1);
  t.mean_u2_sq = h * h * t.a2 / (2 * m2 * m2);
  t.mean_v1_sq = std::pow(h * lam / m1, 2) * s22;
  t.mean_v2_sq = std::pow(h * lam / m2, 2) * s11;
  t.mean_d1u2 = -h * t.b / m2;
  t.mean_d1v2 = h * lam / m2;
  t.mean_x1u1 = -h / (2 * m1);
  t.mean_x2u2 = -h / (2 * m2);
  t.re_cw = h * h * t.b;
  t.im_cw = -h * h * lam;
  t.sigma2_p1 = m1 * m1 * (t.mean_v1_sq + t.mean_u1_sq);
  t.sigma2_p2 = m2 * m2 * (t.mean_v2_sq + t.mean_u2_sq);
  t.c_p1p2 = m1 * m2 * (t.mean_v1v2 + t.mean_u1u2);
  t.vq_origin = h * h * t.a1 / (2 * m1) + h * h * t.a2 / (2 * m2);
  return t;
}

Integrand parse_integrand(const std::string& name) {
  static const std::pair<const char*, Integrand> names[] = {
      {"u1", Integrand::u1},       {"u2", Integrand::u2},       {"v1", Integrand::v1},
      {"v2", Integrand::v2},       {"u1_sq", Integrand::u1_sq}, {"u2_sq", Integrand::u2_sq},
      {"v1_sq", Integrand::v1_sq}, {"v2_sq", Integrand::v2_sq}, {"u1u2", Integrand::u1u2},
      {"u1v2", Integrand::u1v2},   {"u2v1", Integrand::u2v1},   {"v1v2", Integrand::v1v2},
      {"d1u2", Integrand::d1u2},   {"d1v2", Integrand::d1v2},   {"x1u1", Integrand::x1u1},
      {"x2u2", Integrand::x2u2},   {"re_cw", Integrand::re_cw}, {"im_cw", Integrand::im_cw},
      {"vq1", Integrand::vq1},     {"vq2", Integrand::vq2}};
  for (const auto& [n, v] : names) {
    if (name == n) return v;
  }
  throw UsageError("unknown oracle integrand '" + name + "'");
}

BruteForceResult brute_force_expectation(const StateSpec& spec, const GridSpec& grid,
                                         const PhysicsParams& physics, Integrand integrand,
                                         int refine) {
  if (refine < 1 || refine > 3) throw UsageError("oracle refine must be 1, 2 or 3");
  Grid checked(grid);
  validate(physics);
  const auto psi = amplitude_for(spec);
  const double coarse = refined_mean(psi, grid, physics, integrand, refine);
  const double fine = refined_mean(psi, grid, physics, integrand, 2 * refine);
  return {(4.0 * fine - coarse) / 3.0, fine, std::abs(fine - coarse) / 3.0};
}

double momentum_space_dispersion(const StateSpec& spec, const GridSpec& grid,
                                 const PhysicsParams& physics, int axis, int pad) {
  if (axis != 1 && axis != 2) throw UsageError("axis must be 1 or 2");
  if (pad < 1) throw UsageError("padding factor must be positive");
  const Grid g(grid);
  validate(physics);
  const auto psi = amplitude_for(spec);
  const std::size_t n = axis == 1 ? g.n1() : g.n2();
  const std::size_t lines = axis == 1 ? g.n2() : g.n1();
  const std::size_t len = n * static_cast<std::size_t>(pad);
  const double h = g.h(axis);

  auto* buf = fftw_alloc_complex(len);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(len), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  std::vector<double> density(len, 0.0);
  for (std::size_t line = 0; line < lines; ++line) {
    for (std::size_t k = 0; k < len; ++k) buf[k][0] = buf[k][1] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx v = axis == 1 ? psi(g.x1(k), g.x2(line)) : psi(g.x1(line), g.x2(k));
      const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
      buf[k][0] = w * v.real();
      buf[k][1] = w * v.imag();
    }
    fftw_execute(plan);
    for (std::size_t k = 0; k < len; ++k) density[k] += buf[k][0] * buf[k][0] + buf[k][1] * buf[k][1];
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);

  double total = 0.0;
  double first = 0.0;
  double second = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double kk = k < len / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(len);
    const double p = 2.0 * std::numbers::pi * physics.hbar * kk / (static_cast<double>(len) * h);
    total += density[k];
    first += p * density[k];
    second += p * p * density[k];
  }
  const double mean = first / total;
  return second / total - mean * mean;
}

}  // namespace weakcorr::oracle
