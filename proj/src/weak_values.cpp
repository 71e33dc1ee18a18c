#include "weakcorr/weak_values.hpp"

#include <cmath>
#include <string>

#include "detail.hpp"
#include "weakcorr/errors.hpp"

namespace weakcorr {

namespace {

using detail::map_complex;
using detail::map_real;
using detail::mean;
using detail::safe_ratio;
using detail::sup_over;

ComplexField masked(ComplexField f, const Mask& mask) {
  apply_mask(f, mask);
  return f;
}

RealField masked(RealField f, const Mask& mask) {
  apply_mask(f, mask);
  return f;
}

double rms(const WaveFunction& wf, const ComplexField& d) {
  return wf.physics().hbar *
         std::sqrt(integrate(map_real(wf.grid_ptr(), [&](std::size_t k) { return std::norm(d[k]); })));
}

// Fourth-order Lagrange interpolation of f along one axis at offset
// `shift` (in units of the spacing) from grid point (i, j).
double interpolate_along(const RealField& f, int axis, std::size_t i, std::size_t j, double shift) {
  const Grid& g = f.grid();
  const std::size_t n = axis == 1 ? g.n1() : g.n2();
  const std::size_t at = axis == 1 ? i : j;
  const double pos = static_cast<double>(at) + shift;
  const long base = std::clamp(static_cast<long>(std::floor(pos)) - 2, 0L, static_cast<long>(n) - 5);
  double sum = 0.0;
  for (long a = 0; a < 5; ++a) {
    double w = 1.0;
    for (long b = 0; b < 5; ++b) {
      if (b != a) w *= (pos - static_cast<double>(base + b)) / static_cast<double>(a - b);
    }
    const auto idx = static_cast<std::size_t>(base + a);
    sum += w * (axis == 1 ? f(idx, j) : f(i, idx));
  }
  return sum;
}

}  // namespace

WeakMomentumFields weak_momentum(const WaveFunction& wf, const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  const auto& p = wf.physics();
  const auto& grid = wf.grid_ptr();
  const auto& psi = wf.psi();
  const cplx mih(0.0, -p.hbar);
  auto wp1 = map_complex(grid, [&](std::size_t k) { return mih * c.g1[k]; });
  auto wp2 = map_complex(grid, [&](std::size_t k) { return mih * c.g2[k]; });

  const auto vf = velocity_fields(wf, opts);
  const double diff = sup_over(c.mask, [&](std::size_t k) {
    return std::max(std::abs(wp1[k] - p.m1 * cplx(vf.v1[k], -vf.u1[k])),
                    std::abs(wp2[k] - p.m2 * cplx(vf.v2[k], -vf.u2[k])));
  });
  const double sup = sup_over(c.mask, [&](std::size_t k) {
    return std::max(std::abs(wp1[k]), std::abs(wp2[k]));
  });

  WeakMomentumFields r;
  r.weighted_mean1 = mean(wf.rho(), wp1);
  r.weighted_mean2 = mean(wf.rho(), wp2);
  r.operator_mean1 = p.hbar * integrate(map_real(grid, [&](std::size_t k) {
                       return (std::conj(psi[k]) * c.d1[k]).imag();
                     }));
  r.operator_mean2 = p.hbar * integrate(map_real(grid, [&](std::size_t k) {
                       return (std::conj(psi[k]) * c.d2[k]).imag();
                     }));
  const double s1 = rms(wf, c.d1);
  const double s2 = rms(wf, c.d2);
  r.velocity_check = {"weak_momentum_velocity", safe_ratio(diff, sup), 1e-10};
  r.mean_check = {"weak_momentum_mean",
                  std::max(safe_ratio(std::abs(r.weighted_mean1 - r.operator_mean1), s1),
                           safe_ratio(std::abs(r.weighted_mean2 - r.operator_mean2), s2)),
                  1e-8};
  r.imaginary_mean_check = {"weak_momentum_imaginary_mean",
                            std::max(safe_ratio(std::abs(r.weighted_mean1.imag()), s1),
                                     safe_ratio(std::abs(r.weighted_mean2.imag()), s2)),
                            1e-8};
  r.wp1 = masked(std::move(wp1), c.mask);
  r.wp2 = masked(std::move(wp2), c.mask);
  r.mask = std::move(c.mask);
  return r;
}

WeakMomentumProduct weak_momentum_product(const WaveFunction& wf, const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  const auto& p = wf.physics();
  const auto& psi = wf.psi();
  const double h2 = p.hbar * p.hbar;
  const auto d12 = partial_derivative(c.d1, 2, opts.scheme);
  auto field = map_complex(wf.grid_ptr(), [&](std::size_t k) {
    return psi[k] != cplx(0.0, 0.0) ? -h2 * d12[k] / psi[k] : cplx(0.0, 0.0);
  });
  WeakMomentumProduct r;
  r.weighted_mean = mean(wf.rho(), field);
  r.operator_mean = integrate(map_complex(wf.grid_ptr(), [&](std::size_t k) {
    return -h2 * std::conj(psi[k]) * d12[k];
  }));
  r.check = {"weak_product_mean",
             safe_ratio(std::abs(r.weighted_mean - r.operator_mean), rms(wf, c.d1) * rms(wf, c.d2)),
             1e-8};
  r.field = masked(std::move(field), c.mask);
  r.mask = std::move(c.mask);
  return r;
}

WeakCorrelationField conjugate_pair_weak_correlation(const WaveFunction& wf, ConjugateSign sign,
                                                     const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  const auto& grid = wf.grid_ptr();
  const auto& psi = wf.psi();
  const double h = wf.physics().hbar;
  const double s = static_cast<double>(static_cast<int>(sign));
  const cplx local(0.0, -s * h);  // -s i hbar

  const auto d12 = partial_derivative(c.d1, 2, opts.scheme);
  WeakCorrelationField r;
  r.weak_a = map_complex(grid, [&](std::size_t k) { return local * c.g1[k]; });
  r.weak_b = map_complex(grid, [&](std::size_t k) { return local * c.g2[k]; });
  const auto joint = map_complex(grid, [&](std::size_t k) {
    return psi[k] != cplx(0.0, 0.0) ? local * local * d12[k] / psi[k] : cplx(0.0, 0.0);
  });
  auto cw = map_complex(grid, [&](std::size_t k) { return joint[k] - r.weak_a[k] * r.weak_b[k]; });

  auto derivative_form = [&](const ComplexField& w, int axis) {
    const auto d_re = partial_derivative(real_part(w), axis);
    const auto d_im = partial_derivative(imag_part(w), axis);
    return map_complex(grid, [&](std::size_t k) {
      return s * h * d_im[k] - cplx(0.0, s * h) * d_re[k];
    });
  };
  auto closed = derivative_form(r.weak_b, 1);
  auto partner = derivative_form(r.weak_a, 2);

  const auto& mask = c.mask;
  r.scale = sup_over(mask, [&](std::size_t k) {
    return std::max(std::abs(joint[k]), std::abs(r.weak_a[k] * r.weak_b[k]));
  });
  r.route_check = {"weak_correlation_routes",
                   safe_ratio(sup_over(mask, [&](std::size_t k) { return std::abs(cw[k] - closed[k]); }),
                              r.scale),
                   1e-5};
  r.exchange_check = {
      "weak_correlation_exchange",
      safe_ratio(sup_over(mask, [&](std::size_t k) { return std::abs(closed[k] - partner[k]); }),
                 r.scale),
      1e-5};
  r.weighted_mean = mean(wf.rho(), cw);
  r.sup_re = sup_over(mask, [&](std::size_t k) { return cw[k].real(); });
  r.sup_im = sup_over(mask, [&](std::size_t k) { return cw[k].imag(); });
  r.cw = masked(std::move(cw), mask);
  r.closed_form = masked(std::move(closed), mask);
  r.partner = masked(std::move(partner), mask);
  r.mask = std::move(c.mask);
  return r;
}

WeakCorrelationField weak_correlation(const WaveFunction& wf, const AnalysisOptions& opts) {
  return conjugate_pair_weak_correlation(wf, ConjugateSign::plus, opts);
}

CorrelationDecomposition correlation_decomposition(const WaveFunction& wf,
                                                   const AnalysisOptions& opts) {
  const auto cwf = weak_correlation(wf, opts);
  const auto& rho = wf.rho();
  const auto& grid = wf.grid_ptr();
  const auto& w1 = cwf.weak_a;
  const auto& w2 = cwf.weak_b;
  auto cov = [&](auto part1, auto part2) {
    const double m1 = integrate(map_real(grid, [&](std::size_t k) { return rho[k] * part1(w1[k]); }));
    const double m2 = integrate(map_real(grid, [&](std::size_t k) { return rho[k] * part2(w2[k]); }));
    const double m12 = integrate(
        map_real(grid, [&](std::size_t k) { return rho[k] * part1(w1[k]) * part2(w2[k]); }));
    return m12 - m1 * m2;
  };
  auto re = [](cplx z) { return z.real(); };
  auto im = [](cplx z) { return z.imag(); };
  const auto mc = momentum_correlation(wf, opts);
  CorrelationDecomposition r;
  r.term_re_re = cov(re, re);
  r.term_im_im = cov(im, im);
  r.term_re_cw = cwf.weighted_mean.real();
  r.direct = mc.direct;
  const double scale = momentum_scale(wf, 1, opts) * momentum_scale(wf, 2, opts);
  r.check = {"correlation_decomposition",
             safe_ratio(std::abs(r.term_re_re - r.term_im_im + r.term_re_cw - r.direct), scale),
             1e-6};
  return r;
}

WeakKineticEnergy weak_kinetic_energy(const WaveFunction& wf, const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  const auto& p = wf.physics();
  const auto& grid = wf.grid_ptr();
  const auto& psi = wf.psi();
  const double h = p.hbar;
  const auto d11 = partial_derivative(c.d1, 1, opts.scheme);
  const auto d22 = partial_derivative(c.d2, 2, opts.scheme);
  const auto tw = map_complex(grid, [&](std::size_t k) {
    if (psi[k] == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
    return (-h * h / (2.0 * p.m1) * d11[k] - h * h / (2.0 * p.m2) * d22[k]) / psi[k];
  });
  const auto u1 = map_real(grid, [&](std::size_t k) { return h / p.m1 * c.g1[k].real(); });
  const auto u2 = map_real(grid, [&](std::size_t k) { return h / p.m2 * c.g2[k].real(); });
  const auto v1 = map_real(grid, [&](std::size_t k) { return h / p.m1 * c.g1[k].imag(); });
  const auto v2 = map_real(grid, [&](std::size_t k) { return h / p.m2 * c.g2[k].imag(); });
  const auto du1 = partial_derivative(u1, 1);
  const auto du2 = partial_derivative(u2, 2);
  auto velocity = map_real(grid, [&](std::size_t k) {
    return 0.5 * p.m1 * (v1[k] * v1[k] - u1[k] * u1[k]) - 0.5 * h * du1[k] +
           0.5 * p.m2 * (v2[k] * v2[k] - u2[k] * u2[k]) - 0.5 * h * du2[k];
  });
  const auto& mask = c.mask;
  const double scale = sup_over(mask, [&](std::size_t k) {
    return 0.5 * (p.m1 * (u1[k] * u1[k] + v1[k] * v1[k]) + h * std::abs(du1[k]) +
                  p.m2 * (u2[k] * u2[k] + v2[k] * v2[k]) + h * std::abs(du2[k]));
  });
  WeakKineticEnergy r;
  r.check = {"weak_kinetic_energy",
             safe_ratio(sup_over(mask, [&](std::size_t k) { return tw[k].real() - velocity[k]; }), scale),
             1e-5};
  r.real_part = masked(real_part(tw), mask);
  r.imag_part = masked(imag_part(tw), mask);
  r.velocity_form = masked(std::move(velocity), mask);
  return r;
}

WeakProbe weak_probe(const WaveFunction& wf, int axis, double alpha, const AnalysisOptions& opts,
                     double window_rel) {
  const Grid& g = wf.grid();
  const double h = wf.physics().hbar;
  const double shift = alpha * h;
  if (!(alpha != 0.0) || !(std::abs(shift) < g.h(axis))) {
    throw UsageError("weak probe needs 0 < |alpha| hbar < grid spacing");
  }
  if (!(window_rel > 0.0) || window_rel >= 1.0) throw UsageError("probe window must lie in (0, 1)");
  const auto wm = weak_momentum(wf, opts);
  const auto& rho = wf.rho();
  double peak = 0.0;
  for (double r : rho.values()) peak = std::max(peak, r);

  WeakProbe r{RealField(wf.grid_ptr()), RealField(wf.grid_ptr()), 0, 0.0};
  const auto& wp = axis == 1 ? wm.wp1 : wm.wp2;
  const double lo = axis == 1 ? g.spec().x1_min : g.spec().x2_min;
  const double hi = axis == 1 ? g.spec().x1_max : g.spec().x2_max;
  for (std::size_t i = 0; i < g.n1(); ++i) {
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const std::size_t k = g.index(i, j);
      if (rho[k] < window_rel * peak || !wm.mask[k]) continue;
      const double x1 = g.x1(i) - (axis == 1 ? shift : 0.0);
      const double x2 = g.x2(j) - (axis == 2 ? shift : 0.0);
      const double moved = axis == 1 ? x1 : x2;
      if (moved < lo || moved > hi) {
        throw ConfigurationError("weak probe shift leaves the domain");
      }
      const double shifted = wf.has_analytic()
                                 ? std::norm(wf.analytic(x1, x2))
                                 : interpolate_along(rho, axis, i, j, -shift / g.h(axis));
      r.ratio[k] = shifted / rho[k];
      r.prediction[k] = 1.0 + 2.0 * alpha * wp[k].imag();
      r.residual_sup = std::max(r.residual_sup, std::abs(r.ratio[k] - r.prediction[k]));
      ++r.window_points;
    }
  }
  if (r.window_points == 0) throw DegenerateStateError("weak probe window is empty");
  return r;
}

}  // namespace weakcorr
