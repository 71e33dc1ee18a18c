#include "weakcorr/kinematics.hpp"

#include <cmath>

#include "detail.hpp"
#include "weakcorr/errors.hpp"

namespace weakcorr {

namespace detail {

void check_scheme(const WaveFunction& wf, Scheme scheme) {
  // |psi| at the edge below 1e-12 of its peak keeps the periodic wrap harmless.
  if (scheme == Scheme::spectral && wf.edge_density_ratio() > 1e-24) {
    throw ConfigurationError("spectral derivatives need |psi| at the edges below 1e-12 of its peak");
  }
}

Calculus calculus(const WaveFunction& wf, const AnalysisOptions& opts) {
  check_scheme(wf, opts.scheme);
  Calculus c;
  c.d1 = partial_derivative(wf.psi(), 1, opts.scheme);
  c.d2 = partial_derivative(wf.psi(), 2, opts.scheme);
  c.g1 = quotient(c.d1, wf.psi());
  c.g2 = quotient(c.d2, wf.psi());
  c.mask = build_mask(wf.rho(), opts.eps_rel);
  return c;
}

ComplexField quotient(const ComplexField& num, const ComplexField& psi) {
  ComplexField out(psi.grid_ptr());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (psi[k] != cplx(0.0, 0.0)) out[k] = num[k] / psi[k];
  }
  return out;
}

double mean(const RealField& rho, const RealField& f) {
  return integrate(map_real(rho.grid_ptr(), [&](std::size_t k) { return rho[k] * f[k]; }));
}

cplx mean(const RealField& rho, const ComplexField& f) {
  return integrate(map_complex(rho.grid_ptr(), [&](std::size_t k) { return rho[k] * f[k]; }));
}

}  // namespace detail

namespace {

using detail::map_complex;
using detail::map_real;
using detail::mean;
using detail::safe_ratio;
using detail::sup_over;

// Unmasked kinematic fields on the full grid.
struct RawFields {
  RealField u1, u2, v1, v2;
};

RawFields raw_fields(const WaveFunction& wf, const detail::Calculus& c) {
  const auto& p = wf.physics();
  const auto& g = wf.grid_ptr();
  return {map_real(g, [&](std::size_t k) { return p.hbar / p.m1 * c.g1[k].real(); }),
          map_real(g, [&](std::size_t k) { return p.hbar / p.m2 * c.g2[k].real(); }),
          map_real(g, [&](std::size_t k) { return p.hbar / p.m1 * c.g1[k].imag(); }),
          map_real(g, [&](std::size_t k) { return p.hbar / p.m2 * c.g2[k].imag(); })};
}

double rms_momentum(const WaveFunction& wf, const ComplexField& d) {
  const double h = wf.physics().hbar;
  return h * std::sqrt(integrate(map_real(wf.grid_ptr(), [&](std::size_t k) { return std::norm(d[k]); })));
}

RealField masked(RealField f, const Mask& mask) {
  apply_mask(f, mask);
  return f;
}

}  // namespace

void require(const RouteCheck& check) {
  if (!check.ok()) {
    throw NumericalConsistencyError(check.name + ": residual " + std::to_string(check.residual) +
                                    " exceeds " + std::to_string(check.tolerance));
  }
}

VelocityFields velocity_fields(const WaveFunction& wf, const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  auto raw = raw_fields(wf, c);
  const auto& p = wf.physics();
  const auto& psi = wf.psi();
  VelocityFields vf{masked(raw.u1, c.mask),
                    masked(raw.u2, c.mask),
                    masked(raw.v1, c.mask),
                    masked(raw.v2, c.mask),
                    map_real(wf.grid_ptr(),
                             [&](std::size_t k) {
                               return p.hbar / p.m1 * (std::conj(psi[k]) * c.d1[k]).imag();
                             }),
                    map_real(wf.grid_ptr(),
                             [&](std::size_t k) {
                               return p.hbar / p.m2 * (std::conj(psi[k]) * c.d2[k]).imag();
                             }),
                    std::move(c.g1),
                    std::move(c.g2),
                    std::move(c.mask)};
  return vf;
}

double momentum_scale(const WaveFunction& wf, int axis, const AnalysisOptions& opts) {
  detail::check_scheme(wf, opts.scheme);
  return rms_momentum(wf, partial_derivative(wf.psi(), axis, opts.scheme));
}

MomentumExpectation momentum_expectation(const WaveFunction& wf, int axis,
                                         const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  auto raw = raw_fields(wf, c);
  const auto& p = wf.physics();
  const auto& d = axis == 1 ? c.d1 : c.d2;
  const auto& psi = wf.psi();
  const cplx op = integrate(map_complex(wf.grid_ptr(), [&](std::size_t k) {
    return std::conj(psi[k]) * cplx(0.0, -p.hbar) * d[k];
  }));
  const double kin = p.mass(axis) * mean(wf.rho(), axis == 1 ? raw.v1 : raw.v2);
  const double scale = rms_momentum(wf, d);
  return {op, kin,
          {"momentum_expectation_" + std::to_string(axis), safe_ratio(std::abs(op - kin), scale),
           1e-8}};
}

MomentumCorrelation momentum_correlation(const WaveFunction& wf, const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  auto raw = raw_fields(wf, c);
  const auto& p = wf.physics();
  const auto& psi = wf.psi();
  const auto& rho = wf.rho();
  const auto d12 = partial_derivative(c.d1, 2, opts.scheme);
  const double h2 = p.hbar * p.hbar;
  const cplx p1p2 = integrate(
      map_complex(wf.grid_ptr(), [&](std::size_t k) { return -h2 * std::conj(psi[k]) * d12[k]; }));
  const double mp1 = p.hbar * integrate(map_real(wf.grid_ptr(), [&](std::size_t k) {
                       return (std::conj(psi[k]) * c.d1[k]).imag();
                     }));
  const double mp2 = p.hbar * integrate(map_real(wf.grid_ptr(), [&](std::size_t k) {
                       return (std::conj(psi[k]) * c.d2[k]).imag();
                     }));
  const double direct = p1p2.real() - mp1 * mp2;

  const double mm = p.m1 * p.m2;
  const double v1v2 = integrate(map_real(wf.grid_ptr(), [&](std::size_t k) {
    return rho[k] * raw.v1[k] * raw.v2[k];
  }));
  const double velocity = mm * (v1v2 - mean(rho, raw.v1) * mean(rho, raw.v2));
  const double osmotic = mm * integrate(map_real(wf.grid_ptr(), [&](std::size_t k) {
                           return rho[k] * raw.u1[k] * raw.u2[k];
                         }));
  const double scale = rms_momentum(wf, c.d1) * rms_momentum(wf, c.d2);
  const double decomposed = velocity + osmotic;
  return {direct, decomposed, velocity, osmotic,
          {"momentum_correlation", safe_ratio(std::abs(direct - decomposed), scale), 1e-6}};
}

MomentumDispersion momentum_dispersion(const WaveFunction& wf, int axis,
                                       const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  auto raw = raw_fields(wf, c);
  const auto& p = wf.physics();
  const auto& psi = wf.psi();
  const auto& rho = wf.rho();
  const auto& d = axis == 1 ? c.d1 : c.d2;
  const auto& u = axis == 1 ? raw.u1 : raw.u2;
  const auto& v = axis == 1 ? raw.v1 : raw.v2;
  const double m = p.mass(axis);
  const double h = p.hbar;

  const auto dd = partial_derivative(d, axis, opts.scheme);
  const double p2 = integrate(map_real(wf.grid_ptr(), [&](std::size_t k) {
    return (-h * h * std::conj(psi[k]) * dd[k]).real();
  }));
  const double mp = h * integrate(map_real(wf.grid_ptr(), [&](std::size_t k) {
                      return (std::conj(psi[k]) * d[k]).imag();
                    }));
  const double sigma2_p = p2 - mp * mp;

  const double mv = mean(rho, v);
  const double v2 = integrate(map_real(wf.grid_ptr(), [&](std::size_t k) { return rho[k] * v[k] * v[k]; }));
  const double m2_sigma2_v = m * m * (v2 - mv * mv);
  const double m2_u2 =
      m * m * integrate(map_real(wf.grid_ptr(), [&](std::size_t k) { return rho[k] * u[k] * u[k]; }));
  if (!(m2_u2 > 0.0)) {
    throw InvariantViolation("osmotic dispersion m^2<u^2> is not positive on axis " +
                             std::to_string(axis));
  }
  const auto du = partial_derivative(u, axis);
  const double mean_vq = integrate(map_real(wf.grid_ptr(), [&](std::size_t k) {
    return rho[k] * -0.5 * (m * u[k] * u[k] + h * du[k]);
  }));
  const std::string tag = std::to_string(axis);
  return {sigma2_p,
          m2_sigma2_v,
          m2_u2,
          2.0 * m * mean_vq,
          {"dispersion_osmotic_" + tag,
           safe_ratio(std::abs(sigma2_p - m2_sigma2_v - m2_u2), sigma2_p), 1e-6},
          {"dispersion_potential_" + tag,
           safe_ratio(std::abs(sigma2_p - m2_sigma2_v - 2.0 * m * mean_vq), sigma2_p), 1e-6}};
}

QuantumPotential quantum_potential(const WaveFunction& wf, const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  auto raw = raw_fields(wf, c);
  const auto& p = wf.physics();
  const auto& grid = wf.grid_ptr();
  const double h = p.hbar;

  const auto du1 = partial_derivative(raw.u1, 1);
  const auto du2 = partial_derivative(raw.u2, 2);
  RealField amp = map_real(grid, [&](std::size_t k) { return std::abs(wf.psi()[k]); });
  const auto dd1 = partial_derivative(partial_derivative(amp, 1, opts.scheme), 1, opts.scheme);
  const auto dd2 = partial_derivative(partial_derivative(amp, 2, opts.scheme), 2, opts.scheme);

  QuantumPotential q;
  q.velocity_route.vq1 =
      map_real(grid, [&](std::size_t k) { return -0.5 * (p.m1 * raw.u1[k] * raw.u1[k] + h * du1[k]); });
  q.velocity_route.vq2 =
      map_real(grid, [&](std::size_t k) { return -0.5 * (p.m2 * raw.u2[k] * raw.u2[k] + h * du2[k]); });
  auto curvature = [&](const RealField& dd, double m) {
    return map_real(grid, [&](std::size_t k) {
      return amp[k] > 0.0 ? -h * h / (2.0 * m) * dd[k] / amp[k] : 0.0;
    });
  };
  q.amplitude_route.vq1 = curvature(dd1, p.m1);
  q.amplitude_route.vq2 = curvature(dd2, p.m2);
  for (auto* f : {&q.velocity_route, &q.amplitude_route}) {
    apply_mask(f->vq1, c.mask);
    apply_mask(f->vq2, c.mask);
    f->vq_total = map_real(grid, [&](std::size_t k) { return f->vq1[k] + f->vq2[k]; });
  }

  const double scale = sup_over(c.mask, [&](std::size_t k) {
    return 0.5 * (p.m1 * raw.u1[k] * raw.u1[k] + h * std::abs(du1[k]) +
                  p.m2 * raw.u2[k] * raw.u2[k] + h * std::abs(du2[k]));
  });
  const double diff = sup_over(c.mask, [&](std::size_t k) {
    return std::max(std::abs(q.velocity_route.vq1[k] - q.amplitude_route.vq1[k]),
                    std::abs(q.velocity_route.vq2[k] - q.amplitude_route.vq2[k]));
  });
  q.check = {"quantum_potential_routes", safe_ratio(diff, scale), 1e-5};
  q.mask = std::move(c.mask);
  return q;
}

CommutatorCheck commutator_check(const WaveFunction& wf, int axis, const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  auto raw = raw_fields(wf, c);
  const auto& p = wf.physics();
  const auto& psi = wf.psi();
  const Grid& g = wf.grid();
  const auto& grid = wf.grid_ptr();
  auto x = [&](std::size_t k) { return axis == 1 ? g.x1(k / g.n2()) : g.x2(k % g.n2()); };
  const auto& d = axis == 1 ? c.d1 : c.d2;
  const auto d_x_psi =
      partial_derivative(map_complex(grid, [&](std::size_t k) { return x(k) * psi[k]; }), axis,
                         opts.scheme);
  const cplx ih(0.0, p.hbar);
  // x p - p x acting on psi: -i hbar (x d psi - d(x psi))
  const cplx lhs = integrate(map_complex(grid, [&](std::size_t k) {
    return std::conj(psi[k]) * -ih * (x(k) * d[k] - d_x_psi[k]);
  }));
  const auto& u = axis == 1 ? raw.u1 : raw.u2;
  const double xu = integrate(map_real(grid, [&](std::size_t k) { return wf.rho()[k] * x(k) * u[k]; }));
  const cplx rhs = cplx(0.0, -2.0 * p.mass(axis) * xu);
  return {lhs, rhs,
          {"commutator_" + std::to_string(axis), std::abs(lhs - rhs) / p.hbar, 1e-6},
          std::abs(lhs - ih) / p.hbar};
}

IntegrationByPartsCheck integration_by_parts_check(const WaveFunction& wf,
                                                   const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  auto raw = raw_fields(wf, c);
  const auto& p = wf.physics();
  const auto& rho = wf.rho();
  const auto& grid = wf.grid_ptr();
  auto prod = [&](const RealField& a, const RealField& b) {
    return integrate(map_real(grid, [&](std::size_t k) { return rho[k] * a[k] * b[k]; }));
  };
  IntegrationByPartsCheck r{};
  r.mean_d1u2 = mean(rho, partial_derivative(raw.u2, 1));
  r.mean_d1v2 = mean(rho, partial_derivative(raw.v2, 1));
  r.mean_d2u1 = mean(rho, partial_derivative(raw.u1, 2));
  r.mean_d2v1 = mean(rho, partial_derivative(raw.v1, 2));
  r.mean_u1u2 = prod(raw.u1, raw.u2);
  r.mean_u1v2 = prod(raw.u1, raw.v2);
  r.mean_u2v1 = prod(raw.u2, raw.v1);
  const double rms_u1 = std::sqrt(prod(raw.u1, raw.u1));
  const double rms_u2 = std::sqrt(prod(raw.u2, raw.u2));
  const double rms_w1 = std::sqrt(prod(raw.u1, raw.u1) + prod(raw.v1, raw.v1));
  const double rms_w2 = std::sqrt(prod(raw.u2, raw.u2) + prod(raw.v2, raw.v2));
  const double k1 = 2.0 * p.m1 / p.hbar;
  const double k2 = 2.0 * p.m2 / p.hbar;
  auto check = [](std::string name, double lhs, double rhs, double scale) {
    return RouteCheck{std::move(name), safe_ratio(std::abs(lhs - rhs), scale), 1e-6};
  };
  r.checks = {check("ibp_d1u2", r.mean_d1u2, -k1 * r.mean_u1u2, k1 * rms_u1 * rms_w2),
              check("ibp_d1v2", r.mean_d1v2, -k1 * r.mean_u1v2, k1 * rms_u1 * rms_w2),
              check("ibp_d2u1", r.mean_d2u1, -k2 * r.mean_u1u2, k2 * rms_u2 * rms_w1),
              check("ibp_d2v1", r.mean_d2v1, -k2 * r.mean_u2v1, k2 * rms_u2 * rms_w1)};
  return r;
}

PiTerms pi_terms(const WaveFunction& wf, const AnalysisOptions& opts) {
  auto c = detail::calculus(wf, opts);
  auto raw = raw_fields(wf, c);
  const auto& p = wf.physics();
  const auto& rho = wf.rho();
  const auto& grid = wf.grid_ptr();
  const double h = p.hbar;
  const double mm = p.m1 * p.m2;
  const auto du1_1 = partial_derivative(raw.u1, 1);
  const auto du2_2 = partial_derivative(raw.u2, 2);
  const auto du2_1 = partial_derivative(raw.u2, 1);
  const auto du1_2 = partial_derivative(raw.u1, 2);
  const auto dv2_1 = partial_derivative(raw.v2, 1);
  const auto dv1_2 = partial_derivative(raw.v1, 2);
  const auto& u1 = raw.u1;
  const auto& u2 = raw.u2;
  const auto& v1 = raw.v1;
  const auto& v2 = raw.v2;

  PiTerms t;
  t.pi_uu_11 = map_real(grid, [&](std::size_t k) { return -p.m1 * p.m1 * u1[k] * u1[k] - h * p.m1 * du1_1[k]; });
  t.pi_uu_22 = map_real(grid, [&](std::size_t k) { return -p.m2 * p.m2 * u2[k] * u2[k] - h * p.m2 * du2_2[k]; });
  t.pi_uu_12 = map_real(grid, [&](std::size_t k) { return -mm * u1[k] * u2[k] - h * p.m2 * du2_1[k]; });
  t.pi_uu_21 = map_real(grid, [&](std::size_t k) { return -mm * u2[k] * u1[k] - h * p.m1 * du1_2[k]; });
  t.pi_uv_12 = map_real(grid, [&](std::size_t k) {
    return -mm * (v2[k] * u1[k] + v1[k] * u2[k]) - h * p.m2 * dv2_1[k];
  });
  t.pi_uv_21 = map_real(grid, [&](std::size_t k) {
    return -mm * (v1[k] * u2[k] + v2[k] * u1[k]) - h * p.m1 * dv1_2[k];
  });
  t.mean_pi_uu_12 = mean(rho, t.pi_uu_12);
  t.mean_pi_uv_12 = mean(rho, t.pi_uv_12);
  t.mean_u1u2_term = mm * integrate(map_real(grid, [&](std::size_t k) { return rho[k] * u1[k] * u2[k]; }));

  const auto q = quantum_potential(wf, opts);
  const auto& mask = q.mask;
  const double scale_11 = sup_over(mask, [&](std::size_t k) {
    return p.m1 * p.m1 * u1[k] * u1[k] + h * p.m1 * std::abs(du1_1[k]);
  });
  const double scale_22 = sup_over(mask, [&](std::size_t k) {
    return p.m2 * p.m2 * u2[k] * u2[k] + h * p.m2 * std::abs(du2_2[k]);
  });
  const double diag = std::max(
      safe_ratio(sup_over(mask, [&](std::size_t k) { return t.pi_uu_11[k] - 2.0 * p.m1 * q.velocity_route.vq1[k]; }), scale_11),
      safe_ratio(sup_over(mask, [&](std::size_t k) { return t.pi_uu_22[k] - 2.0 * p.m2 * q.velocity_route.vq2[k]; }), scale_22));
  const double pscale = momentum_scale(wf, 1, opts) * momentum_scale(wf, 2, opts);
  t.checks = {{"pi_uu_diagonal", diag, 1e-10},
              {"pi_uu_mean", safe_ratio(std::abs(t.mean_pi_uu_12 - t.mean_u1u2_term), pscale), 1e-6},
              {"pi_uv_mean", safe_ratio(std::abs(t.mean_pi_uv_12), pscale), 1e-6}};
  for (auto* f : {&t.pi_uu_11, &t.pi_uu_22, &t.pi_uu_12, &t.pi_uu_21, &t.pi_uv_12, &t.pi_uv_21}) {
    apply_mask(*f, mask);
  }
  return t;
}

}  // namespace weakcorr
