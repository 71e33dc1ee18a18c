#include "weakcorr/detector.hpp"

#include <algorithm>
#include <cmath>

#include "detail.hpp"
#include "weakcorr/errors.hpp"

namespace weakcorr {

namespace {

// Relative weight of <(Im w_j)^2> added to var(Re w_j) so iP_mean stays
// finite when Re w_j is constant.
constexpr double kPhaseRegularizer = 1e-6;

}  // namespace

EntanglementIndicators indicators(const WaveFunction& wf, const WeakCorrelationField& cwf) {
  const auto& rho = wf.rho();
  const auto& grid = wf.grid_ptr();
  const ComplexField* w[2] = {&cwf.weak_a, &cwf.weak_b};
  auto avg = [&](auto f) { return integrate(detail::map_real(grid, [&](std::size_t k) { return rho[k] * f(k); })); };

  double im2[2], re_mean[2], im_mean[2], re_var[2];
  for (int a = 0; a < 2; ++a) {
    const auto& f = *w[a];
    im2[a] = avg([&](std::size_t k) { return f[k].imag() * f[k].imag(); });
    im_mean[a] = avg([&](std::size_t k) { return f[k].imag(); });
    re_mean[a] = avg([&](std::size_t k) { return f[k].real(); });
    re_var[a] = avg([&](std::size_t k) { return f[k].real() * f[k].real(); }) - re_mean[a] * re_mean[a];
  }
  if (!(im2[0] > 0.0) || !(im2[1] > 0.0)) {
    throw InvariantViolation("osmotic weak-value dispersion vanishes");
  }
  const double norm = std::sqrt(im2[0] * im2[1]);

  EntanglementIndicators ind;
  const double cov_im = avg([&](std::size_t k) { return cwf.weak_a[k].imag() * cwf.weak_b[k].imag(); }) -
                        im_mean[0] * im_mean[1];
  ind.iA_mean = std::abs(cov_im) / norm;
  ind.iA_sup = cwf.sup_re / norm;
  ind.iP_sup = cwf.sup_im / norm;
  for (int a = 0; a < 2; ++a) {
    const int b = 1 - a;
    const auto& fa = *w[a];
    const auto& fb = *w[b];
    const double cov = avg([&](std::size_t k) { return fa[k].imag() * fb[k].real(); }) -
                       im_mean[a] * re_mean[b];
    const double denom =
        std::sqrt(im2[a] * (std::max(re_var[b], 0.0) + kPhaseRegularizer * im2[b]));
    ind.iP_mean = std::max(ind.iP_mean, std::abs(cov) / denom);
  }
  return ind;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::product: return "PRODUCT";
    case Classification::a_only: return "A_ONLY";
    case Classification::p_only: return "P_ONLY";
    case Classification::ap: return "AP";
  }
  return "UNKNOWN";
}

Verdict classify(const EntanglementIndicators& ind, double tau) {
  if (!(tau > 0.0) || tau > 0.1) throw UsageError("tau must lie in (0, 0.1]");
  Verdict v;
  v.tau = tau;
  v.iA_mean_above = ind.iA_mean > tau;
  v.iA_sup_above = ind.iA_sup > tau;
  v.iP_mean_above = ind.iP_mean > tau;
  v.iP_sup_above = ind.iP_sup > tau;
  v.amplitude_flag = v.iA_mean_above || v.iA_sup_above;
  v.phase_flag = v.iP_mean_above || v.iP_sup_above;
  if (v.amplitude_flag && v.phase_flag) {
    v.classification = Classification::ap;
  } else if (v.amplitude_flag) {
    v.classification = Classification::a_only;
  } else if (v.phase_flag) {
    v.classification = Classification::p_only;
  }
  return v;
}

bool IdentityReport::all_pass() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const auto& r) { return r.pass; });
}

const IdentityResidual& IdentityReport::at(const std::string& name) const {
  for (const auto& r : residuals) {
    if (r.name == name) return r;
  }
  throw UsageError("no identity residual named " + name);
}

IdentityReport identity_suite(const WaveFunction& wf, const AnalysisOptions& opts,
                              double tolerance_floor) {
  std::vector<RouteCheck> checks;
  auto add = [&](const RouteCheck& c) { checks.push_back(c); };

  const auto wm = weak_momentum(wf, opts);
  add(wm.velocity_check);
  add(wm.mean_check);
  add(wm.imaginary_mean_check);
  add(weak_momentum_product(wf, opts).check);

  const auto vf = velocity_fields(wf, opts);
  {
    const auto& rho = wf.rho();
    const auto& grid = wf.grid_ptr();
    const auto& p = wf.physics();
    for (int axis = 1; axis <= 2; ++axis) {
      const auto& g = axis == 1 ? vf.log_grad1 : vf.log_grad2;
      const double c = p.hbar / p.mass(axis);
      const double mu = integrate(detail::map_real(grid, [&](std::size_t k) { return rho[k] * c * g[k].real(); }));
      const double mu2 = integrate(detail::map_real(grid, [&](std::size_t k) {
        return rho[k] * c * c * g[k].real() * g[k].real();
      }));
      add({"mean_osmotic_velocity_" + std::to_string(axis), detail::safe_ratio(std::abs(mu), std::sqrt(mu2)), 1e-8});
    }
  }
  for (int axis = 1; axis <= 2; ++axis) {
    add(momentum_expectation(wf, axis, opts).check);
    const auto d = momentum_dispersion(wf, axis, opts);
    add(d.osmotic_split);
    add(d.potential_split);
    const auto c = commutator_check(wf, axis, opts);
    add(c.check);
    add({"commutator_ihbar_" + std::to_string(axis), c.deviation_from_ihbar, 1e-6});
  }
  add(momentum_correlation(wf, opts).check);
  for (const auto& c : integration_by_parts_check(wf, opts).checks) add(c);
  add(quantum_potential(wf, opts).check);
  for (const auto& c : pi_terms(wf, opts).checks) add(c);
  const auto cwf = weak_correlation(wf, opts);
  add(cwf.route_check);
  add(cwf.exchange_check);
  add(correlation_decomposition(wf, opts).check);
  add(weak_kinetic_energy(wf, opts).check);

  IdentityReport report;
  for (const auto& c : checks) {
    const double tol = std::max(c.tolerance, tolerance_floor);
    report.residuals.push_back({c.name, c.residual, tol, c.residual <= tol});
  }
  return report;
}

}  // namespace weakcorr
