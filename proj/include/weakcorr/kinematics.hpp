#pragma once

#include <string>
#include <vector>

#include "weakcorr/grid.hpp"
#include "weakcorr/state.hpp"

namespace weakcorr {

struct AnalysisOptions {
  /// Scheme for derivatives of psi and sqrt(rho). Derivatives of velocity
  /// and weak-value fields always use fd4 since those fields are not periodic.
  Scheme scheme = Scheme::fd4;
  double eps_rel = 1e-8;
};

/// Dimensionless disagreement between two evaluations of one quantity.
struct RouteCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool ok() const { return residual <= tolerance; }
};

/// Throws NumericalConsistencyError when the check fails.
void require(const RouteCheck& check);

/// u_i = (hbar/m_i) Re(d_i psi / psi), v_i = (hbar/m_i) Im(d_i psi / psi).
struct VelocityFields {
  RealField u1, u2, v1, v2;  // zero at masked points
  RealField j1, j2;          // probability currents rho v_i on the full grid
  /// d_i psi / psi on the full grid, zero where psi vanishes.
  ComplexField log_grad1, log_grad2;
  Mask mask;
};

VelocityFields velocity_fields(const WaveFunction& wf, const AnalysisOptions& opts = {});

/// Root mean square momentum sqrt(<p_i^2>), the scale for momentum residuals.
double momentum_scale(const WaveFunction& wf, int axis, const AnalysisOptions& opts = {});

struct MomentumExpectation {
  cplx operator_route;     // <psi| -i hbar d_i |psi>
  double kinematic_route;  // m_i <v_i>
  RouteCheck check;
};

MomentumExpectation momentum_expectation(const WaveFunction& wf, int axis,
                                         const AnalysisOptions& opts = {});

struct MomentumCorrelation {
  double direct;      // <p1 p2> - <p1><p2> from the mixed derivative
  double decomposed;  // velocity covariance term + osmotic term
  double velocity_term;  // m1 m2 C(v1, v2)
  double osmotic_term;   // m1 m2 <u1 u2>
  RouteCheck check;
};

MomentumCorrelation momentum_correlation(const WaveFunction& wf, const AnalysisOptions& opts = {});

struct MomentumDispersion {
  double sigma2_p;
  double m2_sigma2_v;
  double m2_mean_u2;
  double two_m_mean_vq;
  RouteCheck osmotic_split;
  RouteCheck potential_split;
};

/// Throws InvariantViolation when m^2 <u^2> is not positive.
MomentumDispersion momentum_dispersion(const WaveFunction& wf, int axis,
                                       const AnalysisOptions& opts = {});

struct QuantumPotentialFields {
  RealField vq1, vq2, vq_total;
};

struct QuantumPotential {
  QuantumPotentialFields velocity_route;   // -(m u^2 + hbar du/dx)/2
  QuantumPotentialFields amplitude_route;  // -(hbar^2/2m) d^2 sqrt(rho) / sqrt(rho)
  /// Per-particle pointwise agreement, scaled by the largest route term.
  RouteCheck check;
  Mask mask;
};

QuantumPotential quantum_potential(const WaveFunction& wf, const AnalysisOptions& opts = {});

/// <x p - p x> against -2 i m <x u>; both should equal i hbar.
struct CommutatorCheck {
  cplx lhs;
  cplx rhs;
  RouteCheck check;
  double deviation_from_ihbar;  // |lhs - i hbar| / hbar
};

CommutatorCheck commutator_check(const WaveFunction& wf, int axis, const AnalysisOptions& opts = {});

/// <d_i X_j> = -(2 m_i / hbar) <u_i X_j> for X in {u, v}, (i, j) in {(1,2), (2,1)}.
struct IntegrationByPartsCheck {
  double mean_d1u2, mean_d1v2, mean_d2u1, mean_d2v1;
  double mean_u1u2, mean_u1v2, mean_u2v1;
  std::vector<RouteCheck> checks;
};

IntegrationByPartsCheck integration_by_parts_check(const WaveFunction& wf,
                                                   const AnalysisOptions& opts = {});

/// Osmotic stress-like terms pi^{uu}_{ij}, pi^{uv}_{ij}.
struct PiTerms {
  RealField pi_uu_11, pi_uu_22, pi_uu_12, pi_uu_21, pi_uv_12, pi_uv_21;  // masked
  double mean_pi_uu_12;
  double mean_pi_uv_12;
  double mean_u1u2_term;  // m1 m2 <u1 u2>
  /// pi^{uu}_{ii} = 2 m_i V_Qi, mean of pi^{uu}_{12}, mean of pi^{uv}_{12}.
  std::vector<RouteCheck> checks;
};

PiTerms pi_terms(const WaveFunction& wf, const AnalysisOptions& opts = {});

}  // namespace weakcorr
