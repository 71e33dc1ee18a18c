#pragma once

#include "weakcorr/grid.hpp"
#include "weakcorr/kinematics.hpp"
#include "weakcorr/state.hpp"

namespace weakcorr {

/// wp_i = -i hbar d_i psi / psi = m_i (v_i - i u_i).
struct WeakMomentumFields {
  ComplexField wp1, wp2;  // zero at masked points
  Mask mask;
  cplx weighted_mean1, weighted_mean2;  // integral of rho wp_i
  double operator_mean1, operator_mean2;  // <p_i>
  RouteCheck velocity_check;  // wp_i against m_i (v_i - i u_i)
  RouteCheck mean_check;      // weighted means against <p_i>
  RouteCheck imaginary_mean_check;  // integral of rho Im wp_i vanishes
};

WeakMomentumFields weak_momentum(const WaveFunction& wf, const AnalysisOptions& opts = {});

/// -hbar^2 d1 d2 psi / psi.
struct WeakMomentumProduct {
  ComplexField field;  // zero at masked points
  Mask mask;
  cplx weighted_mean;
  cplx operator_mean;
  RouteCheck check;
};

WeakMomentumProduct weak_momentum_product(const WaveFunction& wf, const AnalysisOptions& opts = {});

/// Sign s of the commutator [A, P_A] = s i hbar relating an observable to
/// the variable psi is expressed in. The local operator for A is then
/// -s i hbar d/dalpha: s = +1 for momenta in the position representation,
/// s = -1 for positions in the momentum representation.
enum class ConjugateSign : int { plus = 1, minus = -1 };

/// C^w = <AB>_w - <A>_w <B>_w for the pair of observables conjugate to the
/// two grid variables.
struct WeakCorrelationField {
  ComplexField cw;           // <AB>_w - <A>_w<B>_w, zero at masked points
  ComplexField closed_form;  // s hbar d1 Im<B>_w - s i hbar d1 Re<B>_w, masked
  ComplexField partner;      // same with the roles of A and B exchanged, masked
  ComplexField weak_a, weak_b;  // <A>_w, <B>_w on the full grid
  Mask mask;
  cplx weighted_mean;  // integral of rho cw over the full grid
  double sup_re = 0.0;
  double sup_im = 0.0;
  double scale = 0.0;  // sup of |<AB>_w| and |<A>_w<B>_w| over unmasked points
  RouteCheck route_check;
  RouteCheck exchange_check;
};

WeakCorrelationField conjugate_pair_weak_correlation(const WaveFunction& wf, ConjugateSign sign,
                                                     const AnalysisOptions& opts = {});

/// Momentum weak correlation in the position representation. The closed
/// form equals -hbar m2 d1(u2 + i v2).
WeakCorrelationField weak_correlation(const WaveFunction& wf, const AnalysisOptions& opts = {});

/// C(p1,p2) = C(Re wp1, Re wp2) - C(Im wp1, Im wp2) + Re<C^w>.
struct CorrelationDecomposition {
  double term_re_re;
  double term_im_im;
  double term_re_cw;
  double direct;
  RouteCheck check;
};

CorrelationDecomposition correlation_decomposition(const WaveFunction& wf,
                                                   const AnalysisOptions& opts = {});

/// Weak kinetic energy sum_i (-hbar^2 / 2 m_i) d_i^2 psi / psi.
struct WeakKineticEnergy {
  RealField real_part;      // masked
  RealField imag_part;      // masked
  RealField velocity_form;  // sum_i m_i v_i^2 / 2 + V_Q, masked
  RouteCheck check;
};

WeakKineticEnergy weak_kinetic_energy(const WaveFunction& wf, const AnalysisOptions& opts = {});

/// Density ratio rho(x - alpha hbar e_axis) / rho(x) after a weak momentum
/// kick, compared with 1 + 2 alpha Im wp_axis over the points where rho is
/// at least window_rel of its peak.
struct WeakProbe {
  RealField ratio;       // zero outside the window
  RealField prediction;  // zero outside the window
  std::size_t window_points = 0;
  double residual_sup = 0.0;
};

WeakProbe weak_probe(const WaveFunction& wf, int axis, double alpha,
                     const AnalysisOptions& opts = {}, double window_rel = 1e-2);

/// psi(p1, p2) = (2 pi hbar)^-1 integral psi(x1, x2) exp(-i (p1 x1 + p2 x2) / hbar),
/// sampled on an n1 x n2 momentum grid spanning <p_i> +/- 8 sigma_p_i.
struct MomentumRepresentation {
  WaveFunction state;    // normalized on the momentum grid
  double parseval_norm;  // integral of |psi(p)|^2 before normalization
};

MomentumRepresentation momentum_representation(const WaveFunction& wf,
                                               const AnalysisOptions& opts = {});

}  // namespace weakcorr
