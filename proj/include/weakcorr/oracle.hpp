#pragma once

#include <string>

#include "weakcorr/grid.hpp"
#include "weakcorr/state.hpp"

/// Reference values computed without the analysis pipeline: closed forms for
/// the Gaussian families and brute-force quadrature on refined grids.
namespace weakcorr::oracle {

/// Closed forms for rho ~ exp(-a1 x1^2 - a2 x2^2 - 2 b x1 x2), phase lambda x1 x2.
struct GaussianTruth {
  double a1, a2, b, lambda;
  double mean_u1u2;
  double mean_u1v2;
  double mean_u2v1;
  double mean_v1v2;
  double mean_u1_sq, mean_u2_sq;
  double mean_v1_sq, mean_v2_sq;
  double mean_d1u2;  // <d u2 / d x1>
  double mean_d1v2;
  double mean_x1u1, mean_x2u2;
  double re_cw;  // uniform over configuration space
  double im_cw;
  double sigma2_p1, sigma2_p2;
  double c_p1p2;
  double vq_origin;  // V_Q1 + V_Q2 at x = 0
};

/// Throws ConfigurationError for non-Gaussian kinds.
GaussianTruth gaussian_truth(const StateSpec& spec, const PhysicsParams& physics);

enum class Integrand {
  u1, u2, v1, v2,
  u1_sq, u2_sq, v1_sq, v2_sq,
  u1u2, u1v2, u2v1, v1v2,
  d1u2, d1v2,
  x1u1, x2u2,
  re_cw, im_cw,
  vq1, vq2,
};

Integrand parse_integrand(const std::string& name);

struct BruteForceResult {
  double value;           // Richardson extrapolation of the two refinements
  double raw;             // finer of the two refinements
  double error_estimate;  // |finer - coarser| / 3
};

/// rho-weighted mean of the integrand for an analytic state on `grid`'s
/// domain. Uses central differences and the trapezoid rule with spacing
/// h / (refine) and h / (2 refine), then extrapolates. refine is 1, 2 or 3.
BruteForceResult brute_force_expectation(const StateSpec& spec, const GridSpec& grid,
                                         const PhysicsParams& physics, Integrand integrand,
                                         int refine = 2);

/// sigma^2 of p_axis from the Fourier transform of psi along that axis,
/// zero-padded by `pad`.
double momentum_space_dispersion(const StateSpec& spec, const GridSpec& grid,
                                 const PhysicsParams& physics, int axis, int pad = 8);

}  // namespace weakcorr::oracle
