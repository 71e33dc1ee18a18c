#pragma once

#include <algorithm>
#include <cmath>

#include "weakcorr/grid.hpp"
#include "weakcorr/kinematics.hpp"
#include "weakcorr/state.hpp"

namespace weakcorr::detail {

/// Derivatives of psi shared by the analysis routines.
struct Calculus {
  ComplexField d1, d2;  // d_i psi
  ComplexField g1, g2;  // d_i psi / psi on the full grid
  Mask mask;
};

/// Throws ConfigurationError when the spectral scheme is requested for a
/// state that does not vanish at the edges.
void check_scheme(const WaveFunction& wf, Scheme scheme);

Calculus calculus(const WaveFunction& wf, const AnalysisOptions& opts);

/// num / psi where psi is nonzero, 0 elsewhere.
ComplexField quotient(const ComplexField& num, const ComplexField& psi);

/// Integral of rho * f.
double mean(const RealField& rho, const RealField& f);
cplx mean(const RealField& rho, const ComplexField& f);

template <typename F>
RealField map_real(const GridPtr& grid, F&& f) {
  RealField out(grid);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(k);
  return out;
}

template <typename F>
ComplexField map_complex(const GridPtr& grid, F&& f) {
  ComplexField out(grid);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(k);
  return out;
}

template <typename F>
double sup_over(const Mask& mask, F&& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) s = std::max(s, std::abs(f(k)));
  }
  return s;
}

inline double safe_ratio(double num, double scale) {
  if (scale > 0.0) return num / scale;
  return num == 0.0 ? 0.0 : INFINITY;
}

}  // namespace weakcorr::detail
