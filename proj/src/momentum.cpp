#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "detail.hpp"
#include "weakcorr/errors.hpp"
#include "weakcorr/weak_values.hpp"

namespace weakcorr {

namespace {

using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Trapezoid-weighted Fourier kernel K[k, i] = w_i h exp(-i p_k x_i / hbar) / sqrt(2 pi hbar).
Matrix kernel(std::span<const double> p, std::span<const double> x, double h, double hbar) {
  const std::size_t n = x.size();
  Matrix k(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(n));
  const double norm = h / std::sqrt(2.0 * std::numbers::pi * hbar);
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
      k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) =
          std::polar(w * norm, -p[a] * x[i] / hbar);
    }
  }
  return k;
}

}  // namespace

MomentumRepresentation momentum_representation(const WaveFunction& wf, const AnalysisOptions& opts) {
  if (!wf.boundary_decay_ok()) {
    throw ConfigurationError("momentum representation needs a state that decays at the edges");
  }
  const Grid& g = wf.grid();
  const double hbar = wf.physics().hbar;
  GridSpec spec = g.spec();
  for (int axis = 1; axis <= 2; ++axis) {
    const auto pe = momentum_expectation(wf, axis, opts);
    const auto disp = momentum_dispersion(wf, axis, opts);
    const double centre = pe.operator_route.real();
    const double half = 8.0 * std::sqrt(std::max(disp.sigma2_p, 0.0));
    if (!(half > 0.0)) throw DegenerateStateError("momentum spread vanishes");
    const double nyquist = std::numbers::pi * hbar / g.h(axis);
    if (std::abs(centre) + half > nyquist) {
      throw ConfigurationError("momentum window exceeds the grid Nyquist momentum; refine the grid");
    }
    (axis == 1 ? spec.x1_min : spec.x2_min) = centre - half;
    (axis == 1 ? spec.x1_max : spec.x2_max) = centre + half;
  }
  auto pgrid = make_grid(spec);

  const Matrix k1 = kernel(pgrid->axis1(), g.axis1(), g.h1(), hbar);
  const Matrix k2 = kernel(pgrid->axis2(), g.axis2(), g.h2(), hbar);
  Eigen::Map<const Matrix> psi(wf.psi().values().data(), static_cast<Eigen::Index>(g.n1()),
                               static_cast<Eigen::Index>(g.n2()));
  const Matrix transformed = k1 * psi * k2.transpose();

  ComplexField phi(pgrid);
  for (std::size_t a = 0; a < pgrid->n1(); ++a) {
    for (std::size_t b = 0; b < pgrid->n2(); ++b) {
      phi(a, b) = transformed(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  WaveFunction state(std::move(phi), wf.physics());
  const double parseval = state.initial_norm();
  state.normalize();
  return {std::move(state), parseval};
}

}  // namespace weakcorr
