#pragma once

#include <functional>
#include <string>
#include <vector>

#include "weakcorr/grid.hpp"

namespace weakcorr {

enum class StateKind {
  product_gaussian,
  correlated_gaussian,
  phase_gaussian,
  general_gaussian,
  cat,
  file,
};

StateKind parse_state_kind(const std::string& name);
const char* to_string(StateKind kind);

/// Parameters for every state family. Only the fields used by `kind` matter:
///   product_gaussian     sigma1, sigma2
///   correlated_gaussian  a, b
///   phase_gaussian       sigma, lambda
///   general_gaussian     a, b, lambda
///   cat                  c, sigma
///   file                 path (JSON header written by save_wavefunction)
struct StateSpec {
  StateKind kind = StateKind::product_gaussian;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double a = 0.5;
  double b = 0.0;
  double lambda = 0.0;
  double sigma = 1.0;
  double c = 2.0;
  std::string path;
};

using Amplitude = std::function<cplx(double, double)>;

/// Normalized two-particle amplitude on a grid.
class WaveFunction {
 public:
  /// Wraps samples as given. normalize() rescales them to unit norm.
  WaveFunction(ComplexField psi, PhysicsParams physics, Amplitude analytic = {});

  const ComplexField& psi() const { return psi_; }
  const RealField& rho() const { return rho_; }
  const Grid& grid() const { return psi_.grid(); }
  const GridPtr& grid_ptr() const { return psi_.grid_ptr(); }
  const PhysicsParams& physics() const { return physics_; }

  /// Norm of the samples as supplied, before any rescaling.
  double initial_norm() const { return initial_norm_; }
  double edge_density_ratio() const { return edge_ratio_; }
  /// Edge density at most 1e-10 of the peak density.
  bool boundary_decay_ok() const;

  /// Closed-form amplitude with the same normalization as psi(), if known.
  bool has_analytic() const { return static_cast<bool>(analytic_); }
  cplx analytic(double x1, double x2) const;

  void normalize();
  void add_warning(std::string message) { warnings_.push_back(std::move(message)); }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void refresh();

  ComplexField psi_;
  RealField rho_;
  PhysicsParams physics_;
  Amplitude analytic_;
  double initial_norm_ = 0.0;
  double edge_ratio_ = 0.0;
  double analytic_scale_ = 1.0;
  std::vector<std::string> warnings_;
};

inline constexpr double kBoundaryDecayLimit = 1e-10;

/// rho ~ exp(-x1^2/(2 sigma1^2) - x2^2/(2 sigma2^2)), real amplitude.
WaveFunction product_gaussian(const GridPtr& grid, const PhysicsParams& physics, double sigma1,
                              double sigma2);

/// rho ~ exp(-a(x1^2 + x2^2) - 2b x1 x2) with phase lambda x1 x2. Needs a > |b|.
WaveFunction general_gaussian(const GridPtr& grid, const PhysicsParams& physics, double a,
                              double b, double lambda);

WaveFunction correlated_gaussian(const GridPtr& grid, const PhysicsParams& physics, double a,
                                 double b);

/// Isotropic width sigma with phase lambda x1 x2.
WaveFunction phase_gaussian(const GridPtr& grid, const PhysicsParams& physics, double sigma,
                            double lambda);

/// g(x1-c)g(x2-c) + g(x1+c)g(x2+c) with g(x) = exp(-x^2/(4 sigma^2)).
WaveFunction cat_state(const GridPtr& grid, const PhysicsParams& physics, double c, double sigma);

/// Builds the state named by spec. File states take grid and physics from
/// their header; `grid` and `physics` are ignored for them.
WaveFunction make_state(const StateSpec& spec, const GridPtr& grid, const PhysicsParams& physics);

/// psi * exp(i (k1 x1 + k2 x2)).
WaveFunction with_plane_phase(const WaveFunction& wf, double k1, double k2);

/// psi * exp(i theta).
WaveFunction with_global_phase(const WaveFunction& wf, double theta);

/// Writes a JSON header at header_path and the samples as CSV next to it
/// (same stem, .csv extension). Values round-trip bit for bit.
void save_wavefunction(const WaveFunction& wf, const std::string& header_path);

/// Reads a state written by save_wavefunction. A norm off by more than 1e-6
/// is rescaled with a warning; a state that does not decay at the edges is
/// accepted with a warning.
WaveFunction load_wavefunction(const std::string& header_path);

}  // namespace weakcorr
