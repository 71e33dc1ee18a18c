#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace weakcorr {

using cplx = std::complex<double>;

struct GridSpec {
  std::size_t n1 = 256;
  std::size_t n2 = 256;
  double x1_min = -8.0;
  double x1_max = 8.0;
  double x2_min = -8.0;
  double x2_max = 8.0;
};

struct PhysicsParams {
  double hbar = 1.0;
  double m1 = 1.0;
  double m2 = 1.0;

  // axis is 1 or 2
  double mass(int axis) const;
};

void validate(const PhysicsParams& physics);

/// Uniform tensor grid including both end points on each axis.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  std::size_t n1() const { return spec_.n1; }
  std::size_t n2() const { return spec_.n2; }
  std::size_t size() const { return spec_.n1 * spec_.n2; }
  double h1() const { return h1_; }
  double h2() const { return h2_; }
  double h(int axis) const;
  double x1(std::size_t i) const { return x1_[i]; }
  double x2(std::size_t j) const { return x2_[j]; }
  std::span<const double> axis1() const { return x1_; }
  std::span<const double> axis2() const { return x2_; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * spec_.n2 + j; }

 private:
  GridSpec spec_;
  double h1_;
  double h2_;
  std::vector<double> x1_;
  std::vector<double> x2_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(const GridSpec& spec);

/// Row-major samples on a grid, index i*n2 + j.
template <typename T>
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, T fill = T{})
      : grid_(std::move(grid)), values_(grid_->size(), fill) {}

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  T& operator()(std::size_t i, std::size_t j) { return values_[i * grid_->n2() + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return values_[i * grid_->n2() + j];
  }
  T& operator[](std::size_t k) { return values_[k]; }
  const T& operator[](std::size_t k) const { return values_[k]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

 private:
  GridPtr grid_;
  std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

RealField real_part(const ComplexField& f);
RealField imag_part(const ComplexField& f);

/// Points kept by the analysis. Masked points hold 0 in every masked field.
class Mask {
 public:
  Mask() = default;
  Mask(GridPtr grid, std::vector<std::uint8_t> keep, double eps_rel, double unmasked_mass);

  bool operator[](std::size_t k) const { return keep_[k] != 0; }
  bool operator()(std::size_t i, std::size_t j) const { return keep_[grid_->index(i, j)] != 0; }
  std::size_t size() const { return keep_.size(); }
  std::size_t unmasked_count() const { return count_; }
  double unmasked_fraction() const;
  double unmasked_mass() const { return mass_; }
  double eps_rel() const { return eps_rel_; }
  const Grid& grid() const { return *grid_; }

 private:
  GridPtr grid_;
  std::vector<std::uint8_t> keep_;
  std::size_t count_ = 0;
  double eps_rel_ = 0.0;
  double mass_ = 0.0;
};

enum class Scheme { fd4, spectral };

Scheme parse_scheme(const std::string& name);
const char* to_string(Scheme scheme);

/// Composite trapezoid rule. Rows are summed independently and combined in order.
double integrate(const RealField& f);
cplx integrate(const ComplexField& f);

/// d/dx_axis of f. fd4 uses 5-point stencils with one-sided closures on the
/// two outermost points at each end of a line. spectral treats each line as periodic over
/// its first n-1 points and requires f to vanish at the edges.
RealField partial_derivative(const RealField& f, int axis, Scheme scheme = Scheme::fd4);
ComplexField partial_derivative(const ComplexField& f, int axis, Scheme scheme = Scheme::fd4);

/// Keeps points with rho >= eps_rel * max(rho). Throws DegenerateStateError
/// when max(rho) is not positive or less than half the probability survives.
Mask build_mask(const RealField& rho, double eps_rel = 1e-8);

/// max of rho on the outer ring divided by max of rho.
double edge_density_ratio(const RealField& rho);

/// Zeroes f at masked points.
template <typename T>
void apply_mask(Field<T>& f, const Mask& mask) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!mask[k]) f[k] = T{};
  }
}

}  // namespace weakcorr
