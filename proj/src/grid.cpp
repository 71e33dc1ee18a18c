#include "weakcorr/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "weakcorr/errors.hpp"
#include "weakcorr/parallel.hpp"

namespace weakcorr {

namespace {

void check_axis(int axis) {
  if (axis != 1 && axis != 2) {
    throw UsageError("axis must be 1 or 2, got " + std::to_string(axis));
  }
}

// FFTW planning is not thread safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
void fd4_line(const T* in, T* out, std::size_t n, std::size_t stride, double h) {
  const double c = 1.0 / (12.0 * h);
  auto f = [&](std::size_t k) -> const T& { return in[k * stride]; };
  auto d = [&](std::size_t k) -> T& { return out[k * stride]; };
  d(0) = c * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4));
  d(1) = c * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4));
  for (std::size_t k = 2; k + 2 < n; ++k) {
    d(k) = c * (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2));
  }
  const std::size_t m = n - 1;
  d(m) = c * (25.0 * f(m) - 48.0 * f(m - 1) + 36.0 * f(m - 2) - 16.0 * f(m - 3) + 3.0 * f(m - 4));
  d(m - 1) = c * (3.0 * f(m) + 10.0 * f(m - 1) - 18.0 * f(m - 2) + 6.0 * f(m - 3) - f(m - 4));
}

template <typename T>
Field<T> fd4_derivative(const Field<T>& f, int axis) {
  const Grid& g = f.grid();
  Field<T> out(f.grid_ptr());
  const T* in = f.values().data();
  T* res = out.values().data();
  if (axis == 2) {
    parallel_for(g.n1(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        fd4_line(in + i * g.n2(), res + i * g.n2(), g.n2(), 1, g.h2());
      }
    });
  } else {
    parallel_for(g.n2(), [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) fd4_line(in + j, res + j, g.n1(), g.n2(), g.h1());
    });
  }
  return out;
}

ComplexField spectral_derivative(const ComplexField& f, int axis) {
  const Grid& g = f.grid();
  const std::size_t n = axis == 1 ? g.n1() : g.n2();
  const std::size_t lines = axis == 1 ? g.n2() : g.n1();
  const std::size_t stride = axis == 1 ? g.n2() : 1;
  const std::size_t line_step = axis == 1 ? 1 : g.n2();
  const std::size_t period = n - 1;
  const double h = g.h(axis);
  const double length = static_cast<double>(period) * h;

  std::vector<double> k(period, 0.0);
  for (std::size_t m = 0; m < period; ++m) {
    const double mm = m <= period / 2 ? static_cast<double>(m)
                                      : static_cast<double>(m) - static_cast<double>(period);
    k[m] = 2.0 * std::numbers::pi * mm / length;
  }
  if (period % 2 == 0) k[period / 2] = 0.0;

  fftw_plan forward;
  fftw_plan backward;
  auto* probe = fftw_alloc_complex(period);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    forward = fftw_plan_dft_1d(static_cast<int>(period), probe, probe, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(static_cast<int>(period), probe, probe, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ComplexField out(f.grid_ptr());
  const cplx* in = f.values().data();
  cplx* res = out.values().data();
  parallel_for(lines, [&](std::size_t b, std::size_t e) {
    auto* buf = fftw_alloc_complex(period);
    auto* data = reinterpret_cast<cplx*>(buf);
    for (std::size_t line = b; line < e; ++line) {
      const cplx* src = in + line * line_step;
      cplx* dst = res + line * line_step;
      for (std::size_t m = 0; m < period; ++m) data[m] = src[m * stride];
      fftw_execute_dft(forward, buf, buf);
      for (std::size_t m = 0; m < period; ++m) {
        data[m] *= cplx(0.0, k[m] / static_cast<double>(period));
      }
      fftw_execute_dft(backward, buf, buf);
      for (std::size_t m = 0; m < period; ++m) dst[m * stride] = data[m];
      dst[period * stride] = data[0];
    }
    fftw_free(buf);
  });

  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  fftw_free(probe);
  return out;
}

template <typename T>
T trapezoid(const Field<T>& f) {
  const Grid& g = f.grid();
  std::vector<T> rows(g.n1(), T{});
  parallel_for(g.n1(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const T* row = f.values().data() + i * g.n2();
      T s = 0.5 * (row[0] + row[g.n2() - 1]);
      for (std::size_t j = 1; j + 1 < g.n2(); ++j) s += row[j];
      rows[i] = s;
    }
  });
  T total = 0.5 * (rows.front() + rows.back());
  for (std::size_t i = 1; i + 1 < g.n1(); ++i) total += rows[i];
  total *= g.h1() * g.h2();
  if (!std::isfinite(std::abs(total))) {
    throw NumericalDomainError("integrand contains non-finite values");
  }
  return total;
}

}  // namespace

double PhysicsParams::mass(int axis) const {
  check_axis(axis);
  return axis == 1 ? m1 : m2;
}

void validate(const PhysicsParams& p) {
  if (!(p.hbar > 0.0) || !(p.m1 > 0.0) || !(p.m2 > 0.0) || !std::isfinite(p.hbar) ||
      !std::isfinite(p.m1) || !std::isfinite(p.m2)) {
    throw ConfigurationError("hbar, m1 and m2 must be positive and finite");
  }
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  if (spec.n1 < 16 || spec.n2 < 16) {
    throw ConfigurationError("grid needs at least 16 points per axis");
  }
  const bool finite = std::isfinite(spec.x1_min) && std::isfinite(spec.x1_max) &&
                      std::isfinite(spec.x2_min) && std::isfinite(spec.x2_max);
  if (!finite || !(spec.x1_max > spec.x1_min) || !(spec.x2_max > spec.x2_min)) {
    throw ConfigurationError("grid bounds must be finite with max > min");
  }
  h1_ = (spec.x1_max - spec.x1_min) / static_cast<double>(spec.n1 - 1);
  h2_ = (spec.x2_max - spec.x2_min) / static_cast<double>(spec.n2 - 1);
  x1_.resize(spec.n1);
  x2_.resize(spec.n2);
  for (std::size_t i = 0; i < spec.n1; ++i) x1_[i] = spec.x1_min + static_cast<double>(i) * h1_;
  for (std::size_t j = 0; j < spec.n2; ++j) x2_[j] = spec.x2_min + static_cast<double>(j) * h2_;
}

double Grid::h(int axis) const {
  check_axis(axis);
  return axis == 1 ? h1_ : h2_;
}

GridPtr make_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

RealField real_part(const ComplexField& f) {
  RealField out(f.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k].real();
  return out;
}

RealField imag_part(const ComplexField& f) {
  RealField out(f.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k].imag();
  return out;
}

Mask::Mask(GridPtr grid, std::vector<std::uint8_t> keep, double eps_rel, double unmasked_mass)
    : grid_(std::move(grid)), keep_(std::move(keep)), eps_rel_(eps_rel), mass_(unmasked_mass) {
  count_ = static_cast<std::size_t>(std::count(keep_.begin(), keep_.end(), std::uint8_t{1}));
}

double Mask::unmasked_fraction() const {
  return keep_.empty() ? 0.0 : static_cast<double>(count_) / static_cast<double>(keep_.size());
}

Scheme parse_scheme(const std::string& name) {
  if (name == "fd4") return Scheme::fd4;
  if (name == "spectral") return Scheme::spectral;
  throw ConfigurationError("unknown derivative scheme '" + name + "'");
}

const char* to_string(Scheme scheme) { return scheme == Scheme::fd4 ? "fd4" : "spectral"; }

double integrate(const RealField& f) { return trapezoid(f); }

cplx integrate(const ComplexField& f) { return trapezoid(f); }

RealField partial_derivative(const RealField& f, int axis, Scheme scheme) {
  check_axis(axis);
  if (scheme == Scheme::fd4) return fd4_derivative(f, axis);
  ComplexField c(f.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) c[k] = f[k];
  return real_part(spectral_derivative(c, axis));
}

ComplexField partial_derivative(const ComplexField& f, int axis, Scheme scheme) {
  check_axis(axis);
  if (scheme == Scheme::fd4) return fd4_derivative(f, axis);
  return spectral_derivative(f, axis);
}

Mask build_mask(const RealField& rho, double eps_rel) {
  if (!(eps_rel > 0.0) || eps_rel > 1e-2) {
    throw UsageError("mask threshold eps_rel must lie in (0, 1e-2]");
  }
  double peak = 0.0;
  for (double r : rho.values()) {
    if (!std::isfinite(r)) throw NumericalDomainError("density contains non-finite values");
    peak = std::max(peak, r);
  }
  if (!(peak > 0.0)) throw DegenerateStateError("density vanishes everywhere");

  std::vector<std::uint8_t> keep(rho.size(), 0);
  RealField kept(rho.grid_ptr());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    if (rho[k] >= eps_rel * peak) {
      keep[k] = 1;
      kept[k] = rho[k];
    }
  }
  const double total = integrate(rho);
  const double mass = total > 0.0 ? integrate(kept) / total : 0.0;
  if (mass < 0.5) {
    throw DegenerateStateError("mask keeps less than half of the probability");
  }
  return Mask(rho.grid_ptr(), std::move(keep), eps_rel, mass);
}

double edge_density_ratio(const RealField& rho) {
  const Grid& g = rho.grid();
  double peak = 0.0;
  double edge = 0.0;
  for (std::size_t i = 0; i < g.n1(); ++i) {
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const double r = rho(i, j);
      peak = std::max(peak, r);
      if (i == 0 || j == 0 || i + 1 == g.n1() || j + 1 == g.n2()) edge = std::max(edge, r);
    }
  }
  return peak > 0.0 ? edge / peak : 1.0;
}

}  // namespace weakcorr
