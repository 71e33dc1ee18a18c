#include "weakcorr/state.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "weakcorr/errors.hpp"

namespace weakcorr {

namespace {

using nlohmann::json;

WaveFunction sample(const GridPtr& grid, const PhysicsParams& physics, Amplitude amplitude,
                    const std::string& label) {
  validate(physics);
  ComplexField psi(grid);
  const Grid& g = *grid;
  for (std::size_t i = 0; i < g.n1(); ++i) {
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const cplx v = amplitude(g.x1(i), g.x2(j));
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw NumericalDomainError(label + ": non-finite amplitude at (" + std::to_string(i) +
                                   "," + std::to_string(j) + ")");
      }
      psi(i, j) = v;
    }
  }
  WaveFunction wf(std::move(psi), physics, std::move(amplitude));
  wf.normalize();
  if (!wf.boundary_decay_ok()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", wf.edge_density_ratio());
    throw ConfigurationError(label + " does not decay on this grid (edge/peak density " + buf +
                             "); enlarge the domain");
  }
  return wf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::filesystem::path body_path_for(const std::filesystem::path& header) {
  auto body = header;
  body.replace_extension(".csv");
  return body;
}

}  // namespace

StateKind parse_state_kind(const std::string& name) {
  if (name == "product_gaussian") return StateKind::product_gaussian;
  if (name == "correlated_gaussian") return StateKind::correlated_gaussian;
  if (name == "phase_gaussian") return StateKind::phase_gaussian;
  if (name == "general_gaussian") return StateKind::general_gaussian;
  if (name == "cat") return StateKind::cat;
  if (name == "file") return StateKind::file;
  throw ConfigurationError("unknown state kind '" + name + "'");
}

const char* to_string(StateKind kind) {
  switch (kind) {
    case StateKind::product_gaussian: return "product_gaussian";
    case StateKind::correlated_gaussian: return "correlated_gaussian";
    case StateKind::phase_gaussian: return "phase_gaussian";
    case StateKind::general_gaussian: return "general_gaussian";
    case StateKind::cat: return "cat";
    case StateKind::file: return "file";
  }
  return "unknown";
}

WaveFunction::WaveFunction(ComplexField psi, PhysicsParams physics, Amplitude analytic)
    : psi_(std::move(psi)), physics_(physics), analytic_(std::move(analytic)) {
  refresh();
  initial_norm_ = integrate(rho_);
}

void WaveFunction::refresh() {
  rho_ = RealField(psi_.grid_ptr());
  for (std::size_t k = 0; k < psi_.size(); ++k) rho_[k] = std::norm(psi_[k]);
  edge_ratio_ = weakcorr::edge_density_ratio(rho_);
}

bool WaveFunction::boundary_decay_ok() const { return edge_ratio_ <= kBoundaryDecayLimit; }

cplx WaveFunction::analytic(double x1, double x2) const {
  if (!analytic_) throw UsageError("state has no closed-form amplitude");
  return analytic_scale_ * analytic_(x1, x2);
}

void WaveFunction::normalize() {
  const double norm = integrate(rho_);
  if (!(norm > 0.0)) throw DegenerateStateError("wavefunction has zero norm");
  const double s = 1.0 / std::sqrt(norm);
  for (auto& v : psi_.values()) v *= s;
  analytic_scale_ *= s;
  refresh();
}

WaveFunction product_gaussian(const GridPtr& grid, const PhysicsParams& physics, double sigma1,
                              double sigma2) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw ConfigurationError("product_gaussian needs sigma1, sigma2 > 0");
  }
  const double c1 = 1.0 / (4.0 * sigma1 * sigma1);
  const double c2 = 1.0 / (4.0 * sigma2 * sigma2);
  return sample(
      grid, physics,
      [c1, c2](double x1, double x2) { return cplx(std::exp(-c1 * x1 * x1 - c2 * x2 * x2), 0.0); },
      "product_gaussian");
}

WaveFunction general_gaussian(const GridPtr& grid, const PhysicsParams& physics, double a,
                              double b, double lambda) {
  if (!(a > 0.0) || !(std::abs(b) < a) || !std::isfinite(lambda)) {
    throw ConfigurationError("gaussian needs a > |b| and finite lambda");
  }
  return sample(
      grid, physics,
      [a, b, lambda](double x1, double x2) {
        const double amp = std::exp(-0.5 * (a * (x1 * x1 + x2 * x2) + 2.0 * b * x1 * x2));
        return std::polar(amp, lambda * x1 * x2);
      },
      "gaussian");
}

WaveFunction correlated_gaussian(const GridPtr& grid, const PhysicsParams& physics, double a,
                                 double b) {
  return general_gaussian(grid, physics, a, b, 0.0);
}

WaveFunction phase_gaussian(const GridPtr& grid, const PhysicsParams& physics, double sigma,
                            double lambda) {
  if (!(sigma > 0.0)) throw ConfigurationError("phase_gaussian needs sigma > 0");
  return general_gaussian(grid, physics, 1.0 / (2.0 * sigma * sigma), 0.0, lambda);
}

WaveFunction cat_state(const GridPtr& grid, const PhysicsParams& physics, double c, double sigma) {
  if (!(c > 0.0) || !(sigma > 0.0)) throw ConfigurationError("cat needs c > 0 and sigma > 0");
  const double w = 1.0 / (4.0 * sigma * sigma);
  return sample(
      grid, physics,
      [c, w](double x1, double x2) {
        auto g = [w](double x) { return std::exp(-w * x * x); };
        return cplx(g(x1 - c) * g(x2 - c) + g(x1 + c) * g(x2 + c), 0.0);
      },
      "cat");
}

WaveFunction make_state(const StateSpec& spec, const GridPtr& grid, const PhysicsParams& physics) {
  switch (spec.kind) {
    case StateKind::product_gaussian:
      return product_gaussian(grid, physics, spec.sigma1, spec.sigma2);
    case StateKind::correlated_gaussian:
      return correlated_gaussian(grid, physics, spec.a, spec.b);
    case StateKind::phase_gaussian:
      return phase_gaussian(grid, physics, spec.sigma, spec.lambda);
    case StateKind::general_gaussian:
      return general_gaussian(grid, physics, spec.a, spec.b, spec.lambda);
    case StateKind::cat:
      return cat_state(grid, physics, spec.c, spec.sigma);
    case StateKind::file:
      return load_wavefunction(spec.path);
  }
  throw ConfigurationError("unknown state kind");
}

WaveFunction with_plane_phase(const WaveFunction& wf, double k1, double k2) {
  ComplexField psi = wf.psi();
  const Grid& g = wf.grid();
  for (std::size_t i = 0; i < g.n1(); ++i) {
    for (std::size_t j = 0; j < g.n2(); ++j) psi(i, j) *= std::polar(1.0, k1 * g.x1(i) + k2 * g.x2(j));
  }
  Amplitude analytic;
  if (wf.has_analytic()) {
    analytic = [wf, k1, k2](double x1, double x2) {
      return wf.analytic(x1, x2) * std::polar(1.0, k1 * x1 + k2 * x2);
    };
  }
  WaveFunction out(std::move(psi), wf.physics(), std::move(analytic));
  for (const auto& w : wf.warnings()) out.add_warning(w);
  return out;
}

WaveFunction with_global_phase(const WaveFunction& wf, double theta) {
  ComplexField psi = wf.psi();
  const cplx z = std::polar(1.0, theta);
  for (auto& v : psi.values()) v *= z;
  Amplitude analytic;
  if (wf.has_analytic()) {
    analytic = [wf, z](double x1, double x2) { return wf.analytic(x1, x2) * z; };
  }
  WaveFunction out(std::move(psi), wf.physics(), std::move(analytic));
  for (const auto& w : wf.warnings()) out.add_warning(w);
  return out;
}

void save_wavefunction(const WaveFunction& wf, const std::string& header_path) {
  const std::filesystem::path header(header_path);
  const auto body = body_path_for(header);
  const GridSpec& s = wf.grid().spec();
  const PhysicsParams& p = wf.physics();
  json h = {{"format", "weakcorr-wavefunction"},
            {"version", 1},
            {"n1", s.n1},
            {"n2", s.n2},
            {"x1_min", s.x1_min},
            {"x1_max", s.x1_max},
            {"x2_min", s.x2_min},
            {"x2_max", s.x2_max},
            {"hbar", p.hbar},
            {"m1", p.m1},
            {"m2", p.m2},
            {"data", body.filename().string()}};
  std::ofstream hs(header);
  if (!hs) throw InputError("cannot write " + header.string());
  hs << h.dump(2) << "\n";

  std::ofstream bs(body);
  if (!bs) throw InputError("cannot write " + body.string());
  bs << "i,j,re,im\n";
  const Grid& g = wf.grid();
  for (std::size_t i = 0; i < g.n1(); ++i) {
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const cplx v = wf.psi()(i, j);
      bs << i << ',' << j << ',' << format_double(v.real()) << ',' << format_double(v.imag())
         << '\n';
    }
  }
  if (!bs) throw InputError("failed writing " + body.string());
}

WaveFunction load_wavefunction(const std::string& header_path) {
  const std::filesystem::path header(header_path);
  std::ifstream hs(header);
  if (!hs) throw InputError("cannot open state file " + header.string());
  json h;
  try {
    hs >> h;
  } catch (const json::exception& e) {
    throw InputError("malformed state header " + header.string() + ": " + e.what());
  }

  GridSpec spec;
  PhysicsParams physics;
  std::filesystem::path body;
  try {
    spec.n1 = h.at("n1").get<std::size_t>();
    spec.n2 = h.at("n2").get<std::size_t>();
    spec.x1_min = h.at("x1_min").get<double>();
    spec.x1_max = h.at("x1_max").get<double>();
    spec.x2_min = h.at("x2_min").get<double>();
    spec.x2_max = h.at("x2_max").get<double>();
    physics.hbar = h.at("hbar").get<double>();
    physics.m1 = h.at("m1").get<double>();
    physics.m2 = h.at("m2").get<double>();
    body = h.contains("data") ? header.parent_path() / h.at("data").get<std::string>()
                              : body_path_for(header);
  } catch (const json::exception& e) {
    throw InputError("state header " + header.string() + " is missing a field: " + e.what());
  }
  GridPtr grid;
  try {
    grid = make_grid(spec);
    validate(physics);
  } catch (const ConfigurationError& e) {
    throw InputError("state header " + header.string() + ": " + e.what());
  }

  std::ifstream bs(body);
  if (!bs) throw InputError("cannot open state data " + body.string());
  std::string line;
  std::getline(bs, line);
  if (line != "i,j,re,im") {
    throw InputError(body.string() + ": expected header line 'i,j,re,im'");
  }
  ComplexField psi(grid);
  std::vector<std::uint8_t> seen(grid->size(), 0);
  std::size_t line_no = 1;
  while (std::getline(bs, line)) {
    ++line_no;
    if (line.empty()) continue;
    const char* cur = line.c_str();
    char* end = nullptr;
    const unsigned long long i = std::strtoull(cur, &end, 10);
    if (end == cur || *end != ',') throw InputError(body.string() + ": bad row " + std::to_string(line_no));
    cur = end + 1;
    const unsigned long long j = std::strtoull(cur, &end, 10);
    if (end == cur || *end != ',') throw InputError(body.string() + ": bad row " + std::to_string(line_no));
    cur = end + 1;
    const double re = std::strtod(cur, &end);
    if (end == cur || *end != ',') throw InputError(body.string() + ": bad row " + std::to_string(line_no));
    cur = end + 1;
    const double im = std::strtod(cur, &end);
    if (end == cur || (*end != '\0' && *end != '\r')) {
      throw InputError(body.string() + ": bad row " + std::to_string(line_no));
    }
    const std::string where = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
    if (i >= spec.n1 || j >= spec.n2) {
      throw InputError(body.string() + ": index " + where + " outside the " +
                       std::to_string(spec.n1) + "x" + std::to_string(spec.n2) + " grid");
    }
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw InputError(body.string() + ": non-finite amplitude at index " + where);
    }
    const std::size_t k = grid->index(i, j);
    if (seen[k]) throw InputError(body.string() + ": duplicate index " + where);
    seen[k] = 1;
    psi[k] = cplx(re, im);
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) {
      throw InputError(body.string() + ": missing index (" + std::to_string(k / spec.n2) + "," +
                       std::to_string(k % spec.n2) + ")");
    }
  }

  WaveFunction wf(std::move(psi), physics);
  if (!(wf.initial_norm() > 0.0)) throw DegenerateStateError("loaded wavefunction has zero norm");
  if (std::abs(wf.initial_norm() - 1.0) > 1e-6) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "norm %.9g differs from 1; state rescaled", wf.initial_norm());
    wf.normalize();
    wf.add_warning(buf);
  }
  if (!wf.boundary_decay_ok()) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "edge/peak density %.3g exceeds %.0e; boundary effects likely",
                  wf.edge_density_ratio(), kBoundaryDecayLimit);
    wf.add_warning(buf);
  }
  return wf;
}

}  // namespace weakcorr
