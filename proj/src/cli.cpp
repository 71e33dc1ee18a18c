#include "weakcorr/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "weakcorr/detector.hpp"
#include "weakcorr/errors.hpp"
#include "weakcorr/weak_values.hpp"

namespace weakcorr::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigurationError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigurationError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    const auto& v = obj.at(key);
    if constexpr (std::is_same_v<T, std::size_t>) {
      if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigurationError("");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigurationError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigurationError("");
    }
    out = v.get<T>();
  } catch (const std::exception&) {
    throw ConfigurationError(where + "." + key + " has the wrong type");
  }
}

const std::map<std::string, double StateSpec::*>& numeric_fields() {
  static const std::map<std::string, double StateSpec::*> fields = {
      {"sigma1", &StateSpec::sigma1}, {"sigma2", &StateSpec::sigma2}, {"a", &StateSpec::a},
      {"b", &StateSpec::b},           {"lambda", &StateSpec::lambda}, {"sigma", &StateSpec::sigma},
      {"c", &StateSpec::c}};
  return fields;
}

std::set<std::string> state_keys(StateKind kind) {
  switch (kind) {
    case StateKind::product_gaussian: return {"kind", "sigma1", "sigma2"};
    case StateKind::correlated_gaussian: return {"kind", "a", "b"};
    case StateKind::phase_gaussian: return {"kind", "sigma", "lambda"};
    case StateKind::general_gaussian: return {"kind", "a", "b", "lambda"};
    case StateKind::cat: return {"kind", "c", "sigma"};
    case StateKind::file: return {"kind", "path"};
  }
  return {"kind"};
}

Representation parse_representation(const std::string& s) {
  if (s == "position") return Representation::position;
  if (s == "momentum") return Representation::momentum;
  if (s == "both") return Representation::both;
  throw ConfigurationError("unknown representation '" + s + "'");
}

const char* to_string(Representation r) {
  switch (r) {
    case Representation::position: return "position";
    case Representation::momentum: return "momentum";
    case Representation::both: return "both";
  }
  return "position";
}

json state_json(const StateSpec& s) {
  json j = {{"kind", weakcorr::to_string(s.kind)}};
  for (const auto& key : state_keys(s.kind)) {
    if (key == "kind") continue;
    if (key == "path") {
      j["path"] = s.path;
    } else {
      j[key] = s.*numeric_fields().at(key);
    }
  }
  return j;
}

void dump_value(const json& v, std::string& out) {
  char buf[40];
  switch (v.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        dump_value(item, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        dump_value(v[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", d);
        out += buf;
      }
      break;
    }
    default:
      out += v.dump();
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json indicators_json(const EntanglementIndicators& ind) {
  return {{"iA_mean", ind.iA_mean}, {"iA_sup", ind.iA_sup}, {"iP_mean", ind.iP_mean}, {"iP_sup", ind.iP_sup}};
}

json verdict_json(const Verdict& v) {
  return {{"class", to_string(v.classification)},
          {"tau", v.tau},
          {"amplitude_flag", v.amplitude_flag},
          {"phase_flag", v.phase_flag},
          {"entangled", v.classification != Classification::product},
          {"above_tau",
           {{"iA_mean", v.iA_mean_above},
            {"iA_sup", v.iA_sup_above},
            {"iP_mean", v.iP_mean_above},
            {"iP_sup", v.iP_sup_above}}},
          {"is_1d_iff_applicable", v.is_1d_iff_applicable}};
}

json mask_json(const Mask& m) {
  return {{"eps_rel", m.eps_rel()},
          {"unmasked_fraction", m.unmasked_fraction()},
          {"unmasked_mass", m.unmasked_mass()}};
}

json weak_correlation_json(const WeakCorrelationField& c) {
  return {{"mean_re", c.weighted_mean.real()},
          {"mean_im", c.weighted_mean.imag()},
          {"sup_re", c.sup_re},
          {"sup_im", c.sup_im},
          {"route_residual", c.route_check.residual},
          {"exchange_residual", c.exchange_check.residual}};
}

json suite_json(const IdentityReport& r) {
  json rows = json::array();
  for (const auto& x : r.residuals) {
    rows.push_back({{"name", x.name}, {"residual", x.residual}, {"tolerance", x.tolerance}, {"pass", x.pass}});
  }
  return {{"all_pass", r.all_pass()}, {"residuals", rows}};
}

fs::path resolve(const fs::path& out_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : out_dir / path;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << text;
  if (!os) throw InputError("failed writing " + path.string());
}

void write_field_csv(const fs::path& path, const RealField& f, const Mask* mask) {
  const Grid& g = f.grid();
  std::string text = "i,j,x1,x2,value\n";
  text.reserve(g.size() * 64);
  char buf[160];
  for (std::size_t i = 0; i < g.n1(); ++i) {
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const bool keep = mask == nullptr || (*mask)(i, j);
      if (keep) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g\n", i, j, g.x1(i), g.x2(j), f(i, j));
      } else {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,\n", i, j, g.x1(i), g.x2(j));
      }
      text += buf;
    }
  }
  write_text(path, text);
}

std::vector<std::pair<std::string, StateSpec>> battery() {
  std::vector<std::pair<std::string, StateSpec>> b;
  StateSpec s;
  s.kind = StateKind::product_gaussian;
  s.sigma1 = s.sigma2 = 1.0;
  b.emplace_back("product_gaussian(1,1)", s);
  s = {};
  s.kind = StateKind::correlated_gaussian;
  s.a = 0.5;
  s.b = 0.2;
  b.emplace_back("correlated_gaussian(0.5,0.2)", s);
  s = {};
  s.kind = StateKind::phase_gaussian;
  s.sigma = 1.0;
  s.lambda = 0.3;
  b.emplace_back("phase_gaussian(1,0.3)", s);
  s = {};
  s.kind = StateKind::general_gaussian;
  s.a = 0.5;
  s.b = 0.2;
  s.lambda = 0.3;
  b.emplace_back("general_gaussian(0.5,0.2,0.3)", s);
  s = {};
  s.kind = StateKind::cat;
  s.c = 2.0;
  s.sigma = 0.5;
  b.emplace_back("cat(2,0.5)", s);
  return b;
}

}  // namespace

std::vector<std::pair<std::string, StateSpec>> battery_states() { return battery(); }

RunConfig parse_config(const json& doc, const std::string& base_dir) {
  check_keys(doc, {"grid", "physics", "state", "analysis", "outputs"}, "config");
  RunConfig cfg;
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    check_keys(g, {"n1", "n2", "x1_min", "x1_max", "x2_min", "x2_max"}, "grid");
    read(g, "n1", cfg.grid.n1, "grid");
    read(g, "n2", cfg.grid.n2, "grid");
    read(g, "x1_min", cfg.grid.x1_min, "grid");
    read(g, "x1_max", cfg.grid.x1_max, "grid");
    read(g, "x2_min", cfg.grid.x2_min, "grid");
    read(g, "x2_max", cfg.grid.x2_max, "grid");
  }
  Grid checked(cfg.grid);
  if (doc.contains("physics")) {
    const auto& p = doc.at("physics");
    check_keys(p, {"hbar", "m1", "m2"}, "physics");
    read(p, "hbar", cfg.physics.hbar, "physics");
    read(p, "m1", cfg.physics.m1, "physics");
    read(p, "m2", cfg.physics.m2, "physics");
  }
  validate(cfg.physics);

  if (!doc.contains("state")) throw ConfigurationError("config needs a state section");
  const auto& s = doc.at("state");
  if (!s.is_object() || !s.contains("kind") || !s.at("kind").is_string()) {
    throw ConfigurationError("state.kind must be a string");
  }
  cfg.state.kind = parse_state_kind(s.at("kind").get<std::string>());
  check_keys(s, state_keys(cfg.state.kind), "state");
  for (const auto& [key, member] : numeric_fields()) read(s, key.c_str(), cfg.state.*member, "state");
  if (cfg.state.kind == StateKind::file) {
    if (!s.contains("path")) throw ConfigurationError("file state needs a path");
    read(s, "path", cfg.state.path, "state");
    const fs::path p(cfg.state.path);
    if (p.is_relative()) cfg.state.path = (fs::path(base_dir) / p).string();
  }

  if (doc.contains("analysis")) {
    const auto& a = doc.at("analysis");
    check_keys(a, {"tau", "eps_rel", "scheme", "representation", "tolerance_floor"}, "analysis");
    read(a, "tau", cfg.tau, "analysis");
    read(a, "eps_rel", cfg.analysis.eps_rel, "analysis");
    read(a, "tolerance_floor", cfg.tolerance_floor, "analysis");
    std::string scheme = to_string(cfg.analysis.scheme);
    read(a, "scheme", scheme, "analysis");
    cfg.analysis.scheme = parse_scheme(scheme);
    std::string rep = to_string(cfg.representation);
    read(a, "representation", rep, "analysis");
    cfg.representation = parse_representation(rep);
  }
  if (!(cfg.tau > 0.0) || cfg.tau > 0.1) throw ConfigurationError("analysis.tau must lie in (0, 0.1]");
  if (!(cfg.analysis.eps_rel > 0.0) || cfg.analysis.eps_rel > 1e-2) {
    throw ConfigurationError("analysis.eps_rel must lie in (0, 1e-2]");
  }
  if (!(cfg.tolerance_floor >= 0.0)) throw ConfigurationError("analysis.tolerance_floor must be >= 0");

  if (doc.contains("outputs")) {
    const auto& o = doc.at("outputs");
    check_keys(o, {"report_path", "fields_dir", "sweep"}, "outputs");
    read(o, "report_path", cfg.report_path, "outputs");
    if (o.contains("fields_dir")) {
      std::string dir;
      read(o, "fields_dir", dir, "outputs");
      cfg.fields_dir = dir;
    }
    if (o.contains("sweep")) {
      const auto& w = o.at("sweep");
      check_keys(w, {"parameter", "values", "path"}, "outputs.sweep");
      SweepSpec sweep;
      read(w, "parameter", sweep.parameter, "outputs.sweep");
      read(w, "path", sweep.path, "outputs.sweep");
      if (!numeric_fields().count(sweep.parameter) || !state_keys(cfg.state.kind).count(sweep.parameter)) {
        throw ConfigurationError("sweep parameter '" + sweep.parameter + "' is not a parameter of " +
                                 weakcorr::to_string(cfg.state.kind));
      }
      if (w.contains("values")) {
        if (!w.at("values").is_array()) throw ConfigurationError("outputs.sweep.values must be an array");
        for (const auto& v : w.at("values")) {
          if (!v.is_number()) throw ConfigurationError("outputs.sweep.values must be numbers");
          sweep.values.push_back(v.get<double>());
        }
      }
      cfg.sweep = sweep;
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open config file " + path);
  json doc;
  try {
    is >> doc;
  } catch (const json::exception& e) {
    throw InputError("config file " + path + " is not valid JSON: " + e.what());
  }
  const auto base = fs::path(path).parent_path();
  return parse_config(doc, base.empty() ? "." : base.string());
}

json to_json(const RunConfig& cfg) {
  json outputs = {{"report_path", cfg.report_path}};
  if (cfg.fields_dir) outputs["fields_dir"] = *cfg.fields_dir;
  if (cfg.sweep) {
    outputs["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}, {"path", cfg.sweep->path}};
  }
  return {{"grid",
           {{"n1", cfg.grid.n1},
            {"n2", cfg.grid.n2},
            {"x1_min", cfg.grid.x1_min},
            {"x1_max", cfg.grid.x1_max},
            {"x2_min", cfg.grid.x2_min},
            {"x2_max", cfg.grid.x2_max}}},
          {"physics", {{"hbar", cfg.physics.hbar}, {"m1", cfg.physics.m1}, {"m2", cfg.physics.m2}}},
          {"state", state_json(cfg.state)},
          {"analysis",
           {{"tau", cfg.tau},
            {"eps_rel", cfg.analysis.eps_rel},
            {"scheme", weakcorr::to_string(cfg.analysis.scheme)},
            {"representation", to_string(cfg.representation)},
            {"tolerance_floor", cfg.tolerance_floor}}},
          {"outputs", outputs}};
}

std::string dump_deterministic(const json& doc) {
  std::string out;
  dump_value(doc, out);
  out += '\n';
  return out;
}

json analyze_report(const RunConfig& cfg) {
  const auto grid = make_grid(cfg.grid);
  const WaveFunction wf = make_state(cfg.state, grid, cfg.physics);
  const auto& opts = cfg.analysis;

  json report = {{"tool", {{"name", "weakcorr"}, {"version", kVersion}}}, {"config", to_json(cfg)}};
  report["state"] = {{"n1", wf.grid().n1()},
                     {"n2", wf.grid().n2()},
                     {"initial_norm", wf.initial_norm()},
                     {"edge_density_ratio", wf.edge_density_ratio()},
                     {"boundary_decay_ok", wf.boundary_decay_ok()}};
  report["warnings"] = wf.warnings();

  std::optional<Verdict> primary;
  if (cfg.representation != Representation::momentum) {
    const auto cw = weak_correlation(wf, opts);
    const auto ind = indicators(wf, cw);
    const auto verdict = classify(ind, cfg.tau);
    const auto mc = momentum_correlation(wf, opts);
    const auto ibp = integration_by_parts_check(wf, opts);
    const auto d1 = momentum_dispersion(wf, 1, opts);
    const auto d2 = momentum_dispersion(wf, 2, opts);
    report["position"] = {
        {"mask", mask_json(cw.mask)},
        {"indicators", indicators_json(ind)},
        {"verdict", verdict_json(verdict)},
        {"weak_correlation", weak_correlation_json(cw)},
        {"momentum_correlation", {{"direct", mc.direct}, {"decomposed", mc.decomposed}}},
        {"kinematics",
         {{"mean_u1u2", ibp.mean_u1u2},
          {"mean_u1v2", ibp.mean_u1v2},
          {"mean_u2v1", ibp.mean_u2v1},
          {"sigma2_p1", d1.sigma2_p},
          {"sigma2_p2", d2.sigma2_p},
          {"m2_mean_u1_sq", d1.m2_mean_u2},
          {"m2_mean_u2_sq", d2.m2_mean_u2}}}};
    primary = verdict;
  }
  if (cfg.representation != Representation::position) {
    const auto mr = momentum_representation(wf, opts);
    const auto cw = conjugate_pair_weak_correlation(mr.state, ConjugateSign::minus, opts);
    const auto ind = indicators(mr.state, cw);
    const auto verdict = classify(ind, cfg.tau);
    const auto& ps = mr.state.grid().spec();
    report["momentum"] = {{"parseval_norm", mr.parseval_norm},
                          {"window",
                           {{"p1_min", ps.x1_min}, {"p1_max", ps.x1_max}, {"p2_min", ps.x2_min}, {"p2_max", ps.x2_max}}},
                          {"mask", mask_json(cw.mask)},
                          {"indicators", indicators_json(ind)},
                          {"verdict", verdict_json(verdict)},
                          {"weak_correlation", weak_correlation_json(cw)}};
    if (!primary) primary = verdict;
  }
  report["verdict"] = to_string(primary->classification);
  report["entangled"] = primary->classification != Classification::product;
  report["identity_suite"] = suite_json(identity_suite(wf, opts, cfg.tolerance_floor));
  return report;
}

json verify_report(const RunConfig& cfg) {
  const auto grid = make_grid(cfg.grid);
  json states = json::object();
  bool all = true;
  for (const auto& [name, spec] : battery()) {
    const auto wf = make_state(spec, grid, cfg.physics);
    const auto suite = identity_suite(wf, cfg.analysis, cfg.tolerance_floor);
    all = all && suite.all_pass();
    states[name] = suite_json(suite);
  }
  return {{"tool", {{"name", "weakcorr"}, {"version", kVersion}}},
          {"config", to_json(cfg)},
          {"states", states},
          {"all_pass", all}};
}

std::string sweep_csv(const RunConfig& cfg) {
  if (!cfg.sweep || cfg.sweep->values.empty()) throw UsageError("sweep grid is empty");
  const auto grid = make_grid(cfg.grid);
  const auto member = numeric_fields().at(cfg.sweep->parameter);
  std::string text = cfg.sweep->parameter + ",iA_mean,iA_sup,iP_mean,iP_sup,verdict\n";
  for (double value : cfg.sweep->values) {
    StateSpec spec = cfg.state;
    spec.*member = value;
    const auto wf = make_state(spec, grid, cfg.physics);
    const auto ind = indicators(wf, weak_correlation(wf, cfg.analysis));
    const auto verdict = classify(ind, cfg.tau);
    text += format_double(value) + "," + format_double(ind.iA_mean) + "," + format_double(ind.iA_sup) +
            "," + format_double(ind.iP_mean) + "," + format_double(ind.iP_sup) + "," +
            to_string(verdict.classification) + "\n";
  }
  return text;
}

void write_fields(const RunConfig& cfg, const std::string& dir) {
  const auto grid = make_grid(cfg.grid);
  const WaveFunction wf = make_state(cfg.state, grid, cfg.physics);
  const auto vf = velocity_fields(wf, cfg.analysis);
  const auto vq = quantum_potential(wf, cfg.analysis);
  const auto cw = weak_correlation(wf, cfg.analysis);
  const fs::path out(dir);
  fs::create_directories(out);
  const Mask& mask = vf.mask;
  write_field_csv(out / "rho.csv", wf.rho(), nullptr);
  write_field_csv(out / "u1.csv", vf.u1, &mask);
  write_field_csv(out / "u2.csv", vf.u2, &mask);
  write_field_csv(out / "v1.csv", vf.v1, &mask);
  write_field_csv(out / "v2.csv", vf.v2, &mask);
  write_field_csv(out / "vq.csv", vq.amplitude_route.vq_total, &mask);
  write_field_csv(out / "re_cw.csv", real_part(cw.cw), &mask);
  write_field_csv(out / "im_cw.csv", imag_part(cw.cw), &mask);
  const json sidecar = {
      {"tool", {{"name", "weakcorr"}, {"version", kVersion}}},
      {"config", to_json(cfg)},
      {"columns", {"i", "j", "x1", "x2", "value"}},
      {"masked_value", "empty cell"},
      {"mask", mask_json(mask)},
      {"fields",
       {{"rho", "probability density, unmasked"},
        {"u1", "osmotic velocity of particle 1"},
        {"u2", "osmotic velocity of particle 2"},
        {"v1", "flow velocity of particle 1"},
        {"v2", "flow velocity of particle 2"},
        {"vq", "quantum potential -sum_k hbar^2/(2 m_k) d_k^2 sqrt(rho) / sqrt(rho)"},
        {"re_cw", "real part of the momentum weak correlation"},
        {"im_cw", "imaginary part of the momentum weak correlation"}}},
      {"warnings", wf.warnings()}};
  write_text(out / "fields.json", dump_deterministic(sidecar));
}

int run(int argc, char** argv) {
  CLI::App app{"Weak-value entanglement analysis of two-particle wavefunctions", "weakcorr"};
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  app.add_option("command", command, "analyze | fields | verify | sweep")
      ->required()
      ->check(CLI::IsMember({"analyze", "fields", "verify", "sweep"}));
  app.add_option("--config", config_path, "run configuration (JSON)")->required();
  app.add_option("--out", out_dir, "directory for relative output paths");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    const fs::path out(out_dir);
    if (command == "analyze") {
      const auto report = analyze_report(cfg);
      write_text(resolve(out, cfg.report_path), dump_deterministic(report));
      if (cfg.fields_dir) write_fields(cfg, resolve(out, *cfg.fields_dir).string());
      for (const auto& w : report.at("warnings")) std::cerr << "warning: " << w.get<std::string>() << "\n";
      std::cout << "verdict " << report.at("verdict").get<std::string>() << "\n";
      return 0;
    }
    if (command == "fields") {
      write_fields(cfg, resolve(out, cfg.fields_dir.value_or("fields")).string());
      return 0;
    }
    if (command == "verify") {
      const auto report = verify_report(cfg);
      write_text(resolve(out, cfg.report_path), dump_deterministic(report));
      for (const auto& [name, suite] : report.at("states").items()) {
        std::cout << name << "\n";
        for (const auto& r : suite.at("residuals")) {
          char line[160];
          std::snprintf(line, sizeof line, "  %-32s %10.3e  tol %8.1e  %s\n",
                        r.at("name").get<std::string>().c_str(), r.at("residual").get<double>(),
                        r.at("tolerance").get<double>(), r.at("pass").get<bool>() ? "ok" : "FAIL");
          std::cout << line;
        }
      }
      return report.at("all_pass").get<bool>() ? 0 : 2;
    }
    const auto text = sweep_csv(cfg);
    write_text(resolve(out, cfg.sweep->path), text);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace weakcorr::cli
