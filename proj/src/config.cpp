#include "robinpq/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "robinpq/errors.hpp"
#include "robinpq/oracles.hpp"
#include "robinpq/postprocess.hpp"

namespace robinpq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path.empty() ? msg : path + ": " + msg);
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

double get_num(const json& j, const std::string& path, const char* key,
               double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(path, std::string("missing required key '") + key + "'");
    return fallback;
  }
  if (!j[key].is_number()) fail(path + "." + key, "expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) fail(path + "." + key, "expected an integer");
  return j[key].get<int>();
}

bool get_bool(const json& j, const std::string& path, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) fail(path + "." + key, "expected a boolean");
  return j[key].get<bool>();
}

std::string get_str(const json& j, const std::string& path, const char* key,
                    const std::string& fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(path, std::string("missing required key '") + key + "'");
    return fallback;
  }
  if (!j[key].is_string()) fail(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

DomainConfig parse_domain(const json& j, const std::string& path) {
  DomainConfig d;
  const std::string kind = get_str(j, path, "kind", "", true);
  if (kind == "interval") {
    reject_unknown(j, path, {"kind", "a", "b", "n"});
    d.kind = DomainConfig::Kind::Interval;
    d.a = get_num(j, path, "a", 0.0);
    d.b = get_num(j, path, "b", 1.0);
    d.n = get_int(j, path, "n", 100);
    if (!(d.a < d.b)) fail(path, "interval requires a < b");
    if (d.n < 1) fail(path, "interval requires n >= 1");
  } else if (kind == "rectangle") {
    reject_unknown(j, path, {"kind", "lx", "ly", "nx", "ny"});
    d.kind = DomainConfig::Kind::Rectangle;
    d.lx = get_num(j, path, "lx", 1.0);
    d.ly = get_num(j, path, "ly", 1.0);
    d.nx = get_int(j, path, "nx", 16);
    d.ny = get_int(j, path, "ny", 16);
    if (!(d.lx > 0.0) || !(d.ly > 0.0)) fail(path, "rectangle requires positive side lengths");
    if (d.nx < 1 || d.ny < 1) fail(path, "rectangle requires nx, ny >= 1");
  } else if (kind == "file") {
    reject_unknown(j, path, {"kind", "path"});
    d.kind = DomainConfig::Kind::File;
    d.path = get_str(j, path, "path", "", true);
  } else {
    fail(path + ".kind", "expected 'interval', 'rectangle' or 'file'");
  }
  return d;
}

SourceTerm parse_source(const json& j, const std::string& path) {
  const std::string kind = get_str(j, path, "kind", "", true);
  if (kind == "constant") {
    reject_unknown(j, path, {"kind", "value"});
    return SourceConstant{get_num(j, path, "value", 0.0, true)};
  }
  if (kind == "polynomial") {
    reject_unknown(j, path, {"kind", "coeffs", "monomials"});
    SourcePolynomial poly;
    if (j.contains("coeffs")) {
      if (!j["coeffs"].is_array()) fail(path + ".coeffs", "expected an array");
      int k = 0;
      for (const auto& c : j["coeffs"]) {
        if (!c.is_number()) fail(path + ".coeffs", "expected numbers");
        if (k > 3) fail(path + ".coeffs", "1D polynomial degree is limited to 3");
        poly.terms.push_back({k++, 0, c.get<double>()});
      }
    } else if (j.contains("monomials")) {
      for (const auto& m : j["monomials"]) {
        if (!m.is_array() || m.size() != 3) fail(path + ".monomials", "expected [ex, ey, c] triples");
        poly.terms.push_back({m[0].get<int>(), m[1].get<int>(), m[2].get<double>()});
      }
    } else {
      fail(path, "polynomial source needs 'coeffs' or 'monomials'");
    }
    return poly;
  }
  if (kind == "nodal") {
    reject_unknown(j, path, {"kind", "values"});
    if (!j.contains("values") || !j["values"].is_array())
      fail(path, "nodal source needs a 'values' array");
    SourceNodal nodal;
    for (const auto& v : j["values"]) nodal.values.push_back(v.get<double>());
    return nodal;
  }
  fail(path + ".kind", "expected 'constant', 'polynomial' or 'nodal'");
}

SolverConfig parse_solver(const json& j, const std::string& path) {
  reject_unknown(j, path,
                 {"gradient_tol", "max_iterations", "contraction", "sufficient_decrease",
                  "exact_linear_p2", "preconditioned"});
  SolverConfig cfg;
  cfg.gradient_tol = get_num(j, path, "gradient_tol", cfg.gradient_tol);
  cfg.max_iterations = get_int(j, path, "max_iterations", static_cast<int>(cfg.max_iterations));
  cfg.contraction = get_num(j, path, "contraction", cfg.contraction);
  cfg.sufficient_decrease = get_num(j, path, "sufficient_decrease", cfg.sufficient_decrease);
  cfg.exact_linear_p2 = get_bool(j, path, "exact_linear_p2", cfg.exact_linear_p2);
  cfg.preconditioned = get_bool(j, path, "preconditioned", cfg.preconditioned);
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return cfg;
}

TaskConfig parse_task(const json& j, const std::string& path) {
  TaskConfig t;
  const std::string kind = get_str(j, path, "kind", "", true);
  const std::set<std::string> common = {"kind", "alphas", "alpha_grid", "warm_start"};
  auto parse_alphas = [&]() {
    if (j.contains("alphas") && j.contains("alpha_grid"))
      fail(path, "give either 'alphas' or 'alpha_grid', not both");
    if (j.contains("alphas")) {
      if (!j["alphas"].is_array()) fail(path + ".alphas", "expected an array");
      for (const auto& a : j["alphas"]) t.alphas.push_back(a.get<double>());
    } else if (j.contains("alpha_grid")) {
      const json& g = j["alpha_grid"];
      reject_unknown(g, path + ".alpha_grid", {"min", "max", "ratio"});
      const double lo = get_num(g, path + ".alpha_grid", "min", 0.0, true);
      const double hi = get_num(g, path + ".alpha_grid", "max", 0.0, true);
      const double ratio = get_num(g, path + ".alpha_grid", "ratio", std::pow(10.0, 0.25));
      t.alphas = geometric_grid(lo, hi, ratio);
    }
    t.warm_start = get_bool(j, path, "warm_start", true);
  };

  if (kind == "solve") {
    reject_unknown(j, path, {"kind", "setting"});
    t.kind = TaskConfig::Kind::Solve;
    const std::string s = get_str(j, path, "setting", "robin");
    if (s == "robin") t.setting = SolveSetting::Robin;
    else if (s == "dirichlet") t.setting = SolveSetting::Dirichlet;
    else if (s == "neumann") t.setting = SolveSetting::NeumannNormalized;
    else if (s == "kf") t.setting = SolveSetting::KfConstrained;
    else fail(path + ".setting", "expected 'robin', 'dirichlet', 'neumann' or 'kf'");
  } else if (kind == "sweep") {
    reject_unknown(j, path, common);
    t.kind = TaskConfig::Kind::Sweep;
    parse_alphas();
    if (t.alphas.empty()) fail(path, "sweep task needs 'alphas' or 'alpha_grid'");
  } else if (kind == "verify") {
    std::set<std::string> keys = common;
    keys.insert({"regime", "exponent_tol", "prefactor_tol", "bound_slack", "richardson_floor"});
    reject_unknown(j, path, keys);
    t.kind = TaskConfig::Kind::Verify;
    const std::string r = get_str(j, path, "regime", "", true);
    if (r == "dirichlet") t.regime = VerifyRegime::DirichletLimit;
    else if (r == "neumann_compatible") t.regime = VerifyRegime::NeumannCompatible;
    else if (r == "neumann_incompatible") t.regime = VerifyRegime::NeumannIncompatible;
    else fail(path + ".regime", "expected 'dirichlet', 'neumann_compatible' or 'neumann_incompatible'");
    parse_alphas();
    if (t.alphas.empty()) {
      t.alphas = (t.regime == VerifyRegime::DirichletLimit)
                     ? geometric_grid(10.0, 1e4, std::pow(10.0, 0.25))
                     : geometric_grid(1e-4, 1e-1, std::pow(10.0, 0.25));
    }
    t.verify.exponent_tol = get_num(j, path, "exponent_tol", t.verify.exponent_tol);
    t.verify.prefactor_tol = get_num(j, path, "prefactor_tol", t.verify.prefactor_tol);
    t.verify.bound_slack = get_num(j, path, "bound_slack", t.verify.bound_slack);
    t.verify.richardson_floor = get_bool(j, path, "richardson_floor", true);
  } else if (kind == "oracle") {
    reject_unknown(j, path, {"kind"});
    t.kind = TaskConfig::Kind::Oracle;
  } else {
    fail(path + ".kind", "expected 'solve', 'sweep', 'verify' or 'oracle'");
  }
  return t;
}

OutputConfig parse_output(const json& j, const std::string& path) {
  reject_unknown(j, path, {"directory", "formats"});
  OutputConfig out;
  out.directory = get_str(j, path, "directory", out.directory);
  if (j.contains("formats")) {
    if (!j["formats"].is_array()) fail(path + ".formats", "expected an array");
    out.csv = out.json = out.field = false;
    for (const auto& f : j["formats"]) {
      const std::string s = f.get<std::string>();
      if (s == "csv") out.csv = true;
      else if (s == "json") out.json = true;
      else if (s == "field") out.field = true;
      else fail(path + ".formats", "unknown format '" + s + "'");
    }
  }
  return out;
}

}  // namespace

RunConfig parse_config_json(const json& j) {
  const json* root = &j;
  if (j.is_object() && j.contains("config") && j.contains("version"))
    root = &j.at("config");  // a manifest from a previous run
  reject_unknown(*root, "", {"problem", "solver", "task", "output"});
  if (!root->contains("problem")) fail("", "missing required block 'problem'");
  if (!root->contains("task")) fail("", "missing required block 'task'");

  RunConfig cfg;
  const json& prob = (*root)["problem"];
  reject_unknown(prob, "problem", {"domain", "p", "q", "alpha", "source"});
  if (!prob.contains("domain")) fail("problem", "missing required key 'domain'");
  cfg.domain = parse_domain(prob["domain"], "problem.domain");
  cfg.p = get_num(prob, "problem", "p", 2.0);
  cfg.q = get_num(prob, "problem", "q", 2.0);
  cfg.alpha = get_num(prob, "problem", "alpha", 1.0);
  if (!(cfg.p > 1.0)) fail("problem.p", "p must exceed 1");
  if (!(cfg.q > 1.0)) fail("problem.q", "q must exceed 1");
  if (cfg.alpha < 0.0)
    fail("problem.alpha", "alpha must be nonnegative (the energy is unbounded below for alpha < 0)");
  if (prob.contains("source")) cfg.source = parse_source(prob["source"], "problem.source");

  if (root->contains("solver")) cfg.solver = parse_solver((*root)["solver"], "solver");
  cfg.task = parse_task((*root)["task"], "task");
  if (root->contains("output")) cfg.output = parse_output((*root)["output"], "output");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config_json(j);
}

ProblemSpec RunConfig::build_problem(int mesh_n_override) const {
  MeshPtr mesh;
  switch (domain.kind) {
    case DomainConfig::Kind::Interval: {
      const int n = mesh_n_override > 0 ? mesh_n_override : domain.n;
      mesh = share(build_interval_mesh(domain.a, domain.b, n));
      break;
    }
    case DomainConfig::Kind::Rectangle: {
      const int nx = mesh_n_override > 0 ? mesh_n_override : domain.nx;
      const int ny = mesh_n_override > 0 ? mesh_n_override : domain.ny;
      mesh = share(build_rectangle_mesh(domain.lx, domain.ly, nx, ny));
      break;
    }
    case DomainConfig::Kind::File:
      mesh = share(import_mesh(domain.path));
      break;
  }
  ProblemSpec spec{mesh, p, q, alpha, source};
  spec.validate();
  return spec;
}

json RunConfig::to_json() const {
  json j;
  json& dom = j["problem"]["domain"];
  switch (domain.kind) {
    case DomainConfig::Kind::Interval:
      dom = {{"kind", "interval"}, {"a", domain.a}, {"b", domain.b}, {"n", domain.n}};
      break;
    case DomainConfig::Kind::Rectangle:
      dom = {{"kind", "rectangle"}, {"lx", domain.lx}, {"ly", domain.ly},
             {"nx", domain.nx}, {"ny", domain.ny}};
      break;
    case DomainConfig::Kind::File:
      dom = {{"kind", "file"}, {"path", domain.path}};
      break;
  }
  j["problem"]["p"] = p;
  j["problem"]["q"] = q;
  j["problem"]["alpha"] = alpha;
  json& src = j["problem"]["source"];
  if (const auto* c = std::get_if<SourceConstant>(&source)) {
    src = {{"kind", "constant"}, {"value", c->value}};
  } else if (const auto* poly = std::get_if<SourcePolynomial>(&source)) {
    src["kind"] = "polynomial";
    json terms = json::array();
    for (const auto& t : poly->terms) terms.push_back({t.ex, t.ey, t.c});
    src["monomials"] = terms;
  } else {
    src = {{"kind", "nodal"}, {"values", std::get<SourceNodal>(source).values}};
  }
  j["solver"] = {{"gradient_tol", solver.gradient_tol},
                 {"max_iterations", solver.max_iterations},
                 {"contraction", solver.contraction},
                 {"sufficient_decrease", solver.sufficient_decrease},
                 {"exact_linear_p2", solver.exact_linear_p2},
                 {"preconditioned", solver.preconditioned}};
  json& task_j = j["task"];
  switch (task.kind) {
    case TaskConfig::Kind::Solve: {
      task_j["kind"] = "solve";
      const char* names[] = {"robin", "dirichlet", "neumann", "kf"};
      task_j["setting"] = names[static_cast<int>(task.setting)];
      break;
    }
    case TaskConfig::Kind::Sweep:
      task_j["kind"] = "sweep";
      task_j["alphas"] = task.alphas;
      task_j["warm_start"] = task.warm_start;
      break;
    case TaskConfig::Kind::Verify: {
      task_j["kind"] = "verify";
      const char* names[] = {"dirichlet", "neumann_compatible", "neumann_incompatible"};
      task_j["regime"] = names[static_cast<int>(task.regime)];
      task_j["alphas"] = task.alphas;
      task_j["warm_start"] = task.warm_start;
      task_j["exponent_tol"] = task.verify.exponent_tol;
      task_j["prefactor_tol"] = task.verify.prefactor_tol;
      task_j["bound_slack"] = task.verify.bound_slack;
      task_j["richardson_floor"] = task.verify.richardson_floor;
      break;
    }
    case TaskConfig::Kind::Oracle:
      task_j["kind"] = "oracle";
      break;
  }
  json formats = json::array();
  if (output.csv) formats.push_back("csv");
  if (output.json) formats.push_back("json");
  if (output.field) formats.push_back("field");
  j["output"] = {{"directory", output.directory}, {"formats", formats}};
  return j;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

void write_field_file(const std::filesystem::path& path, const DiscreteField& u) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_mesh(*u.mesh, out);
  out << "values " << u.values.size() << "\n";
  char buf[40];
  for (double v : u.values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

json report_json(const VerificationReport& rep) {
  json j;
  const char* names[] = {"dirichlet", "neumann_compatible", "neumann_incompatible"};
  j["regime"] = names[static_cast<int>(rep.regime)];
  j["reference_energy"] = rep.reference_energy;
  if (rep.regime == VerifyRegime::NeumannIncompatible) j["kf"] = rep.kf;
  j["predicted_exponent"] = rep.predicted_exponent;
  j["fitted_exponent"] = rep.fitted_exponent;
  j["predicted_constant"] = rep.predicted_constant;
  j["fitted_constant"] = rep.fitted_constant;
  j["exponent_tol"] = rep.exponent_tol;
  j["prefactor_tol"] = rep.prefactor_tol;
  j["r_squared"] = rep.r_squared;
  j["exponent_ok"] = rep.exponent_ok;
  j["prefactor_ok"] = rep.prefactor_ok;
  j["bounds_ok"] = rep.bounds_ok;
  j["pass"] = rep.pass;
  json checks = json::array();
  for (const auto& bc : rep.bound_checks)
    checks.push_back({{"name", bc.name}, {"ok", bc.ok}, {"worst_violation", bc.worst_violation}});
  j["bound_checks"] = checks;
  j["fingerprint"] = rep.table.fingerprint;
  return j;
}

}  // namespace

int run(const RunConfig& cfg, const RunOptions& opts) {
  RunConfig resolved = cfg;
  if (!opts.out_override.empty()) resolved.output.directory = opts.out_override;
  if (opts.mesh_n > 0) {
    if (resolved.domain.kind == DomainConfig::Kind::Interval) resolved.domain.n = opts.mesh_n;
    if (resolved.domain.kind == DomainConfig::Kind::Rectangle)
      resolved.domain.nx = resolved.domain.ny = opts.mesh_n;
  }

  const std::filesystem::path dir(resolved.output.directory);
  std::filesystem::create_directories(dir);

  ProblemSpec spec = resolved.build_problem();
  json manifest;
  manifest["tool"] = "robinpq";
  manifest["version"] = kVersion;
  manifest["config"] = resolved.to_json();
  json outputs = json::array();
  int status = 0;

  switch (resolved.task.kind) {
    case TaskConfig::Kind::Solve: {
      Solution sol;
      switch (resolved.task.setting) {
        case SolveSetting::Robin: sol = solve_robin(spec, resolved.solver); break;
        case SolveSetting::Dirichlet: sol = solve_dirichlet(spec, resolved.solver); break;
        case SolveSetting::NeumannNormalized:
          sol = solve_neumann_normalized(spec, resolved.solver);
          break;
        case SolveSetting::KfConstrained: sol = solve_kf(spec, resolved.solver); break;
      }
      if (sol.status != SolveStatus::Converged)
        throw SolverError("solve did not converge: " + sol.diagnostic);
      if (resolved.output.field) {
        write_field_file(dir / "solution.field", sol.field);
        outputs.push_back("solution.field");
      }
      manifest["result"] = {{"energy_total", sol.energy.total},
                            {"energy_bulk", sol.energy.bulk},
                            {"energy_boundary", sol.energy.boundary},
                            {"energy_source", sol.energy.source},
                            {"iterations", sol.iterations},
                            {"residual_norm", sol.residual_norm}};
      break;
    }
    case TaskConfig::Kind::Sweep: {
      SweepTable table = sweep(spec, resolved.task.alphas, resolved.solver,
                               resolved.task.warm_start, opts.threads);
      if (resolved.output.csv) {
        std::ostringstream os;
        write_sweep_csv(table, os);
        write_text(dir / "sweep.csv", os.str());
        outputs.push_back("sweep.csv");
      }
      long failed = 0;
      for (const auto& row : table.rows) failed += row.failed ? 1 : 0;
      manifest["result"] = {{"rows", table.rows.size()}, {"failed_rows", failed}};
      break;
    }
    case TaskConfig::Kind::Verify: {
      VerificationReport rep = verify_expansion(spec, resolved.task.alphas, resolved.solver,
                                                resolved.task.regime, resolved.task.verify);
      if (resolved.output.json) {
        write_text(dir / "report.json", report_json(rep).dump(2) + "\n");
        outputs.push_back("report.json");
      }
      if (resolved.output.csv) {
        std::ostringstream os;
        write_sweep_csv(rep.table, os);
        write_text(dir / "sweep.csv", os.str());
        outputs.push_back("sweep.csv");
      }
      manifest["result"] = {{"pass", rep.pass}};
      status = rep.pass ? 0 : 2;
      break;
    }
    case TaskConfig::Kind::Oracle: {
      if (spec.mesh->dimension != 1)
        throw ConfigError("the oracle task is defined for interval domains only");
      double ax = spec.mesh->vertices.front().x, bx = ax;
      for (const Vec2& v : spec.mesh->vertices) {
        ax = std::min(ax, v.x);
        bx = std::max(bx, v.x);
      }
      const MeshProvenance pv{MeshFamily::Interval, ax, bx, 0, 0, 0, 0, 0};
      json j;
      const bool linear = spec.p == 2.0 && spec.q == 2.0 &&
                          std::holds_alternative<SourceConstant>(spec.source) &&
                          spec.alpha > 0.0;
      if (linear) {
        OracleSolution o = oracle_1d_linear(pv.a, pv.b, spec.alpha,
                                            std::get<SourceConstant>(spec.source).value);
        j["method"] = "closed_form";
        j["energy_alpha"] = *o.energy_alpha;
        j["energy_dirichlet"] = *o.energy_dirichlet;
        j["energy_kf"] = *o.energy_kf;
        if (o.energy_neumann) j["energy_neumann"] = *o.energy_neumann;
      } else {
        OracleSolution o =
            oracle_1d_general_p(pv.a, pv.b, spec.p, spec.q, spec.alpha, spec.source);
        j["method"] = "quadrature";
        if (o.energy_alpha) j["energy_alpha"] = *o.energy_alpha;
        j["energy_dirichlet"] = *o.energy_dirichlet;
        j["energy_kf"] = *o.energy_kf;
        if (o.energy_neumann) j["energy_neumann"] = *o.energy_neumann;
        j["quadrature_evals"] = o.quadrature_evals;
      }
      write_text(dir / "report.json", j.dump(2) + "\n");
      outputs.push_back("report.json");
      break;
    }
  }

  manifest["outputs"] = outputs;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return status;
}

}  // namespace robinpq
