#include "robinpq/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include "robinpq/errors.hpp"
#include "robinpq/linalg.hpp"

namespace robinpq {

void SolverConfig::validate() const {
  if (!(gradient_tol > 0.0)) throw std::invalid_argument("gradient tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max iterations must be at least 1");
  if (!(contraction > 0.0 && contraction < 1.0))
    throw std::invalid_argument("line-search contraction must lie in (0,1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
    throw std::invalid_argument("sufficient-decrease constant must lie in (0,1)");
}

namespace {

double linf(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

// One solve's immutable context.
struct Workspace {
  ProblemSpec objective;  // alpha replaced per setting
  LoadVector load;
  double tol = 0;
  SolveSetting setting;

  // constraint data
  std::vector<char> free_mask;          // dofs the descent may move
  std::vector<double> boundary_w;       // lumped boundary weights (Kf)
  double boundary_w_sum = 0;

  std::optional<BandedCholesky> metric;           // on reduced dofs
  std::optional<ReducedSystem> reduced;
};

// Gradient of the setting's objective, restricted to the feasible directions.
std::vector<double> projected_gradient(const Workspace& ws, const DiscreteField& u) {
  std::vector<double> g = residual(ws.objective, ws.load, u);
  switch (ws.setting) {
    case SolveSetting::Robin:
      break;
    case SolveSetting::Dirichlet:
    case SolveSetting::NeumannNormalized:
      for (size_t i = 0; i < g.size(); ++i)
        if (!ws.free_mask[i]) g[i] = 0.0;
      break;
    case SolveSetting::KfConstrained: {
      // reduced gradient on {w.v = 0}: g - (sum g / sum w) w
      long double gs = 0;
      for (double v : g) gs += v;
      const double lambda = static_cast<double>(gs) / ws.boundary_w_sum;
      for (size_t i = 0; i < g.size(); ++i) g[i] -= lambda * ws.boundary_w[i];
      break;
    }
  }
  return g;
}

// Map the projected gradient through the metric; falls back to the gradient
// itself when unpreconditioned.
std::vector<double> descent_direction(const Workspace& ws, const std::vector<double>& g) {
  if (!ws.metric) return g;
  if (!ws.reduced) return ws.metric->solve(g);
  const auto& rs = *ws.reduced;
  std::vector<double> gr(rs.full_of_reduced.size());
  for (size_t k = 0; k < rs.full_of_reduced.size(); ++k) gr[k] = g[rs.full_of_reduced[k]];
  ws.metric->solve_in_place(gr);
  std::vector<double> z(g.size(), 0.0);
  for (size_t k = 0; k < rs.full_of_reduced.size(); ++k) z[rs.full_of_reduced[k]] = gr[k];
  return z;
}

// Keep iterates on the Kf hyperplane by subtracting the boundary-mean constant.
void project_feasible(const Workspace& ws, std::vector<double>& u) {
  if (ws.setting != SolveSetting::KfConstrained) return;
  long double s = 0;
  for (size_t i = 0; i < u.size(); ++i) s += static_cast<long double>(ws.boundary_w[i]) * u[i];
  const double c = static_cast<double>(s) / ws.boundary_w_sum;
  for (double& v : u) v -= c;
}

Solution run_descent(Workspace& ws, const SolverConfig& cfg, DiscreteField u) {
  Solution sol;
  sol.setting = ws.setting;
  project_feasible(ws, u.values);

  const EnergyBreakdown eb0 = energy(ws.objective, ws.load, u);
  if (!std::isfinite(eb0.total)) throw NonfiniteEnergyError("energy is not finite at the initial field");
  long double current = eb0.total;
  if (cfg.record_energy_trace) sol.energy_trace.push_back(eb0.total);

  double t_prev = 1.0;
  long iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    std::vector<double> g = projected_gradient(ws, u);
    sol.residual_norm = linf(g);
    if (sol.residual_norm <= ws.tol) {
      sol.status = SolveStatus::Converged;
      break;
    }
    std::vector<double> z = descent_direction(ws, g);
    double slope = dot(g, z);
    if (!(slope > 0.0)) {  // metric breakdown; fall back to the raw gradient
      z = g;
      slope = dot(g, g);
    }
    // Step direction within the feasible hyperplane (z itself elsewhere);
    // the Armijo slope <g, z> is unchanged by the projection.
    std::vector<double> d = z;
    if (ws.setting == SolveSetting::KfConstrained) {
      long double wz = 0;
      for (size_t i = 0; i < z.size(); ++i)
        wz += static_cast<long double>(ws.boundary_w[i]) * z[i];
      const double c = static_cast<double>(wz) / ws.boundary_w_sum;
      for (double& v : d) v -= c;
    }

    double t = std::min(1.0, 2.0 * t_prev);
    bool accepted = false;
    double decrement = 0;
    while (t > 1e-30) {
      decrement = energy_decrement(ws.objective, ws.load, u, d, t);
      if (std::isfinite(decrement) &&
          decrement <= -cfg.sufficient_decrease * t * slope) {
        accepted = true;
        break;
      }
      t *= cfg.contraction;
    }
    if (!accepted) {
      sol.status = SolveStatus::MaxIterationsExceeded;
      sol.diagnostic = "line search stalled at the numerical floor";
      break;
    }
    for (size_t i = 0; i < u.values.size(); ++i) u.values[i] -= t * d[i];
    project_feasible(ws, u.values);
    current += decrement;
    t_prev = t;
    if (cfg.record_energy_trace) sol.energy_trace.push_back(static_cast<double>(current));
  }
  if (iter == cfg.max_iterations) {
    sol.status = SolveStatus::MaxIterationsExceeded;
    sol.diagnostic = "gradient tolerance not reached within the iteration budget";
    std::vector<double> g = projected_gradient(ws, u);
    sol.residual_norm = linf(g);
  }
  sol.iterations = iter;
  sol.field = std::move(u);
  sol.energy = energy(ws.objective, ws.load, sol.field);
  return sol;
}

DiscreteField initial_field(const ProblemSpec& spec, const DiscreteField* start) {
  if (!start) return DiscreteField::zeros(spec.mesh);
  if (static_cast<int>(start->values.size()) != spec.mesh->num_vertices())
    throw std::invalid_argument("starting field does not match the mesh");
  if (!start->finite()) throw NonfiniteEnergyError("starting field has nonfinite entries");
  return DiscreteField(spec.mesh, start->values);
}

double load_scaled_tol(const SolverConfig& cfg, const LoadVector& load) {
  return cfg.gradient_tol * std::max(1.0, linf(load.entries));
}

// One iterative-refinement pass after a direct solve of A u = rhs.
void refine_direct(const CsrMatrix& a, const BandedCholesky& chol,
                   const std::vector<double>& rhs, std::vector<double>& u) {
  std::vector<double> r = a.multiply(u);
  for (size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
  chol.solve_in_place(r);
  for (size_t i = 0; i < u.size(); ++i) u[i] += r[i];
}

// Reduced-system variant: solve on kept dofs, scatter into the full vector.
void solve_reduced_into(const ReducedSystem& rs, const BandedCholesky& chol,
                        const std::vector<double>& rhs_full, std::vector<double>& u_full,
                        bool refine) {
  std::vector<double> rhs(rs.full_of_reduced.size());
  for (size_t k = 0; k < rs.full_of_reduced.size(); ++k)
    rhs[k] = rhs_full[rs.full_of_reduced[k]];
  std::vector<double> x = chol.solve(rhs);
  if (refine) {
    std::vector<double> r = rs.matrix.multiply(x);
    for (size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    chol.solve_in_place(r);
    for (size_t i = 0; i < x.size(); ++i) x[i] += r[i];
  }
  for (size_t k = 0; k < rs.full_of_reduced.size(); ++k)
    u_full[rs.full_of_reduced[k]] = x[k];
}

// Shift u by the unique constant making \int_bnd |u+c|^{q-2}(u+c) ds vanish.
void apply_neumann_gauge(const Mesh& mesh, DiscreteField& u, double q) {
  double max_b = 0;
  for (int idx : mesh.boundary_vertices()) max_b = std::max(max_b, std::fabs(u.values[idx]));
  double lo = -(1.0 + max_b), hi = 1.0 + max_b;
  // c -> integral is continuous and strictly increasing; positive at hi,
  // negative at lo since |u + c| >= 1 with the sign of c there.
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + max_b); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (boundary_signed_power_integral(mesh, u, q, mid) >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  const double c = 0.5 * (lo + hi);
  for (double& v : u.values) v += c;
}

Solution finish(Workspace& ws, Solution sol) {
  // Recompute the breakdown so Solution.energy always matches the field.
  sol.energy = energy(ws.objective, ws.load, sol.field);
  return sol;
}

}  // namespace

Solution solve_robin(const ProblemSpec& spec, const SolverConfig& cfg,
                     const DiscreteField* start) {
  spec.validate();
  cfg.validate();
  if (!(spec.alpha > 0.0)) throw std::invalid_argument("Robin solve requires alpha > 0");
  const Mesh& mesh = *spec.mesh;

  Workspace ws{spec, assemble_source(mesh, spec.source), 0, SolveSetting::Robin, {}, {}, 0, {}, {}};
  ws.tol = load_scaled_tol(cfg, ws.load);

  const bool linear = spec.p == 2.0 && spec.q == 2.0;
  CsrMatrix system = add_scaled(assemble_stiffness(mesh), assemble_boundary_mass(mesh), spec.alpha);

  if (linear && cfg.exact_linear_p2) {
    BandedCholesky chol(system);
    std::vector<double> u = chol.solve(ws.load.entries);
    refine_direct(system, chol, ws.load.entries, u);
    Solution sol;
    sol.setting = SolveSetting::Robin;
    sol.iterations = 1;
    sol.field = DiscreteField(spec.mesh, std::move(u));
    sol.residual_norm = linf(residual(spec, ws.load, sol.field));
    sol.status = sol.residual_norm <= ws.tol ? SolveStatus::Converged
                                             : SolveStatus::MaxIterationsExceeded;
    return finish(ws, std::move(sol));
  }

  if (cfg.preconditioned) ws.metric.emplace(system);
  return finish(ws, run_descent(ws, cfg, initial_field(spec, start)));
}

Solution solve_dirichlet(const ProblemSpec& spec, const SolverConfig& cfg,
                         const DiscreteField* start) {
  spec.validate();
  cfg.validate();
  const Mesh& mesh = *spec.mesh;

  Workspace ws{spec, assemble_source(mesh, spec.source), 0, SolveSetting::Dirichlet, {}, {}, 0, {}, {}};
  ws.objective.alpha = 0.0;  // boundary values are pinned to zero
  ws.tol = load_scaled_tol(cfg, ws.load);

  auto bmask = mesh.boundary_vertex_mask();
  ws.free_mask.assign(mesh.num_vertices(), 1);
  for (int i = 0; i < mesh.num_vertices(); ++i)
    if (bmask[i]) ws.free_mask[i] = 0;

  CsrMatrix stiffness = assemble_stiffness(mesh);
  ReducedSystem rs = restrict_system(stiffness, ws.free_mask);

  if (spec.p == 2.0 && cfg.exact_linear_p2) {
    BandedCholesky chol(rs.matrix);
    std::vector<double> u(mesh.num_vertices(), 0.0);
    solve_reduced_into(rs, chol, ws.load.entries, u, true);
    Solution sol;
    sol.setting = SolveSetting::Dirichlet;
    sol.iterations = 1;
    sol.field = DiscreteField(spec.mesh, std::move(u));
    sol.residual_norm = linf(projected_gradient(ws, sol.field));
    sol.status = sol.residual_norm <= ws.tol ? SolveStatus::Converged
                                             : SolveStatus::MaxIterationsExceeded;
    return finish(ws, std::move(sol));
  }

  if (cfg.preconditioned) {
    ws.reduced = std::move(rs);
    ws.metric.emplace(ws.reduced->matrix);
  }
  DiscreteField u0 = initial_field(spec, start);
  for (int i = 0; i < mesh.num_vertices(); ++i)
    if (bmask[i]) u0.values[i] = 0.0;
  return finish(ws, run_descent(ws, cfg, std::move(u0)));
}

Solution solve_neumann_normalized(const ProblemSpec& spec, const SolverConfig& cfg,
                                  const DiscreteField* start) {
  spec.validate();
  cfg.validate();
  const Mesh& mesh = *spec.mesh;

  Workspace ws{spec, assemble_source(mesh, spec.source), 0, SolveSetting::NeumannNormalized, {}, {}, 0, {}, {}};
  ws.objective.alpha = 0.0;
  ws.tol = load_scaled_tol(cfg, ws.load);

  if (classify_regime(ws.load, default_compat_tol(mesh, ws.load)) == Regime::Incompatible)
    throw IncompatibleSourceError(
        "Neumann problem has no solution: source mean " + std::to_string(ws.load.total_mass) +
        " is nonzero");

  // Remove the constant kernel by pinning one vertex during the descent; the
  // normalization shift below restores the gauge the theory uses.
  ws.free_mask.assign(mesh.num_vertices(), 1);
  ws.free_mask[0] = 0;

  CsrMatrix stiffness = assemble_stiffness(mesh);
  ReducedSystem rs = restrict_system(stiffness, ws.free_mask);

  Solution sol;
  if (spec.p == 2.0 && cfg.exact_linear_p2) {
    BandedCholesky chol(rs.matrix);
    std::vector<double> u(mesh.num_vertices(), 0.0);
    solve_reduced_into(rs, chol, ws.load.entries, u, true);
    sol.setting = SolveSetting::NeumannNormalized;
    sol.iterations = 1;
    sol.field = DiscreteField(spec.mesh, std::move(u));
    sol.residual_norm = linf(projected_gradient(ws, sol.field));
    sol.status = sol.residual_norm <= ws.tol ? SolveStatus::Converged
                                             : SolveStatus::MaxIterationsExceeded;
  } else {
    if (cfg.preconditioned) {
      ws.reduced = std::move(rs);
      ws.metric.emplace(ws.reduced->matrix);
    }
    sol = run_descent(ws, cfg, initial_field(spec, start));
  }
  apply_neumann_gauge(mesh, sol.field, spec.q);
  return finish(ws, std::move(sol));
}

Solution solve_kf(const ProblemSpec& spec, const SolverConfig& cfg,
                  const DiscreteField* start) {
  spec.validate();
  cfg.validate();
  const Mesh& mesh = *spec.mesh;

  Workspace ws{spec, assemble_source(mesh, spec.source), 0, SolveSetting::KfConstrained, {}, {}, 0, {}, {}};
  ws.objective.alpha = 0.0;
  ws.tol = load_scaled_tol(cfg, ws.load);
  ws.boundary_w = lumped_boundary_weights(mesh);
  for (double v : ws.boundary_w) ws.boundary_w_sum += v;

  CsrMatrix stiffness = assemble_stiffness(mesh);
  std::vector<char> keep(mesh.num_vertices(), 1);
  keep[0] = 0;
  ReducedSystem rs = restrict_system(stiffness, keep);

  if (spec.p == 2.0 && cfg.exact_linear_p2) {
    // KKT multiplier is explicit: the constant boundary flux -mass/|bnd|.
    const double lambda = ws.load.total_mass / ws.boundary_w_sum;
    std::vector<double> rhs = ws.load.entries;
    for (int i = 0; i < mesh.num_vertices(); ++i) rhs[i] -= lambda * ws.boundary_w[i];
    BandedCholesky chol(rs.matrix);
    std::vector<double> u(mesh.num_vertices(), 0.0);
    solve_reduced_into(rs, chol, rhs, u, true);
    project_feasible(ws, u);
    Solution sol;
    sol.setting = SolveSetting::KfConstrained;
    sol.iterations = 1;
    sol.field = DiscreteField(spec.mesh, std::move(u));
    sol.residual_norm = linf(projected_gradient(ws, sol.field));
    sol.status = sol.residual_norm <= ws.tol ? SolveStatus::Converged
                                             : SolveStatus::MaxIterationsExceeded;
    return finish(ws, std::move(sol));
  }

  if (cfg.preconditioned) {
    ws.reduced = std::move(rs);
    ws.metric.emplace(ws.reduced->matrix);
  }
  return finish(ws, run_descent(ws, cfg, initial_field(spec, start)));
}

}  // namespace robinpq
