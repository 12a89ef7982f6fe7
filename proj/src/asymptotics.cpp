#include "robinpq/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include "robinpq/errors.hpp"
#include "robinpq/postprocess.hpp"

namespace robinpq {

namespace {

void check_grid(const std::vector<double>& alphas) {
  if (alphas.empty()) throw std::invalid_argument("alpha grid is empty");
  for (size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw std::invalid_argument("alpha grid entries must be positive");
    if (i > 0 && !(alphas[i] > alphas[i - 1]))
      throw std::invalid_argument("alpha grid must be strictly increasing");
  }
}

SweepRow solve_row(const ProblemSpec& spec, double alpha, const SolverConfig& cfg,
                   const DiscreteField* start, DiscreteField* out_field) {
  SweepRow row;
  row.alpha = alpha;
  ProblemSpec s = spec;
  s.alpha = alpha;
  try {
    Solution sol = solve_robin(s, cfg, start);
    if (sol.status != SolveStatus::Converged)
      throw SolverError("row did not converge: " + sol.diagnostic);
    row.energy = sol.energy.total;
    row.boundary_q = boundary_q_integral(*spec.mesh, sol.field, spec.q);
    row.iterations = sol.iterations;
    row.residual_norm = sol.residual_norm;
    if (out_field) *out_field = std::move(sol.field);
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

}  // namespace

SweepTable sweep(const ProblemSpec& spec, const std::vector<double>& alphas,
                 const SolverConfig& cfg, bool warm_start, int threads) {
  spec.validate();
  check_grid(alphas);
  SweepTable table;
  table.fingerprint = spec.fingerprint();
  table.rows.resize(alphas.size());

  if (!warm_start && threads > 1) {
    // Cold rows are independent; chunk them over a small thread pool.
    std::vector<std::thread> pool;
    const int nt = std::min<int>(threads, static_cast<int>(alphas.size()));
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t]() {
        for (size_t i = t; i < alphas.size(); i += nt)
          table.rows[i] = solve_row(spec, alphas[i], cfg, nullptr, nullptr);
      });
    for (auto& th : pool) th.join();
    return table;
  }

  DiscreteField carry;
  bool have_carry = false;
  for (size_t i = 0; i < alphas.size(); ++i) {
    DiscreteField next;
    const DiscreteField* start = (warm_start && have_carry) ? &carry : nullptr;
    table.rows[i] = solve_row(spec, alphas[i], cfg, start, &next);
    if (!table.rows[i].failed) {
      carry = std::move(next);
      have_carry = true;
    }
  }
  return table;
}

void write_sweep_csv(const SweepTable& table, std::ostream& out) {
  out << "alpha,energy,boundary_q,iters,residual\n";
  char buf[128];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%ld,%.17g\n", row.alpha,
                  row.failed ? std::nan("") : row.energy,
                  row.failed ? std::nan("") : row.boundary_q, row.iterations,
                  row.failed ? std::nan("") : row.residual_norm);
    out << buf;
  }
}

std::string check_sweep_monotone_concave(const SweepTable& table, double slack) {
  std::ostringstream os;
  const auto& r = table.rows;
  for (size_t i = 0; i + 1 < r.size(); ++i) {
    if (r[i].failed || r[i + 1].failed) continue;
    if (r[i + 1].energy < r[i].energy - slack) {
      os << "energy decreases from row " << i << " (" << r[i].energy << ") to row "
         << i + 1 << " (" << r[i + 1].energy << ")";
      return os.str();
    }
  }
  for (size_t i = 0; i + 2 < r.size(); ++i) {
    if (r[i].failed || r[i + 1].failed || r[i + 2].failed) continue;
    const double s0 = (r[i + 1].energy - r[i].energy) / (r[i + 1].alpha - r[i].alpha);
    const double s1 = (r[i + 2].energy - r[i + 1].energy) / (r[i + 2].alpha - r[i + 1].alpha);
    if (s1 > s0 + slack) {
      os << "slope increases at row " << i + 1 << ": " << s0 << " -> " << s1;
      return os.str();
    }
  }
  return {};
}

std::string check_sweep_sandwich(const SweepTable& table, double q, double slack) {
  std::ostringstream os;
  const auto& r = table.rows;
  for (size_t i = 0; i + 1 < r.size(); ++i) {
    if (r[i].failed || r[i + 1].failed) continue;
    const double da = r[i + 1].alpha - r[i].alpha;
    const double diff = r[i + 1].energy - r[i].energy;
    const double lo = da / q * r[i + 1].boundary_q;
    const double hi = da / q * r[i].boundary_q;
    if (diff < lo - slack || diff > hi + slack) {
      os << "sandwich violated between rows " << i << " and " << i + 1 << ": " << lo
         << " <= " << diff << " <= " << hi;
      return os.str();
    }
  }
  return {};
}

std::vector<double> geometric_grid(double lo, double hi, double ratio) {
  if (!(lo > 0.0) || !(hi >= lo) || !(ratio > 1.0))
    throw std::invalid_argument("geometric grid requires 0 < lo <= hi and ratio > 1");
  std::vector<double> grid;
  for (double v = lo; v <= hi * (1.0 + 1e-9); v *= ratio) grid.push_back(std::min(v, hi));
  if (grid.back() < hi * (1.0 - 1e-9)) grid.push_back(hi);
  return grid;
}

RateFit fit_power_law(const SweepTable& table, double reference_energy, int sign,
                      const std::vector<double>& error_floor) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  if (!error_floor.empty() && error_floor.size() != table.rows.size())
    throw std::invalid_argument("error floor length must match the table");

  std::vector<double> xs, ys;
  int first = -1, last = -1;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.failed) continue;
    const double gap = sign * (reference_energy - row.energy);
    if (!(gap > 0.0)) continue;
    if (!error_floor.empty() && gap < 10.0 * error_floor[i]) continue;
    xs.push_back(std::log(row.alpha));
    ys.push_back(std::log(gap));
    if (first < 0) first = static_cast<int>(i);
    last = static_cast<int>(i);
  }
  if (xs.size() < 3)
    throw EmptyWindowError("fewer than 3 usable rows for the power-law fit (" +
                           std::to_string(xs.size()) + " available)");

  const size_t n = xs.size();
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double mx = static_cast<double>(sx) / n, my = static_cast<double>(sy) / n;
  const double vxx = static_cast<double>(sxx) / n - mx * mx;
  const double vxy = static_cast<double>(sxy) / n - mx * my;
  RateFit fit;
  fit.exponent = vxy / vxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  long double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < n; ++i) {
    const double pred = my + fit.exponent * (xs[i] - mx);
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  fit.r_squared =
      ss_tot > 0 ? std::clamp(1.0 - static_cast<double>(ss_res / ss_tot), 0.0, 1.0) : 1.0;
  fit.first_row = first;
  fit.last_row = last;
  fit.used_rows = static_cast<int>(n);
  return fit;
}

DerivativeCheck check_derivative_identity(const ProblemSpec& spec, double alpha,
                                          double delta, const SolverConfig& cfg) {
  if (!(delta > 0.0) || !(alpha - delta > 0.0))
    throw std::invalid_argument("derivative check requires 0 < delta < alpha");
  ProblemSpec s = spec;

  s.alpha = alpha;
  Solution mid = solve_robin(s, cfg);
  s.alpha = alpha + delta;
  Solution hiS = solve_robin(s, cfg, &mid.field);
  s.alpha = alpha - delta;
  Solution loS = solve_robin(s, cfg, &mid.field);

  DerivativeCheck out;
  const double bq_mid = boundary_q_integral(*spec.mesh, mid.field, spec.q);
  const double bq_hi = boundary_q_integral(*spec.mesh, hiS.field, spec.q);
  out.lhs = (hiS.energy.total - loS.energy.total) / (2.0 * delta);
  out.rhs = bq_mid / spec.q;
  const double denom = std::max({std::fabs(out.lhs), std::fabs(out.rhs), 1e-300});
  out.relative_gap = std::fabs(out.lhs - out.rhs) / denom;

  const double slack = 1e-12 * (1.0 + std::fabs(mid.energy.total));
  const double diff = hiS.energy.total - mid.energy.total;
  out.sandwich_lower_ok = delta / spec.q * bq_hi <= diff + slack;
  out.sandwich_upper_ok = diff <= delta / spec.q * bq_mid + slack;
  return out;
}

namespace {

// Coarsened companion of a generated mesh, for the Richardson error floor.
MeshPtr coarse_companion(const Mesh& mesh) {
  const auto& pv = mesh.provenance;
  if (pv.family == MeshFamily::Interval && pv.n >= 2)
    return share(build_interval_mesh(pv.a, pv.b, pv.n / 2));
  if (pv.family == MeshFamily::Rectangle && pv.nx >= 2 && pv.ny >= 2)
    return share(build_rectangle_mesh(pv.lx, pv.ly, pv.nx / 2, pv.ny / 2));
  return nullptr;
}

struct GapSeries {
  std::vector<double> gaps;  // per table row, signed so positive in the regime
};

GapSeries gap_series(const SweepTable& table, double reference, int sign) {
  GapSeries g;
  for (const auto& row : table.rows)
    g.gaps.push_back(row.failed ? 0.0 : sign * (reference - row.energy));
  return g;
}

}  // namespace

VerificationReport verify_expansion(const ProblemSpec& spec,
                                    const std::vector<double>& alphas,
                                    const SolverConfig& cfg, VerifyRegime regime,
                                    const VerifyOptions& opts) {
  spec.validate();
  check_grid(alphas);
  const Mesh& mesh = *spec.mesh;
  const LoadVector load = assemble_source(mesh, spec.source);
  const Regime source_regime = classify_regime(load, default_compat_tol(mesh, load));
  const double gamma = 1.0 / (spec.q - 1.0);

  if (regime == VerifyRegime::NeumannCompatible && source_regime != Regime::Compatible)
    throw RegimeMismatchError("compatible Neumann check requested for a source with nonzero mean");
  if (regime == VerifyRegime::NeumannIncompatible && source_regime != Regime::Incompatible)
    throw RegimeMismatchError("incompatible Neumann check requested for a zero-mean source");

  VerificationReport rep;
  rep.regime = regime;
  rep.exponent_tol = opts.exponent_tol;
  rep.prefactor_tol = opts.prefactor_tol;

  rep.table = sweep(spec, alphas, cfg, true, 1);

  int sign = 1;
  if (regime == VerifyRegime::DirichletLimit) {
    Solution inf = solve_dirichlet(spec, cfg);
    rep.reference_energy = inf.energy.total;
    BoundaryFlux flux = recover_boundary_flux(spec, inf.field);
    rep.predicted_constant = dirichlet_expansion_constant(flux, spec.q);
    rep.predicted_exponent = -gamma;
    sign = 1;  // gap = E_inf - E_alpha > 0
  } else if (regime == VerifyRegime::NeumannCompatible) {
    Solution u0 = solve_neumann_normalized(spec, cfg);
    rep.reference_energy = u0.energy.total;
    rep.predicted_constant = neumann_slope(mesh, u0.field, spec.q);
    rep.predicted_exponent = 1.0;
    sign = -1;  // gap = E_alpha - E_0 > 0
  } else {
    Solution kf = solve_kf(spec, cfg);
    rep.kf = kf.energy.total;
    rep.reference_energy = 0.0;
    rep.predicted_constant = incompat_constant(spec);
    rep.predicted_exponent = -gamma;
    sign = 1;  // gap = -E_alpha > 0
  }

  // FEM error floor by Richardson comparison against a half-resolution mesh.
  std::vector<double> floor;
  if (opts.richardson_floor && !std::holds_alternative<SourceNodal>(spec.source)) {
    if (MeshPtr coarse = coarse_companion(mesh)) {
      ProblemSpec cs = spec;
      cs.mesh = coarse;
      SweepTable ct = sweep(cs, alphas, cfg, true, 1);
      double cref = 0.0;
      if (regime == VerifyRegime::DirichletLimit)
        cref = solve_dirichlet(cs, cfg).energy.total;
      else if (regime == VerifyRegime::NeumannCompatible)
        cref = solve_neumann_normalized(cs, cfg).energy.total;
      const GapSeries fine = gap_series(rep.table, rep.reference_energy, sign);
      const GapSeries crse = gap_series(ct, cref, sign);
      floor.resize(rep.table.rows.size(), 0.0);
      for (size_t i = 0; i < floor.size(); ++i) {
        if (rep.table.rows[i].failed || ct.rows[i].failed) continue;
        floor[i] = std::fabs(fine.gaps[i] - crse.gaps[i]);
      }
    }
  }

  RateFit fit = fit_power_law(rep.table, rep.reference_energy, sign, floor);
  rep.fitted_exponent = fit.exponent;
  rep.r_squared = fit.r_squared;

  if (regime == VerifyRegime::NeumannCompatible) {
    // The limiting slope is read off at the most asymptotic usable row.
    rep.fitted_constant = 0.0;
    for (size_t i = 0; i < rep.table.rows.size(); ++i) {
      const auto& row = rep.table.rows[i];
      if (row.failed) continue;
      const double gap = row.energy - rep.reference_energy;
      if (!(gap > 0.0)) continue;
      if (!floor.empty() && gap < 10.0 * floor[i]) continue;
      rep.fitted_constant = gap / row.alpha;
      break;
    }
    if (rep.fitted_constant == 0.0) rep.fitted_constant = fit.prefactor;
  } else {
    rep.fitted_constant = fit.prefactor;
  }

  rep.exponent_ok = std::fabs(rep.fitted_exponent - rep.predicted_exponent) <=
                    opts.exponent_tol * std::fabs(rep.predicted_exponent);
  rep.prefactor_ok = std::fabs(rep.fitted_constant - rep.predicted_constant) <=
                     opts.prefactor_tol * std::max(std::fabs(rep.predicted_constant), 1e-300);

  // Regime-specific two-sided bounds, checked on every non-failed row.
  auto add_check = [&](const std::string& name, double violation) {
    if (rep.bound_checks.empty() || rep.bound_checks.back().name != name)
      rep.bound_checks.push_back({name, true, 0.0});
    auto& bc = rep.bound_checks.back();
    bc.worst_violation = std::max(bc.worst_violation, violation);
    if (violation > opts.bound_slack) bc.ok = false;
  };

  if (regime == VerifyRegime::DirichletLimit) {
    for (const auto& row : rep.table.rows) {
      if (row.failed) continue;
      add_check("E_alpha <= E_inf", row.energy - rep.reference_energy);
    }
  } else if (regime == VerifyRegime::NeumannCompatible) {
    const double s0 = rep.predicted_constant;
    for (const auto& row : rep.table.rows) {
      if (row.failed) continue;
      const double slope = (row.energy - rep.reference_energy) / row.alpha;
      add_check("(1/q) bnd_q(u_alpha) <= (E_alpha - E_0)/alpha",
                row.boundary_q / spec.q - slope);
      add_check("(E_alpha - E_0)/alpha <= (1/q) bnd_q(u_0)", slope - s0);
    }
  } else {
    const double cn = rep.predicted_constant;
    const double mass = std::fabs(load.total_mass);
    const double divergence_const =
        mesh.boundary_measure() / (spec.q * std::pow(mass, spec.q));
    for (const auto& row : rep.table.rows) {
      if (row.failed) continue;
      const double scaled = std::pow(row.alpha, gamma) * row.energy;
      add_check("alpha^g E_alpha <= -C_N", scaled - (-cn));
      add_check("-C_N + alpha^g K_f <= alpha^g E_alpha",
                (-cn + std::pow(row.alpha, gamma) * rep.kf) - scaled);
      add_check("E_alpha <= |bnd|/(q |mass|^q) - alpha^{-1/q}",
                row.energy - (divergence_const - std::pow(row.alpha, -1.0 / spec.q)));
    }
  }
  rep.bounds_ok = true;
  for (const auto& bc : rep.bound_checks) rep.bounds_ok = rep.bounds_ok && bc.ok;

  rep.pass = rep.exponent_ok && rep.prefactor_ok && rep.bounds_ok;
  return rep;
}

}  // namespace robinpq
