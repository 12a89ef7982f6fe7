#include "robinpq/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "robinpq/energy.hpp"
#include "robinpq/errors.hpp"
#include "robinpq/quadrature.hpp"

namespace robinpq {

namespace {

// 1D polynomial in x with monomial coefficients.
struct Poly {
  std::vector<double> c;  // c[k] x^k

  double operator()(double x) const {
    double s = 0;
    for (size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
  }
};

Poly poly_from_source(const SourceTerm& source) {
  Poly f;
  if (const auto* c = std::get_if<SourceConstant>(&source)) {
    f.c = {c->value};
    return f;
  }
  const auto* poly = std::get_if<SourcePolynomial>(&source);
  if (!poly) throw OracleError("1D oracle requires a constant or polynomial source");
  f.c.assign(4, 0.0);
  for (const auto& t : poly->terms) {
    if (t.ey != 0) throw OracleError("1D oracle source cannot depend on y");
    f.c[t.ex] += t.c;
  }
  return f;
}

double gauss5_integral(const std::function<double(double)>& g, double a, double b) {
  auto rule = gauss5_01();
  long double s = 0;
  for (int k = 0; k < rule.size; ++k)
    s += rule.weights[k] * g(a + (b - a) * rule.nodes[k]);
  return static_cast<double>(s) * (b - a);
}

}  // namespace

OracleSolution oracle_1d_linear(double a, double b, double alpha, double c) {
  if (!(a < b)) throw std::invalid_argument("oracle requires a < b");
  if (!(alpha > 0.0)) throw std::invalid_argument("linear oracle requires alpha > 0");
  const double L = b - a;

  // -u'' = c with the two Robin conditions: u = -c x^2/2 + B x + C.
  const double B = c * (a + b) / 2.0;
  const double C = c * L / (2.0 * alpha) - c * a * b / 2.0;
  auto u = [=](double x) { return -c * x * x / 2.0 + B * x + C; };
  auto du = [=](double x) { return -c * x + B; };

  OracleSolution sol;
  sol.method = OracleSolution::Method::ClosedForm;
  sol.evaluate = u;
  sol.flux_left = du(a);  // sigma = u' for p = 2
  sol.flux_right = du(b);
  sol.dirichlet_flux_left = c * L / 2.0;
  sol.dirichlet_flux_right = -c * L / 2.0;

  const double bulk = 0.5 * gauss5_integral([&](double x) { const double d = du(x); return d * d; }, a, b);
  const double bnd = 0.5 * alpha * (u(a) * u(a) + u(b) * u(b));
  const double src = c * gauss5_integral(u, a, b);
  sol.energy_alpha = bulk + bnd - src;
  sol.energy_dirichlet = -c * c * L * L * L / 24.0;
  if (c == 0.0) sol.energy_neumann = 0.0;

  {  // K_f: same B, constant fixed by v(a) + v(b) = 0
    const double CK = -c * a * b / 2.0;
    auto v = [=](double x) { return -c * x * x / 2.0 + B * x + CK; };
    const double kb = 0.5 * gauss5_integral([&](double x) { const double d = du(x); return d * d; }, a, b);
    const double ks = c * gauss5_integral(v, a, b);
    sol.energy_kf = kb - ks;
  }
  return sol;
}

namespace {

struct GeneralOracleState {
  double a, b, p, q, alpha, quad_tol;
  Poly f, P;  // P(x) = int_a^x f
  long evals = 0;

  double inv_p(double s) const { return sgnpow(s, 1.0 / (p - 1.0)); }

  double sigma(double A, double x) const { return A - P(x); }

  // int_a^b (A - P)^{1/(p-1)} dx
  double displacement(double A) {
    return integrate_adaptive([&](double x) { return inv_p(sigma(A, x)); }, a, b,
                              quad_tol, &evals);
  }

  // Robin mismatch: u(a) + displacement - u(b), strictly increasing in A.
  double robin_gap(double A) {
    const double ua = sgnpow(A / alpha, 1.0 / (q - 1.0));
    const double ub = sgnpow(-sigma(A, b) / alpha, 1.0 / (q - 1.0));
    return ua + displacement(A) - ub;
  }

  double bisect(const std::function<double(double)>& g, const char* what) {
    double scale = 1.0;
    for (double c : P.c) scale = std::max(scale, std::fabs(c));
    double lo = -scale, hi = scale;
    int grow = 0;
    while (g(lo) > 0.0) {
      lo *= 2.0;
      if (++grow > 120) throw OracleError(std::string("cannot bracket ") + what);
    }
    grow = 0;
    while (g(hi) < 0.0) {
      hi *= 2.0;
      if (++grow > 120) throw OracleError(std::string("cannot bracket ") + what);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::fabs(lo) + std::fabs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) >= 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }

  double bulk_energy(double A) {
    const double e = p / (p - 1.0);
    return integrate_adaptive(
               [&](double x) {
                 const double s = std::fabs(sigma(A, x));
                 return s > 0.0 ? std::pow(s, e) : 0.0;
               },
               a, b, quad_tol, &evals) /
           p;
  }

  // int f u via parts: P(b) u(b) - int P u'.
  double source_energy(double A, double ub) {
    const double tail = integrate_adaptive(
        [&](double x) { return P(x) * inv_p(sigma(A, x)); }, a, b, quad_tol, &evals);
    return P(b) * ub - tail;
  }
};

}  // namespace

OracleSolution oracle_1d_general_p(double a, double b, double p, double q,
                                   double alpha, const SourceTerm& source,
                                   double quad_tol) {
  if (!(a < b)) throw std::invalid_argument("oracle requires a < b");
  if (!(p > 1.0) || !(q > 1.0)) throw std::invalid_argument("oracle requires p > 1 and q > 1");
  if (!(alpha >= 0.0)) throw std::invalid_argument("oracle requires alpha >= 0");

  auto st = std::make_shared<GeneralOracleState>();
  st->a = a;
  st->b = b;
  st->p = p;
  st->q = q;
  st->alpha = alpha;
  st->quad_tol = quad_tol;
  st->f = poly_from_source(source);
  st->P.c.assign(st->f.c.size() + 1, 0.0);
  for (size_t k = 0; k < st->f.c.size(); ++k) st->P.c[k + 1] = st->f.c[k] / (k + 1);
  st->P.c[0] = -st->P(a);  // P(a) = 0

  OracleSolution sol;
  sol.method = OracleSolution::Method::Quadrature;
  const double mass = st->P(b);

  // Dirichlet limit solution: displacement vanishes.
  const double A_inf = st->bisect([&](double A) { return st->displacement(A); }, "the Dirichlet constant");
  sol.dirichlet_flux_left = st->sigma(A_inf, a);
  sol.dirichlet_flux_right = st->sigma(A_inf, b);
  {
    const double bulk = st->bulk_energy(A_inf);
    const double src = st->source_energy(A_inf, 0.0);
    sol.energy_dirichlet = bulk - src;
  }

  // K_f: constant-flux first integral, constant fixed by u(a) + u(b) = 0.
  {
    const double A_k = mass / 2.0;
    const double disp = st->displacement(A_k);
    const double va = -disp / 2.0;
    const double vb = va + disp;
    sol.energy_kf = st->bulk_energy(A_k) - st->source_energy(A_k, vb);
  }

  if (alpha > 0.0) {
    const double A = st->bisect([&](double A_) { return st->robin_gap(A_); }, "the Robin constant");
    const double ua = sgnpow(A / alpha, 1.0 / (q - 1.0));
    const double ub = sgnpow(-st->sigma(A, b) / alpha, 1.0 / (q - 1.0));
    sol.flux_left = st->sigma(A, a);
    sol.flux_right = st->sigma(A, b);
    const double bulk = st->bulk_energy(A);
    const double bnd = alpha / q * (std::pow(std::fabs(ua), q) + std::pow(std::fabs(ub), q));
    const double src = st->source_energy(A, ub);
    sol.energy_alpha = bulk + bnd - src;
    sol.evaluate = [st, A, ua](double x) {
      return ua + integrate_adaptive(
                      [&](double t) { return st->inv_p(st->sigma(A, t)); }, st->a, x,
                      st->quad_tol);
    };
  } else {
    double fscale = 0;
    for (double ck : st->f.c) fscale += std::fabs(ck);
    if (std::fabs(mass) > 1e-10 * (1.0 + fscale) * (b - a))
      throw OracleError("Neumann oracle requires a zero-mean source");
    // A = 0: both endpoint fluxes vanish; fix the constant by the
    // normalization |u(a)|^{q-2}u(a) + |u(b)|^{q-2}u(b) = 0.
    const double disp = st->displacement(0.0);
    const double C = st->bisect(
        [&](double c) { return sgnpow(c, q - 1.0) + sgnpow(c + disp, q - 1.0); },
        "the Neumann normalization constant");
    sol.flux_left = 0.0;
    sol.flux_right = 0.0;
    sol.energy_neumann = st->bulk_energy(0.0) - st->source_energy(0.0, C + disp);
    sol.evaluate = [st, C](double x) {
      return C + integrate_adaptive(
                     [&](double t) { return st->inv_p(st->sigma(0.0, t)); }, st->a, x,
                     st->quad_tol);
    };
  }
  sol.quadrature_evals = st->evals;
  return sol;
}

MinGResult brute_min_g(double a, double b, double q) {
  if (!(a > 0.0)) throw std::invalid_argument("brute_min_g requires a > 0");
  if (!(q > 1.0)) throw std::invalid_argument("brute_min_g requires q > 1");
  auto g = [&](double t) { return a / q * std::pow(std::fabs(t), q) - b * t; };
  const double T = 1.0 + 2.0 * std::pow(std::fabs(b) / a, 1.0 / (q - 1.0));
  double lo = -T, hi = T;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  while (hi - lo > 1e-10 * std::max(1.0, T)) {
    if (g1 <= g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - invphi * (hi - lo);
      g1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + invphi * (hi - lo);
      g2 = g(x2);
    }
  }
  MinGResult r;
  r.argmin = 0.5 * (lo + hi);
  r.minimum = g(r.argmin);
  return r;
}

double oracle_dirichlet_prefactor(const OracleSolution& sol, double q) {
  const double e = q / (q - 1.0);
  const double ga = std::fabs(sol.dirichlet_flux_left);
  const double gb = std::fabs(sol.dirichlet_flux_right);
  return (q - 1.0) / q *
         ((ga > 0 ? std::pow(ga, e) : 0.0) + (gb > 0 ? std::pow(gb, e) : 0.0));
}

}  // namespace robinpq
