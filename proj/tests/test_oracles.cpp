#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "robinpq/errors.hpp"
#include "robinpq/oracles.hpp"
#include "robinpq/solvers.hpp"

using namespace robinpq;

namespace {

SourcePolynomial x_minus_half() {
  SourcePolynomial p;
  p.terms = {{0, 0, -0.5}, {1, 0, 1.0}};
  return p;
}

}  // namespace

TEST_CASE("linear oracle: closed forms on the unit interval") {
  OracleSolution o = oracle_1d_linear(0.0, 1.0, 1.0, 1.0);
  CHECK(o.evaluate(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(*o.energy_alpha == doctest::Approx(-1.0 / 24.0 - 0.25).epsilon(1e-14));
  CHECK(*o.energy_dirichlet == doctest::Approx(-1.0 / 24.0).epsilon(1e-14));
  CHECK(*o.energy_kf == doctest::Approx(-1.0 / 24.0).epsilon(1e-14));

  OracleSolution z = oracle_1d_linear(0.0, 1.0, 3.0, 0.0);
  CHECK(*z.energy_alpha == 0.0);
  CHECK(z.evaluate(0.4) == 0.0);
  CHECK(*z.energy_neumann == 0.0);

  OracleSolution h = oracle_1d_linear(0.0, 1.0, 100.0, 1.0);
  CHECK(*h.energy_alpha == doctest::Approx(-1.0 / 24.0 - 1.0 / 400.0).epsilon(1e-13));
}

TEST_CASE("general oracle at p = 2 agrees with the linear oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> la(-2.0, 2.0), cs(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const double alpha = std::exp(la(rng));
    const double c = cs(rng);
    OracleSolution lin = oracle_1d_linear(0.0, 1.0, alpha, c);
    OracleSolution gen =
        oracle_1d_general_p(0.0, 1.0, 2.0, 2.0, alpha, SourceConstant{c});
    CHECK(std::fabs(*lin.energy_alpha - *gen.energy_alpha) < 1e-10);
    CHECK(std::fabs(*lin.energy_dirichlet - *gen.energy_dirichlet) < 1e-10);
    CHECK(std::fabs(*lin.energy_kf - *gen.energy_kf) < 1e-10);
  }
}

TEST_CASE("general oracle: p = 3 symmetry and the FEM cross-check") {
  OracleSolution o = oracle_1d_general_p(0.0, 1.0, 3.0, 2.0, 1.0, SourceConstant{1.0});
  // by symmetry the first integral at the left endpoint is 1/2, so u(0) = 1/2
  CHECK(o.flux_left == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(o.evaluate(0.0) == doctest::Approx(0.5).epsilon(1e-9));

  auto mesh = share(build_interval_mesh(0.0, 1.0, 1000));
  ProblemSpec spec{mesh, 3.0, 2.0, 1.0, SourceConstant{1.0}};
  Solution fem = solve_robin(spec, SolverConfig{});
  CHECK(std::fabs(fem.energy.total - *o.energy_alpha) < 1e-4);
}

TEST_CASE("general oracle: normalized Neumann solution for a zero-mean source") {
  OracleSolution o = oracle_1d_general_p(0.0, 1.0, 2.0, 2.0, 0.0, x_minus_half());
  CHECK(*o.energy_neumann == doctest::Approx(-1.0 / 240.0).epsilon(1e-10));
  CHECK(o.evaluate(0.0) == doctest::Approx(-1.0 / 24.0).epsilon(1e-9));
  CHECK(o.flux_left == 0.0);
  CHECK(o.flux_right == 0.0);

  // general p: the first integral still vanishes at both endpoints
  OracleSolution o3 = oracle_1d_general_p(0.0, 1.0, 3.0, 2.0, 0.0, x_minus_half());
  CHECK(std::isfinite(*o3.energy_neumann));

  CHECK_THROWS_AS(oracle_1d_general_p(0.0, 1.0, 2.0, 2.0, 0.0, SourceConstant{1.0}),
                  OracleError);
}

TEST_CASE("oracle satisfies the continuum derivative identity") {
  for (double p : {2.0, 3.0}) {
    const double alpha = 0.8, d = 1e-5;
    auto energy_at = [&](double a) {
      return *oracle_1d_general_p(0.0, 1.0, p, 2.0, a, SourceConstant{1.0}).energy_alpha;
    };
    OracleSolution o = oracle_1d_general_p(0.0, 1.0, p, 2.0, alpha, SourceConstant{1.0});
    const double ua = o.evaluate(0.0), ub = o.evaluate(1.0);
    const double rhs = 0.5 * (ua * ua + ub * ub);
    const double lhs = (energy_at(alpha + d) - energy_at(alpha - d)) / (2 * d);
    CHECK(std::fabs(lhs - rhs) <= 1e-6 * std::max(1.0, std::fabs(rhs)));
  }
}

TEST_CASE("oracle energies are lower bounds for conforming FEM energies") {
  SolverConfig cfg;
  for (int n : {50, 200}) {
    auto mesh = share(build_interval_mesh(0.0, 1.0, n));
    for (double p : {2.0, 3.0}) {
      ProblemSpec spec{mesh, p, 2.0, 2.0, SourceConstant{1.0}};
      Solution fem = solve_robin(spec, cfg);
      OracleSolution o = oracle_1d_general_p(0.0, 1.0, p, 2.0, 2.0, SourceConstant{1.0});
      CHECK(fem.energy.total >= *o.energy_alpha - 1e-12);
    }
  }
}

TEST_CASE("quadrature refinement stability") {
  OracleSolution coarse =
      oracle_1d_general_p(0.0, 1.0, 3.0, 2.0, 1.0, SourceConstant{1.0}, 1e-10);
  OracleSolution fine =
      oracle_1d_general_p(0.0, 1.0, 3.0, 2.0, 1.0, SourceConstant{1.0}, 1e-13);
  CHECK(std::fabs(*coarse.energy_alpha - *fine.energy_alpha) < 1e-10);
  CHECK(fine.quadrature_evals > 0);
}

TEST_CASE("oracle input validation") {
  CHECK_THROWS_AS(oracle_1d_linear(1.0, 0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_1d_linear(0.0, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_1d_general_p(0.0, 1.0, 1.0, 2.0, 1.0, SourceConstant{1.0}),
                  std::invalid_argument);
  SourceNodal nodal{{1.0, 2.0}};
  CHECK_THROWS_AS(oracle_1d_general_p(0.0, 1.0, 2.0, 2.0, 1.0, nodal), OracleError);
}

TEST_CASE("brute_min_g basics") {
  MinGResult r = brute_min_g(1.0, 0.0, 2.0);
  CHECK(std::fabs(r.argmin) < 1e-8);
  CHECK(std::fabs(r.minimum) < 1e-12);
  MinGResult r2 = brute_min_g(1.0, 1.0, 2.0);
  CHECK(r2.argmin == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r2.minimum == doctest::Approx(-0.5).epsilon(1e-9));
}
