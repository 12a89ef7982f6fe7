"""Smoke tests for the python module: one closed-form anchor per operation
family. The heavy numerical checks live in the C++ suites."""

import math

import pytest

import robinpq as r


def test_mesh_measures():
    m = r.build_interval_mesh(0.0, 1.0, 8)
    assert m.num_vertices == 9
    assert m.boundary_measure() == pytest.approx(2.0)
    sq = r.build_rectangle_mesh(2.0, 1.0, 4, 2)
    assert sq.domain_measure() == pytest.approx(2.0)
    assert sq.boundary_measure() == pytest.approx(6.0)


def test_robin_solve_closed_form():
    m = r.build_interval_mesh(0.0, 1.0, 1000)
    spec = r.ProblemSpec(m, 2.0, 2.0, 1.0, 1.0)
    sol = r.solve_robin(spec)
    assert sol.converged
    assert sol.energy.total == pytest.approx(-1.0 / 24.0 - 0.25, abs=1e-6)
    assert sol.field.values[0] == pytest.approx(0.5, abs=1e-6)


def test_four_settings_and_flux():
    m = r.build_interval_mesh(0.0, 1.0, 800)
    f = {"kind": "polynomial", "monomials": [(0, 0, -0.5), (1, 0, 1.0)]}
    neu = r.solve_neumann_normalized(r.ProblemSpec(m, 2.0, 2.0, 0.5, f))
    assert neu.energy.total == pytest.approx(-1.0 / 240.0, abs=1e-6)

    spec = r.ProblemSpec(m, 2.0, 2.0, 1.0, 1.0)
    kf = r.solve_kf(spec)
    assert kf.energy.total == pytest.approx(-1.0 / 24.0, abs=1e-6)

    dirichlet = r.solve_dirichlet(spec)
    flux = r.recover_boundary_flux(spec, dirichlet.field)
    assert flux.values[0] == pytest.approx(-0.5, abs=1e-6)
    assert r.dirichlet_expansion_constant(flux, 2.0) == pytest.approx(0.25, abs=1e-6)


def test_sweep_and_fit():
    m = r.build_interval_mesh(0.0, 1.0, 1000)
    spec = r.ProblemSpec(m, 2.0, 2.0, 1.0, 1.0)
    alphas = r.geometric_grid(10.0, 1000.0, math.sqrt(10.0))
    table = r.sweep(spec, alphas)
    assert all(not row.failed for row in table.rows)
    e_inf = r.solve_dirichlet(spec).energy.total
    fit = r.fit_power_law(table, e_inf, 1)
    assert fit.exponent == pytest.approx(-1.0, abs=0.02)
    assert fit.prefactor == pytest.approx(0.25, rel=0.05)


def test_verify_expansion():
    m = r.build_interval_mesh(0.0, 1.0, 500)
    spec = r.ProblemSpec(m, 2.0, 2.0, 1.0, 1.0)
    alphas = r.geometric_grid(10.0, 1000.0, math.sqrt(10.0))
    rep = r.verify_expansion(spec, alphas, r.VerifyRegime.DirichletLimit)
    assert rep.passed
    assert rep.predicted_constant == pytest.approx(0.25, abs=1e-3)


def test_min_g_and_oracles():
    argmin, minimum = r.min_g(2.0, -3.0, 3.0)
    b_argmin, b_minimum = r.brute_min_g(2.0, -3.0, 3.0)
    assert minimum == pytest.approx(b_minimum, abs=1e-6)
    assert argmin == pytest.approx(b_argmin, abs=1e-4)

    o = r.oracle_1d_linear(0.0, 1.0, 1.0, 1.0)
    assert o.energy_alpha == pytest.approx(-1.0 / 24.0 - 0.25)
    assert o.energy_kf == pytest.approx(-1.0 / 24.0)
    g = r.oracle_1d_general_p(0.0, 1.0, 3.0, 2.0, 1.0, 1.0)
    assert g(0.0) == pytest.approx(0.5, abs=1e-8)


def test_incompatible_source_raises():
    m = r.build_interval_mesh(0.0, 1.0, 100)
    spec = r.ProblemSpec(m, 2.0, 2.0, 0.5, 1.0)
    with pytest.raises(RuntimeError):
        r.solve_neumann_normalized(spec)
