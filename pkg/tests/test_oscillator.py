"""Finite-difference oscillator spectra checked against independent solvers."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal

from grushin import (
    DirichletGrid,
    assemble_operator,
    build_spectrum_table,
    eigen_below,
    eigen_lowest,
    verify_comparison,
    verify_weyl,
    weyl_count,
    whole_line_levels,
)
from grushin.asymptotics import mu_of_w

GRID = DirichletGrid(400)


def test_grid_nodes_and_spacing():
    g = DirichletGrid(19)
    assert g.spacing == pytest.approx(0.1)
    assert g.nodes[0] == pytest.approx(-0.9)
    assert g.nodes[9] == pytest.approx(0.0)
    fine = DirichletGrid(39)
    assert fine.spacing == pytest.approx(g.spacing / 2)


def test_grid_rejects_too_few_nodes():
    with pytest.raises(ValueError, match="interior nodes"):
        DirichletGrid(15)


def test_assemble_matches_hand_computed_stencil():
    # spacing 1/10: second difference gives 2/dx^2 = 200 on the diagonal
    # and -1/dx^2 = -100 off it; n = 0 adds no potential.
    op = assemble_operator(0, DirichletGrid(19))
    assert np.allclose(op.diagonal, 200.0)
    assert np.allclose(op.offdiagonal, -100.0)
    assert op.offdiagonal.shape == (18,)


def test_assemble_potential_term():
    # n^2 x^2 sampled at the nodes; the center node sits at x = 0.
    g = DirichletGrid(19)
    op = assemble_operator(2, g)
    assert op.diagonal[9] == pytest.approx(200.0)
    assert np.allclose(op.diagonal, 200.0 + 4.0 * g.nodes**2)


def test_free_laplacian_eigenvalues_closed_form():
    """n = 0 is a pure second-difference matrix with known spectrum."""
    m = 200
    g = DirichletGrid(m)
    op = assemble_operator(0, g)
    vals = eigh_tridiagonal(op.diagonal, op.offdiagonal, eigvals_only=True)
    j = np.arange(1, m + 1)
    exact = (4.0 / g.spacing**2) * np.sin(j * math.pi / (2 * (m + 1))) ** 2
    # smallest eigenvalue loses ~5 digits to the 4/dx^2 matrix scale
    assert np.max(np.abs(vals - exact) / exact) < 1e-10


def test_extrapolated_laplacian_levels():
    lam, err, _ = eigen_lowest(0, GRID, 4)
    expected = (np.arange(1, 5) * math.pi / 2.0) ** 2
    assert np.max(np.abs(lam - expected)) < 1e-6
    assert np.all(err >= 0)
    assert np.all(np.diff(lam) > 0)


def test_eigenvector_orthonormality():
    lam, _, vec = eigen_lowest(3, GRID, 5)
    gram = GRID.spacing * vec.T @ vec
    assert np.max(np.abs(gram - np.eye(5))) < 1e-12
    # ground state sign convention: positive at the midpoint
    assert vec[GRID.m // 2, 0] > 0


def test_ground_level_exceeds_mode_number():
    for n in (1, 10, 32):
        lam, _, _ = eigen_lowest(n, GRID, 1)
        assert lam[0] > n


def test_richardson_agrees_with_shooting():
    """Two unrelated discretizations of the same eigenvalue problem."""
    lam, err, _ = eigen_lowest(10, DirichletGrid(2000), 1)
    reference = 10.0 * mu_of_w(10.0)
    assert abs(lam[0] - reference) / reference < 1e-8
    assert abs(lam[0] - reference) < 10 * err[0] + 1e-9


def test_eigen_lowest_count_guard():
    with pytest.raises(ValueError, match="m/4"):
        eigen_lowest(1, DirichletGrid(40), 11)
    with pytest.raises(ValueError, match="count"):
        eigen_lowest(1, GRID, 0)


def test_eigen_below_empty_when_threshold_low():
    lam, err, vec = eigen_below(1, GRID, 1.0)
    assert lam.size == 0 and err.size == 0 and vec.shape[1] == 0


def test_whole_line_levels():
    assert np.allclose(whole_line_levels(3, 3), [3.0, 9.0, 15.0])
    assert np.allclose(whole_line_levels(1, 5), [1.0, 3.0, 5.0, 7.0, 9.0])
    assert np.allclose(whole_line_levels(-3, 3), whole_line_levels(3, 3))


def test_whole_line_rejects_zero_mode():
    with pytest.raises(ValueError, match="n = 0"):
        whole_line_levels(0, 3)


def test_spectrum_table_symmetric_in_sign():
    table = build_spectrum_table([-2, 2], GRID, count=3)
    assert np.array_equal(table.levels(-2), table.levels(2))
    assert table.coverage(-2) == table.coverage(2)


def test_spectrum_table_argument_validation():
    with pytest.raises(ValueError, match="exactly one"):
        build_spectrum_table([1], GRID, count=2, lambda_max=10.0)
    with pytest.raises(ValueError, match="exactly one"):
        build_spectrum_table([1], GRID)
    with pytest.raises(ValueError, match="lambda_max"):
        build_spectrum_table([1], GRID, lambda_max=-1.0)


def test_comparison_clean_then_planted_violation():
    table = build_spectrum_table([1, 5], GRID, count=2)
    assert verify_comparison(table) == []
    # plant a level below the whole-line floor and check it is reported
    table.levels(5)[0] = 4.9
    bad = verify_comparison(table)
    assert len(bad) == 1
    n, m, lam, floor = bad[0]
    assert (n, m) == (5, 0)
    assert lam == pytest.approx(4.9)
    assert floor == pytest.approx(5.0)


def test_comparison_skips_laplacian_mode():
    # n = 0 has no whole-line ladder; corrupt it and verify no report.
    table = build_spectrum_table([0, 1], GRID, count=2)
    table.levels(0)[0] = -1.0
    assert verify_comparison(table) == []


def test_weyl_count_against_sturm_oscillation():
    """Count eigenvalues below E by counting zeros of the E-shot solution.

    By Sturm oscillation theory the solution of -u'' + x^2 u = E u with
    u(-1) = 0, u'(-1) = 1 has exactly as many zeros inside (-1, 1) as there
    are Dirichlet eigenvalues below E.
    """
    energy = 100.0

    def rhs(x, y):
        return [y[1], (x * x - energy) * y[0]]

    sol = solve_ivp(
        rhs, (-1.0, 1.0), [0.0, 1.0], method="RK45",
        rtol=1e-10, atol=1e-12, dense_output=True,
    )
    xs = np.linspace(-1.0, 1.0, 4001)[1:-1]
    vals = sol.sol(xs)[0]
    zeros = int(np.sum(np.sign(vals[1:]) * np.sign(vals[:-1]) < 0))
    assert zeros == 6

    table = build_spectrum_table([1], GRID, lambda_max=150.0)
    assert weyl_count(table, 1, energy) == zeros


def test_weyl_count_edge_cases():
    table = build_spectrum_table([1, 8], GRID, lambda_max=80.0)
    # below the ground level nothing is counted
    assert weyl_count(table, 1, 1.0) == 0
    assert weyl_count(table, 8, 64.0) == 4
    with pytest.raises(ValueError, match="cannot count"):
        weyl_count(table, 8, 100.0)


def test_weyl_bound_with_half_integer_slack():
    """count <= tau^2/(2n) + 1/2 holds for every mode.

    The half comes from rounding the count of odd integers below tau^2/n to
    an integer; the bound without the half can fail by strictly less than
    one level (see verify_weyl reports), never by more.
    """
    tau_sq = 80.0
    table = build_spectrum_table(range(1, 13), GRID, lambda_max=tau_sq + 5)
    for n in range(1, 13):
        count = weyl_count(table, n, tau_sq)
        assert count <= tau_sq / (2 * n) + 0.5 + 1e-9


def test_verify_weyl_small_modes_clean():
    tau_sq = 30.0
    table = build_spectrum_table(range(1, 4), GRID, lambda_max=tau_sq + 5)
    assert verify_weyl(table, tau_sq) == []
