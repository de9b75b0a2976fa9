"""Modal/grid field transforms, evolution, and the quadratic functionals."""

import math

import numpy as np
import pytest

from grushin import (
    DirichletGrid,
    ModalField,
    analyze,
    assemble_operator,
    build_basis,
    coercivity_gap,
    energy_grushin,
    evolve,
    grid_csv_rows,
    mass,
    modal_csv_rows,
    random_field,
    synthesize,
)

GRID = DirichletGrid(300)
BASIS = build_basis(3, 40.0, GRID)
TWO_PI = 2.0 * math.pi


def _rand(seed):
    return random_field(BASIS, np.random.default_rng(seed))


def test_basis_validation():
    with pytest.raises(ValueError, match="n_max"):
        build_basis(0, 40.0, GRID)
    with pytest.raises(ValueError, match="empty basis"):
        build_basis(1, 2.0, GRID)


def test_basis_ground_level_is_laplacian_ground():
    # the lowest level overall sits in mode 0 at (pi/2)^2
    assert BASIS.levels(0)[0] == pytest.approx(math.pi**2 / 4, abs=1e-8)


def test_basis_membership_threshold():
    # lambda^2_{0,1} ~ 2.5967 is the only level of |n| = 1 below 3
    b = build_basis(1, 3.0, GRID)
    assert set(b.ns) == {-1, 0, 1}
    assert b.levels(1).size == 1
    assert b.levels(-1).size == 1


def test_basis_symmetric_modes_share_levels():
    assert np.array_equal(BASIS.levels(-3), BASIS.levels(3))
    assert sorted(BASIS.ns) == list(range(-3, 4))


def test_roundtrip_analyze_synthesize():
    u = _rand(11)
    v = analyze(synthesize(u))
    assert np.max(np.abs(v.coefficients - u.coefficients)) < 1e-10


def test_synthesize_single_slot():
    coeffs = np.zeros(BASIS.size, dtype=np.complex128)
    slot = BASIS.slices[0].start  # (n, m) = (0, 0)
    coeffs[slot] = 1.0
    g = synthesize(ModalField(basis=BASIS, coefficients=coeffs))
    row = list(g.ns).index(0)
    assert np.allclose(g.values[row].real, BASIS.vectors(0)[:, 0])
    others = np.delete(np.arange(len(g.ns)), row)
    assert np.max(np.abs(g.values[others])) == 0.0


def test_analyze_drops_profile_outside_basis():
    """A profile orthogonal to the retained eigenvectors analyzes to zero."""
    vecs = BASIS.vectors(2)
    rng = np.random.default_rng(3)
    profile = rng.standard_normal(GRID.m)
    profile -= vecs @ (GRID.spacing * (vecs.T @ profile))
    g = synthesize(_rand(4))
    row = list(g.ns).index(2)
    values = g.values.copy()
    values[row] = profile
    coeffs = analyze(
        type(g)(basis=BASIS, ns=g.ns, values=values)
    ).coefficients
    assert np.max(np.abs(coeffs[BASIS.slices[2]])) < 1e-10


def test_analyze_rejects_foreign_basis():
    g = synthesize(_rand(5))
    other = build_basis(3, 40.0, GRID)
    with pytest.raises(ValueError, match="different basis"):
        analyze(g, basis=other)


def test_evolve_identity_at_zero_time():
    u = _rand(6)
    assert np.array_equal(evolve(u, 0.0).coefficients, u.coefficients)


def test_evolve_group_property():
    u = _rand(7)
    a = evolve(evolve(u, 0.4), 0.35)
    b = evolve(u, 0.75)
    assert np.max(np.abs(a.coefficients - b.coefficients)) < 1e-12


def test_evolve_rejects_nonfinite_time():
    with pytest.raises(ValueError, match="finite"):
        evolve(_rand(8), math.inf)


def test_single_mode_phase():
    # the ground slot rotates by exp(-i lambda^2 t), lambda^2 ~ pi^2/4
    coeffs = np.zeros(BASIS.size, dtype=np.complex128)
    coeffs[BASIS.slices[0].start] = 1.0
    u = ModalField(basis=BASIS, coefficients=coeffs)
    v = evolve(u, 1.0)
    expected = np.exp(-1j * math.pi**2 / 4)
    assert abs(v.coefficients[BASIS.slices[0].start] - expected) < 1e-8


def test_mass_and_energy_of_unit_slot():
    coeffs = np.zeros(BASIS.size, dtype=np.complex128)
    slot = BASIS.slices[2].start
    coeffs[slot] = 1.0
    u = ModalField(basis=BASIS, coefficients=coeffs)
    assert mass(u) == pytest.approx(TWO_PI, rel=1e-12)
    assert energy_grushin(u) == pytest.approx(
        TWO_PI * BASIS.lambda_sq[slot], rel=1e-12
    )


def test_mass_parseval_against_grid_sum():
    u = _rand(9)
    g = synthesize(u)
    grid_mass = TWO_PI * GRID.spacing * float(np.sum(np.abs(g.values) ** 2))
    assert grid_mass == pytest.approx(mass(u), rel=1e-10)


def test_mass_invariant_under_evolution():
    u = _rand(10)
    for t in (0.3, 7.0, 150.0):
        assert mass(evolve(u, t)) == pytest.approx(mass(u), rel=1e-12)


def test_energy_against_difference_quotient():
    """Modal energy must match the quadratic form of the FD operator.

    The form is evaluated with the assembled tridiagonal matrix, so the two
    sides share only the eigenvector basis; eigenvalues enter once as modal
    multipliers and once through the matrix action.  Agreement is limited by
    the Richardson correction, O(dx^2) relative.
    """
    u = _rand(12)
    g = synthesize(u)
    total = 0.0
    for row, n in enumerate(g.ns):
        op = assemble_operator(n, GRID)
        col = g.values[row]
        acted = op.diagonal * col
        acted[:-1] += op.offdiagonal * col[1:]
        acted[1:] += op.offdiagonal * col[:-1]
        total += float(np.real(np.vdot(col, acted)))
    fd_energy = TWO_PI * GRID.spacing * total
    assert fd_energy == pytest.approx(energy_grushin(u), rel=5e-4)


def test_coercivity_zero_field():
    u = ModalField(basis=BASIS, coefficients=np.zeros(BASIS.size, complex))
    assert coercivity_gap(u) == 0.0


def test_coercivity_single_slot_value():
    coeffs = np.zeros(BASIS.size, dtype=np.complex128)
    slot = BASIS.slices[3].start
    coeffs[slot] = 2.0
    u = ModalField(basis=BASIS, coefficients=coeffs)
    expected = TWO_PI * 4.0 * (BASIS.lambda_sq[slot] - 3.0)
    assert coercivity_gap(u) == pytest.approx(expected, rel=1e-12)


def test_coercivity_nonnegative_on_random_fields():
    for seed in range(20):
        assert coercivity_gap(_rand(seed)) >= -1e-8


def test_random_field_deterministic():
    a = random_field(BASIS, np.random.default_rng(42))
    b = random_field(BASIS, np.random.default_rng(42))
    assert np.array_equal(a.coefficients, b.coefficients)


def test_modal_csv_rows_order_and_values():
    u = _rand(13)
    rows = modal_csv_rows(u)
    assert len(rows) == BASIS.size
    for slot, (n, m, re, im) in enumerate(rows):
        assert n == BASIS.n_of_slot[slot]
        assert complex(re, im) == u.coefficients[slot]
    # slot index within the mode starts at zero
    assert rows[BASIS.slices[0].start][1] == 0


def test_grid_csv_rows_shape():
    g = synthesize(_rand(14))
    rows = grid_csv_rows(g)
    assert len(rows) == len(g.ns) * GRID.m
    n, ix, re, im = rows[0]
    assert n == g.ns[0] and ix == 0
    assert complex(re, im) == g.values[0, 0]
