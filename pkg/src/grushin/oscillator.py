"""Dirichlet spectrum of the per-mode oscillator L_n = -d2/dx2 + n^2 x^2 on (-1, 1).

The second derivative is discretized by the standard three-point stencil on a
uniform interior grid, giving a symmetric tridiagonal matrix.  Eigenvalues are
extracted by bisection and eigenvectors by inverse iteration (LAPACK stebz /
stein).  Reported eigenvalues are Richardson-extrapolated from the working
grid and the grid with half the spacing, which removes the leading O(spacing^2)
error and yields a defensible per-pair error estimate.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .grids import DirichletGrid

DEFAULT_M = 4000
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal discretization of L_n on a Dirichlet grid."""

    n: float
    grid: DirichletGrid
    diagonal: np.ndarray
    offdiagonal: np.ndarray


@dataclass(frozen=True)
class OscillatorEigenpair:
    """One Dirichlet eigenpair of L_n.

    lambda_sq is the Richardson-extrapolated eigenvalue, lambda_sq_err the
    two-grid residual estimate |lambda_fine - lambda_coarse| / 3, and vector
    the eigenfunction sampled on the working grid, normalized in the discrete
    inner product <f, g> = spacing * sum(f * g).
    """

    n: int
    m: int
    lambda_sq: float
    lambda_sq_err: float
    vector: np.ndarray


def assemble_operator(n: float, grid: DirichletGrid) -> TridiagonalOperator:
    """Build the finite-difference matrix of -d2/dx2 + n^2 x^2.

    The frequency is usually an integer Fourier mode, but any real value is
    accepted so the same solver serves the semiclassical sweeps.
    """
    dx = grid.spacing
    diag = 2.0 / dx**2 + float(n) ** 2 * grid.nodes**2
    off = np.full(grid.m - 1, -1.0 / dx**2)
    return TridiagonalOperator(n=n, grid=grid, diagonal=diag, offdiagonal=off)


def _solve_range(op: TridiagonalOperator, tol: float, *, index_range=None, value_range=None):
    """Eigenpairs of a tridiagonal operator by bisection + inverse iteration."""
    try:
        if index_range is not None:
            values, vectors = eigh_tridiagonal(
                op.diagonal, op.offdiagonal, select="i", select_range=index_range, tol=tol
            )
        else:
            values, vectors = eigh_tridiagonal(
                op.diagonal, op.offdiagonal, select="v", select_range=value_range, tol=tol
            )
    except LinAlgError as exc:
        raise LinAlgError(
            f"tridiagonal eigensolve failed for mode n={op.n}, grid m={op.grid.m}: {exc}"
        ) from exc
    return values, vectors


def _values_by_index(op: TridiagonalOperator, tol: float, lo: int, hi: int) -> np.ndarray:
    try:
        return eigh_tridiagonal(
            op.diagonal,
            op.offdiagonal,
            eigvals_only=True,
            select="i",
            select_range=(lo, hi),
            tol=tol,
        )
    except LinAlgError as exc:
        raise LinAlgError(
            f"tridiagonal eigensolve failed for mode n={op.n}, grid m={op.grid.m}: {exc}"
        ) from exc


def _fix_signs_and_normalize(vectors: np.ndarray, grid: DirichletGrid) -> np.ndarray:
    """Scale columns to the discrete inner product and fix their signs.

    The ground state is made strictly positive at the grid midpoint; higher
    states (which may nearly vanish there) are oriented by their largest
    component.  Both rules are deterministic, so repeated runs reproduce
    byte-identical tables.
    """
    out = vectors / np.sqrt(grid.spacing)
    mid = (grid.m - 1) // 2
    for col in range(out.shape[1]):
        v = out[:, col]
        anchor = v[mid] if col == 0 else v[np.argmax(np.abs(v))]
        if anchor < 0:
            out[:, col] = -v
    if out.shape[1] > 0 and out[mid, 0] <= 0:
        raise ValueError("ground state is not positive at the grid midpoint")
    return out


def _richardson(coarse: np.ndarray, fine: np.ndarray):
    """Eliminate the O(spacing^2) error from a (coarse, half-spacing) pair."""
    extrapolated = fine + (fine - coarse) / 3.0
    err = np.abs(fine - coarse) / 3.0
    return extrapolated, err


def eigen_lowest(n: float, grid: DirichletGrid, count: int, tol: float = DEFAULT_TOL):
    """Lowest `count` Dirichlet eigenpairs of L_n.

    Returns (lambda_sq, lambda_sq_err, vectors) where vectors has one column
    per level on the working grid and lambda_sq is Richardson-extrapolated.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if count > grid.m // 4:
        raise ValueError(
            f"count={count} exceeds m/4={grid.m // 4}; higher levels are "
            f"under-resolved on this grid"
        )
    op = assemble_operator(n, grid)
    raw, vectors = _solve_range(op, tol, index_range=(0, count - 1))
    fine = _values_by_index(assemble_operator(n, grid.refined()), tol, 0, count - 1)
    lam, err = _richardson(raw, fine)
    return lam, err, _fix_signs_and_normalize(vectors, grid)


def eigen_below(n: float, grid: DirichletGrid, lambda_max: float, tol: float = DEFAULT_TOL):
    """All Dirichlet eigenpairs of L_n with eigenvalue <= lambda_max.

    Membership is decided on the working grid; the same number of levels is
    then re-solved by index on the refined grid so Richardson pairing is
    always aligned.
    """
    if lambda_max <= 0:
        raise ValueError(f"lambda_max must be positive, got {lambda_max}")
    op = assemble_operator(n, grid)
    raw, vectors = _solve_range(op, tol, value_range=(0.0, lambda_max))
    if raw.size == 0:
        return raw, raw.copy(), np.empty((grid.m, 0))
    fine = _values_by_index(assemble_operator(n, grid.refined()), tol, 0, raw.size - 1)
    lam, err = _richardson(raw, fine)
    return lam, err, _fix_signs_and_normalize(vectors, grid)


def whole_line_levels(n: int, count: int) -> np.ndarray:
    """Eigenvalues (2j+1)|n| of the whole-line oscillator, j = 0..count-1."""
    if n == 0:
        raise ValueError("whole-line oscillator levels are undefined for n = 0")
    return (2.0 * np.arange(count) + 1.0) * abs(n)


class SpectrumTable:
    """Dirichlet eigenpairs of L_n for a set of modes n, grouped by mode.

    `coverage(n)` is the eigenvalue threshold up to which the table provably
    holds every level of mode n.
    """

    def __init__(self, grid: DirichletGrid, tol: float):
        self.grid = grid
        self.tol = tol
        self._modes: dict[int, dict] = {}

    def _add_mode(self, n, lambdas, errs, vectors, coverage):
        self._modes[n] = {
            "lambdas": lambdas,
            "errs": errs,
            "vectors": vectors,
            "coverage": float(coverage),
        }

    @property
    def n_values(self) -> list:
        return sorted(self._modes)

    def count(self, n: int) -> int:
        return self._modes[n]["lambdas"].size

    def levels(self, n: int) -> np.ndarray:
        return self._modes[n]["lambdas"]

    def errors(self, n: int) -> np.ndarray:
        return self._modes[n]["errs"]

    def vectors(self, n: int) -> np.ndarray:
        return self._modes[n]["vectors"]

    def coverage(self, n: int) -> float:
        return self._modes[n]["coverage"]

    def get(self, n: int, m: int) -> OscillatorEigenpair:
        mode = self._modes[n]
        return OscillatorEigenpair(
            n=n,
            m=m,
            lambda_sq=float(mode["lambdas"][m]),
            lambda_sq_err=float(mode["errs"][m]),
            vector=mode["vectors"][:, m],
        )

    def iter_pairs(self):
        for n in self.n_values:
            for m in range(self.count(n)):
                yield self.get(n, m)


def build_spectrum_table(
    n_values,
    grid: DirichletGrid,
    tol: float = DEFAULT_TOL,
    count: int | None = None,
    lambda_max: float | None = None,
) -> SpectrumTable:
    """Solve L_n for each requested mode and collect the results.

    Exactly one of `count` (lowest levels per mode) and `lambda_max` (all
    levels up to a threshold) must be given.  Modes n and -n share one solve
    since L_n depends on n^2 only.
    """
    if (count is None) == (lambda_max is None):
        raise ValueError("specify exactly one of count and lambda_max")
    table = SpectrumTable(grid, tol)
    solved: dict[int, tuple] = {}
    for n in sorted(set(int(v) for v in n_values)):
        key = abs(n)
        if key not in solved:
            if count is not None:
                lam, err, vec = eigen_lowest(key, grid, count, tol)
                coverage = lam[-1]
            else:
                lam, err, vec = eigen_below(key, grid, lambda_max, tol)
                coverage = lambda_max
            solved[key] = (lam, err, vec, coverage)
        lam, err, vec, coverage = solved[key]
        table._add_mode(n, lam, err, vec, coverage)
    return table


def verify_comparison(table: SpectrumTable) -> list:
    """Check lambda_sq >= (2m+1)|n| - err for every pair with n != 0.

    Returns the list of violations as (n, m, lambda_sq, bound) tuples; an
    empty list means the comparison principle holds across the table.
    """
    violations = []
    for n in table.n_values:
        if n == 0:
            continue
        lam = table.levels(n)
        err = table.errors(n)
        bounds = whole_line_levels(n, lam.size)
        bad = np.nonzero(lam < bounds - err)[0]
        for m in bad:
            violations.append((n, int(m), float(lam[m]), float(bounds[m])))
    return violations


def weyl_count(table: SpectrumTable, n: int, tau_sq: float) -> int:
    """Number of levels of mode n with eigenvalue <= tau_sq."""
    if tau_sq > table.coverage(n):
        raise ValueError(
            f"table covers mode n={n} only up to {table.coverage(n):.6g}, "
            f"cannot count below tau_sq={tau_sq:.6g}"
        )
    return int(np.count_nonzero(table.levels(n) <= tau_sq))


def verify_weyl(table: SpectrumTable, tau_sq: float) -> list:
    """Check weyl_count <= tau_sq / (2|n|) for every mode n != 0.

    Returns violations as (n, count, bound) tuples.
    """
    violations = []
    for n in table.n_values:
        if n == 0:
            continue
        cnt = weyl_count(table, n, tau_sq)
        bound = tau_sq / (2.0 * abs(n))
        if cnt > bound:
            violations.append((n, cnt, bound))
    return violations
