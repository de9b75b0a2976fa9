"""Spectral representation of fields on (-1, 1) x T and their exact evolution.

A field u(x, y) = sum a_{m,n} phi_{m,n}(x) e^{iny} is stored by its
coefficients on a finite basis of Dirichlet oscillator eigenfunctions.  The
Schrodinger flow i du/dt + (dxx + x^2 dyy) u = 0 acts diagonally: each
coefficient rotates by exp(-i t lambda^2_{m,n}).  L^2 pairings over the torus
carry the explicit 2 pi factor from the y-integral.
"""

import math
from dataclasses import dataclass

import numpy as np

from .grids import DirichletGrid
from .oscillator import DEFAULT_TOL, build_spectrum_table

TWO_PI = 2.0 * math.pi
# lowest Dirichlet Laplacian eigenvalue on (-1,1); below this the n=0 mode
# family is empty and the basis degenerates
MIN_LAMBDA_MAX = math.pi**2 / 4.0


@dataclass(frozen=True)
class SpectralBasis:
    """Finite eigenbasis: all (m, n) with |n| <= n_max and lambda^2 <= lambda_max.

    Slots are ordered by (n, m); `slices` maps each retained mode n to its
    contiguous range in the flat coefficient layout.  Vector matrices are
    shared between n and -n (the oscillator depends on n^2 only).
    """

    grid: DirichletGrid
    n_max: int
    lambda_max: float
    ns: tuple
    slices: dict
    lambda_sq: np.ndarray
    lambda_err: np.ndarray
    n_of_slot: np.ndarray
    _vectors: dict

    @property
    def size(self) -> int:
        return self.lambda_sq.size

    def vectors(self, n: int) -> np.ndarray:
        """Eigenvector matrix of mode n, one column per retained level."""
        return self._vectors[abs(n)]

    def levels(self, n: int) -> np.ndarray:
        return self.lambda_sq[self.slices[n]]


def build_basis(
    n_max: int,
    lambda_max: float,
    grid: DirichletGrid,
    tol: float = DEFAULT_TOL,
) -> SpectralBasis:
    """Assemble the truncated eigenbasis for modes |n| <= n_max."""
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    if lambda_max <= MIN_LAMBDA_MAX:
        raise ValueError(
            f"lambda_max={lambda_max:.6g} leaves an empty basis; need > {MIN_LAMBDA_MAX:.6g}"
        )
    table = build_spectrum_table(range(n_max + 1), grid, tol, lambda_max=lambda_max)
    ns = []
    slices = {}
    lam_parts = []
    err_parts = []
    n_parts = []
    vectors = {}
    offset = 0
    for n in range(-n_max, n_max + 1):
        lam = table.levels(abs(n))
        if lam.size == 0:
            continue
        err = table.errors(abs(n))
        if np.any(lam + err < abs(n)):
            raise ValueError(f"mode n={n} has a level below |n|, spectrum is corrupt")
        ns.append(n)
        slices[n] = slice(offset, offset + lam.size)
        offset += lam.size
        lam_parts.append(lam)
        err_parts.append(err)
        n_parts.append(np.full(lam.size, n))
        vectors.setdefault(abs(n), table.vectors(abs(n)))
    return SpectralBasis(
        grid=grid,
        n_max=n_max,
        lambda_max=lambda_max,
        ns=tuple(ns),
        slices=slices,
        lambda_sq=np.concatenate(lam_parts),
        lambda_err=np.concatenate(err_parts),
        n_of_slot=np.concatenate(n_parts),
        _vectors=vectors,
    )


@dataclass(frozen=True)
class ModalField:
    """Coefficient vector over a spectral basis."""

    basis: SpectralBasis
    coefficients: np.ndarray

    def __post_init__(self):
        if self.coefficients.shape != (self.basis.size,):
            raise ValueError(
                f"coefficient vector of length {self.coefficients.shape} does not "
                f"match basis size {self.basis.size}"
            )


@dataclass(frozen=True)
class GridField:
    """Per-mode samples U_n(x_i) of a field on the Dirichlet grid."""

    basis: SpectralBasis
    ns: np.ndarray
    values: np.ndarray


def random_field(basis: SpectralBasis, rng: np.random.Generator) -> ModalField:
    """Standard complex Gaussian coefficients on every basis slot."""
    re = rng.standard_normal(basis.size)
    im = rng.standard_normal(basis.size)
    return ModalField(basis=basis, coefficients=re + 1j * im)


def evolve(u: ModalField, t: float) -> ModalField:
    """Exact Schrodinger flow: rotate each coefficient by its eigenphase."""
    if not math.isfinite(t):
        raise ValueError(f"evolution time must be finite, got {t}")
    phases = np.exp(-1j * t * u.basis.lambda_sq)
    return ModalField(basis=u.basis, coefficients=u.coefficients * phases)


def synthesize(u: ModalField) -> GridField:
    """Sum the x-eigenfunctions per mode: U_n(x_i) = sum_m a_{m,n} phi_{m,n}(x_i)."""
    basis = u.basis
    values = np.empty((len(basis.ns), basis.grid.m), dtype=np.complex128)
    for row, n in enumerate(basis.ns):
        values[row] = basis.vectors(n) @ u.coefficients[basis.slices[n]]
    return GridField(basis=basis, ns=np.array(basis.ns), values=values)


def analyze(g: GridField, basis: SpectralBasis | None = None) -> ModalField:
    """Project per-mode samples back onto the basis.

    The grid field must reference the same basis object it was synthesized
    from; passing a different basis is an error rather than a silent
    reinterpolation.
    """
    if basis is not None and basis is not g.basis:
        raise ValueError("grid field belongs to a different basis object")
    basis = g.basis
    coeffs = np.empty(basis.size, dtype=np.complex128)
    dx = basis.grid.spacing
    for row, n in enumerate(basis.ns):
        coeffs[basis.slices[n]] = dx * (basis.vectors(n).T @ g.values[row])
    return ModalField(basis=basis, coefficients=coeffs)


def modal_csv_rows(u: ModalField) -> list:
    """Serialization rows (n, m, re, im) in slot order."""
    rows = []
    for n in u.basis.ns:
        for m, a in enumerate(u.coefficients[u.basis.slices[n]]):
            rows.append((int(n), int(m), float(a.real), float(a.imag)))
    return rows


def grid_csv_rows(g: GridField) -> list:
    """Serialization rows (n, x_index, re, im) in mode-major order."""
    rows = []
    for row, n in enumerate(g.ns):
        for i, v in enumerate(g.values[row]):
            rows.append((int(n), int(i), float(v.real), float(v.imag)))
    return rows


def mass(u: ModalField) -> float:
    """L^2 mass over the domain: 2 pi sum |a|^2."""
    return TWO_PI * float(np.sum(np.abs(u.coefficients) ** 2))


def energy_grushin(u: ModalField) -> float:
    """Grushin form energy: 2 pi sum lambda^2 |a|^2."""
    return TWO_PI * float(np.sum(u.basis.lambda_sq * np.abs(u.coefficients) ** 2))


def coercivity_gap(u: ModalField) -> float:
    """2 pi sum (lambda^2 - |n|) |a|^2, nonnegative by the comparison bound."""
    weight = u.basis.lambda_sq - np.abs(u.basis.n_of_slot)
    return TWO_PI * float(np.sum(weight * np.abs(u.coefficients) ** 2))
