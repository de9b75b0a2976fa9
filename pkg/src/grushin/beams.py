"""Gaussian beams built from oscillator ground states across a dyadic band.

For a scale h the band holds the integer frequencies k with
1/(2h) < k < 2/h.  Each retained mode carries the ground state p(k, x) of
L_k with weight g(k) chi(h k), where g is a Gaussian of width 1/h and chi a
smooth bump selecting the band.  Since lambda(k) is within an exponentially
small gap of k, the beam transports along y at speed close to one, which is
what the threshold experiments exercise.
"""

import math
from dataclasses import dataclass

import numpy as np

from .field import ModalField, SpectralBasis, evolve, synthesize
from .grids import DirichletGrid
from .oscillator import DEFAULT_TOL, eigen_lowest

TWO_PI = 2.0 * math.pi


def bump_chi(s):
    """Smooth bump supported on (1/2, 2), normalized so chi(5/4) = 1.

    chi(s) = exp(1 - (9/16) / ((s - 1/2)(2 - s))) inside the support.
    Accepts scalars or arrays.
    """
    arr = np.asarray(s, dtype=float)
    out = np.zeros_like(arr)
    inside = (arr > 0.5) & (arr < 2.0)
    window = (arr[inside] - 0.5) * (2.0 - arr[inside])
    out[inside] = np.exp(1.0 - (9.0 / 16.0) / window)
    if np.isscalar(s):
        return float(out)
    return out


def gaussian_weight(h: float, w) -> np.ndarray:
    """Frequency weight g(w) = sqrt(h / (2 pi)) exp(-h^2 w^2 / 2)."""
    return np.sqrt(h / TWO_PI) * np.exp(-0.5 * (h * np.asarray(w, dtype=float)) ** 2)


def band_frequencies(h: float) -> np.ndarray:
    """Integer frequencies strictly inside (1/(2h), 2/h)."""
    if not 0 < h < 1:
        raise ValueError(f"scale h must lie in (0, 1), got {h}")
    lo = math.floor(1.0 / (2.0 * h)) + 1
    hi = math.ceil(2.0 / h) - 1
    if lo > hi:
        raise ValueError(f"band for h={h} contains no integer frequency")
    return np.arange(lo, hi + 1)


def required_interior_nodes(h: float) -> int:
    """Smallest grid size resolving the narrowest ground state in the band."""
    max_spacing = math.sqrt(h / 8.0) / 10.0
    return math.ceil(2.0 / max_spacing) - 1


@dataclass(frozen=True)
class GroundStateRecord:
    """Ground state of L_w: eigenvalue, gap ratio and x-localization."""

    w: int
    lambda_w: float
    lambda_err: float
    nu: float
    vector: np.ndarray
    mass_outside_half: float


def build_ground_band(h: float, grid: DirichletGrid, tol: float = DEFAULT_TOL) -> list:
    """Ground states for every frequency in the band of scale h.

    The grid must resolve the narrowest Gaussian profile in the band:
    spacing <= sqrt(h/8)/10.  A too-coarse grid raises with the required
    interior node count.
    """
    needed = required_interior_nodes(h)
    if grid.m < needed:
        raise ValueError(
            f"grid with m={grid.m} cannot resolve the band at h={h}; "
            f"need at least m={needed} interior nodes"
        )
    records = []
    outside = np.abs(grid.nodes) > 0.5
    for k in band_frequencies(h):
        lam, err, vec = eigen_lowest(int(k), grid, 1, tol)
        p = vec[:, 0]
        records.append(
            GroundStateRecord(
                w=int(k),
                lambda_w=float(lam[0]),
                lambda_err=float(err[0]),
                nu=float(lam[0]) / float(k) - 1.0,
                vector=p,
                mass_outside_half=float(grid.spacing * np.sum(p[outside] ** 2)),
            )
        )
    return records


def band_basis(records: list, grid: DirichletGrid) -> SpectralBasis:
    """Single-level spectral basis holding one ground state per band mode."""
    if not records:
        raise ValueError("empty band")
    ns = []
    slices = {}
    vectors = {}
    lam = np.empty(len(records))
    err = np.empty(len(records))
    nvals = np.empty(len(records), dtype=np.int64)
    for i, rec in enumerate(sorted(records, key=lambda r: r.w)):
        ns.append(rec.w)
        slices[rec.w] = slice(i, i + 1)
        vectors[abs(rec.w)] = rec.vector.reshape(-1, 1)
        lam[i] = rec.lambda_w
        err[i] = rec.lambda_err
        nvals[i] = rec.w
    return SpectralBasis(
        grid=grid,
        n_max=int(max(ns)),
        lambda_max=float(lam.max()),
        ns=tuple(ns),
        slices=slices,
        lambda_sq=lam,
        lambda_err=err,
        n_of_slot=nvals,
        _vectors=vectors,
    )


def build_beam(h: float, records: list, basis: SpectralBasis) -> ModalField:
    """Beam coefficients a_{0,k} = g(k) chi(h k) on the band basis."""
    coeffs = np.zeros(basis.size, dtype=np.complex128)
    for rec in records:
        if rec.w not in basis.slices:
            raise ValueError(f"band frequency k={rec.w} is missing from the basis")
        coeffs[basis.slices[rec.w]] = gaussian_weight(h, rec.w) * bump_chi(h * rec.w)
    if not np.any(coeffs):
        raise ValueError("beam has no support: all band weights vanished")
    return ModalField(basis=basis, coefficients=coeffs)


def make_beam(h: float, grid: DirichletGrid, tol: float = DEFAULT_TOL) -> ModalField:
    """Convenience path: band, basis and beam in one call."""
    records = build_ground_band(h, grid, tol)
    return build_beam(h, records, band_basis(records, grid))


def beam_center(u: ModalField, t: float) -> float:
    """Circular centroid of the y-marginal of |u(t)|^2, in (-pi, pi].

    The first trigonometric moment of |u|^2 couples adjacent modes only:
    int e^{iy} |u|^2 dy dx = 2 pi sum_k <U_k, U_{k+1}>_x, and the centroid is
    its argument.
    """
    g = synthesize(evolve(u, t))
    ns = np.asarray(g.ns)
    moment = 0.0 + 0.0j
    dx = u.basis.grid.spacing
    index_of = {int(n): i for i, n in enumerate(ns)}
    for n, row in zip(ns, range(len(ns))):
        nxt = index_of.get(int(n) + 1)
        if nxt is None:
            continue
        moment += dx * np.sum(g.values[row] * np.conj(g.values[nxt]))
    moment *= TWO_PI
    if moment == 0:
        raise ValueError("field has no adjacent-mode coupling, centroid undefined")
    return float(np.angle(moment))
