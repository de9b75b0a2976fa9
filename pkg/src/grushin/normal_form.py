"""Doubled-torus machinery: odd extension, extended operator and normal form.

Odd reflection across x = 1 turns Dirichlet data on (-1, 1) into periodic
data on the doubled torus [-1, 3), where the operator becomes
P_a = dxx + a(x)^2 dyy with the tent profile a(x) = x on |x| <= 1,
a(x) = 2 - x on [1, 3].  The conjugation v = (1 + h Q D_y^2) u replaces
a(x)^2 by its mean M = 1/3 up to a residual that is small relative to the
uncorrected defect (a^2 - M) dyy u; `residual_ratio` measures both.

Fields live in Fourier space: x-wavenumbers xi = pi l / 2 on the period-4
torus, integer y-modes n.
"""

import math
from dataclasses import dataclass

import numpy as np

from .grids import DirichletGrid

PERIOD = 4.0
MEAN_A2 = 1.0 / 3.0
DEFAULT_EPS = 0.1
DEFAULT_EXTENDED_NODES = 8192
BOUNDARY_TOL = 1e-8

# Scalar in front of the multiplier B(x) psi2(h D_x)/(h D_x).  The sign is
# fixed by the cancellation requirement: the commutator of dxx with Q must
# produce -(a^2 - M) dyy on band-limited fields; the opposite sign doubles
# the defect instead of removing it.
Q_SCALE = 0.5j


def smoothstep(t):
    """C-infinity monotone step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t >= 1.0] = 1.0
    inside = (t > 0.0) & (t < 1.0)
    ti = t[inside]
    a = np.exp(-1.0 / ti)
    b = np.exp(-1.0 / (1.0 - ti))
    out[inside] = a / (a + b)
    return out


def _window(z, rise=None, fall=None):
    """Even smooth window with optional rise (a, b) and fall (c, d) edges."""
    z = np.abs(np.asarray(z, dtype=float))
    out = np.ones_like(z)
    if rise is not None:
        a, b = rise
        out = out * smoothstep((z - a) / (b - a))
    if fall is not None:
        c, d = fall
        out = out * (1.0 - smoothstep((z - c) / (d - c)))
    return out


def psi0(z):
    """Low-pass window: 1 on |z| <= 1/2, supported in |z| <= 1."""
    return _window(z, fall=(0.5, 1.0))


def psi1(z):
    """Band window: 1 on 1/2 <= |z| <= 2, supported in 1/4 < |z| < 4."""
    return _window(z, rise=(0.25, 0.5), fall=(2.0, 4.0))


def psi2(z):
    """Band window: 1 on 1/4 <= |z| <= 4, supported in 1/8 <= |z| <= 8.

    Its plateau covers the support of psi1, so psi2 * psi1 == psi1.
    """
    return _window(z, rise=(0.125, 0.25), fall=(4.0, 8.0))


@dataclass(frozen=True)
class MultiplierSpec:
    """The three localization windows used by the normal form."""

    psi0: callable
    psi1: callable
    psi2: callable


def default_multipliers() -> MultiplierSpec:
    return MultiplierSpec(psi0=psi0, psi1=psi1, psi2=psi2)


@dataclass(frozen=True)
class ProfileA:
    """Tent profile a(x), its square and antiderivative on the doubled grid.

    B(x) = int_{-1}^x (a^2 - M) is the periodic C^1 antiderivative of the
    defect; mean is the exact average M of a^2 over the torus.
    """

    nx: int
    x: np.ndarray
    a: np.ndarray
    a_sq: np.ndarray
    B: np.ndarray
    mean: float


def x_nodes(nx: int) -> np.ndarray:
    return -1.0 + PERIOD * np.arange(nx) / nx


def xi_values(nx: int) -> np.ndarray:
    """x-wavenumbers pi l / 2 in FFT layout."""
    return 2.0 * math.pi * np.fft.fftfreq(nx, d=PERIOD / nx)


def tent_profile(nx: int) -> ProfileA:
    x = x_nodes(nx)
    a = np.where(x <= 1.0, x, 2.0 - x)
    left = (x**3 - x) / 3.0
    right = 2.0 / 3.0 - (2.0 - x) ** 3 / 3.0 - x / 3.0
    B = np.where(x <= 1.0, left, right)
    return ProfileA(nx=nx, x=x, a=a, a_sq=a * a, B=B, mean=MEAN_A2)


_PROFILE_CACHE: dict = {}


def _profile(nx: int) -> ProfileA:
    if nx not in _PROFILE_CACHE:
        _PROFILE_CACHE[nx] = tent_profile(nx)
    return _PROFILE_CACHE[nx]


@dataclass(frozen=True)
class ExtendedField:
    """Fourier coefficients c[l, j] over the doubled torus.

    Axis 0 is the x-frequency in FFT layout (length nx), axis 1 enumerates
    the retained integer y-modes n_values.
    """

    nx: int
    n_values: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        if self.coefficients.shape != (self.nx, self.n_values.size):
            raise ValueError(
                f"coefficient array {self.coefficients.shape} does not match "
                f"nx={self.nx} with {self.n_values.size} y-modes"
            )


def to_values(f: ExtendedField) -> np.ndarray:
    """Sample the field on the doubled x-grid, one column per y-mode."""
    return np.fft.ifft(f.coefficients, axis=0) * f.nx


def from_values(values: np.ndarray, n_values: np.ndarray) -> ExtendedField:
    coeffs = np.fft.fft(values, axis=0) / values.shape[0]
    return ExtendedField(nx=values.shape[0], n_values=np.asarray(n_values), coefficients=coeffs)


def ext_norm(f: ExtendedField) -> float:
    """L^2 norm over the doubled torus: sqrt(2 pi * 4 * sum |c|^2)."""
    return math.sqrt(8.0 * math.pi * float(np.sum(np.abs(f.coefficients) ** 2)))


def odd_extend_arrays(
    values: np.ndarray,
    n_values,
    grid: DirichletGrid,
    boundary=(0.0, 0.0),
) -> ExtendedField:
    """Odd reflection across x = 1 of per-mode interior samples.

    `values` has one row per y-mode on the interior Dirichlet nodes.  The
    extension fills the doubled grid of 2(m+1) nodes: zeros at x = -1 and
    x = 1, u itself on (-1, 1) and -u(2 - x) on (1, 3).
    """
    if max(abs(boundary[0]), abs(boundary[1])) > BOUNDARY_TOL:
        raise ValueError(
            f"boundary values {boundary} exceed {BOUNDARY_TOL}: not a Dirichlet field"
        )
    values = np.atleast_2d(values)
    m = grid.m
    if values.shape[1] != m:
        raise ValueError(f"expected {m} interior samples per mode, got {values.shape[1]}")
    nx = 2 * (m + 1)
    ext = np.zeros((values.shape[0], nx), dtype=np.complex128)
    ext[:, 1 : m + 1] = values
    ext[:, m + 2 :] = -values[:, ::-1]
    return from_values(ext.T, np.asarray(n_values))


def odd_extend(g, boundary=(0.0, 0.0)) -> ExtendedField:
    """Odd extension of a GridField (implicit zero boundary values)."""
    return odd_extend_arrays(g.values, g.ns, g.basis.grid, boundary)


def restrict(f: ExtendedField) -> np.ndarray:
    """Samples on the interior nodes of (-1, 1), one row per y-mode."""
    m = f.nx // 2 - 1
    return to_values(f).T[:, 1 : m + 1]


def apply_Pa(f: ExtendedField) -> ExtendedField:
    """Extended operator P_a = dxx + a(x)^2 dyy."""
    profile = _profile(f.nx)
    xi = xi_values(f.nx)
    dxx = -(xi**2)[:, None] * f.coefficients
    vals = to_values(f)
    ayy = profile.a_sq[:, None] * vals * (-(f.n_values.astype(float) ** 2))[None, :]
    return ExtendedField(
        nx=f.nx,
        n_values=f.n_values,
        coefficients=dxx + np.fft.fft(ayy, axis=0) / f.nx,
    )


def apply_Q(f: ExtendedField, h: float, spec: MultiplierSpec) -> ExtendedField:
    """Normal-form multiplier Q f = Q_SCALE * B(x) * [psi2(h xi)/(h xi)] f."""
    if not 0 < h <= 0.25:
        raise ValueError(f"h must lie in (0, 1/4], got {h}")
    profile = _profile(f.nx)
    zeta = h * xi_values(f.nx)
    mult = np.zeros_like(zeta)
    nonzero = zeta != 0
    mult[nonzero] = spec.psi2(zeta[nonzero]) / zeta[nonzero]
    filtered = ExtendedField(
        nx=f.nx, n_values=f.n_values, coefficients=mult[:, None] * f.coefficients
    )
    vals = Q_SCALE * profile.B[:, None] * to_values(filtered)
    return ExtendedField(
        nx=f.nx, n_values=f.n_values, coefficients=np.fft.fft(vals, axis=0) / f.nx
    )


def _q_dy2(f: ExtendedField, h: float, spec: MultiplierSpec) -> ExtendedField:
    """Q D_y^2, with D_y^2 acting as the symbol n^2 per y-mode."""
    qf = apply_Q(f, h, spec)
    return ExtendedField(
        nx=f.nx,
        n_values=f.n_values,
        coefficients=qf.coefficients * (f.n_values.astype(float) ** 2)[None, :],
    )


@dataclass(frozen=True)
class NormalFormResult:
    h: float
    eps: float
    raw: float
    corrected: float

    @property
    def ratio(self) -> float:
        if self.raw == 0.0:
            return math.nan
        return self.corrected / self.raw


def residual_ratio(
    u: ExtendedField,
    h: float,
    eps: float = DEFAULT_EPS,
    spec: MultiplierSpec | None = None,
) -> NormalFormResult:
    """Defect of the averaged model with and without the Q correction.

    The field is first localized to the window psi1(h xi) psi0(h^eps n).
    raw measures ||(a^2 - M) D_y^2 u|| / ||u||; corrected measures
    ||i dt v + Delta_M v|| / ||u|| for v = (1 + h Q D_y^2) u, where
    i dt v = -(1 + h Q D_y^2) P_a u follows from the evolution equation and
    Delta_M = dxx + M dyy.
    """
    if spec is None:
        spec = default_multipliers()
    profile = _profile(u.nx)
    xi = xi_values(u.nx)
    nsq = u.n_values.astype(float) ** 2
    mask = spec.psi1(h * xi)[:, None] * spec.psi0(h**eps * u.n_values)[None, :]
    c = u.coefficients * mask
    if not np.any(c):
        raise ValueError("localization mask removed the entire field")
    masked = ExtendedField(nx=u.nx, n_values=u.n_values, coefficients=c)
    norm_u = math.sqrt(float(np.sum(np.abs(c) ** 2)))

    pa_u = apply_Pa(masked)
    idt_v = ExtendedField(
        nx=u.nx,
        n_values=u.n_values,
        coefficients=-(pa_u.coefficients + h * _q_dy2(pa_u, h, spec).coefficients),
    )
    v = c + h * _q_dy2(masked, h, spec).coefficients
    model = -(xi**2)[:, None] * v - MEAN_A2 * nsq[None, :] * v
    r = idt_v.coefficients + model
    corrected = math.sqrt(float(np.sum(np.abs(r) ** 2))) / norm_u

    defect_vals = (profile.a_sq - MEAN_A2)[:, None] * to_values(masked) * nsq[None, :]
    raw = math.sqrt(float(np.sum(np.abs(np.fft.fft(defect_vals, axis=0) / u.nx) ** 2))) / norm_u
    return NormalFormResult(h=h, eps=eps, raw=raw, corrected=corrected)


def random_band_field(
    h: float,
    eps: float,
    nx: int,
    rng: np.random.Generator,
) -> ExtendedField:
    """Random data supported where the localization windows equal one.

    x-frequencies are drawn with |h xi| in [1/2, 2] (the psi1 plateau) and
    y-modes with |n| <= h^{-eps} excluding n = 0, so the mask passes the
    field through unattenuated up to the psi0 shoulder.
    """
    xi = xi_values(nx)
    in_band = (np.abs(h * xi) >= 0.5) & (np.abs(h * xi) <= 2.0)
    if not np.any(in_band):
        raise ValueError(f"grid nx={nx} has no x-frequency in the band for h={h}")
    n_cap = max(1, math.floor(h ** (-eps)))
    n_values = np.array([n for n in range(-n_cap, n_cap + 1) if n != 0])
    coeffs = np.zeros((nx, n_values.size), dtype=np.complex128)
    count = int(np.count_nonzero(in_band))
    draw = rng.standard_normal((count, n_values.size)) + 1j * rng.standard_normal(
        (count, n_values.size)
    )
    coeffs[in_band] = draw
    return ExtendedField(nx=nx, n_values=n_values, coefficients=coeffs)
