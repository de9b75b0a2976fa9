"""Control regions on the torus and observed-mass functionals.

A control region is a union of y-arcs; the observed set is (-1,1) x arcs.
Because fields are trigonometric polynomials in y, the mass over the region
is computed exactly in y: the indicator enters only through its Fourier
coefficients over the arcs, which have a closed form.  The time average that
defines the observed fraction is the only quadrature in the stack (composite
Simpson over the window).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len

from .field import GridField, ModalField, evolve, mass, synthesize

TWO_PI = 2.0 * math.pi

DEFAULT_NT = 129
MIN_NT = 33


@dataclass(frozen=True)
class ControlRegion:
    """Disjoint sorted arcs (start, end) with 0 <= start < end <= 2 pi.

    Build with `ControlRegion.from_arcs`, which normalizes angles modulo
    2 pi, splits wrap-around arcs and merges overlaps.
    """

    arcs: tuple

    @staticmethod
    def from_arcs(arcs) -> "ControlRegion":
        arcs = list(arcs)
        if not arcs:
            raise ValueError("control region needs at least one arc")
        pieces = []
        for c, d in arcs:
            c, d = float(c), float(d)
            length = d - c
            if length <= 0:
                raise ValueError(f"arc ({c}, {d}) has nonpositive length")
            if length >= TWO_PI:
                pieces.append((0.0, TWO_PI))
                continue
            start = c % TWO_PI
            end = start + length
            if end <= TWO_PI:
                pieces.append((start, end))
            else:
                pieces.append((start, TWO_PI))
                pieces.append((0.0, end - TWO_PI))
        pieces.sort()
        merged = [list(pieces[0])]
        for start, end in pieces[1:]:
            if start <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], end)
            else:
                merged.append([start, end])
        # arcs meeting at the 0 == 2 pi seam stay as two pieces; all the
        # functionals below are additive over pieces, so nothing depends on it
        return ControlRegion(arcs=tuple((s, e) for s, e in merged))

    @property
    def total_length(self) -> float:
        return sum(e - s for s, e in self.arcs)


def gap_length(region: ControlRegion) -> float:
    """Length of the longest complementary arc (the observability threshold)."""
    arcs = region.arcs
    if not arcs:
        return TWO_PI
    covered = region.total_length
    if covered >= TWO_PI - 1e-15:
        return 0.0
    gaps = []
    for (s0, e0), (s1, _) in zip(arcs, arcs[1:]):
        gaps.append(s1 - e0)
    # circular gap from the last end back to the first start
    gaps.append(arcs[0][0] + TWO_PI - arcs[-1][1])
    return max(gaps)


def arc_fourier(region: ControlRegion, k: int) -> complex:
    """Fourier coefficient of the region indicator: int_region exp(-iky) dy."""
    if k == 0:
        return complex(region.total_length)
    total = 0.0 + 0.0j
    for s, e in region.arcs:
        total += (np.exp(-1j * k * s) - np.exp(-1j * k * e)) / (1j * k)
    return complex(total)


def _arc_fourier_table(region: ControlRegion, kmax: int) -> np.ndarray:
    """Coefficients for k = -kmax..kmax as one vectorized evaluation."""
    ks = np.arange(-kmax, kmax + 1)
    table = np.zeros(ks.size, dtype=np.complex128)
    nonzero = ks != 0
    kk = ks[nonzero]
    acc = np.zeros(kk.size, dtype=np.complex128)
    for s, e in region.arcs:
        acc += (np.exp(-1j * kk * s) - np.exp(-1j * kk * e)) / (1j * kk)
    table[nonzero] = acc
    table[~nonzero] = region.total_length
    return table


def region_mass(g: GridField, region: ControlRegion) -> float:
    """Exact mass of the field over (-1,1) x region.

    Expanding |u|^2 in y couples modes n and n + l through the indicator
    coefficient at lag l; the lag sums are evaluated by a padded cyclic
    autocorrelation along the mode axis (FFT), and the x-integral is the
    discrete sum.
    """
    ns = np.asarray(g.ns, dtype=np.int64)
    if ns.size == 0:
        return 0.0
    span = int(ns.max() - ns.min()) + 1
    dense = np.zeros((span, g.values.shape[1]), dtype=np.complex128)
    dense[ns - ns.min()] = g.values
    nfft = next_fast_len(2 * span - 1)
    spectrum = np.fft.fft(dense, n=nfft, axis=0)
    power = np.sum(spectrum * np.conj(spectrum), axis=1)
    correlation = np.fft.ifft(power)
    # correlation[l] = sum_i sum_n U_{n+l, i} conj(U_{n, i}) for l >= 0,
    # negative lags wrap to the tail of the array
    coeffs = _arc_fourier_table(region, span - 1)
    lags = np.arange(-(span - 1), span)
    lag_sums = np.conj(correlation[lags % nfft])
    total = g.basis.grid.spacing * np.sum(coeffs * lag_sums)
    return float(total.real)


def observed_fraction(
    u0: ModalField,
    region: ControlRegion,
    T: float,
    nt: int = DEFAULT_NT,
) -> float:
    """Time-averaged observed mass fraction over the window (-T, T).

    Computes (1 / (2 T mass)) int_{-T}^{T} mass_region(u(t)) dt by composite
    Simpson on nt nodes; nt must be odd and at least MIN_NT so the quadrature
    resolves the beam transit used in the threshold experiments.
    """
    if T <= 0:
        raise ValueError(f"window half-length must be positive, got {T}")
    if nt < MIN_NT or nt % 2 == 0:
        raise ValueError(f"nt must be odd and >= {MIN_NT}, got {nt}")
    total_mass = mass(u0)
    if total_mass <= 0:
        raise ValueError("field has zero mass")
    times = np.linspace(-T, T, nt)
    samples = np.array(
        [region_mass(synthesize(evolve(u0, t)), region) for t in times]
    )
    weights = np.ones(nt)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    integral = float(times[1] - times[0]) / 3.0 * float(np.sum(weights * samples))
    return integral / (2.0 * T * total_mass)


@dataclass(frozen=True)
class ObservabilityReport:
    """Observed fractions over a (h, T) sweep for one control region."""

    region: ControlRegion
    gap: float
    nt: int
    rows: list  # (h, T, observed_fraction)


def threshold_sweep(
    beams,
    region: ControlRegion,
    T_values,
    nt: int = DEFAULT_NT,
) -> ObservabilityReport:
    """Observed fraction for each (beam scale h, window T) combination.

    `beams` is an iterable of (h, ModalField) pairs, typically from the beam
    factory across a dyadic list of h.
    """
    gap = gap_length(region)
    rows = []
    for h, u0 in beams:
        for T in T_values:
            rows.append((float(h), float(T), observed_fraction(u0, region, T, nt)))
    return ObservabilityReport(region=region, gap=gap, nt=nt, rows=rows)
