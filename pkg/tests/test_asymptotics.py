"""Special functions and the spectral-gap expansion machinery."""

import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from grushin import DirichletGrid
from grushin.asymptotics import (
    check_eigen_estimates,
    erf_scaled,
    f1,
    g1,
    mu_of_w,
    nu_fixed_point,
    phase_derivatives,
    solve_R2,
)

SQRT_PI = math.sqrt(math.pi)


def test_erf_scaled_matches_math_erf():
    for z in np.linspace(0.0, 10.0, 41):
        assert abs(erf_scaled(float(z)) - SQRT_PI / 2 * math.erf(z)) < 5e-15


def test_erf_scaled_odd_and_saturating():
    assert erf_scaled(-1.3) == -erf_scaled(1.3)
    assert erf_scaled(0.0) == 0.0
    assert abs(erf_scaled(10.0) - SQRT_PI / 2) < 1e-15


def test_erf_scaled_taylor_series():
    z = 1.0
    series = sum(
        (-1.0) ** k * z ** (2 * k + 1) / (math.factorial(k) * (2 * k + 1))
        for k in range(20)
    )
    assert abs(erf_scaled(z) - series) < 1e-13


def test_g1_small_z_taylor():
    # g1 = -z^2/2 + z^4/3 - 23 z^6/180 + O(z^8)
    for z in (0.05, 0.1):
        ser = -z**2 / 2 + z**4 / 3 - 23.0 * z**6 / 180.0
        assert abs(g1(z) - ser) < 2 * z**8
    assert g1(0.0) == 0.0


def test_g1_rejects_negative():
    with pytest.raises(ValueError, match="z >= 0"):
        g1(-1.0)


def test_g1_quadrature_oracle():
    """Direct integral of Phi(y) exp(y^2 - z^2), both evaluation branches."""
    for z in (1.7, 5.0, 8.5):
        ref, _ = quad(
            lambda y, zz=z: erf_scaled(y) * math.exp(y * y - zz * zz),
            0.0, z, limit=200,
        )
        assert abs(g1(z) + ref) < 1e-9


def test_g1_asymptotic_amplitude():
    # g1(z) ~ -sqrt(pi)/(4 z) for large z
    assert g1(10.0) * (-4.0 * 10.0 / SQRT_PI) == pytest.approx(1.0, abs=0.01)
    assert g1(30.0) * (-4.0 * 30.0 / SQRT_PI) == pytest.approx(1.0, abs=0.001)


def test_f1_mantissa_exponent_split():
    z = 3.0
    mant, expo = f1(z)
    assert mant == pytest.approx(g1(z), rel=1e-12)
    assert expo == pytest.approx(z * z / 2)
    # the pair stays representable far beyond exp overflow
    mant, expo = f1(35.0)
    assert math.isfinite(mant) and expo == pytest.approx(612.5)


def test_f1_small_z_taylor():
    # f1 = g1 e^{z^2/2} = -z^2/2 + z^4/12 + O(z^6)
    z = 0.1
    mant, expo = f1(z)
    value = mant * math.exp(expo)
    assert abs(value - (-(z**2) / 2 + z**4 / 12)) < 2 * z**6


def test_solve_R2_small_z_taylor():
    """Power series of the scaled profile, derived from the recursion.

    Matching S'' + 2zS' + (nu+2)S = z^2/2 - z^4/3 + 23 z^6/180 - ... term
    by term gives a4 = 1/24, a6 = -(18+nu)/720 and
    56 a8 = 23/180 + (14+nu)(18+nu)/720.
    """
    for nu in (0.0, 1e-4):
        prof = solve_R2(nu, 0.5, 1e-3)
        idx = 200
        z = float(prof.z[idx])
        assert z == pytest.approx(0.2)
        a8 = (23.0 / 180.0 + (14.0 + nu) * (18.0 + nu) / 720.0) / 56.0
        ser = z**4 / 24.0 - (18.0 + nu) * z**6 / 720.0 + a8 * z**8
        assert abs(prof.r2_scaled[idx] - ser) < 1e-9


def test_solve_R2_independent_integrator():
    """Same ODE system through scipy's adaptive DOP853."""
    nu = 0.0

    def rhs(z, y):
        phi, gg, s, sp = y
        e = math.exp(-z * z)
        return [e, -2 * z * gg - phi, sp, -2 * z * sp - (nu + 2) * s - gg]

    ref = solve_ivp(
        rhs, (0.0, 8.0), [0.0] * 4, method="DOP853", rtol=1e-12, atol=1e-14
    ).y[:, -1]
    prof = solve_R2(nu, 8.0, 1e-3)
    assert abs(prof.phi[-1] - ref[0]) < 1e-12
    assert abs(prof.g1_scaled[-1] - ref[1]) < 1e-12
    assert abs(prof.r2_scaled[-1] - ref[2]) < 1e-12
    assert abs(prof.r2_scaled_deriv[-1] - ref[3]) < 1e-12


def test_solve_R2_profile_consistency():
    # stored phi and g1 columns agree with the standalone functions
    prof = solve_R2(0.0, 6.0, 1e-3)
    for idx in (1000, 3000, 6000):
        z = float(prof.z[idx])
        assert prof.phi[idx] == pytest.approx(erf_scaled(z), abs=1e-12)
        assert prof.g1_scaled[idx] == pytest.approx(g1(z), abs=1e-9)


def test_solve_R2_validation():
    with pytest.raises(ValueError, match="positive"):
        solve_R2(0.0, 0.0)
    with pytest.raises(ValueError, match="supported range"):
        solve_R2(0.0, 41.0)
    with pytest.raises(ValueError, match="supported maximum"):
        solve_R2(0.0, 5.0, step=2e-3)


def test_r2_unscaling_overflow_guard():
    prof = solve_R2(0.0, 40.0)
    assert math.isfinite(prof.r2(1000))
    with pytest.raises(OverflowError, match="40"):
        prof.r2(len(prof.z) - 1)


def test_nu_fixed_point_matches_shooting():
    sol = nu_fixed_point(10.0)
    reference = mu_of_w(10.0) - 1.0
    assert sol.nu == pytest.approx(reference, rel=1e-4)
    assert sol.iterations >= 1
    assert sol.amplitude == pytest.approx(
        sol.nu / (math.sqrt(10.0) * math.exp(-10.0)), rel=1e-12
    )


def test_nu_fixed_point_near_first_iterate():
    # the iteration starts from -e^{-w}/g1(sqrt(w)) and barely moves
    w = 10.0
    prof = solve_R2(0.0, math.sqrt(w))
    first = -math.exp(-w) / float(prof.g1_scaled[-1])
    sol = nu_fixed_point(w)
    assert abs(sol.nu - first) < 0.05 * abs(first)


def test_nu_fixed_point_decreasing():
    values = [nu_fixed_point(float(w)).nu for w in range(6, 15)]
    assert all(a > b > 0 for a, b in zip(values, values[1:]))


def test_nu_fixed_point_domain():
    with pytest.raises(ValueError, match="w >= 6"):
        nu_fixed_point(5.0)


def test_mu_of_w_basic():
    mu = mu_of_w(10.0)
    assert 1.0 < mu < 1.001
    assert mu_of_w(8.0) > mu > mu_of_w(12.0)
    with pytest.raises(ValueError, match="w >= 1"):
        mu_of_w(0.5)


def test_estimate_rows_profile_ratios():
    report = check_eigen_estimates([10.0], DirichletGrid(400))
    row = report.rows[0]
    assert row.w == 10.0
    assert row.gap == pytest.approx(row.lambda_w - 10.0, rel=1e-12)
    assert row.r1 > 0
    # centered profile ratio approaches pi^{-1/4}
    assert abs(row.r4_center - math.pi**-0.25) < 1e-2
    assert row.r4_min <= row.r4_center <= row.r4_max
    assert row.r5 > 0


def test_estimate_fit_slope_range():
    report = check_eigen_estimates([8.0, 10.0, 12.0], DirichletGrid(400))
    assert -2.0 < report.fit_slope < 0.0


def _quartic_table(ws):
    return {int(w): 0.3 * w**4 - 2.0 * w**2 + w for w in ws}


def test_phase_derivatives_exact_on_quartic():
    """The 5-point stencils differentiate degree-4 tables exactly."""
    table = _quartic_table(range(6, 15))
    t, y, w, winding = 0.7, 1.3, 10, 2
    rec = phase_derivatives(t, y, w, winding, table)
    lam = table[10]
    assert rec.phase == pytest.approx(w * y - lam * t - 2 * math.pi * winding * w)
    d_lam = 1.2 * w**3 - 4.0 * w + 1.0
    d2_lam = 3.6 * w**2 - 4.0
    assert rec.dphase_dw == pytest.approx(
        y - d_lam * t - 2 * math.pi * winding, rel=1e-9
    )
    assert rec.d2phase_dw2 == pytest.approx(-d2_lam * t, rel=1e-9)


def test_phase_derivatives_at_origin():
    table = _quartic_table(range(4, 9))
    rec = phase_derivatives(0.0, 0.0, 6, 3, table)
    assert rec.phase == pytest.approx(-2.0 * math.pi * 3 * 6)


def test_phase_derivatives_missing_entries():
    table = _quartic_table([6, 7, 8])
    with pytest.raises(ValueError, match="table entries"):
        phase_derivatives(0.1, 0.0, 7, 0, table)
