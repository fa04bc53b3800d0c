"""The scalable bilinear map and its special cases."""

import cmath
import math

import numpy as np
import pytest

from sbtkit import (
    DomainError,
    Euler,
    MapSingularity,
    OriginError,
    ParamError,
    Polynomial,
    Sbt,
    SbtParams,
    StabilityRangeWarning,
    TransferFunction,
    Tustin,
    TustinPrewarp,
    equivalent_s_from_z,
    exact_z_from_s,
    is_stable_image,
    method_label,
    method_params,
    prewarp_factor,
    s_from_z,
    stability_circle,
    substitute,
    z_from_s,
)

T = 5e-5
WN = 5969.0

# frozen: tan(wn*T/2) / (wn*T/2) at the board constants
KPW = 1.0074894173286582


def test_params_validation():
    SbtParams(0.0, 1.0)
    SbtParams(1.0, 0.1)
    with pytest.raises(ParamError):
        SbtParams(-0.1, 1.0)
    with pytest.raises(ParamError):
        SbtParams(1.1, 1.0)
    with pytest.raises(ParamError):
        SbtParams(0.5, 0.0)


def test_stable_range_flag():
    assert SbtParams(0.5, 1.0).in_stable_range()
    assert SbtParams(1.0, 2.0).in_stable_range()
    assert not SbtParams(0.49, 1.0).in_stable_range()


def test_euler_map_closed_form():
    s = complex(-100.0, 2000.0)
    z = z_from_s(s, SbtParams(1.0, 1.0), T)
    assert z == pytest.approx(1.0 / (1.0 - T * s), rel=1e-15)


def test_tustin_map_closed_form():
    s = complex(-100.0, 2000.0)
    z = z_from_s(s, SbtParams(0.5, 1.0), T)
    assert z == pytest.approx((1.0 + 0.5 * T * s) / (1.0 - 0.5 * T * s), rel=1e-15)


def test_round_trip_forward_then_back():
    rng = np.random.RandomState(42)
    for _ in range(300):
        p = SbtParams(rng.uniform(0.0, 1.0), rng.uniform(0.5, 2.0))
        s = complex(rng.uniform(-5000, 0), rng.uniform(-8000, 8000))
        z = z_from_s(s, p, T)
        back = s_from_z(z, p, T)
        assert back == pytest.approx(s, rel=1e-11, abs=1e-7)


def test_inverse_explicit_form_matches_division():
    rng = np.random.RandomState(5)
    for _ in range(300):
        p = SbtParams(rng.uniform(0.05, 1.0), rng.uniform(0.5, 2.0))
        z = complex(rng.uniform(-0.9, 1.1), rng.uniform(-1.0, 1.0))
        try:
            got = s_from_z(z, p, T)
        except MapSingularity:
            continue
        direct = (z - 1.0) / (p.beta * T * (p.alpha * z + 1.0 - p.alpha))
        assert got == pytest.approx(direct, rel=1e-12, abs=1e-9)


def test_forward_map_singularity():
    p = SbtParams(0.5, 1.0)
    with pytest.raises(MapSingularity):
        z_from_s(complex(1.0 / (0.5 * T), 0.0), p, T)


def test_inverse_map_singularity():
    # alpha*z + 1 - alpha = 0 at z = -1 for the trapezoidal shape
    with pytest.raises(MapSingularity):
        s_from_z(complex(-1.0, 0.0), SbtParams(0.5, 1.0), T)


def test_bad_period_rejected():
    p = SbtParams(0.5, 1.0)
    for bad in (0.0, -1e-5, float("inf"), float("nan")):
        with pytest.raises(ParamError):
            z_from_s(0j, p, bad)


def test_exact_map_and_principal_inverse():
    rng = np.random.RandomState(17)
    for _ in range(200):
        # keep omega strictly inside the principal strip (0, pi/T)
        s = complex(rng.uniform(-3000, -1), rng.uniform(1.0, math.pi / T - 1.0))
        z = exact_z_from_s(s, T)
        assert z == pytest.approx(cmath.exp(s * T), rel=1e-15)
        assert equivalent_s_from_z(z, T) == pytest.approx(s, rel=1e-10, abs=1e-6)


def test_equivalent_s_rejects_origin():
    with pytest.raises(OriginError):
        equivalent_s_from_z(0j, T)


def test_equivalent_s_negative_axis_maps_to_nyquist():
    s = equivalent_s_from_z(complex(-0.5, 0.0), T)
    assert s.imag == pytest.approx(math.pi / T)


def test_prewarp_factor_board_value():
    assert prewarp_factor(WN, T) == pytest.approx(KPW, rel=1e-14)


def test_prewarp_factor_exceeds_one_and_grows():
    k1 = prewarp_factor(1000.0, T)
    k2 = prewarp_factor(20000.0, T)
    assert 1.0 < k1 < k2


def test_prewarp_factor_domain():
    with pytest.raises(DomainError):
        prewarp_factor(0.0, T)
    with pytest.raises(DomainError):
        prewarp_factor(math.pi / T, T)  # omega_n*T/2 = pi/2
    with pytest.raises(DomainError):
        prewarp_factor(-100.0, T)


def test_stability_circle_extremes():
    c = stability_circle(1.0)
    assert (c.center_re, c.radius) == (0.5, 0.5)
    c = stability_circle(0.5)
    assert (c.center_re, c.radius) == (0.0, 1.0)
    with pytest.raises(DomainError):
        stability_circle(0.0)


def test_left_half_plane_lands_in_circle():
    rng = np.random.RandomState(29)
    for _ in range(500):
        alpha = rng.uniform(0.1, 1.0)
        p = SbtParams(alpha, rng.uniform(0.5, 2.0))
        s = complex(rng.uniform(-20000, -1e-6), rng.uniform(-30000, 30000))
        z = z_from_s(s, p, T)
        assert is_stable_image(z, alpha, tol=1e-9)
        # the open right half plane lands outside
        z_bad = z_from_s(-s.conjugate(), p, T)
        assert not is_stable_image(z_bad, alpha, tol=-1e-9)


def test_stable_shape_factors_keep_unit_disk():
    rng = np.random.RandomState(31)
    for alpha in (0.5, 0.7, 1.0):
        p = SbtParams(alpha, 1.0)
        for _ in range(500):
            s = complex(rng.uniform(-50000, -1e-6), rng.uniform(-50000, 50000))
            assert abs(z_from_s(s, p, T)) <= 1.0 + 1e-12


def test_substitute_first_order_matches_manual_tustin():
    a = 400.0
    g = TransferFunction([1.0], [a, 1.0])  # 1/(s+a)
    d = substitute(g, SbtParams(0.5, 1.0), T)
    assert d.is_discrete and d.dt == T
    # clearing 1/(s+a) by T*(z+1)/2 gives (T/2)(z+1) over aT/2(z+1) + (z-1)
    for z in (0.3 + 0.4j, -0.2 + 0.9j, 1.5 + 0.0j):
        expected = (0.5 * T * (z + 1)) / (0.5 * a * T * (z + 1) + z - 1)
        assert d(z) == pytest.approx(expected, rel=1e-12)


def test_substitute_rejects_discrete_input():
    disc = TransferFunction([1.0], [1.0, 1.0], dt=T)
    with pytest.raises(DomainError):
        substitute(disc, SbtParams(0.5, 1.0), T)


def test_substitute_warns_below_stable_alpha():
    g = TransferFunction([1.0], [100.0, 1.0])
    with pytest.warns(StabilityRangeWarning):
        substitute(g, SbtParams(0.3, 1.0), T)


def test_substitute_zero_coefficient_skipped():
    # numerator 2*kr*wc*s has no constant term; the lifted numerator must
    # keep the (z - 1) factor, hence sum of coefficients zero
    g = TransferFunction([0.0, 100.0], [25.0, 4.0, 1.0])
    d = substitute(g, SbtParams(0.8, 1.2), T)
    assert sum(d.num.coeffs) == pytest.approx(0.0, abs=1e-14)


def test_method_params_table():
    assert method_params(Euler(), WN, T) == SbtParams(1.0, 1.0)
    assert method_params(Tustin(), WN, T) == SbtParams(0.5, 1.0)
    pw = method_params(TustinPrewarp(), WN, T)
    assert pw.alpha == 0.5
    assert pw.beta == pytest.approx(KPW, rel=1e-14)
    # an explicit design frequency overrides the fallback
    pw2 = method_params(TustinPrewarp(omega_n=2000.0), WN, T)
    assert pw2.beta == pytest.approx(prewarp_factor(2000.0, T), rel=1e-14)
    custom = SbtParams(0.77, 1.01)
    assert method_params(Sbt(custom), WN, T) is custom


def test_method_labels():
    assert method_label(Euler()) == "euler"
    assert method_label(Tustin()) == "tustin"
    assert method_label(TustinPrewarp()) == "sota"
    assert method_label(Sbt(SbtParams(0.5, 1.0))) == "sbt"


def test_polynomial_import_is_usable_here():
    # substitution output is built from plain polynomials
    g = TransferFunction(Polynomial([0.0, 1.0]), Polynomial([1.0, 1.0]))
    d = substitute(g, SbtParams(1.0, 1.0), T)
    assert d.num.degree <= 1 and d.den.degree == 1
