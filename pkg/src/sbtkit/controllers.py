"""Resonant current controllers and their discrete realizations.

The continuous resonant element is

    G_qr(s) = 2*Kr*wc*s / (s^2 + 2*wc*s + wn^2)

with gain Kr, bandwidth wc and resonant frequency wn (rad/s).  The
fundamental tracker is a PI element Kp*(1 + 1/(tau_i*s)) placed in
parallel.  Discretization produces a biquad in descending z powers,

    H(z) = (a2*z^2 + a1*z + a0) / (b2*z^2 + b1*z + b0),

by closed-form columns, one per method.  The generic scalable column with
(alpha, beta) reduces bit-exactly to the backward-difference column at
(1, 1) and to the trapezoidal column at (0.5, 1); expression order below
is chosen so those reductions hold exactly in floating point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import NormalizationError, ParamError, StabilityRangeWarning
from .lti import Polynomial, TransferFunction, parallel
from .transforms import (
    Euler,
    Method,
    Sbt,
    SbtParams,
    Tustin,
    TustinPrewarp,
    method_label,
    prewarp_factor,
)

__all__ = [
    "QrParams",
    "PiParams",
    "BiquadCoeffs",
    "DiffEqCoeffs",
    "qr_continuous",
    "pi_continuous",
    "pir_continuous",
    "qr_discretize",
    "diff_eq_coeffs",
    "pi_discretize",
    "pir_discretize",
    "sbt_params_straightforward",
]


@dataclass(frozen=True)
class QrParams:
    """Resonant element constants, all angular frequencies in rad/s."""

    kr: float
    omega_c: float
    omega_n: float

    def __post_init__(self):
        if not self.kr > 0:
            raise ParamError(f"kr must be positive, got {self.kr!r}")
        if not 0 < self.omega_c < self.omega_n:
            raise ParamError(
                f"need 0 < omega_c < omega_n, got omega_c={self.omega_c!r} "
                f"omega_n={self.omega_n!r}"
            )


@dataclass(frozen=True)
class PiParams:
    """Proportional-integral constants."""

    kp: float
    tau_i: float

    def __post_init__(self):
        if not self.kp > 0:
            raise ParamError(f"kp must be positive, got {self.kp!r}")
        if not self.tau_i > 0:
            raise ParamError(f"tau_i must be positive, got {self.tau_i!r}")


@dataclass(frozen=True)
class BiquadCoeffs:
    """Second-order discrete section, coefficients in descending z powers."""

    a2: float
    a1: float
    a0: float
    b2: float
    b1: float
    b0: float

    def __post_init__(self):
        if self.b2 == 0.0:
            raise ParamError("leading denominator coefficient b2 must be nonzero")
        # canonicalize -0.0 so reduced parameter choices print the same table
        for name in ("a2", "a1", "a0", "b2", "b1", "b0"):
            if getattr(self, name) == 0.0:
                object.__setattr__(self, name, 0.0)

    def to_transfer(self, T: float) -> TransferFunction:
        """Same section as a discrete TransferFunction (ascending storage)."""
        return TransferFunction(
            Polynomial([self.a0, self.a1, self.a2]),
            Polynomial([self.b0, self.b1, self.b2]),
            dt=T,
        )


@dataclass(frozen=True)
class DiffEqCoeffs:
    """Normalized update  y[n] = kin0*x[n] + kin1*x[n-1] + kin2*x[n-2]
    + kout1*y[n-1] + kout2*y[n-2]."""

    kin0: float
    kin1: float
    kin2: float
    kout1: float
    kout2: float

    def __post_init__(self):
        for name in ("kin0", "kin1", "kin2", "kout1", "kout2"):
            if getattr(self, name) == 0.0:
                object.__setattr__(self, name, 0.0)


def qr_continuous(p: QrParams) -> TransferFunction:
    """Continuous resonant element as a rational function of s."""
    num = Polynomial([0.0, 2 * p.kr * p.omega_c])
    den = Polynomial([p.omega_n * p.omega_n, 2 * p.omega_c, 1.0])
    return TransferFunction(num, den)


def pi_continuous(p: PiParams) -> TransferFunction:
    """Kp*(1 + 1/(tau_i*s)) over the common denominator tau_i*s."""
    return TransferFunction(
        Polynomial([p.kp, p.kp * p.tau_i]), Polynomial([0.0, p.tau_i])
    )


def pir_continuous(pi: PiParams, qr: QrParams) -> TransferFunction:
    """PI and resonant element in parallel (degree-3 denominator)."""
    return parallel(pi_continuous(pi), qr_continuous(qr))


def qr_discretize(p: QrParams, method: Method, T: float) -> BiquadCoeffs:
    """Closed-form biquad for the resonant element under the given method."""
    kr, wc, wn = p.kr, p.omega_c, p.omega_n
    if isinstance(method, Euler):
        return BiquadCoeffs(
            a2=2 * kr * wc * T,
            a1=-2 * kr * wc * T,
            a0=0.0,
            b2=1 + 2 * wc * T + (wn * T) ** 2,
            b1=-2 - 2 * wc * T,
            b0=1.0,
        )
    if isinstance(method, Tustin):
        return BiquadCoeffs(
            a2=kr * wc * T,
            a1=0.0,
            a0=-kr * wc * T,
            b2=1 + wc * T + (0.5 * wn * T) ** 2,
            b1=0.5 * (wn * T) ** 2 - 2,
            b0=1 - wc * T + (0.5 * wn * T) ** 2,
        )
    if isinstance(method, TustinPrewarp):
        kw = prewarp_factor(method.omega_n if method.omega_n is not None else wn, T)
        # only the resonant frequency is pre-warped; the wc*T terms stay unscaled
        return BiquadCoeffs(
            a2=kr * wc * T,
            a1=0.0,
            a0=-kr * wc * T,
            b2=1 + wc * T + (0.5 * kw * wn * T) ** 2,
            b1=0.5 * (kw * wn * T) ** 2 - 2,
            b0=1 - wc * T + (0.5 * kw * wn * T) ** 2,
        )
    if isinstance(method, Sbt):
        al, be = method.params.alpha, method.params.beta
        if not method.params.in_stable_range():
            warnings.warn(
                f"alpha={al} below 0.5: discretized poles may leave the unit disk",
                StabilityRangeWarning,
                stacklevel=2,
            )
        return BiquadCoeffs(
            a2=2 * al * be * kr * wc * T,
            a1=-(4 * al - 2) * be * kr * wc * T,
            a0=-(2 - 2 * al) * be * kr * wc * T,
            b2=1 + 2 * al * be * wc * T + (al * be * wn * T) ** 2,
            b1=-2 - (4 * al - 2) * be * wc * T + 2 * al * (1 - al) * (be * wn * T) ** 2,
            b0=1 - (2 - 2 * al) * be * wc * T + ((1 - al) * be * wn * T) ** 2,
        )
    raise ParamError(f"unknown method tag {method!r} ({method_label(method)})")


def diff_eq_coeffs(c: BiquadCoeffs, tol: float = 1e-300) -> DiffEqCoeffs:
    """Divide the biquad through by b2 for the recursive update."""
    if abs(c.b2) < tol:
        raise NormalizationError(f"|b2| = {abs(c.b2):.3e} too small to normalize")
    return DiffEqCoeffs(
        kin0=c.a2 / c.b2,
        kin1=c.a1 / c.b2,
        kin2=c.a0 / c.b2,
        kout1=-c.b1 / c.b2,
        kout2=-c.b0 / c.b2,
    )


def pi_discretize(p: PiParams, T: float) -> DiffEqCoeffs:
    """Trapezoidal PI update: an accumulator with feed-through.

    y[n] = y[n-1] + Kp*(1 + T/(2*tau_i))*x[n] + Kp*(T/(2*tau_i) - 1)*x[n-1]
    """
    if not T > 0:
        raise ParamError("sample period must be positive")
    half = T / (2.0 * p.tau_i)
    return DiffEqCoeffs(
        kin0=p.kp * (1.0 + half),
        kin1=p.kp * (half - 1.0),
        kin2=0.0,
        kout1=1.0,
        kout2=0.0,
    )


def pir_discretize(
    pi: PiParams, qr: QrParams, method: Method, T: float
) -> tuple[DiffEqCoeffs, DiffEqCoeffs]:
    """Parallel legs of the digital controller.

    The PI leg always uses the trapezoidal update; only the resonant leg
    changes with the method under test.  Outputs of the two legs are summed.
    """
    return pi_discretize(pi, T), diff_eq_coeffs(qr_discretize(qr, method, T))


def sbt_params_straightforward(p: QrParams, T: float) -> SbtParams:
    """Shape 0.5 with the time factor that pins the resonance in place."""
    return SbtParams(0.5, prewarp_factor(p.omega_n, T))
