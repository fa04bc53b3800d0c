"""Loss surfaces over (alpha, beta) and the deterministic two-stage search.

The search scans a coarse inclusive grid over the constraint box, then
refines around the best cell with alternating per-axis golden-section
steps.  The straightforward pair (0.5, pre-warp factor) is always
evaluated first when it lies inside the box, so the returned loss never
exceeds it.  Everything is deterministic: same inputs, same trace.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .analysis import FrequencyGrid, default_rmse_grid, _response_arrays
from .controllers import QrParams, qr_continuous, qr_discretize, sbt_params_straightforward
from .errors import ParamError, UnstableWarning
from .lti import Polynomial, quadratic_roots
from .transforms import Sbt, SbtParams, equivalent_s_from_z, z_from_s

__all__ = [
    "LossConfig",
    "SearchConfig",
    "TraceEntry",
    "OptimizeResult",
    "q_loss",
    "optimize_alpha_beta",
]

LOSS_KINDS = ("mag_rmse_db", "mag_rmse_linear", "pole_distance")

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LossConfig:
    """What the scalar loss measures.

    mag_rmse_db      weighted RMS of the dB magnitude error over the grid
    mag_rmse_linear  same but on plain magnitude differences
    pole_distance    |equivalent pole - original pole| / omega_n
    """

    grid: FrequencyGrid = field(default_factory=default_rmse_grid)
    loss_kind: str = "mag_rmse_db"
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.loss_kind not in LOSS_KINDS:
            raise ParamError(f"loss_kind must be one of {LOSS_KINDS}, got {self.loss_kind!r}")
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != len(self.grid):
                raise ParamError(
                    f"{len(w)} weights for a {len(self.grid)}-point grid"
                )
            if any(x < 0 for x in w) or sum(w) <= 0:
                raise ParamError("weights must be non-negative with positive sum")
            object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class SearchConfig:
    """Constraint box and search effort."""

    alpha_range: tuple[float, float] = (0.5, 1.0)
    beta_range: tuple[float, float] = (0.9, 1.1)
    coarse_points: int = 41
    refine_iters: int = 40

    def __post_init__(self):
        a_lo, a_hi = self.alpha_range
        b_lo, b_hi = self.beta_range
        if not (0.5 <= a_lo <= a_hi <= 1.0):
            raise ParamError(f"alpha_range must satisfy 0.5 <= lo <= hi <= 1, got {self.alpha_range!r}")
        if not (0.0 < b_lo <= b_hi):
            raise ParamError(f"beta_range must satisfy 0 < lo <= hi, got {self.beta_range!r}")
        if self.coarse_points < 1:
            raise ParamError("coarse_points must be at least 1")
        if self.refine_iters < 0:
            raise ParamError("refine_iters must be non-negative")


@dataclass(frozen=True)
class TraceEntry:
    stage: str
    alpha: float
    beta: float
    loss: float
    best_loss: float


@dataclass(frozen=True)
class OptimizeResult:
    alpha: float
    beta: float
    loss_value: float
    straightforward: SbtParams
    straightforward_loss: float | None
    trace: tuple[TraceEntry, ...]


@lru_cache(maxsize=32)
def _analog_mag(p: QrParams, grid: FrequencyGrid) -> np.ndarray:
    mag_db, _, _ = _response_arrays(qr_continuous(p), grid.as_array())
    return mag_db


def q_loss(alpha: float, beta: float, p: QrParams, T: float, cfg: LossConfig | None = None) -> float:
    """Scalar discretization quality loss at one (alpha, beta) pair.

    Emits UnstableWarning when the discretized denominator has a root
    outside the closed unit disk (possible only for alpha below 0.5).
    """
    if cfg is None:
        cfg = LossConfig()
    params = SbtParams(alpha, beta)
    biq = qr_discretize(p, Sbt(params), T)
    for r in quadratic_roots(Polynomial([biq.b0, biq.b1, biq.b2])):
        if abs(r) > 1.0 + 1e-12:
            warnings.warn(
                f"discrete pole at |z|={abs(r):.6f} outside the unit disk "
                f"for alpha={alpha}, beta={beta}",
                UnstableWarning,
                stacklevel=2,
            )
            break
    if cfg.loss_kind == "pole_distance":
        rad = p.omega_n**2 - p.omega_c**2
        original = complex(-p.omega_c, math.sqrt(rad))
        eq = equivalent_s_from_z(z_from_s(original, params, T), T)
        return abs(eq - original) / p.omega_n

    freqs = cfg.grid.as_array()
    disc = biq.to_transfer(T)
    if cfg.loss_kind == "mag_rmse_db":
        mag_a = _analog_mag(p, cfg.grid)
        mag_d, _, _ = _response_arrays(disc, freqs)
        err = mag_a - mag_d
    else:
        x_a = 1j * 2.0 * math.pi * freqs
        z = np.exp(1j * 2.0 * math.pi * freqs * T)
        ha = qr_continuous(p).num(x_a) / qr_continuous(p).den(x_a)
        hd = disc.num(z) / disc.den(z)
        err = np.abs(ha) - np.abs(hd)
    if cfg.weights is not None:
        w = np.asarray(cfg.weights)
        return float(np.sqrt(np.sum(w * err * err) / np.sum(w)))
    return float(np.sqrt(np.mean(err * err)))


def _axis_points(lo: float, hi: float, n: int) -> np.ndarray:
    if hi == lo:
        return np.asarray([lo])
    return np.linspace(lo, hi, n)


def optimize_alpha_beta(
    p: QrParams,
    T: float,
    loss_cfg: LossConfig | None = None,
    search_cfg: SearchConfig | None = None,
) -> OptimizeResult:
    """Minimize q_loss over the constraint box.

    Stage one evaluates the straightforward pair (when inside the box) and
    an inclusive coarse_points x coarse_points grid; ties keep the earliest
    cell.  Stage two alternates golden-section steps on alpha and beta in a
    bracket spanning the coarse neighbors of the best cell.  The best point
    ever evaluated is returned, so the result never loses to the
    straightforward design it is meant to improve on.
    """
    if loss_cfg is None:
        loss_cfg = LossConfig()
    if search_cfg is None:
        search_cfg = SearchConfig()

    trace: list[TraceEntry] = []
    best: dict = {"alpha": None, "beta": None, "loss": math.inf}

    def evaluate(stage: str, a: float, b: float) -> float:
        val = q_loss(a, b, p, T, loss_cfg)
        if val < best["loss"]:
            best.update(alpha=a, beta=b, loss=val)
        trace.append(TraceEntry(stage, a, b, val, best["loss"]))
        return val

    sf = sbt_params_straightforward(p, T)
    a_lo, a_hi = search_cfg.alpha_range
    b_lo, b_hi = search_cfg.beta_range
    sf_inside = a_lo <= sf.alpha <= a_hi and b_lo <= sf.beta <= b_hi
    sf_loss = evaluate("straightforward", sf.alpha, sf.beta) if sf_inside else None

    alphas = _axis_points(a_lo, a_hi, search_cfg.coarse_points)
    betas = _axis_points(b_lo, b_hi, search_cfg.coarse_points)
    best_cell = (0, 0)
    best_cell_loss = math.inf
    for i, a in enumerate(alphas):
        for j, b in enumerate(betas):
            val = evaluate("coarse", float(a), float(b))
            if val < best_cell_loss:
                best_cell_loss = val
                best_cell = (i, j)

    i, j = best_cell
    a_left = float(alphas[max(i - 1, 0)])
    a_right = float(alphas[min(i + 1, len(alphas) - 1)])
    b_left = float(betas[max(j - 1, 0)])
    b_right = float(betas[min(j + 1, len(betas) - 1)])
    cur_a = float(alphas[i])
    cur_b = float(betas[j])

    for _ in range(search_cfg.refine_iters):
        if a_right > a_left:
            x1 = a_right - (a_right - a_left) * _INVPHI
            x2 = a_left + (a_right - a_left) * _INVPHI
            f1 = evaluate("refine-alpha", x1, cur_b)
            f2 = evaluate("refine-alpha", x2, cur_b)
            if f1 <= f2:
                a_right, cur_a = x2, x1
            else:
                a_left, cur_a = x1, x2
        if b_right > b_left:
            y1 = b_right - (b_right - b_left) * _INVPHI
            y2 = b_left + (b_right - b_left) * _INVPHI
            g1 = evaluate("refine-beta", cur_a, y1)
            g2 = evaluate("refine-beta", cur_a, y2)
            if g1 <= g2:
                b_right, cur_b = y2, y1
            else:
                b_left, cur_b = y1, y2

    return OptimizeResult(
        alpha=best["alpha"],
        beta=best["beta"],
        loss_value=best["loss"],
        straightforward=sf,
        straightforward_loss=sf_loss,
        trace=tuple(trace),
    )
