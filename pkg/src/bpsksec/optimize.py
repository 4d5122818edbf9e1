"""Maximize capacities over the transmit SNR and locate OW/TW crossings.

The optimizer is a coarse log-spaced grid scan followed by golden-section
refinement in log-eta. Capacities vanish at both eta extremes and the
curves are single-peaked, so the grid guards bracketing and golden section
does the refinement. Everything here is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacity import KINDS, capacity
from .channel import ChannelParams
from .mathkit import DEFAULT_QUAD_SPEC, QuadratureSpec, QuadratureNonConvergence

__all__ = [
    "OptimumPoint",
    "SweepPoint",
    "optimize_eta",
    "sweep_gamma",
    "crossing_threshold_fixed_eta",
    "crossing_threshold_optimized",
    "default_eta_bounds",
]

_GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)
_FLAT_EPS = 1e-15


@dataclass(frozen=True)
class OptimumPoint:
    kind: str
    gamma_max: float
    eta_star: float
    capacity_star: float
    status: str = "ok"  # "ok" | "flat" | "boundary"


@dataclass(frozen=True)
class SweepPoint:
    kind: str
    gamma: float
    eta: float
    value: float
    status: str = "ok"
    error: str = ""


def default_eta_bounds(gamma: float, lo: float = 1e-4, hi: float = 1e4) -> tuple[float, float]:
    """Scale the default eta search window so the single peak stays interior.

    The interesting transmit SNR scale follows the eavesdropper's SNR
    gamma^2 * eta ~ 1, so the window is stretched by 1/gamma^2 downward for
    strong eavesdroppers and upward for weak ones.
    """
    if gamma <= 0:
        return lo, hi
    g2 = gamma * gamma
    return lo * min(1.0, 1.0 / g2), hi * max(1.0, 1.0 / g2)


def _value(kind: str, gamma: float, eta: float, spec: QuadratureSpec) -> float:
    return capacity(kind, ChannelParams(eta=eta, gamma=gamma), spec).value


def optimize_eta(
    kind: str,
    gamma_max: float,
    bounds: tuple[float, float] = (1e-4, 1e4),
    spec: QuadratureSpec = DEFAULT_QUAD_SPEC,
    n_grid: int = 96,
    rel_tol: float = 1e-6,
) -> OptimumPoint:
    """Maximize capacity(kind, gamma_max, eta) for eta in bounds.

    A log-spaced grid of n_grid points locates the peak, then golden
    section shrinks the bracket below rel_tol relative width. A flat scan
    (e.g. the clamped one-way region) or a peak pinned at a boundary is
    flagged in the status instead of being refined.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown capacity kind {kind!r}")
    lo, hi = bounds
    if not (0 < lo < hi):
        raise ValueError(f"invalid eta bounds {bounds!r}")
    if n_grid < 64:
        raise ValueError("n_grid must be >= 64")
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), n_grid))
    vals = np.array([_value(kind, gamma_max, e, spec) for e in grid])
    i = int(np.argmax(vals))
    if vals[i] - vals.min() <= _FLAT_EPS:
        mid = math.sqrt(lo * hi)
        return OptimumPoint(kind, gamma_max, mid, float(vals[i]), "flat")
    if i == 0 or i == n_grid - 1:
        return OptimumPoint(kind, gamma_max, float(grid[i]), float(vals[i]), "boundary")

    a, b = math.log(grid[i - 1]), math.log(grid[i + 1])
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = _value(kind, gamma_max, math.exp(x1), spec)
    f2 = _value(kind, gamma_max, math.exp(x2), spec)
    while (b - a) > rel_tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = _value(kind, gamma_max, math.exp(x2), spec)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = _value(kind, gamma_max, math.exp(x1), spec)
    eta_star = math.exp(0.5 * (a + b))
    return OptimumPoint(kind, gamma_max, eta_star, _value(kind, gamma_max, eta_star, spec), "ok")


def sweep_gamma(
    kind: str,
    gamma_grid,
    eta: float | None = None,
    optimize: bool = False,
    bounds: tuple[float, float] | None = None,
    spec: QuadratureSpec = DEFAULT_QUAD_SPEC,
) -> list[SweepPoint]:
    """Evaluate one kind over a gamma grid, at fixed eta or optimized eta.

    Per-point failures are recorded in the row and the sweep continues.
    """
    if optimize == (eta is not None):
        raise ValueError("pass exactly one of eta=... or optimize=True")
    out = []
    for g in gamma_grid:
        g = float(g)
        try:
            if optimize:
                b = bounds if bounds is not None else default_eta_bounds(g)
                pt = optimize_eta(kind, g, b, spec)
                out.append(SweepPoint(kind, g, pt.eta_star, pt.capacity_star, pt.status))
            else:
                out.append(SweepPoint(kind, g, eta, _value(kind, g, eta, spec)))
        except QuadratureNonConvergence as exc:
            out.append(SweepPoint(kind, g, eta if eta is not None else math.nan,
                                  math.nan, "error", str(exc)))
    return out


def crossing_threshold_fixed_eta(
    eta: float,
    spec: QuadratureSpec = DEFAULT_QUAD_SPEC,
    gamma_tol: float = 3e-9,
) -> float | None:
    """gamma in (0,1) where the OW and TW soft capacities cross at fixed eta.

    The difference is positive as gamma -> 0 (the hard decision costs the
    two-way protocol) and negative at gamma = 1 (one-way clamps to zero),
    so a bracket exists except at degenerate eta where both capacities sit
    below the quadrature noise floor; then None is returned.
    """
    if not (eta > 0):
        raise ValueError("eta must be > 0")

    def diff(g: float) -> float:
        p = ChannelParams(eta=eta, gamma=g)
        return capacity("ow_soft", p, spec).value - capacity("tw_soft", p, spec).value

    lo, hi = 1e-6, 1.0 - 1e-6
    flo, fhi = diff(lo), diff(hi)
    floor = 100.0 * spec.abs_tol
    if abs(flo) < floor and abs(fhi) < floor:
        return None
    if not (flo > 0 and fhi < 0):
        return None
    while (hi - lo) > gamma_tol:
        mid = 0.5 * (lo + hi)
        if diff(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def crossing_threshold_optimized(
    spec: QuadratureSpec = DEFAULT_QUAD_SPEC,
    gamma_tol: float = 1e-7,
    bracket: tuple[float, float] = (0.05, 0.95),
) -> float:
    """gamma where the eta-optimized OW and TW soft capacities coincide.

    Bisection on C*_OW(gamma) - C*_TW(gamma) over (0, 1); each side is
    optimized over eta with gamma-scaled bounds.
    """

    def diff(g: float) -> float:
        ow = optimize_eta("ow_soft", g, default_eta_bounds(g), spec)
        tw = optimize_eta("tw_soft", g, default_eta_bounds(g), spec)
        return ow.capacity_star - tw.capacity_star

    lo, hi = bracket
    flo, fhi = diff(lo), diff(hi)
    if not (flo > 0 and fhi < 0):
        raise RuntimeError(
            f"no sign change on {bracket}: diff={flo!r}, {fhi!r}; widen the bracket"
        )
    while (hi - lo) > gamma_tol:
        mid = 0.5 * (lo + hi)
        if diff(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
