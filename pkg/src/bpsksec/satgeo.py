"""Satellite geometry: antenna pattern, path-loss ratio, worst-case gamma.

The eavesdropper's amplitude advantage combines the transmit antenna
pattern alpha(theta), the relative antenna gain mu = sqrt(g_L/g_E), the
propagation-loss ratio beta = rho_L / rho_E^(r/2) and the receiver noise
ratio gamma_n:

    gamma(theta_E, rho_E) = alpha(theta_E) * mu * beta(r, rho_E) / sqrt(gamma_n)

alpha may go negative on sidelobes (Bessel oscillation); only the signal
amplitude magnitude matters for the capacities, so the worst case
maximizes |gamma| over the eavesdropper region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacity import KINDS
from .mathkit import DEFAULT_QUAD_SPEC, QuadratureSpec, bessel_j
from .optimize import OptimumPoint, default_eta_bounds, optimize_eta

__all__ = [
    "AntennaPattern",
    "ScenarioGeometry",
    "ScenarioPreset",
    "PRESETS",
    "ScenarioRow",
    "alpha",
    "beta",
    "gamma_ratio",
    "worst_case_gamma",
    "scenario_table",
    "load_scenario_config",
]

_PATTERN_K = 2.0712  # makes alpha(theta_3db)^2 = 1/2 on the main lobe


@dataclass(frozen=True)
class AntennaPattern:
    """Circular-aperture pattern via J1/J3; theta_3db is the one-sided
    half-power beamwidth in radians."""

    theta_3db: float = math.radians(1.0)

    def __post_init__(self):
        if not (0.0 < self.theta_3db < 0.5 * math.pi):
            raise ValueError(f"theta_3db must be in (0, pi/2), got {self.theta_3db!r}")

    @property
    def k(self) -> float:
        return _PATTERN_K / math.sin(self.theta_3db)


def alpha(pattern: AntennaPattern, theta: float) -> float:
    """Normalized pattern J1(x)/(2x) + 36 J3(x)/x^3 at x = k sin(theta).

    The removable singularity at boresight evaluates to 1/4 + 36/48 = 1.
    """
    if not (0.0 <= theta <= 0.5 * math.pi):
        raise ValueError(f"theta must be in [0, pi/2], got {theta!r}")
    x = pattern.k * math.sin(theta)
    if x < 1e-3:
        # leading series: J1(x)/(2x) = 1/4 - x^2/32, 36 J3(x)/x^3 = 3/4 - 3x^2/64
        return 1.0 - 5.0 * x * x / 64.0
    return bessel_j(1, x) / (2.0 * x) + 36.0 * bessel_j(3, x) / x**3


def beta(r: float, rho_e: float, rho_l: float) -> float:
    """Propagation-loss amplitude ratio rho_L / rho_E^(r/2) (positive root)."""
    if rho_e <= 0 or rho_l <= 0:
        raise ValueError("path lengths must be > 0")
    if r < 2:
        raise ValueError(f"path-loss exponent must be >= 2, got {r!r}")
    return rho_l / rho_e ** (0.5 * r)


@dataclass(frozen=True)
class ScenarioGeometry:
    """Rectangular eavesdropper region: theta in [theta_min, theta_max]
    (radians), rho_E in [rho_e_min, rho_e_max] (km)."""

    rho_legit: float
    rho_e_min: float
    rho_e_max: float
    theta_min: float = 0.0
    theta_max: float = 0.5 * math.pi
    r: float = 2.0
    mu: float = 1.0
    gamma_n: float = 1.0

    def __post_init__(self):
        if self.rho_legit <= 0 or self.rho_e_min <= 0:
            raise ValueError("path lengths must be > 0")
        if self.rho_e_max < self.rho_e_min:
            raise ValueError("empty rho_E range")
        if not (0 <= self.theta_min <= self.theta_max <= 0.5 * math.pi):
            raise ValueError("invalid theta range")
        if self.r < 2:
            raise ValueError("path-loss exponent must be >= 2")
        if self.mu <= 0 or self.gamma_n <= 0:
            raise ValueError("mu and gamma_n must be > 0")


def gamma_ratio(pattern: AntennaPattern, theta_e: float, rho_e: float,
                geom: ScenarioGeometry) -> float:
    """alpha(theta_E) * mu * beta(r, rho_E) / sqrt(gamma_n); may be negative
    on sidelobes."""
    return (
        alpha(pattern, theta_e)
        * geom.mu
        * beta(geom.r, rho_e, geom.rho_legit)
        / math.sqrt(geom.gamma_n)
    )


def worst_case_gamma(
    pattern: AntennaPattern,
    geom: ScenarioGeometry,
    n_theta: int = 721,
    n_rho: int = 256,
    refine_rounds: int = 6,
) -> tuple[float, tuple[float, float]]:
    """max |gamma| over the region, with the maximizing (theta_E, rho_E).

    Grid scan including the region corners, then local re-gridding around
    the running argmax. beta is separable and monotone in rho, but alpha
    oscillates, so the scan runs over the full rectangle.
    """
    t_lo, t_hi = geom.theta_min, geom.theta_max
    r_lo, r_hi = geom.rho_e_min, geom.rho_e_max

    def scan(tl, th, rl, rh, nt, nr):
        thetas = np.linspace(tl, th, nt) if th > tl else np.array([tl])
        rhos = np.linspace(rl, rh, nr) if rh > rl else np.array([rl])
        a = np.array([abs(alpha(pattern, t)) for t in thetas])
        b = np.abs(geom.mu / math.sqrt(geom.gamma_n) * geom.rho_legit / rhos ** (0.5 * geom.r))
        g = np.outer(a, b)
        i, j = np.unravel_index(int(np.argmax(g)), g.shape)
        return float(g[i, j]), float(thetas[i]), float(rhos[j]), thetas, rhos, i, j

    best, bt, br, thetas, rhos, i, j = scan(t_lo, t_hi, r_lo, r_hi, n_theta, n_rho)
    for _ in range(refine_rounds):
        dt = (thetas[min(i + 1, len(thetas) - 1)] - thetas[max(i - 1, 0)]) or 0.0
        dr = (rhos[min(j + 1, len(rhos) - 1)] - rhos[max(j - 1, 0)]) or 0.0
        if dt == 0.0 and dr == 0.0:
            break
        tl, th = max(t_lo, bt - dt), min(t_hi, bt + dt)
        rl, rh = max(r_lo, br - dr), min(r_hi, br + dr)
        cand, ct, cr, thetas, rhos, i, j = scan(tl, th, rl, rh, 65, 65)
        if cand >= best:
            best, bt, br = cand, ct, cr
    return best, (bt, br)


# The five reference scenarios. Heights in km; the legitimate terminal is
# GEO at 36000 km. In the downlink cases (II_*) the eavesdropper's closest
# approach is the height difference along boresight, with a 1 km keep-out
# for a co-orbital GEO eavesdropper.
_RHO_GEO = 36000.0


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    geometry: ScenarioGeometry

    @property
    def heights(self) -> tuple[float, float]:
        return self.geometry.rho_e_min, self.geometry.rho_e_max


PRESETS = {
    "I_MEO": ScenarioPreset("I_MEO", ScenarioGeometry(_RHO_GEO, 5000.0, 20000.0)),
    "I_LEO": ScenarioPreset("I_LEO", ScenarioGeometry(_RHO_GEO, 150.0, 2000.0)),
    "II_GEO": ScenarioPreset("II_GEO", ScenarioGeometry(_RHO_GEO, 1.0, _RHO_GEO)),
    "II_MEO": ScenarioPreset(
        "II_MEO", ScenarioGeometry(_RHO_GEO, _RHO_GEO - 20000.0, _RHO_GEO - 5000.0)
    ),
    "II_LEO": ScenarioPreset(
        "II_LEO", ScenarioGeometry(_RHO_GEO, _RHO_GEO - 2000.0, _RHO_GEO - 150.0)
    ),
}


@dataclass(frozen=True)
class ScenarioRow:
    name: str
    gamma_max: float
    c_tw_soft: float
    c_tw_hard: float
    c_ow_soft: float
    c_ow_hard: float
    optima: dict[str, OptimumPoint]


def scenario_table(
    presets,
    pattern: AntennaPattern | None = None,
    spec: QuadratureSpec | None = None,
) -> list[ScenarioRow]:
    """Worst-case gamma and the four optimized capacities per scenario.

    The quadrature tolerance defaults to 1e-14 here: extreme eavesdropper
    advantages push the soft capacities to ~1e-12 bits and the default
    1e-10 tolerance would drown them.
    """
    pattern = pattern or AntennaPattern()
    spec = spec or QuadratureSpec(abs_tol=1e-14)
    rows = []
    for p in presets:
        preset = PRESETS[p] if isinstance(p, str) else p
        gmax, _ = worst_case_gamma(pattern, preset.geometry)
        optima = {
            kind: optimize_eta(kind, gmax, default_eta_bounds(gmax), spec)
            for kind in KINDS
        }
        rows.append(
            ScenarioRow(
                preset.name,
                gmax,
                optima["tw_soft"].capacity_star,
                optima["tw_hard"].capacity_star,
                optima["ow_soft"].capacity_star,
                optima["ow_hard"].capacity_star,
                optima,
            )
        )
    return rows


_CONFIG_KEYS = {
    "name", "rho_l_km", "rho_e_min_km", "rho_e_max_km",
    "theta_min_deg", "theta_max_deg", "r", "mu", "gamma_n", "theta3db_deg",
}


def load_scenario_config(path) -> tuple[ScenarioPreset, AntennaPattern]:
    """Parse a line-based key=value scenario file.

    Keys: name, rho_l_km, rho_e_min_km, rho_e_max_km, theta_min_deg,
    theta_max_deg, r, mu, gamma_n, theta3db_deg. '#' starts a comment.
    Returns the scenario preset and the antenna pattern.
    """
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = val
    for required in ("rho_l_km", "rho_e_min_km", "rho_e_max_km"):
        if required not in values:
            raise ValueError(f"{path}: missing required key {required!r}")
    geom = ScenarioGeometry(
        rho_legit=float(values["rho_l_km"]),
        rho_e_min=float(values["rho_e_min_km"]),
        rho_e_max=float(values["rho_e_max_km"]),
        theta_min=math.radians(float(values.get("theta_min_deg", "0"))),
        theta_max=math.radians(float(values.get("theta_max_deg", "90"))),
        r=float(values.get("r", "2")),
        mu=float(values.get("mu", "1")),
        gamma_n=float(values.get("gamma_n", "1")),
    )
    preset = ScenarioPreset(values.get("name", "custom"), geom)
    theta3db = math.radians(float(values.get("theta3db_deg", "1")))
    return preset, AntennaPattern(theta3db)
