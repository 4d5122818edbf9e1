"""Normalized Gaussian-BPSK wiretap channel model.

Bit b is transmitted as V = (-1)^b, so b=0 sends +1. After normalizing by
the legitimate receiver's noise density, the legitimate observation is
Y = sqrt(eta) V + N1 and the eavesdropper's is Z = gamma sqrt(eta) V + N2,
with independent unit-variance real Gaussians N1, N2. The one-dimensional
real model is used throughout; hard decisions map values >= 0 to bit 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mathkit import erfc

__all__ = [
    "ChannelParams",
    "PhysicalLinkBudget",
    "to_normalized",
    "crossover_prob",
    "eve_marginal_density",
    "eve_posterior",
]

_TINY = 5e-324
_ALMOST_ONE = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class ChannelParams:
    """Normalized link pair: eta is the legitimate SNR P/N, gamma the
    eavesdropper's amplitude advantage gamma_g/sqrt(gamma_n)."""

    eta: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError(f"eta must be finite and > 0, got {self.eta!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma!r}")

    @property
    def eve_amplitude(self) -> float:
        """gamma * sqrt(eta): the mean of Eve's conditional observation."""
        return self.gamma * math.sqrt(self.eta)


@dataclass(frozen=True)
class PhysicalLinkBudget:
    """Un-normalized link description; signal_power/noise_power_legit are
    optional and, when given, must agree with energy_per_symbol over
    noise_density_legit."""

    energy_per_symbol: float
    noise_density_legit: float
    gamma_g: float
    gamma_n: float
    signal_power: float | None = None
    noise_power_legit: float | None = None

    def __post_init__(self):
        for name in ("energy_per_symbol", "noise_density_legit", "gamma_g", "gamma_n"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if (self.signal_power is None) != (self.noise_power_legit is None):
            raise ValueError("signal_power and noise_power_legit must be given together")
        if self.signal_power is not None:
            if self.signal_power <= 0 or self.noise_power_legit <= 0:
                raise ValueError("powers must be > 0")
            ratio_e = self.energy_per_symbol / self.noise_density_legit
            ratio_p = self.signal_power / self.noise_power_legit
            if not math.isclose(ratio_e, ratio_p, rel_tol=1e-9):
                raise ValueError(
                    f"inconsistent SNR: E_s/n = {ratio_e!r} but P/N = {ratio_p!r}"
                )


def to_normalized(budget: PhysicalLinkBudget) -> ChannelParams:
    """eta = E_s/n (= P/N), gamma = gamma_g / sqrt(gamma_n)."""
    return ChannelParams(
        eta=budget.energy_per_symbol / budget.noise_density_legit,
        gamma=budget.gamma_g / math.sqrt(budget.gamma_n),
    )


def crossover_prob(eta: float) -> float:
    """Hard-decision bit-flip probability 0.5 erfc(sqrt(eta/2)).

    Eve's crossover is crossover_prob(gamma**2 * eta) since her received
    amplitude is gamma*sqrt(eta).
    """
    if not (math.isfinite(eta) and eta >= 0):
        raise ValueError(f"eta must be finite and >= 0, got {eta!r}")
    return 0.5 * erfc(math.sqrt(0.5 * eta))


def eve_marginal_density(z, p: ChannelParams):
    """P_Z(z): equal mixture of unit-variance Gaussians at +-gamma*sqrt(eta)."""
    m = p.eve_amplitude
    z = np.asarray(z, dtype=float)
    val = (np.exp(-0.5 * (z + m) ** 2) + np.exp(-0.5 * (z - m) ** 2)) / (
        2.0 * math.sqrt(2.0 * math.pi)
    )
    return float(val) if val.ndim == 0 else val


def eve_posterior(z, p: ChannelParams):
    """P(b=0 | Z=z), computed as the logistic of 2*gamma*sqrt(eta)*z.

    b=0 sends +1, so the posterior increases with z. The logistic form
    avoids the over/underflow of the ratio of Gaussian exponentials; the
    result is clamped to the open interval (0, 1) at double precision.
    """
    m = p.eve_amplitude
    z = np.asarray(z, dtype=float)
    t = 2.0 * m * z
    q = np.empty_like(t)
    pos = t >= 0
    q[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    et = np.exp(t[~pos])
    q[~pos] = et / (1.0 + et)
    q = np.clip(q, _TINY, _ALMOST_ONE)
    return float(q) if q.ndim == 0 else q
