"""The four secrecy capacities of a normalized Gaussian-BPSK wiretap link.

One-way (OW): the secret flows directly over the noisy channel; positive
only when the eavesdropper's amplitude advantage gamma stays below 1, and
clamped to zero otherwise. Two-way (TW): the receiver first broadcasts
randomness over the noisy channel and the secret is masked over a public
channel; positive for every finite gamma. "hard"/"soft" refer to the
eavesdropper's detector. All values are in bits per channel use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels
from .channel import ChannelParams, crossover_prob
from .mathkit import DEFAULT_QUAD_SPEC, QuadratureSpec, binary_entropy

__all__ = [
    "CapacityResult",
    "KINDS",
    "c_ow_soft",
    "c_ow_hard",
    "c_tw_hard",
    "c_tw_soft",
    "capacity",
    "mixture_entropy_bits",
]


@dataclass(frozen=True)
class CapacityResult:
    value: float  # bits per channel use, in [0, 1]
    direction: str  # "one_way" | "two_way"
    eve_mode: str  # "hard" | "soft"
    params: ChannelParams


def mixture_entropy_bits(s: float, spec: QuadratureSpec = DEFAULT_QUAD_SPEC) -> float:
    """Differential entropy (bits) of 0.5 N(-s,1) + 0.5 N(s,1)."""
    return _kernels.mix_entropy_bits(s, spec.abs_tol, spec.max_depth, spec.half_width_padding)


def c_ow_soft(p: ChannelParams, spec: QuadratureSpec = DEFAULT_QUAD_SPEC) -> CapacityResult:
    """One-way capacity with soft decisions on both receivers.

    Equals the difference of the two mixture output entropies; the unit
    conditional noise entropies cancel. Zero when gamma >= 1 (the
    degradedness condition fails).
    """
    if p.gamma >= 1.0:
        value = 0.0
    else:
        s = math.sqrt(p.eta)
        value = mixture_entropy_bits(s, spec) - mixture_entropy_bits(p.gamma * s, spec)
        value = max(0.0, value)
    return CapacityResult(value, "one_way", "soft", p)


def c_ow_hard(p: ChannelParams, spec: QuadratureSpec = DEFAULT_QUAD_SPEC) -> CapacityResult:
    """One-way capacity with hard decisions: h(eps_E*) - h(eps_B*), clamped."""
    if p.gamma >= 1.0:
        value = 0.0
    else:
        eps_b = crossover_prob(p.eta)
        eps_e = crossover_prob(p.gamma * p.gamma * p.eta)
        value = max(0.0, binary_entropy(eps_e) - binary_entropy(eps_b))
    return CapacityResult(value, "one_way", "hard", p)


def c_tw_hard(p: ChannelParams, spec: QuadratureSpec = DEFAULT_QUAD_SPEC) -> CapacityResult:
    """Two-way capacity against a hard-decision eavesdropper.

    h(eps_E + eps_A - 2 eps_E eps_A) - h(eps_A); never clamped, and
    non-negative because composing with an extra flip moves the error
    probability toward 1/2.
    """
    eps_a = crossover_prob(p.eta)
    eps_e = crossover_prob(p.gamma * p.gamma * p.eta)
    delta = eps_e * (1.0 - 2.0 * eps_a)  # composed = eps_a + delta
    if 0.0 < eps_a < 0.5 and delta < 1e-9 * eps_a:
        # h(eps_a + delta) - h(eps_a) cancels catastrophically once delta
        # drops below the entropy's double-precision resolution
        value = delta * math.log2((1.0 - eps_a) / eps_a)
    else:
        value = binary_entropy(eps_a + delta) - binary_entropy(eps_a)
    return CapacityResult(max(0.0, value), "two_way", "hard", p)


def c_tw_soft(p: ChannelParams, spec: QuadratureSpec = DEFAULT_QUAD_SPEC) -> CapacityResult:
    """Two-way capacity against a soft-decision eavesdropper: I(A;B|Z).

    Integrates P_Z(z) [h(q eps_A + (1-q)(1-eps_A)) - h(eps_A)] with
    q = P(b=0|z); strictly positive for every finite gamma when
    0 < eps_A < 1/2. Converges to 1 - h(eps_A) as gamma -> 0.
    """
    eps_a = crossover_prob(p.eta)
    value = _kernels.tw_soft_bits(
        p.eve_amplitude, eps_a, spec.abs_tol, spec.max_depth, spec.half_width_padding
    )
    return CapacityResult(max(0.0, value), "two_way", "soft", p)


KINDS = {
    "ow_soft": c_ow_soft,
    "ow_hard": c_ow_hard,
    "tw_soft": c_tw_soft,
    "tw_hard": c_tw_hard,
}


def capacity(kind: str, p: ChannelParams, spec: QuadratureSpec = DEFAULT_QUAD_SPEC) -> CapacityResult:
    """Dispatch by kind name: ow_soft | ow_hard | tw_soft | tw_hard."""
    try:
        fn = KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown capacity kind {kind!r}, expected one of {sorted(KINDS)}")
    return fn(p, spec)
