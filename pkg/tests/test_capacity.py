import math

import numpy as np
import pytest
from scipy.integrate import quad

from bpsksec.capacity import c_ow_hard, c_ow_soft, c_tw_hard, c_tw_soft, capacity
from bpsksec.channel import ChannelParams, crossover_prob
from bpsksec.mathkit import QuadratureSpec, binary_entropy

# quadrature values frozen from an independent scipy.integrate.quad oracle
OW_SOFT_HALF_GAMMA_ETA4 = 0.4268781316415535
TW_SOFT_GAMMA1_ETA2 = 0.14911171013442936


def mc_ow_soft_oracle(gamma, eta, n=10_000_000, seed=12345):
    """Monte Carlo I(A;Y) - I(A;Z) via the log-likelihood-ratio estimator."""
    rng = np.random.default_rng(seed)
    s = math.sqrt(eta)

    def mi(scale):
        a = rng.integers(0, 2, n)
        mean = scale * np.where(a == 0, 1.0, -1.0)
        y = mean + rng.standard_normal(n)
        num = np.exp(-0.5 * (y - mean) ** 2)
        den = 0.5 * (np.exp(-0.5 * (y - scale) ** 2) + np.exp(-0.5 * (y + scale) ** 2))
        return float(np.mean(np.log2(num / den)))

    return mi(s) - mi(gamma * s)


def mc_tw_soft_oracle(gamma, eta, n=10_000_000, bins=10_000, seed=12345):
    """Binned plug-in estimate of I(A;B) - I(A;Z) from sampled rounds."""
    rng = np.random.default_rng(seed)
    b = rng.integers(0, 2, n)
    v = np.where(b == 0, 1.0, -1.0)
    y = math.sqrt(eta) * v + rng.standard_normal(n)
    z = gamma * math.sqrt(eta) * v + rng.standard_normal(n)
    a = (y < 0).astype(np.int64)

    def mi(x, yv, ny):
        tab = np.bincount(x * ny + yv, minlength=2 * ny).reshape(2, ny).astype(float)
        p = tab / tab.sum()
        px = p.sum(1, keepdims=True)
        py = p.sum(0, keepdims=True)
        m = p > 0
        return float((p[m] * np.log2(p[m] / (px @ py)[m])).sum())

    lim = float(np.abs(z).max()) + 1e-9
    zi = np.clip(np.digitize(z, np.linspace(-lim, lim, bins - 1)), 0, bins - 1)
    return mi(a, b.astype(np.int64), 2) - mi(a, zi, bins)


class TestOwSoft:
    def test_clamped_at_gamma_one(self):
        for eta in (0.5, 2.0, 50.0):
            assert c_ow_soft(ChannelParams(eta=eta, gamma=1.0)).value == 0.0
            assert c_ow_soft(ChannelParams(eta=eta, gamma=2.5)).value == 0.0

    def test_blind_eavesdropper_high_snr_approaches_one_bit(self):
        res = c_ow_soft(ChannelParams(eta=1e4, gamma=0.0))
        assert res.value == pytest.approx(1.0, abs=1e-6)

    def test_frozen_quadrature_value(self):
        res = c_ow_soft(ChannelParams(eta=4.0, gamma=0.5))
        assert res.value == pytest.approx(OW_SOFT_HALF_GAMMA_ETA4, abs=1e-9)

    def test_against_monte_carlo_oracle(self):
        mc = mc_ow_soft_oracle(0.5, 4.0)
        assert c_ow_soft(ChannelParams(eta=4.0, gamma=0.5)).value == pytest.approx(
            mc, abs=1e-3
        )

    def test_metadata(self):
        res = c_ow_soft(ChannelParams(eta=4.0, gamma=0.5))
        assert (res.direction, res.eve_mode) == ("one_way", "soft")


class TestOwHard:
    def test_clamped_at_gamma_one(self):
        assert c_ow_hard(ChannelParams(eta=3.0, gamma=1.0)).value == 0.0

    def test_clamped_beyond_one(self):
        assert c_ow_hard(ChannelParams(eta=3.0, gamma=2.0)).value == 0.0

    def test_blind_eavesdropper_value(self):
        res = c_ow_hard(ChannelParams(eta=2.0, gamma=0.0))
        expected = 1.0 - binary_entropy(0.07864960352514257)
        assert res.value == pytest.approx(expected, abs=1e-12)


class TestTwHard:
    def test_noiseless_eavesdropper_gives_zero(self):
        # eps_E underflows to 0, composed entropy equals h(eps_A)
        assert c_tw_hard(ChannelParams(eta=2.0, gamma=1e8)).value == 0.0

    def test_blind_eavesdropper_composition(self):
        eta = 1.6423744151498165  # eps_A = 0.1
        res = c_tw_hard(ChannelParams(eta=eta, gamma=0.0))
        assert res.value == pytest.approx(1.0 - binary_entropy(0.1), abs=1e-10)

    def test_positive_at_equal_links(self):
        for eta in np.logspace(-1, 1, 7):
            val = c_tw_hard(ChannelParams(eta=float(eta), gamma=1.0)).value
            eps = crossover_prob(float(eta))
            expected = binary_entropy(2 * eps * (1 - eps)) - binary_entropy(eps)
            assert val == pytest.approx(expected, abs=1e-12)
            assert val > 0


class TestTwSoft:
    @pytest.mark.parametrize("eta", [0.5, 2.0, 8.0])
    def test_blind_eavesdropper_limit(self, eta):
        res = c_tw_soft(ChannelParams(eta=eta, gamma=1e-6))
        expected = 1.0 - binary_entropy(crossover_prob(eta))
        assert res.value == pytest.approx(expected, abs=1e-3)

    def test_vanishes_when_both_links_clean(self):
        assert c_tw_soft(ChannelParams(eta=1e4, gamma=1.0)).value < 1e-4

    def test_frozen_quadrature_value(self):
        res = c_tw_soft(ChannelParams(eta=2.0, gamma=1.0))
        assert res.value == pytest.approx(TW_SOFT_GAMMA1_ETA2, abs=1e-9)

    def test_against_binned_monte_carlo_oracle(self):
        mc = mc_tw_soft_oracle(1.0, 2.0)
        assert c_tw_soft(ChannelParams(eta=2.0, gamma=1.0)).value == pytest.approx(
            mc, abs=2e-3
        )

    @pytest.mark.parametrize("gamma", [0.1, 1.0, 10.0, 100.0])
    @pytest.mark.parametrize("eta", [0.1, 1.0, 10.0])
    def test_strictly_positive_for_finite_gamma(self, gamma, eta):
        assert c_tw_soft(ChannelParams(eta=eta, gamma=gamma)).value > 0.0


def skewed_mixture_entropy_bits(gse, w):
    """Entropy of w N(gse,1) + (1-w) N(-gse,1) via an independent integrator."""

    def u(z):
        p = w * math.exp(-0.5 * (z - gse) ** 2) + (1 - w) * math.exp(-0.5 * (z + gse) ** 2)
        p /= math.sqrt(2 * math.pi)
        return -p * math.log2(p) if p > 0 else 0.0

    val, _ = quad(u, -gse - 10, gse + 10, limit=400, epsabs=1e-13)
    return val


class TestDegradednessIdentity:
    @pytest.mark.parametrize("gamma,eta", [(0.5, 2.0), (1.0, 2.0), (2.0, 1.0), (1.5, 0.5)])
    def test_conditional_mi_equals_difference_form(self, gamma, eta):
        # I(A;B|Z) must equal I(A;B) - I(A;Z) on the hard-in/soft-out chain
        p = ChannelParams(eta=eta, gamma=gamma)
        lhs = c_tw_soft(p, QuadratureSpec(abs_tol=1e-12)).value
        eps = crossover_prob(eta)
        gse = p.eve_amplitude
        i_ab = 1.0 - binary_entropy(eps)
        h_z = skewed_mixture_entropy_bits(gse, 0.5)
        h_z_given_a = skewed_mixture_entropy_bits(gse, 1.0 - eps)
        i_az = h_z - h_z_given_a
        assert lhs == pytest.approx(i_ab - i_az, abs=1e-8)


GAMMA_GRID = [0.05, 0.3, 0.9, 1.0, 1.5, 5.0]
ETA_GRID = [0.2, 1.0, 4.0, 20.0]


class TestOrderingInvariants:
    def test_hard_eavesdropper_never_better_for_legitimate_pair(self):
        # E is a function of Z, so the soft value never exceeds the hard one
        for g in GAMMA_GRID:
            for e in ETA_GRID:
                p = ChannelParams(eta=e, gamma=g)
                assert c_tw_hard(p).value >= c_tw_soft(p).value >= 0.0

    def test_two_way_dominates_one_way_hard(self):
        for g in [g for g in GAMMA_GRID if g < 1]:
            for e in ETA_GRID:
                p = ChannelParams(eta=e, gamma=g)
                assert c_tw_hard(p).value >= c_ow_hard(p).value - 1e-12

    def test_one_way_clamp(self):
        for g in [1.0, 1.5, 5.0]:
            for e in ETA_GRID:
                p = ChannelParams(eta=e, gamma=g)
                assert c_ow_soft(p).value == 0.0
                assert c_ow_hard(p).value == 0.0

    def test_ow_tw_soft_ordering_flips_with_gamma(self):
        # below the fixed-eta crossing the one-way protocol wins, above it loses
        eta = 2.0
        lo = ChannelParams(eta=eta, gamma=0.1)
        hi = ChannelParams(eta=eta, gamma=0.9)
        assert c_ow_soft(lo).value > c_tw_soft(lo).value
        assert c_ow_soft(hi).value < c_tw_soft(hi).value


class TestDispatch:
    def test_known_kinds(self):
        p = ChannelParams(eta=1.0, gamma=0.5)
        for kind in ("ow_soft", "ow_hard", "tw_soft", "tw_hard"):
            assert capacity(kind, p).value >= 0.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            capacity("sideways", ChannelParams(eta=1.0, gamma=0.5))

    def test_results_bounded_by_one_bit(self):
        for g in GAMMA_GRID:
            for e in ETA_GRID:
                p = ChannelParams(eta=e, gamma=g)
                for kind in ("ow_soft", "ow_hard", "tw_soft", "tw_hard"):
                    assert 0.0 <= capacity(kind, p).value <= 1.0
