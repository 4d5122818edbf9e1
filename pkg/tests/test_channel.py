import math

import numpy as np
import pytest

from bpsksec.channel import (
    ChannelParams,
    PhysicalLinkBudget,
    crossover_prob,
    eve_marginal_density,
    eve_posterior,
    to_normalized,
)
from bpsksec.mathkit import QuadratureSpec, integrate


class TestToNormalized:
    def test_identity(self):
        p = to_normalized(PhysicalLinkBudget(1.0, 1.0, 1.0, 1.0))
        assert (p.eta, p.gamma) == (1.0, 1.0)

    def test_noise_ratio_enters_as_square_root(self):
        p = to_normalized(PhysicalLinkBudget(2.0, 1.0, 1.0, 4.0))
        assert (p.eta, p.gamma) == (2.0, 0.5)

    def test_direct_substitution(self):
        p = to_normalized(PhysicalLinkBudget(1.0, 0.25, 3.0, 1.0))
        assert (p.eta, p.gamma) == (4.0, 3.0)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            PhysicalLinkBudget(0.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            PhysicalLinkBudget(1.0, 1.0, -1.0, 1.0)

    def test_power_pair_consistency(self):
        PhysicalLinkBudget(2.0, 1.0, 1.0, 1.0, signal_power=4.0, noise_power_legit=2.0)
        with pytest.raises(ValueError):
            PhysicalLinkBudget(2.0, 1.0, 1.0, 1.0, signal_power=4.0, noise_power_legit=3.0)
        with pytest.raises(ValueError):
            PhysicalLinkBudget(2.0, 1.0, 1.0, 1.0, signal_power=4.0)


class TestChannelParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(eta=0.0, gamma=1.0)
        with pytest.raises(ValueError):
            ChannelParams(eta=1.0, gamma=-0.1)
        with pytest.raises(ValueError):
            ChannelParams(eta=math.inf, gamma=1.0)


class TestCrossoverProb:
    def test_zero_snr_is_fair_coin(self):
        assert crossover_prob(0.0) == 0.5

    def test_noiseless_limit(self):
        assert crossover_prob(1e6) == 0.0

    def test_reference_value(self):
        # 0.5*erfc(1), frozen from the series oracle
        assert crossover_prob(2.0) == pytest.approx(0.07864960352514257, abs=1e-12)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            crossover_prob(-1.0)

    def test_strictly_decreasing(self):
        etas = np.logspace(-3, 2, 60)
        vals = [crossover_prob(float(e)) for e in etas]
        assert all(b < a for a, b in zip(vals, vals[1:]))


class TestEveMarginal:
    def test_midpoint_value(self):
        for eta, gamma in [(2.0, 0.5), (1.0, 3.0)]:
            p = ChannelParams(eta=eta, gamma=gamma)
            expected = math.exp(-0.5 * gamma**2 * eta) / math.sqrt(2 * math.pi)
            assert eve_marginal_density(0.0, p) == pytest.approx(expected, rel=1e-12)

    def test_gamma_zero_collapses_to_standard_normal(self):
        p = ChannelParams(eta=5.0, gamma=0.0)
        for z in (-2.0, 0.3, 4.0):
            assert eve_marginal_density(z, p) == pytest.approx(
                math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi), rel=1e-12
            )

    def test_even_function(self):
        p = ChannelParams(eta=3.0, gamma=1.7)
        z = np.linspace(0, 10, 50)
        assert np.allclose(eve_marginal_density(z, p), eve_marginal_density(-z, p), rtol=1e-13)

    @pytest.mark.parametrize("gse", [0.0, 0.5, 2.0, 10.0])
    def test_normalizes(self, gse):
        p = ChannelParams(eta=1.0, gamma=gse) if gse > 0 else ChannelParams(eta=1.0, gamma=0.0)
        assert integrate(
            lambda z: eve_marginal_density(z, p), [-gse, gse], QuadratureSpec(abs_tol=1e-10)
        ) == pytest.approx(1.0, abs=1e-9)


class TestEvePosterior:
    def test_symmetric_evidence(self):
        p = ChannelParams(eta=2.0, gamma=1.0)
        assert eve_posterior(0.0, p) == 0.5

    def test_gamma_zero_uninformative(self):
        p = ChannelParams(eta=2.0, gamma=0.0)
        for z in (-5.0, 0.0, 7.5):
            assert eve_posterior(z, p) == 0.5

    def test_normalization_of_two_hypotheses(self):
        p = ChannelParams(eta=4.0, gamma=0.8)
        for z in np.linspace(-6, 6, 25):
            # P(b=1|z) mirrors P(b=0|-z) by symmetry
            assert eve_posterior(float(z), p) + eve_posterior(float(-z), p) == pytest.approx(
                1.0, abs=1e-12
            )

    def test_monotone_increasing_in_z(self):
        # b=0 sends +1, so larger observations favour bit 0
        p = ChannelParams(eta=2.0, gamma=1.5)
        zs = np.linspace(-8, 8, 100)
        q = eve_posterior(zs, p)
        assert np.all(np.diff(q) > 0)

    def test_matches_explicit_gaussian_ratio(self):
        p = ChannelParams(eta=3.0, gamma=0.7)
        m = p.eve_amplitude
        for z in (-2.0, 0.4, 1.9):
            num = math.exp(-0.5 * (z - m) ** 2)
            den = num + math.exp(-0.5 * (z + m) ** 2)
            assert eve_posterior(z, p) == pytest.approx(num / den, rel=1e-12)

    def test_stability_extremes(self):
        p = ChannelParams(eta=1e4, gamma=100.0)
        for z in (-1e4, -10.0, 10.0, 1e4):
            q = eve_posterior(z, p)
            assert 0.0 < q < 1.0
            assert math.isfinite(q)
