import math

import mpmath as mp
import numpy as np
import pytest

from bpsksec.mathkit import (
    DEFAULT_QUAD_SPEC,
    QuadratureNonConvergence,
    QuadratureSpec,
    bessel_j,
    binary_entropy,
    erfc,
    integrate,
)

mp.mp.dps = 50


def erfc_series_oracle(t: float) -> float:
    """Independent slow oracle: Maclaurin series of erf at 50 digits."""
    tm = mp.mpf(t)
    term = tm
    total = tm
    k = 0
    while abs(term) > mp.mpf(10) ** -40:
        k += 1
        term *= -tm * tm / k
        total += term / (2 * k + 1)
    return float(1 - 2 / mp.sqrt(mp.pi) * total)


def bessel_series_oracle(order: int, x: float) -> float:
    """Independent slow oracle: ascending series at 50 digits."""
    xm = mp.mpf(x)
    term = (xm / 2) ** order / mp.factorial(order)
    total = term
    k = 0
    while abs(term) > mp.mpf(10) ** -40:
        k += 1
        term *= -(xm / 2) ** 2 / (k * (k + order))
        total += term
    return float(total)


class TestErfc:
    def test_zero(self):
        assert erfc(0.0) == 1.0

    def test_limits(self):
        assert erfc(30.0) < 1e-300
        assert erfc(-30.0) == pytest.approx(2.0, abs=1e-300)

    def test_against_series_oracle(self):
        # frozen from the 50-digit series oracle
        assert erfc(1.0) == pytest.approx(0.15729920705028513, abs=1e-12)
        for t in np.linspace(-3, 3, 25):
            assert erfc(float(t)) == pytest.approx(erfc_series_oracle(float(t)), abs=1e-12)

    def test_reflection_identity(self):
        for t in np.linspace(-6, 6, 121):
            assert erfc(float(t)) + erfc(float(-t)) == pytest.approx(2.0, abs=1e-12)

    def test_monotone_decreasing(self):
        ts = np.linspace(-5, 5, 100)
        vals = [erfc(float(t)) for t in ts]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            erfc(float("nan"))


class TestBinaryEntropy:
    def test_half_is_one(self):
        assert binary_entropy(0.5) == 1.0

    def test_degenerate(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_value_near_bsc_half_capacity(self):
        # frozen from direct 50-digit evaluation
        assert binary_entropy(0.11) == pytest.approx(0.499915958164528, abs=1e-12)

    def test_symmetry(self):
        for p in np.linspace(0.0, 1.0, 201):
            assert binary_entropy(float(p)) == pytest.approx(
                binary_entropy(float(1 - p)), abs=1e-12
            )

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            binary_entropy(-0.01)
        with pytest.raises(ValueError):
            binary_entropy(1.01)


class TestBesselJ:
    def test_zero_argument(self):
        assert bessel_j(1, 0.0) == 0.0
        assert bessel_j(3, 0.0) == 0.0

    def test_small_argument_leading_terms(self):
        x = 1e-6
        assert bessel_j(1, x) == pytest.approx(x / 2, rel=1e-9)
        assert bessel_j(3, x) == pytest.approx(x**3 / 48, rel=1e-9)

    def test_first_root_of_j1(self):
        # frozen from the high-precision series oracle
        assert abs(bessel_j(1, 3.8317059702075123)) < 1e-12

    @pytest.mark.parametrize("order", [1, 3])
    def test_against_series_oracle(self, order):
        # spans the ascending-series branch and the asymptotic branch
        for x in np.linspace(0.0, 50.0, 151):
            assert bessel_j(order, float(x)) == pytest.approx(
                bessel_series_oracle(order, float(x)), abs=1e-10
            )

    def test_odd_symmetry(self):
        for x in (0.5, 3.7, 20.0):
            assert bessel_j(1, -x) == -bessel_j(1, x)
            assert bessel_j(3, -x) == -bessel_j(3, x)

    def test_rejects_unsupported_order(self):
        with pytest.raises(ValueError):
            bessel_j(2, 1.0)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            bessel_j(1, 701.0)


def _normal_density(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


def _mixture_density(x, s):
    return 0.5 * (_normal_density(x - s) + _normal_density(x + s))


class TestIntegrate:
    def test_normal_density_normalizes(self):
        assert integrate(_normal_density, [0.0]) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("s", [0.0, 0.5, 3.0, 12.0, 100.0])
    def test_mixture_normalizes_for_any_separation(self, s):
        assert integrate(lambda x: _mixture_density(x, s), [-s, s]) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_odd_integrand_vanishes(self):
        s = 2.0
        val = integrate(lambda x: x * _mixture_density(x, s), [-s, s])
        assert abs(val) < 1e-10

    def test_scalar_callable_supported(self):
        val = integrate(lambda x: math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi), [0.0])
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_halving_tolerance_self_consistency(self):
        s = 1.3
        f = lambda x: -_mixture_density(x, s) * np.log2(_mixture_density(x, s))
        v1 = integrate(f, [-s, s], QuadratureSpec(abs_tol=1e-10))
        v2 = integrate(f, [-s, s], QuadratureSpec(abs_tol=5e-11))
        assert abs(v1 - v2) < 1e-10

    def test_nonconvergence_reports_best_estimate(self):
        spec = QuadratureSpec(abs_tol=1e-300, max_depth=3)
        with pytest.raises(QuadratureNonConvergence) as exc:
            integrate(_normal_density, [0.0], spec)
        assert exc.value.estimate == pytest.approx(1.0, abs=1e-6)
        assert exc.value.error_estimate > 0

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(max_depth=0)
        with pytest.raises(ValueError):
            QuadratureSpec(half_width_padding=2.0)

    def test_deterministic(self):
        f = lambda x: _mixture_density(x, 2.0)
        assert integrate(f, [-2, 2]) == integrate(f, [-2, 2])
