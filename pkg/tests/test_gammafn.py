import math

import numpy as np
import pytest
from scipy.special import gamma as scipy_gamma

from wnilab.gammafn import gamma, gammaln, rgamma


def test_matches_math_gamma_on_positive_axis():
    for z in np.linspace(0.05, 30.0, 173):
        assert gamma(z) == pytest.approx(math.gamma(z), rel=1e-13)


def test_half_integer_values():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(1.5) == pytest.approx(0.5 * math.sqrt(math.pi), rel=1e-14)
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-13)


def test_reflection_negative_arguments():
    for z in (-0.5, -1.5, -2.3, -7.25):
        assert gamma(z) == pytest.approx(scipy_gamma(z), rel=1e-12)


def test_poles_and_reciprocal():
    assert math.isinf(gamma(0.0))
    assert math.isinf(gamma(-3.0))
    assert rgamma(0.0) == 0.0
    assert rgamma(-5.0) == 0.0
    assert rgamma(2.5) == pytest.approx(1.0 / math.gamma(2.5), rel=1e-13)


def test_gammaln_large_arguments():
    for z in (10.0, 100.0, 1000.0):
        assert gammaln(z) == pytest.approx(math.lgamma(z), rel=1e-12)
    with pytest.raises(ValueError):
        gammaln(-1.0)
