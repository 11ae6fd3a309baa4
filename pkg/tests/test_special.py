import math

import mpmath
import numpy as np
import pytest

from sipsticky.special import erfc, erfcx, log_erfc, log_erfcx


def test_erfc_at_zero():
    assert erfc(0.0) == 1.0


def test_erfc_reference_value():
    # (2/sqrt(pi)) * int_1^inf exp(-y^2) dy, 50-digit quadrature
    want = float(mpmath.erfc(1))
    assert erfc(1.0) == pytest.approx(want, rel=1e-13)
    assert erfc(1.0) == pytest.approx(0.15729920705028513, rel=1e-13)


def test_erfc_against_mpmath_grid():
    mpmath.mp.dps = 40
    for x in (-3.0, -1.0, -0.1, 0.3, 2.0, 5.0, 10.0):
        assert erfc(x) == pytest.approx(float(mpmath.erfc(x)), rel=1e-13)


def test_reflection():
    for x in (0.2, 1.0, 3.5):
        assert erfc(-x) == pytest.approx(2.0 - erfc(x), rel=1e-14)


def test_erfcx_consistency():
    for x in (0.0, 0.5, 2.0, 5.0):
        assert erfcx(x) == pytest.approx(math.exp(x * x) * erfc(x), rel=1e-12)


def test_erfcx_large_no_overflow():
    x = 1e4
    val = erfcx(x)
    assert 0 < val < 1
    # 1/(x sqrt(pi)) to leading order
    assert val == pytest.approx(1.0 / (x * math.sqrt(math.pi)), rel=1e-6)


def test_log_erfc_large():
    x = 30.0
    mpmath.mp.dps = 60
    want = float(mpmath.log(mpmath.erfc(x)))
    assert log_erfc(x) == pytest.approx(want, rel=1e-12)
    assert np.isfinite(log_erfcx(np.array([1e3, 1e6]))).all()
