import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sipsticky.errors import AllZero, NonIrreducible
from sipsticky.jump_kernel import FiniteRangeKernel, chi, from_spec, support_sets


def test_nearest_neighbor_valid():
    ker = FiniteRangeKernel((0.5,))
    assert ker.range == 1
    assert ker.p(1) == 0.5
    assert ker.p(-1) == 0.5
    assert ker.p(0) == 0.0
    assert ker.p(2) == 0.0


def test_even_support_rejected():
    with pytest.raises(NonIrreducible):
        FiniteRangeKernel((0.0, 0.5))


def test_all_zero_rejected():
    with pytest.raises(AllZero):
        FiniteRangeKernel((0.0, 0.0))
    with pytest.raises(AllZero):
        FiniteRangeKernel(())


def test_mixed_support_valid():
    ker = FiniteRangeKernel((0.25, 0.25))
    assert ker.range == 2


def test_gcd_three_only_rejected():
    with pytest.raises(NonIrreducible):
        FiniteRangeKernel((0.0, 0.0, 1.0 / 3.0))


def test_chi_values():
    assert chi(FiniteRangeKernel((0.5,))) == pytest.approx(0.5, abs=0)
    assert chi(FiniteRangeKernel((0.25, 0.25))) == pytest.approx(1.25, abs=0)


@given(st.lists(st.floats(0.01, 10.0), min_size=1, max_size=5))
@settings(max_examples=40, deadline=None)
def test_chi_linear_and_positive(weights):
    ker = FiniteRangeKernel(tuple(weights))
    c = chi(ker)
    assert c > 0
    doubled = chi(FiniteRangeKernel(tuple(2 * w for w in weights)))
    assert doubled == pytest.approx(2 * c, rel=1e-14)


def test_support_sets_unscaled():
    ker = FiniteRangeKernel((0.5,))
    a, a_plus, b = support_sets(ker, 1)
    assert list(a) == [-1, 1]
    assert list(a_plus) == [1]
    assert list(b) == list(range(-2, 3))


def test_support_sets_scaling():
    ker = FiniteRangeKernel((0.25, 0.25))
    a1, ap1, b1 = support_sets(ker, 1)
    a10, ap10, b10 = support_sets(ker, 10)
    np.testing.assert_allclose(a10, a1 / 10.0)
    np.testing.assert_allclose(ap10, ap1 / 10.0)
    np.testing.assert_allclose(b10, b1 / 10.0)
    assert b1.min() == -4 and b1.max() == 4


def test_from_spec():
    assert from_spec("nn").range == 1
    assert from_spec("0.1,0.2").weights == (0.1, 0.2)
    with pytest.raises(AllZero):
        from_spec("not-a-kernel")
