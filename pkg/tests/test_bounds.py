import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icoswitch.bounds import LoccBoundInput, bell_bound, bound_floor, locc_bound


@pytest.mark.parametrize("d", range(2, 13))
def test_maximal_gives_d(d):
    assert locc_bound(LoccBoundInput.maximal(d)) == pytest.approx(d, rel=1e-12)
    assert bell_bound(d) == d


def test_product_state():
    assert locc_bound(LoccBoundInput(2, 2, (1.0, 0.0))) == pytest.approx(4, abs=1e-12)


def test_partially_entangled_qutrit():
    value = locc_bound(LoccBoundInput(3, 3, (math.sqrt(0.5), math.sqrt(0.3), math.sqrt(0.2))))
    assert 3 < value < 9
    assert value == pytest.approx(9 / (math.sqrt(0.5) + math.sqrt(0.3) + math.sqrt(0.2)) ** 2, rel=1e-14)


def test_padded_spectrum():
    value = locc_bound(LoccBoundInput(4, 4, (0.8, 0.6, 0.0, 0.0)))
    assert value == pytest.approx(16 / 1.96, rel=1e-12)
    assert bound_floor(value) == 8


def test_unequal_dimensions():
    assert locc_bound(LoccBoundInput(2, 3, (1.0,))) == pytest.approx(6)


@pytest.mark.parametrize(
    "d1,d2,schmidt",
    [
        (1, 3, (1.0,)),
        (3, 3, (0.5, 0.5)),
        (2, 2, (0.0, 0.0)),
        (2, 2, (-0.6, 0.8)),
        (2, 2, (math.nan, 1.0)),
        (2, 2, (0.6, 0.6, 0.6)),
    ],
)
def test_invalid_inputs(d1, d2, schmidt):
    with pytest.raises(ValueError):
        LoccBoundInput(d1, d2, schmidt)


def test_bell_bound_rejects_small_d():
    with pytest.raises(ValueError):
        bell_bound(1)


def test_floor_absorbs_rounding():
    assert bound_floor(2.9999999999999996) == 3
    assert bound_floor(3.5) == 3


@settings(max_examples=100, deadline=None)
@given(
    st.integers(2, 6).flatmap(lambda d: st.tuples(st.just(d), st.lists(st.floats(0.01, 1.0), min_size=d, max_size=d))),
    st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2),
)
def test_mixing_toward_uniform_lowers_bound(case, ts):
    d, raw = case
    p = np.array(raw) / sum(raw)
    t0, t1 = sorted(ts)

    def bound_at(t):
        probs = (1 - t) * p + t / d
        return locc_bound(LoccBoundInput(d, d, tuple(np.sqrt(probs / probs.sum()))))

    assert bound_at(t1) <= bound_at(t0) + 1e-9
    assert bound_at(1.0) == pytest.approx(d, rel=1e-9)
    assert bound_at(t0) <= d * d + 1e-9
