import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.analysis import build_tail_envelope

# positive decaying sequences: a scale times a running product of per-step ratios
decaying = st.builds(
    lambda exponent, ratios: 10.0**exponent * np.cumprod(np.r_[1.0, ratios]),
    st.floats(min_value=-8.0, max_value=8.0),
    st.lists(st.floats(min_value=0.05, max_value=0.95), min_size=0, max_size=80),
)


@pytest.mark.parametrize("lam", [1.1, 2.0, 10.0])
@settings(max_examples=1000, deadline=None)
@given(g=decaying)
def test_envelope_invariants_hold_exactly(lam, g):
    env = build_tail_envelope(g, lam)
    assert env.M == g.size
    assert np.all(env.r > 0) and np.all(env.s > 0)
    assert np.all(env.r[:-1] > env.r[1:])
    assert np.all(env.r >= g)
    assert np.all(env.s[:-1] / env.s[1:] <= lam)
    assert env.closure == pytest.approx(env.s[-1] / (lam - 1.0))


@pytest.mark.parametrize("lam", [1.1, 2.0, 10.0])
def test_envelope_of_constant_run_then_drop(lam):
    g = np.r_[np.full(10, 3.0), 1e-3]
    checks = build_tail_envelope(g, lam).verify()
    assert all(checks.values())
