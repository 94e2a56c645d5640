import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ggmech.streams import RandomStream, as_stream, name_key


@given(st.integers(min_value=0, max_value=2 ** 64 - 1))
@settings(max_examples=30, deadline=None)
def test_equal_seeds_give_equal_sequences(seed):
    a, b = RandomStream(seed), RandomStream(seed)
    assert np.array_equal(a.uniform_open(16), b.uniform_open(16))
    assert np.array_equal(a.standard_gamma(0.3, 8), b.standard_gamma(0.3, 8))


def test_children_are_deterministic_and_distinct():
    root = RandomStream(7)
    a1, a2 = root.child(1).uniform_open(8), RandomStream(7).child(1).uniform_open(8)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(root.child(1).uniform_open(8), root.child(2).uniform_open(8))
    assert not np.array_equal(root.uniform_open(8), root.child(0).uniform_open(8))


def test_split_streams_are_uncorrelated():
    streams = RandomStream(3).split(4)
    draws = np.array([s.standard_normal(20000) for s in streams])
    corr = np.corrcoef(draws)
    off = corr[~np.eye(4, dtype=bool)]
    assert np.all(np.abs(off) < 3 / np.sqrt(20000) * 1.5)


def test_named_streams_use_stable_keys():
    assert name_key("privacy/tail") == name_key("privacy/tail")
    a = RandomStream(1).named("x").uniform_open(4)
    b = RandomStream(1).child(name_key("x")).uniform_open(4)
    assert np.array_equal(a, b)


def test_position_counts_draws():
    s = RandomStream(0)
    s.uniform_open(10)
    s.signs((2, 3))
    s.standard_gamma(2.0)
    assert s.position == 17


def test_uniform_open_excludes_endpoints():
    u = RandomStream(5).uniform_open(10 ** 6)
    assert u.min() > 0 and u.max() < 1


def test_signs_are_fair():
    s = RandomStream(9).signs(10 ** 5)
    assert set(np.unique(s)) == {-1.0, 1.0}
    assert abs(s.mean()) < 5 / np.sqrt(10 ** 5)


def test_seed_range_is_enforced():
    with pytest.raises(ValueError):
        RandomStream(-1)
    with pytest.raises(ValueError):
        RandomStream(2 ** 64)


def test_as_stream_accepts_seed_or_stream():
    s = RandomStream(4)
    assert as_stream(s) is s
    assert as_stream(4).seed == 4
