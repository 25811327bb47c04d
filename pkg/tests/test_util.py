import math

import numpy as np

from areavar.util import g17, pairwise_sum, rotate_pairs, rotate_quarter, to_json


def test_pairwise_sum_matches_fsum():
    rng = np.random.RandomState(0)
    for _ in range(50):
        x = rng.randn(rng.randint(1, 2000)) * 10.0 ** rng.randint(-6, 7)
        ref = math.fsum(x.tolist())
        got = pairwise_sum(x)
        assert abs(got - ref) <= 1e-13 * (1.0 + np.abs(x).sum())


def test_pairwise_sum_edge_cases():
    assert pairwise_sum(np.array([])) == 0.0
    assert pairwise_sum(np.array([3.5])) == 3.5
    x = np.random.RandomState(1).randn(777)
    assert pairwise_sum(x) == pairwise_sum(x.copy())


def test_rotate_quarter():
    v = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, -3.0]])
    r = rotate_quarter(v)
    # +90 degrees: (x, y) -> (-y, x)
    assert np.array_equal(r, np.array([[0.0, 1.0], [-1.0, 0.0], [3.0, 2.0]]))


def test_rotate_pairs_p_area_drift():
    # rotating the p-area drift (-y, x) gives the radial field (x, y)
    xy = np.array([[[0.5, 2.0]], [[-1.0, 3.0]]])  # values of (-y, x)
    out = rotate_pairs(xy)
    assert np.array_equal(out[..., 0], xy[..., 1])
    assert np.array_equal(out[..., 1], -xy[..., 0])


def test_g17_round_trip():
    rng = np.random.RandomState(2)
    for _ in range(200):
        x = float(rng.randn() * 10.0 ** rng.randint(-12, 13))
        assert float(g17(x)) == x


def test_to_json_deterministic_and_sorted():
    a = to_json({"b": 1, "a": [1.5, 2], "c": {"y": True, "x": None}})
    b = to_json({"c": {"x": None, "y": True}, "a": [1.5, 2], "b": 1})
    assert a == b
    assert a.index('"a"') < a.index('"b"') < a.index('"c"')


def test_to_json_values():
    s = to_json({"f": 0.1, "n": float("nan"), "i": 7, "t": (1, 2), "arr": np.array([1.0])})
    assert '"n": null' in s
    assert float(s.split('"f": ')[1].split(",")[0].strip("\n }")) == 0.1
    assert '"i": 7' in s
    import pytest

    with pytest.raises(TypeError):
        to_json({1: "non-string key"})
