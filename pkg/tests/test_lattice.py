import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sftquad.lattice import (
    LatticeDraw,
    RngStream,
    draw_anchor,
    draw_lattice,
    draw_shift,
    frac,
    jittered_point,
    jittered_points,
    node,
    nodes,
)

BIG_N = 5600748293801


def test_shift_support_n3():
    rng = np.random.default_rng(0)
    H = np.concatenate([draw_shift(3, 2, rng) for _ in range(4000)])
    assert set(H.tolist()) == {1, 2}
    assert abs(np.mean(H == 1) - 0.5) < 0.03


def test_shift_mean_n101():
    rng = np.random.default_rng(1)
    H = draw_shift(101, 10**5, rng)
    assert H.min() >= 1 and H.max() <= 100
    # mean of uniform{1..100} is 50.5, sd of the mean is 0.09
    assert abs(H.mean() - 50.5) < 1


def test_anchor_support_and_zero_frequency():
    rng = np.random.default_rng(2)
    assert set(draw_anchor(2, 1000, rng).tolist()) == {0, 1}
    z = draw_anchor(101, 10**5, rng)
    n, p = 10**5, 1 / 101
    sd = math.sqrt(n * p * (1 - p))
    assert abs(np.count_nonzero(z == 0) - n * p) < 3 * sd


def test_stream_replay_is_deterministic():
    s = RngStream(42, (3, 1))
    assert np.array_equal(draw_shift(BIG_N, 20, s), draw_shift(BIG_N, 20, s))
    a = draw_lattice(BIG_N, 20, s.generator())
    b = draw_lattice(BIG_N, 20, s.generator())
    assert np.array_equal(a.H, b.H) and np.array_equal(a.z, b.z)
    other = draw_shift(BIG_N, 20, RngStream(42, (3, 2)))
    assert not np.array_equal(draw_shift(BIG_N, 20, s), other)


def test_stream_children_differ_from_parent():
    s = RngStream(5)
    vals = {tuple(draw_anchor(10**9 + 7, 4, st)) for st in [s, s.child(0), s.child(1), s.child(0, 0)]}
    assert len(vals) == 4


def test_chunked_jitter_equals_single_block():
    g1 = RngStream(9).generator()
    g2 = RngStream(9).generator()
    whole = g1.random((10, 7))
    parts = np.vstack([g2.random((3, 7)), g2.random((7, 7))])
    assert np.array_equal(whole, parts)


def test_node_examples():
    assert node([3], [2], 1, 5).tolist() == [1]
    assert node([0], [4], -2, 5).tolist() == [3]
    assert jittered_point(node([3], [2], 1, 5), 5).tolist() == [0.2]


def test_nodes_distinct_exhaustive():
    N, L = 11, 5
    ls = np.arange(-L, L + 1)
    for H in itertools.product(range(1, N), repeat=2):
        draw = LatticeDraw(np.array(H), np.array([4, 9]), N)
        m = nodes(draw, ls)
        assert len({tuple(row) for row in m}) == 2 * L + 1


def test_nodes_exact_at_full_scale():
    rng = np.random.default_rng(3)
    draw = draw_lattice(BIG_N, 5, rng)
    ls = np.arange(-(2**15), 2**15 + 1, 997)
    m = nodes(draw, ls)
    for i, l in enumerate(ls):
        assert m[i].tolist() == [(int(z) - int(l) * int(h)) % BIG_N for z, h in zip(draw.z, draw.H)]


def test_nodes_overflow_fallback():
    N = (1 << 63) - 25
    H = np.array([N - 1, 123456789012345], dtype=np.int64)
    z = np.array([N - 2, 5], dtype=np.int64)
    draw = LatticeDraw(H, z, N)
    ls = np.array([-7, -1, 0, 3, 2**20])
    m = nodes(draw, ls)
    for i, l in enumerate(ls):
        assert m[i].tolist() == [(int(zz) - int(l) * int(hh)) % N for zz, hh in zip(z, H)]


def test_draw_validation():
    with pytest.raises(ValueError):
        LatticeDraw(np.array([0]), np.array([0]), 5)
    with pytest.raises(ValueError):
        LatticeDraw(np.array([1]), np.array([5]), 5)


def test_jitter_disabled_gives_grid():
    m = np.array([[0, 3, 4]])
    assert jittered_points(m, 5).tolist() == [[0.0, 0.6, 0.8]]


@given(st.integers(0, 2**40), st.integers(0, 2**32 - 1))
@settings(max_examples=200)
def test_jittered_points_stay_in_cell(offset, seed):
    N = BIG_N
    m = np.array([[0, N - 1, offset % N, (N // 2 + offset) % N]], dtype=np.int64)
    x = jittered_points(m, N, np.random.default_rng(seed))
    assert np.all(x >= 0) and np.all(x < 1)
    # recover the cell index from the point
    assert np.all(np.abs(x * N - m) <= 1.0 + 1e-3)
    assert np.all(x >= m / N)


def test_jitter_resolvable_at_large_modulus():
    # spacing of doubles near 1 is 2**-52, the cell width 1/N is ~2**-42.3;
    # sub-cell offsets down to ~2**-10 of a cell survive everywhere
    N = BIG_N

    class Fixed:
        def __init__(self, u):
            self.u = u

        def random(self, shape):
            return np.full(shape, self.u)

    for m in (1, 10**6, N // 2, N - 1):
        assert jittered_points(np.array([[m]]), N, Fixed(2.0**-10))[0, 0] != m / N
        assert jittered_points(np.array([[m]]), N, Fixed(0.0))[0, 0] == m / N
    # near the origin much finer offsets are still resolved
    assert jittered_points(np.array([[3]]), N, Fixed(2.0**-20))[0, 0] != 3 / N
    top = jittered_points(np.array([[N - 1]]), N, Fixed(np.nextafter(1.0, 0)))[0, 0]
    assert top < 1.0


def test_frac():
    assert frac(3.2) == pytest.approx(0.2)
    assert frac(-1.3) == pytest.approx(0.7)
    assert frac(0.0) == 0.0
    assert frac(-1e-300) < 1.0
