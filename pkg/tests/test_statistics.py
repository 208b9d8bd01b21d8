import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetapair import statistics as S
from zetapair import testfn, zeros as Z
from zetapair.errors import BandLimitError, InvalidArgumentError, PreconditionError


@pytest.fixture(scope="module")
def first700():
    return Z.first_zeros(700)


def synthetic(points, top):
    g = np.sort(np.asarray(points, dtype=float))
    return Z.ZeroList(ordinates=g, height_covered=top, abs_error=np.zeros(g.size), turing_verified=True)


def test_pair_sum_matches_bruteforce(zeros500):
    T = float(zeros500.ordinates[-1])
    for spec, alpha in (("bump:band=0.9", 0.0), ("bump:band=0.9", 0.4), ("fejer:scale=1", 0.7),
                        ("bump:band=1,shift=0.25", 0.3)):
        om = testfn.parse_spec(spec)
        got = S.pair_sum(zeros500, om, alpha, T)
        ref = S.pair_sum_bruteforce(zeros500, om, alpha, T)
        assert abs(got.value - ref) <= 1e-10 + got.neglected_bound


@given(st.lists(st.floats(min_value=15, max_value=200, allow_nan=False), min_size=2, max_size=60, unique=True),
       st.floats(min_value=-0.9, max_value=0.9))
@settings(max_examples=40, deadline=None)
def test_pair_sum_property(points, alpha):
    zl = synthetic(points, 200.0)
    om = testfn.make_smooth_bump(0.7)
    got = S.pair_sum(zl, om, alpha, 200.0)
    assert abs(got.value - S.pair_sum_bruteforce(zl, om, alpha, 200.0)) <= 1e-12 + got.neglected_bound
    assert got.pairs_used <= len(zl) * (len(zl) - 1)


def test_conjugation_real_weight(zeros500):
    T = float(zeros500.ordinates[-1])
    om = testfn.make_smooth_bump(0.9)
    a = S.pair_sum(zeros500, om, 0.4, T).value
    b = S.pair_sum(zeros500, om, -0.4, T).value
    assert abs(a - np.conj(b)) < 1e-14


def test_zeros_repel(zeros10k):
    z = zeros10k.first(100)
    T = float(z.ordinates[-1])
    # a weight concentrated within ~0.05 of the origin (band limit 40)
    om = testfn.make_smooth_bump(40.0)
    got = S.pair_sum(z, om, 0.0, T)
    assert abs(got.value) < 1e-4
    assert abs(got.value - S.pair_sum_bruteforce(z, om, 0.0, T)) < 1e-10 + got.neglected_bound
    assert np.min(np.diff(z.ordinates)) > 0.05


def test_thread_independence(zeros10k):
    T = float(zeros10k.ordinates[-1])
    om = testfn.make_smooth_bump(0.9)
    a = S.pair_sum(zeros10k, om, 0.3, T, threads=1).value
    b = S.pair_sum(zeros10k, om, 0.3, T, threads=3).value
    assert a == b
    h1 = S.diff_histogram(zeros10k, 0.1, (0, 30), threads=1).counts
    h4 = S.diff_histogram(zeros10k, 0.1, (0, 30), threads=4).counts
    assert np.array_equal(h1, h4)


def test_preconditions(zeros500):
    om = testfn.make_smooth_bump(0.9)
    with pytest.raises(PreconditionError):
        S.pair_sum(zeros500, om, 0.0, 1e5)
    unverified = Z.ZeroList(ordinates=zeros500.ordinates, height_covered=zeros500.height_covered,
                            abs_error=zeros500.abs_error)
    with pytest.raises(PreconditionError):
        S.pair_sum(unverified, om, 0.0, 500.0)
    with pytest.raises(PreconditionError):
        S.pair_sum(zeros500.window(100, 500), om, 0.0, 400.0)


def test_montgomery_F():
    z = Z.find_zeros(0, 100)
    brute = (2 * math.pi / (100 * math.log(100))) * math.fsum(
        4 / (4 + (a - b) ** 2) for a in z.ordinates for b in z.ordinates)
    assert abs(S.montgomery_F(z, 0.0, 100.0) - brute) < 1e-13
    assert S.montgomery_F(z, 0.0, 100.0) > 0
    assert abs(S.montgomery_F(z, 0.5, 100.0) - S.montgomery_F(z, -0.5, 100.0)) < 1e-12


def test_montgomery_F_bruteforce(zeros500):
    T = float(zeros500.ordinates[-1])
    alphas = np.array([0.1, 0.35, 0.9])
    got = S.montgomery_F(zeros500, alphas, T, threads=2)
    for a, v in zip(alphas, got):
        assert abs(v - S.montgomery_F_bruteforce(zeros500, a, T)) < 1e-12


def test_histogram_small():
    z = Z.find_zeros(0, 30)
    h = S.diff_histogram(z, 0.1, (0, 12))
    nz = np.nonzero(h.counts)[0]
    assert len(nz) == 3 and h.total == 3
    g = z.ordinates
    expect = sorted([g[1] - g[0], g[2] - g[1], g[2] - g[0]])
    for i, d in zip(nz, expect):
        assert h.edges[i] < d <= h.edges[i + 1]


def test_histogram_bruteforce(zeros500):
    g = zeros500.ordinates
    h = S.diff_histogram(zeros500, 0.1, (0, 30))
    d = (g[None, :] - g[:, None])[np.triu_indices(g.size, 1)]
    d = d[(d > 0) & (d <= 30)]
    ref = np.bincount(np.ceil(d / 0.1).astype(int) - 1, minlength=300)[:300]
    assert np.array_equal(h.counts, ref)
    full = S.diff_histogram(zeros500, 1.0, (0, float(math.ceil(g[-1] - g[0]))))
    assert full.total == g.size * (g.size - 1) // 2


def test_histogram_arguments(zeros500):
    with pytest.raises(InvalidArgumentError):
        S.diff_histogram(zeros500, 0.0)
    with pytest.raises(InvalidArgumentError):
        S.diff_histogram(zeros500, 0.7, (0, 30))


def test_moving_average_and_minima():
    x = np.array([5, 4, 3, 4, 5, 5, 2, 2, 6], dtype=float)
    np.testing.assert_allclose(S.moving_average(np.ones(9), 5), np.ones(9))
    assert S.local_minima(x).tolist() == [2, 6]
    assert S.moving_average(x, 3)[1] == 4.0


def test_windowed_bruteforce(first700):
    z500 = first700.first(500)
    r = testfn.make_smooth_bump(4.0)
    sig = testfn.make_smooth_bump(8.0)
    got = S.windowed_pair_statistic(first700, r, r, sig, 600.0, 20.0, 0.3, -0.3, level=1e-13)
    ref = S.windowed_pair_statistic_bruteforce(z500, r, r, sig, 600.0, 20.0, 0.3, -0.3)
    assert abs(got - ref) < 1e-10


def test_windowed_properties(first700):
    r = testfn.make_smooth_bump(4.0)
    sig = testfn.make_smooth_bump(8.0)
    zero = S.windowed_pair_statistic(first700, r, r, sig, 600.0, 20.0, 0.0, 0.0)
    assert abs(zero.imag) < 1e-12 and zero.real > 0
    r2 = testfn.make_smooth_bump(3.0)
    a = S.windowed_pair_statistic(first700, r, r2, sig, 600.0, 20.0, 0.2, -0.4)
    b = S.windowed_pair_statistic(first700, r2, r, sig, 600.0, 20.0, -0.4, 0.2)
    assert abs(a - b) < 1e-12 * max(1.0, abs(a))
    with pytest.raises(BandLimitError):
        S.windowed_pair_statistic(first700, testfn.montgomery_weight(), r, sig, 600.0, 20.0, 0.0, 0.0)
    with pytest.raises(PreconditionError):
        S.windowed_pair_statistic(first700, r, r, sig, 900.0, 100.0, 0.0, 0.0)
