import io
import math

import mpmath
import numpy as np
import pytest

from zetapair import special, zeros as Z
from zetapair.errors import DomainError, ParseError, PreconditionError

FIRST = (14.134725141734695, 21.022039638771556, 25.01085758014569)


def fine_grid_count(lo, hi, step=0.005):
    t = np.arange(lo, hi, step)
    z = Z.hardy_z(t, method="em")
    return int(np.sum(np.signbit(z[1:]) != np.signbit(z[:-1])))


def test_hardy_z_brackets_first_zeros():
    for a, b in ((14.0, 14.2), (21.0, 21.1), (25.0, 25.1)):
        assert Z.hardy_z(a) * Z.hardy_z(b) < 0


@pytest.mark.parametrize("t", [50.0, 123.4, 999.0])
def test_hardy_z_against_mpmath(t):
    assert abs(Z.hardy_z(t) - float(mpmath.siegelz(t))) < 1e-9


def test_hardy_z_critical_line_oracle():
    t = 50.0
    val = np.exp(1j * special.rs_theta(t)) * special.zeta_derivatives(0.5 + 1j * t)
    assert abs(val.imag) < 1e-8
    assert abs(val.real - Z.hardy_z(t)) < 1e-8


@pytest.mark.parametrize("t", [1500.0, 5000.0, 9876.5])
def test_riemann_siegel_against_mpmath(t):
    assert abs(Z.hardy_z(t, method="rs") - float(mpmath.siegelz(t))) <= max(2e-8, float(Z.hardy_z_error_bound(t, "rs")))


def test_hardy_z_domain():
    with pytest.raises(DomainError):
        Z.hardy_z(1.0)


def test_find_zeros_low():
    zl = Z.find_zeros(0, 30)
    assert len(zl) == 3
    np.testing.assert_allclose(zl.ordinates, FIRST, atol=1e-9)
    hundred = Z.find_zeros(0, 100)
    assert len(hundred) == 29 == fine_grid_count(2.0, 100.0)
    assert hundred.turing_verified
    refs = [float(mpmath.zetazero(k).imag) for k in (1, 10, 29)]
    np.testing.assert_allclose(hundred.ordinates[[0, 9, 28]], refs, atol=1e-9)


def test_interval_additivity():
    a = Z.find_zeros(10, 50)
    b = Z.find_zeros(50, 90)
    c = Z.find_zeros(10, 90)
    np.testing.assert_allclose(np.concatenate([a.ordinates, b.ordinates]), c.ordinates, atol=1e-10)
    assert a.count_offset == 0 and b.count_offset == len(a)


def test_turing_counts():
    zl = Z.find_zeros(0, 800)
    assert Z.turing_count_check(zl, 100.0) == 29
    assert Z.turing_count_check(zl, 20.0) == 1
    with pytest.raises(PreconditionError):
        Z.turing_count_check(Z.find_zeros(0, 100), 100.0)


def test_ten_thousand(zeros10k):
    assert len(zeros10k) == 10_000
    g = zeros10k.ordinates
    assert np.all(np.diff(g) > 0)
    T = float(g[-1]) + 1e-6
    assert abs(zeros10k.count_below(T) - special.smooth_count(T)) < 3
    # the fine-grid recount on a sample window agrees with the list
    lo, hi = 9000.0, 9020.0
    listed = int(np.sum((g > lo) & (g <= hi)))
    t = np.arange(lo, hi, 0.002)
    z = Z.hardy_z(t)
    assert listed == int(np.sum(np.signbit(z[1:]) != np.signbit(z[:-1])))
    # every listed ordinate is a sign change within its error bar
    sample = g[::997]
    err = np.maximum(zeros10k.abs_error[::997], 1e-9) * 2
    assert np.all(Z.hardy_z(sample - err) * Z.hardy_z(sample + err) < 0)


def test_file_roundtrip(tmp_path):
    zl = Z.find_zeros(0, 100)
    p = tmp_path / "z.txt"
    Z.save_zeros(zl, p)
    back = Z.load_zeros(p)
    assert not back.turing_verified
    assert Z.load_zeros(p, trust_metadata=True).turing_verified
    np.testing.assert_allclose(back.ordinates, zl.ordinates, rtol=1e-11)
    assert back.height_covered == 100.0


def test_parse_cases():
    zl = Z.load_zeros(io.StringIO("14.134725\n21.022040\n25.010858\n"))
    assert len(zl) == 3
    empty = Z.load_zeros(io.BytesIO(b""))
    assert len(empty) == 0 and empty.height_covered == 0
    with pytest.raises(ParseError) as err:
        Z.load_zeros(io.StringIO("14.1\n25.0\n21.0\n"))
    assert err.value.line == 3
    with pytest.raises(ParseError):
        Z.load_zeros(io.StringIO("14.1\nabc\n"))


def test_s_of_t():
    zl = Z.find_zeros(0, 1000)
    s13 = Z.s_of_t(13.0, zl)
    assert -1.5 < s13 < 0
    g1 = zl.ordinates[0]
    assert abs(Z.s_of_t(g1 + 1e-7, zl) - Z.s_of_t(g1 - 1e-7, zl) - 1) < 1e-5
    t = np.linspace(1, 1000, 20001)
    mean = np.mean([Z.s_of_t(x, zl) for x in t])
    assert -0.2 < mean < 0.2
    with pytest.raises(PreconditionError):
        Z.s_of_t(13.0, Z.load_zeros(io.StringIO("14.134725\n")))
