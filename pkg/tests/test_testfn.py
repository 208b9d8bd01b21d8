import math

import numpy as np
import pytest
from scipy import integrate

from zetapair import testfn as F
from zetapair.errors import BandLimitError, InvalidArgumentError


def direct_time(f, u):
    lo, hi = f.support
    re, _ = integrate.quad(lambda x: np.real(f.eval_hat(x)) * math.cos(2 * math.pi * u * x), lo, hi,
                           limit=400, epsabs=1e-13, epsrel=1e-13)
    return re


def test_fejer_pair():
    f = F.make_fejer(1.0)
    assert f.eval(0.0) == 1.0
    assert f.eval_hat(0.5) == 0.5
    for k in range(1, 6):
        assert abs(f.eval(k)) < 1e-30
    assert abs(direct_time(f, 0.37) - f.eval(0.37)) < 1e-9
    assert not f.smooth


def test_fejer_dilation_and_mass():
    f1, f2 = F.make_fejer(1.0), F.make_fejer(2.0)
    u = np.linspace(-3, 3, 61)
    np.testing.assert_allclose(f2.eval(u), f1.eval(2 * u), atol=1e-15)
    assert abs(f2.normalization - 0.5) < 1e-15
    for k in range(1, 6):
        assert abs(f2.eval(k / 2)) < 1e-30
    mass, _ = integrate.quad(lambda x: f1.eval(x), -200, 200, limit=2000)
    assert abs(mass - f1.eval_hat(0.0)) < 1e-2


@pytest.mark.parametrize("b", [0.5, 0.9, 3.0])
def test_bump_time_side(b):
    f = F.make_smooth_bump(b)
    assert abs(f.eval_hat(0.0) - 1) < 1e-15
    area, _ = integrate.quad(f.eval_hat, -b, b, epsabs=1e-14)
    assert abs(f.eval(0.0) - area) < 1e-10
    for u in (0.3, 5.3, 11.0):
        assert abs(f.eval(u) - direct_time(f, u)) < 1e-9
    u = np.linspace(-20, 20, 81)
    np.testing.assert_allclose(f.eval(u), f.eval(-u), atol=0)


def test_bump_boundary():
    f = F.make_smooth_bump(1.0)
    xi = np.array([-1.5, -1.0, 1.0, 1.2])
    assert np.all(f.eval_hat(xi) == 0)
    # flat to machine precision at the edge: values and one-sided differences
    near = np.linspace(1 - 2e-3, 1, 50)
    vals = f.eval_hat(near)
    assert np.max(np.abs(vals)) < 1e-100
    assert np.max(np.abs(np.diff(vals))) < 1e-100


def test_bump_decay_radius():
    f = F.make_smooth_bump(1.0)
    U = f.decay_radius(1e-8)
    u = np.linspace(U, U + 40, 2001)
    assert np.max(np.abs(f.eval(u))) <= 1e-8
    assert np.max(np.abs(f.eval(np.linspace(0.5 * U, U, 400)))) > 1e-8


def test_bump_second_derivative():
    f = F.make_smooth_bump(0.8)
    x = np.linspace(-0.7, 0.7, 15)
    h = 1e-4
    fd = (f.eval_hat(x + h) - 2 * f.eval_hat(x) + f.eval_hat(x - h)) / h**2
    np.testing.assert_allclose(f.eval_hat_dd(x), fd, atol=1e-5)


def test_shifted_function():
    f = F.make_smooth_bump(1.0)
    g = f.shifted(0.3)
    assert g.parity == "none"
    assert abs(g.eval_hat(0.3) - 1) < 1e-15
    u = 1.7
    assert abs(g.eval(u) - f.eval(u) * np.exp(2j * math.pi * 0.3 * u)) < 1e-12


def test_montgomery_weight():
    w = F.montgomery_weight()
    assert w.eval(0.0) == 1.0 and w.eval(2.0) == 0.5
    u = np.linspace(-100, 100, 401)
    assert np.all(w.eval(u) > 0) and np.all(w.eval(u) == w.eval(-u))
    with pytest.raises(BandLimitError):
        w.decay_radius()


def test_parse_spec():
    assert F.parse_spec("bump:band=0.9").band_limit == 0.9
    assert F.parse_spec("fejer:scale=2").band_limit == 2.0
    assert F.parse_spec("bump:band=1,shift=0.2").shift == 0.2
    assert F.parse_spec("montgomery-w").name == "montgomery-w"
    for bad in ("triangle", "bump:width=3", "bump:band", "bump:band=x"):
        with pytest.raises(InvalidArgumentError):
            F.parse_spec(bad)
    with pytest.raises(InvalidArgumentError):
        F.make_smooth_bump(-1)
