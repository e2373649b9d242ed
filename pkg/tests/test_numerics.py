"""Root finder, quadrature, ODE stepper, and fit helpers."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from invsq.numerics import (NumericalError, bracket_scan, brent, fit_loglog,
                            fit_two_powers, quad_gk, rk45)


def test_brent_simple_roots():
    assert brent(lambda x: x * x - 2.0, 0.0, 2.0) == pytest.approx(math.sqrt(2.0), abs=1e-13)
    assert brent(math.cos, 1.0, 2.0) == pytest.approx(math.pi / 2.0, abs=1e-13)


def test_brent_requires_bracket():
    with pytest.raises(NumericalError):
        brent(lambda x: x * x + 1.0, -1.0, 1.0)


@given(r=st.floats(-0.9, 0.9), scale=st.floats(0.1, 10.0))
def test_brent_recovers_planted_root(r, scale):
    f = lambda x: scale * (x - r) * (x * x + 1.0)
    assert brent(f, -1.0, 1.0) == pytest.approx(r, abs=1e-10)


def test_bracket_scan_finds_all_sign_changes():
    f = lambda x: math.sin(x)
    brackets = bracket_scan(f, 0.5, 9.0, 64)
    roots = sorted(brent(f, a, b) for a, b in brackets)
    assert np.allclose(roots, [math.pi, 2 * math.pi], atol=1e-10)


def test_quad_oscillatory_decaying():
    res = quad_gk(lambda x: np.sin(10.0 * x) * np.exp(-x), 0.0, 40.0,
                  rtol=1e-11, initial_panels=8)
    exact = 10.0 / 101.0 * (1.0 - math.exp(-40.0) * (math.cos(400.0) + 0.1 * math.sin(400.0)))
    assert res.converged
    assert res.value == pytest.approx(exact, abs=1e-12)
    assert abs(res.value - exact) <= 10.0 * max(res.error, 1e-14)


def test_quad_endpoint_power():
    res = quad_gk(lambda x: x ** -0.25, 1e-300, 1.0, rtol=1e-9)
    assert res.value == pytest.approx(4.0 / 3.0, rel=1e-8)


def test_quad_gaussian_tail():
    res = quad_gk(lambda x: np.exp(-x * x), 0.0, 12.0, rtol=1e-12, initial_panels=4)
    assert res.value == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-12)


def test_rk45_oscillator_roundtrip():
    f = lambda t, y: np.array([y[1], -y[0]])
    y = rk45(f, 0.0, [0.0, 1.0], math.pi / 2.0, rtol=1e-11, atol=1e-13)
    assert y[0] == pytest.approx(1.0, abs=1e-10)
    back = rk45(f, math.pi / 2.0, y, 0.0, rtol=1e-11, atol=1e-13)
    assert back[0] == pytest.approx(0.0, abs=1e-9)
    assert back[1] == pytest.approx(1.0, abs=1e-9)


def test_rk45_records_monotone_path():
    f = lambda t, y: np.array([-y[0]])
    yend, ts, ys = rk45(f, 0.0, [1.0], 3.0, record=True)
    assert ts[0] == 0.0 and ts[-1] == pytest.approx(3.0)
    assert all(t2 > t1 for t1, t2 in zip(ts, ts[1:]))
    assert yend[0] == pytest.approx(math.exp(-3.0), rel=1e-9)


def test_fit_loglog_recovers_power():
    x = np.geomspace(1e-4, 1e-2, 20)
    slope, amp, resid = fit_loglog(x, 3.0 * x ** 4)
    assert slope == pytest.approx(4.0, abs=1e-12)
    assert amp == pytest.approx(3.0, rel=1e-12)
    assert resid < 1e-12


@given(a=st.floats(0.5, 4.0), c=st.floats(0.1, 2.0))
def test_fit_two_powers_recovers_pair(a, c):
    z = np.geomspace(0.03, 30.0, 40)
    phi = a * z ** -0.75 + c * z ** -0.25
    fa, p, fc, q, rms = fit_two_powers(z, phi)
    assert p == pytest.approx(-0.75, abs=2e-3)
    assert q == pytest.approx(-0.25, abs=2e-3)
    assert fa == pytest.approx(a, rel=2e-2)
    assert rms < 1e-6
