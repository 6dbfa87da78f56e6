import math

import numpy as np
import pytest

from curveframes.numeric import (
    NonRegularCurve,
    OutOfRange,
    adaptive_simpson,
    arc_length,
    arc_length_map,
    cumulative_integral,
    reparameterize,
    stencil_derivative,
)


def test_adaptive_simpson_polynomial_exact():
    # Simpson is exact on cubics; the adaptive wrapper must not break that.
    got = adaptive_simpson(lambda x: x**3 - 2 * x, 0.0, 2.0)
    assert abs(got - (4.0 - 4.0)) < 1e-14


def test_adaptive_simpson_oscillatory():
    got = adaptive_simpson(math.sin, 0.0, math.pi)
    assert abs(got - 2.0) < 1e-11


def test_arc_length_unit_circle():
    speed = lambda t: math.hypot(-math.sin(t), math.cos(t))
    got = arc_length(speed, 0.0, 2 * math.pi)
    assert abs(got - 2 * math.pi) < 1e-10 * (1 + 2 * math.pi)


def test_arc_length_helix():
    speed = lambda t: math.sqrt(2.0)
    got = arc_length(speed, 0.0, 2 * math.pi)
    assert abs(got - 2 * math.pi * math.sqrt(2)) < 1e-10 * (1 + got)


def test_arc_length_rejects_degenerate_curve():
    with pytest.raises(NonRegularCurve):
        arc_length(lambda t: 0.0, 0.0, 1.0)


def test_map_endpoints_and_inverse():
    amap = arc_length_map(lambda t: math.sqrt(2.0), 0.0, 2 * math.pi)
    L = amap.total_length
    assert abs(L - 2 * math.pi * math.sqrt(2)) < 1e-10 * (1 + L)
    assert abs(reparameterize(amap, 0.0) - 0.0) < 1e-12
    assert abs(reparameterize(amap, L) - 2 * math.pi) < 1e-9
    # constant-speed inversion: s = pi*sqrt(2) -> t = pi
    assert abs(reparameterize(amap, math.pi * math.sqrt(2)) - math.pi) < 1e-9


def test_map_inverse_consistency_nonconstant_speed():
    # speed 2 + sin t: s(t) = 2t + 1 - cos t
    speed = lambda t: 2.0 + math.sin(t)
    amap = arc_length_map(speed, 0.0, 3.0)
    for s in np.linspace(0.0, amap.total_length, 23):
        t = reparameterize(amap, float(s))
        s_back = 2.0 * t + 1.0 - math.cos(t)
        assert abs(s_back - s) < 1e-9 * (1.0 + amap.total_length)


def test_map_inverse_monotone():
    amap = arc_length_map(lambda t: 2.0 + math.sin(t), 0.0, 3.0)
    ss = np.linspace(0.0, amap.total_length, 101)
    ts = [reparameterize(amap, float(s)) for s in ss]
    assert all(b > a for a, b in zip(ts, ts[1:]))


def test_map_out_of_range():
    amap = arc_length_map(lambda t: 1.0, 0.0, 1.0)
    with pytest.raises(OutOfRange):
        reparameterize(amap, -0.5)
    with pytest.raises(OutOfRange):
        reparameterize(amap, 1.5)


def test_stencil_derivative_quartic_exact():
    x = np.linspace(0.0, 2.0, 21)
    y = x**4 - 3 * x**2 + x
    dy = stencil_derivative(x, y)
    want = 4 * x**3 - 6 * x + 1
    assert np.max(np.abs(dy - want)) < 1e-10


def test_stencil_derivative_trig():
    x = np.linspace(0.0, 2 * np.pi, 256)
    dy = stencil_derivative(x, np.sin(x))
    assert np.max(np.abs(dy - np.cos(x))) < 1e-7


def test_cumulative_integral_trig():
    x = np.linspace(0.0, 2 * np.pi, 256)
    got = cumulative_integral(x, np.cos(x))
    assert np.max(np.abs(got - np.sin(x))) < 1e-9
