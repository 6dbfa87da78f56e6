import math

import numpy as np
import pytest

from curveframes.surfaces import (
    BUILTIN_SURFACES,
    DegenerateParameterization,
    OutOfDomain,
    builtin,
    cylinder,
    from_expressions,
    plane,
    position,
    sphere,
    torus,
    unit_normal,
)


def test_sphere_position():
    p = position(sphere(), math.pi / 2, 0.0)
    assert np.allclose(p.as_array(), [1.0, 0.0, 0.0], atol=1e-15)


def test_plane_position():
    p = position(plane(), 2.0, 3.0)
    assert p.as_array().tolist() == [2.0, 3.0, 0.0]


def test_cylinder_position():
    p = position(cylinder(1.0), 0.0, 5.0)
    assert np.allclose(p.as_array(), [1.0, 0.0, 5.0], atol=1e-15)


def test_plane_normal():
    n = unit_normal(plane(), 1.5, -7.0)
    assert np.allclose(n.as_array(), [0.0, 0.0, 1.0], atol=1e-15)


def test_sphere_normal_is_outward_radial():
    s = sphere()
    rng = np.random.default_rng(11)
    for _ in range(50):
        u = rng.uniform(0.2, math.pi - 0.2)
        v = rng.uniform(0.0, 2 * math.pi)
        n = unit_normal(s, u, v).as_array()
        p = position(s, u, v).as_array()
        assert abs(np.dot(n, p) - 1.0) < 1e-12


def test_sphere_pole_degenerate():
    with pytest.raises(DegenerateParameterization):
        unit_normal(sphere(), 0.0, 1.0)


def test_out_of_domain():
    with pytest.raises(OutOfDomain):
        position(sphere(), 4.0, 0.0)


def test_torus_normal_outward():
    # At v=0 (outer circle) the outward direction is radially out in the
    # xy-plane; at v=pi (inner circle) it points towards the axis.
    t = torus(2.0, 1.0)
    n_outer = unit_normal(t, 0.0, 0.0).as_array()
    assert np.allclose(n_outer, [1.0, 0.0, 0.0], atol=1e-12)
    n_inner = unit_normal(t, 0.0, math.pi).as_array()
    assert np.allclose(n_inner, [-1.0, 0.0, 0.0], atol=1e-12)


def test_flip_normal():
    s = sphere()
    f = s.flipped()
    u, v = 1.0, 2.0
    assert np.allclose(unit_normal(f, u, v).as_array(),
                       -unit_normal(s, u, v).as_array(), atol=1e-15)


def test_unit_normal_has_unit_length_on_all_builtins():
    rng = np.random.default_rng(5)
    for name, factory in BUILTIN_SURFACES.items():
        s = factory()
        count = 0
        while count < 1000:
            u = rng.uniform(s.u_lo, s.u_hi)
            v = rng.uniform(s.v_lo, s.v_hi)
            try:
                n = unit_normal(s, u, v).as_array()
            except DegenerateParameterization:
                continue
            assert abs(np.linalg.norm(n) - 1.0) < 1e-12, name
            count += 1


def test_normal_continuity_along_curve():
    # No sign flips between adjacent samples on a path with small spacing.
    for name in ("sphere", "cylinder", "torus", "plane"):
        s = builtin(name)
        u0 = 0.5 * (s.u_lo + s.u_hi)
        ts = np.linspace(s.v_lo + 0.01, min(s.v_hi, s.v_lo + 1.0), 1200)
        prev = None
        for v in ts:
            n = unit_normal(s, u0, float(v)).as_array()
            if prev is not None:
                assert np.dot(prev, n) > 0.9, name
            prev = n


def test_custom_surface_from_expressions():
    saddle = from_expressions("saddle", "u", "v", "u*v", -1, 1, -1, 1)
    p = position(saddle, 0.5, 0.25)
    assert np.allclose(p.as_array(), [0.5, 0.25, 0.125], atol=1e-15)
    n = unit_normal(saddle, 0.0, 0.0).as_array()
    assert np.allclose(n, [0.0, 0.0, 1.0], atol=1e-15)


def test_unknown_builtin():
    with pytest.raises(ValueError):
        builtin("moebius")
