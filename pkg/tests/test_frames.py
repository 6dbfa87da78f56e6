import math

import numpy as np
import pytest

from curveframes.expr import const, parse, var
from curveframes.frames import (
    Classification,
    VanishingCurvature,
    classify,
    darboux_frame,
    darboux_invariants,
    darboux_system_residual,
    frame_angle,
    frame_grid,
    frenet_invariants,
    frenet_system_residual,
    orthonormality_residual,
    surface_curve,
    uniform_grid,
)
from curveframes.presets import PRESET_NAMES, preset
from curveframes.surfaces import OutOfDomain, plane, sphere, torus


def plane_parabola():
    return surface_curve(plane(), "t", "t^2", -1.0, 1.0, name="parabola")


def test_equator_frame_at_start():
    sample = darboux_frame(preset("equator"), 0.0)
    assert np.allclose(sample.position.as_array(), [1, 0, 0], atol=1e-12)
    assert np.allclose(sample.T.as_array(), [0, 1, 0], atol=1e-12)
    assert np.allclose(sample.n.as_array(), [1, 0, 0], atol=1e-12)
    assert np.allclose(sample.g.as_array(), [0, 0, 1], atol=1e-12)


def test_ruling_frame_directions():
    sample = darboux_frame(preset("ruling"), 0.5)
    assert np.allclose(sample.T.as_array(), [0, 0, 1], atol=1e-12)
    assert np.allclose(sample.n.as_array(), [1, 0, 0], atol=1e-12)
    # g = n x T is tangent to the circular cross-section
    assert np.allclose(sample.g.as_array(), [0, -1, 0], atol=1e-12)


def test_g_equals_n_cross_T_everywhere():
    for name in PRESET_NAMES:
        grid = uniform_grid(preset(name), 200)
        assert np.max(np.abs(grid.g - np.cross(grid.n, grid.T))) < 1e-12


def test_equator_invariants():
    k_g, k_n, tau_g = darboux_invariants(preset("equator"), 1.0)
    assert abs(k_g) < 1e-10
    assert abs(k_n + 1.0) < 1e-10
    assert abs(tau_g) < 1e-10


def test_latitude_invariants():
    grid = uniform_grid(preset("latitude"), 100)
    assert np.max(np.abs(grid.k_g - 1.0)) < 1e-8  # cot(pi/4)
    assert np.max(np.abs(grid.k_n + 1.0)) < 1e-8
    assert np.max(np.abs(grid.tau_g)) < 1e-8


def test_helix_invariants():
    grid = uniform_grid(preset("helix"), 100)
    assert np.max(np.abs(grid.k_g)) < 1e-9
    assert np.max(np.abs(grid.k_n + 0.5)) < 1e-9
    assert np.max(np.abs(grid.tau_g - 0.5)) < 1e-9
    assert np.max(np.abs(grid.kappa - 0.5)) < 1e-9
    assert np.max(np.abs(grid.tau - 0.5)) < 1e-9


def test_ruling_invariants_vanish():
    k_g, k_n, tau_g = darboux_invariants(preset("ruling"), 1.0)
    assert (abs(k_g), abs(k_n), abs(tau_g)) < (1e-12, 1e-12, 1e-12)


def test_frenet_equator():
    kappa, tau, N, B = frenet_invariants(preset("equator"), 0.5)
    assert abs(kappa - 1.0) < 1e-10
    assert abs(tau) < 1e-10
    # N points to the centre, B is vertical
    s = 0.5
    assert np.allclose(N.as_array(), [-math.cos(s), -math.sin(s), 0], atol=1e-9)
    assert np.allclose(np.abs(B.as_array()), [0, 0, 1], atol=1e-9)


def test_frenet_raises_on_ruling():
    with pytest.raises(VanishingCurvature):
        frenet_invariants(preset("ruling"), 1.0)


def test_frame_angle_equator_is_half_pi():
    sample = darboux_frame(preset("equator"), 0.25)
    assert abs(frame_angle(sample) - math.pi / 2) < 1e-10


def test_frame_angle_reconstructs_g():
    for name in ("equator", "latitude", "helix"):
        grid = uniform_grid(preset(name), 64)
        recon = np.cos(grid.phi)[:, None] * grid.N + np.sin(grid.phi)[:, None] * grid.B
        assert np.max(np.abs(recon - grid.g)) < 1e-9, name


def test_frame_angle_plane_curve():
    curve = plane_parabola()
    grid = uniform_grid(curve, 64)
    # g = +/-N in the surface plane, so phi is 0 or pi
    wrapped = np.abs(np.remainder(grid.phi, math.pi))
    assert np.all((wrapped < 1e-9) | (wrapped > math.pi - 1e-9))


def test_kg_equals_kappa_cos_phi_and_kn_matches_in_magnitude():
    for name in ("equator", "latitude", "helix"):
        grid = uniform_grid(preset(name), 256)
        assert np.max(np.abs(grid.kappa * np.cos(grid.phi) - grid.k_g)) < 1e-9
        assert np.max(np.abs(grid.kappa * np.abs(np.sin(grid.phi))
                             - np.abs(grid.k_n))) < 1e-9


def test_kappa_squared_decomposition():
    for name in PRESET_NAMES:
        grid = uniform_grid(preset(name), 200)
        assert np.max(np.abs(grid.kappa ** 2 - (grid.k_g ** 2 + grid.k_n ** 2))) < 1e-9


def test_tau_g_equals_tau_plus_dphi_ds():
    from curveframes.numeric import stencil_derivative

    for name in ("equator", "latitude", "helix"):
        grid = uniform_grid(preset(name), 256)
        dphi = stencil_derivative(grid.s, grid.phi)
        assert np.max(np.abs(grid.tau_g - (grid.tau + dphi))) < 1e-7, name


def test_darboux_system_residual_presets():
    for name in PRESET_NAMES:
        grid = uniform_grid(preset(name), 500)
        assert darboux_system_residual(grid) < 1e-8, name


def test_frenet_system_residual_presets():
    for name in ("equator", "latitude", "helix"):
        grid = uniform_grid(preset(name), 500)
        assert frenet_system_residual(grid) < 1e-8, name


def test_orthonormality():
    for name in PRESET_NAMES:
        grid = uniform_grid(preset(name), 300)
        assert orthonormality_residual(grid) < 1e-10, name


def test_classify_presets():
    assert classify(preset("equator"), 1e-8) == frozenset(
        {Classification.GEODESIC, Classification.PRINCIPAL_LINE})
    assert classify(preset("latitude"), 1e-8) == frozenset(
        {Classification.PRINCIPAL_LINE})
    assert classify(preset("ruling"), 1e-8) == frozenset(
        {Classification.GEODESIC, Classification.ASYMPTOTIC_LINE,
         Classification.PRINCIPAL_LINE})
    assert classify(preset("helix"), 1e-8) == frozenset(
        {Classification.GEODESIC})


def test_classify_plane_curve():
    got = classify(plane_parabola(), 1e-8)
    assert Classification.ASYMPTOTIC_LINE in got
    assert Classification.PRINCIPAL_LINE in got
    assert Classification.GEODESIC not in got


def test_arc_length_parameterization_unit_speed():
    # |d beta / d s| = 1 after reparameterization, via chain rule
    for name in ("equator", "helix"):
        curve = preset(name)
        grid = uniform_grid(curve, 1000)
        d_pos = np.stack(
            [np.gradient(grid.position[:, k], grid.s) for k in range(3)], axis=1)
        speeds = np.linalg.norm(d_pos, axis=1)
        assert np.max(np.abs(speeds[2:-2] - 1.0)) < 1e-5  # np.gradient is O(h^2)
        # the exact chain-rule check: sigma * dt/ds == 1 pointwise
        assert np.max(np.abs(grid.speed * np.gradient(grid.t, grid.s) - 1.0)) < 1e-5


def test_curve_leaving_domain_rejected():
    with pytest.raises(OutOfDomain):
        surface_curve(sphere(), "t", "t", -1.0, 1.0)


def test_torus_curve_frames_consistent():
    curve = surface_curve(torus(2.0, 1.0), "t", "2*t", 0.1, 2.0, name="torus-path")
    grid = uniform_grid(curve, 300)
    assert orthonormality_residual(grid) < 1e-10
    assert darboux_system_residual(grid) < 1e-7
    assert np.max(np.abs(grid.kappa ** 2 - (grid.k_g ** 2 + grid.k_n ** 2))) < 1e-9
