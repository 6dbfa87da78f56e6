"""Bundled test geometries so runs are reproducible without hand configs.

equator    -- great circle of the unit sphere (geodesic, principal line)
latitude   -- colatitude pi/4 circle on the unit sphere (principal line)
helix      -- unit-pitch helix on the radius-1 cylinder (geodesic)
ruling     -- straight generator of the cylinder (all invariants vanish)
"""

from __future__ import annotations

import functools
import math

from .expr import const, var
from .frames import SurfaceCurve, surface_curve
from .surfaces import cylinder, sphere

_T = var("t")


@functools.lru_cache(maxsize=None)
def preset(name: str) -> SurfaceCurve:
    if name == "equator":
        return surface_curve(sphere(), const(math.pi / 2), _T,
                             0.0, 2.0 * math.pi, name="equator")
    if name == "latitude":
        return surface_curve(sphere(), const(math.pi / 4), _T,
                             0.0, 2.0 * math.pi, name="latitude")
    if name == "helix":
        return surface_curve(cylinder(1.0), _T, _T,
                             0.0, 2.0 * math.pi, name="helix")
    if name == "ruling":
        return surface_curve(cylinder(1.0), const(0.0), _T,
                             0.0, 2.0, name="ruling")
    raise ValueError(
        f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")


PRESET_NAMES = ("equator", "latitude", "helix", "ruling")
