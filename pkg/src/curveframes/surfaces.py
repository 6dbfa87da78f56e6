"""Oriented parametric surfaces with exact symbolic partial derivatives.

A surface is three DSL expressions in (u, v) over a rectangular domain.
Orientation comes from the parameter order (r_u x r_v); ``flip_normal``
reverses it for sign-sensitive comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .expr import Expr, differentiate, evaluate, parse


class OutOfDomain(ValueError):
    """Parameter point lies outside the surface's rectangle."""


class DegenerateParameterization(ValueError):
    """|r_u x r_v| vanishes; the normal is undefined at this point."""


DEGENERACY_THRESHOLD = 1e-10


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @staticmethod
    def from_array(a) -> "Vec3":
        vals = [float(c) for c in a]
        if not all(math.isfinite(c) for c in vals):
            raise ValueError("non-finite component in Vec3")
        return Vec3(*vals)


@dataclass(frozen=True)
class Surface:
    """Parametric map r(u, v) = (x, y, z) over [u_lo,u_hi] x [v_lo,v_hi]."""

    name: str
    x: Expr
    y: Expr
    z: Expr
    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float
    flip_normal: bool = False

    @property
    def components(self) -> tuple[Expr, Expr, Expr]:
        return (self.x, self.y, self.z)

    def partials(self, var: str) -> tuple[Expr, Expr, Expr]:
        return tuple(differentiate(c, var) for c in self.components)

    def normal_components(self) -> tuple[Expr, Expr, Expr]:
        """Unnormalized normal w = r_u x r_v as expressions (sign honours
        flip_normal)."""
        xu, yu, zu = self.partials("u")
        xv, yv, zv = self.partials("v")
        w = (yu * zv - zu * yv, zu * xv - xu * zv, xu * yv - yu * xv)
        if self.flip_normal:
            w = tuple(-c for c in w)
        return w

    def contains(self, u: float, v: float) -> bool:
        slack_u = 1e-9 * (1.0 + abs(self.u_hi - self.u_lo))
        slack_v = 1e-9 * (1.0 + abs(self.v_hi - self.v_lo))
        return (self.u_lo - slack_u <= u <= self.u_hi + slack_u
                and self.v_lo - slack_v <= v <= self.v_hi + slack_v)

    def flipped(self) -> "Surface":
        return replace(self, flip_normal=not self.flip_normal)


def position(surface: Surface, u: float, v: float) -> Vec3:
    """Evaluate the parametric map at (u, v)."""
    if not surface.contains(u, v):
        raise OutOfDomain(f"(u, v)=({u}, {v}) outside domain of {surface.name!r}")
    b = {"u": u, "v": v}
    return Vec3(*(evaluate(c, b) for c in surface.components))


def unit_normal(surface: Surface, u: float, v: float) -> Vec3:
    """Oriented unit normal (r_u x r_v)/|r_u x r_v| at (u, v)."""
    if not surface.contains(u, v):
        raise OutOfDomain(f"(u, v)=({u}, {v}) outside domain of {surface.name!r}")
    b = {"u": u, "v": v}
    w = np.array([evaluate(c, b) for c in surface.normal_components()])
    norm = float(np.linalg.norm(w))
    if norm <= DEGENERACY_THRESHOLD:
        raise DegenerateParameterization(
            f"|r_u x r_v|={norm:.3e} at (u, v)=({u}, {v}) on {surface.name!r}")
    return Vec3.from_array(w / norm)


def from_expressions(name: str, x_src: str, y_src: str, z_src: str,
                     u_lo: float, u_hi: float, v_lo: float, v_hi: float,
                     flip_normal: bool = False) -> Surface:
    """Build a surface from three expression strings in u and v."""
    allowed = {"u", "v"}
    x, y, z = (parse(src, allowed) for src in (x_src, y_src, z_src))
    if not (u_lo < u_hi and v_lo < v_hi):
        raise ValueError("domain bounds must satisfy u_lo < u_hi and v_lo < v_hi")
    return Surface(name, x, y, z, float(u_lo), float(u_hi),
                   float(v_lo), float(v_hi), flip_normal)


def plane() -> Surface:
    """z = 0 plane, r(u, v) = (u, v, 0); normal (0, 0, 1)."""
    return from_expressions("plane", "u", "v", "0", -100.0, 100.0, -100.0, 100.0)


def sphere() -> Surface:
    """Unit sphere, u = colatitude, v = longitude; outward normal.

    The parameterization degenerates at the poles u = 0, pi; unit_normal
    raises there.
    """
    return from_expressions(
        "sphere",
        "sin(u)*cos(v)", "sin(u)*sin(v)", "cos(u)",
        0.0, math.pi, 0.0, 2.0 * math.pi)


def cylinder(radius: float = 1.0) -> Surface:
    """Circular cylinder about the z-axis, u = angle, v = height; outward
    normal."""
    r = repr(float(radius))
    return from_expressions(
        "cylinder",
        f"{r}*cos(u)", f"{r}*sin(u)", "v",
        0.0, 2.0 * math.pi, -100.0, 100.0)


def torus(ring_radius: float = 2.0, tube_radius: float = 1.0) -> Surface:
    """Torus with u = azimuth around the z-axis, v = tube angle; r_u x r_v
    points outward."""
    R = repr(float(ring_radius))
    r = repr(float(tube_radius))
    return from_expressions(
        "torus",
        f"({R} + {r}*cos(v))*cos(u)",
        f"({R} + {r}*cos(v))*sin(u)",
        f"{r}*sin(v)",
        0.0, 2.0 * math.pi, 0.0, 2.0 * math.pi)


BUILTIN_SURFACES = {
    "plane": plane,
    "sphere": sphere,
    "cylinder": cylinder,
    "torus": torus,
}


def builtin(name: str) -> Surface:
    try:
        factory = BUILTIN_SURFACES[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin surface {name!r}; "
            f"available: {', '.join(sorted(BUILTIN_SURFACES))}") from None
    return factory()
