"""Frenet and Darboux frames of a curve on an oriented surface.

All position and invariant data comes from exact symbolic derivatives of the
composed parameterization; the only numerical steps are arc-length inversion
and the final floating-point evaluation.  Grids are immutable and shareable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .expr import (
    Expr,
    compile_vectorized,
    compile_vectorized_many,
    const,
    differentiate,
    parse,
    sqrt,
    substitute,
)
from .numeric import (
    ArcLengthMap,
    _GAUSS_W,
    _GAUSS_X,
    arc_length_map,
    stencil_derivative,
)
from .surfaces import OutOfDomain, Surface, Vec3


class VanishingCurvature(ArithmeticError):
    """kappa is below threshold; the Frenet normal direction is undefined."""


CURVATURE_THRESHOLD = 1e-9


class Classification(enum.Enum):
    GEODESIC = "geodesic"
    ASYMPTOTIC_LINE = "asymptotic_line"
    PRINCIPAL_LINE = "principal_line"


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _det(a, b, c):
    return _dot(a, _cross(b, c))


@dataclass(frozen=True)
class SurfaceCurve:
    """A parameter-domain path t -> (u(t), v(t)) on a surface.

    Carries the arc-length map of the ambient image and a compiled evaluator
    for the full jet (position derivatives to third order, surface normal,
    Darboux invariants and their first two arc-length derivatives).
    """

    surface: Surface
    u_of_t: Expr
    v_of_t: Expr
    t_lo: float
    t_hi: float
    name: str
    arc_map: ArcLengthMap
    _jet_fn: Callable = field(repr=False, compare=False)
    _speed_fn: Callable = field(repr=False, compare=False)

    @property
    def total_length(self) -> float:
        return self.arc_map.total_length


# Index layout of the compiled jet outputs.
_JET_NAMES = (
    ["c0x", "c0y", "c0z", "c1x", "c1y", "c1z", "c2x", "c2y", "c2z",
     "c3x", "c3y", "c3z", "nx", "ny", "nz", "speed",
     "kg", "kn", "tg", "kg1", "kn1", "tg1", "kg2", "kn2", "tg2"]
)
_JET_INDEX = {name: i for i, name in enumerate(_JET_NAMES)}


def surface_curve(surface: Surface, u_of_t, v_of_t,
                  t_lo: float, t_hi: float, name: str = "") -> SurfaceCurve:
    """Build a SurfaceCurve, validating domain membership and regularity.

    ``u_of_t``/``v_of_t`` may be Expr values or expression strings in t.
    """
    if isinstance(u_of_t, str):
        u_of_t = parse(u_of_t, {"t"})
    if isinstance(v_of_t, str):
        v_of_t = parse(v_of_t, {"t"})
    if not t_lo < t_hi:
        raise ValueError("need t_lo < t_hi")

    uv_fn = compile_vectorized_many([u_of_t, v_of_t], ["t"])
    ts = np.linspace(t_lo, t_hi, 257)
    us, vs = uv_fn(ts)
    for t, u, v in zip(ts, us, vs):
        if not surface.contains(float(u), float(v)):
            raise OutOfDomain(
                f"curve leaves the domain of {surface.name!r} at t={float(t)}")

    subs = {"u": u_of_t, "v": v_of_t}
    c0 = tuple(substitute(comp, subs) for comp in surface.components)
    c1 = tuple(differentiate(x, "t") for x in c0)
    c2 = tuple(differentiate(x, "t") for x in c1)
    c3 = tuple(differentiate(x, "t") for x in c2)
    w = tuple(substitute(comp, subs) for comp in surface.normal_components())
    wnorm = sqrt(_dot(w, w))
    n = tuple(wi / wnorm for wi in w)
    ndot = tuple(differentiate(ni, "t") for ni in n)

    sigma2 = _dot(c1, c1)
    speed = sqrt(sigma2)
    # Projection definitions, reduced to determinant/dot form:
    #   k_n = <c'', n>/sigma^2, k_g = <c'', n x T>/sigma^2, tau_g = <n' x T, n>/sigma.
    kn = _dot(c2, n) / sigma2
    kg = _det(c2, n, c1) / (sigma2 * speed)
    tg = _det(ndot, c1, n) / sigma2
    kg1 = differentiate(kg, "t") / speed
    kn1 = differentiate(kn, "t") / speed
    tg1 = differentiate(tg, "t") / speed
    kg2 = differentiate(kg1, "t") / speed
    kn2 = differentiate(kn1, "t") / speed
    tg2 = differentiate(tg1, "t") / speed

    roots = list(c0) + list(c1) + list(c2) + list(c3) + list(n) + [
        speed, kg, kn, tg, kg1, kn1, tg1, kg2, kn2, tg2]
    jet_fn = compile_vectorized_many(roots, ["t"])
    speed_fn = compile_vectorized(speed, ["t"])

    def speed_scalar(t: float) -> float:
        return float(speed_fn(np.array([t]))[0])

    amap = arc_length_map(speed_scalar, t_lo, t_hi, checkpoints=257)
    return SurfaceCurve(surface=surface, u_of_t=u_of_t, v_of_t=v_of_t,
                        t_lo=float(t_lo), t_hi=float(t_hi), name=name,
                        arc_map=amap, _jet_fn=jet_fn, _speed_fn=speed_fn)


def _s_of_t_vec(amap: ArcLengthMap, speed_vec, t: np.ndarray) -> np.ndarray:
    ts_tab, ss_tab = amap._ts, amap._ss
    k = np.clip(np.searchsorted(ts_tab, t, side="right") - 1, 0, len(ts_tab) - 2)
    a = ts_tab[k]
    h = 0.5 * (t - a)
    c = 0.5 * (t + a)
    nodes = c[None, :] + h[None, :] * _GAUSS_X[:, None]
    vals = speed_vec(nodes.ravel()).reshape(5, -1)
    return ss_tab[k] + h * np.einsum("i,ij->j", _GAUSS_W, vals)


def _invert_arclength(curve: SurfaceCurve, s: np.ndarray) -> np.ndarray:
    """Vectorized Newton inversion of the arc-length map, warm-started from
    the checkpoint table and safeguarded by a scalar fallback."""
    amap = curve.arc_map
    L = amap.total_length
    slack = 1e-9 * (1.0 + L)
    if s.min() < -slack or s.max() > L + slack:
        from .numeric import OutOfRange
        raise OutOfRange("arc-length samples outside [0, total_length]")
    s = np.clip(s, 0.0, L)
    t = np.interp(s, amap._ss, amap._ts)
    for _ in range(50):
        resid = _s_of_t_vec(amap, curve._speed_fn, t) - s
        if np.max(np.abs(resid)) < 1e-13 * (1.0 + L):
            break
        t = np.clip(t - resid / curve._speed_fn(t), amap.t_lo, amap.t_hi)
    resid = _s_of_t_vec(amap, curve._speed_fn, t) - s
    bad = np.abs(resid) > 1e-10 * (1.0 + L)
    if np.any(bad):
        for i in np.nonzero(bad)[0]:
            t[i] = amap.t_of_s(float(s[i]))
    return t


@dataclass(frozen=True)
class FrameSample:
    """All frame data of the base curve at one arc-length value.

    Frenet fields (N, B, tau, phi) are None where kappa is below threshold.
    """

    s: float
    position: Vec3
    T: Vec3
    g: Vec3
    n: Vec3
    k_g: float
    k_n: float
    tau_g: float
    kappa: float
    tau: Optional[float]
    N: Optional[Vec3]
    B: Optional[Vec3]
    phi: Optional[float]


@dataclass(frozen=True)
class FrameGrid:
    """Sampled frame data along the curve; rows align across all arrays.

    Vector arrays have shape (n, 3).  Frenet rows are nan where
    ``has_frenet`` is False.  ``phi`` is unwrapped along contiguous runs.
    """

    curve: SurfaceCurve
    s: np.ndarray
    t: np.ndarray
    position: np.ndarray
    T: np.ndarray
    g: np.ndarray
    n: np.ndarray
    k_g: np.ndarray
    k_n: np.ndarray
    tau_g: np.ndarray
    k_g1: np.ndarray
    k_n1: np.ndarray
    tau_g1: np.ndarray
    k_g2: np.ndarray
    k_n2: np.ndarray
    tau_g2: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    N: np.ndarray
    B: np.ndarray
    phi: np.ndarray
    has_frenet: np.ndarray
    speed: np.ndarray

    def __len__(self) -> int:
        return len(self.s)


def _unwrap_runs(raw: np.ndarray, mask: np.ndarray) -> np.ndarray:
    out = np.full_like(raw, np.nan)
    n = len(raw)
    i = 0
    while i < n:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j < n and mask[j]:
            j += 1
        out[i:j] = np.unwrap(raw[i:j])
        i = j
    return out


def frame_grid(curve: SurfaceCurve, s_values) -> FrameGrid:
    """Evaluate the full frame and invariant set at the given arc lengths."""
    s = np.asarray(s_values, dtype=float)
    t = _invert_arclength(curve, s)
    j = curve._jet_fn(t)

    def vec(prefix: str) -> np.ndarray:
        return np.stack([j[_JET_INDEX[prefix + ax]] for ax in "xyz"], axis=1)

    pos = vec("c0")
    c1 = vec("c1")
    c2 = vec("c2")
    c3 = vec("c3")
    n = vec("n")
    speed = j[_JET_INDEX["speed"]]

    T = c1 / speed[:, None]
    g = np.cross(n, T)
    dTds = (c2 - T * np.sum(T * c2, axis=1)[:, None]) / (speed ** 2)[:, None]
    kappa = np.linalg.norm(dTds, axis=1)
    has_frenet = kappa >= CURVATURE_THRESHOLD

    with np.errstate(all="ignore"):
        N = dTds / kappa[:, None]
        c1xc2 = np.cross(c1, c2)
        denom = np.sum(c1xc2 * c1xc2, axis=1)
        tau = np.sum(c1xc2 * c3, axis=1) / denom
    N[~has_frenet] = np.nan
    tau = np.where(has_frenet, tau, np.nan)
    B = np.cross(T, N)
    with np.errstate(invalid="ignore"):
        phi_raw = np.arctan2(np.sum(g * B, axis=1), np.sum(g * N, axis=1))
    phi = _unwrap_runs(phi_raw, has_frenet)

    return FrameGrid(
        curve=curve, s=s, t=t, position=pos, T=T, g=g, n=n,
        k_g=j[_JET_INDEX["kg"]], k_n=j[_JET_INDEX["kn"]],
        tau_g=j[_JET_INDEX["tg"]],
        k_g1=j[_JET_INDEX["kg1"]], k_n1=j[_JET_INDEX["kn1"]],
        tau_g1=j[_JET_INDEX["tg1"]],
        k_g2=j[_JET_INDEX["kg2"]], k_n2=j[_JET_INDEX["kn2"]],
        tau_g2=j[_JET_INDEX["tg2"]],
        kappa=kappa, tau=tau, N=N, B=B, phi=phi,
        has_frenet=has_frenet, speed=speed)


def uniform_grid(curve: SurfaceCurve, samples: int,
                 margin: float = 0.0) -> FrameGrid:
    """Uniform arc-length grid; ``margin`` trims that fraction at each end."""
    L = curve.total_length
    return frame_grid(curve, np.linspace(margin * L, (1.0 - margin) * L, samples))


def sample_at(curve: SurfaceCurve, s: float) -> FrameSample:
    """Full FrameSample at a single arc length (phi is the principal value)."""
    grid = frame_grid(curve, np.array([float(s)]))
    has = bool(grid.has_frenet[0])
    row = lambda a: Vec3.from_array(a[0])
    return FrameSample(
        s=float(s), position=row(grid.position), T=row(grid.T),
        g=row(grid.g), n=row(grid.n),
        k_g=float(grid.k_g[0]), k_n=float(grid.k_n[0]),
        tau_g=float(grid.tau_g[0]), kappa=float(grid.kappa[0]),
        tau=float(grid.tau[0]) if has else None,
        N=row(grid.N) if has else None,
        B=row(grid.B) if has else None,
        phi=float(grid.phi[0]) if has else None)


def darboux_frame(curve: SurfaceCurve, s: float) -> FrameSample:
    """Darboux frame {T, g, n} (and the rest of the sample) at arc length s."""
    return sample_at(curve, s)


def darboux_invariants(curve: SurfaceCurve, s: float) -> tuple[float, float, float]:
    """(k_g, k_n, tau_g) at arc length s, from the projection definitions."""
    sample = sample_at(curve, s)
    return (sample.k_g, sample.k_n, sample.tau_g)


def frenet_invariants(curve: SurfaceCurve, s: float) -> tuple[float, float, Vec3, Vec3]:
    """(kappa, tau, N, B) at arc length s; raises VanishingCurvature."""
    sample = sample_at(curve, s)
    if sample.N is None:
        raise VanishingCurvature(
            f"kappa={sample.kappa:.3e} below {CURVATURE_THRESHOLD} at s={s}")
    return (sample.kappa, sample.tau, sample.N, sample.B)


def frame_angle(sample: FrameSample) -> float:
    """Angle phi rotating {N, B} onto {g, n}: g = cos(phi) N + sin(phi) B."""
    if sample.N is None or sample.B is None:
        raise VanishingCurvature("phi undefined where the Frenet frame vanishes")
    g = sample.g.as_array()
    return math.atan2(float(np.dot(g, sample.B.as_array())),
                      float(np.dot(g, sample.N.as_array())))


def classify(curve: SurfaceCurve, tol: float,
             samples: int = 500) -> frozenset[Classification]:
    """Labels whose invariant stays below tol in magnitude on a uniform grid."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    grid = uniform_grid(curve, samples)
    labels = set()
    if np.max(np.abs(grid.k_g)) < tol:
        labels.add(Classification.GEODESIC)
    if np.max(np.abs(grid.k_n)) < tol:
        labels.add(Classification.ASYMPTOTIC_LINE)
    if np.max(np.abs(grid.tau_g)) < tol:
        labels.add(Classification.PRINCIPAL_LINE)
    return frozenset(labels)


def _stencil_columns(s: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return np.stack([stencil_derivative(s, rows[:, k]) for k in range(3)], axis=1)


def darboux_system_residual(grid: FrameGrid) -> float:
    """Max norm residual of the Darboux derivative system
    T' = k_g g + k_n n, g' = -k_g T + tau_g n, n' = -k_n T - tau_g g,
    with the left sides from stencil differentiation along s."""
    dT = _stencil_columns(grid.s, grid.T)
    dg = _stencil_columns(grid.s, grid.g)
    dn = _stencil_columns(grid.s, grid.n)
    kg, kn, tg = grid.k_g[:, None], grid.k_n[:, None], grid.tau_g[:, None]
    r1 = dT - (kg * grid.g + kn * grid.n)
    r2 = dg - (-kg * grid.T + tg * grid.n)
    r3 = dn - (-kn * grid.T - tg * grid.g)
    return float(max(np.abs(r).max() for r in (r1, r2, r3)))


def frenet_system_residual(grid: FrameGrid) -> float:
    """Max norm residual of T' = kappa N, N' = -kappa T + tau B, B' = -tau N
    over the largest contiguous run where the Frenet frame exists."""
    mask = grid.has_frenet
    best_lo, best_hi = 0, 0
    i = 0
    n = len(mask)
    while i < n:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j < n and mask[j]:
            j += 1
        if j - i > best_hi - best_lo:
            best_lo, best_hi = i, j
        i = j
    if best_hi - best_lo < 5:
        return 0.0
    sl = slice(best_lo, best_hi)
    s = grid.s[sl]
    T, N, B = grid.T[sl], grid.N[sl], grid.B[sl]
    kap, tau = grid.kappa[sl][:, None], grid.tau[sl][:, None]
    r1 = _stencil_columns(s, T) - kap * N
    r2 = _stencil_columns(s, N) - (-kap * T + tau * B)
    r3 = _stencil_columns(s, B) - (-tau * N)
    return float(max(np.abs(r).max() for r in (r1, r2, r3)))


def orthonormality_residual(grid: FrameGrid) -> float:
    """Max deviation of the Darboux frame Gram matrix from the identity."""
    worst = 0.0
    frames = np.stack([grid.T, grid.g, grid.n], axis=1)  # (n, 3 vectors, 3)
    gram = np.einsum("nij,nkj->nik", frames, frames)
    worst = np.abs(gram - np.eye(3)).max()
    return float(worst)
