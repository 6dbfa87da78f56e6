"""Independent numerical oracle and per-formula audit of the closed forms.

Every oracle quantity is derived purely from derivatives of the combined
curve beta: Frenet data through the standard jet quotients

    kappa* = |b'xb''| / |b'|^3,   tau* = det(b', b'', b''') / |b'xb''|^2

and Darboux data with respect to the unit carrier sphere (|beta| = 1, so
n* = beta and g* = n* x T*), with tau_g* and phi* differentiated
numerically along the grid.  No printed closed form enters the oracle.

``audit`` evaluates each registered closed form over a grid, feeds it the
oracle's phi* / dphi*/ds* for the free angle inputs, and scores it against
the oracle value.  Verdicts are a pure function of residuals and the
tolerance; non-finite samples are recorded as invalid, never raised.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .frames import (FrameGrid, SurfaceCurve, VanishingCurvature, classify,
                     frame_grid)
from .numeric import stencil_derivative, unwrap_angles
from .smarandache import (ClosedFormContext, NonRegularSmarandache,
                          SmarandacheCurve, SmarandacheKind, beta_jets,
                          closed_form_grid, connection_matrix,
                          corollary_grid, corollary_requirement,
                          formula_names)
from .surfaces import Vec3

SPEED_THRESHOLD = 1e-9
CROSS_THRESHOLD = 1e-12
CLASSIFY_TOL = 1e-6


class Verdict(enum.Enum):
    """Outcome of auditing one closed form against the oracle."""

    CONFIRMED = "CONFIRMED"
    SIGN_ONLY = "SIGN_ONLY"
    DISCREPANT = "DISCREPANT"
    NOT_APPLICABLE = "NOT_APPLICABLE"


@dataclass(frozen=True)
class OracleInvariants:
    """Oracle values of a combination at one arc length.

    Vectors are Darboux-coordinate triples of the base frame.  The Darboux
    scalars refer to the unit carrier sphere; phi_star is the principal
    value of atan2(<g*, B*>, <g*, N*>) (unwrapping needs a grid and lives
    in ``oracle_columns``).
    """

    kappa: float
    tau: float
    T: Vec3
    N: Vec3
    B: Vec3
    k_g: float
    k_n: float
    tau_g: float
    phi_star: float


@dataclass(frozen=True)
class FormulaAudit:
    """Scored comparison of one closed form against the oracle.

    ``closed_form`` and ``oracle`` have shape (n,) for scalars, (n, 3) for
    vectors.  Vector residuals are taken after applying the better global
    sign; ``sign_agrees`` records whether that sign was positive (None when
    nothing could be compared).  ``magnitude_residual`` is the max relative
    residual after dropping signs: per-sample absolute values for scalars,
    the globally flipped comparison for vectors.
    """

    formula_id: str
    quantity: str
    s: np.ndarray
    closed_form: np.ndarray
    oracle: np.ndarray
    abs_residual: np.ndarray
    rel_residual: np.ndarray
    valid: np.ndarray
    valid_count: int
    sign_agrees: Optional[bool]
    max_rel_residual: Optional[float]
    magnitude_residual: Optional[float]
    verdict: Verdict
    note: str = ""


@dataclass(frozen=True)
class VerificationReport:
    """All formula audits of one kind over one base curve."""

    kind: SmarandacheKind
    base_name: str
    surface_name: str
    tol: float
    sample_count: int
    formulas: tuple[FormulaAudit, ...]

    def formula(self, formula_id: str) -> FormulaAudit:
        for entry in self.formulas:
            if entry.formula_id == formula_id:
                return entry
        raise KeyError(formula_id)

    def verdicts(self) -> dict[str, str]:
        return {f.formula_id: f.verdict.value for f in self.formulas}


def _nan_stencil(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """stencil_derivative with non-finite samples masked out of the fit."""
    out = np.full(len(x), np.nan)
    mask = np.isfinite(y)
    if int(mask.sum()) >= 5:
        out[mask] = stencil_derivative(x[mask], y[mask])
    return out


def _nan_stencil_rows(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.stack([_nan_stencil(x, y[:, k]) for k in range(y.shape[1])],
                    axis=1)


def _unwrap_finite(phi: np.ndarray) -> np.ndarray:
    out = np.array(phi, float)
    mask = np.isfinite(out)
    out[mask] = unwrap_angles(out[mask])
    return out


def _rows_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", a, b)


def oracle_columns(kind: SmarandacheKind, grid: FrameGrid
                   ) -> dict[str, np.ndarray]:
    """Every oracle quantity of a combination over a frame grid.

    Keys: rate, T, kappa, N, B, tau, g, n, k_g, k_n, tau_g, phi_star,
    dphi_star_ds_star.  Vectors are (n, 3) Darboux-coordinate arrays.
    Quantities undefined at a sample (zero speed or curvature) come out
    non-finite; tau_g and dphi_star (stencil-based) need at least five
    finite samples.  phi_star is unwrapped along the grid.
    """
    b0, b1, b2, b3 = beta_jets(kind, grid)
    n_star = np.array(b0, float)
    with np.errstate(all="ignore"):
        speed = np.linalg.norm(b1, axis=1)
        T = b1 / np.where(speed > SPEED_THRESHOLD, speed, np.nan)[:, None]
        c12 = np.cross(b1, b2)
        nc = np.linalg.norm(c12, axis=1)
        nc_ok = np.where(nc > CROSS_THRESHOLD, nc, np.nan)
        kappa = nc / np.where(speed > SPEED_THRESHOLD, speed, np.nan) ** 3
        B = c12 / nc_ok[:, None]
        N = np.cross(B, T)
        tau = _rows_dot(c12, b3) / nc_ok ** 2
        g_star = np.cross(n_star, T)
        # d(T*)/ds* via the world second derivative: the frame-rotation
        # terms cancel because the connection is antisymmetric
        dot12 = _rows_dot(b1, b2)
        sp = np.where(speed > SPEED_THRESHOLD, speed, np.nan)
        dT = b2 / sp[:, None] ** 2 - b1 * (dot12 / sp ** 4)[:, None]
        k_g = _rows_dot(dT, g_star)
        k_n = _rows_dot(dT, n_star)
        # tau_g* = <d(g*)/ds*, n*> with the derivative taken numerically,
        # so the umbilic-sphere value 0 is measured, not assumed
        M0 = connection_matrix(grid.k_g, grid.k_n, grid.tau_g)
        dg_world = (_nan_stencil_rows(grid.s, g_star)
                    + np.einsum("nij,nj->ni", M0, g_star))
        tau_g = _rows_dot(dg_world, n_star) / sp
        phi = _unwrap_finite(np.arctan2(_rows_dot(g_star, B),
                                        _rows_dot(g_star, N)))
        dphi = _nan_stencil(grid.s, phi) / sp
    return {"rate": speed, "T": T, "kappa": kappa, "N": N, "B": B,
            "tau": tau, "g": g_star, "n": n_star, "k_g": k_g, "k_n": k_n,
            "tau_g": tau_g, "phi_star": phi, "dphi_star_ds_star": dphi}


def _oracle_point(beta: SmarandacheCurve, s: float) -> OracleInvariants:
    grid = frame_grid(beta.base, np.array([float(s)]))
    b0, b1, b2, b3 = beta_jets(beta.kind, grid)
    b0, b1, b2, b3 = b0[0], b1[0], b2[0], b3[0]
    speed = float(np.linalg.norm(b1))
    if speed <= SPEED_THRESHOLD:
        raise NonRegularSmarandache(
            f"{beta.kind.value} combination has speed {speed:.3e} at s={s:g}")
    c12 = np.cross(b1, b2)
    nc = float(np.linalg.norm(c12))
    if nc <= CROSS_THRESHOLD:
        raise VanishingCurvature(
            f"|b' x b''| = {nc:.3e} at s={s:g}; Frenet data undefined")
    T = b1 / speed
    kappa = nc / speed ** 3
    B = c12 / nc
    N = np.cross(B, T)
    tau = float(np.dot(c12, b3)) / nc ** 2
    n_star = np.array(b0, float)
    g_star = np.cross(n_star, T)
    dT = b2 / speed ** 2 - b1 * (np.dot(b1, b2) / speed ** 4)
    # d(n*)/ds* = T*, whose cross product with T* vanishes, so only the
    # n* x dT* term of d(g*)/ds* survives
    dg = np.cross(n_star, dT)
    return OracleInvariants(
        kappa=float(kappa), tau=float(tau),
        T=Vec3.from_array(T), N=Vec3.from_array(N), B=Vec3.from_array(B),
        k_g=float(np.dot(dT, g_star)), k_n=float(np.dot(dT, n_star)),
        tau_g=float(np.dot(dg, n_star)),
        phi_star=float(np.arctan2(np.dot(g_star, B), np.dot(g_star, N))))


def oracle_frenet(beta: SmarandacheCurve, s: float) -> OracleInvariants:
    """Frenet data of the combination at s, from derivatives of beta only.

    Raises
    ------
    NonRegularSmarandache
        If |beta'| <= 1e-9 at s.
    VanishingCurvature
        If |beta' x beta''| <= 1e-12 at s.
    """
    return _oracle_point(beta, s)


def oracle_sphere_darboux(beta: SmarandacheCurve, s: float
                          ) -> OracleInvariants:
    """Carrier-sphere Darboux data of the combination at s.

    Uses n* = beta (outward unit-sphere normal) and g* = n* x T*, with all
    projections taken with respect to the combination's arc length.  Shares
    the regularity preconditions of ``oracle_frenet`` because phi* needs
    the Frenet normal.
    """
    return _oracle_point(beta, s)


def phi_star_context(beta: SmarandacheCurve, s: float,
                     window: int = 16,
                     spacing: Optional[float] = None) -> ClosedFormContext:
    """Unwrapped phi* and dphi*/ds* near s, packaged for the closed forms.

    Samples a short uniform arc-length window around s (shifted to stay
    inside the curve), unwraps phi* over it, and differentiates at the
    sample nearest s.
    """
    length = beta.base.total_length
    h = spacing if spacing is not None else length / 4096.0
    count = 2 * window + 1
    lo = min(max(float(s) - window * h, 0.0),
             max(length - (count - 1) * h, 0.0))
    ss = lo + h * np.arange(count)
    cols = oracle_columns(beta.kind, frame_grid(beta.base, ss))
    i = int(np.argmin(np.abs(ss - float(s))))
    if cols["rate"][i] <= SPEED_THRESHOLD:
        raise NonRegularSmarandache(
            f"{beta.kind.value} combination is singular near s={s:g}")
    phi = cols["phi_star"][i]
    dphi = cols["dphi_star_ds_star"][i]
    if not (np.isfinite(phi) and np.isfinite(dphi)):
        raise VanishingCurvature(f"phi* undefined near s={s:g}")
    return ClosedFormContext(phi_star=float(phi),
                             dphi_star_ds_star=float(dphi))


def oracle_frame_residuals(kind: SmarandacheKind, grid: FrameGrid
                           ) -> dict[str, np.ndarray]:
    """Per-sample residuals of the oracle frames against their ODE systems.

    "frenet": max component error of T*' - kappa* N*, N*' + kappa* T* -
    tau* B*, B*' + tau* N*.  "darboux": same for T*' - (k_g* g* + k_n* n*),
    g*' + k_g* T* - tau_g* n*, n*' + k_n* T* + tau_g* g*.  All derivatives
    are numerical (stencil along the grid) with respect to s*, so the
    residual measures the oracle's self-consistency.
    """
    cols = oracle_columns(kind, grid)
    M0 = connection_matrix(grid.k_g, grid.k_n, grid.tau_g)
    with np.errstate(all="ignore"):
        sp = np.where(cols["rate"] > SPEED_THRESHOLD, cols["rate"], np.nan)

        def d_ds_star(vec):
            world = (_nan_stencil_rows(grid.s, vec)
                     + np.einsum("nij,nj->ni", M0, vec))
            return world / sp[:, None]

        T, N, B = cols["T"], cols["N"], cols["B"]
        kap, tau = cols["kappa"][:, None], cols["tau"][:, None]
        frenet = np.concatenate([d_ds_star(T) - kap * N,
                                 d_ds_star(N) + kap * T - tau * B,
                                 d_ds_star(B) + tau * N], axis=1)
        g, n = cols["g"], cols["n"]
        kg = cols["k_g"][:, None]
        kn = cols["k_n"][:, None]
        tg = cols["tau_g"][:, None]
        darboux = np.concatenate([d_ds_star(T) - (kg * g + kn * n),
                                  d_ds_star(g) + kg * T - tg * n,
                                  d_ds_star(n) + kn * T + tg * g], axis=1)
    return {"frenet": np.max(np.abs(frenet), axis=1),
            "darboux": np.max(np.abs(darboux), axis=1)}


_TARGET_BY_NAME = {
    "rate": ("rate", False),
    "tangent-star": ("T", True),
    "kappa-star": ("kappa", False),
    "normal-star": ("N", True),
    "binormal-star": ("B", True),
    "tau-star": ("tau", False),
    "g-star": ("g", True),
    "n-star": ("n", True),
    "k-g-star": ("k_g", False),
    "k-n-star": ("k_n", False),
    "tau-g-star": ("tau_g", False),
    "tau-g-star-single": ("tau_g", False),
}


def _target(name: str) -> tuple[str, bool]:
    return _TARGET_BY_NAME[name.split("-corollary")[0]]


def score(formula_id: str, s: np.ndarray, closed_form: np.ndarray,
          oracle: np.ndarray, vector: bool, tol: float) -> FormulaAudit:
    """Score one closed-form series against its oracle series.

    Scalars earn SIGN_ONLY when per-sample magnitudes agree within tol but
    signed values do not; vectors when one global sign flip brings them
    within tol.  Relative residuals use denominator max(1, |oracle|).
    Samples where either side is non-finite are excluded and counted.
    """
    s = np.asarray(s, float)
    cf = np.asarray(closed_form, float)
    orc = np.asarray(oracle, float)
    if vector:
        valid = np.isfinite(cf).all(axis=1) & np.isfinite(orc).all(axis=1)
        denom = np.maximum(1.0, np.max(np.abs(orc), axis=1))
        plus = np.max(np.abs(cf - orc), axis=1) / denom
        minus = np.max(np.abs(cf + orc), axis=1) / denom
    else:
        valid = np.isfinite(cf) & np.isfinite(orc)
        denom = np.maximum(1.0, np.abs(orc))
        plus = np.abs(cf - orc) / denom
        minus = np.abs(np.abs(cf) - np.abs(orc)) / denom
    count = int(valid.sum())
    note = "" if valid.all() else f"{int((~valid).sum())} samples undefined"
    if count == 0:
        nanlike = np.full(len(s), np.nan)
        return FormulaAudit(
            formula_id=formula_id, quantity="vector" if vector else "scalar",
            s=s, closed_form=cf, oracle=orc, abs_residual=nanlike,
            rel_residual=nanlike, valid=valid, valid_count=0,
            sign_agrees=None, max_rel_residual=None, magnitude_residual=None,
            verdict=Verdict.NOT_APPLICABLE, note="no valid samples")
    signed = float(np.max(plus[valid]))
    dropped = float(np.max(minus[valid]))
    sign_agrees = bool(signed <= dropped)
    if signed < tol:
        verdict, backing = Verdict.CONFIRMED, signed
        sign_agrees = True
    elif dropped < tol:
        verdict, backing = Verdict.SIGN_ONLY, dropped
        sign_agrees = False
    else:
        verdict, backing = Verdict.DISCREPANT, min(signed, dropped)
    if vector:
        sigma = 1.0 if sign_agrees else -1.0
        abs_res = np.max(np.abs(sigma * cf - orc), axis=1)
    else:
        abs_res = np.abs(cf - orc)
    rel_res = abs_res / denom
    return FormulaAudit(
        formula_id=formula_id, quantity="vector" if vector else "scalar",
        s=s, closed_form=cf, oracle=orc, abs_residual=abs_res,
        rel_residual=rel_res, valid=valid, valid_count=count,
        sign_agrees=sign_agrees, max_rel_residual=float(backing),
        magnitude_residual=dropped, verdict=verdict, note=note)


def _not_applicable(formula_id: str, s: np.ndarray, oracle: np.ndarray,
                    vector: bool, note: str) -> FormulaAudit:
    shape = (len(s), 3) if vector else (len(s),)
    nan_cf = np.full(shape, np.nan)
    nan_row = np.full(len(s), np.nan)
    return FormulaAudit(
        formula_id=formula_id, quantity="vector" if vector else "scalar",
        s=np.asarray(s, float), closed_form=nan_cf,
        oracle=np.asarray(oracle, float), abs_residual=nan_row,
        rel_residual=nan_row, valid=np.zeros(len(s), dtype=bool),
        valid_count=0, sign_agrees=None, max_rel_residual=None,
        magnitude_residual=None, verdict=Verdict.NOT_APPLICABLE, note=note)


def audit(kind: SmarandacheKind, base: SurfaceCurve,
          grid: Sequence[float] | np.ndarray, tol: float,
          phi_star_override: Optional[float] = None) -> VerificationReport:
    """Score every registered closed form of a kind against the oracle.

    ``grid`` holds base arc-length samples (interior samples recommended:
    phi* and tau_g* are stencil-differentiated along it).  The oracle's
    phi* and dphi*/ds* feed the closed forms' free angle inputs; pass
    ``phi_star_override`` to hold the closed forms' angle at a constant
    instead (with dphi*/ds* = 0 -- the oracle side is unaffected).
    Special cases are audited only when the base curve carries the
    matching classification; otherwise they are reported NOT_APPLICABLE.
    The report is deterministic and contains one entry per registry id.
    """
    s = np.asarray(grid, float)
    if s.size == 0:
        raise ValueError("audit grid is empty")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    fgrid = frame_grid(base, s)
    cols = oracle_columns(kind, fgrid)
    if phi_star_override is None:
        phi, dphi = cols["phi_star"], cols["dphi_star_ds_star"]
    else:
        phi = np.full(s.size, float(phi_star_override))
        dphi = np.zeros(s.size)
    forms = closed_form_grid(kind, fgrid, phi, dphi)
    requirement = corollary_requirement(kind)
    applies = (requirement is not None
               and requirement in classify(base, CLASSIFY_TOL))
    cor_forms = (corollary_grid(kind, fgrid, phi, dphi)
                 if applies else {})
    entries = []
    for name in formula_names(kind):
        formula_id = f"{name}-{kind.value}"
        target, vector = _target(name)
        oracle_vals = cols[target]
        if "corollary" in name and not applies:
            entries.append(_not_applicable(
                formula_id, s, oracle_vals, vector,
                note=f"base curve is not classified {requirement.value}"))
            continue
        cf = cor_forms[name] if "corollary" in name else forms[name]
        entries.append(score(formula_id, s, cf, oracle_vals, vector, tol))
    return VerificationReport(
        kind=kind, base_name=base.name, surface_name=base.surface.name,
        tol=float(tol), sample_count=int(s.size), formulas=tuple(entries))


def _json_number(x) -> Optional[float]:
    x = float(x)
    return x if np.isfinite(x) else None


def _json_array(a: np.ndarray):
    if a.ndim == 1:
        if a.dtype == bool:
            return [bool(v) for v in a]
        return [_json_number(v) for v in a]
    return [[_json_number(v) for v in row] for row in a]


def report_to_dict(report: VerificationReport) -> dict:
    """Plain-data form of a report; non-finite numbers become null."""
    formulas = {}
    for f in report.formulas:
        formulas[f.formula_id] = {
            "quantity": f.quantity,
            "verdict": f.verdict.value,
            "sign_agrees": f.sign_agrees,
            "max_rel_residual": (None if f.max_rel_residual is None
                                 else _json_number(f.max_rel_residual)),
            "magnitude_residual": (None if f.magnitude_residual is None
                                   else _json_number(f.magnitude_residual)),
            "valid_samples": f.valid_count,
            "note": f.note,
            "s": _json_array(f.s),
            "closed_form": _json_array(f.closed_form),
            "oracle": _json_array(f.oracle),
            "abs_residual": _json_array(f.abs_residual),
            "rel_residual": _json_array(f.rel_residual),
            "valid": _json_array(f.valid),
        }
    return {
        "kind": report.kind.value,
        "base": {"curve": report.base_name, "surface": report.surface_name},
        "tol": report.tol,
        "sample_count": report.sample_count,
        "formulas": formulas,
    }


def report_json(report: VerificationReport) -> str:
    """Deterministic JSON rendering of a report (sorted keys, no clock)."""
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
