"""Smarandache combinations of the Darboux frame and their closed forms.

A Smarandache curve replaces a curve by a normalized sum of its moving-frame
vectors.  For a surface curve with Darboux frame {T, g, n} four combinations
are built here: (T+g)/sqrt2, (T+n)/sqrt2, (g+n)/sqrt2 and (T+g+n)/sqrt3.
Each one lies on the unit sphere and is parameterized below by the arc
length s of the base curve; its own arc length s* satisfies ds*/ds = rate.

The coefficient families and the starred invariants (kappa*, tau*, k_g*,
k_n*, tau_g*, the frame vectors) are kept in their original printed form,
suspect terms included: they are the objects under audit, and ``verify``
supplies the independent numerics they are compared against.  Nothing in
this module is algebraically "corrected".
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .frames import (Classification, FrameGrid, SurfaceCurve, classify,
                     frame_grid, sample_at)
from .surfaces import Vec3

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

RADICAND_THRESHOLD = 1e-18
NORMALIZER_THRESHOLD = 1e-18

Scalar = Union[float, np.ndarray]


class NonRegularSmarandache(ArithmeticError):
    """The combined curve has zero speed (its rate radicand vanishes)."""


class DegenerateNormalizer(ArithmeticError):
    """A closed-form normalizer vanishes, leaving the expression undefined."""


class ClassificationMismatch(ValueError):
    """The base curve lacks the classification a special case requires."""


class SmarandacheKind(enum.Enum):
    """The four Darboux-frame combinations."""

    TG = "Tg"
    TN = "Tn"
    GN = "gn"
    TGN = "Tgn"


_WEIGHTS = {
    SmarandacheKind.TG: (1.0, 1.0, 0.0),
    SmarandacheKind.TN: (1.0, 0.0, 1.0),
    SmarandacheKind.GN: (0.0, 1.0, 1.0),
    SmarandacheKind.TGN: (1.0, 1.0, 1.0),
}


def combination_coords(kind: SmarandacheKind) -> np.ndarray:
    """Constant Darboux coordinates of the combination (unit norm)."""
    w = np.array(_WEIGHTS[kind])
    return w / np.linalg.norm(w)


@dataclass(frozen=True)
class InvariantJet:
    """k_g, k_n, tau_g and their first two arc-length derivatives.

    Fields accept floats or equally shaped arrays; every formula in this
    module broadcasts over them.
    """

    k_g: Scalar
    k_n: Scalar
    tau_g: Scalar
    k_g1: Scalar = 0.0
    k_n1: Scalar = 0.0
    tau_g1: Scalar = 0.0
    k_g2: Scalar = 0.0
    k_n2: Scalar = 0.0
    tau_g2: Scalar = 0.0

    @classmethod
    def from_grid(cls, grid: FrameGrid) -> "InvariantJet":
        return cls(grid.k_g, grid.k_n, grid.tau_g,
                   grid.k_g1, grid.k_n1, grid.tau_g1,
                   grid.k_g2, grid.k_n2, grid.tau_g2)


@dataclass(frozen=True)
class CoefficientTriple:
    """One printed coefficient family evaluated at a single jet."""

    c1: float
    c2: float
    c3: float


@dataclass(frozen=True)
class ClosedFormContext:
    """Free inputs of the closed forms.

    ``phi_star`` is the angle between the combination's own g* and the
    principal normal direction; ``dphi_star_ds_star`` its derivative with
    respect to the combination's arc length.  ``normalizer`` optionally
    overrides the coefficient-norm normalizer (the square root of the
    first-stage coefficient sum of squares) used by N*, B*, g* and n*;
    the speed-like factor is always computed from the invariants.
    """

    phi_star: float
    dphi_star_ds_star: float = 0.0
    normalizer: Optional[float] = None


@dataclass(frozen=True)
class ClosedFormInvariants:
    """Closed-form invariants of a combination at one arc length.

    Vectors are Darboux-coordinate triples of the base frame (components
    along T, g, n).  The special-case evaluator fills the scalars only.
    ``tau_g_star_single`` is the single-prefactor variant of tau_g* and is
    populated only for the Tg kind, whose printed form doubles the factor.
    """

    kappa_star: float
    tau_star: float
    k_g_star: float
    k_n_star: float
    tau_g_star: float
    T_star: Optional[Vec3] = None
    N_star: Optional[Vec3] = None
    B_star: Optional[Vec3] = None
    g_star: Optional[Vec3] = None
    n_star: Optional[Vec3] = None
    tau_g_star_single: Optional[float] = None


@dataclass(frozen=True)
class SmarandacheCurve:
    """A Darboux-frame combination curve riding on a base surface curve."""

    kind: SmarandacheKind
    base: SurfaceCurve

    def beta(self, s: float) -> Vec3:
        """World position of the combination at base arc length s."""
        sample = sample_at(self.base, s)
        c = combination_coords(self.kind)
        out = (c[0] * sample.T.as_array() + c[1] * sample.g.as_array()
               + c[2] * sample.n.as_array())
        return Vec3.from_array(out)

    def rate(self, s: float) -> float:
        """ds*/ds at base arc length s, from the printed radical."""
        sample = sample_at(self.base, s)
        return float(rate(self.kind, sample.k_g, sample.k_n, sample.tau_g))


def construct(kind: SmarandacheKind, base: SurfaceCurve) -> SmarandacheCurve:
    """Build the combination curve of the given kind over a base curve."""
    return SmarandacheCurve(kind=kind, base=base)


def beta_positions(kind: SmarandacheKind, grid: FrameGrid) -> np.ndarray:
    """World positions of the combination over a frame grid, shape (n, 3)."""
    c = combination_coords(kind)
    return c[0] * grid.T + c[1] * grid.g + c[2] * grid.n


def rate_radicand(kind: SmarandacheKind, k_g: Scalar, k_n: Scalar,
                  tau_g: Scalar) -> np.ndarray:
    """Squared speed (ds*/ds)^2 as the printed radicand; a total function."""
    kg = np.asarray(k_g, float)
    kn = np.asarray(k_n, float)
    tg = np.asarray(tau_g, float)
    if kind is SmarandacheKind.TG:
        return (2.0 * kg ** 2 + (kn + tg) ** 2) / 2.0
    if kind is SmarandacheKind.TN:
        return (2.0 * kn ** 2 + (tg - kg) ** 2) / 2.0
    if kind is SmarandacheKind.GN:
        return (2.0 * tg ** 2 + (kn + kg) ** 2) / 2.0
    return ((kn + kg) ** 2 + (tg - kg) ** 2 + (tg + kn) ** 2) / 3.0


def rate(kind: SmarandacheKind, k_g: Scalar, k_n: Scalar,
         tau_g: Scalar) -> Scalar:
    """Reparameterization speed ds*/ds of the combination.

    Raises
    ------
    NonRegularSmarandache
        If the radicand is <= RADICAND_THRESHOLD anywhere.
    """
    rad = rate_radicand(kind, k_g, k_n, tau_g)
    if np.any(rad <= RADICAND_THRESHOLD):
        raise NonRegularSmarandache(
            f"{kind.value} combination is singular here "
            f"(radicand {float(np.min(rad)):.3e})")
    out = np.sqrt(rad)
    return float(out) if out.ndim == 0 else out


def connection_matrix(kg, kn, tg) -> np.ndarray:
    """Matrix M with coords(w') = x' + M x for Darboux coordinates x.

    Encodes the frame system T' = k_g g + k_n n, g' = -k_g T + tau_g n,
    n' = -k_n T - tau_g g acting on coordinate triples.
    """
    z = np.zeros_like(np.asarray(kg, float))
    rows = [np.stack(np.broadcast_arrays(z, -kg, -kn), axis=-1),
            np.stack(np.broadcast_arrays(kg, z, -tg), axis=-1),
            np.stack(np.broadcast_arrays(kn, tg, z), axis=-1)]
    return np.stack(rows, axis=-2)


def beta_jets(kind: SmarandacheKind, grid: FrameGrid) -> tuple[np.ndarray,
                                                               np.ndarray,
                                                               np.ndarray,
                                                               np.ndarray]:
    """Darboux-coordinate derivatives of beta w.r.t. base arc length.

    Returns (b0, b1, b2, b3), each of shape (n, 3): exact order-0..3 jets
    obtained by chain-ruling the frame system, so b1 = coords(beta'),
    b2 = coords(beta'') and b3 = coords(beta''').  These feed the
    independent oracle; no closed form enters here.
    """
    b0 = np.broadcast_to(combination_coords(kind), (len(grid), 3))
    M0 = connection_matrix(grid.k_g, grid.k_n, grid.tau_g)
    M1 = connection_matrix(grid.k_g1, grid.k_n1, grid.tau_g1)
    M2 = connection_matrix(grid.k_g2, grid.k_n2, grid.tau_g2)

    def mv(M, x):
        return np.einsum("...ij,...j->...i", M, x)

    b1 = mv(M0, b0)
    b1p = mv(M1, b0)                      # coordinate part of b1'
    b2 = b1p + mv(M0, b1)
    b2p = mv(M2, b0) + mv(M1, b1) + mv(M0, b1p)
    b3 = b2p + mv(M0, b2)
    return b0, b1, b2, b3


def _j3(j: InvariantJet):
    return (np.asarray(j.k_g, float), np.asarray(j.k_n, float),
            np.asarray(j.tau_g, float))


def _j9(j: InvariantJet):
    return (np.asarray(j.k_g, float), np.asarray(j.k_n, float),
            np.asarray(j.tau_g, float), np.asarray(j.k_g1, float),
            np.asarray(j.k_n1, float), np.asarray(j.tau_g1, float),
            np.asarray(j.k_g2, float), np.asarray(j.k_n2, float),
            np.asarray(j.tau_g2, float))


def _vec(scale, x, y, z) -> np.ndarray:
    v = np.stack(np.broadcast_arrays(np.asarray(x, float),
                                     np.asarray(y, float),
                                     np.asarray(z, float)), axis=-1)
    return np.asarray(scale, float)[..., None] * v


# --- Tg: beta = (T + g)/sqrt2 -------------------------------------------

def _tg_Gamma(j):
    kg, kn, tg, kg1, kn1, tg1, _, _, _ = _j9(j)
    w = kn + tg
    brk = 2.0 * kg ** 2 + w ** 2
    G1 = w * (kg * (kn1 + tg1 - kn * kg - tg * kg) - kg1 * w
              - kn * brk) - 2.0 * kg ** 4
    # the trailing term repeats Gamma_1's, as printed
    G2 = w * (-kg * (kn1 + tg1 + kn * kg + tg * kg) + kg1 * w
              - tg * brk) - 2.0 * kg ** 4
    G3 = (kg * w * (-2.0 * kg1 - kn + tg * w)
          + 2.0 * kg ** 2 * (kg * tg + kn1 + tg1))
    return G1, G2, G3


def _tg_mu(j, G):
    kg, kn, tg = _j3(j)
    w = kn + tg
    G1, G2, G3 = G
    return (kg * G3 - w * G2,
            w * G1 + kg * G3,
            -kg * G2 - kg * G1)


def _tg_eta(j):
    kg, kn, tg, kg1, kn1, tg1, kg2, _, tg2 = _j9(j)
    w = kn + tg
    e1 = (kg2 + 2.0 * kn * (kn1 + tg1)
          + kg * (3.0 * kg1 - tg ** 2 - kn ** 2 - kg ** 2) + kn1 * w)
    e2 = (-kg2 + 2.0 * tg * (kn1 + tg1)
          + kg * (3.0 * kg1 + tg ** 2 + kn ** 2 + kg ** 2) + tg1 * w)
    e3 = (-kg2 - tg2 + kg * (kn1 - tg1)
          + w * (tg ** 2 + kn ** 2 + kg ** 2) + 2.0 * kg1 * (kn - tg))
    return e1, e2, e3


def _tg_torsion(j):
    kg, kn, tg, kg1, kn1, tg1, _, _, _ = _j9(j)
    w = kn + tg
    e1, e2, e3 = _tg_eta(j)
    num = ((e1 + e2) * (kg * (kn1 + tg1) - kg1 * w)
           + (2.0 * kg ** 2 + w ** 2) * (tg * e1 - kn * e2 + kg * e3))
    den = (2.0 * (kg1 ** 2 + kg ** 4)
           + w * (w * (kn ** 2 + tg ** 2) + 2.0 * kn * (kg1 + kg ** 2)
                  + 2.0 * tg * (kg1 - kg ** 2))
           + (kn1 + tg1) * (kn1 + tg1 - 2.0 * kg * (kn - tg))
           + kg ** 2 * (kn - tg) ** 2)
    return num, den


def _forms_tg(j, phi, dphi, normalizer):
    kg, kn, tg = _j3(j)
    w = kn + tg
    vs = 2.0 * kg ** 2 + w ** 2
    rvs = np.sqrt(vs)
    G1, G2, G3 = _tg_Gamma(j)
    m1, m2, m3 = _tg_mu(j, (G1, G2, G3))
    sumsq = G1 ** 2 + G2 ** 2 + G3 ** 2
    eps = np.sqrt(sumsq) if normalizer is None else normalizer
    num, den = _tg_torsion(j)
    quot = num / den
    kappa = np.sqrt(2.0 * sumsq) / vs ** 2
    cosp, sinp = np.cos(phi), np.sin(phi)
    return {
        "rate": np.sqrt(vs / 2.0),
        "tangent-star": _vec(-1.0 / rvs, kg, -kg, -w),
        "kappa-star": kappa,
        "normal-star": _vec(1.0 / eps, G1, G2, G3),
        "binormal-star": _vec(1.0 / (rvs * eps), m1, m2, m3),
        "tau-star": (-1.0 / SQRT2) * quot,
        "g-star": _vec(1.0 / (rvs * eps),
                       rvs * cosp * G1 + sinp * m1,
                       rvs * cosp * G2 + sinp * m2,
                       rvs * cosp * G3 + sinp * m3),
        "n-star": _vec(1.0 / (rvs * eps),
                       m1 * cosp - rvs * sinp * G1,
                       m2 * cosp - rvs * sinp * G2,
                       m3 * cosp - rvs * sinp * G3),
        "k-g-star": kappa * cosp,
        "k-n-star": kappa * sinp,
        # the doubled prefactor is kept as printed; the single-factor
        # reading is reported alongside it
        "tau-g-star": (-1.0 / SQRT2) * (-1.0 / SQRT2) * quot + dphi,
        "tau-g-star-single": (-1.0 / SQRT2) * quot + dphi,
    }


def _cor_tg(j, phi, dphi):
    _, kn, tg, _, kn1, tg1, _, _, _ = _j9(j)
    w = kn + tg
    kappa = np.sqrt(2.0 * (kn ** 2 + tg ** 2)) / w
    quot = ((w ** 2 + w * (kn1 * tg - kn * tg1))
            / (w ** 3 * (kn ** 2 + tg ** 2) + (kn1 + tg1) ** 2))
    tau = (-1.0 / SQRT2) * quot
    return {"kappa-star": kappa, "tau-star": tau,
            "k-g-star": kappa * np.cos(phi),
            "k-n-star": kappa * np.sin(phi),
            "tau-g-star": tau + dphi}


# --- Tn: beta = (T + n)/sqrt2 -------------------------------------------

def _tn_gamma(j):
    kg, kn, tg, kg1, kn1, tg1, _, _, _ = _j9(j)
    v = tg - kg
    # the bracket (2 k_n^2 + v) lacks a square on v, as printed
    g1 = (v * (kn * (-kg1 + tg1 + kn * kg - tg * kn) - kn1 * v
               + kg * (2.0 * kn ** 2 + v)) - 2.0 * kn ** 4)
    g2 = (kn * v * (2.0 * kn1 + tg * (kg ** 2 - tg ** 2))
          - 2.0 * kn ** 2 * (kn * kg + tg1 - kg1 - kn * tg))
    g3 = (v * (-kn * (-kg1 + tg1 - kn * kg + tg * kn) + kn1 * v
               - tg * (2.0 * kn ** 2 + v)) - 2.0 * kn ** 4)
    return g1, g2, g3


def _tn_nu(j, G):
    kg, kn, tg = _j3(j)
    g1, g2, g3 = G
    return ((kg - tg) * g3 - kn * g2,
            kn * g1 + kn * g3,
            -kn * g2 + (tg - kg) * g1)


def _tn_omega(j):
    kg, kn, tg, kg1, kn1, tg1, kg2, kn2, tg2 = _j9(j)
    o1 = (kn2 - 2.0 * kg * (tg1 - kg1)
          + kn * (3.0 * kn1 - tg ** 2 - kn ** 2 - kg ** 2)
          + kg1 * (kg - tg))
    o2 = (kg2 - tg2 + kn * (kg1 + tg1)
          + (kg - tg) * (tg ** 2 + kn ** 2 + kg ** 2)
          + tg * (2.0 * kn1 - kn ** 2) + 2.0 * kg * kn1)
    o3 = (-kn2 + 2.0 * tg * (tg1 - kg1)
          + kn * (3.0 * kn1 + tg ** 2 + tg * (kg + tg))
          + (kg - tg) * (kn * kg - tg1))
    return o1, o2, o3


def _tn_torsion(j):
    kg, kn, tg, kg1, kn1, tg1, _, _, _ = _j9(j)
    v = tg - kg
    o1, o2, o3 = _tn_omega(j)
    num = ((o1 + o3) * (kn * (tg1 - kg1) - kn1 * v + kn ** 2 * (tg + kg))
           + v ** 2 * (tg * o1 + kg * o3)
           + kn * v * (kn * (o1 - o3) + o2 * (kg - tg))
           - 2.0 * kn * (kn1 + kn ** 2) * o2)
    den = (2.0 * (kn1 ** 2 + kn ** 4)
           + v * (2.0 * (kn ** 2 - kn1) - 2.0 * (kn ** 2 - kn1) * kg)
           + v ** 2 * (1.0 + kg ** 2)       # dimensionally odd, as printed
           + (tg - kg1) * ((tg1 - kg1) + 2.0 * (kn * kg + kn * tg))
           + kn ** 2 * (kg + tg) ** 2)
    return num, den


def _forms_tn(j, phi, dphi, normalizer):
    kg, kn, tg = _j3(j)
    v = tg - kg
    psi = 2.0 * kn ** 2 + v ** 2
    rpsi = np.sqrt(psi)
    g1, g2, g3 = _tn_gamma(j)
    n1, n2, n3 = _tn_nu(j, (g1, g2, g3))
    sumsq = g1 ** 2 + g2 ** 2 + g3 ** 2
    pin = np.sqrt(sumsq) if normalizer is None else normalizer
    num, den = _tn_torsion(j)
    quot = num / den
    kappa = np.sqrt(2.0 * sumsq) / psi ** 2
    cosp, sinp = np.cos(phi), np.sin(phi)
    return {
        "rate": np.sqrt(psi / 2.0),
        "tangent-star": _vec(-1.0 / rpsi, kn, v, -kn),
        "kappa-star": kappa,
        "normal-star": _vec(1.0 / pin, g1, g2, g3),
        "binormal-star": _vec(1.0 / (rpsi * pin), n1, n2, n3),
        "tau-star": (-1.0 / SQRT2) * quot,
        "g-star": _vec(1.0 / (rpsi * pin),
                       rpsi * cosp * g1 + sinp * n1,
                       rpsi * cosp * g2 + sinp * n2,
                       rpsi * cosp * g3 + sinp * n3),
        "n-star": _vec(1.0 / (rpsi * pin),
                       n1 * cosp - rpsi * sinp * g1,
                       n2 * cosp - rpsi * sinp * g2,
                       n3 * cosp - rpsi * sinp * g3),
        "k-g-star": kappa * cosp,
        "k-n-star": kappa * sinp,
        "tau-g-star": (-1.0 / SQRT2) * quot + dphi,
    }


def _cor_tn(j, phi, dphi):
    kg, _, tg, kg1, _, tg1, _, _, _ = _j9(j)
    v = tg - kg
    kappa = np.sqrt(2.0 * (kg ** 2 + tg ** 2)) / v ** 2
    quot = ((kg - tg) * (kg1 * tg - kg * tg1)
            / ((1.0 + kg ** 2) * (tg - kg1) * (tg1 - kg1) * v ** -2.0))
    tau = (-1.0 / SQRT2) * quot
    return {"kappa-star": kappa, "tau-star": tau,
            "k-g-star": kappa * np.cos(phi),
            "k-n-star": kappa * np.sin(phi),
            "tau-g-star": tau + dphi}


# --- gn: beta = (g + n)/sqrt2 -------------------------------------------

def _gn_lambda(j):
    kg, kn, tg, kg1, kn1, tg1, _, _, _ = _j9(j)
    w = kn + kg
    brk = 2.0 * tg ** 2 + w ** 2
    l1 = (2.0 * tg * tg1 * w - 2.0 * tg ** 2 * (kn1 + kg1)
          + tg * (kg - kn) * brk)
    l2 = (-2.0 * tg ** 4 + tg * w * ((kn1 + kg1) - 2.0 * tg * kg)
          - w ** 2 * (w * kg + tg1 + tg ** 2))
    l3 = (-2.0 * tg ** 4 + tg * w * ((kn1 + kg1) - 2.0 * tg * kn)
          + w ** 2 * (-w * kn + tg1 - tg ** 2))
    return l1, l2, l3


def _gn_rho(j, G):
    kg, kn, tg = _j3(j)
    w = kn + kg
    l1, l2, l3 = G
    return (-tg * l3 - tg * l2,
            tg * l1 + w * l3,
            -w * l2 + tg * l1)


def _gn_chi(j):
    kg, kn, tg, kg1, kn1, tg1, kg2, kn2, tg2 = _j9(j)
    w = kn + kg
    c1 = (kn2 + kg2 - 2.0 * tg1 * (kn - kg) + tg * (kn1 - kg1)
          - w * (tg ** 2 + kn ** 2 + kg ** 2))
    c2 = (tg2 + 2.0 * kg * (kn1 + kg1) + 3.0 * tg * tg1
          + w * (kg1 - tg * kn) + kg * tg * (kn - kg) - tg ** 3)
    c3 = (tg2 + 2.0 * kn * (kn1 + kg1) + 3.0 * tg * tg1
          + w * (kg1 + tg * kg) + kn * tg * (kn - kg) + tg ** 3)
    return c1, c2, c3


def _gn_torsion(j):
    kg, kn, tg, kg1, kn1, tg1, _, _, _ = _j9(j)
    w = kn + kg
    c1, c2, c3 = _gn_chi(j)
    sq = (kn1 + kg1) + tg * (kn - kg)
    num = (w ** 2 * (((tg1 + tg) ** 2 + kg * w) * c3
                     - ((tg1 - tg) ** 2 - kn * w) * c2
                     + tg * w * c1)
           - tg * (c2 + c3) * sq ** 2)
    den = (w ** 2 * (kn ** 2 + kg ** 2)
           + 2.0 * w * (kg * (tg1 + tg ** 2) + 2.0 * kn * (tg ** 2 - tg1))
           + 2.0 * tg1 ** 2 + 2.0 * tg ** 4 + sq ** 2)
    return num, den


def _forms_gn(j, phi, dphi, normalizer):
    kg, kn, tg = _j3(j)
    w = kn + kg
    dl = 2.0 * tg ** 2 + w ** 2
    rdl = np.sqrt(dl)
    l1, l2, l3 = _gn_lambda(j)
    r1, r2, r3 = _gn_rho(j, (l1, l2, l3))
    sumsq = l1 ** 2 + l2 ** 2 + l3 ** 2
    om = np.sqrt(sumsq) if normalizer is None else normalizer
    num, den = _gn_torsion(j)
    quot = num / den
    kappa = np.sqrt(2.0 * sumsq) / dl ** 2
    cosp, sinp = np.cos(phi), np.sin(phi)
    return {
        "rate": np.sqrt(dl / 2.0),
        "tangent-star": _vec(-1.0 / rdl, w, tg, -tg),
        "kappa-star": kappa,
        "normal-star": _vec(1.0 / om, l1, l2, l3),
        "binormal-star": _vec(1.0 / (rdl * om), r1, r2, r3),
        "tau-star": (-1.0 / SQRT2) * quot,
        "g-star": _vec(1.0 / (rdl * om),
                       rdl * cosp * l1 + sinp * r1,
                       rdl * cosp * l2 + sinp * r2,
                       rdl * cosp * l3 + sinp * r3),
        "n-star": _vec(1.0 / (rdl * om),
                       r1 * cosp - rdl * sinp * l1,
                       r2 * cosp - rdl * sinp * l2,
                       r3 * cosp - rdl * sinp * l3),
        "k-g-star": kappa * cosp,
        "k-n-star": kappa * sinp,
        "tau-g-star": (-1.0 / SQRT2) * quot + dphi,
    }


def _cor_gn(j, phi, dphi):
    kg, kn, tg, kg1, kn1, tg1, _, _, _ = _j9(j)
    # the radical quotient repeats the Tg special case, as printed
    kappa = np.sqrt(2.0 * (kn ** 2 + tg ** 2)) / (kn + tg)
    quot = (((kn + tg) ** 2 + (kg * kn1 - kn * kg1))
            / ((kn ** 2 + kg ** 2)
               + (kn1 + tg1) ** 2 * (kn + kg) ** -2.0))
    tau = (-1.0 / SQRT2) * quot
    return {"kappa-star": kappa, "tau-star": tau,
            "k-g-star": kappa * np.cos(phi),
            "k-n-star": kappa * np.sin(phi),
            "tau-g-star": tau + dphi}


# --- Tgn: beta = (T + g + n)/sqrt3 --------------------------------------

def _tgn_delta(j):
    kg, kn, tg, kg1, kn1, tg1, _, _, _ = _j9(j)
    a = kn + kg
    b = tg - kg
    c = tg + kn
    # the (tg + kg) factor below mixes the two combinations, as printed
    d1 = (a ** 2 * (kg * b - kn * c)
          + a * (b * (tg1 - kg1) + (tg + kg) * (tg1 + kn1))
          + (b ** 2 + c ** 2) * (kg * b - (kg1 + kn1) - kn * c))
    d2 = (b ** 2 * (-kg * a - tg * c)
          + b * (a * (kg1 + kn1) + c * (tg1 + kn1))
          + (a ** 2 + c ** 2) * (-kg * a + (kg1 - tg1) - tg * c))
    d3 = (c ** 2 * (tg * (kg - tg) - kn * a)
          + c * (-a * (kg1 + kn1) - b * (tg1 - kg1))
          + (a ** 2 + b ** 2) * (tg * (kg - tg) + (tg1 + kn1) - kn * a))
    return d1, d2, d3


def _tgn_sigma(j, G):
    kg, kn, tg = _j3(j)
    a = kn + kg
    c = tg + kn
    d1, d2, d3 = G
    return ((kg - tg) * d3 - c * d2,
            c * d1 + a * d3,
            -a * d2 - (kg - tg) * d1)


def _tgn_xi(j):
    kg, kn, tg, kg1, kn1, tg1, kg2, kn2, tg2 = _j9(j)
    a = kn + kg
    x1 = (kn2 + kg2 - 2.0 * kg1 * (kg1 - tg1) - a * (kn ** 2 + kg ** 2)
          + (kg - tg) * (kg1 + kn * tg) + 2.0 * kn * (kn1 + tg1)
          + (kn + tg) * (kn1 - kg * tg))
    x2 = (tg2 - kg2 + 2.0 * tg * (kn1 + tg1) + 2.0 * kg * (kn1 + kg1)
          + a * (kg1 - kn * tg) + (tg + kn) * (kn * kg + tg1)
          + (kg - tg) * (kg ** 2 + tg ** 2))
    x3 = (-(tg2 + kn2) + 2.0 * kn * (kn1 + kg1)
          + (tg - kg) * (tg1 - kn * kg) + a * (kn1 + kg * tg)
          + 2.0 * tg * (tg1 - kg1) + (kn + tg) * (kn ** 2 + tg ** 2))
    return x1, x2, x3


def _tgn_torsion(j):
    kg, kn, tg, kg1, kn1, tg1, _, _, _ = _j9(j)
    a = kn + kg
    b = kg - tg
    c = kn + tg
    x1, x2, x3 = _tgn_xi(j)
    num = (a * b * (tg * x2 - kn * x1)
           + b ** 2 * (tg * x1 + kg * x3)
           + (kn1 + tg1) * (b * x1 + a * x2)
           # (kn1 + tg) mixes a derivative with an invariant, as printed
           - (kn1 + kg1) * ((kn1 + tg) * x1 + b * x3 - c * x2)
           + c ** 2 * (tg * x1 - kn * x2)
           + c * a * (tg * x3 + kg * x1)
           + c ** 2 * (kg * x3 - kn * x2)
           + b * c * (kn * x3 - kg * x2)
           + a * (tg1 - kg1))
    den = (b ** 2 * (kg ** 2 + tg ** 2)
           + 2.0 * (kn1 + kg1) * (kg * b + kn * c)
           + c ** 2 * (kn ** 2 + tg ** 2)
           + 2.0 * c * (tg * (tg1 - kg1) + kg ** 2 * c)
           + a ** 2 * (kn ** 2 + tg ** 2)
           + 2.0 * a * (kg * (tg1 - kg1) - kn * (tg1 + kg1))
           + kn * tg * (tg - kg)
           + (kn1 + kg1) ** 2
           + (kn ** 2 + tg ** 2)
           + (tg1 - kg1) ** 2
           + (tg1 - kn1) ** 2
           - 2.0 * tg * (tg - kg) * (tg1 + kn1))
    return num, den


def _forms_tgn(j, phi, dphi, normalizer):
    kg, kn, tg = _j3(j)
    a = kn + kg
    b = tg - kg
    c = tg + kn
    lam = a ** 2 + b ** 2 + c ** 2
    rlam = np.sqrt(lam)
    d1, d2, d3 = _tgn_delta(j)
    s1, s2, s3 = _tgn_sigma(j, (d1, d2, d3))
    sumsq = d1 ** 2 + d2 ** 2 + d3 ** 2
    phin = np.sqrt(sumsq) if normalizer is None else normalizer
    num, den = _tgn_torsion(j)
    quot = num / den
    # sqrt(2 ...) kept as printed; substituting the speed factor of this
    # combination would give sqrt(3 ...)
    kappa = np.sqrt(2.0 * sumsq) / lam ** 2
    cosp, sinp = np.cos(phi), np.sin(phi)
    # denominators follow the parallel combinations (radical on the speed
    # factor, coefficient norm beside it); the printed forms swap symbols
    return {
        "rate": np.sqrt(lam / 3.0),
        "tangent-star": _vec(-1.0 / rlam, a, b, -c),
        "kappa-star": kappa,
        "normal-star": _vec(1.0 / phin, d1, d2, d3),
        "binormal-star": _vec(1.0 / (rlam * phin), s1, s2, s3),
        "tau-star": (-1.0 / SQRT3) * quot,
        "g-star": _vec(1.0 / (rlam * phin),
                       rlam * cosp * d1 + sinp * s1,
                       rlam * cosp * d2 + sinp * s2,
                       rlam * cosp * d3 + sinp * s3),
        "n-star": _vec(1.0 / (rlam * phin),
                       s1 * cosp - rlam * sinp * d1,
                       s2 * cosp - rlam * sinp * d2,
                       s3 * cosp - rlam * sinp * d3),
        "k-g-star": kappa * cosp,
        "k-n-star": kappa * sinp,
        "tau-g-star": (-1.0 / SQRT3) * quot + dphi,
    }


_FORMS = {
    SmarandacheKind.TG: _forms_tg,
    SmarandacheKind.TN: _forms_tn,
    SmarandacheKind.GN: _forms_gn,
    SmarandacheKind.TGN: _forms_tgn,
}

_FIRST_STAGE = {
    SmarandacheKind.TG: _tg_Gamma,
    SmarandacheKind.TN: _tn_gamma,
    SmarandacheKind.GN: _gn_lambda,
    SmarandacheKind.TGN: _tgn_delta,
}

_COROLLARY_FORMS = {
    SmarandacheKind.TG: _cor_tg,
    SmarandacheKind.TN: _cor_tn,
    SmarandacheKind.GN: _cor_gn,
}

_COROLLARY_TAG = {
    SmarandacheKind.TG: "corollary1",
    SmarandacheKind.TN: "corollary2",
    SmarandacheKind.GN: "corollary3",
}

_COROLLARY_REQUIRES = {
    SmarandacheKind.TG: Classification.GEODESIC,
    SmarandacheKind.TN: Classification.ASYMPTOTIC_LINE,
    SmarandacheKind.GN: Classification.PRINCIPAL_LINE,
}

_FAMILIES = {
    (SmarandacheKind.TG, "Gamma"): (_tg_Gamma, None),
    (SmarandacheKind.TG, "mu"): (_tg_mu, _tg_Gamma),
    (SmarandacheKind.TG, "eta"): (_tg_eta, None),
    (SmarandacheKind.TN, "gamma"): (_tn_gamma, None),
    (SmarandacheKind.TN, "nu"): (_tn_nu, _tn_gamma),
    (SmarandacheKind.TN, "omega"): (_tn_omega, None),
    (SmarandacheKind.GN, "lambda"): (_gn_lambda, None),
    (SmarandacheKind.GN, "rho"): (_gn_rho, _gn_lambda),
    (SmarandacheKind.GN, "chi"): (_gn_chi, None),
    (SmarandacheKind.TGN, "delta"): (_tgn_delta, None),
    (SmarandacheKind.TGN, "sigma"): (_tgn_sigma, _tgn_delta),
    (SmarandacheKind.TGN, "xi"): (_tgn_xi, None),
}

_BASE_NAMES = ("rate", "tangent-star", "kappa-star", "normal-star",
               "binormal-star", "tau-star", "g-star", "n-star",
               "k-g-star", "k-n-star", "tau-g-star")

_COROLLARY_NAMES = ("kappa-star", "tau-star", "k-g-star", "k-n-star",
                    "tau-g-star")


def corollary_requirement(kind: SmarandacheKind) -> Optional[Classification]:
    """Base-curve classification the kind's special case needs, if any."""
    return _COROLLARY_REQUIRES.get(kind)


def formula_names(kind: SmarandacheKind) -> tuple[str, ...]:
    """Static registry of every closed form implemented for a kind."""
    names = list(_BASE_NAMES)
    if kind is SmarandacheKind.TG:
        names.append("tau-g-star-single")
    tag = _COROLLARY_TAG.get(kind)
    if tag is not None:
        names.extend(f"{name}-{tag}" for name in _COROLLARY_NAMES)
    return tuple(names)


def coefficients(kind: SmarandacheKind, family: str, jet: InvariantJet,
                 base_triple: Optional[CoefficientTriple] = None
                 ) -> CoefficientTriple:
    """Evaluate one printed coefficient family at a single jet.

    The cross-product families (mu, nu, rho, sigma) consume the kind's
    first-stage triple; pass ``base_triple`` to supply it directly,
    otherwise it is computed from ``jet``.
    """
    try:
        fn, first = _FAMILIES[(kind, family)]
    except KeyError:
        raise ValueError(f"no family {family!r} for kind {kind.value}") \
            from None
    if first is not None:
        base = ((base_triple.c1, base_triple.c2, base_triple.c3)
                if base_triple is not None else first(jet))
        c1, c2, c3 = fn(jet, base)
    else:
        if base_triple is not None:
            raise ValueError(f"family {family!r} takes no base triple")
        c1, c2, c3 = fn(jet)
    return CoefficientTriple(float(c1), float(c2), float(c3))


def closed_form_grid(kind: SmarandacheKind, grid: FrameGrid,
                     phi_star, dphi_star_ds_star) -> dict[str, np.ndarray]:
    """Evaluate every printed closed form of a kind over a frame grid.

    Vector entries are (n, 3) Darboux-coordinate arrays.  No regularity
    gating happens here: degenerate samples produce non-finite entries for
    the caller to classify.
    """
    j = InvariantJet.from_grid(grid)
    phi = np.asarray(phi_star, float)
    dphi = np.asarray(dphi_star_ds_star, float)
    with np.errstate(all="ignore"):
        return _FORMS[kind](j, phi, dphi, None)


def corollary_grid(kind: SmarandacheKind, grid: FrameGrid,
                   phi_star, dphi_star_ds_star) -> dict[str, np.ndarray]:
    """Special-case closed forms over a grid, keyed with the case tag.

    No classification gating happens here; the caller decides whether the
    special case applies to the base curve.
    """
    fn = _COROLLARY_FORMS.get(kind)
    if fn is None:
        raise ValueError(f"no special-case forms for kind {kind.value}")
    j = InvariantJet.from_grid(grid)
    phi = np.asarray(phi_star, float)
    dphi = np.asarray(dphi_star_ds_star, float)
    with np.errstate(all="ignore"):
        vals = fn(j, phi, dphi)
    tag = _COROLLARY_TAG[kind]
    return {f"{name}-{tag}": value for name, value in vals.items()}


def closed_form(kind: SmarandacheKind, base: SurfaceCurve, s: float,
                ctx: ClosedFormContext) -> ClosedFormInvariants:
    """All printed closed-form invariants of a combination at arc length s.

    Raises
    ------
    NonRegularSmarandache
        If the rate radicand is below threshold at s.
    DegenerateNormalizer
        If the coefficient-norm normalizer is below threshold.
    """
    grid = frame_grid(base, np.array([float(s)]))
    rad = float(rate_radicand(kind, grid.k_g, grid.k_n, grid.tau_g)[0])
    if rad <= RADICAND_THRESHOLD:
        raise NonRegularSmarandache(
            f"{kind.value} combination is singular at s={s:g} "
            f"(radicand {rad:.3e})")
    j = InvariantJet.from_grid(grid)
    if ctx.normalizer is not None:
        norm = float(ctx.normalizer)
    else:
        c1, c2, c3 = _FIRST_STAGE[kind](j)
        norm = float(np.sqrt(c1 ** 2 + c2 ** 2 + c3 ** 2)[0])
    if norm <= NORMALIZER_THRESHOLD:
        raise DegenerateNormalizer(
            f"coefficient normalizer {norm:.3e} at s={s:g}")
    with np.errstate(all="ignore"):
        vals = _FORMS[kind](j, np.array([ctx.phi_star]),
                            np.array([ctx.dphi_star_ds_star]),
                            ctx.normalizer)

    def pick(name: str) -> float:
        return float(vals[name][0])

    def vec(name: str) -> Vec3:
        return Vec3.from_array(vals[name][0])

    single = pick("tau-g-star-single") if kind is SmarandacheKind.TG else None
    return ClosedFormInvariants(
        kappa_star=pick("kappa-star"), tau_star=pick("tau-star"),
        k_g_star=pick("k-g-star"), k_n_star=pick("k-n-star"),
        tau_g_star=pick("tau-g-star"),
        T_star=vec("tangent-star"), N_star=vec("normal-star"),
        B_star=vec("binormal-star"), g_star=vec("g-star"),
        n_star=vec("n-star"), tau_g_star_single=single)


def corollary(kind: SmarandacheKind, base: SurfaceCurve, s: float,
              ctx: Optional[ClosedFormContext] = None,
              tol: float = 1e-6) -> ClosedFormInvariants:
    """Special-case invariants: Tg needs a geodesic base, Tn an asymptotic
    line, gn a principal line; Tgn has no special case.

    When ``ctx`` is omitted the angle inputs come from the carrier-sphere
    frame of the combination (see ``verify.phi_star_context``).

    Raises
    ------
    ClassificationMismatch
        If the base curve is not classified as required within ``tol``.
    """
    required = _COROLLARY_REQUIRES.get(kind)
    if required is None:
        raise ValueError(f"no special-case forms for kind {kind.value}")
    if required not in classify(base, tol):
        raise ClassificationMismatch(
            f"base curve is not a {required.value} within {tol:g}")
    if ctx is None:
        from . import verify
        ctx = verify.phi_star_context(construct(kind, base), float(s))
    grid = frame_grid(base, np.array([float(s)]))
    with np.errstate(all="ignore"):
        vals = _COROLLARY_FORMS[kind](InvariantJet.from_grid(grid),
                                      np.array([ctx.phi_star]),
                                      np.array([ctx.dphi_star_ds_star]))
    return ClosedFormInvariants(
        kappa_star=float(vals["kappa-star"][0]),
        tau_star=float(vals["tau-star"][0]),
        k_g_star=float(vals["k-g-star"][0]),
        k_n_star=float(vals["k-n-star"][0]),
        tau_g_star=float(vals["tau-g-star"][0]))
