"""Darboux/Frenet frames on parametric surfaces, derived Smarandache curves,
and a numerical audit of their closed-form invariants."""

from .expr import (
    DomainError,
    Expr,
    ParseError,
    UnboundVariable,
    differentiate,
    evaluate,
    parse,
    to_string,
)
from .frames import (
    Classification,
    FrameGrid,
    FrameSample,
    SurfaceCurve,
    VanishingCurvature,
    classify,
    frame_grid,
    sample_at,
    surface_curve,
    uniform_grid,
)
from .numeric import NonRegularCurve, OutOfRange
from .presets import PRESET_NAMES, preset
from .smarandache import (
    ClassificationMismatch,
    ClosedFormContext,
    ClosedFormInvariants,
    DegenerateNormalizer,
    NonRegularSmarandache,
    SmarandacheCurve,
    SmarandacheKind,
    beta_positions,
    closed_form,
    construct,
    corollary,
    formula_names,
)
from .surfaces import (
    BUILTIN_SURFACES,
    OutOfDomain,
    Surface,
    Vec3,
    builtin,
    from_expressions,
)
from .verify import (
    FormulaAudit,
    OracleInvariants,
    Verdict,
    VerificationReport,
    audit,
    oracle_frenet,
    oracle_sphere_darboux,
    report_json,
)

__all__ = [
    "BUILTIN_SURFACES",
    "Classification",
    "ClassificationMismatch",
    "ClosedFormContext",
    "ClosedFormInvariants",
    "DegenerateNormalizer",
    "DomainError",
    "Expr",
    "FormulaAudit",
    "FrameGrid",
    "FrameSample",
    "NonRegularCurve",
    "NonRegularSmarandache",
    "OracleInvariants",
    "OutOfDomain",
    "OutOfRange",
    "ParseError",
    "PRESET_NAMES",
    "SmarandacheCurve",
    "SmarandacheKind",
    "Surface",
    "SurfaceCurve",
    "UnboundVariable",
    "VanishingCurvature",
    "Vec3",
    "Verdict",
    "VerificationReport",
    "audit",
    "beta_positions",
    "builtin",
    "classify",
    "closed_form",
    "construct",
    "corollary",
    "differentiate",
    "evaluate",
    "formula_names",
    "frame_grid",
    "from_expressions",
    "oracle_frenet",
    "oracle_sphere_darboux",
    "parse",
    "preset",
    "report_json",
    "sample_at",
    "surface_curve",
    "to_string",
    "uniform_grid",
]
