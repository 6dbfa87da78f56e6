"""Command-line front end: sample grids and closed-form audits as artifacts.

Subcommands
-----------
eval    sample a base curve and its Smarandache combinations (CSV or JSON)
verify  audit every registered closed form and emit one JSON report per kind
list    show builtin surfaces, curve presets, and registered formula ids

Configuration is an optional JSON file (``--config``) merged with flags;
flags win.  Schema (every key optional)::

    {
      "preset": "equator",
      "surface": "sphere"  |  {"name": "...", "x": "...", "y": "...",
                               "z": "...", "u_range": [lo, hi],
                               "v_range": [lo, hi]},
      "curve": {"name": "...", "u": "<expr in t>", "v": "<expr in t>",
                "t_range": [lo, hi]},
      "kinds": ["Tg", "Tn", "gn", "Tgn"],
      "samples": 256,
      "tol": 1e-8,
      "flip_normal": false,
      "phi_star": null,
      "output": {"format": "csv", "path": null}
    }

``preset`` is mutually exclusive with ``surface``/``curve`` (a flag replaces
whichever the config file used).  ``phi_star`` pins the closed forms' free
angle during ``verify``; ``eval`` reports measured quantities only.  CSV
layout is a fixed 20-column base block (s, t, position, T, g, n, k_g, k_n,
tau_g, kappa, tau, phi) plus 13 columns per requested kind, prefixed with
the kind name; undefined values are empty cells.  Output is deterministic:
repeated runs of one configuration are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .expr import ParseError, parse
from .frames import SurfaceCurve, surface_curve, uniform_grid
from .numeric import cumulative_integral
from .presets import PRESET_NAMES, preset
from .smarandache import (
    RADICAND_THRESHOLD,
    SmarandacheKind,
    beta_positions,
    formula_names,
    rate_radicand,
)
from .surfaces import BUILTIN_SURFACES, Surface, builtin, from_expressions
from .verify import audit, oracle_columns, report_to_dict


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


MIN_SAMPLES = 16
VERIFY_MARGIN = 0.02

_KIND_BY_VALUE = {k.value: k for k in SmarandacheKind}

_DEFAULTS = {
    "preset": None,
    "surface": None,
    "curve": None,
    "kinds": [k.value for k in SmarandacheKind],
    "samples": 256,
    "tol": 1e-8,
    "flip_normal": False,
    "phi_star": None,
    "output": {"format": "csv", "path": None},
}

BASE_COLUMNS = (
    "s", "t", "x", "y", "z",
    "T_x", "T_y", "T_z", "g_x", "g_y", "g_z", "n_x", "n_y", "n_z",
    "k_g", "k_n", "tau_g", "kappa", "tau", "phi",
)
KIND_COLUMNS = (
    "s_star", "rate", "regular", "beta_x", "beta_y", "beta_z",
    "kappa_star", "tau_star", "k_g_star", "k_n_star", "tau_g_star",
    "phi_star", "dphi_star_ds_star",
)


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters with the base curve already built."""

    curve: SurfaceCurve
    kinds: tuple[SmarandacheKind, ...]
    samples: int
    tol: float
    flip_normal: bool
    phi_star_override: Optional[float]
    output_format: str
    output_path: Optional[str]


def _real(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(field, f"expected a number, got {value!r}")
    return float(value)


def _pair(value, field: str) -> tuple[float, float]:
    try:
        lo, hi = value
    except (TypeError, ValueError) as exc:
        raise ConfigError(field, "expected a [lo, hi] pair") from exc
    lo, hi = _real(lo, field), _real(hi, field)
    if not lo < hi:
        raise ConfigError(field, f"need lo < hi, got [{lo}, {hi}]")
    return lo, hi


def _expression(src, field: str, variables: set[str]) -> str:
    if not isinstance(src, str):
        raise ConfigError(field, f"expected an expression string, got {src!r}")
    try:
        parse(src, variables)
    except ParseError as exc:
        raise ConfigError(field, str(exc)) from exc
    return src


def _build_surface(spec) -> Surface:
    if isinstance(spec, str):
        if spec not in BUILTIN_SURFACES:
            raise ConfigError("surface", f"unknown builtin {spec!r}; available: "
                              + ", ".join(sorted(BUILTIN_SURFACES)))
        return builtin(spec)
    if not isinstance(spec, dict):
        raise ConfigError("surface", "expected a builtin name or an object "
                          "with x, y, z, u_range, v_range")
    for key in ("x", "y", "z", "u_range", "v_range"):
        if key not in spec:
            raise ConfigError(f"surface.{key}", "missing")
    srcs = {axis: _expression(spec[axis], f"surface.{axis}", {"u", "v"})
            for axis in ("x", "y", "z")}
    u_lo, u_hi = _pair(spec["u_range"], "surface.u_range")
    v_lo, v_hi = _pair(spec["v_range"], "surface.v_range")
    name = spec.get("name", "custom")
    return from_expressions(name, srcs["x"], srcs["y"], srcs["z"],
                            u_lo, u_hi, v_lo, v_hi)


def _build_curve(merged: dict, flip_normal: bool) -> SurfaceCurve:
    name = merged["preset"]
    if name is not None:
        if merged["curve"] is not None or merged["surface"] is not None:
            raise ConfigError("preset",
                              "preset and surface/curve are mutually exclusive")
        if name not in PRESET_NAMES:
            raise ConfigError("preset", f"unknown preset {name!r}; available: "
                              + ", ".join(PRESET_NAMES))
        curve = preset(name)
        if not flip_normal:
            return curve
        return surface_curve(curve.surface.flipped(), curve.u_of_t,
                             curve.v_of_t, curve.t_lo, curve.t_hi,
                             name=curve.name)
    spec = merged["curve"]
    if spec is None:
        raise ConfigError("curve", "missing (give a preset or a curve)")
    if not isinstance(spec, dict):
        raise ConfigError("curve", "expected an object with u, v, t_range")
    for key in ("u", "v", "t_range"):
        if key not in spec:
            raise ConfigError(f"curve.{key}", "missing")
    u_src = _expression(spec["u"], "curve.u", {"t"})
    v_src = _expression(spec["v"], "curve.v", {"t"})
    t_lo, t_hi = _pair(spec["t_range"], "curve.t_range")
    if merged["surface"] is None:
        raise ConfigError("surface", "missing (a custom curve needs a surface)")
    surf = _build_surface(merged["surface"])
    if flip_normal:
        surf = surf.flipped()
    try:
        return surface_curve(surf, u_src, v_src, t_lo, t_hi,
                             name=spec.get("name", "custom"))
    except ValueError as exc:
        raise ConfigError("curve", str(exc)) from exc


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a raw configuration mapping and build the run parameters.

    Raises ConfigError naming the offending field.  Cheap scalar checks run
    before any expression is compiled.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config", "expected a JSON object")
    for key in raw:
        if key not in _DEFAULTS:
            raise ConfigError(str(key), "unknown configuration key")
    merged = dict(_DEFAULTS, **raw)
    out = dict(_DEFAULTS["output"])
    if "output" in raw:
        if not isinstance(raw["output"], dict):
            raise ConfigError("output", "expected an object")
        for key in raw["output"]:
            if key not in out:
                raise ConfigError(f"output.{key}", "unknown configuration key")
        out.update(raw["output"])
    merged["output"] = out

    samples = merged["samples"]
    if isinstance(samples, bool) or not isinstance(samples, int):
        raise ConfigError("samples", f"expected an integer, got {samples!r}")
    if samples < MIN_SAMPLES:
        raise ConfigError("samples", f"minimum is {MIN_SAMPLES}, got {samples}")
    tol = _real(merged["tol"], "tol")
    if not tol > 0.0:
        raise ConfigError("tol", f"must be positive, got {tol}")
    flip = merged["flip_normal"]
    if not isinstance(flip, bool):
        raise ConfigError("flip_normal", f"expected true/false, got {flip!r}")
    phi_star = merged["phi_star"]
    if phi_star is not None:
        phi_star = _real(phi_star, "phi_star")

    kinds_raw = merged["kinds"]
    if not isinstance(kinds_raw, (list, tuple)) or not kinds_raw:
        raise ConfigError("kinds", "expected a non-empty list of kind names")
    kinds = []
    for item in dict.fromkeys(kinds_raw):
        if item not in _KIND_BY_VALUE:
            raise ConfigError("kinds", f"unknown kind {item!r}; available: "
                              + ", ".join(_KIND_BY_VALUE))
        kinds.append(_KIND_BY_VALUE[item])

    fmt = out["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format", f"expected csv or json, got {fmt!r}")
    path = out["path"]
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path", f"expected a string, got {path!r}")

    curve = _build_curve(merged, flip)
    return RunConfig(curve=curve, kinds=tuple(kinds), samples=samples,
                     tol=tol, flip_normal=flip, phi_star_override=phi_star,
                     output_format=fmt, output_path=path)


def _cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    return repr(v) if math.isfinite(v) else ""


def _json_value(value):
    if isinstance(value, (int, np.integer)):
        return int(value)
    v = float(value)
    return v if math.isfinite(v) else None


def _grid_table(config: RunConfig) -> tuple[list[str], dict[str, np.ndarray]]:
    grid = uniform_grid(config.curve, config.samples)
    columns: dict[str, np.ndarray] = {"s": grid.s, "t": grid.t}
    columns["x"], columns["y"], columns["z"] = grid.position.T
    for label, rows in (("T", grid.T), ("g", grid.g), ("n", grid.n)):
        for i, axis in enumerate("xyz"):
            columns[f"{label}_{axis}"] = rows[:, i]
    for label in ("k_g", "k_n", "tau_g", "kappa", "tau", "phi"):
        columns[label] = getattr(grid, label)
    header = list(BASE_COLUMNS)
    for kind in config.kinds:
        cols = oracle_columns(kind, grid)
        radicand = rate_radicand(kind, grid.k_g, grid.k_n, grid.tau_g)
        beta = beta_positions(kind, grid)
        block = {
            "s_star": cumulative_integral(grid.s, cols["rate"]),
            "rate": cols["rate"],
            "regular": (radicand > RADICAND_THRESHOLD).astype(int),
            "beta_x": beta[:, 0], "beta_y": beta[:, 1], "beta_z": beta[:, 2],
            "kappa_star": cols["kappa"], "tau_star": cols["tau"],
            "k_g_star": cols["k_g"], "k_n_star": cols["k_n"],
            "tau_g_star": cols["tau_g"], "phi_star": cols["phi_star"],
            "dphi_star_ds_star": cols["dphi_star_ds_star"],
        }
        for name in KIND_COLUMNS:
            key = f"{kind.value}_{name}"
            header.append(key)
            columns[key] = block[name]
    return header, columns


def cmd_eval(config: RunConfig) -> str:
    """Render the sample-grid artifact for a configuration (CSV or JSON)."""
    header, columns = _grid_table(config)
    if config.output_format == "csv":
        lines = [",".join(header)]
        for i in range(config.samples):
            lines.append(",".join(_cell(columns[name][i]) for name in header))
        return "\n".join(lines) + "\n"
    doc = {
        "meta": {
            "curve": config.curve.name,
            "surface": config.curve.surface.name,
            "kinds": [k.value for k in config.kinds],
            "samples": config.samples,
        },
        "column_order": header,
        "columns": {name: [_json_value(v) for v in columns[name]]
                    for name in header},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_columns(text: str) -> dict[str, np.ndarray]:
    """Re-read an eval JSON artifact into float columns (null becomes nan)."""
    doc = json.loads(text)
    return {name: np.array([np.nan if v is None else float(v) for v in vals],
                           dtype=float)
            for name, vals in doc["columns"].items()}


def cmd_verify(config: RunConfig) -> str:
    """Audit every requested kind and render one JSON document.

    Samples are drawn from the interior of the arc-length range (2% margins)
    because phi* and tau_g* are stencil-differentiated along the grid.
    DISCREPANT verdicts are data, not errors; the exit status of the tool
    reflects only configuration or evaluation failures.
    """
    L = config.curve.total_length
    s = np.linspace(VERIFY_MARGIN * L, (1.0 - VERIFY_MARGIN) * L,
                    config.samples)
    reports = {}
    for kind in config.kinds:
        report = audit(kind, config.curve, s, config.tol,
                       phi_star_override=config.phi_star_override)
        reports[kind.value] = report_to_dict(report)
    doc = {
        "base": {"curve": config.curve.name,
                 "surface": config.curve.surface.name},
        "tol": config.tol,
        "sample_count": config.samples,
        "reports": reports,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_list() -> str:
    """Plain-text inventory of surfaces, presets, and formula ids."""
    lines = ["surfaces:"]
    lines += [f"  {name}" for name in sorted(BUILTIN_SURFACES)]
    lines.append("presets:")
    lines += [f"  {name}" for name in PRESET_NAMES]
    lines.append("formulas:")
    for kind in SmarandacheKind:
        lines += [f"  {name}-{kind.value}" for name in formula_names(kind)]
    return "\n".join(lines) + "\n"


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON configuration file; flags override it")
    common.add_argument("--preset", metavar="NAME",
                        help="builtin curve: " + ", ".join(PRESET_NAMES))
    common.add_argument("--surface", metavar="NAME",
                        help="builtin surface (custom ones via --config)")
    common.add_argument("--curve", metavar="U;V;T_LO;T_HI",
                        help="semicolon-separated u(t), v(t) and t bounds")
    common.add_argument("--kinds", metavar="LIST",
                        help="comma-separated subset of "
                        + ",".join(_KIND_BY_VALUE))
    common.add_argument("--samples", type=int, metavar="N")
    common.add_argument("--tol", type=float, metavar="TOL")
    common.add_argument("--flip-normal", action="store_true", default=None,
                        help="reverse the surface normal orientation")
    common.add_argument("--phi-star", type=float, dest="phi_star",
                        metavar="ANGLE",
                        help="hold the closed forms' free angle constant "
                        "(verify only)")
    common.add_argument("--format", choices=("csv", "json"),
                        help="eval artifact format (verify is always JSON)")
    common.add_argument("--out", metavar="PATH",
                        help="write the artifact here instead of stdout")
    parser = argparse.ArgumentParser(
        prog="curveframes",
        description="Darboux frames, Smarandache combinations, and "
                    "closed-form audits on parametric surfaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common],
                   help="sample a curve and its combinations")
    sub.add_parser("verify", parents=[common],
                   help="audit the closed forms against the oracle")
    sub.add_parser("list", help="show surfaces, presets, and formula ids")
    return parser


def _curve_flag(text: str) -> dict:
    parts = [p.strip() for p in text.split(";")]
    if len(parts) != 4:
        raise ConfigError("curve", "flag form is U;V;T_LO;T_HI")
    try:
        t_lo, t_hi = float(parts[2]), float(parts[3])
    except ValueError as exc:
        raise ConfigError("curve", "t bounds must be numbers") from exc
    return {"u": parts[0], "v": parts[1], "t_range": [t_lo, t_hi]}


def _merge_flags(args: argparse.Namespace) -> dict:
    raw: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError("config", str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config", "expected a JSON object")
        raw.update(loaded)
    if args.preset is not None:
        raw["preset"] = args.preset
        if args.curve is None:
            raw.pop("curve", None)
        if args.surface is None:
            raw.pop("surface", None)
    if args.curve is not None:
        raw["curve"] = _curve_flag(args.curve)
        if args.preset is None:
            raw.pop("preset", None)
    if args.surface is not None:
        raw["surface"] = args.surface
        if args.preset is None:
            raw.pop("preset", None)
    if args.kinds is not None:
        raw["kinds"] = [k.strip() for k in args.kinds.split(",") if k.strip()]
    for key in ("samples", "tol", "phi_star"):
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    if args.flip_normal is not None:
        raw["flip_normal"] = args.flip_normal
    overrides = {}
    if args.format is not None:
        overrides["format"] = args.format
    if args.out is not None:
        overrides["path"] = args.out
    if overrides:
        base = raw.get("output", {})
        if not isinstance(base, dict):
            raise ConfigError("output", "expected an object")
        raw["output"] = {**base, **overrides}
    return raw


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        sys.stdout.write(cmd_list())
        return 0
    try:
        config = config_from_dict(_merge_flags(args))
    except ConfigError as exc:
        print(f"configuration error -- {exc}", file=sys.stderr)
        return 2
    try:
        text = cmd_eval(config) if args.command == "eval" else cmd_verify(config)
    except (ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write(text, config.output_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
