"""Command-line front end.

Every subcommand accepts ``--config FILE`` (JSON); explicit flags override
values from the file.  CSV goes to ``--out`` (default stdout) and JSON
summaries to ``--json`` (default stdout when no CSV is produced).

Exit codes: 0 success, 1 configuration error, 2 numerical failure (including
a verification that did not meet its tolerance).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import rotsym
from .expr import ExprSyntaxError, UnknownNameError
from .hypersurfaces import (
    BoundaryProximityError,
    action_catalog,
    action_from_descriptor,
    biconservative_flow,
    biharmonic_flow,
    cmc_flow,
    cone_mean_f,
    minimal_cone_angles,
)
from .jets import JetDomainError, JetOrderError
from .models import ModelValidationError, PoleProximityError, make_model, warp_from_descriptor
from .solvers import NumericalFailure, dirichlet_conformal, shoot_harmonic_R4

log = logging.getLogger("bireduce")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

NUMBER = {"type": "number"}
NUMBERS = {"type": "array", "items": NUMBER}

REPORT_SCHEMAS: dict[str, dict] = {
    "residual": {
        "type": "object",
        "required": ["command", "points", "max_abs_F", "max_abs_res_F", "max_abs_res_expanded", "tol", "passed"],
        "properties": {
            "command": {"const": "residual"},
            "points": {"type": "integer", "minimum": 2},
            "max_abs_F": NUMBER,
            "max_abs_res_F": NUMBER,
            "max_abs_res_expanded": NUMBER,
            "tol": NUMBER,
            "passed": {"type": "boolean"},
        },
    },
    "verify-classification": {
        "type": "object",
        "required": ["command", "cases", "passed"],
        "properties": {
            "command": {"const": "verify-classification"},
            "passed": {"type": "boolean"},
            "cases": {
                "type": "array",
                "minItems": 9,
                "maxItems": 9,
                "items": {
                    "type": "object",
                    "required": ["case", "dom", "cod", "profile", "classification", "status"],
                    "properties": {
                        "case": {"type": "string"},
                        "dom": {"type": "string"},
                        "cod": {"type": "string"},
                        "profile": {"type": ["string", "null"]},
                        "classification": {"enum": ["harmonic", "proper-biharmonic", "none"]},
                        "status": {"enum": ["verified", "failed", "no solution"]},
                        "max_abs_F": NUMBER,
                        "max_abs_res_F": NUMBER,
                    },
                },
            },
        },
    },
    "dirichlet": {
        "type": "object",
        "required": ["command", "results", "passed"],
        "properties": {
            "command": {"const": "dirichlet"},
            "passed": {"type": "boolean"},
            "results": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["R_star", "c", "residual_max"],
                    "properties": {"R_star": NUMBER, "c": NUMBER, "residual_max": NUMBER},
                },
            },
        },
    },
    "harmonic-shoot": {
        "type": "object",
        "required": ["command", "r_max", "runs", "R4_estimate", "R4_in_range"],
        "properties": {
            "command": {"const": "harmonic-shoot"},
            "r_max": NUMBER,
            "R4_estimate": NUMBER,
            "R4_in_range": {"type": "boolean"},
            "runs": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["a", "sup_alpha", "crossings", "alpha_end"],
                    "properties": {"a": NUMBER, "sup_alpha": NUMBER, "crossings": {"type": "integer"}, "alpha_end": NUMBER},
                },
            },
        },
    },
    "cone": {
        "type": "object",
        "required": ["command", "action", "angles", "residuals"],
        "properties": {
            "command": {"const": "cone"},
            "action": {"type": "object"},
            "angles": NUMBERS,
            "residuals": NUMBERS,
        },
    },
    "profile": {
        "type": "object",
        "required": ["command", "flow", "action", "reason", "samples"],
        "properties": {
            "command": {"const": "profile"},
            "flow": {"enum": ["cmc", "biconservative", "biharmonic"]},
            "action": {"type": "object"},
            "reason": {"type": "string"},
            "samples": {"type": "integer"},
        },
    },
    "bienergy": {
        "type": "object",
        "required": ["command", "interval", "panels", "value"],
        "properties": {"command": {"const": "bienergy"}, "interval": NUMBERS, "panels": {"type": "integer"}, "value": NUMBER},
    },
    "table": {
        "type": "object",
        "required": ["command", "actions"],
        "properties": {
            "command": {"const": "table"},
            "actions": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["label", "d", "mults", "n"],
                    "properties": {"label": {"type": "string"}, "d": {"type": "integer"}, "mults": {"type": "array"}, "n": {"type": "integer"}},
                },
            },
        },
    },
}


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending field."""


# configuration helpers ----------------------------------------------------------


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be a JSON object")
    return cfg


class Settings:
    """Flag values layered over config-file values layered over defaults."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self.args = args
        self.config = config

    def get(self, name: str, default: Any = None) -> Any:
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        return self.config.get(name, default)

    def require(self, name: str) -> Any:
        value = self.get(name)
        if value is None:
            raise ConfigError(f"{name}: required (flag --{name.replace('_', '-')} or config field {name!r})")
        return value


def parse_grid(spec, field: str = "grid") -> np.ndarray:
    """``"start:end:count"`` or ``{"start":..,"end":..,"count":..}``."""
    try:
        if isinstance(spec, str):
            start, end, count = spec.split(":")
            start, end, count = float(start), float(end), int(count)
        elif isinstance(spec, dict):
            start, end, count = float(spec["start"]), float(spec["end"]), int(spec["count"])
        else:
            raise TypeError
    except (ValueError, KeyError, TypeError):
        raise ConfigError(f"{field}: expected start:end:count, got {spec!r}") from None
    if count < 2:
        raise ConfigError(f"{field}: count must be >= 2")
    if not start < end:
        raise ConfigError(f"{field}: start must be < end")
    return np.linspace(start, end, count)


def parse_interval(spec, field: str = "interval") -> tuple[float, float]:
    try:
        if isinstance(spec, str):
            a, b = (float(v) for v in spec.split(":"))
        else:
            a, b = (float(v) for v in spec)
    except (ValueError, TypeError):
        raise ConfigError(f"{field}: expected a:b, got {spec!r}") from None
    if not a < b:
        raise ConfigError(f"{field}: need a < b")
    return a, b


def parse_floats(spec, field: str) -> list[float]:
    try:
        if isinstance(spec, str):
            return [float(v) for v in spec.split(",") if v.strip()]
        if isinstance(spec, (int, float)):
            return [float(spec)]
        return [float(v) for v in spec]
    except (ValueError, TypeError):
        raise ConfigError(f"{field}: expected numbers, got {spec!r}") from None


def parse_params(items) -> dict[str, float]:
    if items is None:
        return {}
    if isinstance(items, dict):
        try:
            return {str(k): float(v) for k, v in items.items()}
        except (TypeError, ValueError):
            raise ConfigError("params: values must be numbers") from None
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"params: expected name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"params: value of {name!r} is not a number") from None
    return out


def _descriptor(value):
    if isinstance(value, str) and value.strip().startswith("{"):
        try:
            return json.loads(value)
        except json.JSONDecodeError:
            raise ConfigError(f"model descriptor is not valid JSON: {value!r}") from None
    return value


def _models(s: Settings):
    m = s.require("m")
    try:
        m = int(m)
    except (TypeError, ValueError):
        raise ConfigError(f"m: expected an integer, got {m!r}") from None
    try:
        dom = make_model(m, warp_from_descriptor(_descriptor(s.get("dom", "r")), "r"))
    except (ValueError, ModelValidationError) as exc:
        raise ConfigError(f"dom: {exc}") from None
    try:
        cod = make_model(m, warp_from_descriptor(_descriptor(s.get("cod", "a")), "a"))
    except (ValueError, ModelValidationError) as exc:
        raise ConfigError(f"cod: {exc}") from None
    return dom, cod


def _pair(s: Settings) -> rotsym.MapPair:
    dom, cod = _models(s)
    src = s.require("alpha")
    try:
        profile = rotsym.ExprProfile.parse(src, parse_params(s.get("params")))
    except (ExprSyntaxError, UnknownNameError) as exc:
        raise ConfigError(f"alpha: {exc}") from None
    return rotsym.MapPair(dom, cod, profile)


def _action(s: Settings):
    try:
        return action_from_descriptor(_descriptor(s.require("action")))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"action: {exc}") from None


# output helpers -----------------------------------------------------------------


def format_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["%.17g" % v for v in row])
    return buf.getvalue()


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit(s: Settings, report: dict, csv_text: str | None = None) -> None:
    if csv_text is not None:
        _write(s.get("out"), csv_text)
    path = s.get("json")
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path:
        _write(path, text)
    elif csv_text is None or s.get("out") not in (None, "-"):
        sys.stdout.write(text)


def _status(passed: bool) -> int:
    return EXIT_OK if passed else EXIT_NUMERIC


# subcommands --------------------------------------------------------------------


def cmd_residual(s: Settings) -> int:
    pair = _pair(s)
    grid = parse_grid(s.get("grid", "0.1:10:100"))
    tol = float(s.get("tol", 1e-8))
    rows = []
    for r in grid:
        F = rotsym.tension_F(pair, float(r), 0)[0]
        rows.append((r, F, rotsym.bitension_residual_F(pair, float(r)), rotsym.bitension_residual_expanded(pair, float(r))))
    arr = np.array(rows)
    max_res = float(np.max(np.abs(arr[:, 2])))
    report = {
        "command": "residual",
        "points": len(rows),
        "max_abs_F": float(np.max(np.abs(arr[:, 1]))),
        "max_abs_res_F": max_res,
        "max_abs_res_expanded": float(np.max(np.abs(arr[:, 3]))),
        "tol": tol,
        "passed": max_res <= tol,
    }
    _emit(s, report, format_csv(("r", "F", "res_F", "res_expanded"), rows))
    return _status(report["passed"])


def _case_grid(entry: rotsym.CatalogEntry, c: float) -> np.ndarray:
    upper = entry.r_upper(c)
    if math.isfinite(upper):
        return np.linspace(0.05 * upper, 0.9 * upper, 50)
    return np.linspace(0.1, 10.0, 50)


def cmd_verify_classification(s: Settings) -> int:
    c = float(s.get("c", 1.0))
    cases = []
    for entry in rotsym.classification_catalog():
        row = {
            "case": entry.case,
            "dom": entry.dom_warp,
            "cod": entry.cod_warp,
            "profile": entry.profile,
            "classification": entry.classification,
        }
        if entry.profile is None:
            row["status"] = "no solution"
        else:
            pair = entry.pair(c)
            grid = _case_grid(entry, c)
            F = max(abs(rotsym.tension_F(pair, float(r), 0)[0]) for r in grid)
            res = max(abs(rotsym.bitension_residual_F(pair, float(r))) for r in grid)
            if entry.classification == "harmonic":
                ok = F <= 1e-10
            else:
                ok = res <= 1e-8 and F >= 0.1
            row.update(status="verified" if ok else "failed", max_abs_F=F, max_abs_res_F=res)
        cases.append(row)
    passed = all(r["status"] != "failed" for r in cases)
    _emit(s, {"command": "verify-classification", "cases": cases, "passed": passed})
    return _status(passed)


def cmd_dirichlet(s: Settings) -> int:
    values = parse_floats(s.get("R_star", "0.5,1.5,2.5,3.1"), "R_star")
    results = []
    for R in values:
        try:
            c, res = dirichlet_conformal(R)
        except ValueError as exc:
            raise ConfigError(f"R_star: {exc}") from None
        results.append({"R_star": R, "c": c, "residual_max": res})
    passed = all(r["residual_max"] <= 1e-8 for r in results)
    _emit(s, {"command": "dirichlet", "results": results, "passed": passed})
    return _status(passed)


def cmd_harmonic_shoot(s: Settings) -> int:
    r_max = float(s.get("r_max", 100.0))
    slopes = parse_floats(s.get("a", list(np.logspace(-1, 1, 9))), "a")
    if any(a <= 0 for a in slopes):
        raise ConfigError("a: initial slopes must be positive")
    runs = []
    for a in slopes:
        res = shoot_harmonic_R4(a, r_max)
        runs.append({"a": a, "sup_alpha": res.sup_alpha, "crossings": res.crossings, "alpha_end": float(res.trajectory.y[-1, 0])})
    R4 = max(r["sup_alpha"] for r in runs)
    report = {
        "command": "harmonic-shoot",
        "r_max": r_max,
        "runs": runs,
        "R4_estimate": R4,
        "R4_in_range": bool(math.pi / 2 < R4 < math.pi),
    }
    out = s.get("out")
    csv_text = None
    if out:
        res = shoot_harmonic_R4(slopes[0], r_max)
        csv_text = format_csv(("r", "alpha", "alpha_dot"), np.column_stack([res.trajectory.t, res.trajectory.y]))
    _emit(s, report, csv_text)
    return EXIT_OK


def cmd_cone(s: Settings) -> int:
    action = _action(s)
    angles = minimal_cone_angles(action)
    report = {
        "command": "cone",
        "action": action.describe(),
        "angles": angles,
        "residuals": [abs(cone_mean_f(action, a, 1.0)) for a in angles],
    }
    _emit(s, report)
    return EXIT_OK


def cmd_profile(s: Settings) -> int:
    action = _action(s)
    flow = s.get("flow", "cmc")
    init = parse_floats(s.require("init"), "init")
    s_range = parse_interval(s.get("s_range", "0:1"), "s_range")
    step = float(s.get("step", 1e-3))
    samples = int(s.get("samples", 101))
    if step <= 0:
        raise ConfigError("step: must be positive")
    try:
        if flow == "cmc":
            if len(init) != 3:
                raise ConfigError("init: cmc flow needs x,y,theta")
            result = cmc_flow(action, float(s.require("f0")), init, s_range, step, samples)
        elif flow == "biconservative":
            if len(init) != 3:
                raise ConfigError("init: biconservative flow needs x,y,theta")
            result = biconservative_flow(action, init, s_range, step, samples)
        elif flow == "biharmonic":
            if len(init) != 5:
                raise ConfigError("init: biharmonic flow needs x,y,theta,k_d,f1")
            result = biharmonic_flow(action, init, s_range, step, samples)
        else:
            raise ConfigError(f"flow: unknown flow {flow!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"init: {exc}") from None
    report = {"command": "profile", "action": action.describe(), "samples": len(result.rows), **result.report}
    _emit(s, report, result.to_csv())
    return EXIT_OK if result.reason == "range end" else EXIT_NUMERIC


def cmd_bienergy(s: Settings) -> int:
    pair = _pair(s)
    a, b = parse_interval(s.require("interval"))
    panels = int(s.get("panels", 1000))
    if panels < 2 or panels % 2:
        raise ConfigError("panels: must be an even integer >= 2")
    if a <= 0:
        raise ConfigError("interval: left end must be positive")
    value = rotsym.reduced_bienergy(pair, (a, b), panels)
    _emit(s, {"command": "bienergy", "interval": [a, b], "panels": panels, "value": value})
    return EXIT_OK


def cmd_table(s: Settings) -> int:
    _emit(s, {"command": "table", "actions": [a.describe() for a in action_catalog()]})
    return EXIT_OK


COMMANDS = {
    "residual": cmd_residual,
    "verify-classification": cmd_verify_classification,
    "dirichlet": cmd_dirichlet,
    "harmonic-shoot": cmd_harmonic_shoot,
    "cone": cmd_cone,
    "profile": cmd_profile,
    "bienergy": cmd_bienergy,
    "table": cmd_table,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bireduce", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its fields")
    common.add_argument("--out", help="CSV output path (default stdout)")
    common.add_argument("--json", help="JSON report path")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(p):
        p.add_argument("--m", type=int, help="dimension of both models")
        p.add_argument("--dom", help='domain warp: "r", "sin(r)", "sinh(r)", an expression or a JSON descriptor')
        p.add_argument("--cod", help='codomain warp in the variable a: "a", "sin(a)", "sinh(a)", ...')
        p.add_argument("--alpha", help="radial profile expression in r")
        p.add_argument("--param", dest="params", action="append", metavar="NAME=VALUE", help="profile parameter")

    p = sub.add_parser("residual", parents=[common], help="tension and bitension residuals on a grid")
    model_flags(p)
    p.add_argument("--grid", help="start:end:count (default 0.1:10:100)")
    p.add_argument("--tol", type=float, help="pass threshold for |res_F| (default 1e-8)")

    p = sub.add_parser("verify-classification", parents=[common], help="check the nine conformal cases")
    p.add_argument("--c", type=float, help="family parameter (default 1)")

    p = sub.add_parser("dirichlet", parents=[common], help="conformal biharmonic maps with alpha(1)=R*")
    p.add_argument("--R-star", dest="R_star", help="comma-separated values in (0, pi)")

    p = sub.add_parser("harmonic-shoot", parents=[common], help="harmonic maps R^4 -> S^4 by shooting")
    p.add_argument("--a", help="comma-separated initial slopes (default: 9 log-spaced in [0.1, 10])")
    p.add_argument("--r-max", dest="r_max", type=float, help="integration end (default 100)")

    p = sub.add_parser("cone", parents=[common], help="minimal cone angles of an orbit action")
    p.add_argument("--action", help='table label such as "U(5)" or "SO(2)xSO(3)", or a JSON descriptor')

    p = sub.add_parser("profile", parents=[common], help="integrate a profile-curve flow")
    p.add_argument("--action")
    p.add_argument("--flow", choices=["cmc", "biconservative", "biharmonic"])
    p.add_argument("--init", help="x,y,theta (cmc, biconservative) or x,y,theta,k_d,f1 (biharmonic)")
    p.add_argument("--f0", type=float, help="mean curvature for the cmc flow")
    p.add_argument("--s-range", dest="s_range", help="s0:s1 (default 0:1)")
    p.add_argument("--step", type=float, help="RK4 step (default 1e-3)")
    p.add_argument("--samples", type=int, help="number of polyline rows (default 101)")

    p = sub.add_parser("bienergy", parents=[common], help="reduced bienergy over a compact interval")
    model_flags(p)
    p.add_argument("--interval", help="a:b with 0 < a < b")
    p.add_argument("--panels", type=int, help="even number of Simpson panels (default 1000)")

    sub.add_parser("table", parents=[common], help="list the orbit-action catalog")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        settings = Settings(args, _load_config(args.config))
        return COMMANDS[args.command](settings)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PoleProximityError, JetDomainError, JetOrderError, NumericalFailure, BoundaryProximityError, ZeroDivisionError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
