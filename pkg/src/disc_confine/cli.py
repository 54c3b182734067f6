"""Command-line front end: gauge, potential, criteria, classify, sweep.

Every run resolves its arguments into a plain JSON config, executes it and
writes a report that embeds that config and the library version, so
``disc-confine --config report.json`` replays the run exactly.

Exit codes: 0 success, 2 usage or input error, 3 hypothesis violation,
4 numeric failure. Errors also print a one-line JSON diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .channels import build_channel, perturbation_bounds
from .criteria import (
    check_pointwise_bound,
    g_from_name,
    integral_test,
    sum_integral_bracket,
    sum_test,
)
from .errors import CallerError, ConfinementError, HypothesisViolation, NumericError, SpecError
from .fields import SQRT3, FieldSpec, eval_field, field_from_json
from .gauge import gauge_profile
from .sweep import CAVEAT, sweep_alpha, sweep_inverse_square, verify_subleading
from .weyl import OdeSolverConfig, classify_operator, parse_m_range

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_NUMERIC = 0, 2, 3, 4
COMMANDS = ("gauge", "potential", "criteria", "classify", "sweep")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# argv flags whose values may start with '-' (negative numbers, "-5..5").
_VALUE_FLAGS = {"--m", "--lo", "--hi", "--alpha", "--b0", "--d", "--sub", "--lead"}
_NEG = re.compile(r"^-\d|^-\.\d")


def _glue_negative_values(argv):
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and _NEG.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _add_output(p):
    p.add_argument("--out", default=argparse.SUPPRESS, help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS,
                   help="report format (csv only for gauge and potential)")


def _add_field(p, families=None):
    p.add_argument("--family", default="critical", choices=families,
                   help="field family (default: critical)")
    p.add_argument("--alpha", type=float, help="PowerLaw / CriticalPauli strength")
    p.add_argument("--r0", type=float, help="PowerLaw inner cutoff radius (default 0.5)")
    p.add_argument("--b0", type=float, help="Constant field strength")
    p.add_argument("--d", type=float, help="optimality / subleading coefficient")
    p.add_argument("--lead", type=float, help="subleading family: leading coefficient")
    p.add_argument("--sub", type=float, help="subleading family: subleading coefficient")
    p.add_argument("--file", help="JSON field document (or a tabulated sample list)")


def _add_solver(p):
    d = OdeSolverConfig()
    p.add_argument("--eps-min", type=float, default=d.eps_min, help=f"default {d.eps_min:g}")
    p.add_argument("--rtol", type=float, default=d.rtol, help=f"default {d.rtol:g}")
    p.add_argument("--atol", type=float, default=d.atol, help=f"default {d.atol:g}")
    p.add_argument("--start", type=float, default=d.start, help=f"anchor radius, default {d.start:g}")


def build_parser():
    parser = _Parser(prog="disc-confine", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="replay the resolved config of an earlier report")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), help="report format")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gauge", help="CSV of r, B(r), a(r), r^2 a(r)")
    _add_field(g)
    g.add_argument("--t-max", type=float, default=0.9, help="largest 1 - r (default 0.9)")
    g.add_argument("--t-min", type=float, default=1e-8, help="smallest 1 - r (default 1e-8)")
    g.add_argument("--points", type=int, default=200, help="log-spaced points (default 200)")
    _add_output(g)

    q = sub.add_parser("potential", help="CSV of r, q_m(r) for one channel")
    _add_field(q)
    q.add_argument("--operator", default="schrodinger", choices=("schrodinger", "pauli"))
    q.add_argument("--m", default="0", help="magnetic quantum number (default 0)")
    q.add_argument("--t-max", type=float, default=0.9)
    q.add_argument("--t-min", type=float, default=1e-8)
    q.add_argument("--points", type=int, default=200)
    _add_output(q)

    c = sub.add_parser("criteria", help="analytic limit-point criteria")
    c.add_argument("--g", default="paper-schrodinger",
                   help="log | loghalfloglog | loglog:<kappa> | paper-schrodinger | paper-pauli:<alpha>")
    c.add_argument("--test", default="integral",
                   choices=("pointwise", "sum", "integral", "bracket", "subleading"))
    c.add_argument("--rho0", type=float, help="dyadic scale (sum: default d0/2, d0/8, d0/32)")
    c.add_argument("--n-max", type=int, help="terms (sum: 65536, bracket: 40)")
    c.add_argument("--decades", type=int, default=2000, help="integral ladder length")
    c.add_argument("--operator", default="schrodinger", choices=("schrodinger", "pauli"))
    c.add_argument("--m", default="0", help="channel for the pointwise test")
    c.add_argument("--beta", type=float, default=1.0, help="Pauli upper-bound factor (subleading)")
    c.add_argument("--t-min", type=float, default=1e-8, help="pointwise grid end (1 - r)")
    c.add_argument("--points", type=int, default=1000)
    _add_field(c)
    _add_output(c)

    k = sub.add_parser("classify", help="limit point / limit circle per channel")
    _add_field(k)
    k.add_argument("--operator", default="schrodinger", choices=("schrodinger", "pauli"))
    k.add_argument("--m", default="-5..5", help="inclusive range a..b (default -5..5)")
    k.add_argument("--check-endpoint0", action="store_true",
                   help="also run the oracle at r = 0")
    _add_solver(k)
    _add_output(k)

    s = sub.add_parser("sweep", help="bisect the confinement threshold")
    s.add_argument("--family", default="power", choices=("power", "inverse-square"))
    s.add_argument("--operator", default="schrodinger", choices=("schrodinger", "pauli"))
    s.add_argument("--lo", type=float, default=None, help="non-confining end")
    s.add_argument("--hi", type=float, default=None, help="confining end")
    s.add_argument("--tol", type=float, default=0.05)
    s.add_argument("--m", default="-2..2")
    s.add_argument("--r0", type=float, default=0.5)
    _add_solver(s)
    _add_output(s)
    return parser


# Config resolution -----------------------------------------------------------

def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CallerError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path} is not valid JSON: {exc.msg}") from None


def _field_doc(ns):
    if getattr(ns, "file", None):
        doc = _read_json(ns.file)
        if isinstance(doc, list):
            doc = {"family": "tabulated", "params": {"samples": doc}}
        elif isinstance(doc, dict) and "family" not in doc and "samples" in doc:
            doc = {"family": "tabulated", "params": {"samples": doc["samples"]}}
        if isinstance(doc, dict) and ns.family not in (None, "critical") and doc.get("family") != ns.family:
            raise SpecError(f"--family {ns.family} does not match the file's family")
        return doc
    fam = ns.family
    params = {}
    for key in ("alpha", "r0", "b0", "d", "lead", "sub"):
        val = getattr(ns, key, None)
        if val is not None:
            params[key] = val
    if fam == "tabulated":
        raise SpecError("the tabulated family needs --file")
    doc = {"family": fam, "params": params, "perturbation": None}
    # Resolve defaults so the embedded config is complete.
    resolved = field_from_json(doc).to_json()
    return resolved


def _solver(ns):
    return {"eps_min": ns.eps_min, "rtol": ns.rtol, "atol": ns.atol, "start": ns.start}


def resolve_config(ns) -> dict:
    cmd = ns.command
    if cmd in ("gauge", "potential"):
        cfg = {"command": cmd, "field": _field_doc(ns), "t_max": ns.t_max,
               "t_min": ns.t_min, "points": ns.points}
        if cmd == "potential":
            cfg.update(operator=ns.operator, m=_int(ns.m, "--m"))
        return cfg
    if cmd == "criteria":
        cfg = {"command": cmd, "g": ns.g, "test": ns.test, "rho0": ns.rho0,
               "n_max": ns.n_max, "decades": ns.decades}
        if ns.test == "pointwise":
            cfg.update(field=_field_doc(ns), operator=ns.operator, m=_int(ns.m, "--m"),
                       t_min=ns.t_min, points=ns.points)
        if ns.test == "subleading":
            cfg.update(operator=ns.operator, d=ns.d, alpha=ns.alpha if ns.alpha is not None else 1.5,
                       beta=ns.beta)
        return cfg
    if cmd == "classify":
        ms = parse_m_range(ns.m)
        return {"command": cmd, "field": _field_doc(ns), "operator": ns.operator,
                "m": [ms[0], ms[-1]], "solver": _solver(ns),
                "check_endpoint0": bool(ns.check_endpoint0)}
    if cmd == "sweep":
        ms = parse_m_range(ns.m)
        if ns.family == "inverse-square":
            lo, hi = (0.5 if ns.lo is None else ns.lo), (1.0 if ns.hi is None else ns.hi)
        elif ns.operator == "pauli":
            lo, hi = (1.0 if ns.lo is None else ns.lo), (2.0 if ns.hi is None else ns.hi)
        else:
            lo, hi = (0.5 if ns.lo is None else ns.lo), (1.5 if ns.hi is None else ns.hi)
        return {"command": cmd, "family": ns.family, "operator": ns.operator, "lo": lo,
                "hi": hi, "tol": ns.tol, "m": [ms[0], ms[-1]], "r0": ns.r0,
                "solver": _solver(ns)}
    raise UsageError("a subcommand or --config is required")


def _int(text, flag):
    try:
        return int(text)
    except ValueError:
        raise CallerError(f"{flag} expects an integer, got {text!r}") from None


# Execution -----------------------------------------------------------------------

def _grid_t(cfg):
    if not (0.0 < cfg["t_min"] < cfg["t_max"] < 1.0):
        raise CallerError("need 0 < t-min < t-max < 1")
    if cfg["points"] < 2:
        raise CallerError("points must be at least 2")
    return np.geomspace(cfg["t_max"], cfg["t_min"], cfg["points"])


def _solver_cfg(d):
    return OdeSolverConfig(**{**asdict(OdeSolverConfig()), **d})


def execute(cfg: dict):
    """Run a resolved config. Returns (report dict, csv rows or None)."""
    cmd = cfg.get("command")
    if cmd == "gauge":
        spec = field_from_json(cfg["field"])
        t = _grid_t(cfg)
        prof = gauge_profile(spec)
        r = 1.0 - t
        rows = np.column_stack([r, spec.radial.field_t(t), prof.a(r), prof.r2a_t(t)])
        header = ["r", "B", "a", "r2a"]
        return {"profile_source": prof.source, "columns": header, "rows": rows.tolist()}, (header, rows)
    if cmd == "potential":
        spec = field_from_json(cfg["field"])
        t = _grid_t(cfg)
        ch = build_channel(spec, cfg["m"], cfg["operator"])
        rows = np.column_stack([1.0 - t, ch.potential_t(t)])
        header = ["r", "qtilde"]
        return {"label": ch.label, "columns": header, "rows": rows.tolist()}, (header, rows)
    if cmd == "criteria":
        return _criteria(cfg), None
    if cmd == "classify":
        spec = field_from_json(cfg["field"])
        rep = classify_operator(spec, cfg["operator"], tuple(cfg["m"]),
                                _solver_cfg(cfg["solver"]), cfg["check_endpoint0"]).to_json()
        if spec.perturbation is not None:
            rep["perturbation"] = perturbation_bounds(spec.perturbation).to_json()
        return rep, None
    if cmd == "sweep":
        solver = _solver_cfg(cfg["solver"])
        if cfg["family"] == "inverse-square":
            res = sweep_inverse_square(cfg["lo"], cfg["hi"], cfg["tol"], solver)
        else:
            res = sweep_alpha(cfg["operator"], cfg["lo"], cfg["hi"], cfg["tol"], solver,
                              tuple(cfg["m"]), cfg["r0"])
        return res.to_json(), None
    raise SpecError(f"config has unknown command {cmd!r}")


def _criteria(cfg):
    test = cfg["test"]
    if test == "subleading":
        v = verify_subleading(cfg["operator"], cfg["d"], cfg["alpha"], cfg["beta"])
        out = v.to_json()
        out["caveat"] = CAVEAT
        return out
    G = g_from_name(cfg["g"])
    if test == "sum":
        v = sum_test(G, cfg["rho0"], cfg["n_max"] or 2**16)
    elif test == "integral":
        v = integral_test(G, decades=cfg["decades"])
    elif test == "bracket":
        rho0 = cfg["rho0"] if cfg["rho0"] is not None else G.d0 / 2
        b = sum_integral_bracket(G, rho0, cfg["n_max"] or 40)
        return {"g": G.to_json(), "bracket": b.to_json()}
    else:
        spec = field_from_json(cfg["field"])
        ch = build_channel(spec, cfg["m"], cfg["operator"])
        t = np.geomspace(min(G.d0, 0.49), cfg["t_min"], cfg["points"])
        v = check_pointwise_bound(ch.potential_t, G, t, variable="t")
    out = v.to_json()
    out["g"] = G.to_json()
    return out


# Output ----------------------------------------------------------------------

def _clean(obj):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CallerError(f"cannot write {path}: {exc.strerror}") from None


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def _diagnostic(code, exc):
    doc = {"error": type(exc).__name__, "exit_code": code, "message": str(exc)}
    where = getattr(exc, "where", None)
    if where is not None:
        doc["where"] = _clean(list(where) if isinstance(where, tuple) else where)
    sys.stderr.write(json.dumps(doc, sort_keys=True) + "\n")
    return code


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = build_parser().parse_args(_glue_negative_values(argv))
        if ns.config:
            if ns.command:
                raise UsageError("--config replaces the subcommand; give one or the other")
            doc = _read_json(ns.config)
            cfg = doc.get("config", doc) if isinstance(doc, dict) else None
            if not isinstance(cfg, dict) or cfg.get("command") not in COMMANDS:
                raise SpecError("config file has no recognised 'command'")
        else:
            cfg = resolve_config(ns)
        fmt = getattr(ns, "format", None) or "json"
        out = getattr(ns, "out", None)
        report, table = execute(cfg)
        if fmt == "csv":
            if table is None:
                raise CallerError("csv output is only available for gauge and potential")
            _write(_csv_text(*table), out)
        else:
            _write(canonical_json({"config": cfg, "version": __version__, "report": report}), out)
        return EXIT_OK
    except UsageError as exc:
        return _diagnostic(EXIT_USAGE, exc)
    except HypothesisViolation as exc:
        return _diagnostic(EXIT_HYPOTHESIS, exc)
    except NumericError as exc:
        return _diagnostic(EXIT_NUMERIC, exc)
    except (ConfinementError, ValueError, KeyError, TypeError) as exc:
        # Remaining library errors are input/spec/caller problems.
        return _diagnostic(EXIT_USAGE, exc)


def main() -> None:
    sys.exit(run())
