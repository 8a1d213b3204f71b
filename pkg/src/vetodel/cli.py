"""Command-line front end.

Every run reads one JSON config, validates it, dispatches to a solver and
writes JSON or CSV. Exit codes: 0 success, 2 config error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import jsonschema
import numpy as np

from . import cheap_talk, conditions, interval, oracle
from .errors import (BadDistribution, BadUtility, ConfigError, HypothesisFailed, NotLQ,
                     VetoDelError)
from .model import (LQUtility, Normal, distribution_from_json, utility_from_json)

_NUM = {"type": "number"}
_POS_INT = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "utility": {"type": "object"},
        "distribution": {"type": "object"},
        "grid": {"type": "integer", "minimum": 3},
        "format": {"enum": ["csv", "json"]},
        "out": {"type": "string"},
        "solve": {
            "type": "object", "additionalProperties": False,
            "properties": {"second_veto": {"type": "number", "exclusiveMinimum": 0}},
        },
        "sweep": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "preset": {"enum": ["fig2a", "fig2b", "fig2"]},
                "param": {"enum": ["gamma", "mu", "sigma"]},
                "start": _NUM, "stop": _NUM,
                "steps": {"type": "integer", "minimum": 2},
                "workers": _POS_INT,
            },
        },
        "oracle": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "n_actions": {"type": "integer", "minimum": 2},
                "n_types": {"type": "integer", "minimum": 2},
                "tail": {"type": "array", "items": {"type": "number", "exclusiveMaximum": 0}},
                "extra_actions": {"type": "array", "items": {"type": "number"}},
                "methods": {"type": "array", "minItems": 1,
                            "items": {"enum": ["exhaustive", "structured", "lp", "exact"]}},
                "tableau": {"type": "string"},
                "random_instances": {"type": "integer", "minimum": 0},
            },
        },
        "example_e1": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.25},
                "slope": {"type": "number", "exclusiveMinimum": 0},
                "base": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}

# presets for the two comparative-statics panels: threshold against gamma,
# and against the spread of a normal centred at 0.45 with linear loss
PRESETS = {
    "fig2a": dict(util=LQUtility(0.0), dist=Normal(0.45, 1.0), param="gamma",
                  start=0.0, stop=1.0, steps=21),
    "fig2b": dict(util=LQUtility(0.0), dist=Normal(0.45, 1.0), param="sigma",
                  start=1.0, stop=0.01, steps=21),
}

COMMANDS = ("check", "solve", "sweep", "cheaptalk", "oracle", "example-e1")
NEEDS_MODEL = {"check", "solve", "cheaptalk", "oracle"}


def fmt(x) -> str:
    return "%.12g" % x


def _round(obj):
    """Render floats at 12 significant digits so output is stable across platforms."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _field_path(err) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def load_config(path: str | None, command: str) -> dict:
    if path is None:
        cfg = {}
    else:
        try:
            with open(path) as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON (line {exc.lineno}): {exc.msg}")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}")
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(f"config field '{_field_path(err)}': {err.message}")
    if command in NEEDS_MODEL:
        for key in ("utility", "distribution"):
            if key not in cfg:
                raise ConfigError(f"config field '{key}': required for '{command}'")
    if command == "sweep":
        sw = cfg.get("sweep")
        if sw is None:
            raise ConfigError("config field 'sweep': required for 'sweep'")
        if "preset" in sw:
            extra = sorted(set(sw) - {"preset", "workers"})
            if extra or "utility" in cfg or "distribution" in cfg:
                bad = extra[0] if extra else ("utility" if "utility" in cfg else "distribution")
                raise ConfigError(f"config field 'sweep.{bad}': not allowed with a preset"
                                  if extra else f"config field '{bad}': not allowed with a preset")
        else:
            for key in ("param", "start", "stop", "steps"):
                if key not in sw:
                    raise ConfigError(f"config field 'sweep.{key}': required without a preset")
            for key in ("utility", "distribution"):
                if key not in cfg:
                    raise ConfigError(f"config field '{key}': required for 'sweep'")
    return cfg


def _model(cfg):
    try:
        util = utility_from_json(cfg["utility"])
        dist = distribution_from_json(cfg["distribution"])
    except (BadUtility, BadDistribution) as exc:
        raise ConfigError(str(exc))
    return util, dist


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(_round(obj), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands: each returns {filename-or-None: text}
# ---------------------------------------------------------------------------

def cmd_check(cfg, fmt_, grid):
    util, dist = _model(cfg)
    n = grid or 10001
    reports = [conditions.check_full_delegation(util, dist, n=n)]
    if util.is_lq:
        reports.append(conditions.check_no_compromise(util, dist, n=max(3, n // 5)))
    sol = interval.solve_interval(util, dist)
    reports.append(conditions.check_interval(util, dist, sol.c_star, n=n))
    reports.append(conditions.check_logconcave(dist, n=n))
    risk = conditions.check_risk_aversion_threshold(util, dist, n=n)
    if fmt_ == "csv":
        rows = [(r.name, str(r.verdict).lower(), r.worst_margin, r.tolerance,
                 r.grid_resolution, str(r.necessary).lower()) for r in reports]
        return _csv(["name", "verdict", "worst_margin", "tolerance", "grid_resolution",
                     "necessary"], rows)
    return _json({"reports": [r.to_json() for r in reports], "c_star": sol.c_star,
                  "risk_aversion_threshold": risk})


def cmd_solve(cfg, fmt_, grid):
    util, dist = _model(cfg)
    a_star = cfg.get("solve", {}).get("second_veto")
    if a_star is not None:
        menu = interval.stitch_with_default(util, dist, a_star)
        if fmt_ == "csv":
            return _csv(["action"], [(a,) for a in menu.points])
        return _json({"second_veto": a_star, "menu": menu.to_json()})
    sol = interval.solve_interval(util, dist, n_grid=grid or 4001)
    if fmt_ == "csv":
        return _csv(["c_lo", "c_hi", "w_star", "flat"],
                    [(lo, hi, sol.w_star, str(sol.flat).lower()) for lo, hi in sol.c_set])
    return _json(sol.to_json())


def _run_sweep(util, dist, param, start, stop, steps, workers, grid, fmt_):
    rows = interval.sweep(util, dist, param, start, stop, steps, workers=workers,
                          n_grid=grid or 4001)
    if fmt_ == "csv":
        return interval.sweep_csv(rows)
    return _json([r._asdict() for r in rows])


def cmd_sweep(cfg, fmt_, grid):
    sw = cfg["sweep"]
    workers = sw.get("workers", 1)
    preset = sw.get("preset")
    if preset is None:
        util, dist = _model(cfg)
        return _run_sweep(util, dist, sw["param"], sw["start"], sw["stop"], sw["steps"],
                          workers, grid, fmt_)
    names = ["fig2a", "fig2b"] if preset == "fig2" else [preset]
    ext = "csv" if fmt_ == "csv" else "json"
    out = {}
    for name in names:
        p = PRESETS[name]
        out[f"{name}.{ext}"] = _run_sweep(p["util"], p["dist"], p["param"], p["start"],
                                          p["stop"], p["steps"], workers, grid, fmt_)
    return out if len(out) > 1 else next(iter(out.values()))


def cmd_cheaptalk(cfg, fmt_, grid):
    util, dist = _model(cfg)
    eq = cheap_talk.solve_cheap_talk(util, dist)
    payload = {"a_U": list(eq.a_U), "a_I": list(eq.a_I), "v_I": list(eq.v_I)}
    try:
        payload["pareto"] = cheap_talk.pareto_compare(util, dist).to_json()
    except (HypothesisFailed, NotLQ) as exc:
        payload["pareto"] = None
        payload["pareto_skipped"] = str(exc)
    if fmt_ == "csv":
        rows = [("a_U", a) for a in eq.a_U] + [("a_I", a) for a in eq.a_I]
        rows += [("v_I", v) for v in eq.v_I]
        if payload["pareto"] is not None:
            rep = payload["pareto"]
            rows += [("c_star", rep["c_star"]), ("proposer_gain", rep["proposer_gain"]),
                     ("vetoer_gain_measure", rep["vetoer_gain_measure"])]
        return _csv(["quantity", "value"], rows)
    return _json(payload)


def _oracle_one(util, dist, oc, grid):
    n_types = grid or oc.get("n_types", 21)
    inst = oracle.make_instance(util, dist, oc.get("n_actions", 11), n_types,
                                tail=tuple(oc.get("tail", ())),
                                extra_actions=tuple(oc.get("extra_actions", ())))
    det = oracle.make_instance(util, dist, oc.get("n_actions", 11), n_types,
                               extra_actions=tuple(oc.get("extra_actions", ())))
    methods = oc.get("methods", ["exhaustive", "structured", "lp"])
    res = {"n_actions": inst.n_actions, "n_types": inst.n_types}
    if "exhaustive" in methods:
        r = oracle.best_delegation_exhaustive(det)
        res["exhaustive"] = r.to_json()
    if "structured" in methods:
        res["structured"] = oracle.best_delegation_structured(det).to_json()
    if "lp" in methods:
        r = oracle.best_stochastic_lp(inst)
        res["lp"] = {"value": r.value, "ic_violation": r.ic_violation,
                     "ir_violation": r.ir_violation,
                     "expected_action": r.mechanism.expected_action().tolist()}
    if "exact" in methods:
        v = oracle.exact_stochastic_value(inst)
        res["exact"] = {"value": float(v), "fraction": f"{v.numerator}/{v.denominator}"}
    return inst, res


def cmd_oracle(cfg, fmt_, grid, seed):
    util, dist = _model(cfg)
    oc = cfg.get("oracle", {})
    k = oc.get("random_instances", 0)
    if k:
        rng = np.random.default_rng(seed)
        rows = []
        for i in range(k):
            g, mu, sigma = rng.uniform(0, 1), rng.uniform(-0.5, 1.5), rng.uniform(0.2, 1.0)
            _, res = _oracle_one(LQUtility(float(g)), Normal(float(mu), float(sigma)),
                                 {**oc, "methods": ["exhaustive", "structured", "lp"]}, grid)
            rows.append((i, float(g), float(mu), float(sigma), res["structured"]["value"],
                         res["exhaustive"]["value"], res["lp"]["value"]))
        header = ["index", "gamma", "mu", "sigma", "structured", "exhaustive", "lp"]
        if fmt_ == "csv":
            return _csv(header, rows)
        return _json([dict(zip(header, r)) for r in rows])
    inst, res = _oracle_one(util, dist, oc, grid)
    out = {}
    if "tableau" in oc:
        out[oc["tableau"]] = oracle.tableau_text(inst)
    if fmt_ == "csv":
        rows = [(m, res[m]["value"]) for m in ("structured", "exhaustive", "lp", "exact")
                if m in res]
        text = _csv(["method", "value"], rows)
    else:
        text = _json(res)
    if out:
        out[None] = text
        return out
    return text


def cmd_example_e1(cfg, fmt_, grid):
    ec = cfg.get("example_e1", {})
    r = oracle.example_e1_menu(ec.get("delta", 0.05), ec.get("slope", 1.0), ec.get("base", 1.0))
    payload = r.to_json()
    if fmt_ == "csv":
        keys = sorted(payload)
        return _csv(keys, [[payload[k] for k in keys]])
    return _json(payload)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vetodel", description="Optimal delegation in veto bargaining.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output file (directory for multi-file presets)")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--grid", type=int, default=None, help="scan grid resolution")
        if name == "oracle":
            p.add_argument("--seed", type=int, default=0, help="seed for random instances")
    return parser


def _write(result, out, stdout):
    if isinstance(result, str):
        if out:
            with open(out, "w") as fh:
                fh.write(result)
        else:
            stdout.write(result)
        return
    # several named files: --out is a directory, unnamed text goes to stdout
    for name, text in result.items():
        if name is None:
            _write(text, None, stdout)
            continue
        target = os.path.join(out or ".", name) if not os.path.isabs(name) else name
        os.makedirs(os.path.dirname(target) or ".", exist_ok=True)
        with open(target, "w") as fh:
            fh.write(text)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command)
        if args.grid is not None and args.grid < 3:
            raise ConfigError("flag '--grid': must be at least 3")
        fmt_ = args.format or cfg.get("format") or ("csv" if args.command == "sweep" else "json")
        out = args.out or cfg.get("out")
        grid = args.grid if args.grid is not None else cfg.get("grid")
        if args.command == "check":
            result = cmd_check(cfg, fmt_, grid)
        elif args.command == "solve":
            result = cmd_solve(cfg, fmt_, grid)
        elif args.command == "sweep":
            result = cmd_sweep(cfg, fmt_, grid)
        elif args.command == "cheaptalk":
            result = cmd_cheaptalk(cfg, fmt_, grid)
        elif args.command == "oracle":
            result = cmd_oracle(cfg, fmt_, grid, args.seed)
        else:
            result = cmd_example_e1(cfg, fmt_, grid)
        _write(result, out, stdout)
    except ConfigError as exc:
        stderr.write(f"config error: {exc}\n")
        return 2
    except (VetoDelError, ArithmeticError, RuntimeError) as exc:
        stderr.write(f"solver failure: {type(exc).__name__}: {exc}\n")
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
