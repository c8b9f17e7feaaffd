"""Command-line front end; every command prints one JSON report on stdout.

Exit status: 0 when every check passes, 1 when some check fails, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from typing import Any, Callable

from .coeffs import BETA
from .expr import EvalError, ParseError, evaluate_commutative, parse, to_generator_spec, to_text

__all__ = ["main", "run_command", "run_suite", "ConfigError", "COMMANDS", "report_digest"]

DEFAULT_DEPTH = 8


class ConfigError(ValueError):
    """Bad command parameters or configuration file."""


def _default_depth() -> int:
    raw = os.environ.get("QLATTICE_DEPTH")
    if raw is None:
        return DEFAULT_DEPTH
    try:
        d = int(raw)
    except ValueError:
        raise ConfigError(f"QLATTICE_DEPTH must be an integer, got {raw!r}") from None
    if d < 0:
        raise ConfigError("QLATTICE_DEPTH must be nonnegative")
    return d


def _check(name: str, passed: bool, *, residual_terms: int = 0, cut=None, details: dict | None = None, verdict=None) -> dict:
    return {
        "name": name,
        "verdict": verdict or ("pass" if passed else "fail"),
        "residual_term_count": int(residual_terms),
        "cut": None if cut is None else str(cut),
        "details": {k: _jsonable(v) for k, v in (details or {}).items()},
    }


def _jsonable(v):
    if isinstance(v, (str, int, bool)) or v is None:
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


def _window(text) -> tuple[int, int] | None:
    if text is None:
        return None
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return int(text[0]), int(text[1])
    try:
        a, b = str(text).split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise ConfigError(f"window must look like 'a..b', got {text!r}") from None
    if lo > hi:
        raise ConfigError("empty window")
    return lo, hi


# --- commands -------------------------------------------------------------


def cmd_serre(p: dict) -> list[dict]:
    from .screening import serre_window_check

    preset = p["preset"]
    if preset not in ("sl3", "affine-sl2", "affine-sl2-laurent"):
        raise ConfigError(f"serre preset must be sl3, affine-sl2 or affine-sl2-laurent, got {preset!r}")
    n = int(p["sites"])
    if n < 1:
        raise ConfigError("sites must be at least 1")
    # one check covering both orderings of the two screening sums
    counts = {order: len(serre_window_check(preset, n, swap=order == "swapped")) for order in ("direct", "swapped")}
    return [_check(f"serre-{preset}-{n}", not any(counts.values()), residual_terms=sum(counts.values()),
                   details={"preset": preset, "sites_per_type": n, "residual_terms_by_order": counts})]


def cmd_nilpotency(p: dict) -> list[dict]:
    from .screening import nilpotency_check

    N, k = int(p["N"]), int(p["sites"])
    if N < 1 or k < 1:
        raise ConfigError("N and sites must be positive")
    return [_check(f"nilpotency-N{N}-sites{k}", nilpotency_check(k, N), details={"N": N, "sites": k})]


def cmd_volkov(p: dict) -> list[dict]:
    from . import volkov

    kind, K = p["kind"], int(p["order"])
    if K < 0:
        raise ConfigError("order must be nonnegative")
    out = []
    if kind == "two-point":
        rec = volkov.two_point_recursion(K)
        bad = [i for i in range(K + 1) if volkov.two_point_closed(i) != rec[i]]
        out.append(_check("two-point-closed-equals-recursion", not bad, residual_terms=len(bad), details={"mismatched_orders": bad}))
        res = volkov.verify_reduced_two_point(K, rec)
        nz = [k for k in range(1, K + 1) if res[k]]
        out.append(_check("two-point-reduced-equation", not nz, residual_terms=len(nz), details={"nonzero_orders": nz}))
        out.append(_check("two-point-order-0-anomaly", res[0] == 1 - BETA, details={"residual": res[0], "expected": 1 - BETA}))
    elif kind == "three-point":
        table = volkov.three_point_recursion(K, K)
        bad = [(n, m) for n in range(K + 1) for m in range(K + 1) if volkov.three_point_closed(n, m) != table[(n, m)]]
        out.append(_check("three-point-closed-equals-recursion", not bad, residual_terms=len(bad),
                          details={"mismatched_cells": [f"{n},{m}" for n, m in bad[:16]], "mismatch_count": len(bad)}))
        zero_col = [m for m in range(1, K + 1) if table[(0, m)]]
        out.append(_check("three-point-C0m-vanish", not zero_col, residual_terms=len(zero_col)))
        two = volkov.two_point_recursion(K)
        m0 = [n for n in range(K + 1) if volkov.three_point_closed(n, 0) != two[n]]
        out.append(_check("three-point-m0-compatibility", not m0, residual_terms=len(m0)))
        if p.get("verify_lift"):
            from .skewalg import AlgebraContext

            ctx = AlgebraContext.preset("sl2-lattice", [0, 1, 2])
            order = max(K, 1)
            rep = volkov.lift_R_and_verify(ctx, order)
            strata = {str(k): str(v) for k, v in rep.strata.items() if v}
            out.append(_check("three-point-lift", rep.residual.is_zero(), residual_terms=len(rep.residual),
                              details={"alpha_convention": rep.alpha_convention, "nonzero_strata": strata}))
            rep1 = volkov.lift_R_and_verify(ctx, order, beta=1)
            out.append(_check("three-point-lift-beta-1", rep1.residual.is_zero(), residual_terms=len(rep1.residual)))
    else:
        raise ConfigError("volkov kind must be two-point or three-point")
    return out


def _depth(p: dict) -> int:
    d = p.get("depth")
    d = _default_depth() if d is None else int(d)
    if d < 0:
        raise ConfigError("depth must be nonnegative")
    return d


def cmd_virasoro_check(p: dict) -> list[dict]:
    from .virasoro import check_invariance, context_for, generator_preset

    if bool(p.get("expr")) == bool(p.get("preset")):
        raise ConfigError("virasoro check needs exactly one of --expr or --preset")
    try:
        spec = to_generator_spec(parse(p["expr"])) if p.get("expr") else generator_preset(p["preset"])
    except (ParseError, EvalError, ValueError) as e:
        raise ConfigError(str(e)) from None
    if spec.total_degree != 0:
        raise ConfigError(f"generator has degree {spec.total_degree}; invariance checks need degree 0")
    window = _window(p.get("window")) or spec.default_window()
    depth = _depth(p)
    sites = sorted(set(spec.sites) | set(range(window[0], window[1] + 1)))
    ctx = context_for(sites)
    rep = check_invariance(ctx, spec, window, depth=depth)
    name = p.get("preset") or "expr"
    return [_check(f"invariance-{name}", rep.passed, residual_terms=rep.residual_term_count, cut=rep.cut,
                   details={"generator": spec.to_text(), "window": f"{window[0]}..{window[1]}", "depth": depth,
                            "per_site": rep.per_site, "generator_terms": rep.generator_terms})]


def cmd_virasoro_ladder(p: dict) -> list[dict]:
    from .virasoro import F_PRESETS, ladder

    preset = p.get("preset", "two-point")
    if preset not in F_PRESETS:
        raise ConfigError(f"unknown F preset {preset!r}; choose from {sorted(F_PRESETS)}")
    weight = Fraction(str(p.get("weight", "-1/2")))
    depth = _depth(p)
    wanted = {"two-point": ("rho-1-3", "rho-1-4"), "three-point": ("rho-1-4-three-point", "rho-1-5-three-point")}.get(preset)
    out = []
    for e in ladder(depth, weight):
        if wanted is not None and e.name not in wanted:
            continue
        out.append(_check(e.name, e.tail_free and e.ratio is not None, residual_terms=0 if e.tail_free else 1,
                          cut=e.rho.cut, details={"weight": weight, "tail_free": e.tail_free, "ratio": e.ratio,
                                                  "rho_terms": len(e.rho.body)}))
    if not out:
        raise ConfigError(f"no ladder entries for F preset {preset!r}")
    return out


def cmd_classical_hw(p: dict) -> list[dict]:
    from .classical import hw_report

    kind = p.get("kind", "two_point")
    try:
        f = evaluate_commutative(parse(p["expr"]))
        rep = hw_report(kind, f)
    except (ParseError, EvalError, ValueError) as e:
        raise ConfigError(str(e)) from None
    deg = f.degree()
    return [
        _check("H-eigenvalue", deg is not None and rep.H == f * deg, details={"H": rep.H, "degree": deg}),
        _check("E-annihilates", rep.E.is_zero(), residual_terms=len(rep.E.sectors), details={"E": rep.E}),
        _check("F-annihilates", rep.F.is_zero(), residual_terms=len(rep.F.sectors), details={"F": rep.F}),
    ]


def cmd_normalize(p: dict) -> list[dict]:
    try:
        ast = parse(p["expr"])
    except ParseError as e:
        return [_check("parse", False, details={"error": str(e), "line": e.line, "column": e.col, "expected": list(e.expected)})]
    text = to_text(ast)
    return [_check("round-trip", parse(text) == ast, details={"normalized": text})]


COMMANDS: dict[str, tuple[Callable[[dict], list[dict]], set[str], set[str]]] = {
    # name: (handler, required keys, optional keys)
    "serre": (cmd_serre, {"preset", "sites"}, set()),
    "nilpotency": (cmd_nilpotency, {"N", "sites"}, set()),
    "volkov": (cmd_volkov, {"kind", "order"}, {"verify_lift"}),
    "virasoro-check": (cmd_virasoro_check, set(), {"expr", "preset", "window", "depth"}),
    "virasoro-ladder": (cmd_virasoro_ladder, set(), {"preset", "depth", "weight"}),
    "classical-hw": (cmd_classical_hw, {"expr"}, {"kind"}),
    "normalize": (cmd_normalize, {"expr"}, set()),
}


def _validate(command: str, params: dict) -> dict:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {sorted(COMMANDS)}")
    _, req, opt = COMMANDS[command]
    params = {k: v for k, v in params.items() if v is not None}
    unknown = set(params) - req - opt
    if unknown:
        raise ConfigError(f"unknown keys for {command}: {sorted(unknown)}")
    missing = req - set(params)
    if missing:
        raise ConfigError(f"missing keys for {command}: {sorted(missing)}")
    return params


def config_digest(obj: Any) -> str:
    return hashlib.sha256(json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def report_digest(report: dict) -> str:
    return config_digest(report)


def run_command(command: str, params: dict) -> dict:
    params = _validate(command, params)
    if command in ("virasoro-check", "virasoro-ladder") and "depth" not in params:
        params["depth"] = _default_depth()
    checks = COMMANDS[command][0](params)
    return {"command": command, "config_digest": config_digest({"command": command, **params}), "checks": checks}


_SUITE_KEYS = {"depth", "runs"}


def run_suite(config: dict) -> dict:
    """Run every entry of ``config["runs"]``; ``config["depth"]`` is the default depth."""
    if not isinstance(config, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(config) - _SUITE_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    runs = config.get("runs")
    if not isinstance(runs, list) or not runs:
        raise ConfigError("configuration needs a nonempty 'runs' list")
    checks = []
    normalized_runs = []
    for k, run in enumerate(runs):
        if not isinstance(run, dict) or "command" not in run:
            raise ConfigError(f"runs[{k}] needs a 'command'")
        params = {key: v for key, v in run.items() if key != "command"}
        if "depth" in config and run["command"] in ("virasoro-check", "virasoro-ladder"):
            params.setdefault("depth", config["depth"])
        rep = run_command(run["command"], params)
        normalized_runs.append({"command": run["command"], **params})
        for c in rep["checks"]:
            checks.append({**c, "name": f"{run['command']}/{c['name']}"})
    return {"command": "suite", "config_digest": config_digest({"runs": normalized_runs}), "checks": checks}


# --- argument parsing -----------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qlattice", description="Exact checks in q-commuting lattice algebras.")
    ap.add_argument("--config", help="JSON file with a list of runs (executes the whole suite)")
    sub = ap.add_subparsers(dest="command")

    s = sub.add_parser("serre", help="quantum Serre residual of two screening sums")
    s.add_argument("--preset", required=True, choices=["sl3", "affine-sl2", "affine-sl2-laurent"])
    s.add_argument("--sites", required=True, type=int, help="sites per type")

    s = sub.add_parser("nilpotency", help="(x_1 + ... + x_k)^N at a primitive N-th root of unity")
    s.add_argument("--N", required=True, type=int)
    s.add_argument("--sites", required=True, type=int)

    s = sub.add_parser("volkov", help="R-operator coefficient recursions")
    s.add_argument("kind", choices=["two-point", "three-point"])
    s.add_argument("--order", required=True, type=int)
    s.add_argument("--verify-lift", action="store_true")

    v = sub.add_parser("virasoro", help="generator invariance and the F/rho ladder")
    vs = v.add_subparsers(dest="action", required=True)
    c = vs.add_parser("check")
    c.add_argument("--expr")
    c.add_argument("--preset")
    c.add_argument("--window")
    c.add_argument("--depth", type=int)
    lad = vs.add_parser("ladder")
    lad.add_argument("--preset", default="two-point")
    lad.add_argument("--depth", type=int)
    lad.add_argument("--weight", default="-1/2")

    cl = sub.add_parser("classical", help="commutative vector-field checks")
    cs = cl.add_subparsers(dest="action", required=True)
    hw = cs.add_parser("hw")
    hw.add_argument("--kind", default="two_point", choices=["two_point", "three_point", "four_point"])
    hw.add_argument("--expr", required=True)

    n = sub.add_parser("normalize", help="print the canonical form of an expression")
    n.add_argument("--expr", required=True)
    return ap


def _params_from_args(args) -> tuple[str, dict]:
    cmd = args.command
    if cmd == "serre":
        return cmd, {"preset": args.preset, "sites": args.sites}
    if cmd == "nilpotency":
        return cmd, {"N": args.N, "sites": args.sites}
    if cmd == "volkov":
        return cmd, {"kind": args.kind, "order": args.order, "verify_lift": args.verify_lift or None}
    if cmd == "virasoro" and args.action == "check":
        return "virasoro-check", {"expr": args.expr, "preset": args.preset, "window": args.window, "depth": args.depth}
    if cmd == "virasoro" and args.action == "ladder":
        return "virasoro-ladder", {"preset": args.preset, "depth": args.depth, "weight": args.weight}
    if cmd == "classical":
        return "classical-hw", {"kind": args.kind, "expr": args.expr}
    if cmd == "normalize":
        return cmd, {"expr": args.expr}
    raise ConfigError("no command given")


def main(argv: list[str] | None = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 2
    try:
        if args.config:
            if args.command:
                raise ConfigError("--config runs a whole suite; do not combine it with a command")
            try:
                with open(args.config, encoding="utf-8") as fh:
                    config = json.load(fh)
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"cannot read config: {e}") from None
            report = run_suite(config)
        else:
            if not args.command:
                ap.print_usage(sys.stderr)
                return 2
            report = run_command(*_params_from_args(args))
    except ConfigError as e:
        print(f"qlattice: {e}", file=sys.stderr)
        return 2
    print(json.dumps(report, sort_keys=True, indent=2))
    return 0 if all(c["verdict"] == "pass" for c in report["checks"]) else 1


if __name__ == "__main__":
    sys.exit(main())
