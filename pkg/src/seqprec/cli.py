"""Batch command line front end.

Every run prints one report (JSON by default, or a flat CSV of the same
values) that embeds the effective run configuration, so ``seqprec replay
REPORT`` reproduces it.

Exit codes: 0 success (verdicts live in the report), 2 invalid config or
flags, 3 numerical nonconvergence, 4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any

import numpy as np

from . import _accel
from .applications import AllocationSpec, best_allocation_check, series_parallel_compare, sp_ratio
from .audit import CLAIMS, FamilySpace, audit_claim, search_counterexample
from .config import CONVENTIONS, METHODS, Config
from .distributions import blyth_triple, make_distribution
from .errors import MalformedParameter, MethodUnsupported, NonConvergence, PreconditionNotEstablished, TooManyVariables
from .exact import ChainEnumerator
from .pairwise_orders import check_order
from .permutations import parse_permutation
from .rng import Rng
from .sequence_orders import chain_verdict, check_ssp, pairwise_sp, perm_probability, perm_table, resolve_method

log = logging.getLogger("seqprec")

SCHEMA_ID = "seqprec.report"
SCHEMA_VERSION = 1

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_INTERNAL = 0, 2, 3, 4

OPTION_FLAGS = {
    "method": "method",
    "samples": "samples",
    "seed": "seed",
    "grid": "grid",
    "tail": "tail",
    "convention": "convention",
    "workers": "workers",
    "n_cap": "n_cap",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    args: dict = field(default_factory=dict)
    variables: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    out: str = "json"

    def config(self) -> Config:
        return Config.from_dict(self.options)

    def dists(self):
        names = [v.get("name") for v in self.variables if v.get("name")]
        if len(names) != len(set(names)):
            raise MalformedParameter(f"variable names must be distinct, got {names}")
        return [make_distribution(v) for v in self.variables]

    def to_dict(self) -> dict:
        return {"command": self.command, "args": self.args, "variables": self.variables, "options": self.options}


# --- argument parsing ------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON config with a 'variables' array, or a previous report; '-' reads stdin")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--tail", type=float)
    p.add_argument("--convention", choices=CONVENTIONS)
    p.add_argument("--workers", type=int)
    p.add_argument("--n-cap", dest="n_cap", type=int)
    p.add_argument("--out", choices=("json", "csv"), default="json")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="seqprec", description="Stochastic precedence and sequential order toolkit")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    order = sub.add_parser("order").add_subparsers(dest="action", required=True, parser_class=_Parser)
    oc = order.add_parser("check", parents=[common])
    oc.add_argument("--type", required=True, choices=("lr", "hr", "st", "sp"))
    oc.add_argument("--pair", default="1,2", help="1-based indices of T1 and T2, e.g. '3,1'")
    oc.add_argument("--route", choices=("ratio", "hazard"), default="ratio")

    perm = sub.add_parser("perm").add_subparsers(dest="action", required=True, parser_class=_Parser)
    pp = perm.add_parser("prob", parents=[common])
    pp.add_argument("--perm", required=True)
    perm.add_parser("table", parents=[common])

    ssp = sub.add_parser("ssp").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sc = ssp.add_parser("check", parents=[common])
    sc.add_argument("--target")
    csp = sub.add_parser("csp").add_subparsers(dest="action", required=True, parser_class=_Parser)
    csp.add_parser("check", parents=[common])

    au = sub.add_parser("audit", parents=[common])
    au.add_argument("--claim", required=True, choices=CLAIMS)
    au.add_argument("--target")
    au.add_argument("--budget", type=int)
    au.add_argument("--any-n", action="store_true")

    se = sub.add_parser("search", parents=[common])
    se.add_argument("--claim", required=True, choices=CLAIMS)
    se.add_argument("--space", default="{}", help="JSON family-space, e.g. '{\"kind\": \"discrete\", \"n\": 3}'")
    se.add_argument("--budget", type=int, default=1000)

    app = sub.add_parser("app").add_subparsers(dest="action", required=True, parser_class=_Parser)
    ar = app.add_parser("ratio", parents=[common])
    ar.add_argument("--p-target")
    ar.add_argument("--p-rival")
    ar.add_argument("--target-perm")
    ar.add_argument("--rival-perm")
    sp = app.add_parser("series-parallel", parents=[common])
    sp.add_argument("--alloc-a", help="series,parallel,parallel e.g. '3,1,2'")
    sp.add_argument("--alloc-b")
    sp.add_argument("--all-rivals", action="store_true")

    demo = sub.add_parser("demo").add_subparsers(dest="action", required=True, parser_class=_Parser)
    demo.add_parser("blyth", parents=[common])

    rp = sub.add_parser("replay")
    rp.add_argument("report", help="report file to re-execute ('-' for stdin)")
    rp.add_argument("--out", choices=("json", "csv"))
    return parser


def _read_json(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedParameter(f"cannot read JSON from {path}: {exc}") from exc


COMMAND_ARGS = {
    "order check": ("type", "pair", "route"),
    "perm prob": ("perm",),
    "perm table": (),
    "ssp check": ("target",),
    "csp check": (),
    "audit": ("claim", "target", "budget", "any_n"),
    "search": ("claim", "space", "budget"),
    "app ratio": ("p_target", "p_rival", "target_perm", "rival_perm"),
    "app series-parallel": ("alloc_a", "alloc_b", "all_rivals"),
    "demo blyth": (),
}


def run_config_from_args(ns: argparse.Namespace) -> RunConfig:
    command = ns.group if getattr(ns, "action", None) is None else f"{ns.group} {ns.action}"
    variables, options = [], {}
    if ns.config:
        doc = _read_json(ns.config)
        if isinstance(doc, dict) and doc.get("schema") == SCHEMA_ID:
            doc = doc["run"]
        if not isinstance(doc, dict):
            raise MalformedParameter("config must be a JSON object")
        variables = doc.get("variables", [])
        options = dict(doc.get("options", {}))
        if not isinstance(variables, list):
            raise MalformedParameter("'variables' must be an array")
    for flag, key in OPTION_FLAGS.items():
        v = getattr(ns, flag, None)
        if v is not None:
            options[key] = v
    options = Config.from_dict(options).to_dict()
    args = {k: getattr(ns, k) for k in COMMAND_ARGS[command]}
    if command == "search":
        try:
            args["space"] = json.loads(args["space"]) if isinstance(args["space"], str) else args["space"]
        except json.JSONDecodeError as exc:
            raise MalformedParameter(f"--space is not valid JSON: {exc}") from exc
    return RunConfig(command, args, variables, options, ns.out)


# --- commands --------------------------------------------------------------


def _pair(text: str, n: int) -> tuple[int, int]:
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise MalformedParameter(f"--pair must look like '1,2', got {text!r}") from exc
    if not (1 <= i <= n and 1 <= j <= n and i != j):
        raise MalformedParameter(f"--pair indices must be distinct and within 1..{n}")
    return i, j


def _need(dists, k: int, command: str):
    if len(dists) < k:
        raise MalformedParameter(f"{command} needs at least {k} variables, config has {len(dists)}")


def _perm(text, n):
    try:
        return parse_permutation(text, n)
    except ValueError as exc:
        raise MalformedParameter(str(exc)) from exc


def _prob_arg(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedParameter(f"not a probability: {text!r}") from exc


def execute(rc: RunConfig) -> dict:
    cfg = rc.config()
    a = rc.args
    cmd = rc.command
    if cmd == "demo blyth":
        return demo_blyth(cfg)
    if cmd == "search":
        try:
            space = FamilySpace.from_dict(a["space"])
            space.draw(Rng(0))
        except (TypeError, ValueError) as exc:
            raise MalformedParameter(f"bad family space: {exc}") from exc
        if a["budget"] < 1:
            raise MalformedParameter("--budget must be >= 1")
        rep = search_counterexample(a["claim"], space, a["budget"], cfg.seed, cfg)
        return {"claim": a["claim"], "budget": a["budget"], "found": rep is not None, "report": rep and rep.to_dict()}
    if cmd == "app ratio":
        return _app_ratio(rc, cfg)

    dists = rc.dists()
    n = len(dists)
    if cmd == "order check":
        _need(dists, 2, cmd)
        i, j = _pair(a["pair"], n)
        v = check_order(a["type"], dists[i - 1], dists[j - 1], cfg, route=a["route"], method=cfg.method)
        return {"pair": [i, j], "verdict": v.to_dict()}
    _need(dists, 1, cmd)
    if cmd == "perm prob":
        perm = _perm(a["perm"], n)
        return {"perm": list(perm), "estimate": perm_probability(dists, perm, cfg.method, cfg).to_dict()}
    if cmd == "perm table":
        return {"table": perm_table(dists, cfg.method, cfg).to_dict()}
    if cmd == "ssp check":
        target = _perm(a["target"], n) if a["target"] else None
        return {"ssp": check_ssp(dists, cfg, target=target).to_dict()}
    if cmd == "csp check":
        method = resolve_method(dists, cfg.method)
        pw = pairwise_sp(dists, "monte-carlo" if method == "monte-carlo" else "auto", cfg,
                         Rng(cfg.seed).child(1) if method == "monte-carlo" else None)
        adjacent = [pw[f"{k + 1}<{k + 2}"] for k in range(n - 1)]
        return {"csp_holds": chain_verdict(adjacent), "adjacent_sp": [v.to_dict() for v in adjacent],
                "pairwise_sp": {k: v.to_dict() for k, v in pw.items()}}
    if cmd == "audit":
        target = _perm(a["target"], n) if a["target"] else None
        try:
            rep = audit_claim(a["claim"], dists, cfg, target=target, budget=a["budget"], any_n=a["any_n"])
        except PreconditionNotEstablished as exc:
            return {"claim": a["claim"], "holds": "precondition-not-established", "reason": str(exc)}
        return rep.to_dict()
    if cmd == "app series-parallel":
        if n != 3:
            raise MalformedParameter("series-parallel needs exactly three variables")
        rng = Rng(cfg.seed)
        if a["all_rivals"]:
            return {"comparisons": best_allocation_check(dists, rng, cfg.samples, cfg)}
        if not (a["alloc_a"] and a["alloc_b"]):
            raise MalformedParameter("give --alloc-a and --alloc-b, or --all-rivals")
        try:
            aa, bb = AllocationSpec.parse(a["alloc_a"]), AllocationSpec.parse(a["alloc_b"])
        except ValueError as exc:
            raise MalformedParameter(str(exc)) from exc
        res = series_parallel_compare(dists, aa, bb, rng, cfg.samples, cfg)
        return {"alloc_a": aa.as_list(), "alloc_b": bb.as_list(), **res.to_dict()}
    raise MalformedParameter(f"unknown command {cmd!r}")


def _app_ratio(rc: RunConfig, cfg: Config) -> dict:
    a = rc.args
    if a["p_target"] is not None and a["p_rival"] is not None:
        pt, pr = _prob_arg(a["p_target"]), _prob_arg(a["p_rival"])
        source = "given"
    elif a["target_perm"] and a["rival_perm"]:
        dists = rc.dists()
        table = perm_table(dists, cfg.method, cfg)
        et = table[_perm(a["target_perm"], len(dists))]
        er = table[_perm(a["rival_perm"], len(dists))]
        pt = et.exact if et.exact is not None else et.value
        pr = er.exact if er.exact is not None else er.value
        source = table.method
    else:
        raise MalformedParameter("give --p-target/--p-rival or --target-perm/--rival-perm")
    try:
        r = sp_ratio(pt, pr)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedParameter(str(exc)) from exc
    out = {"p_target": float(pt), "p_rival": float(pr), "ratio": float(r), "source": source}
    if isinstance(r, Fraction):
        out["fraction"] = str(r)
    return out


def demo_blyth(cfg: Config) -> dict:
    """Blyth's non-transitive triple: strict pairwise precedences, table, audits."""
    dists = blyth_triple()
    pairs = []
    for i, j in ((1, 2), (2, 3), (3, 1)):
        p = ChainEnumerator([dists[i - 1], dists[j - 1]], strict=True).probability((0, 1))
        pairs.append({"event": f"T{i}<T{j}", "value": float(p), "fraction": str(p), "err": 0.0})
    strict_cfg = cfg.with_(convention="strict", method="exact")
    table = perm_table(dists, "exact", strict_cfg)
    ssp = check_ssp(dists, strict_cfg, table=table)
    cycle = audit_claim("sp-transitivity", dists, strict_cfg)
    pairwise_audit = audit_claim("theorem-2.2", dists, strict_cfg)
    return {
        "variables": [d.to_dict() for d in dists],
        "pairwise_strict": pairs,
        "sp_cycle": cycle.to_dict(),
        "ssp": ssp.to_dict(),
        "ssp_pairwise_audit": pairwise_audit.to_dict(),
    }


# --- output ----------------------------------------------------------------


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, float) and not np.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def make_report(rc: RunConfig, result: dict) -> dict:
    return jsonable(
        {
            "schema": SCHEMA_ID,
            "schema_version": SCHEMA_VERSION,
            "command": rc.command,
            "backend": _accel.BACKEND,
            "run": rc.to_dict(),
            "result": result,
        }
    )


def flatten(obj, prefix: str = ""):
    """``(path, value)`` leaves of a JSON document, depth first."""
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["path", "value"])
    for path, v in flatten(report):
        w.writerow([path, _cell(v)])
    return buf.getvalue()


def _cell(v) -> str:
    # json spelling for scalars so both outputs parse to the same values
    if isinstance(v, str):
        return v
    return json.dumps(v)


def render(report: dict, out: str) -> str:
    if out == "csv":
        return to_csv(report)
    return json.dumps(report, indent=2) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("seqprec").joinpath("schema/report.schema.json").read_text())


def replay_config(report: dict) -> RunConfig:
    if not isinstance(report, dict) or report.get("schema") != SCHEMA_ID:
        raise MalformedParameter("not a seqprec report")
    run = report["run"]
    return RunConfig(run["command"], run["args"], run["variables"], run["options"])


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
        if ns.group == "replay":
            rc = replay_config(_read_json(ns.report))
            rc.out = ns.out or "json"
        else:
            rc = run_config_from_args(ns)
        report = make_report(rc, execute(rc))
        stdout.write(render(report, rc.out))
        return EXIT_OK
    except UsageError as exc:
        print(f"seqprec: error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (MalformedParameter, MethodUnsupported, TooManyVariables) as exc:
        print(f"seqprec: invalid configuration: {exc}", file=stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"seqprec: numerical nonconvergence: {exc}", file=stderr)
        return EXIT_NONCONVERGENCE
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"seqprec: internal error: {exc!r}", file=stderr)
        return EXIT_INTERNAL


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    sys.exit(run_cli())
