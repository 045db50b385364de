"""Command-line front end.

Exit codes: 0 ok, 1 property false, 2 usage or parse error, 3 internal
verification failure, 4 search budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import checkers, constructions, oracle, separators
from .core import DomainError, FamilyFormatError, format_family, read_family

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INTERNAL, EXIT_BUDGET = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_path: Path | None = None
    threads: int = 1
    node_budget: int = oracle.DEFAULT_NODE_BUDGET
    deterministic: bool = False


def _emit(doc: dict, cfg: RunConfig) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    if cfg.deterministic:
        doc.pop("wall_time", None)
    print(json.dumps(doc, indent=2, sort_keys=True, default=str))


def _config(args: argparse.Namespace) -> RunConfig:
    threads = getattr(args, "threads", 1) or 1
    env = os.environ.get("SHATTER_THREADS")
    if env:
        threads = int(env)
    skip = {"command", "func", "output", "threads", "node_budget", "deterministic"}
    params = {k: v for k, v in vars(args).items() if k not in skip}
    out = getattr(args, "output", None)
    return RunConfig(
        command=args.command,
        parameters=params,
        output_path=Path(out) if out else None,
        threads=max(1, threads),
        node_budget=getattr(args, "node_budget", oracle.DEFAULT_NODE_BUDGET),
        deterministic=getattr(args, "deterministic", False),
    )


def cmd_construct(cfg: RunConfig) -> int:
    p = cfg.parameters
    kind = p["kind"]
    params: dict = {}
    if kind == "perfect":
        params = {"k": p["k"]}
    elif kind == "little":
        if not p.get("base"):
            raise DomainError("construct little needs --base FILE")
        params = {"base": read_family(p["base"])}
    elif kind == "kcube":
        if not p.get("base") or p.get("n") is None:
            raise DomainError("construct kcube needs --base FILE, --n and --k")
        params = {"base": read_family(p["base"]), "n": p["n"], "k": p["k"]}
    elif kind == "shatter":
        if p.get("N") is None:
            raise DomainError("construct shatter needs --N")
        params = {"k": p["k"], "N": p["N"]}
    elif kind == "fractional":
        params = {"r": p["r"]}
    built = constructions.build(kind, **params)
    trace = built.trace.to_json()
    if not p.get("no_verify"):
        ok, detail = constructions.verify_trace(built.family, built.trace, cfg.threads)
        if not ok:
            print(f"verification of {kind} construction failed: {detail}", file=sys.stderr)
            return EXIT_INTERNAL
        trace["verified"] = True
    else:
        trace["verified"] = False
    trace_doc = {"schema_version": SCHEMA_VERSION, **trace}
    if cfg.output_path:
        cfg.output_path.write_text(format_family(built.family), encoding="utf-8")
        trace_path = cfg.output_path.with_name(cfg.output_path.name + ".trace.json")
        trace_path.write_text(json.dumps(trace_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote {cfg.output_path} (n={built.family.n} m={built.family.m}) and {trace_path}", file=sys.stderr)
    else:
        sys.stdout.write(format_family(built.family))
        print(json.dumps(trace_doc, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def _parse_pattern(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise DomainError(f"bad pattern {text!r}; expected e.g. 2,1,3") from None


def cmd_verify(cfg: RunConfig) -> int:
    p = cfg.parameters
    family = read_family(p["family"])
    k, mode = p["k"], p["mode"]
    doc: dict = {"mode": mode, "family": str(p["family"])}
    if mode == "fraction":
        report = checkers.coverage(family, k, witness_limit=p["witnesses"], workers=cfg.threads)
        doc.update(report.to_json())
        _emit(doc, cfg)
        return EXIT_OK
    if mode == "pattern":
        if not p.get("pattern"):
            raise DomainError("--mode pattern needs --pattern")
        pattern = _parse_pattern(p["pattern"])
        if len(pattern) != k:
            raise DomainError(f"pattern length {len(pattern)} != k={k}")
        ok, witness = checkers.follows_everywhere(family, pattern)
        doc.update({"pattern": list(pattern)})
    else:
        if mode == "total":
            t = math.factorial(k)
        else:
            if p.get("t") is None:
                raise DomainError("--mode partial needs --t")
            t = p["t"]
        report = checkers.coverage(family, k, witness_limit=p["witnesses"], workers=cfg.threads)
        doc.update(report.to_json())
        ok = report.min_count >= t
        witness = None
        if not ok:
            _, witness = checkers.satisfies_partial(family, k, t, cfg.threads)
        doc["t"] = t
    doc["holds"] = ok
    doc["witness"] = None if witness is None else list(witness)
    _emit(doc, cfg)
    return EXIT_OK if ok else EXIT_FALSE


def cmd_search(cfg: RunConfig) -> int:
    p = cfg.parameters
    problem = p["problem"]
    if problem == "extensions":
        _emit({"problem": "extensions", **oracle.extension_census()}, cfg)
        return EXIT_OK
    if p.get("n") is None or p.get("k") is None:
        raise DomainError("search needs -n and -k")
    if problem == "min":
        if p.get("t") is None:
            raise DomainError("search min needs -t")
        report = oracle.min_family_size(p["n"], p["k"], p["t"], node_budget=cfg.node_budget, threads=cfg.threads)
    else:
        if p.get("m") is None:
            raise DomainError("search max needs -m")
        report = oracle.max_shattered(p["n"], p["k"], p["m"], node_budget=cfg.node_budget, threads=cfg.threads)
    _emit(report.to_json(cfg.deterministic), cfg)
    return EXIT_OK if report.proof_of_optimality else EXIT_BUDGET


def cmd_fraction(cfg: RunConfig) -> int:
    r = cfg.parameters["r"]
    family, guaranteed = constructions.fractional_family(r)
    report = checkers.coverage(family, 3, materialize_cap=0, witness_limit=0, workers=cfg.threads)
    doc = {
        "r": r,
        "n": family.n,
        "guaranteed_shattered": guaranteed,
        "measured_shattered": report.shattered_count,
        "total_triples": report.total_tuples,
        "measured_fraction": str(report.fraction),
        "guarantee_holds": report.shattered_count >= guaranteed,
    }
    _emit(doc, cfg)
    return EXIT_OK if doc["guarantee_holds"] else EXIT_INTERNAL


def cmd_separators(cfg: RunConfig) -> int:
    p = cfg.parameters
    if p["kind"] == "binary":
        system, ordered = separators.binary_splits(p["n"]), False
    else:
        system, ordered = separators.separating_system(p["n"]), True
    ok, pair = separators.verify_separating(system, ordered)
    doc = {"kind": p["kind"], "size": len(system), "verified": ok, "uncovered_pair": pair, **system.to_json()}
    _emit(doc, cfg)
    return EXIT_OK if ok else EXIT_INTERNAL


def cmd_probe(cfg: RunConfig) -> int:
    p = cfg.parameters
    result = oracle.monotonicity_probe(p["k"], p["m"], p["n"], node_budget=cfg.node_budget, threads=cfg.threads)
    _emit(result.to_json(), cfg)
    if result.partial:
        return EXIT_BUDGET
    return EXIT_OK if result.non_increasing else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permshatter", description="Shattering permutation families.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, search=False):
        sp.add_argument("--threads", type=int, default=1, help="worker count (SHATTER_THREADS overrides)")
        sp.add_argument("--deterministic", action="store_true", help="omit timing fields from JSON")
        if search:
            sp.add_argument("--node-budget", type=int, default=oracle.DEFAULT_NODE_BUDGET)

    sp = sub.add_parser("construct", help="build a family and its trace")
    sp.add_argument("kind", choices=["q34", "perfect", "little", "kcube", "shatter", "fractional"])
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--n", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--base", help="base family file")
    sp.add_argument("-o", "--output", help="family file to write; trace goes to <output>.trace.json")
    sp.add_argument("--no-verify", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="check a family file")
    sp.add_argument("family")
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--mode", choices=["total", "partial", "fraction", "pattern"], default="total")
    sp.add_argument("--t", type=int)
    sp.add_argument("--pattern", help="comma-separated pattern, e.g. 2,1,3")
    sp.add_argument("--witnesses", type=int, default=10, help="max unshattered tuples listed")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("search", help="exact optimum by exhaustive search")
    sp.add_argument("problem", choices=["min", "max", "extensions"])
    sp.add_argument("-n", type=int)
    sp.add_argument("-k", type=int)
    sp.add_argument("-t", type=int)
    sp.add_argument("-m", type=int)
    common(sp, search=True)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("fraction", help="guaranteed vs measured shattering of the iterated Q_3(4) family")
    sp.add_argument("--r", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_fraction)

    sp = sub.add_parser("separators", help="emit and verify a partition system")
    sp.add_argument("n", type=int)
    sp.add_argument("--kind", choices=["binary", "ordered"], default="ordered")
    common(sp)
    sp.set_defaults(func=cmd_separators)

    sp = sub.add_parser("probe", help="F_k(n, m) across n and its monotonicity")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("--n", type=int, nargs="+", required=True)
    common(sp, search=True)
    sp.set_defaults(func=cmd_probe)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    try:
        return args.func(cfg)
    except FamilyFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
