"""Command-line front end.

Every subcommand writes one JSON document with ``"schema": "fcc-stab/1"``.
Wall-clock data lives under the separate ``"timing"`` key (``--no-timing``
drops it) so that runs with the same arguments and seed compare byte for byte.
Exit status: 0 on success, 1 when a checked property fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from . import __version__
from .analysis import exact_distance, heuristic_distance, subsystem_distance, tqo_report
from .charges import Syndrome, charge_table, decompose, monopole_weight_scan, solve_syndrome, syndrome_of
from .code import check_no_minus_identity, logical_count
from .errors import FccStabError, MonopoleSectorError
from .lattice import LatticeSpec, Window, parse_context, parse_direction
from .operators import (
    FlexibleStringSpec,
    HalfMembraneSpec,
    RigidStringSpec,
    TetrahedronSpec,
    flexible_string,
    half_membrane,
    logical_set,
    membrane,
    rigid_string,
    tetrahedron,
)
from .pauli import PauliWord

SCHEMA = "fcc-stab/1"
DEFAULT_WINDOW = "window:-10..10,-10..10,-10..10"


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, doc: dict):
        super().__init__(doc.get("diagnostic", "check failed"))
        self.doc = doc


@dataclass
class RunConfig:
    command: str
    args: argparse.Namespace
    output: Optional[str] = None
    timing: bool = True
    seed: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)


# input helpers


def _periodic(text: str) -> LatticeSpec:
    ctx = parse_context(text)
    if not isinstance(ctx, LatticeSpec):
        raise UsageError(f"expected a periodic spec px,py,pz, got {text!r}")
    return ctx


def _read_json(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _load_operator(path: str) -> PauliWord:
    data = _read_json(path)
    if "operator" in data:
        data = data["operator"]
    try:
        return PauliWord.from_json(data)
    except KeyError as exc:
        raise UsageError(f"operator JSON lacks field {exc}") from None


def _load_syndrome(path: str, context: Optional[str] = None) -> Syndrome:
    data = _read_json(path)
    if "syndrome" in data and isinstance(data["syndrome"], dict):
        data = data["syndrome"]
    ctx = parse_context(context) if context else None
    try:
        return Syndrome.from_json(data, ctx)
    except KeyError as exc:
        raise UsageError(f"syndrome JSON lacks field {exc}") from None


def _params(text: Optional[str]) -> dict:
    """``--params`` accepts a JSON object or ``key=value`` pairs separated by ``;``."""
    if not text:
        return {}
    text = text.strip()
    if text.startswith("{"):
        try:
            out = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad --params JSON: {exc}") from None
        if not isinstance(out, dict):
            raise UsageError("--params JSON must be an object")
        return out
    out = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise UsageError(f"bad parameter {part!r}, expected key=value")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _site(v) -> tuple:
    if isinstance(v, str):
        try:
            parts = [int(c) for c in v.replace("(", "").replace(")", "").split(",")]
        except ValueError:
            raise UsageError(f"bad site {v!r}") from None
    else:
        parts = [int(c) for c in v]
    if len(parts) != 3:
        raise UsageError(f"a site needs three coordinates, got {v!r}")
    return tuple(parts)


def _direction(v) -> tuple:
    try:
        return parse_direction(v if isinstance(v, str) else tuple(int(c) for c in v))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad direction {v!r}: {exc}") from None


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    return str(v).lower() in ("1", "true", "yes")


# subcommands


def cmd_verify_theorem1(cfg: RunConfig) -> dict:
    spec = _periodic(cfg.args.spec)
    rep = logical_count(spec)
    mi = check_no_minus_identity(spec, random_samples=cfg.args.samples, seed=cfg.seed)
    doc = {
        "spec": spec.spec_string,
        "n": rep.n,
        "rank": rep.rank,
        "k": rep.k,
        "expected_k": rep.expected_k,
        "expected": rep.expected_k,
        "minus_identity_found": mi.minus_identity_found,
        "f_parity_ok": not mi.f_mismatches,
        "ok": rep.ok and mi.ok,
    }
    if not doc["ok"]:
        doc["diagnostic"] = f"k = {rep.k}, expected {rep.expected_k}" if not rep.ok else "dependency product is not +I"
        raise CheckFailed(doc)
    return doc


def _build_word(kind: str, ctx, p: dict) -> PauliWord:
    try:
        if kind == "rigid":
            spec = RigidStringSpec(_site(p.get("start", "0,0,0")), _direction(p.get("h", "110")), int(p.get("m", 3)))
            return rigid_string(ctx, spec)
        if kind == "flexible":
            spec = FlexibleStringSpec(
                _site(p.get("start", "0,0,0")),
                _direction(p.get("t", "111")),
                int(p.get("eps", 1)),
                str(p.get("steps", "z")),
            )
            return flexible_string(ctx, spec)
        if kind == "tetra":
            spec = TetrahedronSpec(_site(p.get("corner", "0,0,0")), int(p.get("r", 1)), _bool(p.get("mirrored", False)))
            return tetrahedron(ctx, spec)
        if kind == "membrane":
            return membrane(ctx, int(p.get("R", 2)), _site(p.get("center", "0,0,0")), str(p.get("normal", "z")))
        if kind == "half-membrane":
            if not isinstance(ctx, LatticeSpec):
                raise UsageError("half-membranes need a periodic --spec")
            hm = HalfMembraneSpec(str(p.get("axis", "z")), str(p.get("abc", "000")), int(p.get("offset", 0)))
            return half_membrane(ctx, hm)
        if kind == "logical":
            if not isinstance(ctx, LatticeSpec):
                raise UsageError("logical operators need a periodic --spec")
            name = str(p.get("name", "Z1"))
            table = logical_set(ctx)
            if name not in table:
                raise UsageError(f"unknown logical {name!r}; choose from {sorted(table)}")
            return table[name]
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FccStabError):
            raise
        raise UsageError(f"bad parameters for {kind}: {exc}") from None
    raise UsageError(f"unknown kind {kind!r}")


def cmd_build(cfg: RunConfig) -> dict:
    a = cfg.args
    default = "3,5,7" if a.kind in ("half-membrane", "logical") else DEFAULT_WINDOW
    ctx = parse_context(a.spec or default)
    word = _build_word(a.kind, ctx, _params(a.params))
    syn = syndrome_of(word)
    return {
        "kind": a.kind,
        "context": ctx.spec_string,
        "operator": word.to_json(),
        "weight": word.weight,
        "letters": [[list(s), l] for s, l in sorted(word.letters().items())],
        "hermitian": word.is_hermitian(),
        "syndrome": syn.to_json(),
    }


def cmd_syndrome(cfg: RunConfig) -> dict:
    word = _load_operator(cfg.args.operator)
    syn = syndrome_of(word)
    return {"context": word.ctx.spec_string, "weight": word.weight, "syndrome": syn.to_json()}


def cmd_charges(cfg: RunConfig) -> dict:
    syn = _load_syndrome(cfg.args.syndrome, cfg.args.spec)
    table = charge_table(syn)
    return {
        "context": syn.ctx.spec_string,
        "support_size": len(syn),
        "bulk_valid": syn.bulk_valid,
        "charges": table.to_json(),
        "parity_identities": table.parity_identities(),
        "diagram": table.diagram(),
    }


def cmd_decompose(cfg: RunConfig) -> dict:
    syn = _load_syndrome(cfg.args.syndrome, cfg.args.spec)
    try:
        dec = decompose(syn)
    except MonopoleSectorError as exc:
        raise CheckFailed({"context": syn.ctx.spec_string, "ok": False, "diagnostic": str(exc)})
    return {"context": syn.ctx.spec_string, "decomposition": dec.to_json(), "ok": True}


def cmd_solve(cfg: RunConfig) -> dict:
    syn = _load_syndrome(cfg.args.syndrome, cfg.args.spec)
    if not isinstance(syn.ctx, Window):
        raise UsageError("solve needs a window context")
    res = solve_syndrome(syn.ctx, syn)
    doc = {"context": syn.ctx.spec_string, "result": res.to_json()}
    if res.operator is not None:
        doc["check"] = syndrome_of(res.operator).support == syn.support
        if not doc["check"]:
            doc["diagnostic"] = "solution does not reproduce the syndrome"
            raise CheckFailed(doc)
    return doc


def cmd_distance(cfg: RunConfig) -> dict:
    a = cfg.args
    spec = _periodic(a.spec)
    if a.mode == "exact":
        rep = exact_distance(spec, cap=a.cap, max_nodes=a.max_nodes)
    elif a.mode == "heuristic":
        rep = heuristic_distance(spec, trials=a.trials, seed=cfg.seed, perms=a.perms, certify_cap=a.cap, threads=a.threads)
    else:
        rep = subsystem_distance(spec, trials=a.trials, seed=cfg.seed, perms=a.perms, threads=a.threads)
    return {"report": rep.to_json()}


def cmd_tqo(cfg: RunConfig) -> dict:
    spec = _periodic(cfg.args.spec)
    return {"report": tqo_report(spec, cap=cfg.args.cap).to_json()}


def cmd_monopole_scan(cfg: RunConfig) -> dict:
    radii = range(0, cfg.args.max_radius + 1)
    entries = monopole_weight_scan(radii, cap=cfg.args.cap)
    lows = [e.lower for e in entries]
    return {
        "entries": [e.to_json() for e in entries],
        "monotone": all(x <= y for x, y in zip(lows, lows[1:])),
    }


def cmd_sweep(cfg: RunConfig) -> dict:
    specs = [s for s in cfg.args.specs.split(";") if s.strip()]
    if not specs:
        raise UsageError("--specs is empty")
    rows = []
    ok = True
    for text in specs:
        spec = _periodic(text)
        rep = logical_count(spec)
        row = {"spec": spec.spec_string, "n": rep.n, "rank": rep.rank, "k": rep.k, "expected_k": rep.expected_k, "ok": rep.ok}
        if cfg.args.minus_identity:
            mi = check_no_minus_identity(spec, random_samples=cfg.args.samples, seed=cfg.seed)
            row["minus_identity_found"] = mi.minus_identity_found
            row["ok"] = row["ok"] and mi.ok
        ok = ok and row["ok"]
        rows.append(row)
    doc = {"results": rows, "ok": ok}
    if not ok:
        doc["diagnostic"] = "at least one spec failed"
        raise CheckFailed(doc)
    return doc


COMMANDS: Dict[str, Callable[[RunConfig], dict]] = {
    "verify-theorem1": cmd_verify_theorem1,
    "build": cmd_build,
    "syndrome": cmd_syndrome,
    "charges": cmd_charges,
    "decompose": cmd_decompose,
    "solve": cmd_solve,
    "distance": cmd_distance,
    "tqo": cmd_tqo,
    "monopole-scan": cmd_monopole_scan,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for randomized steps")
    common.add_argument("--no-timing", action="store_true", help="omit the timing block")

    p = argparse.ArgumentParser(prog="fcc-stab", description="Six-body FCC stabilizer code toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-theorem1", parents=[common], help="count logical qubits and check -I is absent")
    s.add_argument("--spec", required=True)
    s.add_argument("--samples", type=int, default=100, help="random dependencies to phase-check")

    s = sub.add_parser("build", parents=[common], help="construct an operator and its syndrome")
    s.add_argument("--kind", required=True, choices=["rigid", "flexible", "tetra", "membrane", "half-membrane", "logical"])
    s.add_argument("--spec", help="context: px,py,pz or window:a..b,c..d,e..f")
    s.add_argument("--params", help='JSON object or "key=value;key=value"')

    s = sub.add_parser("syndrome", parents=[common], help="syndrome of an operator JSON")
    s.add_argument("--operator", required=True, help='path or "-" for stdin')

    for name, helptext in (
        ("charges", "charge table and dot diagram"),
        ("decompose", "split a syndrome into dipoles and quadrupoles"),
        ("solve", "find a window Pauli with a given syndrome"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--syndrome", required=True, help='path or "-" for stdin')
        s.add_argument("--spec", help="override the context stored in the file")
        if name == "charges":
            s.add_argument("--format", choices=["json", "text"], default="json")

    s = sub.add_parser("distance", parents=[common], help="code distance bounds")
    s.add_argument("--spec", required=True)
    s.add_argument("--mode", choices=["exact", "heuristic", "subsystem"], default="exact")
    s.add_argument("--cap", type=int, default=4, help="weight cap of the exhaustive search")
    s.add_argument("--trials", type=int, default=4, help="randomized restarts")
    s.add_argument("--perms", type=int, default=64, help="permutations per restart")
    s.add_argument("--max-nodes", type=int, default=5_000_000)
    s.add_argument("--threads", type=int, default=None, help="defaults to FCC_STAB_THREADS or 1")

    s = sub.add_parser("tqo", parents=[common], help="cleaning sweep and distance verdict")
    s.add_argument("--spec", required=True)
    s.add_argument("--cap", type=int, default=3)

    s = sub.add_parser("monopole-scan", parents=[common], help="minimum weight for an isolated monopole")
    s.add_argument("--max-radius", type=int, default=2)
    s.add_argument("--cap", type=int, default=5)

    s = sub.add_parser("sweep", parents=[common], help="logical-qubit count over many specs")
    s.add_argument("--specs", required=True, help='e.g. "1,1,1;2,2,2;3,5,7"')
    s.add_argument("--minus-identity", action="store_true")
    s.add_argument("--samples", type=int, default=0)
    return p


def _emit(doc: dict, cfg: RunConfig, text: Optional[str] = None) -> None:
    body = text if text is not None else json.dumps(doc, sort_keys=True, indent=2)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(body + "\n")
    else:
        sys.stdout.write(body + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(args.command, args, args.output, not args.no_timing, args.seed)
    if not 0 <= cfg.seed < 2**64:
        parser.print_usage(sys.stderr)
        sys.stderr.write("error: --seed must fit in 64 bits\n")
        return 2
    start = time.perf_counter()
    status = 0
    try:
        body = COMMANDS[args.command](cfg)
    except CheckFailed as exc:
        body, status = exc.doc, 1
    except (UsageError, FccStabError, ValueError) as exc:
        sys.stderr.write(f"fcc-stab {args.command}: error: {exc}\n")
        return 2
    doc = {"schema": SCHEMA, "command": args.command, **body}
    if cfg.timing:
        doc["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    if status:
        sys.stderr.write(f"fcc-stab {args.command}: {doc.get('diagnostic', 'check failed')}\n")
    text = None
    if args.command == "charges" and getattr(args, "format", "json") == "text":
        text = body["diagram"]
    _emit(doc, cfg, text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
