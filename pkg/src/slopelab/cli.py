"""Command-line front end.

Every command prints a JSON object with sorted keys.  Exact rationals are
written as ``"p/q"`` next to a ``<key>_decimal`` field with 17 significant
digits.  Exit codes: 0 success, 1 bad input, 2 numerical failure, 3 violated
internal identity.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InputError, SlopelabError
from .rational import format_rational, parse_rational, rational_fields

COMMANDS = (
    "graph-check",
    "graph-invariants",
    "graph-jump",
    "graph-classify",
    "lattice-moment",
    "theta-i",
    "theta-l2",
    "theta-scan",
    "corpus",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _load_json(source: str):
    """Parse JSON from a file path, or from the argument itself."""
    path = Path(source)
    try:
        if path.is_file():
            return json.loads(path.read_text())
        if not source.lstrip().startswith(("[", "{")):
            raise InputError(f"no such file: {source}")
        return json.loads(source)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {source!r}: {exc}") from exc


def _rationals(out: dict, name: str, x: Fraction) -> None:
    out.update(rational_fields(name, x))


def _rational_map(d: dict) -> dict:
    out: dict = {}
    for k, v in d.items():
        _rationals(out, str(k), v)
    return out


def _load_graph(path: str, lengths: str | None = None):
    from .graph import validate

    g = validate(_load_json(path))
    if lengths:
        raw = _load_json(lengths)
        if not isinstance(raw, dict):
            raise InputError("lengths must be a JSON object mapping edge id to length")
        unknown = set(raw) - set(g.edge_by_id)
        if unknown:
            raise InputError(f"lengths for unknown edges: {sorted(unknown)}")
        g = g.with_lengths({k: parse_rational(v) for k, v in raw.items()})
    return g


def _matrix(raw) -> list[list[Fraction]]:
    rows = raw["entries"] if isinstance(raw, dict) else raw
    if isinstance(raw, dict) and "dim" in raw and int(raw["dim"]) != len(rows):
        raise InputError("dim does not match entries")
    return [[parse_rational(x) for x in row] for row in rows]


def _complex_matrix(raw) -> np.ndarray:
    """``{"re": [[...]], "im": [[...]]}`` or a matrix of ``{re, im}`` cells."""
    try:
        if isinstance(raw, dict):
            im = np.array(raw["im"], dtype=float)
            re = np.array(raw.get("re", np.zeros_like(im)), dtype=float)
            return np.atleast_2d(re + 1j * im)
        return np.atleast_2d(
            np.array([[complex(c.get("re", 0.0), c.get("im", 0.0)) for c in row] for row in raw])
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed period matrix: {exc}") from exc


# commands ----------------------------------------------------------------------


def cmd_graph_check(args) -> dict:
    from .graph import edge_profile, is_two_connected

    g = _load_graph(args.graph, args.lengths)
    prof = edge_profile(g)
    out = {
        "genus": g.genus,
        "b1": g.b1,
        "canonical_divisor": g.canonical_divisor,
        "stable": g.is_stable,
        "two_connected": is_two_connected(g),
        "blocks": [
            {"kind": b.kind, "edges": list(b.edge_ids), "genera": b.graph.q} for b in g.blocks.blocks
        ],
        "bridges": sorted(g.bridges),
        "deltaH": _rational_map(prof.deltaH),
    }
    _rationals(out, "delta", prof.delta)
    _rationals(out, "delta0", prof.delta0)
    return out


def cmd_graph_invariants(args) -> dict:
    from .invariants import report

    g = _load_graph(args.graph, args.lengths)
    rep = report(g)
    out = {
        "genus": rep.genus,
        "deltaH": _rational_map(rep.deltaH),
        "identities": rep.identities,
        "vanishing": rep.vanishing,
        "lambda": {},
    }
    for name in ("delta", "delta0", "phi", "epsilon", "slope", "tau"):
        _rationals(out, name, getattr(rep, name))
    _rationals(out, "jac_moment", rep.jac_moment)
    _rationals(out["lambda"], "pipelineA", rep.lambda_A)
    _rationals(out["lambda"], "pipelineB", rep.lambda_B)
    return out


def cmd_graph_jump(args) -> dict:
    from .jump import jump_crosscheck

    g = _load_graph(args.graph, args.lengths)
    rep = jump_crosscheck(g)
    out = {"branch_lambdas": _rational_map(rep.branch_lambdas), "class": rep.vanishing}
    _rationals(out, "jump", rep.jump)
    _rationals(out, "lambda", rep.lam)
    _rationals(out, "residual", rep.residual)
    return out


def cmd_graph_classify(args) -> dict:
    from .invariants import slope
    from .jump import classify_vanishing

    g = _load_graph(args.graph, args.lengths)
    out = {"class": classify_vanishing(g)}
    _rationals(out, "slope", slope(g))
    return out


def cmd_lattice_moment(args) -> dict:
    from .tropical import GramLattice, moment, voronoi_cell

    lat = GramLattice.of(_matrix(_load_json(args.matrix)))
    cell = voronoi_cell(lat)
    out = {
        "dim": lat.dim,
        "relevant_vectors": [list(v) for v in cell.relevant],
        "vertices": [[format_rational(x) for x in v] for v in cell.vertices],
        "simplices": len(cell.simplices),
    }
    _rationals(out, "I", moment(lat))
    _rationals(out, "volume", cell.volume)
    return out


def _mc(args):
    from .theta import MCConfig

    return MCConfig(samples=args.samples, seed=args.seed)


def cmd_theta_i(args) -> dict:
    from .theta import i_invariant

    omega = _complex_matrix(_load_json(args.omega))
    est = i_invariant(omega, _mc(args), tol=args.tol)
    return {"I": est.value, "sigma": est.sigma, "samples": est.samples, "g": int(omega.shape[0])}


def cmd_theta_l2(args) -> dict:
    from .theta import l2_norm_check

    omega = _complex_matrix(_load_json(args.omega))
    g = int(omega.shape[0])
    est = l2_norm_check(omega, _mc(args), tol=args.tol)
    return {
        "estimate": est.value,
        "sigma": est.sigma,
        "samples": est.samples,
        "expected": 2.0 ** (-g / 2),
        "g": g,
    }


def _schedule(text: str | None):
    from .theta import DEFAULT_SCHEDULE

    if not text:
        return DEFAULT_SCHEDULE
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad schedule {text!r}") from exc
    if not vals or any(not 0 < v for v in vals):
        raise InputError("schedule values must be positive")
    return tuple(vals)


def cmd_theta_scan(args) -> dict:
    from .theta import PeriodFamily, degeneration_scan, limit_constant, log_det_growth

    fam = PeriodFamily.from_dict(_load_json(args.family))
    mc = _mc(args)
    scan = degeneration_scan(fam, _schedule(args.schedule), mc, tol=args.tol)
    lc = limit_constant(fam, mc, tol=args.tol)
    growth = log_det_growth(fam)
    rows = [
        {
            "t": {"re": r.t.real, "im": r.t.imag},
            "two_I": r.two_i,
            "sigma": r.sigma,
            "moment_log_t": r.moment_log_t,
            "half_logdet": r.half_logdet,
            "h": r.h,
        }
        for r in scan.rows
    ]
    if args.tsv:
        lines = ["# t\ttwo_I\tsigma\tmoment_log_t\thalf_logdet\th"]
        for r in scan.rows:
            lines.append(f"{abs(r.t):.6e}\t{r.two_i:.12g}\t{r.sigma:.3g}\t{r.moment_log_t:.12g}\t{r.half_logdet:.12g}\t{r.h:.12g}")
        Path(args.tsv).write_text("\n".join(lines) + "\n")
    return {
        "rows": rows,
        "limit": scan.limit,
        "limit_error": scan.error,
        "limit_constant": lc.value,
        "limit_constant_sigma": lc.sigma,
        "limit_constant_parts": lc.parts,
        "growth_exponent": growth.exponent,
        "toric_rank": fam.r,
    }


def cmd_corpus(args) -> dict:
    from .corpus import run_corpus

    threads = int(os.environ.get("SLOPELAB_THREADS", "1") or 1)
    res = run_corpus(args.seed, args.count, threads=threads)
    if not res["ok"]:
        res["exit"] = 3
    return res


# parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="slopelab",
        description="Invariants of polarized weighted graphs, tropical moments and theta numerics.",
        epilog="Environment: SLOPELAB_THREADS caps the number of worker processes of `corpus`. "
        "Exit codes: 1 input error, 2 numerical failure, 3 identity violation.",
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="write the JSON report to this file instead of stdout")

    for name, helptext in (
        ("graph-check", "validate a graph and show its structure"),
        ("graph-invariants", "all invariants with both lambda pipelines"),
        ("graph-jump", "height jump with the contraction cross-check"),
        ("graph-classify", "vanishing class of the slope"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("graph", help="graph JSON file or literal")
        sp.add_argument("--lengths", help="JSON object of edge lengths overriding the graph's")
        common(sp)

    sp = sub.add_parser("lattice-moment", help="exact tropical moment of a Gram matrix")
    sp.add_argument("matrix", help='matrix JSON, e.g. [["2","1"],["1","2"]] or {"dim":..,"entries":..}')
    common(sp)

    for name, helptext in (("theta-i", "Monte Carlo I-invariant"), ("theta-l2", "L2 normalisation check")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("omega", help='period matrix JSON {"re": [[..]], "im": [[..]]}')
        sp.add_argument("--samples", type=int, default=100_000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-12, help="theta truncation tolerance")
        common(sp)

    sp = sub.add_parser("theta-scan", help="degeneration scan of a period family")
    sp.add_argument("--family", required=True, help="period family JSON")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--schedule", help="comma-separated |t| values, default 1e-2,...,1e-8")
    sp.add_argument("--tsv", help="also write the table as TSV to this path")
    common(sp)

    sp = sub.add_parser("corpus", help="run all identities on a random corpus")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--count", type=int, default=200)
    common(sp)
    return p


HANDLERS = {
    "graph-check": cmd_graph_check,
    "graph-invariants": cmd_graph_invariants,
    "graph-jump": cmd_graph_jump,
    "graph-classify": cmd_graph_classify,
    "lattice-moment": cmd_lattice_moment,
    "theta-i": cmd_theta_i,
    "theta-l2": cmd_theta_l2,
    "theta-scan": cmd_theta_scan,
    "corpus": cmd_corpus,
}


def _normalize(argv: list[str]) -> list[str]:
    # accept "graph jump" as well as "graph-jump"
    if len(argv) >= 2 and f"{argv[0]}-{argv[1]}" in COMMANDS:
        return [f"{argv[0]}-{argv[1]}"] + argv[2:]
    return argv


def _default(o):
    if isinstance(o, Fraction):
        return format_rational(o)
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default, allow_nan=False)


def run(argv: list[str] | None = None) -> int:
    argv = _normalize(list(sys.argv[1:] if argv is None else argv))
    if not argv:
        build_parser().print_help(sys.stderr)
        return 1
    if argv[0] in ("-h", "--help"):
        build_parser().print_help()
        return 0
    try:
        args = build_parser().parse_args(argv)
        result = HANDLERS[args.command](args)
        code = int(result.pop("exit", 0)) if isinstance(result, dict) else 0
        text = dumps(result)
        if args.out:
            Path(args.out).write_text(text + "\n")
        else:
            print(text)
        return code
    except SlopelabError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True), file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        # non-finite floats and similar input problems
        print(json.dumps({"error": "ValueError", "message": str(exc)}, sort_keys=True), file=sys.stderr)
        return 1 if not isinstance(exc, ArithmeticError) else 2


def main() -> None:
    sys.exit(run())
