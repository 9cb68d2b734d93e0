"""Command-line front end.

Every subcommand reads a CubistSet JSON file ({"rank", "base", "removals"})
where it needs one and writes JSON (or SVG) to standard output.  Exit codes:
0 when everything checked passes, 1 when a check fails, 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .blocks import (
    BlockDescriptor,
    Partition,
    block_truncated_cartan,
    cubist_from_block,
    lambda_b_table,
    scopes_pairs,
    scopes_partner,
    phi,
    shorthand_to_partition,
)
from .cubist import Box, CubistSet, Weight2
from .flips import check_flip_cartan, flip
from .oracle import QuiverPresentation, oracle_check
from .qmatrix import c_u_brauer, c_u_local, c_v, d_u, d_v, verify_identities
from .render import svg_filename, svg_tiling
from .flips import flippable_vertices


class InputError(Exception):
    """Malformed input; reported on stderr with exit code 2."""


def _dump(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def parse_window(text: str, rank: int) -> Box:
    """'R' is the cube of radius R about the origin; 'a,b,c:d,e,f' gives the corners."""
    if ":" in text:
        lo_s, hi_s = text.split(":", 1)
        lo, hi = _ints(lo_s), _ints(hi_s)
        if len(lo) != rank or len(hi) != rank:
            raise InputError(f"window corners must have {rank} coordinates")
        return Box(lo, hi)
    try:
        radius = int(text)
    except ValueError as exc:
        raise InputError(f"cannot parse window {text!r}") from exc
    if radius < 0:
        raise InputError("window radius must be nonnegative")
    return Box.cube(rank, radius)


def load_set(path: str) -> CubistSet:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg}") from exc
    try:
        return CubistSet.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path} does not describe a Cubist set: {exc}") from exc


def _checked_set(path: str) -> CubistSet:
    s = load_set(path)
    v = s.validate()
    if not v.ok:
        raise InputError(f"invalid set: removal {v.index} {v.reason}")
    return s


def _point(text: str, rank: int) -> tuple[int, ...]:
    x = _ints(text)
    if len(x) != rank:
        raise InputError(f"point {text!r} must have {rank} coordinates")
    return x


def _block(args: argparse.Namespace) -> BlockDescriptor:
    try:
        if args.q is not None:
            return BlockDescriptor.from_gaps(args.p, _ints(args.q))
        if args.core is None:
            raise InputError("give either --core or --q")
        return BlockDescriptor.from_core(args.p, Partition.parse(args.core), args.N)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# subcommands ---------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    s = load_set(args.set)
    v = s.validate()
    print(_dump({"ok": v.ok, "index": v.index, "reason": v.reason}))
    return 0 if v.ok else 1


def cmd_matrix(args: argparse.Namespace) -> int:
    s = _checked_set(args.set)
    window = parse_window(args.window, s.rank)
    if args.kind == "du":
        m = d_u(s, window)
    elif args.kind == "dv":
        m = d_v(s, window)
    elif args.kind == "cu":
        m = c_u_brauer(s, window) if args.route == "brauer" else c_u_local(s, window)
    else:
        cutoff = args.cutoff if args.cutoff is not None else 2 * s.rank + 4
        m = c_v(s, window, cutoff)
    print(_dump(m.to_json()))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    s = _checked_set(args.set)
    window = parse_window(args.window, s.rank)
    cutoff = args.cutoff if args.cutoff is not None else 2 * s.rank + 4
    if cutoff < 2 * s.rank:
        raise InputError(f"cutoff must be at least {2 * s.rank}")
    report = verify_identities(s, window, cutoff)
    print(_dump(report.to_json()))
    return 0 if report.passed else 1


def cmd_oracle(args: argparse.Namespace) -> int:
    if args.kind == "vfull":
        if args.rank is None:
            raise InputError("--kind vfull needs --rank")
        pres = QuiverPresentation.v_full(args.rank)
        rank = args.rank
    else:
        if args.set is None:
            raise InputError(f"--kind {args.kind} needs a set file")
        s = _checked_set(args.set)
        rank = s.rank
        if args.kind == "u":
            pres = QuiverPresentation.u_of(s, signs=args.signs)
        else:
            pres = QuiverPresentation.v_of(s)
    report = oracle_check(pres, parse_window(args.window, rank), args.max_degree)
    print(_dump(report.to_json()))
    return 0 if report.passed else 1


def cmd_flip(args: argparse.Namespace) -> int:
    s = _checked_set(args.set)
    z = _point(args.at, s.rank)
    try:
        new = flip(s, z)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(_dump(new.to_json()))
    return 0


def cmd_flipcheck(args: argparse.Namespace) -> int:
    s = _checked_set(args.set)
    z = _point(args.at, s.rank)
    window = parse_window(args.window, s.rank)
    try:
        report = check_flip_cartan(s, z, window)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(_dump(report.to_json()))
    return 0 if report.passed else 1


def cmd_block(args: argparse.Namespace) -> int:
    b = _block(args)
    table = lambda_b_table(b)
    out = b.to_json()
    out["lambda_b"] = [
        {"uv": list(uv), "label": str(lab), "partition": list(shorthand_to_partition(lab, b).parts)}
        for uv, lab in sorted(table.items())
    ]
    pairs = []
    ok = True
    for sp in scopes_pairs(b):
        partner = scopes_partner(b, sp)
        other = lambda_b_table(partner)
        agrees = all(phi(sp, table[uv]) == other[uv] for uv in table)
        ok = ok and agrees
        pairs.append({"s": sp.s, "t": sp.t, "m": sp.m, "partner_q": list(partner.qs), "phi_commutes": agrees})
    out["scopes_pairs"] = pairs
    x = cubist_from_block(b)
    out["cubist_set"] = x.to_json()
    if args.set_out:
        with open(args.set_out, "w", encoding="utf-8") as fh:
            fh.write(_dump(x.to_json()) + "\n")
    print(_dump(out))
    return 0 if ok else 1


def cmd_block_cartan(args: argparse.Namespace) -> int:
    b = _block(args)
    print(_dump(block_truncated_cartan(b).to_json()))
    return 0


def _highlights(s: CubistSet, window: Box, specs: Sequence[str]) -> dict[str, list]:
    out: dict[str, list] = {}
    for spec in specs:
        if "=" in spec:
            name, pts = spec.split("=", 1)
            out[name] = [_point(p, s.rank) for p in pts.split(";") if p]
        elif spec == "flippable":
            out["flippable"] = flippable_vertices(s, window)
        elif spec == "pyramid":
            if not isinstance(s.base, Weight2):
                raise InputError("the pyramid highlight needs a weight2 base")
            out["pyramid"] = [(-u, 1 + v, 1) for u, v in sorted(s.base.pyramid)]
        else:
            raise InputError(f"unknown highlight {spec!r}; use flippable, pyramid or name=x,y,z;...")
    return out


def cmd_render(args: argparse.Namespace) -> int:
    s = _checked_set(args.set)
    if s.rank not in (2, 3):
        raise InputError("rendering supports ranks 2 and 3")
    window = parse_window(args.window, s.rank)
    svg = svg_tiling(s, window, _highlights(s, window, args.highlight or []))
    if args.out is None:
        sys.stdout.write(svg)
        return 0
    path = os.path.join(args.out, svg_filename(s, window)) if os.path.isdir(args.out) else args.out
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubistlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check that a set file describes a legal Cubist set")
    p.add_argument("set")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("matrix", help="emit a decomposition or Cartan matrix on a window")
    p.add_argument("set")
    p.add_argument("--kind", choices=["du", "dv", "cu", "cv"], required=True)
    p.add_argument("--window", required=True)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--route", choices=["local", "brauer"], default="local", help="formula used for cu")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("verify", help="run the matrix identity checks")
    p.add_argument("set")
    p.add_argument("--window", required=True)
    p.add_argument("--cutoff", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="compare brute-force path algebra dimensions with the closed forms")
    p.add_argument("set", nargs="?")
    p.add_argument("--kind", choices=["u", "v", "vfull"], required=True)
    p.add_argument("--rank", type=int, help="rank for --kind vfull")
    p.add_argument("--window", required=True)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--signs", choices=["standard", "rescaled"], default="standard")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("flip", help="flip a maximal vertex and print the new set")
    p.add_argument("set")
    p.add_argument("--at", required=True)
    p.set_defaults(func=cmd_flip)

    p = sub.add_parser("flipcheck", help="compare the predicted post-flip Cartan matrix with the flipped set")
    p.add_argument("set")
    p.add_argument("--at", required=True)
    p.add_argument("--window", required=True)
    p.set_defaults(func=cmd_flipcheck)

    for name, func, text in (
        ("block", cmd_block, "weight-2 block data: gaps, pyramid, labels, Scopes pairs, Cubist set"),
        ("block-cartan", cmd_block_cartan, "truncated Cartan matrix of the block's Cubist set"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--core")
        p.add_argument("--q", help="gap vector instead of a core")
        p.add_argument("--N", type=int, help="bead count (default: smallest multiple of p that fits)")
        if name == "block":
            p.add_argument("--set-out", help="also write the Cubist set JSON to this file")
        p.set_defaults(func=func)

    p = sub.add_parser("render", help="draw the tiling as SVG")
    p.add_argument("set")
    p.add_argument("--window", required=True)
    p.add_argument("--highlight", action="append", help="flippable, pyramid, or name=x,y,z;...")
    p.add_argument("--out", help="output file, or a directory for the default file name")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(_dump({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
