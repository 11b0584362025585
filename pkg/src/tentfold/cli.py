"""Command-line front end: ``tentfold <command> [options]``.

Exit codes: 0 success, 2 usage or parse error, 3 budget exhausted, 4 undecided.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
import tempfile
from typing import Callable, Sequence

from . import __version__
from .chains import build_chain, itinerary, itinerary_csv, scale_for_width, width_bound
from .classify import bridge_decomposition, distinguish, reduce_slope
from .composant import folding_pattern, ray_segment
from .numerics import (
    ArithmeticBudgetError,
    DEFAULT_BIT_BUDGET,
    SlopeParseError,
    format_scalar,
    parse_scalar,
    parse_slope,
)
from .symmetry import PreperiodicSlope, asymmetry_scan, select_params
from .tentmap import DomainError, NotFoundWithinBound, TentMap

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_UNDECIDED = 0, 2, 3, 4


class UsageError(Exception):
    pass


class Undecided(Exception):
    def __init__(self, doc: dict) -> None:
        super().__init__("undecided")
        self.doc = doc


def _tent(text: str, args: argparse.Namespace) -> TentMap:
    try:
        s = parse_slope(text)
    except (SlopeParseError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return TentMap(s, bit_budget=args.bit_cap)


def _require(value, name: str):
    if value is None:
        raise UsageError(f"--{name} is required for this command")
    return value


# -- commands ------------------------------------------------------------------------


def cmd_fp(args) -> dict:
    t = _tent(_require(args.slope, "slope"), args)
    count = args.count if args.count is not None else 44
    if count < 1:
        raise UsageError("--count must be >= 1")
    return folding_pattern(t, count, max_depth=args.max_depth).to_json()


def cmd_distinguish(args) -> dict:
    a = _tent(_require(args.a, "a"), args).slope
    b = _tent(_require(args.b, "b"), args).slope
    depth = args.max_depth if args.max_depth is not None else 20
    rep = distinguish(a, b, depth)
    doc = rep.to_json()
    if not rep.decided:
        raise Undecided(doc)
    return doc


def cmd_snappy(args) -> dict:
    t = _tent(_require(args.slope, "slope"), args)
    count = args.count if args.count is not None else 4
    p = args.p or 0
    seg = ray_segment(t, count - 1, p)
    return {
        "slope": format_scalar(t.slope),
        "p": p,
        "snappy": [
            {"level": pt.level, "index": pt.arc_index, "position": format_scalar(pt.position)} for pt in seg.snappy()
        ],
    }


def cmd_params(args) -> dict:
    t = _tent(_require(args.slope, "slope"), args)
    params = select_params(t, budget=args.max_depth or 200)
    doc = params.to_json()
    doc["chainScale"] = scale_for_width(t, params.epsilon)
    return doc


def cmd_renormalize(args) -> dict:
    t = _tent(_require(args.slope, "slope"), args)
    return reduce_slope(t.slope).to_json()


def cmd_bridges(args) -> dict:
    t = _tent(_require(args.slope, "slope"), args)
    q = args.p or 0
    depth = args.max_depth if args.max_depth is not None else 4
    dec = bridge_decomposition(t, q, depth + q)
    return {
        "slope": format_scalar(t.slope),
        "q": q,
        "depth": depth + q,
        "bridges": [
            {
                "left": format_scalar(b.left.position),
                "right": format_scalar(b.right.position),
                "interior": list(b.interior),
            }
            for b in dec.bridges
        ],
    }


def cmd_chain(args) -> dict | str:
    t = _tent(_require(args.slope, "slope"), args)
    p = args.p or 0
    if args.format == "csv":
        depth = args.max_depth if args.max_depth is not None else 1
        return itinerary_csv(itinerary(ray_segment(t, depth, p), p))
    chain = build_chain(t, p)
    return {
        "slope": format_scalar(t.slope),
        "p": p,
        "links": [[format_scalar(a), format_scalar(b)] for a, b in chain.links],
        "width": format_scalar(chain.width),
        "widthBound": format_scalar(width_bound(t, p)),
    }


def cmd_scan(args) -> dict | str:
    t = _tent(_require(args.slope, "slope"), args)
    params = select_params(t)
    rep = asymmetry_scan(t, params, args.n_max, args.grid)
    if args.format == "csv":
        lines = ["a,b,n,maxAsymmetry,pass,kind"]
        for c in rep.cases:
            lines.append(
                f"{format_scalar(c.H[0])},{format_scalar(c.H[1])},{c.n},{format_scalar(c.max_asymmetry)},"
                f"{str(c.passed).lower()},{c.kind}"
            )
        return "\n".join(lines) + "\n"
    return rep.to_json()


COMMANDS: dict[str, Callable] = {
    "fp": cmd_fp,
    "distinguish": cmd_distinguish,
    "scan": cmd_scan,
    "chain": cmd_chain,
    "snappy": cmd_snappy,
    "params": cmd_params,
    "renormalize": cmd_renormalize,
    "bridges": cmd_bridges,
}


# -- output ----------------------------------------------------------------------------


def _approx(doc):
    """Attach decimal readings next to exact string fields."""
    if isinstance(doc, dict):
        out = {k: _approx(v) for k, v in doc.items()}
        extra = {}
        for k, v in doc.items():
            if isinstance(v, str):
                try:
                    x = parse_scalar(v)
                except (ValueError, ZeroDivisionError):
                    continue
                extra[k] = repr(float(x))
        if extra:
            out["approx"] = extra
        return out
    if isinstance(doc, list):
        return [_approx(v) for v in doc]
    return doc


def _render(doc, args) -> str:
    if isinstance(doc, str):
        return doc
    if args.approx:
        doc = _approx(doc)
    if not args.no_meta:
        doc = dict(doc)
        doc["meta"] = {
            "tool": "tentfold",
            "version": __version__,
            "command": args.command,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        }
    if args.format == "text":
        return "\n".join(f"{k}: {json.dumps(v)}" for k, v in doc.items()) + "\n"
    return json.dumps(doc, indent=2) + "\n"


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tentfold-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tentfold", description="Folding patterns and chains of tent-map inverse limits.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--slope", "-s")
        sp.add_argument("--a", "-a", dest="a")
        sp.add_argument("--b", "-b", dest="b")
        sp.add_argument("--count", type=int)
        sp.add_argument("--max-depth", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--n-max", type=int, default=12)
        sp.add_argument("--grid", type=int, default=32)
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        sp.add_argument("--out")
        sp.add_argument("--no-meta", action="store_true")
        sp.add_argument("--approx", action="store_true")
        sp.add_argument("--bit-cap", type=int, default=DEFAULT_BIT_BUDGET)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    code = EXIT_OK
    try:
        if args.bit_cap <= 0:
            raise UsageError("--bit-cap must be positive")
        doc = COMMANDS[args.command](args)
    except Undecided as exc:
        doc, code = exc.doc, EXIT_UNDECIDED
    except (UsageError, DomainError, PreperiodicSlope, NotFoundWithinBound) as exc:
        print(f"tentfold: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticBudgetError as exc:
        print(f"tentfold: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _write(_render(doc, args), args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
