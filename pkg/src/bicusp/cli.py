"""Command-line interface.

Exit status: 0 on success, 1 when a certificate fails to verify, 2 for any
format or usage error.
"""

import argparse
import re
import sys

from .apps import cusp_area
from .boxes import BoxcodeError, parse_boxcode
from .conditions import IDENTIFY, MAIN, MODES
from .matchings import MAX_N, enumerate_matchings, format_matching
from .prooftree import (
    TreeFormatError,
    default_config,
    leaf_count,
    parse_tree,
    search,
    serialize_tree,
    verify_tree,
)
from .words import MAX_WORD_LENGTH, MalformedWordError, evaluate_word_point, g_length, parse_word

EXIT_OK, EXIT_FAIL, EXIT_FORMAT = 0, 1, 2

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(rf"[+-]?{_NUM}\Z")
_IMAG_RE = re.compile(rf"([+-]?)({_NUM})?i\Z")
_FULL_RE = re.compile(rf"([+-]?{_NUM})([+-])({_NUM})?i\Z")


class UsageError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi`` or ``a+bi`` (signs optional, ``i`` alone means ``1i``)."""
    t = text.strip()
    if _REAL_RE.match(t):
        return complex(float(t), 0.0)
    m = _IMAG_RE.match(t)
    if m:
        im = float(m.group(2)) if m.group(2) else 1.0
        return complex(0.0, -im if m.group(1) == "-" else im)
    m = _FULL_RE.match(t)
    if m:
        im = float(m.group(3)) if m.group(3) else 1.0
        return complex(float(m.group(1)), -im if m.group(2) == "-" else im)
    raise UsageError(f"malformed complex literal {text!r}")


def parse_point(text: str) -> tuple[complex, complex, complex]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError("a point is three complex literals P,S,L")
    P, S, L = (parse_complex(p) for p in parts)
    if S == 0:
        raise UsageError("S must be nonzero")
    return P, S, L


def format_complex(z: complex) -> str:
    sign = "-" if z.imag < 0 or (z.imag == 0 and str(z.imag).startswith("-")) else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


# ----------------------------------------------------------------- commands


def _read_tree(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_tree(data)
    except TreeFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _root_for(tree, flag):
    if flag is None:
        return tree.root
    code = parse_boxcode(flag)
    if tree.root and tree.root != code:
        raise UsageError("--boxcode disagrees with the certificate's boxcode header")
    return code


def _run_verify(args, mode) -> int:
    tree = _read_tree(args.tree)
    root = _root_for(tree, args.boxcode)
    report = verify_tree(tree, root, mode, args.allow_holes, jobs=args.jobs)
    print(f"mode: {mode.name}")
    print(report.render())
    if args.figure:
        from .report import leaf_figure

        leaf_figure(tree.leaves(root), root, args.figure, f"{mode.name}: {report.status}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    return _run_verify(args, MAIN)


def cmd_identify(args) -> int:
    return _run_verify(args, IDENTIFY)


def cmd_search(args) -> int:
    root = parse_boxcode(args.boxcode)
    mode = MODES[args.mode]
    overrides = {"max_depth": args.max_depth, "lattice_range": args.lattice_range,
                 "heuristic_top_k": args.top_k, "beam_width": args.beam_width}
    if args.g_max is not None:
        overrides["g_max"] = args.g_max
    try:
        cfg = default_config(mode, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.max_depth < len(root):
        raise UsageError("--max-depth is smaller than the root boxcode length")
    tree = search(root, cfg, jobs=args.jobs)
    data = serialize_tree(tree)
    try:
        with open(args.out, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    holes = sum(1 for _, c in tree.leaves() if str(c) == "H")
    print(f"wrote {args.out}: {leaf_count(tree)} leaves, {holes} holes")
    if args.figure:
        from .report import leaf_figure

        leaf_figure(tree.leaves(), root, args.figure, f"search ({mode.name})")
    return EXIT_OK


def cmd_eval(args) -> int:
    P, S, L = parse_point(args.point)
    if args.area:
        print(f"cusp area: {cusp_area((P, S, L))!r}")
        return EXIT_OK
    try:
        word = parse_word(args.word)
    except MalformedWordError as exc:
        raise UsageError(str(exc)) from None
    if len(word) > MAX_WORD_LENGTH:
        raise UsageError(f"word longer than {MAX_WORD_LENGTH} letters")
    try:
        W = evaluate_word_point(word, P, S, L)
    except (ZeroDivisionError, OverflowError) as exc:
        raise UsageError(f"evaluation failed: {exc}") from None
    for name, z in zip("abcd", W):
        print(f"{name}: {format_complex(z)}")
    print(f"g-length: {g_length(word)}")
    return EXIT_OK


def cmd_matchings(args) -> int:
    if not 1 <= args.n <= MAX_N:
        raise UsageError(f"--n must be in 1..{MAX_N}")
    out = sys.stdout
    enumerate_matchings(args.n, lambda m: out.write(format_matching(m) + "\n"))
    out.flush()
    return EXIT_OK


# ------------------------------------------------------------------- parser


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _natural(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bicusp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_text in (
        ("verify", cmd_verify, "verify a certificate in main mode"),
        ("identify", cmd_identify, "verify a certificate in identify mode"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--tree", required=True, help="certificate file")
        p.add_argument("--boxcode", help="root boxcode (must match any header)")
        p.add_argument("--jobs", type=_positive, default=1)
        p.add_argument("--allow-holes", action="store_true")
        p.add_argument("--figure", help="write a leaf summary figure to this file")
        p.set_defaults(func=fn)

    p = sub.add_parser("search", help="build a certificate by subdivision")
    p.add_argument("--boxcode", required=True)
    p.add_argument("--mode", choices=sorted(MODES), default="main")
    p.add_argument("--max-depth", type=_natural, default=60)
    p.add_argument("--g-max", type=_positive, default=None,
                   help="maximal g-length of candidate words (default 7 main, 3 identify)")
    p.add_argument("--lattice-range", type=_natural, default=3)
    p.add_argument("--top-k", type=_positive, default=16)
    p.add_argument("--beam-width", type=_positive, default=64)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--figure")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="evaluate a word or the cusp area at a point")
    p.add_argument("--point", required=True, help="P,S,L as complex literals, e.g. i,1+i,2i")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--word")
    what.add_argument("--area", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("matchings", help="list perfect matchings on 2n points")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_matchings)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_FORMAT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, BoxcodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
