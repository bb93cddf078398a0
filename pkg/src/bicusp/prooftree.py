"""Proof certificates: parsing, serialization, verification and search.

A certificate is an ASCII file of LF-terminated lines listing a complete
binary tree in preorder.  ``X`` marks an internal node (split the current
box along its next dimension); every other line is a leaf label::

    B<k>  (k = 0, 2..6)   B1a .. B1d   K<word>   N<word>   V<word>,<word>   H

An optional first line ``boxcode <bits>`` sets the root box (default: the
full root box).
"""

import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .boxes import MAX_DEPTH, box_from_code, children, parse_boxcode
from .candidates import rank_words
from .conditions import (
    MAIN,
    BoxContext,
    Boundary,
    Hole,
    Killer,
    Mode,
    Necklace,
    Variety,
    certify,
    certify_boundary,
    certify_killer,
    certify_necklace,
    certify_variety,
    pair_whitelist,
    relator_pairs,
)
from .words import MAX_WORD_LENGTH, MalformedWordError, g_length, parse_word


class Split:
    """The internal-node marker; there is a single instance, :data:`SPLIT`."""

    __slots__ = ()

    def __repr__(self):
        return "SPLIT"

    def __str__(self):
        return "X"

    def __reduce__(self):
        return "SPLIT"


SPLIT = Split()


class TreeFormatError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


@dataclass(frozen=True)
class ProofTree:
    nodes: tuple  # preorder sequence of SPLIT and terminal conditions
    root: str = ""

    def leaves(self, root: str | None = None):
        """Yield ``(boxcode, condition)`` for each leaf, in preorder."""
        code = self.root if root is None else root
        stack = [code]
        for node in self.nodes:
            here = stack.pop()
            if node is SPLIT:
                lo, hi = children(here)
                stack.append(hi)
                stack.append(lo)
            else:
                yield here, node


# ------------------------------------------------------------------ parsing

_BOUNDARY_RE = re.compile(r"B(?:([02-6])|1([a-d]))\Z")
_HEADER_RE = re.compile(r"boxcode ([01]+)\Z")


def _word(text: str, lineno: int) -> str:
    if not text:
        raise TreeFormatError(lineno, "empty word")
    if len(text) > MAX_WORD_LENGTH:
        raise TreeFormatError(lineno, f"word longer than {MAX_WORD_LENGTH} letters")
    try:
        return parse_word(text)
    except MalformedWordError as exc:
        raise TreeFormatError(lineno, str(exc)) from None


def parse_label(text: str, lineno: int = 1):
    """Parse one node line (without its newline)."""
    if text == "X":
        return SPLIT
    if text == "H":
        return Hole()
    m = _BOUNDARY_RE.match(text)
    if m:
        if m.group(1) is not None:
            return Boundary(int(m.group(1)))
        return Boundary(1, m.group(2))
    tag, rest = text[:1], text[1:]
    if tag == "K":
        return Killer(_word(rest, lineno))
    if tag == "N":
        return Necklace(_word(rest, lineno))
    if tag == "V":
        parts = rest.split(",")
        if len(parts) != 2:
            raise TreeFormatError(lineno, "variety leaf needs exactly two words")
        return Variety(_word(parts[0], lineno), _word(parts[1], lineno))
    raise TreeFormatError(lineno, f"malformed node label {text!r}")


def parse_tree(data) -> ProofTree:
    """Parse certificate bytes (or text); raise :class:`TreeFormatError` on any defect."""
    if isinstance(data, (bytes, bytearray)):
        try:
            text = bytes(data).decode("ascii")
        except UnicodeDecodeError as exc:
            prefix = bytes(data)[: exc.start]
            raise TreeFormatError(prefix.count(b"\n") + 1, "non-ASCII byte") from None
    else:
        text = data
    if not text:
        raise TreeFormatError(1, "empty certificate")
    if not text.endswith("\n"):
        raise TreeFormatError(text.count("\n") + 1, "missing final newline")
    lines = text[:-1].split("\n")
    root = ""
    start = 0
    if lines[0].startswith("boxcode"):
        m = _HEADER_RE.match(lines[0])
        if not m:
            raise TreeFormatError(1, "malformed boxcode header")
        root = m.group(1)
        if len(root) > MAX_DEPTH:
            raise TreeFormatError(1, f"boxcode deeper than {MAX_DEPTH}")
        start = 1
    nodes = []
    open_slots = 1
    for idx in range(start, len(lines)):
        lineno = idx + 1
        if open_slots == 0:
            raise TreeFormatError(lineno, "trailing data after complete tree")
        node = parse_label(lines[idx], lineno)
        nodes.append(node)
        open_slots += 1 if node is SPLIT else -1
    if open_slots:
        raise TreeFormatError(len(lines) + 1, "incomplete tree")
    return ProofTree(tuple(nodes), root)


def serialize_tree(tree: ProofTree) -> bytes:
    lines = [f"boxcode {tree.root}"] if tree.root else []
    lines.extend(str(node) for node in tree.nodes)
    return ("\n".join(lines) + "\n").encode("ascii")


def leaf_count(tree: ProofTree) -> int:
    return sum(1 for n in tree.nodes if n is not SPLIT)


# ------------------------------------------------------------- verification


@dataclass
class VerifyReport:
    leaf_count: int = 0
    hole_count: int = 0
    tallies: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)  # (boxcode, label, reason)
    min_necklace: int | None = None
    max_necklace: int | None = None
    allow_holes: bool = False

    @property
    def status(self) -> str:
        if self.failures:
            return "fail"
        if self.hole_count:
            return "pass-with-holes" if self.allow_holes else "fail"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def merge(self, other: "VerifyReport") -> "VerifyReport":
        mins = [v for v in (self.min_necklace, other.min_necklace) if v is not None]
        maxs = [v for v in (self.max_necklace, other.max_necklace) if v is not None]
        return VerifyReport(
            self.leaf_count + other.leaf_count,
            self.hole_count + other.hole_count,
            self.tallies + other.tallies,
            sorted(self.failures + other.failures),
            min(mins) if mins else None,
            max(maxs) if maxs else None,
            self.allow_holes,
        )

    def render(self) -> str:
        out = [f"status: {self.status}", f"leaves: {self.leaf_count}", f"holes: {self.hole_count}"]
        for key in sorted(self.tallies):
            out.append(f"  {key}: {self.tallies[key]}")
        if self.min_necklace is not None:
            out.append(f"necklace g-length: {self.min_necklace}..{self.max_necklace}")
        out.append(f"failures: {len(self.failures)}")
        for code, label, reason in self.failures:
            out.append(f"FAIL {code or '(root)'} {label}: {reason}")
        return "\n".join(out)


def _tally_key(cond) -> str:
    return str(cond) if isinstance(cond, (Boundary, Hole)) else str(cond)[0]


def _reduced(word: str) -> bool:
    return all(x != y.swapcase() for x, y in zip(word, word[1:]))


def _canonical_problem(ctx: BoxContext, cond, mode: Mode) -> str | None:
    """Reasons a certified leaf is still rejected as non-canonical.

    Canonical certificates name the first condition that the search priority
    would pick, so alternative labels for an already certified box (another
    boundary index, a killer relabelled as a necklace, a word padded with
    outer translations) do not verify.
    """
    if isinstance(cond, Boundary):
        for k, sub in BOUNDARY_ORDER:
            if (k, sub) == (cond.k, cond.sub):
                return None
            if certify_boundary(ctx.box, k, mode, sub).ok:
                return f"B{k}{sub} also certifies and takes priority"
        return None
    if isinstance(cond, (Killer, Necklace)):
        w = cond.word
        if w[0] not in "gG" or w[-1] not in "gG":
            return "word must begin and end with g or G"
        if not _reduced(w):
            return "word is not freely reduced"
        if isinstance(cond, Necklace) and certify_killer(ctx, w).ok:
            return "word is a killer on this box; label it K"
    return None


@lru_cache(maxsize=1 << 16)
def check_leaf(code: str, cond, mode: Mode = MAIN, whitelist=None):
    """Return ``(status, reason)`` for a single leaf; status is 'ok', 'hole' or 'fail'.

    Pure in its arguments, so results are memoized.
    """
    if isinstance(cond, Hole):
        return "hole", "hole"
    if len(code) > MAX_DEPTH:
        return "fail", f"box depth {len(code)} exceeds {MAX_DEPTH}"
    if isinstance(cond, Variety) and mode.variety_allowed:
        wl = pair_whitelist() if whitelist is None else whitelist
        if frozenset((cond.r1, cond.r2)) not in wl:
            return "fail", f"pair ({cond.r1}, {cond.r2}) is not in the relator-pair whitelist"
    ctx = BoxContext(box_from_code(code))
    res = certify(ctx, cond, mode)
    if not res.ok:
        return "fail", f"{res.status.value}: {res.witness}"
    problem = _canonical_problem(ctx, cond, mode)
    if problem:
        return "fail", f"non-canonical: {problem}"
    return "ok", res.witness


def _check_chunk(args):
    tasks, mode, whitelist = args
    return [check_leaf(code, cond, mode, whitelist) for code, cond in tasks]


def _chunks(seq, n):
    size = max(1, -(-len(seq) // n))
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def verify_tree(tree: ProofTree, root: str | None = None, mode: Mode = MAIN,
                allow_holes: bool = False, whitelist=None, jobs: int = 1) -> VerifyReport:
    """Check every leaf of ``tree`` over its box.

    ``root`` overrides the tree's own header.  Failures are collected, never
    raised.  The report does not depend on ``jobs``.
    """
    root = tree.root if root is None else parse_boxcode(root)
    tasks = list(tree.leaves(root))
    if whitelist is None and mode.variety_allowed:
        whitelist = pair_whitelist()
    if jobs > 1 and len(tasks) > 1:
        pieces = _chunks(tasks, jobs * 4)
        with ProcessPoolExecutor(jobs) as ex:
            results = [r for part in ex.map(_check_chunk, [(p, mode, whitelist) for p in pieces])
                       for r in part]
    else:
        results = _check_chunk((tasks, mode, whitelist))
    report = VerifyReport(allow_holes=allow_holes)
    for (code, cond), (status, reason) in zip(tasks, results):
        report.leaf_count += 1
        report.tallies[_tally_key(cond)] += 1
        if status == "hole":
            report.hole_count += 1
        elif status == "fail":
            report.failures.append((code, str(cond), reason))
        elif isinstance(cond, Necklace):
            n = g_length(cond.word)
            report.min_necklace = n if report.min_necklace is None else min(report.min_necklace, n)
            report.max_necklace = n if report.max_necklace is None else max(report.max_necklace, n)
    return report


# ------------------------------------------------------------------- search

BOUNDARY_ORDER = ((0, ""), (1, "a"), (1, "b"), (1, "c"), (1, "d"), (2, ""), (3, ""), (4, ""), (5, ""), (6, ""))


@dataclass(frozen=True)
class SearchConfig:
    max_depth: int = 60
    g_max: int = 7
    lattice_range: int = 3
    heuristic_top_k: int = 16
    mode: Mode = MAIN
    beam_width: int = 64

    def __post_init__(self):
        if not 0 <= self.max_depth <= MAX_DEPTH:
            raise ValueError(f"max_depth must be in 0..{MAX_DEPTH}")
        if not 1 <= self.g_max <= 7:
            raise ValueError("g_max must be in 1..7")
        if self.lattice_range < 0:
            raise ValueError("lattice_range must be nonnegative")
        if self.heuristic_top_k < 1 or self.beam_width < 1:
            raise ValueError("heuristic_top_k and beam_width must be positive")


def default_config(mode: Mode = MAIN, **overrides) -> SearchConfig:
    g_max = 7 if mode is MAIN else 3
    return SearchConfig(**{"g_max": g_max, "mode": mode, **overrides})


# Estimated bound on |c/S| above which certification is not attempted.
_HOPELESS = 2.0


def _probe_points(box):
    """The box center and the center pushed out by one halfsize along each axis."""
    pts = [box.params_at(box.center)]
    for i in range(len(box.center)):
        x = list(box.center)
        x[i] += box.halfsize[i]
        pts.append(box.params_at(x))
    return pts


def _variety_candidates(mode: Mode):
    if not mode.variety_allowed:
        return ()
    pairs = [p for rows in relator_pairs().values() for p in rows]
    return tuple(dict.fromkeys(pairs))


def find_leaf(code: str, cfg: SearchConfig):
    """The terminal condition chosen for ``code``, or ``None`` to split further."""
    box = box_from_code(code)
    for k, sub in BOUNDARY_ORDER:
        if certify_boundary(box, k, cfg.mode, sub).ok:
            return Boundary(k, sub)
    ctx = BoxContext(box)
    g_max = min(cfg.g_max, cfg.mode.necklace_glen[1])
    ranked = rank_words(_probe_points(box), g_max, cfg.lattice_range, cfg.heuristic_top_k,
                        cfg.beam_width)
    words = sorted((c.word for c in ranked if c.score < _HOPELESS), key=lambda w: (len(w), w))
    for w in words:
        if certify_killer(ctx, w).ok:
            return Killer(w)
    for r1, r2 in _variety_candidates(cfg.mode):
        if certify_variety(ctx, r1, r2, cfg.mode).ok:
            return Variety(r1, r2)
    for w in words:
        if certify_necklace(ctx, w, cfg.mode).ok:
            return Necklace(w)
    return None


def _find_chunk(args):
    codes, cfg = args
    return [find_leaf(c, cfg) for c in codes]


def search(root: str, cfg: SearchConfig | None = None, jobs: int = 1, progress=None) -> ProofTree:
    """Build a certificate for ``root`` by breadth-first subdivision.

    Boxes of one depth are processed independently (concurrently when
    ``jobs > 1``); the resulting tree is the same for every ``jobs``.
    """
    cfg = cfg or SearchConfig()
    root = parse_boxcode(root)
    decided: dict[str, object] = {}
    frontier = [root]
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        while frontier:
            if pool is not None and len(frontier) > 1:
                parts = _chunks(frontier, jobs * 4)
                found = [r for part in pool.map(_find_chunk, [(p, cfg) for p in parts]) for r in part]
            else:
                found = _find_chunk((frontier, cfg))
            nxt = []
            for code, leaf in zip(frontier, found):
                if leaf is None and len(code) >= cfg.max_depth:
                    leaf = Hole()
                if leaf is None:
                    decided[code] = SPLIT
                    nxt.extend(children(code))
                else:
                    decided[code] = leaf
            if progress:
                progress(len(frontier[0]), len(frontier), len(nxt))
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    nodes = []
    stack = [root]
    while stack:
        code = stack.pop()
        node = decided[code]
        nodes.append(node)
        if node is SPLIT:
            lo, hi = children(code)
            stack.append(hi)
            stack.append(lo)
    return ProofTree(tuple(nodes), root)
