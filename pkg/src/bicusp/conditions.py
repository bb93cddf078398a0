"""Certification of terminal conditions over a box.

Each ``certify_*`` returns a :class:`CertResult`; ``CERTIFIED`` is only
reported when the relevant strict inequalities hold rigorously over the whole
box.  Pointwise disjunctions are certified one disjunct at a time.
"""

import enum
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import NamedTuple

from .boxes import Box, CornerBounds, corner_bounds, param_jets
from .jets import JetError, jet_abs_bounds, jet_div, jet_sub, ONE, jet_add
from .words import SL2Jet, evaluate_word_jet, g_length, jet_generators, parse_word


class Status(enum.Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"
    REFUTED_PRECONDITION = "refuted-precondition"


class CertResult(NamedTuple):
    status: Status
    witness: str

    @property
    def ok(self) -> bool:
        return self.status is Status.CERTIFIED


def _certified(msg):
    return CertResult(Status.CERTIFIED, msg)


def _inconclusive(msg):
    return CertResult(Status.INCONCLUSIVE, msg)


def _refuted(msg):
    return CertResult(Status.REFUTED_PRECONDITION, msg)


@dataclass(frozen=True)
class Mode:
    name: str
    area_bound: Fraction
    necklace_glen: tuple[int, int]
    variety_allowed: bool


MAIN = Mode("main", Fraction("5.24"), (1, 7), False)
IDENTIFY = Mode("identify", Fraction("3.65"), (1, 3), True)
MODES = {"main": MAIN, "identify": IDENTIFY}


# ---------------------------------------------------------------- conditions
#
# Plain tuples compare by content only, which would make Killer("g") equal to
# Necklace("g"); the labels below compare and hash by kind as well.


def _typed_eq(self, other):
    if type(self) is not type(other):
        return NotImplemented
    return tuple.__eq__(self, other)


def _typed_ne(self, other):
    eq = _typed_eq(self, other)
    return eq if eq is NotImplemented else not eq


def _typed_hash(self):
    return hash((type(self).__name__, tuple(self)))


class Boundary(NamedTuple):
    __eq__ = _typed_eq
    __ne__ = _typed_ne
    __hash__ = _typed_hash

    k: int
    sub: str = ""  # "a".."d" only for k == 1

    def __str__(self):
        return f"B{self.k}{self.sub}"


class Killer(NamedTuple):
    __eq__ = _typed_eq
    __ne__ = _typed_ne
    __hash__ = _typed_hash

    word: str

    def __str__(self):
        return f"K{self.word}"


class Necklace(NamedTuple):
    __eq__ = _typed_eq
    __ne__ = _typed_ne
    __hash__ = _typed_hash

    word: str

    def __str__(self):
        return f"N{self.word}"


class Variety(NamedTuple):
    __eq__ = _typed_eq
    __ne__ = _typed_ne
    __hash__ = _typed_hash

    r1: str
    r2: str

    def __str__(self):
        return f"V{self.r1},{self.r2}"


class Hole(NamedTuple):
    __eq__ = _typed_eq
    __ne__ = _typed_ne
    __hash__ = _typed_hash

    def __str__(self):
        return "H"


TerminalCondition = Boundary | Killer | Necklace | Variety | Hole


# ------------------------------------------------------------------ boundary

SIGN_SUBS = {
    "a": "Im S < 0",
    "b": "Im L < 0",
    "c": "Im P < 0",
    "d": "Re P < 0",
}


def _sign_violation(cb: CornerBounds, sub: str) -> tuple[bool, float]:
    sup = {"a": cb.im_s[1], "b": cb.im_l[1], "c": cb.im_p[1], "d": cb.re_p[1]}[sub]
    return sup < 0.0, sup


def certify_boundary(box: Box, k: int, mode: Mode = MAIN, sub: str = "") -> CertResult:
    """Certify that condition ``k`` of the normalized region fails on all of ``box``."""
    cb = corner_bounds(box)
    half = Fraction(1, 2)
    if k == 0:
        v = cb.abs_s_sq[1]
        if v < 1.0:
            return _certified(f"sup|S|^2 = {v!r} < 1")
        return _inconclusive(f"sup|S|^2 = {v!r} >= 1")
    if k == 1:
        if sub and sub not in SIGN_SUBS:
            return _refuted(f"unknown sign sub-condition {sub!r}")
        for s in (sub,) if sub else tuple(SIGN_SUBS):
            hit, sup = _sign_violation(cb, s)
            if hit:
                return _certified(f"B1{s}: sup = {sup!r} < 0 ({SIGN_SUBS[s]})")
        return _inconclusive("no sign condition violated box-wide")
    if sub:
        return _refuted(f"sub-condition only exists for k = 1, got B{k}{sub}")
    if k == 2:
        lo, hi = cb.re_l
        if Fraction(lo) > half:
            return _certified(f"inf Re L = {lo!r} > 1/2")
        if Fraction(hi) < -half:
            return _certified(f"sup Re L = {hi!r} < -1/2")
        return _inconclusive(f"Re L in [{lo!r}, {hi!r}]")
    if k == 3:
        v = cb.abs_l_sq[1]
        if v < 1.0:
            return _certified(f"sup|L|^2 = {v!r} < 1")
        return _inconclusive(f"sup|L|^2 = {v!r} >= 1")
    if k == 4:
        p = Fraction(cb.im_p[0])
        q = Fraction(cb.im_l[1]) / 2
        if p > q:
            return _certified(f"inf Im P = {cb.im_p[0]!r} > sup Im L / 2")
        return _inconclusive(f"inf Im P = {cb.im_p[0]!r} <= sup Im L / 2 = {float(q)!r}")
    if k == 5:
        lo = cb.re_p[0]
        if Fraction(lo) > half:
            return _certified(f"inf Re P = {lo!r} > 1/2")
        return _inconclusive(f"inf Re P = {lo!r} <= 1/2")
    if k == 6:
        lo = cb.area[0]
        if Fraction(lo) > mode.area_bound:
            return _certified(f"inf|S^2 Im L| = {lo!r} > {mode.area_bound}")
        return _inconclusive(f"inf|S^2 Im L| = {lo!r} <= {mode.area_bound}")
    return _refuted(f"no boundary condition {k}")


# ---------------------------------------------------------------- word tests


class BoxContext:
    """Per-box cache of coordinate jets, generator entries and word matrices."""

    def __init__(self, box: Box):
        self.box = box
        self.params = param_jets(box)
        self._gens = None
        self._words: dict[str, SL2Jet | JetError] = {}

    @property
    def gens(self):
        if self._gens is None:
            self._gens = jet_generators(self.params)
        return self._gens

    def matrix(self, word: str) -> SL2Jet:
        hit = self._words.get(word)
        if hit is None:
            try:
                hit = evaluate_word_jet(word, self.params, self.gens)
            except JetError as exc:
                hit = exc
            self._words[word] = hit
        if isinstance(hit, JetError):
            raise hit
        return hit


def _ctx(box) -> BoxContext:
    return box if isinstance(box, BoxContext) else BoxContext(box)


def _horoball_bound(ctx: BoxContext, W: SL2Jet) -> float:
    """Rigorous upper bound of ``|c_w / S|`` over the box."""
    return jet_abs_bounds(jet_div(W.c, ctx.params.S)).upper


def _away_from_pm_one(x) -> bool:
    minus = jet_sub(x, ONE)
    plus = jet_add(x, ONE)
    return jet_abs_bounds(minus).lower > 0.0 and jet_abs_bounds(plus).lower > 0.0


def certify_killer(box, word: str) -> CertResult:
    word = parse_word(word)
    if not word:
        return _refuted("killer word must be nonempty")
    ctx = _ctx(box)
    try:
        W = ctx.matrix(word)
        u = _horoball_bound(ctx, W)
        if not u < 1.0:
            return _inconclusive(f"sup|c/S| <= {u!r}, not < 1")
        c_lo = jet_abs_bounds(W.c).lower
        if c_lo > 0.0:
            return _certified(f"sup|c/S| <= {u!r} < 1 and inf|c| >= {c_lo!r} > 0")
        if _away_from_pm_one(W.a):
            return _certified(f"sup|c/S| <= {u!r} < 1 and a != +-1")
        if _away_from_pm_one(W.d):
            return _certified(f"sup|c/S| <= {u!r} < 1 and d != +-1")
        return _inconclusive(f"sup|c/S| <= {u!r} < 1 but no disjunct holds box-wide")
    except JetError as exc:
        return _inconclusive(str(exc))


def certify_necklace(box, word: str, mode: Mode = MAIN) -> CertResult:
    word = parse_word(word)
    lo, hi = mode.necklace_glen
    n = g_length(word)
    if not lo <= n <= hi:
        return _refuted(f"g-length {n} outside {lo}..{hi} ({mode.name} mode)")
    ctx = _ctx(box)
    try:
        u = _horoball_bound(ctx, ctx.matrix(word))
    except JetError as exc:
        return _inconclusive(str(exc))
    if u < 1.0:
        return _certified(f"sup|c/S| <= {u!r} < 1 (g-length {n})")
    return _inconclusive(f"sup|c/S| <= {u!r}, not < 1")


def certify_variety(box, r1: str, r2: str, mode: Mode = MAIN) -> CertResult:
    r1 = parse_word(r1)
    r2 = parse_word(r2)
    if not mode.variety_allowed:
        return _refuted(f"variety conditions are not allowed in {mode.name} mode")
    if not r1 or not r2:
        return _refuted("variety words must be nonempty")
    ctx = _ctx(box)
    notes = []
    try:
        for r in (r1, r2):
            W = ctx.matrix(r)
            cu = jet_abs_bounds(W.c).upper
            bu = jet_abs_bounds(W.b).upper
            if not (cu < 1.0 and bu < 1.0):
                return _inconclusive(f"{r}: sup|c| <= {cu!r}, sup|b| <= {bu!r}")
            notes.append(f"{r}: sup|c| <= {cu!r}, sup|b| <= {bu!r}")
    except JetError as exc:
        return _inconclusive(str(exc))
    return _certified("; ".join(notes))


def certify(box, cond, mode: Mode = MAIN) -> CertResult:
    """Dispatch on the condition type."""
    if isinstance(cond, Boundary):
        b = box.box if isinstance(box, BoxContext) else box
        return certify_boundary(b, cond.k, mode, cond.sub)
    if isinstance(cond, Killer):
        return certify_killer(box, cond.word)
    if isinstance(cond, Necklace):
        return certify_necklace(box, cond.word, mode)
    if isinstance(cond, Variety):
        return certify_variety(box, cond.r1, cond.r2, mode)
    if isinstance(cond, Hole):
        return _inconclusive("hole")
    raise TypeError(f"not a terminal condition: {cond!r}")


# ------------------------------------------------------------- bundled data


def relator_pairs() -> dict[str, list[tuple[str, str]]]:
    """The bundled relator-pair tables, keyed by section name."""
    text = resources.files("bicusp.data").joinpath("relator_pairs.tsv").read_text()
    sections: dict[str, list[tuple[str, str]]] = {}
    current = None
    for line in text.splitlines():
        if line.startswith("#"):
            current = line[1:].strip()
            sections[current] = []
        elif line:
            r1, r2 = line.split("\t")
            sections[current].append((parse_word(r1), parse_word(r2)))
    return sections


def pair_whitelist() -> frozenset[frozenset[str]]:
    return frozenset(
        frozenset(p) for rows in relator_pairs().values() for p in rows
    )


def whitelisted(r1: str, r2: str, whitelist=None) -> bool:
    wl = pair_whitelist() if whitelist is None else whitelist
    return frozenset((r1, r2)) in wl
