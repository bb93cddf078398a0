"""Words in the generators ``M, N, G`` and their matrices.

Uppercase letters are generators and lowercase their inverses.  With
``p = (P, S, L)``::

    M = [[1, 1], [0, 1]]        N = [[1, L], [0, 1]]
    G = [[P*S*i, i/S], [S*i, 0]]   g = [[0, -i/S], [-S*i, P*S*i]]

Products are formed as a strict left fold, letter by letter, with no free
reduction.  Both a rigorous jet path and a plain complex path are provided.
"""

import re
from typing import NamedTuple

from .boxes import ParamJets
from .jets import (
    Jet,
    ONE,
    ZERO,
    jet_add,
    jet_mul,
    jet_mul_i,
    jet_neg,
    jet_recip,
    jet_sub,
)

ALPHABET = "mnMNgG"
MAX_WORD_LENGTH = 64

_WORD_RE = re.compile(r"[mnMNgG]*")


class MalformedWordError(ValueError):
    def __init__(self, text: str, index: int):
        self.index = index
        super().__init__(f"malformed word {text!r}: bad character at index {index}")


def parse_word(text: str) -> str:
    m = _WORD_RE.match(text)
    if m.end() != len(text):
        raise MalformedWordError(text, m.end())
    return text


def g_length(word: str) -> int:
    return word.count("g") + word.count("G")


def inverse_word(word: str) -> str:
    return word[::-1].swapcase()


class SL2Jet(NamedTuple):
    a: Jet
    b: Jet
    c: Jet
    d: Jet


class SL2Point(NamedTuple):
    a: complex
    b: complex
    c: complex
    d: complex


IDENTITY_JET = SL2Jet(ONE, ZERO, ZERO, ONE)
IDENTITY_POINT = SL2Point(1 + 0j, 0j, 0j, 1 + 0j)


class _JetGens(NamedTuple):
    psi: Jet  # P*S*i
    si: Jet  # S*i
    i_over_s: Jet  # i/S
    L: Jet


def _jet_gens(params: ParamJets) -> _JetGens:
    P, S, L = params
    si = jet_mul_i(S)
    return _JetGens(jet_mul(P, si), si, jet_mul_i(jet_recip(S)), L)


def generator_matrix(letter: str, params):
    """Matrix of a single letter; jet path for :class:`ParamJets`, else point."""
    if isinstance(params, ParamJets):
        return _apply_jet(IDENTITY_JET, letter, _jet_gens(params))
    return _apply_point(IDENTITY_POINT, letter, _point_gens(*params))


def _apply_jet(W: SL2Jet, letter: str, gens: _JetGens) -> SL2Jet:
    a, b, c, d = W
    if letter == "M":
        return SL2Jet(a, jet_add(a, b), c, jet_add(c, d))
    if letter == "m":
        return SL2Jet(a, jet_sub(b, a), c, jet_sub(d, c))
    if letter == "N":
        L = gens.L
        return SL2Jet(a, jet_add(jet_mul(a, L), b), c, jet_add(jet_mul(c, L), d))
    if letter == "n":
        L = gens.L
        return SL2Jet(a, jet_sub(b, jet_mul(a, L)), c, jet_sub(d, jet_mul(c, L)))
    if letter == "G":
        psi, si, ios = gens.psi, gens.si, gens.i_over_s
        return SL2Jet(
            jet_add(jet_mul(a, psi), jet_mul(b, si)),
            jet_mul(a, ios),
            jet_add(jet_mul(c, psi), jet_mul(d, si)),
            jet_mul(c, ios),
        )
    if letter == "g":
        psi, si, ios = gens.psi, gens.si, gens.i_over_s
        return SL2Jet(
            jet_neg(jet_mul(b, si)),
            jet_sub(jet_mul(b, psi), jet_mul(a, ios)),
            jet_neg(jet_mul(d, si)),
            jet_sub(jet_mul(d, psi), jet_mul(c, ios)),
        )
    raise MalformedWordError(letter, 0)


class _PointGens(NamedTuple):
    psi: complex
    si: complex
    i_over_s: complex
    L: complex


def _point_gens(P: complex, S: complex, L: complex) -> _PointGens:
    if S == 0:
        raise ZeroDivisionError("S must be nonzero")
    si = S * 1j
    inv = 1 / S
    return _PointGens(P * si, si, complex(-inv.imag, inv.real), L)


def _apply_point(W: SL2Point, letter: str, gens: _PointGens) -> SL2Point:
    a, b, c, d = W
    if letter == "M":
        return SL2Point(a, a + b, c, c + d)
    if letter == "m":
        return SL2Point(a, b - a, c, d - c)
    if letter == "N":
        return SL2Point(a, a * gens.L + b, c, c * gens.L + d)
    if letter == "n":
        return SL2Point(a, b - a * gens.L, c, d - c * gens.L)
    if letter == "G":
        return SL2Point(
            a * gens.psi + b * gens.si, a * gens.i_over_s,
            c * gens.psi + d * gens.si, c * gens.i_over_s,
        )
    if letter == "g":
        return SL2Point(
            -(b * gens.si), b * gens.psi - a * gens.i_over_s,
            -(d * gens.si), d * gens.psi - c * gens.i_over_s,
        )
    raise MalformedWordError(letter, 0)


def evaluate_word_jet(word: str, params: ParamJets, gens: _JetGens | None = None) -> SL2Jet:
    """Rigorous evaluation over a box.  Raises :class:`~bicusp.jets.JetError`."""
    _check_length(word)
    if gens is None:
        gens = _jet_gens(params) if _needs_g(word) else _JetGens(ZERO, ZERO, ZERO, params.L)
    W = IDENTITY_JET
    for letter in word:
        W = _apply_jet(W, letter, gens)
    return W


def evaluate_word_point(word: str, P: complex, S: complex, L: complex) -> SL2Point:
    _check_length(word)
    gens = _point_gens(complex(P), complex(S), complex(L))
    W = IDENTITY_POINT
    for letter in word:
        W = _apply_point(W, letter, gens)
    return W


def evaluate_word(word: str, params):
    """Left-fold product of the letter matrices.

    ``params`` is either :class:`ParamJets` (rigorous) or a ``(P, S, L)`` triple.
    """
    word = parse_word(word)
    if isinstance(params, ParamJets):
        return evaluate_word_jet(word, params)
    return evaluate_word_point(word, *params)


def _needs_g(word: str) -> bool:
    return "g" in word or "G" in word


def _check_length(word: str):
    if len(word) > MAX_WORD_LENGTH:
        raise ValueError(f"word longer than {MAX_WORD_LENGTH} letters")


def jet_generators(params: ParamJets) -> _JetGens:
    """Precomputed generator entries, shareable across words on one box."""
    return _jet_gens(params)
