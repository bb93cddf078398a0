"""Parameter boxes addressed by binary boxcodes.

The root box is ``|x_i| <= 2**((19 - i)/6)`` in R^6, with the embedding
``L = x3 + i x0``, ``S = x4 + i x1``, ``P = x5 + i x2``.  Bit ``t`` of a
boxcode halves dimension ``t mod 6`` (``0`` keeps the lower half).
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import nextafter
from typing import NamedTuple

from .fparith import INF, add_down, add_up, mul_down, mul_up, sub_down, sub_up
from .jets import Jet, make_jet

DIM = 6
MAX_DEPTH = 120

_CODE_RE = re.compile(r"[01]*\Z")


class BoxcodeError(ValueError):
    pass


@lru_cache(maxsize=None)
def root_halfsize_bounds(i: int) -> tuple[float, float]:
    """Floats ``(lo, hi)`` with ``lo <= 2**((19-i)/6) <= hi``, as tight as possible."""
    target = Fraction(2) ** (19 - i)
    hi = 2.0 ** ((19 - i) / 6)
    while Fraction(hi) ** 6 < target:
        hi = nextafter(hi, INF)
    while Fraction(nextafter(hi, 0.0)) ** 6 >= target:
        hi = nextafter(hi, 0.0)
    lo = hi
    while Fraction(lo) ** 6 > target:
        lo = nextafter(lo, 0.0)
    return lo, hi


@dataclass(frozen=True)
class Box:
    """Floating-point box ``{x : |x_i - center_i| <= halfsize_i}``."""

    center: tuple[float, ...]
    halfsize: tuple[float, ...]
    code: str | None = None

    def __post_init__(self):
        if len(self.center) != DIM or len(self.halfsize) != DIM:
            raise ValueError("a box has six coordinates")
        if not all(s > 0.0 for s in self.halfsize):
            raise ValueError("halfsizes must be positive")

    def interval(self, i: int) -> tuple[float, float]:
        """Rigorous float enclosure of coordinate ``i``."""
        c = self.center[i]
        s = self.halfsize[i]
        return sub_down(c, s), add_up(c, s)

    def contains(self, x) -> bool:
        # exact comparison of |x_i - c_i| <= s_i via Fractions
        return all(
            abs(Fraction(xi) - Fraction(c)) <= Fraction(s)
            for xi, c, s in zip(x, self.center, self.halfsize)
        )

    def params_at(self, x) -> tuple[complex, complex, complex]:
        """Map a point of R^6 to ``(P, S, L)``."""
        return complex(x[5], x[2]), complex(x[4], x[1]), complex(x[3], x[0])


def parse_boxcode(text: str) -> str:
    if not _CODE_RE.match(text):
        raise BoxcodeError(f"boxcode must be a string of 0/1, got {text!r}")
    if len(text) > MAX_DEPTH:
        raise BoxcodeError(f"boxcode deeper than {MAX_DEPTH} bits")
    return text


def dyadic_cell(code: str, i: int) -> tuple[int, int]:
    """Exact position of the code's box along dimension ``i``.

    Returns ``(n, k)``: the box covers ``[-1 + n*2**(1-k), -1 + (n+1)*2**(1-k)]``
    in units of the root halfsize of dimension ``i``.
    """
    n = 0
    k = 0
    for bit in code[i::DIM]:
        n = 2 * n + (bit == "1")
        k += 1
    return n, k


def exact_interval(code: str, i: int) -> tuple[Fraction, Fraction]:
    """Exact normalized interval (units of the root halfsize)."""
    n, k = dyadic_cell(code, i)
    w = Fraction(2, 2 ** k)
    lo = -1 + n * w
    return lo, lo + w


def _outer(lo: Fraction, hi: Fraction, h_lo: float, h_hi: float) -> tuple[float, float]:
    # true root halfsize H lies in [h_lo, h_hi]; enclose [H*lo, H*hi]
    flo = float(lo)
    fhi = float(hi)
    assert Fraction(flo) == lo and Fraction(fhi) == hi
    lower = mul_down(h_lo, flo) if flo >= 0.0 else -mul_up(h_hi, -flo)
    upper = mul_up(h_hi, fhi) if fhi >= 0.0 else -mul_down(h_lo, -fhi)
    return lower, upper


@lru_cache(maxsize=4096)
def box_from_code(code: str) -> Box:
    parse_boxcode(code)
    center = []
    half = []
    for i in range(DIM):
        lo, hi = exact_interval(code, i)
        h_lo, h_hi = root_halfsize_bounds(i)
        lower, upper = _outer(lo, hi, h_lo, h_hi)
        c = 0.5 * (lower + upper)
        s = max(sub_up(c, lower), sub_up(upper, c))
        center.append(c)
        half.append(s)
    return Box(tuple(center), tuple(half), code)


def children(code: str) -> tuple[str, str]:
    return code + "0", code + "1"


def locate(point, depth: int) -> str:
    """Boxcode of depth ``depth`` whose exact box contains ``point`` in R^6.

    Points on a cut go to the upper half.  Raises if the point is outside the
    root box.
    """
    x = [Fraction(v) for v in point]
    bits = []
    lohi = []
    for i in range(DIM):
        h_lo, h_hi = root_halfsize_bounds(i)
        if abs(x[i]) > Fraction(h_lo):
            raise BoxcodeError(f"coordinate {i} outside the root box")
        lohi.append([Fraction(-1), Fraction(1)])
    # normalized coordinates need the exact root halfsize; cuts sit at H*m for
    # dyadic m, so compare x against H*m through m vs x/H with H bracketed
    for t in range(depth):
        i = t % DIM
        lo, hi = lohi[i]
        mid = (lo + hi) / 2
        h_lo, h_hi = root_halfsize_bounds(i)
        cut_lo = min(mid * Fraction(h_lo), mid * Fraction(h_hi))
        cut_hi = max(mid * Fraction(h_lo), mid * Fraction(h_hi))
        if x[i] >= cut_hi:
            bit = "1"
        elif x[i] < cut_lo:
            bit = "0"
        else:
            raise BoxcodeError(f"point too close to a cut in dimension {i}")
        bits.append(bit)
        lohi[i] = [mid, hi] if bit == "1" else [lo, mid]
    return "".join(bits)


def point_coords(P: complex, S: complex, L: complex) -> tuple[float, ...]:
    """Inverse of the embedding: ``(x0..x5)`` for a parameter triple."""
    return (L.imag, S.imag, P.imag, L.real, S.real, P.real)


class ParamJets(NamedTuple):
    P: Jet
    S: Jet
    L: Jet


def param_jets(box: Box) -> ParamJets:
    """Coordinate jets: ``L`` along ``z0``, ``S`` along ``z1``, ``P`` along ``z2``.

    The disc ``|z| <= 1`` mapped through ``c + (s_re + i s_im) z`` covers the
    rectangle of the box exactly at its corners, so the jets carry no error.
    """
    c = box.center
    s = box.halfsize
    L = make_jet(complex(c[3], c[0]), a0=complex(s[3], s[0]))
    S = make_jet(complex(c[4], c[1]), a1=complex(s[4], s[1]))
    P = make_jet(complex(c[5], c[2]), a2=complex(s[5], s[2]))
    return ParamJets(P, S, L)


class CornerBounds(NamedTuple):
    """Rigorous ``(inf, sup)`` pairs over a box."""

    abs_s_sq: tuple[float, float]
    im_s: tuple[float, float]
    im_l: tuple[float, float]
    re_l: tuple[float, float]
    abs_l_sq: tuple[float, float]
    im_p: tuple[float, float]
    re_p: tuple[float, float]
    area: tuple[float, float]  # |S^2 Im L|


def _nearer(lo: float, hi: float) -> float:
    if lo <= 0.0 <= hi:
        return 0.0
    return min(abs(lo), abs(hi))


def _further(lo: float, hi: float) -> float:
    return max(abs(lo), abs(hi))


def _sq_norm(re_iv, im_iv) -> tuple[float, float]:
    a = _nearer(*re_iv)
    b = _nearer(*im_iv)
    lo = add_down(mul_down(a, a), mul_down(b, b))
    a = _further(*re_iv)
    b = _further(*im_iv)
    hi = add_up(mul_up(a, a), mul_up(b, b))
    return lo, hi


def corner_bounds(box: Box) -> CornerBounds:
    x = [box.interval(i) for i in range(6)]
    s_sq = _sq_norm(x[4], x[1])
    l_sq = _sq_norm(x[3], x[0])
    im_l_abs = (_nearer(*x[0]), _further(*x[0]))
    area = (mul_down(s_sq[0], im_l_abs[0]), mul_up(s_sq[1], im_l_abs[1]))
    return CornerBounds(
        abs_s_sq=s_sq,
        im_s=x[1],
        im_l=x[0],
        re_l=x[3],
        abs_l_sq=l_sq,
        im_p=x[2],
        re_p=x[5],
        area=area,
    )
