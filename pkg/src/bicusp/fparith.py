"""Error-free transformations and directed rounding for binary64.

Everything here assumes the default round-to-nearest-even mode.  The
``*_up``/``*_down`` helpers return floats that bound the exact real result
from above/below, and stay exact whenever the underlying operation was exact.
"""

import math

INF = math.inf
_nextafter = math.nextafter

# Below this magnitude the Dekker residual may itself be rounded.
_EFT_FLOOR = 2.0 ** -960
# Bound used in place of a residual we cannot compute exactly.
TINY = 2.0 ** -968

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a: float, b: float) -> tuple[float, float]:
    """Knuth's TwoSum: ``s + e == a + b`` exactly with ``s = fl(a + b)``."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def two_prod(a: float, b: float) -> tuple[float, float, bool]:
    """Dekker product.

    Returns ``(p, e, exact)`` with ``p = fl(a * b)``.  When ``exact`` is true,
    ``p + e == a * b`` exactly; otherwise the product is in the underflow zone
    and ``|a * b - p| <= TINY`` is all that is known.
    """
    p = a * b
    if p == 0.0:
        if a == 0.0 or b == 0.0:
            return 0.0, 0.0, True
        return 0.0, 0.0, False
    if -_EFT_FLOOR < p < _EFT_FLOOR:
        return p, 0.0, False
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e, True


def prod_err(a: float, b: float) -> tuple[float, float]:
    """``(fl(a*b), bound)`` where ``bound >= |a*b - fl(a*b)|``."""
    p, e, exact = two_prod(a, b)
    if exact:
        return p, abs(e)
    return p, TINY


def add_up(a: float, b: float) -> float:
    s, e = two_sum(a, b)
    if e > 0.0:
        return _nextafter(s, INF)
    return s


def add_down(a: float, b: float) -> float:
    s, e = two_sum(a, b)
    if e < 0.0:
        return _nextafter(s, -INF)
    return s


def sub_up(a: float, b: float) -> float:
    return add_up(a, -b)


def sub_down(a: float, b: float) -> float:
    return add_down(a, -b)


def mul_up(a: float, b: float) -> float:
    p, e, exact = two_prod(a, b)
    if not exact or e > 0.0:
        return _nextafter(p, INF)
    return p


def mul_down(a: float, b: float) -> float:
    p, e, exact = two_prod(a, b)
    if not exact or e < 0.0:
        return _nextafter(p, -INF)
    return p


def div_up(a: float, b: float) -> float:
    """Upper bound on ``a / b`` for ``a >= 0`` and ``b > 0``."""
    q = a / b
    p, e, exact = two_prod(q, b)
    if exact and p == a and e == 0.0:
        return q
    return _nextafter(q, INF)


def div_down(a: float, b: float) -> float:
    """Lower bound on ``a / b`` for ``a >= 0`` and ``b > 0``."""
    q = a / b
    p, e, exact = two_prod(q, b)
    if exact and p == a and e == 0.0:
        return q
    return max(0.0, _nextafter(q, -INF))


def sqrt_up(x: float) -> float:
    # math.sqrt is correctly rounded under IEEE-754
    s = math.sqrt(x)
    p, e, exact = two_prod(s, s)
    if exact and p == x and e == 0.0:
        return s
    return _nextafter(s, INF)


def sqrt_down(x: float) -> float:
    if x <= 0.0:
        return 0.0
    s = math.sqrt(x)
    p, e, exact = two_prod(s, s)
    if exact and p == x and e == 0.0:
        return s
    return max(0.0, _nextafter(s, -INF))


def sum_up(values) -> float:
    """Upper bound on the exact sum of nonnegative floats."""
    total = 0.0
    for v in values:
        if v:
            total = add_up(total, v) if total else v
    return total


def cabs_up(z: complex) -> float:
    re = z.real
    im = z.imag
    if im == 0.0:
        return abs(re)
    if re == 0.0:
        return abs(im)
    return sqrt_up(add_up(mul_up(re, re), mul_up(im, im)))


def cabs_down(z: complex) -> float:
    re = z.real
    im = z.imag
    if im == 0.0:
        return abs(re)
    if re == 0.0:
        return abs(im)
    return sqrt_down(add_down(mul_down(re, re), mul_down(im, im)))


def cmul(x: complex, y: complex) -> tuple[complex, float]:
    """Complex product with a bound on its total rounding error.

    The product is formed componentwise (no FMA); the bound covers all six
    roundings and is zero when every one of them was exact.
    """
    xr = x.real
    xi = x.imag
    yr = y.real
    yi = y.imag
    p1, e1 = prod_err(xr, yr)
    p2, e2 = prod_err(xi, yi)
    p3, e3 = prod_err(xr, yi)
    p4, e4 = prod_err(xi, yr)
    re, e5 = two_sum(p1, -p2)
    im, e6 = two_sum(p3, p4)
    err = sum_up((e1, e2, abs(e5), e3, e4, abs(e6)))
    return complex(re, im), err


def cadd(x: complex, y: complex) -> tuple[complex, float]:
    re, e1 = two_sum(x.real, y.real)
    im, e2 = two_sum(x.imag, y.imag)
    if e1 or e2:
        return complex(re, im), add_up(abs(e1), abs(e2))
    return complex(re, im), 0.0
