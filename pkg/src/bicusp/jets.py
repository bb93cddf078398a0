"""Affine complex 1-jets with rigorous error radii.

A :class:`Jet` ``(c, a0, a1, a2; e)`` stands for every function ``g`` on the
unit tri-disc ``{|z_i| <= 1}`` with

    |g(z) - (c + a0*z0 + a1*z1 + a2*z2)| <= e.

Every operation here maps jets containing ``f`` and ``g`` to a jet containing
the exact ``f op g``, floating-point rounding included.  Rounding errors are
measured with error-free transformations rather than a worst-case model, so
operations that happen to be exact add nothing to ``e``.
"""

from typing import NamedTuple

from .fparith import (
    add_up,
    cabs_down,
    cabs_up,
    cadd,
    cmul,
    div_up,
    mul_down,
    mul_up,
    sub_down,
    sum_up,
    two_sum,
)

# Components outside [2**-512, 2**512] (other than exact zero) are refused.
GUARD_HI = 2.0 ** 512
GUARD_LO = 2.0 ** -512


class JetError(ArithmeticError):
    """A jet operation could not produce a rigorous result."""


class MagnitudeGuardError(JetError):
    def __init__(self, detail=""):
        msg = "magnitude guard tripped"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class DivisionPreconditionError(JetError):
    def __init__(self, lower=None):
        msg = "division precondition violated"
        if lower is not None:
            msg += f" (divisor lower bound {lower!r})"
        super().__init__(msg)


class Jet(NamedTuple):
    c: complex
    a0: complex
    a1: complex
    a2: complex
    e: float

    @property
    def partials(self) -> tuple[complex, complex, complex]:
        return (self.a0, self.a1, self.a2)

    def affine(self, z0, z1, z2):
        """Evaluate the affine part (plain arithmetic, no rounding control)."""
        return self.c + self.a0 * z0 + self.a1 * z1 + self.a2 * z2


class AbsBounds(NamedTuple):
    lower: float
    upper: float


def _bad(v: float) -> bool:
    a = abs(v)
    # `not a <= GUARD_HI` also catches NaN
    return not a <= GUARD_HI or (a != 0.0 and a < GUARD_LO)


def _checked(c, a0, a1, a2, e) -> Jet:
    for z in (c, a0, a1, a2):
        if _bad(z.real) or _bad(z.imag):
            raise MagnitudeGuardError(f"component {z!r}")
    if not 0.0 <= e <= GUARD_HI:
        raise MagnitudeGuardError(f"error radius {e!r}")
    return Jet(c, a0, a1, a2, e)


ZERO = Jet(0j, 0j, 0j, 0j, 0.0)
ONE = Jet(1 + 0j, 0j, 0j, 0j, 0.0)


def jet_const(c) -> Jet:
    """Constant jet.  Binary64 inputs are represented exactly (``e == 0``)."""
    c = complex(c)
    return _checked(c, 0j, 0j, 0j, 0.0)


def jet_neg(x: Jet) -> Jet:
    return Jet(-x.c, -x.a0, -x.a1, -x.a2, x.e)


def _times_i(z: complex) -> complex:
    return complex(-z.imag, z.real)


def jet_mul_i(x: Jet) -> Jet:
    """Multiply by the imaginary unit (exact)."""
    return Jet(_times_i(x.c), _times_i(x.a0), _times_i(x.a1), _times_i(x.a2), x.e)


def jet_add(x: Jet, y: Jet) -> Jet:
    c, r0 = cadd(x.c, y.c)
    a0, r1 = cadd(x.a0, y.a0)
    a1, r2 = cadd(x.a1, y.a1)
    a2, r3 = cadd(x.a2, y.a2)
    e = sum_up((x.e, y.e, r0, r1, r2, r3))
    return _checked(c, a0, a1, a2, e)


def jet_sub(x: Jet, y: Jet) -> Jet:
    return jet_add(x, jet_neg(y))


def _partial_norm(x: Jet) -> float:
    return sum_up((cabs_up(x.a0), cabs_up(x.a1), cabs_up(x.a2)))


def jet_mul(x: Jet, y: Jet) -> Jet:
    xc = x.c
    yc = y.c
    c, r = cmul(xc, yc)
    resid = [r]
    parts = []
    for ax, ay in ((x.a0, y.a0), (x.a1, y.a1), (x.a2, y.a2)):
        if not ax and not ay:
            parts.append(0j)
            continue
        u, ru = cmul(xc, ay)
        v, rv = cmul(ax, yc)
        s, rs = cadd(u, v)
        parts.append(s)
        resid.append(ru)
        resid.append(rv)
        resid.append(rs)
    qx = _partial_norm(x)
    qy = _partial_norm(y)
    bx = add_up(cabs_up(xc), qx)
    by = add_up(cabs_up(yc), qy)
    # quadratic remainder, cross terms with the error radii, and rounding
    terms = [mul_up(qx, qy), mul_up(bx, y.e), mul_up(by, x.e), mul_up(x.e, y.e)]
    terms.extend(resid)
    return _checked(c, parts[0], parts[1], parts[2], sum_up(terms))


def jet_abs_bounds(x: Jet) -> AbsBounds:
    spread = add_up(_partial_norm(x), x.e)
    lower = sub_down(cabs_down(x.c), spread)
    upper = add_up(cabs_up(x.c), spread)
    return AbsBounds(max(0.0, lower), upper)


def jet_recip(y: Jet) -> Jet:
    """Jet containing ``1/g`` for every ``g`` in ``y``.

    Requires ``|c| > sum|a_i| + e`` rigorously, i.e. the jet-set of ``y``
    stays away from zero on the whole tri-disc.
    """
    cy = y.c
    m_lo = cabs_down(cy)
    r = add_up(_partial_norm(y), y.e)
    gap = sub_down(m_lo, r)
    if not gap > 0.0:
        raise DivisionPreconditionError(gap)
    # approximate reciprocal, then bound its distance to 1/cy a posteriori
    d = cy.real * cy.real + cy.imag * cy.imag
    if not 0.0 < d < float("inf"):
        raise MagnitudeGuardError(f"reciprocal of {cy!r}")
    R = complex(cy.real / d, -cy.imag / d)
    w, rw = cmul(R, cy)
    t_re, t_e = two_sum(w.real, -1.0)
    defect = sum_up((cabs_up(complex(t_re, w.imag)), abs(t_e), rw))
    eta = div_up(defect, m_lo) if defect else 0.0  # |R - 1/cy| <= eta

    K, rK = cmul(R, R)
    dK = rK
    if eta:
        # |R^2 - 1/cy^2| <= eta * (2|R| + eta)
        dK = add_up(dK, mul_up(eta, add_up(mul_up(2.0, cabs_up(R)), eta)))
    parts = []
    dev = [eta]
    for ay in (y.a0, y.a1, y.a2):
        if not ay:
            parts.append(0j)
            continue
        p, rp = cmul(ay, K)
        parts.append(-p)
        dev.append(rp)
        if dK:
            dev.append(mul_up(cabs_up(ay), dK))
    m2_lo = mul_down(m_lo, m_lo)
    if y.e:
        dev.append(div_up(y.e, m2_lo))
    if r:
        dev.append(div_up(mul_up(r, r), mul_down(m2_lo, gap)))
    return _checked(R, parts[0], parts[1], parts[2], sum_up(dev))


def jet_div(x: Jet, y: Jet) -> Jet:
    return jet_mul(x, jet_recip(y))


def jet_contains(x: Jet, value: complex, z) -> bool:
    """Float-level membership test (diagnostic only, not rigorous)."""
    return abs(value - x.affine(*z)) <= x.e


def make_jet(c=0j, a0=0j, a1=0j, a2=0j, e=0.0) -> Jet:
    """Build a jet from loose numeric inputs, validating them like an op result."""
    return _checked(complex(c), complex(a0), complex(a1), complex(a2), float(e))
