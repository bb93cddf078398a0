"""Point-level computations: cusp areas, the Whitehead variety, Newton refinement.

Nothing here is rigorous.  These routines locate and describe individual
parameter points; rigorous statements about boxes live in
:mod:`bicusp.conditions`.
"""

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .words import evaluate_word_point, inverse_word, parse_word

RECTANGULAR_TOL = 1e-12


@dataclass(frozen=True)
class ParamPoint:
    P: complex
    S: complex
    L: complex

    def __post_init__(self):
        if self.S == 0:
            raise ValueError("S must be nonzero")

    def as_tuple(self):
        return (self.P, self.S, self.L)


WHITEHEAD_POINT = ParamPoint(1j, 1 + 1j, 2j)


def cusp_area(p) -> float:
    """``|S^2 Im L|``"""
    P, S, L = p.as_tuple() if isinstance(p, ParamPoint) else p
    if S == 0:
        raise ValueError("S must be nonzero")
    return abs(S * S) * abs(L.imag)


def m129_area_bound(L: complex) -> float:
    """Cusp area ``4 |Im L| / |L|`` of the Whitehead-variety point over ``L``."""
    L = complex(L)
    if L == 0:
        raise ValueError("L must be nonzero")
    return 4.0 * abs(L.imag) / abs(L)


def whitehead_variety_point(L: complex) -> tuple[complex, complex]:
    """``(P, S^2) = (L/2, -4/L)``, where ``gMGGMgN`` is the identity up to sign."""
    L = complex(L)
    if L == 0:
        raise ValueError("L must be nonzero")
    return L / 2, -4 / L


def is_rectangular(L: complex, tol: float = RECTANGULAR_TOL) -> bool:
    return abs(complex(L).real) <= tol


def relator_residual(word: str, p) -> float:
    """Max entry distance of the word's matrix from ``+I`` or ``-I``, whichever is closer."""
    P, S, L = p.as_tuple() if isinstance(p, ParamPoint) else p
    a, b, c, d = evaluate_word_point(word, P, S, L)
    plus = max(abs(a - 1), abs(b), abs(c), abs(d - 1))
    minus = max(abs(a + 1), abs(b), abs(c), abs(d + 1))
    return min(plus, minus)


# ------------------------------------------------------------------- Newton


@dataclass(frozen=True)
class NewtonResult:
    point: ParamPoint | None
    residual: float
    iterations: int
    converged: bool


def _equations(x, r1, r2):
    P, S, L = complex(x[0], x[1]), complex(x[2], x[3]), complex(x[4], x[5])
    _, b1, c1, _ = evaluate_word_point(r1, P, S, L)
    _, _, c2, _ = evaluate_word_point(r2, P, S, L)
    return np.array([c1.real, c1.imag, b1.real, b1.imag, c2.real, c2.imag])


def _point(x) -> ParamPoint:
    return ParamPoint(complex(x[0], x[1]), complex(x[2], x[3]), complex(x[4], x[5]))


def _pair_residual(x, r1, r2) -> float:
    if not np.all(np.isfinite(x)) or complex(x[2], x[3]) == 0:
        return math.inf
    p = _point(x)
    try:
        res = max(relator_residual(r1, p), relator_residual(r2, p))
    except (ZeroDivisionError, OverflowError):
        return math.inf
    return res if math.isfinite(res) else math.inf


def newton_refine(r1: str, r2: str, guess, tol: float = 1e-10, max_iter: int = 60,
                  min_abs_s: float = 1e-8) -> NewtonResult:
    """Damped Newton for a point where both words are relators.

    Solves ``(c_{r1}, b_{r1}, c_{r2}) = 0`` as six real equations with a
    central-difference Jacobian and least-squares steps, halving the step
    until the equation norm decreases.  Success is judged on the full
    matrices: both must be within ``tol`` of ``+I`` or ``-I``.
    """
    r1, r2 = parse_word(r1), parse_word(r2)
    g = guess if isinstance(guess, ParamPoint) else ParamPoint(*guess)
    x = np.array([g.P.real, g.P.imag, g.S.real, g.S.imag, g.L.real, g.L.imag])
    best = (_pair_residual(x, r1, r2), x.copy())
    it = 0
    with np.errstate(all="ignore"):
        for it in range(max_iter + 1):
            res = _pair_residual(x, r1, r2)
            if res < best[0]:
                best = (res, x.copy())
            if res <= tol:
                return NewtonResult(_point(x), res, it, True)
            if it == max_iter or abs(complex(x[2], x[3])) < min_abs_s:
                break
            try:
                f = _equations(x, r1, r2)
                J = np.empty((6, 6))
                for j in range(6):
                    h = 1e-7 * max(1.0, abs(x[j]))
                    e = np.zeros(6)
                    e[j] = h
                    J[:, j] = (_equations(x + e, r1, r2) - _equations(x - e, r1, r2)) / (2 * h)
            except (ZeroDivisionError, OverflowError):
                break
            if not (np.all(np.isfinite(f)) and np.all(np.isfinite(J))):
                break
            step = np.linalg.lstsq(J, -f, rcond=None)[0]
            norm = np.linalg.norm(f)
            t = 1.0
            while t > 1e-4:
                try:
                    trial = np.linalg.norm(_equations(x + t * step, r1, r2))
                except (ZeroDivisionError, OverflowError):
                    trial = math.inf
                if trial < norm:
                    break
                t /= 2
            x = x + t * step
    res, xb = best
    point = _point(xb) if math.isfinite(res) else None
    return NewtonResult(point, res, it, False)


# ------------------------------------------------------------ grid seeding


def evaluate_word_array(word: str, P, S, L):
    """Vectorized point evaluation; returns arrays ``(a, b, c, d)``."""
    P, S, L = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (P, S, L)))
    one, zero = np.ones_like(P), np.zeros_like(P)
    a, b, c, d = one, zero, zero, one
    si, ios = S * 1j, 1j / S
    psi = P * si
    for ch in word:
        if ch == "M":
            b, d = a + b, c + d
        elif ch == "m":
            b, d = b - a, d - c
        elif ch == "N":
            b, d = a * L + b, c * L + d
        elif ch == "n":
            b, d = b - a * L, d - c * L
        elif ch == "G":
            a, b, c, d = a * psi + b * si, a * ios, c * psi + d * si, c * ios
        else:
            a, b, c, d = -(b * si), b * psi - a * ios, -(d * si), d * psi - c * ios
    return a, b, c, d


def _residual_array(word, P, S, L):
    a, b, c, d = evaluate_word_array(word, P, S, L)
    off = np.maximum(abs(b), abs(c))
    plus = np.maximum(off, np.maximum(abs(a - 1), abs(d - 1)))
    minus = np.maximum(off, np.maximum(abs(a + 1), abs(d + 1)))
    return np.minimum(plus, minus)


def grid_points(resolution: float = 1 / 8, area_bound: float = 5.24):
    """Grid points ``(P, S, L)`` of the normalized region at the given spacing.

    Yields one ``(P, S_array, L_array)`` slab per grid value of ``P``.
    """
    h = resolution
    steps = lambda lo, hi: np.arange(math.ceil(lo / h), math.floor(hi / h) + 1) * h
    s_max = math.sqrt(area_bound / (math.sqrt(3) / 2))
    L = (steps(-0.5, 0.5)[:, None] + 1j * steps(0, area_bound)[None, :]).ravel()
    L = L[abs(L) >= 1]
    S = (steps(-s_max, s_max)[:, None] + 1j * steps(0, s_max)[None, :]).ravel()
    S = S[abs(S) >= 1]
    LL, SS = (v.ravel() for v in np.meshgrid(L, S, indexing="ij"))
    keep = abs(SS) ** 2 * LL.imag <= area_bound
    LL, SS = LL[keep], SS[keep]
    for re_p in steps(0, 0.5):
        for im_p in steps(0, area_bound / 2):
            P = complex(re_p, im_p)
            ok = P.imag <= LL.imag / 2
            if ok.any():
                yield P, SS[ok], LL[ok]


def grid_seeds(r1: str, r2: str, resolution: float = 1 / 8, keep: int = 32,
               area_bound: float = 5.24) -> list[ParamPoint]:
    """The ``keep`` grid points with the smallest pair residual."""
    best = []
    with np.errstate(all="ignore"):
        for P, S, L in grid_points(resolution, area_bound):
            r = np.maximum(_residual_array(r1, P, S, L), _residual_array(r2, P, S, L))
            idx = np.argsort(r, kind="stable")[:keep]
            best.extend((float(r[i]), P.real, P.imag, S[i].real, S[i].imag, L[i].real, L[i].imag)
                        for i in idx)
    best.sort()
    return [ParamPoint(complex(t[1], t[2]), complex(t[3], t[4]), complex(t[5], t[6]))
            for t in best[:keep]]


def find_variety_point(r1: str, r2: str, tol: float = 1e-10, **seed_opts) -> NewtonResult:
    """Newton from each grid seed; the first converged result (else the best one)."""
    results = []
    for seed in grid_seeds(r1, r2, **seed_opts):
        res = newton_refine(r1, r2, seed, tol)
        if res.converged:
            return res
        results.append(res)
    return min(results, key=lambda r: r.residual)


# --------------------------------------------------- isomorphism spot-checks


@dataclass(frozen=True)
class IsoRow:
    manifold: str
    r1: str
    r2: str
    phi_a: str
    phi_b: str
    inv_m: str
    inv_n: str
    inv_g: str


def _substitute(word: str, images: dict[str, str]) -> str:
    """Replace each letter by its image; uppercase means the inverse (SnapPy style)."""
    out = []
    for ch in word:
        img = images[ch.lower()]
        out.append(inverse_word(img) if ch.isupper() else img)
    return "".join(out)


def isomorphism_table():
    """Return ``(relators, rows)`` from the bundled isomorphism table."""
    text = resources.files("bicusp.data").joinpath("isomorphisms.tsv").read_text()
    relators, rows = {}, []
    for line in text.splitlines():
        if line.startswith("# relator"):
            _, _, name, rel = line.split()
            relators[name] = rel
        elif line and not line.startswith("#"):
            rows.append(IsoRow(*line.split("\t")))
    return relators, rows


@dataclass(frozen=True)
class IsoCheck:
    row: IsoRow
    point: ParamPoint | None
    relator_residual: float  # image of the manifold relator under phi
    inverse_residuals: tuple[float, float, float]  # phi(inv(x)) * x^-1 for x = m, n, g


def check_isomorphism(row: IsoRow, relator: str, tol: float = 1e-10) -> IsoCheck:
    """Spot-check one table row at a Newton point on its relator-pair variety."""
    found = find_variety_point(row.r1, row.r2, tol)
    if not found.converged:
        return IsoCheck(row, None, math.inf, (math.inf,) * 3)
    phi = {"a": row.phi_a, "b": row.phi_b}
    rel = relator_residual(_substitute(relator, phi), found.point)
    inv = tuple(
        relator_residual(_substitute(w, phi) + inverse_word(x), found.point)
        for w, x in ((row.inv_m, "m"), (row.inv_n, "n"), (row.inv_g, "g"))
    )
    return IsoCheck(row, found.point, rel, inv)
