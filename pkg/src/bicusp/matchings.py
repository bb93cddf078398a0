"""Enumeration of perfect matchings on the 2n faces of an n-dipyramid.

The recursion ``pfm(p, l, m)`` visits every perfect matching of ``l + m``
that extends the partial matching ``p`` and pairs the head of ``l`` with a
later element of ``l``.  Elements skipped over are parked in ``m`` and
return to the pool once the head is matched.

Every parked element is smaller than everything left in ``l``, so the union
``l2 + m`` is already sorted as ``m + l2``; and since heads are matched in
increasing order, pairs come out in canonical order with no sorting.
"""

MAX_N = 12

Matching = tuple[tuple[int, int], ...]


def canonical(pairs) -> Matching:
    """Pairs as ``(min, max)``, sorted by first element."""
    return tuple(sorted((min(a, b), max(a, b)) for a, b in pairs))


def _pfm(p, l, m, visit):
    if not l:
        if not m:
            visit(p)
        return 0 if m else 1
    if len(l) < 2:
        return 0
    x0, x1, l2 = l[0], l[1], l[2:]
    count = _pfm(p + ((x0, x1),), m + l2, (), visit)
    count += _pfm(p, (x0,) + l2, m + (x1,), visit)
    return count


def enumerate_matchings(n: int, visit=None) -> int:
    """Call ``visit(matching)`` on every perfect matching of ``{0, ..., 2n-1}``.

    Matchings are passed in canonical form.  Returns the number visited.
    """
    if not isinstance(n, int) or not 1 <= n <= MAX_N:
        raise ValueError(f"n must be an integer in 1..{MAX_N}")
    return _pfm((), tuple(range(2 * n)), (), visit or (lambda p: None))


def matchings(n: int) -> list[Matching]:
    out: list[Matching] = []
    enumerate_matchings(n, out.append)
    return out


def format_matching(matching: Matching) -> str:
    return ",".join(f"{a}-{b}" for a, b in matching)


def double_factorial_odd(n: int) -> int:
    """``(2n - 1)!!``"""
    out = 1
    for k in range(1, 2 * n, 2):
        out *= k
    return out
