"""Heuristic generation of killer/necklace candidate words.

Candidates have the shape ``s1 T1 s2 T2 ... sk`` with ``s_j`` in ``{g, G}`` and
``T_j = M^p N^q`` (``|p|, |q| <= E``, possibly trivial).  Words never begin or
end with a translation, since outer translations leave the ``c`` entry
unchanged.  A beam search over prefixes ranks words by point values of
``|c/S|``.  None of this is rigorous; it only decides which words the
certifier is asked to try.

With a single point the score is ``|c/S|`` there.  With extra points (the
center pushed out by one halfsize along each coordinate) the score is
``|f(p0)| + sum_k |f(p_k) - f(p0)|``, a cheap first-order estimate of the
box-wide bound.  It keeps long words with a tiny center value but a huge
derivative from crowding out short words that actually certify.
"""

from typing import NamedTuple

import numpy as np


class Candidate(NamedTuple):
    score: float
    word: str


def translation_text(p: int, q: int) -> str:
    m = "M" * p if p >= 0 else "m" * -p
    n = "N" * q if q >= 0 else "n" * -q
    return m + n


def _sort_key(c: Candidate):
    return (c.score, len(c.word), c.word)


def _scores(c, S):
    f = np.abs(c / S[:, None]) if c.shape[0] == 1 else c / S[:, None]
    if c.shape[0] == 1:
        return f[0]
    return np.abs(f[0]) + np.abs(f[1:] - f[0]).sum(axis=0)


def rank_words(points, g_max: int, E: int = 3, top_k: int = 16,
               beam_width: int = 64) -> list[Candidate]:
    """Return up to ``top_k`` words with the smallest score at ``points``.

    ``points`` is a sequence of ``(P, S, L)`` triples, the first being the
    base point.  Ties are broken by word length and then lexicographically,
    so the result is a deterministic function of the inputs.
    """
    if g_max < 1:
        return []
    pts = np.array(points, dtype=complex).reshape(-1, 3)
    P, S, L = pts[:, 0], pts[:, 1], pts[:, 2]
    psi = (P * S * 1j)[:, None, None]
    iS = (S * 1j)[:, None, None]
    i_over_S = (1j / S)[:, None, None]
    texts = []
    pq = []
    for p in range(-E, E + 1):
        for q in range(-E, E + 1):
            texts.append(translation_text(p, q))
            pq.append((p, q))
    pq = np.array(pq, dtype=float)
    X = (pq[:, 0][None, :] + pq[:, 1][None, :] * L[:, None])[:, None, :]  # (npts, 1, nx)
    trivial = np.array([t == "" for t in texts])

    # level 1: "G" and "g"
    words = ["G", "g"]
    zero = np.zeros_like(P)
    a = np.stack([P * S * 1j, zero], axis=1)
    b = np.stack([1j / S, -1j / S], axis=1)
    c = np.stack([S * 1j, -S * 1j], axis=1)
    d = np.stack([zero, P * S * 1j], axis=1)
    pool: list[Candidate] = []

    level = 1
    while True:
        score = _scores(c, S)
        order = sorted(range(len(words)), key=lambda j: (float(score[j]), len(words[j]), words[j]))
        pool.extend(Candidate(float(score[j]), words[j]) for j in order[:top_k])
        if level == g_max:
            break
        beam = order[:beam_width]
        words = [words[j] for j in beam]
        a, b, c, d = a[:, beam], b[:, beam], c[:, beam], d[:, beam]
        # W * T(x) changes only b and d
        bx = a[:, :, None] * X + b[:, :, None]
        dx = c[:, :, None] * X + d[:, :, None]
        ax = np.broadcast_to(a[:, :, None], bx.shape)
        cx = np.broadcast_to(c[:, :, None], dx.shape)
        last = np.array([w[-1] for w in words])
        blocks = []
        # right multiplication by G, then by g; skip the cancelling pairs gG, Gg
        for letter, inverse, prod in (
            ("G", "g", (ax * psi + bx * iS, ax * i_over_S, cx * psi + dx * iS, cx * i_over_S)),
            ("g", "G", (-bx * iS, -ax * i_over_S + bx * psi, -dx * iS, -cx * i_over_S + dx * psi)),
        ):
            mask = ~((last == inverse)[:, None] & trivial[None, :])
            rows, cols = np.nonzero(mask)
            names = [words[j] + texts[t] + letter for j, t in zip(rows, cols)]
            blocks.append((names, *(m[:, mask] for m in prod)))
        words = blocks[0][0] + blocks[1][0]
        a, b, c, d = (np.concatenate([blocks[0][k], blocks[1][k]], axis=1) for k in range(1, 5))
        level += 1
    pool.sort(key=_sort_key)
    out, seen = [], set()
    for cand in pool:
        if cand.word not in seen and np.isfinite(cand.score):
            seen.add(cand.word)
            out.append(cand)
        if len(out) == top_k:
            break
    return out
