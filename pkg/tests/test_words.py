import random

import mpmath
import pytest

from bicusp.boxes import box_from_code, locate, param_jets, point_coords
from bicusp.jets import jet_mul, jet_sub
from bicusp.words import (
    ALPHABET,
    MalformedWordError,
    evaluate_word,
    g_length,
    generator_matrix,
    inverse_word,
    parse_word,
)


def _random_word(rng, n):
    return "".join(rng.choice(ALPHABET) for _ in range(n))


def _random_point(rng):
    def c():
        return complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
    S = c()
    while abs(S) < 0.3:
        S = c()
    return c(), S, c()


def test_parse_word():
    assert parse_word("gMGGMgN") == "gMGGMgN"
    assert parse_word("") == ""
    with pytest.raises(MalformedWordError) as err:
        parse_word("xyz")
    assert err.value.index == 0
    with pytest.raises(MalformedWordError) as err:
        parse_word("gMx")
    assert err.value.index == 2


def test_g_length():
    assert g_length("gMGGMgN") == 4
    assert g_length("mnMN") == 0
    assert g_length("MgggMgNg") == 5


def test_g_length_additive():
    rng = random.Random(0)
    for _ in range(200):
        u = _random_word(rng, rng.randint(0, 10))
        v = _random_word(rng, rng.randint(0, 10))
        assert g_length(u + v) == g_length(u) + g_length(v)
        assert g_length(inverse_word(u)) == g_length(u)


def test_G_at_w_exact(w_point):
    G = generator_matrix("G", w_point)
    assert tuple(G) == (-1 - 1j, (1 + 1j) / 2, -1 + 1j, 0)


def test_translations(w_point):
    assert tuple(generator_matrix("M", w_point)) == (1, 1, 0, 1)
    assert tuple(generator_matrix("m", w_point)) == (1, -1, 0, 1)
    assert tuple(generator_matrix("N", w_point)) == (1, 2j, 0, 1)


def test_generator_determinants():
    rng = random.Random(1)
    for _ in range(100):
        p = _random_point(rng)
        for letter in ALPHABET:
            a, b, c, d = generator_matrix(letter, p)
            assert a * d - b * c == pytest.approx(1, abs=1e-12)


def test_relator_at_w(w_point):
    W = evaluate_word("gMGGMgN", w_point)
    for got, want in zip(W, (-1, 0, 0, -1)):
        assert abs(got - want) <= 1e-12


def test_empty_word_is_identity(w_point):
    assert tuple(evaluate_word("", w_point)) == (1, 0, 0, 1)


def test_word_length_guard(w_point):
    with pytest.raises(ValueError):
        evaluate_word("M" * 65, w_point)


def test_word_times_inverse():
    rng = random.Random(2)
    for _ in range(200):
        p = _random_point(rng)
        w = _random_word(rng, rng.randint(1, 10))
        a, b, c, d = evaluate_word(w + inverse_word(w), p)
        scale = max(1.0, *(abs(x) for x in evaluate_word(w, p))) ** 2
        for got, want in zip((a, b, c, d), (1, 0, 0, 1)):
            assert abs(got - want) <= 1e-12 * scale


def test_point_determinant():
    rng = random.Random(3)
    for _ in range(300):
        p = _random_point(rng)
        W = evaluate_word(_random_word(rng, rng.randint(0, 20)), p)
        growth = max(1.0, *(abs(x) for x in W)) ** 2
        assert abs(W.a * W.d - W.b * W.c - 1) <= 1e-10 * growth


# ----------------------------------------------------------------- jet path


def _mp_word(word, P, S, L):
    """Independent 2x2 evaluation at high precision."""
    i = mpmath.mpc(0, 1)
    mats = {
        "M": mpmath.matrix([[1, 1], [0, 1]]),
        "m": mpmath.matrix([[1, -1], [0, 1]]),
        "N": mpmath.matrix([[1, L], [0, 1]]),
        "n": mpmath.matrix([[1, -L], [0, 1]]),
        "G": mpmath.matrix([[P * S * i, i / S], [S * i, 0]]),
        "g": mpmath.matrix([[0, -i / S], [-S * i, P * S * i]]),
    }
    W = mpmath.eye(2)
    for letter in word:
        W = W * mats[letter]
    return W


def _random_code(rng):
    return "".join(rng.choice("01") for _ in range(rng.randint(36, 72)))


def test_jet_contains_sampled_values():
    rng = random.Random(4)
    n = 0
    with mpmath.workprec(160):
        while n < 150:
            box = box_from_code(_random_code(rng))
            pj = param_jets(box)
            word = _random_word(rng, rng.randint(1, 12))
            try:
                W = evaluate_word(word, pj)
            except ArithmeticError:
                continue
            n += 1
            for _ in range(5):
                t = [rng.uniform(-1, 1) * (1 - 2 ** -30) for _ in range(6)]
                x = [mpmath.mpf(c) + mpmath.mpf(s) * u for c, s, u in zip(box.center, box.halfsize, t)]
                P, S, L = (mpmath.mpc(x[5], x[2]), mpmath.mpc(x[4], x[1]), mpmath.mpc(x[3], x[0]))
                z = []
                for k, var in enumerate((L, S, P)):
                    re, im = 3 + k, k
                    z.append((var - mpmath.mpc(box.center[re], box.center[im]))
                             / mpmath.mpc(box.halfsize[re], box.halfsize[im]))
                ref = _mp_word(word, P, S, L)
                for jet, val in zip(W, (ref[0, 0], ref[0, 1], ref[1, 0], ref[1, 1])):
                    aff = (mpmath.mpc(jet.c.real, jet.c.imag)
                           + sum(mpmath.mpc(a.real, a.imag) * zk for a, zk in zip(jet.partials, z)))
                    assert abs(val - aff) <= jet.e


def test_jet_point_consistency_at_center(w_code42):
    rng = random.Random(5)
    codes = [w_code42] + [_random_code(rng) for _ in range(60)]
    for code in codes:
        box = box_from_code(code)
        pj = param_jets(box)
        word = "gMGGMgN" if code == w_code42 else _random_word(rng, 8)
        try:
            W = evaluate_word(word, pj)
        except ArithmeticError:
            continue
        with mpmath.workprec(160):
            ref = _mp_word(word, mpmath.mpc(pj.P.c.real, pj.P.c.imag),
                           mpmath.mpc(pj.S.c.real, pj.S.c.imag), mpmath.mpc(pj.L.c.real, pj.L.c.imag))
            for jet, val in zip(W, (ref[0, 0], ref[0, 1], ref[1, 0], ref[1, 1])):
                assert abs(val - mpmath.mpc(jet.c.real, jet.c.imag)) <= jet.e


def test_jet_determinant_contains_one():
    rng = random.Random(6)
    checked = 0
    while checked < 100:
        pj = param_jets(box_from_code(_random_code(rng)))
        try:
            W = evaluate_word(_random_word(rng, rng.randint(0, 20)), pj)
            det = jet_sub(jet_mul(W.a, W.d), jet_mul(W.b, W.c))
        except ArithmeticError:
            continue
        checked += 1
        spread = abs(det.c - 1) + sum(abs(a) for a in det.partials)
        assert spread <= det.e * (1 + 1e-12)


def test_relator_jet_near_w(w_point):
    pj = param_jets(box_from_code(locate(point_coords(*w_point), 60)))
    W = evaluate_word("gMGGMgN", pj)
    # the value at w itself must be reachable inside every entry's jet-set
    for jet, want in zip(W, (-1, 0, 0, -1)):
        assert abs(jet.c - want) <= sum(abs(a) for a in jet.partials) + jet.e
