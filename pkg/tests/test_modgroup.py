import math
import random
from fractions import Fraction

import pytest

from supnormlab.modgroup import (
    IDENTITY,
    S,
    U,
    GroupElement,
    act,
    ball,
    j_factor,
    parse_group,
    reduce_to_fd,
    u_pow,
)


def _prime_divisors(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def index_gamma0(n):
    r = n
    for p in _prime_divisors(n):
        r += r // p
    return r


def index_gamma1_pm(n):
    if n == 1:
        return 1
    r = n * n
    for p in _prime_divisors(n):
        r = r // (p * p) * (p * p - 1)
    return r if n <= 2 else r // 2


def index_gamma_pm(n):
    if n == 1:
        return 1
    r = n ** 3
    for p in _prime_divisors(n):
        r = r // (p * p) * (p * p - 1)
    return r if n <= 2 else r // 2


def test_group_element_arithmetic():
    g = GroupElement(2, 1, 1, 1)
    assert g @ g.inv() == IDENTITY
    assert (S @ S) == -IDENTITY
    assert u_pow(5) @ u_pow(-5) == IDENTITY
    with pytest.raises(ValueError):
        GroupElement(1, 2, 3, 4)
    z = 0.3 + 1.7j
    assert act(U, z) == pytest.approx(z + 1)
    assert act(S, 2j) == pytest.approx(0.5j)
    assert j_factor(g, z) == pytest.approx(z + 1)


def test_reduce_to_fd_properties():
    rng = random.Random(5)
    for _ in range(300):
        z = complex(rng.uniform(-30, 30), math.exp(rng.uniform(-8, 4)))
        g, w = reduce_to_fd(z)
        assert abs(w.real) <= 0.5 + 1e-9
        assert abs(w) >= 1 - 1e-9
        assert g.act(z) == pytest.approx(w, rel=1e-9, abs=1e-12)


def test_ball_pinned_examples():
    got = ball(1j, 1.0)
    assert len(got) == 4
    as_set = {(g.a, g.b, g.c, g.d) for g in got}
    assert as_set == {(1, 0, 0, 1), (-1, 0, 0, -1), (0, -1, 1, 0), (0, 1, -1, 0)}
    assert ball(1j, 0.5) == []


def test_ball_covers_all_small_rows():
    z = 0.37 + 0.9j
    R = 3.0
    rows = {(g.c, g.d) for g in ball(z, R)}
    for c in range(-8, 9):
        for d in range(-12, 13):
            if math.gcd(c, d) != 1:
                continue
            if abs(c * z + d) <= R - 1e-9:
                assert (c, d) in rows
    # canonical completions keep the real part small
    for g in ball(z, R):
        assert abs(g.act(z).real) <= 0.5 + 1e-9


def test_full_group_basics():
    g = parse_group("full")
    assert g.index == 1 == g.mu
    assert g.width_of_infinity == 1
    cusps = g.cusp_set()
    assert len(cusps) == 1 and cusps[0].is_infinity and cusps[0].width == 1


def test_gamma0_4_cusps_pinned():
    g = parse_group("gamma0:4")
    assert g.index == 6
    cusps = g.cusp_set()
    table = {("oo" if cu.q == 0 else Fraction(cu.p, cu.q)): cu.width for cu in cusps}
    assert table == {"oo": 1, Fraction(0): 4, Fraction(1, 2): 1}
    for cu in cusps:
        if cu.q:
            img = cu.scaling.apply_infinity()
            assert Fraction(img[0], img[1]) == Fraction(cu.p, cu.q)


def test_gamma0_2_cusps_pinned():
    g = parse_group("gamma0:2")
    assert g.index == 3
    table = {("oo" if cu.q == 0 else Fraction(cu.p, cu.q)): cu.width
             for cu in g.cusp_set()}
    assert table == {"oo": 1, Fraction(0): 2}


def test_gamma_2_cusps():
    g = parse_group("gamma:2")
    assert g.index == 6
    table = {("oo" if cu.q == 0 else Fraction(cu.p, cu.q)): cu.width
             for cu in g.cusp_set()}
    assert table == {"oo": 2, Fraction(0): 2, Fraction(1): 2}


def test_minus_identity_always_member():
    for desc in ("full", "gamma0:7", "gamma1:5", "gamma:3"):
        assert parse_group(desc).contains(-IDENTITY)


def test_index_formulas():
    for n in range(1, 31):
        assert parse_group(f"gamma0:{n}").index == index_gamma0(n)
    for n in range(1, 16):
        assert parse_group(f"gamma1:{n}").index == index_gamma1_pm(n)
    for n in range(1, 9):
        assert parse_group(f"gamma:{n}").index == index_gamma_pm(n)


def test_width_sum_equals_index():
    for desc in ("gamma0:12", "gamma0:25", "gamma1:8", "gamma1:11", "gamma:5"):
        g = parse_group(desc)
        assert sum(cu.width for cu in g.cusp_set()) == g.index


def test_width_at_scaling():
    g = parse_group("gamma0:4")
    assert g.width_at_scaling(IDENTITY) == 1
    assert g.width_at_scaling(S) == 4  # the cusp 0


def test_membership_tables():
    g0 = parse_group("gamma0:4")
    assert g0.contains(GroupElement(1, 0, 4, 1))
    assert not g0.contains(GroupElement(1, 0, 2, 1))
    g1 = parse_group("gamma1:5")
    assert g1.contains(GroupElement(1, 3, 0, 1) @ GroupElement(1, 0, 5, 1))
    assert g1.contains(-GroupElement(1, 0, 5, 1))  # -I adjoined
    assert not g1.contains(GroupElement(2, 1, 5, 3))
    gp = parse_group("gamma:3")
    assert gp.contains(GroupElement(1, 3, 3, 10))
    assert not gp.contains(GroupElement(1, 1, 3, 4))


def test_conjugate_subgroup():
    g = parse_group("gamma0:4")
    conj = g.conjugate(S)  # S^-1 Gamma_0(4) S
    assert conj.index == g.index
    # S (a b; c d) S^-1 = (d -c; -b a): membership swaps the roles of b and c
    assert conj.contains(GroupElement(1, 4, 0, 1))
    assert not conj.contains(GroupElement(1, 1, 0, 1))
    assert conj.width_of_infinity == 4
    rng = random.Random(3)
    for _ in range(50):
        word = IDENTITY
        for _ in range(6):
            word = word @ (U if rng.random() < 0.5 else S)
        assert conj.contains(word) == g.contains(S @ word @ S.inv())


def test_coset_reps_hit_every_label_once():
    g = parse_group("gamma1:7")
    reps = g.coset_reps()
    labels = {g.label(r) for r in reps}
    assert len(labels) == len(reps) == g.index


def test_parse_group_errors():
    with pytest.raises(ValueError):
        parse_group("gamma2:5")
    with pytest.raises(ValueError):
        parse_group("gamma0:x")
