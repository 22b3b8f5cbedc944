import math
import random
from fractions import Fraction

import pytest

from ethroot import gfpoly
from ethroot.crtroot import eth_root_double_crt
from ethroot.errors import (
    DenominatorClash,
    RootSeedMissing,
    SeedInvalid,
    VerificationFailed,
)
from ethroot.fq import FqField, factor_mod_p
from ethroot.numfield import FactoredElement, NumberField, PrimeIdealRep
from ethroot.padic import (
    GAMMA,
    _hnf,
    babai_nearest_plane,
    build_ideal_lattice,
    eth_root_padic,
    eth_root_padic_reconstruct,
    find_inert_prime,
    hensel_factor_lift,
    hensel_lift,
    is_inert,
    lll_reduce,
    make_context,
    precision_estimate,
    stats,
)
from ethroot.primes import multiplicative_order


def factored(K, pairs):
    return FactoredElement(K, pairs)


# -- context and prime selection --------------------------------------------


def test_make_context_small():
    ctx = make_context(7, 3, 10, [1, 0, 1])
    assert ctx.kappa == 1 and ctx.target_modulus == 49
    assert ctx.target_modulus > 2 * ctx.B


def test_make_context_minimal_kappa():
    B = 3 ** 40
    ctx = make_context(3, 5, B, [1, 1, 1])
    assert ctx.target_modulus == 3 ** (1 << ctx.kappa)
    assert ctx.target_modulus > 2 * B
    assert 3 ** (1 << (ctx.kappa - 1)) <= 2 * B


def test_make_context_rejects_p_dividing_e():
    with pytest.raises(ValueError):
        make_context(3, 9, 100, [1, 1, 1])


def test_is_inert_examples():
    Ki = NumberField.cyclotomic(4)
    assert is_inert(Ki, 7)  # x^2 + 1 irreducible mod 7
    assert not is_inert(Ki, 5)  # splits
    assert not is_inert(Ki, 2)  # ramified
    K9 = NumberField.cyclotomic(9)
    assert is_inert(K9, 2)  # 2 has order 6 = phi(9) mod 9
    Kg = NumberField([2, 0, 1])  # x^2 + 2
    assert is_inert(Kg, 5)
    assert not is_inert(Kg, 11)


def test_find_inert_prime_cyclotomic():
    Ki = NumberField.cyclotomic(4)
    p = find_inert_prime(Ki, 3, seed=1)
    assert p is not None and p % 4 == 3 and p.bit_length() == 16
    K9 = NumberField.cyclotomic(9)
    p9 = find_inert_prime(K9, 3, seed=1)
    assert p9 is not None and multiplicative_order(p9 % 9, 9) == 6


def test_find_inert_prime_none_for_noncyclic():
    assert find_inert_prime(NumberField.cyclotomic(8), 3) is None
    assert find_inert_prime(NumberField.cyclotomic(15), 7) is None
    # same field without the conductor tag: budget has to discover it
    Kg = NumberField([1, 0, 0, 0, 1])
    assert find_inert_prime(Kg, 3, budget=50) is None


def test_find_inert_prime_avoid_and_determinism():
    Ki = NumberField.cyclotomic(4)
    p1 = find_inert_prime(Ki, 3, seed=9)
    assert p1 == find_inert_prime(Ki, 3, seed=9)
    p2 = find_inert_prime(Ki, 3, seed=9, avoid=(p1,))
    assert p2 is not None and p2 != p1


# -- Hensel lifting -----------------------------------------------------------


def test_hensel_lift_fixed_point():
    ctx = make_context(7, 3, 10 ** 6, [1, 0, 1])
    field = FqField(7, [1, 0, 1])
    assert hensel_lift([1], field.one, 3, ctx) == [1]


def test_hensel_lift_seed_invalid():
    ctx = make_context(7, 3, 100, [1, 0, 1])
    field = FqField(7, [1, 0, 1])
    with pytest.raises(SeedInvalid):
        hensel_lift([3], field.one, 3, ctx)


def test_hensel_lift_convergence_checked_every_step():
    before = stats["lift_checks"]
    ctx = make_context(7, 3, 10 ** 30, [1, 0, 1])
    field = FqField(7, [1, 0, 1])
    # a = (y^{e-1}) for y = -2 + 2i, e = 3; seed from the residue field
    K = NumberField.cyclotomic(4)
    x = eth_root_padic(factored(K, [(K.element([-2, 2]), 1)]), 3, K, 7)
    assert x == K.element([1, 1])  # (1+i)^3 = -2+2i
    assert stats["lift_checks"] > before
    assert ctx.kappa >= 2  # the context above really has steps to run


def test_eth_root_padic_trivial_and_errors():
    K = NumberField.cyclotomic(4)
    assert eth_root_padic(factored(K, []), 3, K, 7) == K.one
    with pytest.raises(ValueError):
        eth_root_padic(factored(K, [(K.gen, 1)]), 3, K, 5)  # 5 splits
    with pytest.raises(ValueError):
        eth_root_padic(factored(K, [(K.gen, -1)]), 3, K, 7)


def test_eth_root_padic_round_trip_unique_root():
    rng = random.Random(11)
    for m in (4, 5):
        K = NumberField.cyclotomic(m)
        p = find_inert_prime(K, 3, seed=3)
        for _ in range(3):
            x = K.random_element(rng, bits=40)
            if x == K.zero:
                continue
            root = eth_root_padic(factored(K, [(x, 3)]), 3, K, p, seed=5)
            assert root == x  # zeta_3 not in K: the root is unique


def test_eth_root_padic_round_trip_unity_ambiguity():
    # zeta_3 lies in Q(zeta_9): the returned root may be twisted by it
    K = NumberField.cyclotomic(9)
    p = find_inert_prime(K, 3, seed=4)
    rng = random.Random(13)
    x = K.random_element(rng, bits=30)
    y = factored(K, [(x, 3)])
    root = eth_root_padic(y, 3, K, p, seed=6)
    assert root ** 3 == y.value()
    ratio = root / x
    assert ratio ** 3 == K.one


def test_eth_root_padic_multi_term_rational():
    K = NumberField.cyclotomic(5)
    rng = random.Random(17)
    x = K.random_element(rng, bits=30)
    u = x * K.element([3], 7)
    v = (x * x) * K.element([7], 3)
    y = factored(K, [(u, 1), (v, 1)])  # u v = x^3
    p = find_inert_prime(K, 3, seed=2, avoid=(21,))
    assert eth_root_padic(y, 3, K, p, seed=1) == x


def test_eth_root_padic_denominator_clash():
    K = NumberField.cyclotomic(4)
    y = factored(K, [(K.element([1, 2], 7), 3)])
    with pytest.raises(DenominatorClash):
        eth_root_padic(y, 3, K, 7)


def test_eth_root_padic_local_obstruction():
    # 2 is not a cube in F_49, so the seed root does not exist
    K = NumberField.cyclotomic(4)
    with pytest.raises(RootSeedMissing):
        eth_root_padic(factored(K, [(K.element([2]), 1)]), 3, K, 7)
    # and a non-unit above p is caught up front
    with pytest.raises(RootSeedMissing):
        eth_root_padic(factored(K, [(K.element([7]), 1)]), 3, K, 7)


def test_eth_root_padic_global_non_power():
    # (1+i)^3 (1+7i) is a cube residue mod 7 but not a cube in Q(i)
    K = NumberField.cyclotomic(4)
    u = (K.element([1, 1]) ** 3) * K.element([1, 7])
    with pytest.raises(VerificationFailed):
        eth_root_padic(factored(K, [(u, 1)]), 3, K, 7)


def test_eth_root_padic_agrees_with_double_crt():
    K = NumberField.cyclotomic(5)
    rng = random.Random(23)
    x = K.random_element(rng, bits=35)
    y = factored(K, [(x, 3)])
    p = find_inert_prime(K, 3, seed=8)
    assert eth_root_padic(y, 3, K, p, seed=1) == eth_root_double_crt(y, 3, K, seed=1)


# -- precision estimate -------------------------------------------------------


def test_precision_estimate_substitution():
    n, f_deg, p, B = 8, 2, 13, 1 << 50
    a = precision_estimate(n, f_deg, p, B)
    rhs = (n / (f_deg * math.log(p))) * (
        math.log(2 * B) + (n * (n - 1) / 4 - 1) * math.log(GAMMA)
    )
    assert a & (a - 1) == 0  # power of two
    assert a > rhs
    assert a == 1 or a // 2 <= rhs


def test_precision_estimate_monotone():
    a1 = precision_estimate(8, 2, 13, 1 << 50)
    a2 = precision_estimate(8, 2, 13, 1 << 200)
    assert a2 >= a1
    # inert case: the whole field is one completion, so less precision works
    assert precision_estimate(4, 4, 13, 1 << 50) <= precision_estimate(4, 1, 13, 1 << 50)


def test_precision_estimate_rejects_tiny_bound():
    with pytest.raises(ValueError):
        precision_estimate(4, 2, 13, 0)


# -- factor lifting and the ideal lattice ------------------------------------


def _quartic_factor_mod_13():
    K = NumberField.cyclotomic(8)
    fac = factor_mod_p(list(K.f), 13, seed=1)
    assert sorted(len(g) - 1 for g, _ in fac) == [2, 2]
    return K, fac[0][0]


def test_hensel_factor_lift_invariants():
    K, g = _quartic_factor_mod_13()
    ga = hensel_factor_lift(g, list(K.f), 13, 8)
    assert ga[-1] == 1 and len(ga) == len(g)
    assert gfpoly.from_int_poly(ga, 13) == gfpoly.trim(list(g))
    M = 13 ** 8
    assert gfpoly.rem([c % M for c in K.f], ga, M) == []
    assert hensel_factor_lift(g, list(K.f), 13, 1) == gfpoly.trim(list(g))


def test_hensel_factor_lift_rejects_non_factor():
    K = NumberField.cyclotomic(8)
    with pytest.raises(ValueError):
        hensel_factor_lift([1, 0, 1], list(K.f), 13, 4)  # x^2+1 does not divide


def test_ideal_lattice_membership_and_det():
    K, g = _quartic_factor_mod_13()
    pil = PrimeIdealRep(13, tuple(g), 2)
    a = 4
    lat = build_ideal_lattice(pil, a, K)
    M = 13 ** a
    ga = hensel_factor_lift(g, list(K.f), 13, a)
    det = 1
    for i, row in enumerate(lat.basis):
        det *= row[i]
        assert all(row[j] == 0 for j in range(i))  # upper triangular
        assert gfpoly.rem(gfpoly.trim([c % M for c in row]), ga, M) == []
    assert det == 13 ** (a * pil.f_deg)


def test_ideal_lattice_inert_degenerates_to_scalar():
    K = NumberField.cyclotomic(4)
    pil = PrimeIdealRep(7, tuple(int(c) for c in K.f), 2)
    lat = build_ideal_lattice(pil, 3, K)
    assert [list(r) for r in lat.basis] == [[343, 0], [0, 343]]


def test_hnf_unimodular_and_rank():
    assert _hnf([[2, 1], [1, 1], [3, 0]], 2) == [[1, 0], [0, 1]]
    with pytest.raises(ValueError):
        _hnf([[1, 0], [2, 0]], 2)


# -- LLL and Babai ------------------------------------------------------------


def _gso(rows):
    n = len(rows)
    bs, norms, mus = [], [], []
    for i in range(n):
        v = [Fraction(c) for c in rows[i]]
        mrow = []
        for j in range(i):
            mu = sum(Fraction(a) * c for a, c in zip(rows[i], bs[j])) / norms[j]
            mrow.append(mu)
            v = [x - mu * y for x, y in zip(v, bs[j])]
        bs.append(v)
        norms.append(sum(x * x for x in v))
        mus.append(mrow)
    return bs, norms, mus


def test_lll_identity_fixed():
    eye = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert lll_reduce(eye) == eye


def test_lll_skew_basis():
    red = lll_reduce([[1, 0], [1000, 1]])
    assert max(abs(c) for row in red for c in row) <= 1
    assert _hnf(red, 2) == [[1, 0], [0, 1]]  # same lattice


def test_lll_conditions_and_lattice_equality():
    rng = random.Random(31)
    for _ in range(5):
        rows = [[rng.randrange(-50, 51) for _ in range(4)] for _ in range(4)]
        for i in range(4):
            rows[i][i] += 500  # keep it nonsingular
        red = lll_reduce(rows)
        assert _hnf(red, 4) == _hnf(rows, 4)
        bs, norms, mus = _gso(red)
        for i in range(4):
            for j in range(i):
                assert abs(mus[i][j]) <= Fraction(1, 2)
        for k in range(1, 4):
            assert norms[k] >= (Fraction(99, 100) - mus[k][k - 1] ** 2) * norms[k - 1]


def test_babai_scalar_lattice():
    basis = [[5, 0], [0, 5]]
    assert babai_nearest_plane(basis, [7, -8]) == [5, -10]


def test_babai_membership_and_quality():
    basis = lll_reduce([[13, 4], [7, 11]])
    target = [29, -23]
    w = babai_nearest_plane(basis, target)
    assert _hnf(basis + [w], 2) == _hnf(basis, 2)  # w is in the lattice
    best = min(
        sum((t - (i * basis[0][k] + j * basis[1][k])) ** 2 for k, t in enumerate(target))
        for i in range(-40, 41)
        for j in range(-40, 41)
    )
    got = sum((t - c) ** 2 for t, c in zip(target, w))
    assert got <= 2 * best  # nearest-plane is within the usual approximation slack


# -- reconstruction -----------------------------------------------------------


def test_reconstruct_round_trip_zeta8():
    K, g = _quartic_factor_mod_13()
    pil = PrimeIdealRep(13, tuple(g), 2)
    rng = random.Random(41)
    for _ in range(3):
        x = K.random_element(rng, bits=30)
        if x == K.zero:
            continue
        y = factored(K, [(x, 3)])
        assert eth_root_padic_reconstruct(y, 3, K, pil, seed=7) == x


def test_reconstruct_trivial():
    K = NumberField.cyclotomic(8)
    pil = PrimeIdealRep(13, tuple(factor_mod_p(list(K.f), 13, seed=1)[0][0]), 2)
    assert eth_root_padic_reconstruct(factored(K, []), 3, K, pil) == K.one


def test_reconstruct_inert_pil_matches_padic():
    K = NumberField.cyclotomic(4)
    pil = PrimeIdealRep(7, tuple(int(c) for c in K.f), 2)
    rng = random.Random(43)
    x = K.random_element(rng, bits=25)
    y = factored(K, [(x, 3)])
    assert eth_root_padic_reconstruct(y, 3, K, pil, seed=3) == eth_root_padic(
        y, 3, K, 7, seed=3
    )


def test_reconstruct_local_obstruction():
    K, g = _quartic_factor_mod_13()
    pil = PrimeIdealRep(13, tuple(g), 2)
    with pytest.raises(RootSeedMissing):
        eth_root_padic_reconstruct(factored(K, [(K.element([2]), 1)]), 3, K, pil)


def test_reconstruct_global_non_power_fails_after_doublings():
    K, g = _quartic_factor_mod_13()
    pil = PrimeIdealRep(13, tuple(g), 2)
    before = stats["doublings"]
    with pytest.raises(VerificationFailed):
        eth_root_padic_reconstruct(factored(K, [(K.element([14]), 1)]), 3, K, pil)
    assert stats["doublings"] > before


def test_reconstruct_rational_denominators():
    K, g = _quartic_factor_mod_13()
    pil = PrimeIdealRep(13, tuple(g), 2)
    rng = random.Random(47)
    x = K.random_element(rng, bits=20)
    u = x * K.element([3], 5)
    v = (x * x) * K.element([5], 3)
    y = factored(K, [(u, 1), (v, 1)])
    assert eth_root_padic_reconstruct(y, 3, K, pil, seed=9) == x
