import random

import pytest

from ethroot import gfpoly
from ethroot.errors import (
    BudgetExceeded,
    IncompatibleFields,
    NotAPower,
    NotInGroup,
    ZeroInput,
)
from ethroot.fq import (
    FqField,
    factor_mod_p,
    fq_dlog_order_e,
    fq_eth_root,
    fq_norm_to_subfield,
)
from ethroot.primes import is_prime


def make_field(p, d, seed=1):
    if d == 1:
        return FqField(p, [0, 1])
    rng = random.Random(seed)
    return FqField(p, gfpoly.random_irreducible(d, p, rng))


def prime_powers_upto(bound):
    out = []
    for p in range(3, bound + 1):
        if not is_prime(p):
            continue
        q, d = p, 1
        while q <= bound:
            out.append((p, d, q))
            q, d = q * p, d + 1
    return out


# -- factor_mod_p --------------------------------------------------------------


def test_factor_example_x2_plus_1_mod_5():
    fac = factor_mod_p([1, 0, 1], 5, seed=0)
    assert fac == [([2, 1], 1), ([3, 1], 1)]


def test_factor_multiplicity():
    # (x+1)^2 * (x^2+1) mod 3
    f = gfpoly.mul(gfpoly.mul([1, 1], [1, 1], 3), [1, 0, 1], 3)
    fac = factor_mod_p(f + [0], 3, seed=5) if f[-1] != 1 else factor_mod_p(f, 3, seed=5)
    assert ([1, 1], 2) in fac
    assert ([1, 0, 1], 1) in fac


def test_factor_deterministic_and_reconstructs():
    rng = random.Random(7)
    for _ in range(25):
        p = rng.choice([2, 3, 5, 13, 31])
        d = rng.randrange(1, 7)
        f = [rng.randrange(p) for _ in range(d)] + [1]
        fac1 = factor_mod_p(f, p, seed=42)
        fac2 = factor_mod_p(f, p, seed=42)
        assert fac1 == fac2
        prod = [1]
        for g, mult in fac1:
            assert gfpoly.is_irreducible(g, p)
            for _ in range(mult):
                prod = gfpoly.mul(prod, g, p)
        assert prod == gfpoly.from_int_poly(f, p)


def test_factor_requires_monic():
    with pytest.raises(ValueError):
        factor_mod_p([1, 2], 5)


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError):
        FqField(5, [4, 0, 1])  # x^2 - 1 = (x-1)(x+1)


# -- fq_eth_root ---------------------------------------------------------------


def test_root_spec_values():
    f7 = make_field(7, 1)
    assert fq_eth_root(f7.element(2), 5) == f7.element(4)
    f13 = make_field(13, 1)
    assert fq_eth_root(f13.element(8), 3) == f13.element(5)
    f19 = make_field(19, 1)
    r = fq_eth_root(f19.element(8), 3)
    assert r in {f19.element(2), f19.element(3), f19.element(14)}


def test_root_zero_input():
    f7 = make_field(7, 1)
    with pytest.raises(ZeroInput):
        fq_eth_root(f7.zero, 3)


@pytest.mark.parametrize("e", [3, 5, 7, 9])
def test_root_exhaustive_small(e):
    # brute-force oracle over every odd prime power q <= 50
    for p, d, q in prime_powers_upto(50):
        field = make_field(p, d)
        table = {}
        for x in field.elements():
            if x.is_zero():
                continue
            table.setdefault(x ** e, []).append(x)
        unique = len(table) == q - 1
        for y, roots in table.items():
            x = fq_eth_root(y, e)
            assert x ** e == y
            if unique:
                assert x == roots[0]
        if not unique:
            non_power = next(
                z for z in field.elements() if not z.is_zero() and z not in table
            )
            with pytest.raises(NotAPower):
                fq_eth_root(non_power, e)


def test_root_char2_field():
    field = make_field(2, 4, seed=3)  # F_16, 3 | q - 1
    for x in field.elements():
        if x.is_zero():
            continue
        y = x ** 3
        r = fq_eth_root(y, 3)
        assert r ** 3 == y


# -- norms ----------------------------------------------------------------------


def _find_embedding(big, sub):
    for x in big.elements():
        acc = big.zero
        cur = big.one
        for c in sub.modulus:
            acc = acc + cur * c
            cur = cur * x
        if acc.is_zero() and not x.is_zero():
            return x
    raise AssertionError("no embedding found")


def test_norm_to_subfield_matches_power_formula():
    big = make_field(3, 4, seed=2)
    sub = make_field(3, 2, seed=2)
    emb = _find_embedding(big, sub)
    rng = random.Random(11)
    for _ in range(40):
        x = big.random_element(rng)
        if x.is_zero():
            continue
        n = fq_norm_to_subfield(x, emb, sub)
        # image back in the big field must equal x^((q-1)/(q'-1))
        img = big.zero
        cur = big.one
        for c in n.coeffs:
            img = img + cur * c
            cur = cur * emb
        assert img == x ** ((big.q - 1) // (sub.q - 1))


def test_norm_multiplicative():
    big = make_field(5, 4, seed=9)
    sub = make_field(5, 2, seed=9)
    emb = _find_embedding(big, sub)
    rng = random.Random(13)
    for _ in range(30):
        x, y = big.random_element(rng), big.random_element(rng)
        if x.is_zero() or y.is_zero():
            continue
        lhs = fq_norm_to_subfield(x * y, emb, sub)
        rhs = fq_norm_to_subfield(x, emb, sub) * fq_norm_to_subfield(y, emb, sub)
        assert lhs == rhs


def test_norm_incompatible_fields():
    big = make_field(3, 4)
    other = make_field(5, 2)
    with pytest.raises(IncompatibleFields):
        fq_norm_to_subfield(big.one, big.one, other)


# -- discrete logs ---------------------------------------------------------------


def test_dlog_spec_value():
    f31 = make_field(31, 1)
    assert fq_dlog_order_e(f31.element(16), f31.element(2), 5) == 4


def test_dlog_random_round_trip():
    rng = random.Random(3)
    f = make_field(1009, 1)  # 1009 - 1 = 16 * 63 = 2^4 * 3^2 * 7
    zeta = None
    for g in range(2, 1009):
        cand = f.element(g) ** ((1009 - 1) // 7)
        if cand != f.one:
            zeta = cand
            break
    for _ in range(25):
        j = rng.randrange(7)
        assert fq_dlog_order_e(zeta ** j, zeta, 7) == j


def test_dlog_not_in_group():
    f31 = make_field(31, 1)
    with pytest.raises(NotInGroup):
        fq_dlog_order_e(f31.element(3), f31.element(2), 5)  # 3^5 = 243 != 1


def test_dlog_budget():
    f31 = make_field(31, 1)
    with pytest.raises(BudgetExceeded):
        fq_dlog_order_e(f31.one, f31.element(2), 3 ** 26)
