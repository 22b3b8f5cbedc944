import random

from ethroot.numfield import FactoredElement, NumberField
from ethroot.verify import verify_root


def test_root_of_unity_against_empty_product():
    # x = zeta_15^5 is a nontrivial cube root of 1 = the empty product
    K = NumberField.cyclotomic(15)
    x = K.gen ** 5
    assert verify_root(x, FactoredElement(K, []), 3, K)
    assert not verify_root(K.gen, FactoredElement(K, []), 3, K)


def test_round_trip_and_near_miss():
    K = NumberField.cyclotomic(16)
    rng = random.Random(7)
    for _ in range(5):
        x = K.random_element(rng, bits=30)
        y = FactoredElement(K, [(x, 3)])
        assert verify_root(x, y, 3, K)
        assert not verify_root(x + K.one, y, 3, K)


def test_rational_denominators():
    K = NumberField.cyclotomic(5)
    x = K.element([3, 1, 0, 4], 7)
    y = FactoredElement(K, [(x, 5)])
    assert verify_root(x, y, 5, K)


def test_negative_exponents_fold():
    K = NumberField.cyclotomic(4)
    x = K.element([2, 1])
    y = FactoredElement(K, [(x * x, 3), (x, -3)])  # value (x^2/x)^3 = x^3
    assert verify_root(x, y, 3, K)
    assert not verify_root(x + K.one, y, 3, K)


def test_determinism():
    K = NumberField.cyclotomic(7)
    rng = random.Random(1)
    x = K.random_element(rng, bits=20)
    y = FactoredElement(K, [(x, 3)])
    assert verify_root(x, y, 3, K, seed=5) == verify_root(x, y, 3, K, seed=5)


def test_large_field_modular_only():
    # n = 12 > 8 forces the purely modular path
    K = NumberField.cyclotomic(13)
    rng = random.Random(2)
    x = K.random_element(rng, bits=25)
    y = FactoredElement(K, [(x, 3)])
    assert verify_root(x, y, 3, K)
    assert not verify_root(x * K.gen, y, 3, K)
