"""Small integer number theory: primality, prime powers, CRT, orders.

All functions work on plain Python ints and are deterministic. Randomized
search helpers take an explicit random.Random.
"""

from __future__ import annotations

import math
import random

from .errors import Unsupported

# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10^24
# (covers every modulus this package samples, which stay under 2^64).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    n += 1
    if n <= 2:
        return 2
    if n % 2 == 0:
        n += 1
    while not is_prime(n):
        n += 2
    return n


def random_prime(rng: random.Random, bits: int) -> int:
    """Random prime in [2^(bits-1), 2^bits)."""
    assert bits >= 2
    while True:
        n = rng.randrange(1 << (bits - 1), 1 << bits) | 1
        if is_prime(n):
            return n


def iroot(n: int, k: int) -> int:
    """Floor of the integer k-th root of n >= 0."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0, k >= 1")
    if n < 2 or k == 1:
        return n
    x = 1 << (-(-n.bit_length() // k))  # upper start
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def prime_power_split(e: int) -> tuple[int, int]:
    """Return (l, k) with e = l^k, l prime. Raises Unsupported otherwise."""
    if e < 2:
        raise Unsupported(f"e = {e} is not a prime power")
    if is_prime(e):
        return e, 1
    for k in range(e.bit_length(), 1, -1):
        r = iroot(e, k)
        if r ** k == e and is_prime(r):
            return r, k
    raise Unsupported(f"e = {e} is not a prime power")


def check_odd_prime_power(e: int) -> tuple[int, int]:
    l, k = prime_power_split(e)
    if l == 2:
        raise Unsupported("even e is out of scope")
    return l, k


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def modinv(a: int, m: int) -> int:
    g, x, _ = xgcd(a % m, m)
    if g != 1:
        raise ValueError(f"{a} not invertible mod {m}")
    return x % m


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    """Combine x = r1 mod m1, x = r2 mod m2 for coprime moduli."""
    inv = modinv(m1 % m2, m2)
    t = (r2 - r1) * inv % m2
    return r1 + m1 * t, m1 * m2

def crt_list(residues: list[int], moduli: list[int]) -> tuple[int, int]:
    """CRT over pairwise coprime moduli, combined as a balanced tree."""
    pairs = list(zip(residues, moduli))
    if not pairs:
        raise ValueError("empty CRT input")
    while len(pairs) > 1:
        nxt = []
        for i in range(0, len(pairs) - 1, 2):
            (r1, m1), (r2, m2) = pairs[i], pairs[i + 1]
            nxt.append(crt_pair(r1, m1, r2, m2))
        if len(pairs) % 2:
            nxt.append(pairs[-1])
        pairs = nxt
    return pairs[0]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division + Pollard rho. For moduli-sized n."""
    assert n >= 1
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return out


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        x = rng.randrange(2, n)
        y, c, d = x, rng.randrange(1, n), 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def euler_phi(n: int) -> int:
    phi = 1
    for p, k in factorize(n).items():
        phi *= (p - 1) * p ** (k - 1)
    return phi


def multiplicative_order(a: int, m: int) -> int:
    """Order of a in (Z/m)^*. Requires gcd(a, m) = 1."""
    a %= m
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} not a unit mod {m}")
    order = euler_phi(m)
    for p in sorted(factorize(order)):
        while order % p == 0 and pow(a, order // p, m) == 1:
            order //= p
    return order


def is_cyclic_unit_group(m: int) -> bool:
    """Whether (Z/m)^* is cyclic: m in {1, 2, 4, p^k, 2 p^k} for odd p."""
    if m in (1, 2, 4):
        return True
    if m % 2 == 0:
        m //= 2
        if m % 2 == 0:
            return False
    fac = factorize(m)
    return len(fac) == 1 and 2 not in fac


def derive_rng(seed: int, tag: str) -> random.Random:
    """Independent deterministic stream for (seed, tag)."""
    return random.Random(f"{seed}:{tag}")
