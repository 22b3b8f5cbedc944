"""Dense polynomial arithmetic over F_p.

A polynomial is a list of ints in [0, p), index = degree, trailing zeros
stripped; [] is the zero polynomial. The prime lives in the call, not the
data, so callers must not mix moduli.
"""

from __future__ import annotations

import random


def trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def deg(a: list[int]) -> int:
    return len(a) - 1


def from_int_poly(a: list[int], p: int) -> list[int]:
    return trim([c % p for c in a])


def add(a: list[int], b: list[int], p: int) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = a[:]
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return trim(out)


def sub(a: list[int], b: list[int], p: int) -> list[int]:
    out = a[:] + [0] * (len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % p
    return trim(out)


def scale(a: list[int], c: int, p: int) -> list[int]:
    c %= p
    if c == 0:
        return []
    return trim([x * c % p for x in a])


def mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([c % p for c in out])


def divmod_(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = a[:]
    q = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = pow(b[-1], p - 2, p)
    db = deg(b)
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i] % p
        if c == 0:
            r[i] = 0
            continue
        f = c * inv_lead % p
        q[i - db] = f
        for j, y in enumerate(b):
            r[i - db + j] = (r[i - db + j] - f * y) % p
    return trim(q), trim(r)


def rem(a: list[int], b: list[int], p: int) -> list[int]:
    return divmod_(a, b, p)[1]


def monic(a: list[int], p: int) -> list[int]:
    if not a:
        return []
    return scale(a, pow(a[-1], p - 2, p), p)


def gcd(a: list[int], b: list[int], p: int) -> list[int]:
    while b:
        a, b = b, rem(a, b, p)
    return monic(a, p)


def mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    return rem(mul(a, b, p), mod, p)


def powmod(a: list[int], n: int, mod: list[int], p: int) -> list[int]:
    assert n >= 0
    result = [1]
    a = rem(a, mod, p)
    while n:
        if n & 1:
            result = mulmod(result, a, mod, p)
        a = mulmod(a, a, mod, p)
        n >>= 1
    return result


def invmod(a: list[int], mod: list[int], p: int) -> list[int]:
    """Inverse of a modulo mod; raises ZeroDivisionError if not coprime."""
    r0, r1 = mod[:], rem(a, mod, p)
    s0, s1 = [], [1]
    while r1:
        q, r = divmod_(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
    if deg(r0) != 0:
        raise ZeroDivisionError("element not invertible")
    return scale(s0, pow(r0[0], p - 2, p), p)


def evaluate(a: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def derivative(a: list[int], p: int) -> list[int]:
    return trim([i * c % p for i, c in enumerate(a)][1:])


def _frobenius_root(a: list[int], p: int) -> list[int]:
    # p-th root of a polynomial in x^p: coefficients of F_p are Frobenius-fixed.
    return trim([a[i] for i in range(0, len(a), p)])


def squarefree_parts(f: list[int], p: int) -> list[tuple[list[int], int]]:
    """Squarefree decomposition: list of (g, multiplicity), g monic squarefree."""
    f = monic(f, p)
    out: list[tuple[list[int], int]] = []
    _sqfree_rec(f, p, 1, out)
    return out


def _sqfree_rec(f: list[int], p: int, mult: int, out: list[tuple[list[int], int]]):
    if deg(f) < 1:
        return
    df = derivative(f, p)
    if not df:
        _sqfree_rec(_frobenius_root(f, p), p, mult * p, out)
        return
    c = gcd(f, df, p)
    w = divmod_(f, c, p)[0]
    i = 1
    while deg(w) > 0:
        y = gcd(w, c, p)
        z = divmod_(w, y, p)[0]
        if deg(z) > 0:
            out.append((z, mult * i))
        c = divmod_(c, y, p)[0]
        w = y
        i += 1
    if deg(c) > 0:
        _sqfree_rec(_frobenius_root(c, p), p, mult * p, out)


def _ddf(f: list[int], p: int) -> list[tuple[list[int], int]]:
    """Distinct-degree split of a monic squarefree f: list of (product, degree)."""
    out = []
    h = [0, 1]  # x
    v = f[:]
    d = 0
    while deg(v) >= 2 * (d + 1):
        d += 1
        h = powmod(h, p, v, p)
        g = gcd(sub(h, [0, 1], p), v, p)
        if deg(g) > 0:
            out.append((g, d))
            v = divmod_(v, g, p)[0]
            h = rem(h, v, p)
    if deg(v) > 0:
        out.append((v, deg(v)))
    return out


def _edf(f: list[int], d: int, p: int, rng: random.Random) -> list[list[int]]:
    """Equal-degree split of monic squarefree f, all factors of degree d."""
    n = deg(f)
    if n == d:
        return [f]
    while True:
        t = trim([rng.randrange(p) for _ in range(n)])
        if deg(t) < 1:
            continue
        g = gcd(t, f, p)
        if not 0 < deg(g) < n:
            if p == 2:
                # trace map over F_{2^d}
                u, acc = t[:], t[:]
                for _ in range(d - 1):
                    u = mulmod(u, u, f, p)
                    acc = add(acc, u, p)
                g = gcd(acc, f, p)
            else:
                s = powmod(t, (p ** d - 1) // 2, f, p)
                g = gcd(sub(s, [1], p), f, p)
        if 0 < deg(g) < n:
            h = divmod_(f, g, p)[0]
            return _edf(g, d, p, rng) + _edf(h, d, p, rng)


def factor(f: list[int], p: int, seed: int = 0) -> list[tuple[list[int], int]]:
    """Full factorization of f over F_p into monic irreducibles.

    Returns a list of (factor, multiplicity), sorted for determinism.
    Randomness in the equal-degree stage is driven only by `seed`.
    """
    rng = random.Random(f"gfpoly:{seed}")
    out: list[tuple[list[int], int]] = []
    for g, mult in squarefree_parts(f, p):
        for h, d in _ddf(g, p):
            for irr in _edf(h, d, p, rng):
                out.append((irr, mult))
    out.sort(key=lambda t: (deg(t[0]), t[0]))
    return out


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin test: x^(p^n) = x mod f and gcd conditions at maximal subdegrees."""
    n = deg(f)
    if n < 1:
        return False
    if n == 1:
        return True
    from .primes import factorize

    x = [0, 1]
    h = x
    powers = {}
    for i in range(1, n + 1):
        h = powmod(h, p, f, p)
        powers[i] = h
    if sub(powers[n], x, p):
        return False
    for q in factorize(n):
        if deg(gcd(sub(powers[n // q], x, p), f, p)) > 0:
            return False
    return True


def random_irreducible(d: int, p: int, rng: random.Random) -> list[int]:
    """Random monic irreducible of degree d over F_p."""
    while True:
        f = [rng.randrange(p) for _ in range(d)] + [1]
        if is_irreducible(f, p):
            return f
