"""Finite fields F_q, q = p^d, with the operations the root machinery needs.

Elements are fixed-length coefficient vectors over F_p modulo a monic
irreducible. The e-th root routine dispatches on v = v_l(q-1) for e = l^k:
v = 0 gives the unique-root exponent inverse, 0 < v <= k an exponent inverse
in the prime-to-l part, and v > k runs k successive l-th root extractions
(Adleman-Manders-Miller / Tonelli-Shanks style).
"""

from __future__ import annotations

import math
import random

from . import gfpoly
from .errors import (
    BudgetExceeded,
    IncompatibleFields,
    NotAPower,
    NotInGroup,
    NotInSubfield,
    ZeroInput,
)
from .primes import check_odd_prime_power, is_prime, modinv

_DLOG_BUDGET = 1 << 40


class FqField:
    """F_{p^d} = F_p[x] / (modulus), modulus monic irreducible of degree d."""

    def __init__(self, p: int, modulus: list[int]):
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        modulus = [c % p for c in modulus]
        if not modulus or modulus[-1] != 1:
            raise ValueError("modulus must be monic")
        d = len(modulus) - 1
        if d < 1:
            raise ValueError("modulus must have degree >= 1")
        if d <= 64 and not gfpoly.is_irreducible(modulus, p):
            raise ValueError("modulus is reducible")
        self.p = p
        self.d = d
        self.q = p ** d
        self.modulus = tuple(modulus)
        self._mod_list = modulus
        self._norm_cache: dict = {}

    def __eq__(self, other):
        return (
            isinstance(other, FqField)
            and self.p == other.p
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"FqField(p={self.p}, d={self.d})"

    # -- element constructors ------------------------------------------------

    def element(self, coeffs) -> "FqElement":
        if isinstance(coeffs, FqElement):
            if coeffs.field != self:
                raise IncompatibleFields("element from a different field")
            return coeffs
        if isinstance(coeffs, int):
            coeffs = [coeffs]
        c = [x % self.p for x in coeffs]
        if len(c) > self.d:
            c = gfpoly.rem(gfpoly.trim(c), self._mod_list, self.p)
        c = c + [0] * (self.d - len(c))
        return FqElement(self, tuple(c[: self.d]))

    @property
    def zero(self) -> "FqElement":
        return self.element(0)

    @property
    def one(self) -> "FqElement":
        return self.element(1)

    @property
    def gen(self) -> "FqElement":
        return self.element([0, 1])

    def element_at(self, idx: int) -> "FqElement":
        """idx-th element in the fixed base-p enumeration (0 is zero)."""
        coeffs = []
        for _ in range(self.d):
            coeffs.append(idx % self.p)
            idx //= self.p
        return self.element(coeffs)

    def elements(self):
        for i in range(self.q):
            yield self.element_at(i)

    def random_element(self, rng: random.Random) -> "FqElement":
        return self.element([rng.randrange(self.p) for _ in range(self.d)])


class FqElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FqField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    def _check(self, other) -> "FqElement":
        if isinstance(other, int):
            return self.field.element(other)
        if not isinstance(other, FqElement) or other.field != self.field:
            raise IncompatibleFields("mixed-field arithmetic")
        return other

    def _poly(self) -> list[int]:
        return gfpoly.trim(list(self.coeffs))

    def _wrap(self, poly: list[int]) -> "FqElement":
        c = poly + [0] * (self.field.d - len(poly))
        return FqElement(self.field, tuple(c))

    def __add__(self, other):
        other = self._check(other)
        p = self.field.p
        return FqElement(
            self.field,
            tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __sub__(self, other):
        other = self._check(other)
        p = self.field.p
        return FqElement(
            self.field,
            tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __neg__(self):
        p = self.field.p
        return FqElement(self.field, tuple(-a % p for a in self.coeffs))

    def __mul__(self, other):
        other = self._check(other)
        f = self.field
        return self._wrap(
            gfpoly.mulmod(self._poly(), other._poly(), f._mod_list, f.p)
        )

    __radd__ = __add__
    __rmul__ = __mul__

    def inverse(self) -> "FqElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        f = self.field
        return self._wrap(gfpoly.invmod(self._poly(), f._mod_list, f.p))

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def __pow__(self, n: int):
        f = self.field
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_zero():
            return f.one if n == 0 else f.zero
        n %= f.q - 1
        return self._wrap(gfpoly.powmod(self._poly(), n, f._mod_list, f.p))

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.element(other)
        return (
            isinstance(other, FqElement)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __repr__(self):
        return f"Fq{list(self.coeffs)}"


def factor_mod_p(f: list[int], p: int, seed: int = 0) -> list[tuple[list[int], int]]:
    """Factor a monic integer polynomial mod p into monic irreducibles.

    Deterministic for a given seed. Returns [(factor, multiplicity), ...]
    sorted by (degree, coefficients).
    """
    if not f or f[-1] != 1:
        raise ValueError("input polynomial must be monic")
    fp = gfpoly.from_int_poly(f, p)
    if gfpoly.deg(fp) != len(f) - 1:
        raise ValueError("degree dropped mod p")  # cannot happen for monic f
    return gfpoly.factor(fp, p, seed)


# -- e-th roots ---------------------------------------------------------------


def _nonresidue(field: FqField, ell: int) -> FqElement:
    """Deterministic l-th non-residue: small elements first, then seeded draws.

    The small-index prefix of the enumeration is all constants, which can be
    universally l-th powers (e.g. l | p + 1 in F_{p^2}), so the scan must not
    stay sequential past a short prefix.
    """
    exp = (field.q - 1) // ell
    for idx in range(2, min(field.q, 32)):
        t = field.element_at(idx)
        if not t.is_zero() and t ** exp != field.one:
            return t
    rng = random.Random(field.q ^ ell)
    while True:
        t = field.random_element(rng)
        if not t.is_zero() and t ** exp != field.one:
            return t


def _bsgs(target: FqElement, base: FqElement, order: int) -> int:
    """Discrete log of target in <base> of the given order, or NotInGroup."""
    m = math.isqrt(order - 1) + 1
    baby: dict[FqElement, int] = {}
    cur = target.field.one
    for j in range(m):
        baby.setdefault(cur, j)
        cur = cur * base
    giant = (base ** m).inverse()
    cur = target
    for g in range(m + 1):
        if cur in baby:
            return (g * m + baby[cur]) % order
        cur = cur * giant
    raise NotInGroup("element outside the cyclic group")


def _amm_ell_root(y: FqElement, ell: int) -> FqElement:
    """One l-th root in F_q for prime l with l | q - 1; y must be an l-th power."""
    field = y.field
    s = field.q - 1
    v = 0
    while s % ell == 0:
        s //= ell
        v += 1
    b = _nonresidue(field, ell) ** s  # exact order ell^v
    u = modinv(ell, s)
    w = (ell * u - 1) // s
    x0 = y ** u  # x0^ell = y * (y^s)^w
    t = y ** s
    target = (t ** w).inverse()  # must be in mu_{ell^(v-1)}
    if target ** (ell ** (v - 1)) != field.one:
        raise NotAPower("not an l-th power residue")
    # solve b^(ell*j) = target by lifting digits of j base ell
    gamma = b ** (ell ** (v - 1))  # order ell
    h = b ** ell
    j = 0
    for i in range(v - 1):
        c = (target * (h ** j).inverse()) ** (ell ** (v - 2 - i))
        j += _bsgs(c, gamma, ell) * ell ** i
    x = x0 * b ** j
    if x ** ell != y:
        raise NotAPower("root verification failed")
    return x


def fq_eth_root(y: FqElement, e: int) -> FqElement:
    """Some x with x^e = y, for odd prime-power e. Raises NotAPower if none.

    In the unique-root case (gcd(e, q-1) = 1) the returned x is that root.
    """
    ell, k = check_odd_prime_power(e)
    if y.is_zero():
        raise ZeroInput("e-th root of zero requested")
    field = y.field
    qm1 = field.q - 1
    v = 0
    m = qm1
    while m % ell == 0:
        m //= ell
        v += 1
    if v == 0:
        return y ** modinv(e, qm1)
    if v <= k:
        x = y ** modinv(e, m)
        if x ** e != y:
            raise NotAPower("not an e-th power")
        return x
    x = y
    for _ in range(k):
        x = _amm_ell_root(x, ell)
    return x


# -- subfield norms -----------------------------------------------------------


def _gauss_solver(columns: list[tuple], p: int, dim: int):
    """RREF solver for M c = z with M given by columns; returns solve(z)."""
    ncols = len(columns)
    rows = [[columns[j][i] for j in range(ncols)] + [0] * dim for i in range(dim)]
    for i in range(dim):
        rows[i][ncols + i] = 1  # augment with identity
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, dim) if rows[i][c] % p), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(dim):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if r != ncols:
        raise NotInSubfield("embedding image does not have full rank")
    transform = [row[ncols:] for row in rows]

    def solve(z: tuple) -> list[int]:
        coords = [sum(t * zi for t, zi in zip(row, z)) % p for row in transform]
        sol = [0] * ncols
        for idx, c in enumerate(pivots):
            sol[c] = coords[idx]
        # consistency: rows beyond the rank must annihilate z
        for idx in range(ncols, dim):
            if coords[idx] % p:
                raise NotInSubfield("element not in the embedded subfield")
        return sol

    return solve


def fq_norm_to_subfield(x: FqElement, emb: FqElement, sub: FqField) -> FqElement:
    """Norm of x from F_{p^D} down to F_{p^d}, d | D, expressed in sub.

    emb is the image of sub's generator inside x's field; the linear
    pull-back is cached on x's field per (emb, sub).
    """
    big = x.field
    if emb.field != big or sub.p != big.p or big.d % sub.d != 0:
        raise IncompatibleFields("subfield data does not match")
    key = (sub.modulus, emb.coeffs)
    solver = big._norm_cache.get(key)
    if solver is None:
        img = gfpoly.from_int_poly(list(sub.modulus), big.p)
        val = big.zero
        acc = big.one
        for c in img:
            val = val + acc * c
            acc = acc * emb
        if not val.is_zero():
            raise IncompatibleFields("emb is not a root of the subfield modulus")
        powers = []
        cur = big.one
        for _ in range(sub.d):
            powers.append(cur.coeffs)
            cur = cur * emb
        solver = _gauss_solver(powers, big.p, big.d)
        big._norm_cache[key] = solver
    if x.is_zero():
        return sub.zero
    n = x ** ((big.q - 1) // (sub.q - 1))
    return sub.element(solver(n.coeffs))


def fq_dlog_order_e(z: FqElement, zeta: FqElement, e: int) -> int:
    """Discrete log of z in <zeta> where zeta has exact order e (BSGS)."""
    if e > _DLOG_BUDGET:
        raise BudgetExceeded(f"dlog order {e} above 2^40 budget")
    if z.field != zeta.field:
        raise IncompatibleFields("dlog operands in different fields")
    if z.is_zero() or z ** e != z.field.one:
        raise NotInGroup("element is not in the order-e subgroup")
    return _bsgs(z, zeta, e)
