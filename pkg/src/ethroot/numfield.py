"""Number fields K = Q[x]/(f) and elements kept in factored form.

Elements are integer coordinate vectors over the order's basis with a single
positive denominator. Products of many elements are never expanded; a
FactoredElement is a list of (element, exponent) terms and every algorithm
downstream works on residues of the individual terms.

The complex-embedding constant cinf() bounds how coefficient vectors grow
relative to embedding size: ||C(x)||_inf <= ||Sigma(x)||_inf * cinf. Together
with the factored-form bound in coeff_bound_root (the log of the root's
embedding norm is at most the sum of the logs of the factors' norms,
independent of e) it yields the certified coefficient bound B used by all
reconstruction paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from . import gfpoly
from .errors import (
    BadConductor,
    BoundViolation,
    DenominatorClash,
    IncompatibleFields,
    IncompleteCover,
    NotInSubfield,
    PrecisionLoss,
    ZeroInput,
)
from .primes import euler_phi, modinv

# -- integer polynomial helpers (index = degree, stripped, [] = 0) ------------


def _ztrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _zmul(a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ztrim(out)


def _zdivexact_monic(a: list[int], b: list[int]) -> list[int]:
    """Exact division by a monic integer polynomial."""
    r = a[:]
    db = len(b) - 1
    q = [0] * max(0, len(r) - db)
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        if c == 0:
            continue
        q[i - db] = c
        for j, y in enumerate(b):
            r[i - db + j] -= c * y
    if _ztrim(r):
        raise ValueError("division was not exact")
    return _ztrim(q)


_cyclo_cache: dict[int, list[int]] = {}


def cyclotomic_poly(m: int) -> list[int]:
    """m-th cyclotomic polynomial as an integer coefficient list."""
    if m in _cyclo_cache:
        return _cyclo_cache[m][:]
    poly = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly = _zdivexact_monic(poly, cyclotomic_poly(d))
    _cyclo_cache[m] = poly[:]
    return poly


# -- fields and elements -------------------------------------------------------


class NumberField:
    """Q[x]/(f) with a distinguished order basis (default the power basis)."""

    def __init__(self, f: list[int], conductor: int | None = None,
                 omega=None, f0: int = 1):
        f = [int(c) for c in f]
        if not f or f[-1] != 1 or len(f) < 2:
            raise ValueError("f must be monic of degree >= 1")
        self.f = tuple(f)
        self.n = len(f) - 1
        self.conductor = conductor
        self.f0 = f0
        self.omega = None
        self._omega_inv = None
        if omega is not None:
            self.omega = tuple(tuple(Fraction(x) for x in row) for row in omega)
            self._omega_inv = _frac_matrix_inverse(self.omega)
        self._roots: dict[int, list] = {}
        self._cinf = None

    @classmethod
    def cyclotomic(cls, m: int) -> "NumberField":
        if m < 3 or m % 4 == 2:
            raise BadConductor(f"conductor {m} is not primitive (need m >= 3, m != 2 mod 4)")
        return cls(cyclotomic_poly(m), conductor=m)

    def __eq__(self, other):
        return (
            isinstance(other, NumberField)
            and self.f == other.f
            and self.omega == other.omega
            and self.f0 == other.f0
        )

    def __hash__(self):
        return hash((self.f, self.omega, self.f0))

    def __repr__(self):
        if self.conductor:
            return f"NumberField(cyclotomic m={self.conductor})"
        return f"NumberField(deg {self.n})"

    # -- construction ----------------------------------------------------------

    def element(self, num, den: int = 1) -> "FieldElement":
        if isinstance(num, FieldElement):
            if num.field != self:
                raise IncompatibleFields("element from a different field")
            return num
        if isinstance(num, int):
            num = [num]
        num = [int(c) for c in num]
        if len(num) > self.n:
            if self.omega is not None:
                raise ValueError("overlong vector needs the power basis")
            num = self.reduce_int_poly(num)
        num = num + [0] * (self.n - len(num))
        return FieldElement(self, tuple(num[: self.n]), den)._normalize()

    def from_fractions(self, coeffs) -> "FieldElement":
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return self.element([int(c * den) for c in fr], den)

    def from_power_fractions(self, coeffs) -> "FieldElement":
        """Element from power-basis rational coordinates (any order basis)."""
        fr = [Fraction(c) for c in coeffs] + [Fraction(0)] * (self.n - len(coeffs))
        if self.omega is not None:
            fr = [
                sum(fr[j] * self._omega_inv[j][i] for j in range(self.n))
                for i in range(self.n)
            ]
        return self.from_fractions(fr)

    @property
    def zero(self) -> "FieldElement":
        return self.element(0)

    @property
    def one(self) -> "FieldElement":
        return self.element(1)

    @property
    def gen(self) -> "FieldElement":
        return self.element([0, 1])

    def random_element(self, rng, bits: int, den: int = 1) -> "FieldElement":
        lo, hi = -(1 << bits), 1 << bits
        return self.element([rng.randrange(lo, hi) for _ in range(self.n)], den)

    # -- power-basis arithmetic -------------------------------------------------

    def reduce_int_poly(self, poly: list[int]) -> list[int]:
        """Reduce an integer polynomial mod f (monic, so this is exact)."""
        r = poly[:]
        n = self.n
        f = self.f
        for i in range(len(r) - 1, n - 1, -1):
            c = r[i]
            if c == 0:
                continue
            r[i] = 0
            for j in range(n):
                r[i - n + j] -= c * f[j]
        del r[n:]
        return r + [0] * (n - len(r))

    # -- complex embeddings ------------------------------------------------------

    def embeddings(self, prec: int = 192) -> list:
        """Complex roots of f at working precision `prec` bits."""
        if prec in self._roots:
            return self._roots[prec]
        with mp.workprec(prec):
            if self.conductor:
                m = self.conductor
                roots = [
                    mp.expjpi(mp.mpf(2 * t) / m)
                    for t in range(1, m)
                    if math.gcd(t, m) == 1
                ]
            else:
                coeffs = [mp.mpf(c) for c in reversed(self.f)]
                roots, err = mp.polyroots(
                    coeffs, maxsteps=200, extraprec=prec, error=True
                )
                if err > mp.mpf(2) ** (-prec // 2):
                    raise PrecisionLoss("polynomial roots did not certify")
        self._roots[prec] = roots
        return roots

    def sigma_norm_inf(self, x: "FieldElement", prec: int = 192):
        """Upper bound for max_sigma |sigma(x)| as an mpf."""
        roots = self.embeddings(prec)
        poly = x.power_basis_fractions()
        with mp.workprec(prec):
            best = mp.mpf(0)
            coeffs = [mp.mpf(c.numerator) / c.denominator for c in poly]
            for r in roots:
                acc = mp.mpc(0)
                for c in reversed(coeffs):
                    acc = acc * r + c
                a = abs(acc)
                if a > best:
                    best = a
            return best * (1 + mp.mpf(2) ** (10 - prec))

    def cinf(self):
        """Upper bound for the basis-change norm ||V^-1 Omega^-1||_1 (mpf)."""
        if self._cinf is not None:
            return self._cinf
        prec = 192
        prev = None
        for _ in range(5):
            val = self._cinf_at(prec)
            if prev is not None and abs(prev - val) <= abs(val) * mp.mpf(2) ** -16:
                self._cinf = val * mp.mpf("1.05")
                return self._cinf
            prev = val
            prec *= 2
        raise PrecisionLoss("cinf did not stabilize under precision doubling")

    def _cinf_at(self, prec: int):
        roots = self.embeddings(prec)
        n = self.n
        with mp.workprec(prec):
            # row j of V^-1 = coefficients of the Lagrange basis poly at root j
            rows = []
            fc = [mp.mpf(c) for c in self.f]
            for r in roots:
                # synthetic division f / (x - r); quotient deg n-1
                q = [mp.mpc(0)] * n
                q[n - 1] = fc[n]  # = 1
                for i in range(n - 1, 0, -1):
                    q[i - 1] = fc[i] + r * q[i]
                deriv = mp.mpc(0)
                for c in reversed(q):
                    deriv = deriv * r + c  # q(r) = f'(r)
                if abs(deriv) == 0:
                    raise PrecisionLoss("repeated root at working precision")
                rows.append([q[i] / deriv for i in range(n)])
            if self._omega_inv is not None:
                oi = [
                    [mp.mpf(c.numerator) / c.denominator for c in row]
                    for row in self._omega_inv
                ]
                rows = [
                    [
                        sum(row[k] * oi[k][i] for k in range(n))
                        for i in range(n)
                    ]
                    for row in rows
                ]
            best = mp.mpf(0)
            for i in range(n):
                s = sum(abs(row[i]) for row in rows)
                if s > best:
                    best = s
            return best


def _frac_matrix_inverse(m):
    n = len(m)
    a = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("basis matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                fct = a[r][col]
                a[r] = [x - fct * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


class FieldElement:
    """num / den over the order basis; num integer vector of length n."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: NumberField, num: tuple, den: int = 1):
        self.field = field
        self.num = num
        self.den = den

    def _normalize(self) -> "FieldElement":
        den = self.den
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            den = -den
            num = tuple(-c for c in self.num)
        else:
            num = self.num
        g = den
        for c in num:
            g = math.gcd(g, c)
            if g == 1:
                break
        if g > 1:
            num = tuple(c // g for c in num)
            den //= g
        return FieldElement(self.field, num, den)

    def _check(self, other) -> "FieldElement":
        if isinstance(other, int):
            return self.field.element(other)
        if not isinstance(other, FieldElement) or other.field != self.field:
            raise IncompatibleFields("mixed-field arithmetic")
        return other

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.num)

    def __add__(self, other):
        other = self._check(other)
        d1, d2 = self.den, other.den
        num = tuple(a * d2 + b * d1 for a, b in zip(self.num, other.num))
        return FieldElement(self.field, num, d1 * d2)._normalize()

    def __sub__(self, other):
        other = self._check(other)
        d1, d2 = self.den, other.den
        num = tuple(a * d2 - b * d1 for a, b in zip(self.num, other.num))
        return FieldElement(self.field, num, d1 * d2)._normalize()

    def __neg__(self):
        return FieldElement(self.field, tuple(-c for c in self.num), self.den)

    def __mul__(self, other):
        other = self._check(other)
        K = self.field
        if K.omega is not None:
            return self._mul_general(other)
        prod = _zmul(_ztrim(list(self.num)), _ztrim(list(other.num)))
        red = K.reduce_int_poly(prod)
        return FieldElement(K, tuple(red), self.den * other.den)._normalize()

    def _mul_general(self, other):
        K = self.field
        a = self.power_basis_fractions()
        b = other.power_basis_fractions()
        prod = _fmul(_ftrim(list(a)), _ftrim(list(b)))
        f = [Fraction(c) for c in K.f]
        if len(prod) > K.n:
            _, prod = _fdivmod(prod, f)
        return K.from_power_fractions(prod)

    __radd__ = __add__
    __rmul__ = __mul__

    def __pow__(self, n: int) -> "FieldElement":
        K = self.field
        if n < 0:
            return self.inverse() ** (-n)
        result = K.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def inverse(self) -> "FieldElement":
        """Inverse in K via extended Euclid over Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero element")
        K = self.field
        f = [Fraction(c) for c in K.f]
        r0, r1 = f, _ftrim(self.power_basis_fractions())
        s0, s1 = [], [Fraction(1)]
        while r1:
            q, r = _fdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _fsub(s0, _fmul(q, s1))
        if len(r0) != 1:
            raise ZeroDivisionError("element not invertible (f reducible?)")
        inv = [c / r0[0] for c in s0]
        return K.from_power_fractions(inv)

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.element(other)
        return (
            isinstance(other, FieldElement)
            and self.field == other.field
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den == 1:
            return f"K{list(self.num)}"
        return f"K{list(self.num)}/{self.den}"

    # -- representation changes --------------------------------------------------

    def power_basis_fractions(self) -> list[Fraction]:
        """Coordinates over the power basis as Fractions (length n)."""
        K = self.field
        if K.omega is None:
            return [Fraction(c, self.den) for c in self.num]
        out = [Fraction(0)] * K.n
        for i, c in enumerate(self.num):
            if c:
                for j in range(K.n):
                    out[j] += Fraction(c, self.den) * K.omega[i][j]
        return out

    def reduce_mod_prime(self, p: int) -> list[int]:
        """Power-basis coordinates mod p; DenominatorClash if p meets den."""
        if self.field.omega is None:
            if math.gcd(self.den, p) != 1:
                raise DenominatorClash(p)
            dinv = modinv(self.den, p)
            return [c % p * dinv % p for c in self.num]
        out = []
        for c in self.power_basis_fractions():
            if math.gcd(c.denominator, p) != 1:
                raise DenominatorClash(p)
            out.append(c.numerator % p * modinv(c.denominator, p) % p)
        return out


def _ftrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ftrim(out)


def _fsub(a, b):
    out = list(a) + [Fraction(0)] * (len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    return _ftrim(out)


def _fdivmod(a, b):
    r = list(a)
    db = len(b) - 1
    q = [Fraction(0)] * max(0, len(r) - db)
    inv = 1 / b[-1]
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        if c == 0:
            continue
        fct = c * inv
        q[i - db] = fct
        for j, y in enumerate(b):
            r[i - db + j] -= fct * y
    return q, _ftrim(r)


# -- factored elements ---------------------------------------------------------


class FactoredElement:
    """Product prod_i u_i^{a_i}, kept unexpanded."""

    __slots__ = ("field", "terms")

    def __init__(self, field: NumberField, terms):
        self.field = field
        self.terms = []
        for u, a in terms:
            if not isinstance(u, FieldElement) or u.field != field:
                raise IncompatibleFields("factored term from a different field")
            if u.is_zero():
                raise ZeroInput("zero factor in factored element")
            self.terms.append((u, int(a)))

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"FactoredElement({len(self.terms)} terms)"

    def mul(self, other: "FactoredElement") -> "FactoredElement":
        if other.field != self.field:
            raise IncompatibleFields("mixed-field product")
        return FactoredElement(self.field, self.terms + other.terms)

    def pow(self, c: int) -> "FactoredElement":
        return FactoredElement(self.field, [(u, a * c) for u, a in self.terms])

    def value(self) -> FieldElement:
        """Expand the product exactly. Use only when the result is known small."""
        out = self.field.one
        for u, a in self.terms:
            out = out * u ** a
        return out

    def denominators(self) -> set[int]:
        return {u.den for u, _ in self.terms if u.den != 1}


def clear_denominators(y: FactoredElement, e: int) -> tuple[FactoredElement, int]:
    """Append (T, e) with T = prod of term denominators.

    The e-th root of the returned product is T times the root of y, which is
    integral over Z[alpha] whenever exponents stay within [0, e]; CRT and
    lattice reconstructions need that integrality.
    """
    T = 1
    for u, _ in y.terms:
        T *= u.den
    if T == 1:
        return y, 1
    terms = list(y.terms) + [(y.field.element([T]), e)]
    return FactoredElement(y.field, terms), T


def normalize_exponents(y: FactoredElement, e: int) -> tuple[FactoredElement, FactoredElement]:
    """Split y = prefactor^e * residual with residual exponents in [0, e)."""
    if e < 2:
        raise ValueError("e must be at least 2")
    pre, res = [], []
    for u, a in y.terms:
        q, r = divmod(a, e)
        if q:
            pre.append((u, q))
        if r:
            res.append((u, r))
    return FactoredElement(y.field, pre), FactoredElement(y.field, res)


# -- certified coefficient bound ------------------------------------------------


def coeff_bound_root(y: FactoredElement, e: int, K: NumberField) -> int:
    """Integer B >= ||C(x)||_inf for any root x^e = y with exponents <= e.

    B = ceil(1.1 * cinf * exp(sum_i ln+ ||Sigma(u_i)||_inf)); the sum does not
    depend on e, only on the sizes of the factors.
    """
    for _, a in y.terms:
        if not 0 <= a <= e:
            raise ValueError("exponents must lie in [0, e] for the bound")
    with mp.workprec(192):
        log_sum = mp.mpf(0)
        for u, a in y.terms:
            if a == 0:
                continue
            s = K.sigma_norm_inf(u)
            if s > 1:
                log_sum += mp.log(s)
        b = mp.mpf("1.1") * K.cinf() * mp.exp(log_sum)
        return max(1, int(mp.ceil(b)))


# -- modular reduction and CRT ----------------------------------------------------


def _remainder_tree(value: int, tree: list[list[int]]) -> list[int]:
    """Reduce one integer against a product tree (tree[0] = moduli)."""
    vals = [value % tree[-1][0] if value >= tree[-1][0] else value]
    for level in range(len(tree) - 2, -1, -1):
        nxt = []
        row = tree[level]
        for i, m in enumerate(row):
            v = vals[i // 2]
            nxt.append(v % m if v >= m else v)
        vals = nxt
    return vals


def build_product_tree(moduli: list[int]) -> list[list[int]]:
    tree = [list(moduli)]
    while len(tree[-1]) > 1:
        row = tree[-1]
        tree.append([
            row[i] * row[i + 1] if i + 1 < len(row) else row[i]
            for i in range(0, len(row), 2)
        ])
    return tree


def multi_reduce(us: list[FieldElement], moduli: list[int]):
    """Residues us[i] mod moduli[j] -> matrix[i][j] of length-n int lists.

    Raises DenominatorClash(p) when a denominator meets a modulus.
    """
    if not moduli:
        return [[] for _ in us]
    tree = build_product_tree(moduli)
    out = []
    for u in us:
        coords = u.num if u.field.omega is None else None
        den = u.den
        if coords is None:
            fr = u.power_basis_fractions()
            den = 1
            for c in fr:
                den = den * c.denominator // math.gcd(den, c.denominator)
            coords = tuple(int(c * den) for c in fr)
        den_res = _remainder_tree(den, tree)
        dinv = []
        for d, m in zip(den_res, moduli):
            if math.gcd(d, m) != 1:
                raise DenominatorClash(m)
            dinv.append(modinv(d, m))
        rows = []
        for c in coords:
            r = _remainder_tree(abs(c), tree)
            if c < 0:
                r = [(m - v) % m for v, m in zip(r, moduli)]
            rows.append(r)
        per_mod = []
        for j, m in enumerate(moduli):
            per_mod.append([rows[i][j] * dinv[j] % m for i in range(len(coords))])
        out.append(per_mod)
    return out


@dataclass(frozen=True)
class PrimeIdealRep:
    """Degree-f_deg prime (p, g(alpha)) above p, g a monic factor of f mod p."""

    p: int
    g: tuple
    f_deg: int


def reduce_mod_ideal(coeffs_mod_p: list[int], ideal: PrimeIdealRep) -> list[int]:
    """Residue of a mod-p coordinate vector in F_p[x]/(g)."""
    return gfpoly.rem(gfpoly.trim(list(coeffs_mod_p)), list(ideal.g), ideal.p)


def crt_ideals(residues: list[list[int]], ideals: list[PrimeIdealRep],
               K: NumberField) -> list[int]:
    """Combine per-ideal residues into z mod (p, f): Chinese remainder in F_p[x]."""
    if not ideals:
        raise IncompleteCover("no ideals supplied")
    p = ideals[0].p
    if sum(i.f_deg for i in ideals) != K.n:
        raise IncompleteCover("ideal degrees do not cover deg f")
    fbar = gfpoly.from_int_poly(list(K.f), p)
    z = []
    for r, ideal in zip(residues, ideals):
        g = list(ideal.g)
        mi = gfpoly.divmod_(fbar, g, p)[0]
        ti = gfpoly.invmod(mi, g, p)
        term = gfpoly.mul(gfpoly.mulmod(ti, gfpoly.trim(list(r)), g, p), mi, p)
        z = gfpoly.add(z, term, p)
    z = gfpoly.rem(z, fbar, p)
    return list(z) + [0] * (K.n - len(z))


def crt_integers_symmetric(vectors: list[list[int]], moduli: list[int],
                           bound: int) -> list[int]:
    """Per-coordinate CRT with symmetric lift into [-bound, bound].

    vectors[j] is the coordinate vector mod moduli[j]; returns one integer
    vector. Requires prod moduli > 2*bound; BoundViolation if a combined
    coordinate falls outside the symmetric range.
    """
    if not vectors:
        raise ValueError("no residue vectors")
    n = len(vectors[0])
    pairs = [(v, m) for v, m in zip(vectors, moduli)]
    while len(pairs) > 1:
        nxt = []
        for i in range(0, len(pairs) - 1, 2):
            (v1, m1), (v2, m2) = pairs[i], pairs[i + 1]
            inv = modinv(m1 % m2, m2)
            m = m1 * m2
            combined = [
                (a + m1 * ((b - a) * inv % m2)) % m
                for a, b in zip(v1, v2)
            ]
            nxt.append((combined, m))
        if len(pairs) % 2:
            nxt.append(pairs[-1])
        pairs = nxt
    vec, modulus = pairs[0]
    if modulus <= 2 * bound:
        raise ValueError("modulus product does not exceed 2*bound")
    out = []
    for c in vec:
        if c <= bound:
            out.append(c)
        elif c >= modulus - bound:
            out.append(c - modulus)
        else:
            raise BoundViolation("coordinate outside the certified bound")
    assert len(out) == n
    return out


# -- subfields and relative norms --------------------------------------------------


def _lpoly_trim(a):
    while a and a[-1].is_zero():
        a.pop()
    return a


def _lpoly_mul(a, b, L: NumberField):
    if not a or not b:
        return []
    out = [L.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x.is_zero():
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return _lpoly_trim(out)


def _lpoly_divmod(a, b, L: NumberField):
    r = list(a)
    db = len(b) - 1
    q = [L.zero] * max(0, len(r) - db)
    inv = b[-1].inverse()
    for i in range(len(r) - 1, db - 1, -1):
        if r[i].is_zero():
            continue
        fct = r[i] * inv
        q[i - db] = fct
        for j, y in enumerate(b):
            r[i - db + j] = r[i - db + j] - fct * y
    return q, _lpoly_trim(r)


def _lpoly_resultant(a, b, L: NumberField) -> FieldElement:
    """Resultant of two polynomials over L (Euclidean algorithm)."""
    a, b = _lpoly_trim(list(a)), _lpoly_trim(list(b))
    if not a or not b:
        return L.zero
    res = L.one
    sign = 1
    while len(b) > 1:
        da, db = len(a) - 1, len(b) - 1
        _, r = _lpoly_divmod(a, b, L)
        dr = len(r) - 1  # -1 when r = 0
        if (da * db) % 2:
            sign = -sign
        res = res * b[-1] ** (da - (dr if r else 0))
        if not r:
            return L.zero if da > 0 else res
        a, b = b, r
    res = res * b[0] ** (len(a) - 1)
    return res * sign if sign < 0 else res


class SubfieldEmbedding:
    """L -> K given by the image h(alpha) of L's generator, plus the
    minimal polynomial rel_poly of alpha over L (degree [K:L])."""

    def __init__(self, K: NumberField, L: NumberField, h: list[int],
                 rel_poly: list[FieldElement]):
        self.K = K
        self.L = L
        self.h = tuple(int(c) for c in h)
        self.rel_poly = list(rel_poly)
        self.degree = len(rel_poly) - 1
        if self.degree * L.n != K.n:
            raise IncompatibleFields("relative degree does not match")
        self._solver = None

    @classmethod
    def cyclotomic(cls, K: NumberField, m_sub: int) -> "SubfieldEmbedding":
        """Embedding Q(zeta_{m'}) -> Q(zeta_m) for m' | m."""
        m = K.conductor
        if m is None:
            raise IncompatibleFields("cyclotomic embedding needs a conductor field")
        if m_sub < 3 or m % m_sub != 0:
            raise BadConductor(f"{m_sub} is not a valid subconductor of {m}")
        L = NumberField.cyclotomic(m_sub)
        d0 = m // m_sub
        h = [0] * d0 + [1]  # beta = alpha^{d0}
        # Galois orbit of alpha over L: t = 1 mod m_sub, t unit mod m
        orbit = [t for t in range(1, m) if math.gcd(t, m) == 1 and t % m_sub == 1]
        gen = K.gen
        poly = [K.one]
        for t in orbit:
            root = gen ** t
            poly = [
                (poly[i - 1] if i > 0 else K.zero)
                - (poly[i] * root if i < len(poly) else K.zero)
                for i in range(len(poly) + 1)
            ]
        emb = cls.__new__(cls)
        emb.K, emb.L = K, L
        emb.h = tuple(h)
        emb.degree = len(orbit)
        emb._solver = None
        emb.rel_poly = [emb.to_subfield(c) for c in poly]
        if emb.degree * L.n != K.n:
            raise IncompatibleFields("relative degree does not match")
        return emb

    def from_subfield(self, b: FieldElement) -> FieldElement:
        """Image of an L-element in K (evaluate at beta = h(alpha))."""
        if b.field != self.L:
            raise IncompatibleFields("element not in L")
        K = self.K
        beta = K.element(list(self.h))
        out = K.zero
        acc = K.one
        for c in b.num:
            if c:
                out = out + acc * c
            acc = acc * beta
        return FieldElement(K, out.num, out.den * b.den)._normalize()

    def to_subfield(self, x: FieldElement) -> FieldElement:
        """Express a K-element lying in L as an L-element (NotInSubfield else)."""
        if x.field != self.K:
            raise IncompatibleFields("element not in K")
        if self._solver is None:
            K, L = self.K, self.L
            beta = K.element(list(self.h))
            cols = []
            acc = K.one
            for _ in range(L.n):
                cols.append([Fraction(c, acc.den) for c in acc.num])
                acc = acc * beta
            self._solver = _frac_solver(cols, K.n)
        coords = self._solver([Fraction(c, x.den) for c in x.num])
        return self.L.from_fractions(coords)


def _frac_solver(columns: list[list[Fraction]], dim: int):
    ncols = len(columns)
    # augmented [M | I], reduced once; solving is then a matrix-vector product
    rows = []
    for i in range(dim):
        row = [columns[j][i] for j in range(ncols)]
        row += [Fraction(int(i == k)) for k in range(dim)]
        rows.append(row)
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, dim) if rows[i][c] != 0), None)
        if piv is None:
            raise NotInSubfield("embedding powers are dependent")
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(dim):
            if i != r and rows[i][c] != 0:
                fct = rows[i][c]
                rows[i] = [x - fct * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    transform = [row[ncols:] for row in rows]

    def solve(z: list[Fraction]) -> list[Fraction]:
        coords = [sum(t * zi for t, zi in zip(row, z)) for row in transform]
        for idx in range(ncols, dim):
            if coords[idx] != 0:
                raise NotInSubfield("element does not lie in the subfield")
        sol = [Fraction(0)] * ncols
        for idx, c in enumerate(pivots):
            sol[c] = coords[idx]
        return sol

    return solve


def relative_norm(y: FactoredElement, emb: SubfieldEmbedding) -> FactoredElement:
    """Termwise relative norm N_{K/L}: factored over K -> factored over L."""
    if y.field != emb.K:
        raise IncompatibleFields("factored element not over K")
    L = emb.L
    out = []
    for u, a in y.terms:
        urel = _rewrite_over_L(u, emb)
        n = _lpoly_resultant(emb.rel_poly, urel, L)
        if n.is_zero():
            raise ZeroInput("factor has zero relative norm")
        out.append((n, a))
    return FactoredElement(L, out)


def _rewrite_over_L(u: FieldElement, emb: SubfieldEmbedding):
    """K-element as a polynomial in alpha over L, reduced mod rel_poly."""
    L = emb.L
    poly = [L.from_fractions([c] + [Fraction(0)] * (L.n - 1))
            for c in u.power_basis_fractions()]
    poly = _lpoly_trim(poly)
    if len(poly) >= len(emb.rel_poly):
        _, poly = _lpoly_divmod(poly, emb.rel_poly, L)
    return poly
