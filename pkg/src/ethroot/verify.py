"""Root verification: modular spot-checks plus an exact check when cheap."""

from . import gfpoly
from .fq import factor_mod_p
from .numfield import FactoredElement, FieldElement, NumberField
from .primes import derive_rng, is_prime

# exact expansion allowed below this estimated bit volume
EXACT_BITS = 1 << 16
_VERIFY_BITS = 62


def _element_bits(u: FieldElement) -> int:
    m = max((abs(c) for c in u.num), default=0)
    return m.bit_length() + u.den.bit_length()


def _exact_affordable(x: FieldElement, y: FactoredElement, e: int,
                      K: NumberField) -> bool:
    if K.n > 8:
        return False
    cost = e * max(1, _element_bits(x))
    for u, a in y.terms:
        cost += abs(a) * max(1, _element_bits(u))
        if cost >= EXACT_BITS:
            return False
    return cost < EXACT_BITS


def _usable_prime(q: int, x: FieldElement, y: FactoredElement,
                  K: NumberField) -> bool:
    if K.conductor is not None and K.conductor % q == 0:
        return False
    if x.den % q == 0 or any(u.den % q == 0 for u, _ in y.terms):
        return False
    fbar = gfpoly.from_int_poly(list(K.f), q)
    if gfpoly.deg(fbar) != K.n:
        return False
    return gfpoly.deg(gfpoly.gcd(fbar, gfpoly.derivative(fbar, q), q)) == 0


def verify_root(x: FieldElement, y: FactoredElement, e: int, K: NumberField,
                trials: int = 3, seed: int = 0) -> bool:
    """True iff x^e = prod u_i^{a_i} mod `trials` fresh unramified primes.

    Adds an exact polynomial comparison when the field is small and the
    expansion is estimated under 2^16 bits. Negative exponents are allowed
    (both sides fold with modular inverses via nonzero residues).
    """
    if _exact_affordable(x, y, e, K):
        if x == K.zero:
            return False
        if x ** e != y.value():
            return False
    rng = derive_rng(seed, "verify")
    passed = 0
    while passed < trials:
        q = rng.randrange(1 << (_VERIFY_BITS - 1), 1 << _VERIFY_BITS) | 1
        if not is_prime(q) or not _usable_prime(q, x, y, K):
            continue
        if not _check_mod_q(x, y, e, K, q):
            return False
        passed += 1
    return True


def _check_mod_q(x: FieldElement, y: FactoredElement, e: int, K: NumberField,
                 q: int) -> bool:
    from .fq import FqField

    xvec = x.reduce_mod_prime(q)
    fac = factor_mod_p(list(K.f), q, seed=1)
    for g, _ in fac:
        field = FqField(q, g)
        order = field.q - 1
        xbar = field.element(gfpoly.rem(gfpoly.trim(list(xvec)), g, q))
        lhs = field.one if xbar.is_zero() else xbar ** (e % order)
        rhs = field.one
        zero = xbar.is_zero()
        rhs_zero = False
        for u, a in y.terms:
            if a == 0:
                continue
            uvec = u.reduce_mod_prime(q)
            ubar = field.element(gfpoly.rem(gfpoly.trim(list(uvec)), g, q))
            if ubar.is_zero():
                rhs_zero = a > 0
                if a < 0:
                    return False  # pole mod q: treat as failed trial
                break
            rhs = rhs * ubar ** (a % order)
        if zero or rhs_zero:
            if not (zero and rhs_zero):
                return False
            continue
        if lhs != rhs:
            return False
    return True
