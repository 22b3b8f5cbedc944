"""p-adic e-th roots: inverse-free lifting and prime-ideal lattice reconstruction.

The inert case runs a Newton iteration for the inverse root in Z[x]/(p^{2^i}, f),
doubling the precision each step; the only division is the one mod-p inverse in
the seed. When K has no inert prime the same iteration runs in the completion
Z[x]/(p^a, g_a), g_a the Hensel lift of a single factor g of f mod p, and the
global root is recovered by Babai rounding in the lattice of the ideal power.

gfpoly is reused with a composite modulus: divmod_/rem/mulmod/powmod stay exact
there as long as every divisor is monic (the leading-coefficient inverse is 1).
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import gfpoly
from .errors import (
    DenominatorClash,
    NotAPower,
    RootSeedMissing,
    SeedInvalid,
    Unsupported,
    VerificationFailed,
)
from .fq import FqElement, FqField, fq_eth_root
from .numfield import (
    FactoredElement,
    FieldElement,
    NumberField,
    PrimeIdealRep,
    clear_denominators,
    coeff_bound_root,
)
from .primes import (
    check_odd_prime_power,
    derive_rng,
    is_cyclic_unit_group,
    is_prime,
    modinv,
    multiplicative_order,
    prime_power_split,
    xgcd,
)
from .verify import verify_root

# inert primes are sampled small on purpose: a 16-bit p forces several genuine
# doubling steps, which is the part of the method worth exercising
INERT_BITS = 16
INERT_BUDGET = 2000

# root-Hermite factor LLL achieves at delta = 0.99
GAMMA = 1.022
LLL_DELTA = Fraction(99, 100)

TWIST_BUDGET = 4096
MAX_DOUBLINGS = 4

# lift_checks counts the always-on convergence assertions (one per step)
stats = {"lift_steps": 0, "lift_checks": 0, "twists": 0, "doublings": 0}


@dataclass(frozen=True)
class PadicContext:
    """Lifting parameters: all work happens in Z[x]/(p^{2^i}, f), i <= kappa."""

    p: int
    kappa: int
    target_modulus: int  # p ** (2 ** kappa)
    B: int
    f: tuple  # monic modulus polynomial of the completion


def make_context(p: int, e: int, B: int, modpoly) -> PadicContext:
    """Smallest kappa with p^{2^kappa} > 2B (so symmetric lifts are unique)."""
    if e % p == 0:
        raise ValueError("p divides e")
    need = 2 * B + 1
    t, pw = 1, p
    while pw < need:
        pw *= p
        t += 1
    kappa = (t - 1).bit_length()
    while p ** (1 << kappa) < need:
        kappa += 1
    return PadicContext(p, kappa, p ** (1 << kappa), B, tuple(int(c) for c in modpoly))


def is_inert(K: NumberField, p: int) -> bool:
    """True when pO is prime, i.e. f stays irreducible mod p."""
    if not is_prime(p):
        return False
    if K.conductor is not None:
        m = K.conductor
        return m % p != 0 and multiplicative_order(p % m, m) == K.n
    fbar = gfpoly.from_int_poly(list(K.f), p)
    if gfpoly.deg(fbar) != K.n:
        return False
    return gfpoly.is_irreducible(fbar, p)


def find_inert_prime(K: NumberField, e: int, budget: int = INERT_BUDGET,
                     seed: int = 0, avoid=()) -> int | None:
    """Random 16-bit prime p with f irreducible mod p and p coprime to e.

    Returns None when none exists (non-cyclic Galois group, e.g. Q(zeta_8))
    or the budget of tested primes runs out.
    """
    if K.conductor is not None and not is_cyclic_unit_group(K.conductor):
        return None
    rng = derive_rng(seed, "inert")
    tested = 0
    seen = set()
    while tested < budget:
        p = rng.randrange(1 << (INERT_BITS - 1), 1 << INERT_BITS) | 1
        if p in seen or not is_prime(p):
            continue
        seen.add(p)
        tested += 1
        if e % p == 0 or any(d % p == 0 for d in avoid):
            continue
        if is_inert(K, p):
            return p
    return None


# -- completion arithmetic -----------------------------------------------------


def _fold_mod(terms, M: int, modpoly: list[int], p: int) -> list[int]:
    """prod u_i^{a_i} in Z[x]/(M, modpoly); every term must be a unit above p."""
    mp = [c % M for c in modpoly]
    acc = [1]
    for u, a in terms:
        if u.den % p == 0:
            raise DenominatorClash(p)
        num = [c % M for c in u.num]
        if u.den != 1:
            inv = modinv(u.den % M, M)
            num = [c * inv % M for c in num]
        vec = gfpoly.rem(gfpoly.trim(num), mp, M)
        if not any(c % p for c in vec):
            raise RootSeedMissing(f"term is not a unit above p={p}")
        acc = gfpoly.mulmod(acc, gfpoly.powmod(vec, a, mp, M), mp, M)
    return acc


def _symmetric(c: int, M: int) -> int:
    c %= M
    return c - M if 2 * c > M else c


def _check_converged(a_mod, x, e, modpoly, M):
    # quadratic convergence contract: a * x^e = 1 at the current precision
    t = gfpoly.mulmod(a_mod, gfpoly.powmod(x, e, modpoly, M), modpoly, M)
    stats["lift_checks"] += 1
    if gfpoly.trim(t) != [1]:
        raise AssertionError(f"Newton convergence check failed at modulus {M}")


def hensel_lift(a_poly: list[int], x0, e: int, ctx: PadicContext) -> list[int]:
    """Lift the inverse e-th root of a_poly to precision p^{2^kappa}.

    a_poly lives in Z[x]/(target_modulus, ctx.f); x0 is a residue-field seed
    with a * x0^e = 1. One update
        x <- x - (1/e) x (a x^e - 1)
    per doubling, 1/e recomputed mod each p^{2^i}; no other inversions.
    """
    p = ctx.p
    fbar = gfpoly.from_int_poly(list(ctx.f), p)
    field = FqField(p, fbar)
    coeffs = list(x0.coeffs) if isinstance(x0, FqElement) else list(x0)
    seed = field.element(coeffs)
    abar = field.element(gfpoly.from_int_poly(list(a_poly), p))
    if abar * seed ** e != field.one:
        raise SeedInvalid("a * x0^e != 1 in the residue field")
    x = gfpoly.trim([int(c) for c in seed.coeffs])
    for i in range(1, ctx.kappa + 1):
        M = p ** (1 << i)
        mp = [c % M for c in ctx.f]
        ai = [c % M for c in a_poly]
        inv_e = modinv(e, M)
        t = gfpoly.mulmod(ai, gfpoly.powmod(x, e, mp, M), mp, M)
        t = gfpoly.sub(t, [1], M)
        t = gfpoly.scale(gfpoly.mulmod(x, t, mp, M), inv_e, M)
        x = gfpoly.sub(x, t, M)
        stats["lift_steps"] += 1
        _check_converged(ai, x, e, mp, M)
    return x


def _element_of_order(field: FqField, l: int, v: int, j: int, seed: int) -> FqElement:
    # exact order l^j in F_q*, where l^v fully divides q - 1 and j <= v
    rng = derive_rng(seed, "twist")
    cof = (field.q - 1) // l ** v
    while True:
        z = field.random_element(rng)
        if z.is_zero():
            continue
        z = z ** cof
        if z ** (l ** (v - 1)) == field.one:
            continue
        return z ** (l ** (v - j))


def _twist_candidates(x0: FqElement, field: FqField, l: int, k: int, seed: int):
    """x0 times every e-th root of unity of the residue field, lazily."""
    yield x0
    v, N = 0, field.q - 1
    while N % l == 0:
        N //= l
        v += 1
    if v == 0:
        return  # e-th roots are unique here: nothing to twist
    t = l ** min(k, v)
    omega = _element_of_order(field, l, v, min(k, v), seed)
    w = field.one
    for _ in range(min(t - 1, TWIST_BUDGET)):
        w = w * omega
        yield x0 * w


def eth_root_padic(y: FactoredElement, e: int, K: NumberField, p: int,
                   seed: int = 0) -> FieldElement:
    """e-th root of y by inert-prime Hensel lifting.

    Pipeline: clear denominators, bound the integral root, fold
    a = Y^{e-1} mod (p^{2^kappa}, f), seed with the residue-field root,
    lift, multiply back by Y, lift symmetrically, verify. When K contains
    e-th roots of unity the local seed is ambiguous; wrong seeds are retried
    twisted by a root of unity until the verified global root appears.
    """
    check_odd_prime_power(e)
    l, k = prime_power_split(e)
    terms = [(u, a) for u, a in y.terms if a != 0]
    if not terms:
        return K.one
    if any(a < 0 for _, a in terms):
        raise ValueError("exponents must lie in [0, e]")
    if e % p == 0:
        raise ValueError("p divides e")
    if K.omega is not None:
        raise Unsupported("p-adic lifting works on the power basis order")
    if not is_inert(K, p):
        raise ValueError(f"p={p} is not inert in K")
    work, T = clear_denominators(FactoredElement(K, terms), e)
    B = coeff_bound_root(work, e, K)
    ctx = make_context(p, e, B, K.f)
    M = ctx.target_modulus
    mp = [c % M for c in ctx.f]
    Y = _fold_mod(work.terms, M, list(K.f), p)
    a_poly = gfpoly.powmod(Y, e - 1, mp, M)
    field = FqField(p, gfpoly.from_int_poly(list(K.f), p))
    abar = field.element(gfpoly.from_int_poly(a_poly, p))
    try:
        x0 = fq_eth_root(abar.inverse(), e)
    except NotAPower as exc:
        raise RootSeedMissing("y mod p is not an e-th power residue") from exc
    for cand in _twist_candidates(x0, field, l, k, seed):
        xk = hensel_lift(a_poly, cand, e, ctx)
        root_poly = gfpoly.mulmod(Y, xk, mp, M)
        coords = [_symmetric(c, M) for c in root_poly]
        coords += [0] * (K.n - len(coords))
        if any(abs(c) > B for c in coords):
            stats["twists"] += 1
            continue
        x = K.element(coords)
        if T != 1:
            x = x / K.element([T])
        if verify_root(x, y, e, K, trials=2, seed=seed + 1):
            return x
        stats["twists"] += 1
    raise VerificationFailed("no twist of the local seed gives a global root")


# -- prime-ideal reconstruction ------------------------------------------------


def precision_estimate(n: int, f_deg: int, p: int, Bprime: int) -> int:
    """Smallest power of two a exceeding n/(f_deg ln p) (ln 2B' + (n(n-1)/4 - 1) ln GAMMA)."""
    if Bprime < 1:
        raise ValueError("B' must be >= 1")
    if Bprime.bit_length() <= 512:
        ln2b = math.log(2 * Bprime)
    else:
        ln2b = (Bprime.bit_length() + 1) * math.log(2)
    rhs = (n / (f_deg * math.log(p))) * (ln2b + (n * (n - 1) / 4 - 1) * math.log(GAMMA))
    a = 1
    while a <= rhs:
        a *= 2
    return a


def _poly_xgcd(a: list[int], b: list[int], p: int):
    """(g, s, t) over F_p with s a + t b = g, g monic (or zero)."""
    r0, r1 = gfpoly.from_int_poly(a, p), gfpoly.from_int_poly(b, p)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = gfpoly.divmod_(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, gfpoly.sub(s0, gfpoly.mul(q, s1, p), p)
        t0, t1 = t1, gfpoly.sub(t0, gfpoly.mul(q, t1, p), p)
    if not r0:
        return [], s0, t0
    inv = modinv(r0[-1], p)
    return (gfpoly.scale(r0, inv, p), gfpoly.scale(s0, inv, p),
            gfpoly.scale(t0, inv, p))


def _exact_div(poly: list[int], m: int, newmod: int) -> list[int]:
    out = []
    for c in poly:
        if c % m:
            raise ArithmeticError("Hensel step: coefficient not divisible")
        out.append((c // m) % newmod)
    return gfpoly.trim(out)


def hensel_factor_lift(g: list[int], f: list[int], p: int, a: int) -> list[int]:
    """Quadratic lift of a monic factor g of f mod p to g_a mod p^a.

    post: g_a monic, g_a = g mod p, g_a | f mod p^a. Requires gcd(g, f/g) = 1
    mod p (f squarefree at g).
    """
    target = p ** a
    gbar = gfpoly.from_int_poly(g, p)
    fbar = gfpoly.from_int_poly(f, p)
    h, r = gfpoly.divmod_(fbar, gbar, p)
    if gfpoly.trim(r):
        raise ValueError("g does not divide f mod p")
    d, s, t = _poly_xgcd(gbar, h, p)
    if gfpoly.deg(d) != 0:
        raise ValueError("f mod p is not squarefree at g")
    G, H, S, T = gbar[:], h[:], s[:], t[:]
    m = p
    while m < target:
        m2 = m * m
        diff = gfpoly.sub([c % m2 for c in f], gfpoly.mul(G, H, m2), m2)
        dd = _exact_div(diff, m, m)
        Gm, Hm = [c % m for c in G], [c % m for c in H]
        u = gfpoly.rem(gfpoly.mul(T, dd, m), Gm, m)
        v, r = gfpoly.divmod_(gfpoly.sub(dd, gfpoly.mul(u, Hm, m), m), Gm, m)
        if gfpoly.trim(r):
            raise ArithmeticError("Hensel step: factor solve left a remainder")
        G = gfpoly.add([c % m2 for c in G], gfpoly.scale(u, m % m2, m2), m2)
        H = gfpoly.add([c % m2 for c in H], gfpoly.scale(v, m % m2, m2), m2)
        # lift the Bezout pair too, same solve shape
        b = gfpoly.sub(gfpoly.add(gfpoly.mul(S, G, m2), gfpoly.mul(T, H, m2), m2),
                       [1], m2)
        bb = _exact_div(b, m, m)
        nb = gfpoly.scale(bb, m - 1, m)
        tau = gfpoly.rem(gfpoly.mul(T, nb, m), Gm, m)
        sig, r = gfpoly.divmod_(gfpoly.sub(nb, gfpoly.mul(tau, Hm, m), m), Gm, m)
        if gfpoly.trim(r):
            raise ArithmeticError("Hensel step: Bezout solve left a remainder")
        S = gfpoly.add([c % m2 for c in S], gfpoly.scale(sig, m % m2, m2), m2)
        T = gfpoly.add([c % m2 for c in T], gfpoly.scale(tau, m % m2, m2), m2)
        m = m2
    ga = [c % target for c in G]
    if ga[-1] != 1 or gfpoly.from_int_poly(ga, p) != gbar:
        raise ArithmeticError("Hensel lift lost the factor")
    return ga


def _zrem(a: list[int], f: list[int]) -> list[int]:
    """Exact remainder of a by monic f over Z."""
    a = list(a)
    n = len(f) - 1
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i]
        if c:
            for j in range(n + 1):
                a[i - n + j] -= c * f[j]
    return a[:n]


@dataclass(frozen=True)
class IdealLattice:
    """Row basis (Hermite form) of pil^a inside the coefficient embedding."""

    basis: tuple
    a: int
    pil: PrimeIdealRep


def _hnf(mat: list[list[int]], n: int) -> list[list[int]]:
    """Upper-triangular row HNF, positive diagonal, reduced above the diagonal."""
    rows = [list(r) for r in mat]
    basis = []
    for col in range(n):
        work = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not work:
            raise ValueError("matrix rows do not span full rank")
        piv = work.pop()
        while work:
            r = work.pop()
            g, s, t = xgcd(piv[col], r[col])
            q1, q2 = piv[col] // g, r[col] // g
            comb = [s * x + t * y for x, y in zip(piv, r)]
            left = [q2 * x - q1 * y for x, y in zip(piv, r)]
            piv = comb
            if any(left):
                rest.append(left)
        if piv[col] < 0:
            piv = [-c for c in piv]
        basis.append(piv)
        rows = rest
    # canonical form: entries above each pivot land in [0, pivot); increasing
    # order keeps earlier columns untouched (later pivot rows start with zeros)
    for i in range(n):
        for j in range(i):
            q = basis[j][i] // basis[i][i]
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], basis[i])]
    return basis


def build_ideal_lattice(pil: PrimeIdealRep, a: int, K: NumberField,
                        ga: list[int] | None = None) -> IdealLattice:
    """Lattice of pil^a = (p^a, g_a(alpha)) as n x n Hermite rows."""
    p, n = pil.p, K.n
    pa = p ** a
    if ga is None:
        ga = hensel_factor_lift(list(pil.g), list(K.f), p, a)
    rows = [[pa if i == j else 0 for i in range(n)] for j in range(n)]
    gel = K.element(_zrem(ga, list(K.f)))
    for j in range(n - pil.f_deg):
        el = gel * K.gen ** j
        if el.den != 1:
            raise ArithmeticError("ideal generator is not integral")
        rows.append(list(el.num))
    basis = _hnf(rows, n)
    det = 1
    for i in range(n):
        det *= basis[i][i]
    if det != p ** (a * pil.f_deg):
        raise ArithmeticError("ideal lattice determinant mismatch")
    return IdealLattice(tuple(tuple(r) for r in basis), a, pil)


def _round_frac(x: Fraction) -> int:
    return round(x)


def lll_reduce(basis, delta=LLL_DELTA) -> list[list[int]]:
    """Exact integral LLL (de Weger variant): same lattice, reduced basis."""
    delta = Fraction(delta)
    dn, dd = delta.numerator, delta.denominator
    b = [[int(c) for c in row] for row in basis]
    n = len(b)
    if n <= 1:
        return b
    # lam[i][j] = mu[i][j] d[j+1]; d[i] = Gram determinant of b_0..b_{i-1}
    d = [1] + [0] * n
    lam = [[0] * n for _ in range(n)]

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    for i in range(n):
        for j in range(i + 1):
            u = dot(b[i], b[j])
            for kk in range(j):
                u = (d[kk + 1] * u - lam[i][kk] * lam[j][kk]) // d[kk]
            if j < i:
                lam[i][j] = u
            else:
                if u <= 0:
                    raise ValueError("basis is not full rank")
                d[i + 1] = u

    def red(k, l):
        if abs(2 * lam[k][l]) <= d[l + 1]:
            return
        q = _round_frac(Fraction(lam[k][l], d[l + 1]))
        b[k] = [x - q * y for x, y in zip(b[k], b[l])]
        lam[k][l] -= q * d[l + 1]
        for i in range(l):
            lam[k][i] -= q * lam[l][i]

    def swap(k):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lmb = lam[k][k - 1]
        dnew = (d[k - 1] * d[k + 1] + lmb * lmb) // d[k]
        for i in range(k + 1, n):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lmb * t) // d[k]
            lam[i][k - 1] = (dnew * t + lmb * lam[i][k]) // d[k + 1]
        d[k] = dnew

    k = 1
    while k < n:
        red(k, k - 1)
        if dd * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2) < dn * d[k] ** 2:
            swap(k)
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b


def _gso_fractions(rows):
    n = len(rows)
    bs, norm = [], []
    for i in range(n):
        v = [Fraction(c) for c in rows[i]]
        for j in range(i):
            mu = sum(Fraction(a) * c for a, c in zip(rows[i], bs[j])) / norm[j]
            v = [x - mu * y for x, y in zip(v, bs[j])]
        bs.append(v)
        norm.append(sum(x * x for x in v))
    return bs, norm


def babai_nearest_plane(basis, target: list[int]) -> list[int]:
    """Lattice vector near target: nearest-plane walk over the given basis."""
    n = len(basis)
    bs, norm = _gso_fractions(basis)
    res = [Fraction(c) for c in target]
    for i in range(n - 1, -1, -1):
        c = _round_frac(sum(a * b for a, b in zip(res, bs[i])) / norm[i])
        if c:
            res = [x - c * y for x, y in zip(res, basis[i])]
    return [int(t - r) for t, r in zip(target, res)]


def eth_root_padic_reconstruct(y: FactoredElement, e: int, K: NumberField,
                               pil: PrimeIdealRep, seed: int = 0,
                               max_doublings: int = MAX_DOUBLINGS) -> FieldElement:
    """e-th root via a single prime ideal: lift in the completion, then Babai.

    The approximation X_hat = Y * x_lift lives in O/pil^a; the true integral
    root X differs from it by a lattice vector of pil^a, so X is the residual
    of X_hat under nearest-plane once a is past precision_estimate. On verify
    failure a doubles (default 4 times) before giving up.
    """
    check_odd_prime_power(e)
    l, k = prime_power_split(e)
    p = pil.p
    terms = [(u, aa) for u, aa in y.terms if aa != 0]
    if not terms:
        return K.one
    if any(aa < 0 for _, aa in terms):
        raise ValueError("exponents must lie in [0, e]")
    if e % p == 0:
        raise ValueError("p divides e")
    if K.omega is not None:
        raise Unsupported("reconstruction works on the power basis order")
    work, T = clear_denominators(FactoredElement(K, terms), e)
    Bp = coeff_bound_root(work, e, K)
    a = precision_estimate(K.n, pil.f_deg, p, Bp)
    field = FqField(p, gfpoly.from_int_poly(list(pil.g), p))
    for _ in range(max_doublings + 1):
        ga = hensel_factor_lift(list(pil.g), list(K.f), p, a)
        M = p ** a
        ctx = PadicContext(p, a.bit_length() - 1, M, Bp, tuple(ga))
        Y = _fold_mod(work.terms, M, ga, p)
        a_poly = gfpoly.powmod(Y, e - 1, [c % M for c in ga], M)
        abar = field.element(gfpoly.from_int_poly(a_poly, p))
        try:
            x0 = fq_eth_root(abar.inverse(), e)
        except NotAPower as exc:
            raise RootSeedMissing("y mod pil is not an e-th power residue") from exc
        lat = build_ideal_lattice(pil, a, K, ga=ga)
        red = lll_reduce([list(r) for r in lat.basis])
        for cand in _twist_candidates(x0, field, l, k, seed):
            xk = hensel_lift(a_poly, cand, e, ctx)
            approx = gfpoly.mulmod(Y, xk, [c % M for c in ga], M)
            xhat = list(approx) + [0] * (K.n - len(approx))
            w = babai_nearest_plane(red, xhat)
            coords = [h - wi for h, wi in zip(xhat, w)]
            if any(abs(c) > Bp for c in coords):
                stats["twists"] += 1
                continue
            x = K.element(coords)
            if T != 1:
                x = x / K.element([T])
            if verify_root(x, y, e, K, trials=2, seed=seed + 1):
                return x
            stats["twists"] += 1
        a *= 2
        stats["doublings"] += 1
    raise VerificationFailed("reconstruction failed after precision doublings")
