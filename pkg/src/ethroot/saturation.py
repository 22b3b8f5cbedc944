"""Detect e-th powers in a finitely generated multiplicative subgroup.

The subgroup comes factored: generators y_i = prod_j u_j^{E_ij} over a basis
U. Characters into Z/eZ (power residue symbols at degree-1 primes, the
Schirokauer map at e, known valuations) kill e-th powers, and enough of them
make the converse hold up to probability e^-r, so the left kernel of the
character matrix names the powers. Roots are then extracted by the strategy
layer without ever expanding a product.
"""

import math
from dataclasses import dataclass

from . import gfpoly
from .errors import NotUnit, RamifiedE, SearchExhausted, ZeroInput
from .fq import FqElement, FqField, factor_mod_p, fq_dlog_order_e
from .numfield import FactoredElement, FieldElement, NumberField, PrimeIdealRep
from .primes import check_odd_prime_power, derive_rng, is_prime, modinv, prime_power_split
from .strategy import RootRequest, RootResult, eth_root

CHAR_BITS = 29
SELECT_BUDGET = 100000
DLOG_LIMIT = 1 << 40  # matches the BSGS budget in fq
EXTRA_CHARACTERS = 20  # failure probability <= e^-20


@dataclass
class GeneratingSet:
    """Generators y_i = prod_j u_j^{E[i][j]}, with optional known valuations."""

    U: list
    E: list
    valuations: list | None = None

    def __post_init__(self):
        if not self.U:
            raise ValueError("empty multiplicative basis")
        if any(u.is_zero() for u in self.U):
            raise ZeroInput("zero basis element")
        r = len(self.U)
        if any(len(row) != r for row in self.E):
            raise ValueError("exponent rows do not match the basis size")
        if self.valuations is not None:
            if len(self.valuations) != len(self.E):
                raise ValueError("valuation rows do not match the generators")
            if self.valuations and any(len(row) != len(self.valuations[0])
                                       for row in self.valuations):
                raise ValueError("ragged valuation matrix")


@dataclass(frozen=True)
class CharacterPrime:
    """Degree-1 prime with norm 1 mod e, zeta of exact order e, cached chi(u_j)."""

    Q_ideal: PrimeIdealRep
    zeta: FqElement
    table: tuple | None = None


@dataclass
class CharacterMatrix:
    M: list
    column_tags: list


def _eval_mod(coeffs, x: int, q: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    return acc


def _unit_residue(u: FieldElement, r: int, q: int) -> int:
    if u.den % q == 0:
        raise ValueError(f"denominator of u vanishes mod {q}")
    val = _eval_mod(u.num, r, q) * modinv(u.den % q, q) % q
    if val == 0:
        raise ValueError(f"u is not a unit mod the ideal over {q}")
    return val


def _order_e_element(q: int, e: int, ell: int, rng) -> int:
    # z = t^((q-1)/e) has order dividing e = ell^k; exact iff z^(e/ell) != 1
    exp = (q - 1) // e
    while True:
        z = pow(rng.randrange(2, q), exp, q)
        if z != 1 and pow(z, e // ell, q) != 1:
            return z


def select_character_primes(K: NumberField, e: int, count: int, U,
                            seed: int = 0, budget: int = SELECT_BUDGET) -> list:
    """Degree-1 primes Q with N(Q) = 1 mod e, units at every u_j, chi tables.

    Cyclotomic fields sample q = 1 mod lcm(e, m) so f splits completely;
    otherwise q = 1 mod e and whatever linear factors show up are used.
    """
    ell, _ = check_odd_prime_power(e)
    if count < 1:
        raise ValueError("count must be at least 1")
    M = e if K.conductor is None else math.lcm(e, K.conductor)
    avoid = set()
    for u in U:
        if u.den != 1:
            avoid.add(u.den)
        c = math.gcd(*u.num) if u.num else 0
        if c > 1:
            avoid.add(c)
    rng = derive_rng(seed, "characters")
    bits = max(CHAR_BITS, M.bit_length() + 8)
    t_lo = max(1, (1 << (bits - 1)) // M)
    t_hi = max(t_lo + 1, (1 << bits) // M)
    out: list = []
    seen = set()
    tested = 0
    while len(out) < count:
        if tested >= budget:
            raise SearchExhausted(f"no {count} character primes in {budget} candidates")
        tested += 1
        q = M * rng.randrange(t_lo, t_hi) + 1
        if q in seen or not is_prime(q):
            continue
        seen.add(q)
        if any(a % q == 0 for a in avoid):
            continue
        fac = factor_mod_p(list(K.f), q)
        if any(mult > 1 for _, mult in fac):
            continue
        linears = [g for g, _ in fac if len(g) == 2]
        if not linears:
            continue
        field = FqField(q, [0, 1])
        zeta = field.element([_order_e_element(q, e, ell, rng)])
        for g in linears:
            if len(out) >= count:
                break
            r = (-g[0]) % q
            try:
                table = tuple(
                    fq_dlog_order_e(
                        field.element([pow(_unit_residue(u, r, q), (q - 1) // e, q)]),
                        zeta, e)
                    for u in U)
            except ValueError:
                continue  # some u_j vanishes mod this ideal; its siblings may do
            out.append(CharacterPrime(PrimeIdealRep(q, tuple(g), 1), zeta, table))
    return out


def chi(u: FieldElement, cp: CharacterPrime, e: int) -> int:
    """Power residue symbol as a residue mod e: log_zeta of u^((Q-1)/e) mod Q.

    Zero exactly on the e-th power residues; u must be a unit at the ideal.
    """
    ideal = cp.Q_ideal
    if ideal.f_deg != 1:
        raise ValueError("character ideals must have degree 1")
    q = ideal.p
    r = (-ideal.g[0]) % q
    val = _unit_residue(u, r, q)
    t = pow(val, (q - 1) // e, q)
    return fq_dlog_order_e(cp.zeta.field.element([t]), cp.zeta, e)


def schirokauer_map(u: FieldElement, e: int, K: NumberField) -> list:
    """Additive character at e: the n coefficients of (u^rho - 1 mod e^2) / e.

    rho is the exponent of (O/eO)*, so u^rho = 1 mod e for every u coprime
    to e and the division is exact; e-th powers land on the zero vector.
    """
    ell, k = check_odd_prime_power(e)
    fac = factor_mod_p(list(K.f), ell)
    if any(mult > 1 for _, mult in fac):
        raise RamifiedE(f"{ell} ramifies in K (f not squarefree mod {ell})")
    # exponent of (O/eO)*: the ell-part ell^(k-1) times lcm of the residue
    # field orders ell^deg(g) - 1
    rho = ell ** (k - 1)
    for g, _ in fac:
        rho = math.lcm(rho, ell ** (len(g) - 1) - 1)
    e2 = e * e
    if u.den % ell == 0:
        raise NotUnit("denominator is divisible by e's prime")
    dinv = modinv(u.den % e2, e2)
    coeffs = [c * dinv % e2 for c in u.num]
    w = gfpoly.powmod(gfpoly.trim(coeffs), rho, list(K.f), e2)
    w = w + [0] * (K.n - len(w))
    w[0] = (w[0] - 1) % e2
    out = []
    for c in w:
        if c % e:
            raise NotUnit("u^rho is not 1 mod e; u is not a unit at e")
        out.append((c // e) % e)
    return out


def build_character_matrix(G: GeneratingSet, columns, e: int) -> CharacterMatrix:
    """Evaluate every character on U once, then push through E mod e.

    columns mixes CharacterPrime entries, the tag "schirokauer" (n columns)
    and the tag "valuations" (one column per known valuation).
    """
    E = G.E
    s, r = len(E), len(G.U)
    rows: list = [[] for _ in range(s)]
    tags: list = []

    def push(base, tag):
        for i in range(s):
            rows[i].append(sum(E[i][j] * base[j] for j in range(r)) % e)
        tags.append(tag)

    for col in columns:
        if isinstance(col, CharacterPrime):
            base = col.table
            if base is None or len(base) != r:
                base = [chi(u, col, e) for u in G.U]
            push(base, ("chi", col.Q_ideal.p, (-col.Q_ideal.g[0]) % col.Q_ideal.p))
        elif col == "schirokauer":
            K = G.U[0].field
            vecs = [schirokauer_map(u, e, K) for u in G.U]
            for t in range(K.n):
                push([vecs[j][t] for j in range(r)], ("lambda", t))
        elif col == "valuations":
            if G.valuations is None:
                raise ValueError("no valuation data in the generating set")
            width = len(G.valuations[0]) if G.valuations else 0
            for t in range(width):
                for i in range(s):
                    rows[i].append(G.valuations[i][t] % e)
                tags.append(("val", t))
        else:
            raise ValueError(f"unknown column source {col!r}")
    return CharacterMatrix([list(row) for row in rows], tags)


def _val_ell(a: int, ell: int, k: int) -> int:
    if a == 0:
        return k
    v = 0
    while a % ell == 0:
        a //= ell
        v += 1
    return v


def kernel_mod_e(M, e: int) -> list:
    """Generators of the left kernel over Z/eZ, e a prime power.

    Howell-style elimination on [M | I]: pivots are normalized to ell^v, and
    ell^(k-v) times each pivot row is kept in play so kernel vectors hiding
    above a non-unit pivot are not lost. Redundant generators are fine.
    """
    ell, k = prime_power_split(e)
    rows = M.M if isinstance(M, CharacterMatrix) else M
    s = len(rows)
    width = len(rows[0]) if s else 0
    active = []
    for i, row in enumerate(rows):
        tail = [1 if j == i else 0 for j in range(s)]
        active.append([c % e for c in row] + tail)
    for col in range(width):
        best = None
        for row in active:
            if row[col] == 0:
                continue
            v = _val_ell(row[col], ell, k)
            if best is None or v < best[1]:
                best = (row, v)
        if best is None:
            continue
        pivot, v = best
        unit = pivot[col] // ell ** v
        inv = modinv(unit, e)
        for j in range(col, width + s):
            pivot[j] = pivot[j] * inv % e
        for row in active:
            if row is pivot or row[col] == 0:
                continue
            m = row[col] // ell ** v
            for j in range(col, width + s):
                row[j] = (row[j] - m * pivot[j]) % e
        active.remove(pivot)
        if v > 0:
            shifted = [c * ell ** (k - v) % e for c in pivot]
            active.append(shifted)
    out = []
    seen = set()
    for row in active:
        if any(row[:width]):
            continue  # cannot happen: every column was eliminated
        tail = tuple(row[width:])
        if any(tail) and tail not in seen:
            seen.add(tail)
            out.append(tail)
    return out


def detect_eth_powers(G: GeneratingSet, e: int, K: NumberField,
                      policy: dict | None = None, seed: int = 0) -> list:
    """Kernel vectors alpha with prod y_i^{alpha_i} an e-th power (w.h.p.).

    Returns (alpha, y_alpha) pairs with y_alpha factored over U by exponent
    arithmetic. policy: {"characters": count (default s + 20), "dlog_limit":
    BSGS cutoff}; above the cutoff only Schirokauer and valuation columns
    are used, exactly the cheap large-e recipe.
    """
    check_odd_prime_power(e)
    policy = policy or {}
    s, r = len(G.E), len(G.U)
    columns: list = []
    if G.valuations is not None:
        columns.append("valuations")
    if e <= policy.get("dlog_limit", DLOG_LIMIT):
        count = policy.get("characters", s + EXTRA_CHARACTERS)
        columns.extend(select_character_primes(K, e, count, G.U, seed=seed))
    else:
        columns.append("schirokauer")
    mat = build_character_matrix(G, columns, e)
    out = []
    for alpha in kernel_mod_e(mat, e):
        exps = [sum(alpha[i] * G.E[i][j] for i in range(s)) for j in range(r)]
        terms = [(G.U[j], exps[j]) for j in range(r) if exps[j]]
        out.append((alpha, FactoredElement(K, terms)))
    return out


def saturate(G: GeneratingSet, e: int, K: NumberField, seed: int = 0) -> list:
    """Detected e-th powers together with their verified roots."""
    out = []
    for alpha, y in detect_eth_powers(G, e, K, seed=seed):
        result = eth_root(RootRequest(K, e, y, seed=seed))
        out.append((alpha, result))
    return out
