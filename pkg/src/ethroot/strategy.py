"""Method dispatch: pick a root algorithm from the field/exponent arithmetic.

Order on auto: double-CRT when some prime sees no e-th roots of unity in any
residue field; inert-prime Hensel lifting when one exists; the relative
Couveignes recursion when a cyclotomic tower exists; prime-ideal lattice
reconstruction as the last resort. Backends re-check their own admissibility
(raising NotApplicable/Unsupported), so auto never runs an inapplicable
method, and a genuine failure falls through to the next applicable one
before NotAnEthPower is reported.
"""

import math
import time
from dataclasses import dataclass, field

from . import couveignes as _couveignes_mod
from . import crtroot as _crtroot_mod
from . import padic as _padic_mod
from .couveignes import build_tower, eth_root_couveignes
from .crtroot import eth_root_double_crt, is_bad_field
from .errors import (
    EthrootError,
    IncompatibleFields,
    NotAnEthPower,
    NotApplicable,
    SearchExhausted,
    Unsupported,
)
from .fq import factor_mod_p
from .numfield import (
    FactoredElement,
    FieldElement,
    NumberField,
    PrimeIdealRep,
    SubfieldEmbedding,
    normalize_exponents,
)
from .padic import eth_root_padic, eth_root_padic_reconstruct, find_inert_prime
from .primes import check_odd_prime_power, derive_rng, random_prime
from .verify import verify_root  # noqa: F401  (part of this module's surface)

METHODS = ("auto", "double_crt", "padic", "reconstruct", "couveignes")

RECONSTRUCT_PRIME_BITS = 16


@dataclass
class RootRequest:
    """What to take the root of and how.

    budgets: optional overrides, {"search": prime-search budget shared by the
    admissibility probes, "doublings": precision retries of the lattice
    backend}; missing keys mean library defaults.
    """

    K: NumberField
    e: int
    y: FactoredElement
    method: str = "auto"
    seed: int = 0
    budgets: dict = field(default_factory=dict)


@dataclass
class RootResult:
    """root^e multiplies back to the requested y.

    prefactor is the factored part split off by exponent normalization
    (term exponents floor(a_i/e)); its value is already folded into root,
    it is kept so callers can see how much of the root was bookkeeping.
    Beware that folding expands the prefactor, so requests with huge term
    exponents pay for the expansion here.
    """

    prefactor: FactoredElement
    root: FieldElement
    method_used: str
    stats: dict


def _counters() -> dict:
    return {
        "crt": dict(_crtroot_mod.stats),
        "padic": dict(_padic_mod.stats),
        "couveignes": dict(_couveignes_mod.stats),
    }


def _counter_delta(before: dict, after: dict) -> dict:
    out = {}
    for mod, vals in after.items():
        d = {k: v - before[mod].get(k, 0) for k, v in vals.items() if v != before[mod].get(k, 0)}
        if d:
            out[mod] = d
    return out


def _avoid_integers(y: FactoredElement) -> tuple:
    # primes dividing a denominator or a whole numerator need to stay out of
    # the modular work: they turn a unit factor into 0 or 1/0 locally
    out = set()
    for u, _ in y.terms:
        if u.den != 1:
            out.add(u.den)
        c = math.gcd(*u.num) if u.num else 0
        if c > 1:
            out.add(c)
    return tuple(sorted(out))


def pick_reconstruct_ideal(K: NumberField, e: int, seed: int = 0,
                           avoid=(), budget: int = 200) -> PrimeIdealRep:
    """An unramified prime ideal for the lattice backend.

    Samples small primes and returns the largest-degree factor of f: larger
    residue degree means lower p-adic precision for the same lattice volume.
    """
    rng = derive_rng(seed, "reconstruct-ideal")
    tested = 0
    while tested < budget:
        p = random_prime(rng, RECONSTRUCT_PRIME_BITS)
        tested += 1
        if e % p == 0 or any(a and a % p == 0 for a in avoid):
            continue
        fac = factor_mod_p(list(K.f), p)
        if any(mult > 1 for _, mult in fac):
            continue
        g = fac[-1][0]
        return PrimeIdealRep(p, tuple(g), len(g) - 1)
    raise SearchExhausted(f"no usable reconstruction prime in {budget} candidates")


def _tower_root(y_level: FactoredElement, plan, level: int, e: int,
                seed: int, budgets: dict) -> FieldElement:
    """Root of y_level inside plan.levels[level], recursing down the chain."""
    top = plan.levels[level]
    if level == len(plan.levels) - 1:
        return _base_root(y_level, top, plan.base_method, e, seed, budgets)
    nxt = plan.levels[level + 1]
    emb = SubfieldEmbedding.cyclotomic(top, nxt.conductor)

    def solver(y_sub: FactoredElement) -> FieldElement:
        return _tower_root(y_sub, plan, level + 1, e, seed, budgets)

    return eth_root_couveignes(y_level, e, top, emb, solver, seed=seed + level)


def _base_root(y: FactoredElement, L: NumberField, method: str, e: int,
               seed: int, budgets: dict) -> FieldElement:
    avoid = _avoid_integers(y)
    search = budgets.get("search")
    if method == "padic":
        kw = {"seed": seed, "avoid": avoid}
        if search is not None:
            kw["budget"] = search
        p = find_inert_prime(L, e, **kw)
        if p is not None:
            return eth_root_padic(y, e, L, p, seed=seed)
        # cyclic unit groups promise an inert prime; fall back if the
        # budget ran dry anyway
    pil = pick_reconstruct_ideal(L, e, seed=seed, avoid=avoid)
    kw = {}
    if budgets.get("doublings") is not None:
        kw["max_doublings"] = budgets["doublings"]
    return eth_root_padic_reconstruct(y, e, L, pil, seed=seed, **kw)


def eth_root(req: RootRequest) -> RootResult:
    """Strategy entry point: normalize exponents, dispatch, return the root.

    auto tries double_crt, padic, couveignes, reconstruct in that order,
    skipping inapplicable ones; NotAnEthPower means every applicable method
    ran and failed its verification, Unsupported that none was applicable.
    An explicitly requested method propagates its own errors unchanged.
    """
    check_odd_prime_power(req.e)
    if req.method not in METHODS:
        raise ValueError(f"unknown method {req.method!r}")
    K, e, seed, budgets = req.K, req.e, req.seed, req.budgets or {}
    if req.y.field != K:
        raise IncompatibleFields("request element does not live in K")
    prefactor, residual = normalize_exponents(req.y, e)
    search = budgets.get("search")
    avoid = _avoid_integers(residual)

    def run_double_crt(y: FactoredElement) -> FieldElement:
        bad_kw = {"seed": seed}
        if K.conductor is None and search is not None:
            bad_kw["candidates"] = search
        if is_bad_field(K, e, **bad_kw):
            raise NotApplicable("every prime sees e-th roots of unity")
        return eth_root_double_crt(y, e, K, seed=seed)

    def run_padic(y: FactoredElement) -> FieldElement:
        kw = {"seed": seed, "avoid": avoid}
        if search is not None:
            kw["budget"] = search
        p = find_inert_prime(K, e, **kw)
        if p is None:
            raise NotApplicable("no inert prime found")
        return eth_root_padic(y, e, K, p, seed=seed)

    def run_couveignes(y: FactoredElement) -> FieldElement:
        if K.conductor is None or K.conductor % e != 0:
            raise NotApplicable("tower construction needs a cyclotomic bad case")
        plan = build_tower(K, e)
        return _tower_root(y, plan, 0, e, seed, budgets)

    def run_reconstruct(y: FactoredElement) -> FieldElement:
        pil = pick_reconstruct_ideal(K, e, seed=seed, avoid=avoid)
        kw = {}
        if budgets.get("doublings") is not None:
            kw["max_doublings"] = budgets["doublings"]
        return eth_root_padic_reconstruct(y, e, K, pil, seed=seed, **kw)

    order = {
        "double_crt": run_double_crt,
        "padic": run_padic,
        "couveignes": run_couveignes,
        "reconstruct": run_reconstruct,
    }
    if req.method == "auto":
        plan = list(order.items())
    else:
        plan = [(req.method, order[req.method])]

    before = _counters()
    t0 = time.perf_counter()
    failures: list[str] = []
    applicable = 0
    for name, backend in plan:
        try:
            root = backend(residual)
        except (NotApplicable, Unsupported) as exc:
            if req.method != "auto":
                raise
            failures.append(f"{name}: not applicable: {exc}")
            continue
        except EthrootError as exc:
            if req.method != "auto":
                raise
            applicable += 1
            failures.append(f"{name}: {type(exc).__name__}: {exc}")
            continue
        if prefactor.terms:
            root = prefactor.value() * root
        stats = {
            "seconds": time.perf_counter() - t0,
            "failures": failures,
            "counters": _counter_delta(before, _counters()),
        }
        return RootResult(prefactor, root, name, stats)
    if applicable == 0:
        raise Unsupported("no implemented method applies to this field")
    raise NotAnEthPower("; ".join(failures))
