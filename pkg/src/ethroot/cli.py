"""Command line surface: root extraction, power detection, benchmarks.

Documents are JSON with every integer rendered as a decimal string, so no
consumer ever sees a rounded coefficient. Exit codes: 0 success, 2 input is
not an e-th power, 3 parse/validation problems, 4 search budget exhausted.
"""

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .errors import BudgetExceeded, EthrootError, NotAnEthPower, SearchExhausted
from .crtroot import eth_root_double_crt
from .numfield import FactoredElement, NumberField
from .primes import derive_rng
from .saturation import GeneratingSet, detect_eth_powers
from .strategy import METHODS, RootRequest, eth_root

EXIT_OK = 0
EXIT_NOT_A_POWER = 2
EXIT_PARSE = 3
EXIT_BUDGET = 4

DEFAULT_SEED = 0

BENCH_SUITES = ("crt-scaling", "couveignes-scaling", "exponent-insensitivity",
                "saturation-analog")
CSV_HEADER = ("method", "m", "n", "e", "bits", "seconds", "verified")


# -- document plumbing ---------------------------------------------------------


def _int(v) -> int:
    if isinstance(v, bool):
        raise ValueError(f"expected an integer, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        return int(v, 10)
    raise ValueError(f"expected an integer or decimal string, got {v!r}")


def _field_from_doc(doc) -> NumberField:
    if not isinstance(doc, dict):
        raise ValueError("field descriptor must be an object")
    if "conductor" in doc:
        return NumberField.cyclotomic(_int(doc["conductor"]))
    if "poly" in doc:
        return NumberField([_int(c) for c in doc["poly"]])
    raise ValueError("field descriptor needs 'conductor' or 'poly'")


def _element_from_doc(K: NumberField, doc):
    return K.element([_int(c) for c in doc["coeffs"]], _int(doc.get("den", 1)))


def _factored_from_doc(K: NumberField, terms) -> FactoredElement:
    if not isinstance(terms, list):
        raise ValueError("element must be a list of factored terms")
    pairs = [(_element_from_doc(K, t), _int(t.get("exp", 1))) for t in terms]
    return FactoredElement(K, pairs)


def _element_doc(x) -> dict:
    return {"coeffs": [str(c) for c in x.num], "den": str(x.den)}


def _term_docs(y: FactoredElement) -> list:
    return [dict(_element_doc(u), exp=str(a)) for u, a in y.terms]


def _write_lines(docs, out_path):
    text = "".join(json.dumps(doc) + "\n" for doc in docs)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(msg: str, code: int) -> int:
    print(f"ethroot: {msg}", file=sys.stderr)
    return code


# -- root ----------------------------------------------------------------------


def cmd_root(args) -> int:
    try:
        if args.job:
            with open(args.job) as fh:
                job = json.load(fh)
        else:
            job = {}
            if args.conductor is not None:
                job["field"] = {"conductor": args.conductor}
            elif args.field:
                job["field"] = {"poly": args.field.split(",")}
            if args.e is not None:
                job["e"] = args.e
            if args.element:
                job["element"] = json.loads(args.element)
        K = _field_from_doc(job.get("field", {}))
        e = _int(job["e"])
        y = _factored_from_doc(K, job["element"])
        method = job.get("method", args.method)
        seed = _int(job.get("seed", args.seed))
        req = RootRequest(K, e, y, method=method, seed=seed)
    except (KeyError, ValueError, TypeError, OSError, json.JSONDecodeError,
            EthrootError) as exc:
        return _fail(f"bad job: {exc}", EXIT_PARSE)

    t0 = time.perf_counter()
    try:
        res = eth_root(req)
    except NotAnEthPower as exc:
        return _fail(f"not an e-th power: {exc}", EXIT_NOT_A_POWER)
    except (BudgetExceeded, SearchExhausted) as exc:
        return _fail(f"budget exhausted: {exc}", EXIT_BUDGET)
    except EthrootError as exc:
        return _fail(f"cannot process: {exc}", EXIT_PARSE)
    _write_lines([{
        "root": _element_doc(res.root),
        "prefactor": _term_docs(res.prefactor),
        "method_used": res.method_used,
        "verified": True,
        "seconds": round(time.perf_counter() - t0, 6),
        "seed": str(seed),
    }], args.out)
    return EXIT_OK


# -- detect ----------------------------------------------------------------------


def cmd_detect(args) -> int:
    try:
        with open(args.set) as fh:
            doc = json.load(fh)
        K = _field_from_doc(doc.get("field", {}))
        e = _int(args.e if args.e is not None else doc["e"])
        U = [_element_from_doc(K, u) for u in doc["U"]]
        E = [[_int(c) for c in row] for row in doc["E"]]
        vals = doc.get("valuations")
        if vals is not None:
            vals = [[_int(c) for c in row] for row in vals]
        G = GeneratingSet(U, E, valuations=vals)
        seed = _int(args.seed)
    except (KeyError, ValueError, TypeError, OSError, json.JSONDecodeError,
            EthrootError) as exc:
        return _fail(f"bad generating set: {exc}", EXIT_PARSE)

    try:
        lines = []
        for alpha, y in detect_eth_powers(G, e, K, seed=seed):
            line = {"alpha": [str(a) for a in alpha], "terms": _term_docs(y)}
            if args.roots:
                res = eth_root(RootRequest(K, e, y, seed=seed))
                line["root"] = _element_doc(res.root)
                line["prefactor"] = _term_docs(res.prefactor)
                line["method_used"] = res.method_used
                line["verified"] = True
            lines.append(line)
        _write_lines(lines, args.out)
    except NotAnEthPower as exc:
        return _fail(f"detected relation failed extraction: {exc}", EXIT_NOT_A_POWER)
    except (BudgetExceeded, SearchExhausted) as exc:
        return _fail(f"budget exhausted: {exc}", EXIT_BUDGET)
    except EthrootError as exc:
        return _fail(f"cannot process: {exc}", EXIT_PARSE)
    return EXIT_OK


# -- bench ----------------------------------------------------------------------


def _grid(text, default):
    if text is None:
        return default
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _random_element(K: NumberField, bits: int, rng):
    lo, hi = -(1 << bits) + 1, 1 << bits
    while True:
        x = K.element([rng.randrange(lo, hi) for _ in range(K.n)])
        if not x.is_zero():
            return x


def _bench_one(spec) -> dict:
    suite, method, m, e, bits, seed = spec
    K = NumberField.cyclotomic(m)
    rng = derive_rng(seed, f"bench-{suite}-{m}-{e}-{bits}")
    verified = True
    t0 = time.perf_counter()
    try:
        if suite == "saturation-analog":
            u1 = _random_element(K, bits, rng)
            u2 = _random_element(K, bits, rng)
            G = GeneratingSet([u1, u2], [[e, 0], [1, 2]])
            found = detect_eth_powers(G, e, K, seed=seed)
            verified = bool(found) and all(
                eth_root(RootRequest(K, e, y, seed=seed)) is not None
                for _, y in found)
        elif method == "double_crt":
            # the factored (x, e) form is the protocol: folding must scale
            # with log e, so the power is never expanded
            x = _random_element(K, bits, rng)
            y = FactoredElement(K, [(x, e)])
            root = eth_root_double_crt(y, e, K, seed=seed)
            verified = root == x or root ** e == x ** e
        else:
            x = _random_element(K, bits, rng)
            y = FactoredElement(K, [(x ** e, 1)])
            res = eth_root(RootRequest(K, e, y, method=method, seed=seed))
            verified = res.root ** e == x ** e
    except EthrootError:
        verified = False
    return {
        "method": method, "m": m, "n": K.n, "e": e, "bits": bits,
        "seconds": round(time.perf_counter() - t0, 6),
        "verified": "true" if verified else "false",
    }


def _bench_specs(args) -> list:
    suite = args.suite
    seed = args.seed
    reps = args.reps
    if suite == "crt-scaling":
        ms = _grid(args.m_grid, (8, 16, 32))
        es = _grid(args.e_grid, (3,))
        bits = _grid(args.bits_grid, (50,))
        method = "double_crt"
    elif suite == "couveignes-scaling":
        ms = _grid(args.m_grid, (15, 45))
        es = _grid(args.e_grid, (3,))
        bits = _grid(args.bits_grid, (20,))
        method = "couveignes"
    elif suite == "exponent-insensitivity":
        ms = _grid(args.m_grid, (16,))
        es = _grid(args.e_grid, (3, 13099))
        bits = _grid(args.bits_grid, (50,))
        method = "double_crt"
    else:
        ms = _grid(args.m_grid, (4,))
        es = _grid(args.e_grid, (3, 5))
        bits = _grid(args.bits_grid, (3,))
        method = "saturate"
    return [(suite, method, m, e, b, seed + rep)
            for m in ms for e in es for b in bits for rep in range(reps)]


def cmd_bench(args) -> int:
    if args.seed is None:
        return _fail("bench requires an explicit --seed", EXIT_PARSE)
    if args.suite not in BENCH_SUITES:
        return _fail(f"unknown suite {args.suite!r}", EXIT_PARSE)
    try:
        specs = _bench_specs(args)
    except ValueError as exc:
        return _fail(f"bad grid: {exc}", EXIT_PARSE)
    if args.jobs > 1 and specs:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, specs))
    else:
        rows = [_bench_one(s) for s in specs]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


# -- selftest ----------------------------------------------------------------------


def cmd_selftest(args) -> int:
    checks = [
        ("double_crt", 16, 3, "auto"),
        ("padic", 9, 3, "auto"),
        ("couveignes", 15, 3, "auto"),
        ("reconstruct", 16, 3, "reconstruct"),
    ]
    failures = 0
    for want, m, e, method in checks:
        K = NumberField.cyclotomic(m)
        rng = derive_rng(args.seed, f"selftest-{m}-{e}")
        x = _random_element(K, 8, rng)
        t0 = time.perf_counter()
        try:
            res = eth_root(RootRequest(K, e, FactoredElement(K, [(x ** e, 1)]),
                                       method=method, seed=args.seed))
            ok = res.root ** e == x ** e and res.method_used == want
        except EthrootError as exc:
            print(f"FAIL {want} m={m} e={e}: {exc}")
            failures += 1
            continue
        status = "ok" if ok else "FAIL"
        failures += 0 if ok else 1
        print(f"{status} {want} m={m} e={e} ({time.perf_counter() - t0:.2f}s)")
    # saturation plant
    K4 = NumberField.cyclotomic(4)
    g = K4.element([2, 1])
    G = GeneratingSet([g ** 3, K4.element([3, 2])], [[1, 0], [0, 1]])
    t0 = time.perf_counter()
    found = detect_eth_powers(G, 3, K4, seed=args.seed)
    ok = [a for a, _ in found] == [(1, 0)]
    print(f"{'ok' if ok else 'FAIL'} saturation m=4 e=3 "
          f"({time.perf_counter() - t0:.2f}s)")
    failures += 0 if ok else 1
    print(f"selftest: {5 - failures}/5 passed")
    return EXIT_OK if failures == 0 else 1


# -- argument surface ----------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ethroot",
        description="e-th roots of number field elements in factored form")
    sub = parser.add_subparsers(dest="command", required=True)

    p_root = sub.add_parser("root", help="extract one e-th root")
    p_root.add_argument("--job", help="JSON job file (overrides other flags)")
    p_root.add_argument("--conductor", help="cyclotomic conductor m")
    p_root.add_argument("--field", help="comma-separated monic polynomial")
    p_root.add_argument("--e", help="odd prime power exponent")
    p_root.add_argument("--element", help="JSON list of {coeffs, den, exp}")
    p_root.add_argument("--method", default="auto", choices=METHODS)
    p_root.add_argument("--seed", default=DEFAULT_SEED, type=int)
    p_root.add_argument("--jobs", default=1, type=int)
    p_root.add_argument("--out")
    p_root.set_defaults(func=cmd_root)

    p_det = sub.add_parser("detect", help="find e-th powers in a generating set")
    p_det.add_argument("set", help="JSON generating-set file")
    p_det.add_argument("--e", help="overrides the file's exponent")
    p_det.add_argument("--roots", action="store_true",
                       help="also extract and verify the roots")
    p_det.add_argument("--seed", default=DEFAULT_SEED, type=int)
    p_det.add_argument("--jobs", default=1, type=int)
    p_det.add_argument("--out")
    p_det.set_defaults(func=cmd_detect)

    p_bench = sub.add_parser("bench", help="timing suites as CSV")
    p_bench.add_argument("suite", choices=BENCH_SUITES)
    p_bench.add_argument("--seed", type=int, default=None,
                         help="mandatory: bench runs must be reproducible")
    p_bench.add_argument("--reps", type=int, default=1)
    p_bench.add_argument("--m-grid", dest="m_grid")
    p_bench.add_argument("--e-grid", dest="e_grid")
    p_bench.add_argument("--bits-grid", dest="bits_grid")
    p_bench.add_argument("--jobs", default=1, type=int)
    p_bench.add_argument("--out")
    p_bench.set_defaults(func=cmd_bench)

    p_self = sub.add_parser("selftest", help="quick end-to-end battery")
    p_self.add_argument("--seed", default=DEFAULT_SEED, type=int)
    p_self.set_defaults(func=cmd_selftest)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
