"""``randdag`` command line: count, sample, stats, selftest."""

from __future__ import annotations

import argparse
import os
import secrets
import statistics
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import counting, labelled
from .errors import (CacheError, CacheMismatchError, EmptyClassError, OutOfRangeError,
                     RanddagError, ResourceLimitError)
from .graph import decode, doag_stats, encode, format_doag
from .policy import DegreePolicy
from .rejection import sample_doag_fast
from .recursive import sample_doag
from .rng import RngStream, derive_seed

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_USAGE = 2
EXIT_RANGE = 3
EXIT_EMPTY = 4


def _policy(text: str) -> DegreePolicy:
    try:
        return DegreePolicy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _positive(text: str) -> int:
    value = _nonneg(text)
    if value == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


# tables ---------------------------------------------------------------------


def _default_cache(policy: DegreePolicy, max_n: int, max_m: int) -> Path | None:
    root = os.environ.get("RANDDAG_CACHE_DIR")
    if not root:
        return None
    tag = str(policy).replace(":", "-").replace(",", "_")
    return Path(root) / f"doag-{tag}-n{max_n}-m{max_m}.txt"


def _full_doag_table(n: int, policy: DegreePolicy, cache: str | None,
                     max_entries: int | None) -> counting.DoagCountTable:
    max_m = counting.max_edges(n, policy)
    path = Path(cache) if cache else _default_cache(policy, n, max_m)
    if path is not None and path.exists():
        try:
            return counting.load_table(path, kind="doag", policy=policy, max_n=n, max_m=max_m)
        except CacheMismatchError:
            pass
    table = counting.build_doag_table(n, max_m, policy, max_entries=max_entries)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        counting.save_table(table, path)
    return table


def _print_counts(rows_by_edge: list[int]) -> None:
    print(" ".join(map(str, rows_by_edge)))


def cmd_count(args) -> int:
    n = args.n
    if args.object == "doag":
        if args.m is not None and not args.by_edges:
            table = counting.build_doag_table(n, args.m, args.policy, target_edges=args.m,
                                              max_entries=args.max_entries)
            ks = [args.k] if args.k is not None else range(1, n + 1)
            print(sum(table.count(n, args.m, k) for k in ks))
            return EXIT_OK
        table = _full_doag_table(n, args.policy, args.cache, args.max_entries)
        if args.by_edges:
            _print_counts(counting.doag_counts_by_edges(table, n, args.k))
        else:
            print(counting.doag_count_by_vertices(table, n, args.k))
        return EXIT_OK

    if args.cache:
        print("randdag: --cache applies to DOAG tables only", file=sys.stderr)
        return EXIT_USAGE
    max_m = n * (n - 1) // 2
    if args.m is not None:
        max_m = min(max_m, args.m)
    table = labelled.build_dag_table(n, max_m, args.policy, max_entries=args.max_entries)
    if args.by_edges:
        out = [0] * (max_m + 1)
        for (m, k), c in table.classes(n):
            if args.k is None or k == args.k:
                out[m] += int(c)
        while len(out) > 1 and not out[-1]:
            out.pop()
        _print_counts(out)
    elif args.m is not None:
        if args.m > max_m:
            print(0)
        else:
            print(sum(int(c) for (m, k), c in table.classes(n, args.m)
                      if args.k is None or k == args.k))
    else:
        print(labelled.dag_count_by_vertices(table, n, args.k))
    return EXIT_OK


# sampling -------------------------------------------------------------------

_worker_state: dict = {}


def _init_worker(state: dict) -> None:
    _worker_state.update(state)


def _render_one(index: int) -> str:
    st = _worker_state
    rng = RngStream(derive_seed(st["seed"], index))
    obj = st["object"]
    fmt = st["format"]
    if obj == "doag":
        d = sample_doag(rng, st["table"], st["n"], st["m"], st["k"])
        return format_doag(d, fmt)
    if obj == "doag-fast":
        return format_doag(decode(sample_doag_fast(rng, st["n"])), fmt)
    g = labelled.sample_dag(rng, st["table"], st["n"], st["m"], st["k"])
    if fmt == "dot":
        return labelled.format_dag_dot(g)
    if fmt == "edgelist":
        return labelled.format_dag_edgelist(g)
    rows = [["0"] * g.n for _ in range(g.n)]
    for u, v in g.edges:
        rows[u][v] = "1"
    return "\n".join([str(g.n)] + [" ".join(r) for r in rows])


def cmd_sample(args) -> int:
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed: {seed}", file=sys.stderr)
    n, m, k = args.n, args.m, args.k
    state = {"seed": seed, "object": args.object, "format": args.format, "n": n, "m": m, "k": k}
    if args.object == "doag":
        if m is not None:
            state["table"] = counting.build_doag_table(n, m, args.policy, target_edges=m,
                                                       max_entries=args.max_entries)
        else:
            state["table"] = _full_doag_table(n, args.policy, None, args.max_entries)
    elif args.object == "dag":
        max_m = n * (n - 1) // 2 if m is None else m
        state["table"] = labelled.build_dag_table(n, max_m, args.policy,
                                                  max_entries=args.max_entries)
    elif m is not None or k is not None or args.policy != DegreePolicy.all():
        print("randdag: doag-fast samples by vertex count only", file=sys.stderr)
        return EXIT_USAGE

    indices = range(args.count)
    if args.workers > 1 and args.count > 1:
        with ProcessPoolExecutor(args.workers, initializer=_init_worker,
                                 initargs=(state,)) as pool:
            chunks = list(pool.map(_render_one, indices))
    else:
        _init_worker(state)
        chunks = [_render_one(i) for i in indices]
    sys.stdout.write("\n\n".join(chunks) + "\n")
    return EXIT_OK


# statistics -----------------------------------------------------------------


def cmd_stats(args) -> int:
    if args.what == "constant":
        table = counting.build_source_table(args.n)
        every, single = counting.normalized_constant_sequence(table, args.n)
        print("j,normalized_all,normalized_single_source")
        for j, (a, b) in enumerate(zip(every, single), 1):
            print(f"{j},{a:.10f},{b:.10f}")
        return EXIT_OK
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed: {seed}", file=sys.stderr)
    edges, sources = [], []
    for index in range(args.samples):
        rng = RngStream(derive_seed(seed, index))
        st = doag_stats(decode(sample_doag_fast(rng, args.n)))
        edges.append(st.edges)
        sources.append(st.sources)
    spread = statistics.pstdev(edges) if len(edges) > 1 else 0.0
    print("n,samples,mean_edges,stdev_edges,min_edges,max_edges,max_possible_edges,"
          "mean_sources,single_source_fraction")
    print(f"{args.n},{args.samples},{statistics.fmean(edges):.4f},{spread:.4f},"
          f"{min(edges)},{max(edges)},{args.n * (args.n - 1) // 2},"
          f"{statistics.fmean(sources):.4f},{sources.count(1) / len(sources):.4f}")
    return EXIT_OK


# selftest -------------------------------------------------------------------


def _selftest_checks(quick: bool, cache: str | None):
    from . import oracle
    from .graph import TransitionMatrix, is_valid_transition_matrix

    top = 3 if quick else 5
    checks = []

    def vertex_totals():
        t = counting.build_doag_table(top, top * (top - 1) // 2)
        want = [1, 2, 8, 95, 4858][:top]
        got = [counting.doag_count_by_vertices(t, n) for n in range(1, top + 1)]
        return got == want, f"got {got}"
    checks.append(("doag-vertex-totals", vertex_totals))

    def doag_oracle():
        t = counting.build_doag_table(top, top * (top - 1) // 2)
        for n in range(1, top + 1):
            seen = Counter(oracle.matrix_stats(a.rows) for a in oracle.enumerate_doags(n))
            for (nn, m, k), c in seen.items():
                if t.count(nn, m, k) != c:
                    return False, f"D[{nn},{m},{k}]"
            if sum(seen.values()) != counting.doag_count_by_vertices(t, n):
                return False, f"total at n={n}"
        return True, ""
    checks.append(("doag-oracle-equivalence", doag_oracle))

    def dag_oracle():
        ln = min(top, 4)
        t = labelled.build_dag_table(ln, ln * (ln - 1) // 2)
        for n in range(1, ln + 1):
            seen = Counter(oracle.labelled_stats(g) for g in oracle.enumerate_labelled_dags(n))
            for (nn, m, k), c in seen.items():
                if t.count(nn, m, k) != c:
                    return False, f"A[{nn},{m},{k}]"
        return True, ""
    checks.append(("dag-oracle-equivalence", dag_oracle))

    def bijection():
        for n in range(1, min(top, 4) + 1):
            mats = oracle.enumerate_variation_matrices(n)
            valid = [TransitionMatrix(a) for a in mats if is_valid_transition_matrix(TransitionMatrix(a))]
            if len(valid) != len(oracle.enumerate_doags(n)):
                return False, f"n={n}"
            if any(encode(decode(a)) != a for a in valid):
                return False, f"round trip at n={n}"
        return True, ""
    checks.append(("matrix-bijection", bijection))

    def uniformity():
        rng = RngStream(2024)
        t = counting.build_doag_table(3, 3)
        draws = Counter(encode(sample_doag(rng, t, 3)).rows for _ in range(1600))
        p1 = oracle.chi_square_uniformity(draws, 8)
        fast = Counter(sample_doag_fast(rng, 3).rows for _ in range(1600))
        p2 = oracle.chi_square_uniformity(fast, 8)
        return min(p1, p2) > 1e-3, f"p-values {p1:.4g}, {p2:.4g}"
    checks.append(("sampler-uniformity-n3", uniformity))

    if cache:
        def cache_integrity():
            try:
                t = counting.load_table(cache)
            except (CacheError, OSError) as exc:
                return False, str(exc)
            if not isinstance(t, counting.DoagCountTable):
                return True, "non-DOAG cache parsed"
            bad = counting.check_recurrence(t)
            return not bad, f"{len(bad)} entries break the recurrence"
        checks.append(("cache-integrity", cache_integrity))
    return checks


def cmd_selftest(args) -> int:
    failures = 0
    for name, check in _selftest_checks(args.quick, args.cache):
        try:
            ok, detail = check()
        except Exception as exc:  # report, do not crash the harness
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        print(f"{'PASS' if ok else 'FAIL'} {name}" + ("" if ok or not detail else f": {detail}"))
        failures += not ok
    return EXIT_OK if not failures else EXIT_SELFTEST


# parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randdag",
                                     description="Count and uniformly sample DOAGs and labelled DAGs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def shape(p, need_n=True):
        p.add_argument("--n", type=_positive, required=need_n, help="number of vertices")
        p.add_argument("--m", type=_nonneg, help="number of edges")
        p.add_argument("--k", type=_positive, help="number of sources")
        p.add_argument("--policy", type=_policy, default=DegreePolicy.all(),
                       help="allowed out-degrees: all | positive | max:D | set:A,B,...")
        p.add_argument("--max-entries", type=_positive, help="abort if a table needs more entries")

    p = sub.add_parser("count", help="exact counts")
    p.add_argument("object", choices=["doag", "dag"])
    shape(p)
    p.add_argument("--by-edges", action="store_true", help="print counts for m = 0, 1, ...")
    p.add_argument("--cache", help="table cache file (read if present, written otherwise)")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sample", help="uniform random samples")
    p.add_argument("object", choices=["doag", "doag-fast", "dag"])
    shape(p)
    p.add_argument("--seed", type=_nonneg)
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--format", choices=["dot", "matrix", "edgelist"], default="edgelist")
    p.add_argument("--workers", type=_positive, default=1)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("stats", help="CSV statistics")
    p.add_argument("what", choices=["constant", "edges"])
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--samples", type=_positive, default=1000)
    p.add_argument("--seed", type=_nonneg)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("selftest", help="oracle and uniformity checks")
    p.add_argument("--quick", action="store_true", help="only sizes up to 3")
    p.add_argument("--cache", help="also verify this cache file")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EmptyClassError as exc:
        print(f"randdag: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (OutOfRangeError, ResourceLimitError, CacheError) as exc:
        print(f"randdag: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except RanddagError as exc:
        print(f"randdag: {exc}", file=sys.stderr)
        return EXIT_RANGE


if __name__ == "__main__":
    sys.exit(main())
