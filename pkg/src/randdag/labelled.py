"""Vertex-labelled DAGs: counting by (n, m, k) and uniform sampling.

Marking one of the ``k`` sources and removing it gives

    k * A[n, m, k] = n * sum_p sum_i A[n-1, m-p, k'] * C(n-k-p+i, i) * C(k', p-i)

with ``k' = k-1+p-i``: the factor ``n`` places the removed label, ``i``
edges go to non-sources of the remainder and ``p-i`` to remainder sources
that only the removed vertex points to. The table keeps the marked counts
``k * A`` next to ``A`` so the build never subtracts and divides only where
the division is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyClassError, MalformedDoagError, OutOfRangeError, ResourceLimitError
from .policy import DegreePolicy
from .rng import RngStream, choose_weighted, sample_subset

try:
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover
    _big = int


@dataclass(frozen=True)
class LabelledDag:
    """DAG on labels ``0..n-1``; ``edges`` is a set of ``(u, v)`` pairs."""

    n: int
    edges: frozenset

    def __post_init__(self) -> None:
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.n < 1:
            raise MalformedDoagError("a DAG needs at least one vertex")
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise MalformedDoagError(f"bad edge ({u}, {v})")
        indeg = [0] * self.n
        succ: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in edges:
            indeg[v] += 1
            succ[u].append(v)
        stack = [v for v in range(self.n) if indeg[v] == 0]
        seen = 0
        while stack:
            u = stack.pop()
            seen += 1
            for v in succ[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    stack.append(v)
        if seen != self.n:
            raise MalformedDoagError("edge set has a cycle")

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def k(self) -> int:
        return self.n - len({v for _, v in self.edges})

    def out_degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, _ in self.edges:
            deg[u] += 1
        return deg

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


class DagCountTable:
    """``A[n, m, k]`` and the marked counts ``k * A[n, m, k]``."""

    def __init__(self, policy: DegreePolicy, max_n: int, max_m: int, plain, marked) -> None:
        self.policy = policy
        self.max_n = max_n
        self.max_m = max_m
        self._plain = plain
        self._marked = marked

    def __repr__(self) -> str:
        return f"<DagCountTable policy={self.policy} max_n={self.max_n} max_m={self.max_m}>"

    def _check(self, n: int, m: int) -> None:
        if not 1 <= n <= self.max_n or not 0 <= m <= self.max_m:
            raise OutOfRangeError(
                f"(n={n}, m={m}) outside table bounds n<={self.max_n}, m<={self.max_m}")

    @staticmethod
    def _lookup(layer, m: int, k: int):
        run = layer.get(k)
        if run is None:
            return 0
        lo, vals = run
        return vals[m - lo] if 0 <= m - lo < len(vals) else 0

    def count(self, n: int, m: int, k: int) -> int:
        self._check(n, m)
        return int(self._lookup(self._plain[n], m, k))

    def marked_count(self, n: int, m: int, k: int) -> int:
        self._check(n, m)
        return int(self._lookup(self._marked[n], m, k))

    def raw(self, n: int, m: int, k: int):
        return self._lookup(self._plain[n], m, k)

    def classes(self, n: int, m: int | None = None):
        """``((m, k), A)`` for every non-empty class at ``n`` vertices."""
        out = []
        for k, (lo, vals) in sorted(self._plain[n].items()):
            for off, c in enumerate(vals):
                if c and (m is None or lo + off == m):
                    out.append(((lo + off, k), c))
        return sorted(out)


def _row(n: int, k: int, prev, policy: DegreePolicy, lo: int, hi: int) -> list:
    out = [_big(0)] * (hi - lo + 1)
    for p in policy.degrees(n - k):
        if p > hi:
            break
        for i in range(p + 1):
            kk = k - 1 + p - i
            run = prev.get(kk)
            if run is None:
                continue
            coef = math.comb(n - k - p + i, i) * math.comb(kk, p - i)
            if not coef:
                continue
            r_lo, vals = run
            for m in range(max(lo, r_lo + p), min(hi, r_lo + len(vals) - 1 + p) + 1):
                out[m - lo] += coef * vals[m - p - r_lo]
    return out


def build_dag_table(max_n: int, max_m: int, policy: DegreePolicy | None = None, *,
                    max_entries: int | None = None) -> DagCountTable:
    if max_n < 1 or max_m < 0:
        raise OutOfRangeError("need max_n >= 1 and max_m >= 0")
    policy = policy or DegreePolicy.all()
    plain: list = [{}, {1: (0, [_big(1)])}]
    marked: list = [{}, {1: (0, [_big(1)])}]
    stored = 1
    for n in range(2, max_n + 1):
        p_layer, m_layer = {}, {}
        for k in range(1, n + 1):
            lo = n - k
            hi = min(max_m, n * (n - 1) // 2 - k * (k - 1) // 2)
            if lo > hi:
                continue
            sums = _row(n, k, plain[n - 1], policy, lo, hi)
            first = next((t for t, v in enumerate(sums) if v), None)
            if first is None:
                continue
            last = max(t for t, v in enumerate(sums) if v)
            sums = sums[first:last + 1]
            pointed = [n * v for v in sums]
            values = []
            for v in pointed:
                q, rem = divmod(v, k)
                if rem:
                    raise ArithmeticError(f"marked count not divisible by k at n={n}, k={k}")
                values.append(q)
            m_layer[k] = (lo + first, pointed)
            p_layer[k] = (lo + first, values)
            stored += 2 * len(values)
        if max_entries is not None and stored > max_entries:
            raise ResourceLimitError(f"table needs more than {max_entries} entries (reached n={n})")
        plain.append(p_layer)
        marked.append(m_layer)
    return DagCountTable(policy, max_n, max_m, plain, marked)


def dag_count(table: DagCountTable, n: int, m: int, k: int) -> int:
    return table.count(n, m, k)


def dag_count_by_vertices(table: DagCountTable, n: int, k: int | None = None) -> int:
    if not 1 <= n <= table.max_n:
        raise OutOfRangeError(f"n={n} outside table bound {table.max_n}")
    if table.max_m < n * (n - 1) // 2:
        raise OutOfRangeError(f"table max_m={table.max_m} too small for n={n}")
    return int(sum(c for (_, kk), c in table.classes(n) if k is None or kk == k))


def dag_count_single_source_sink(table: DagCountTable, n: int) -> int:
    """DAGs with one source and one sink (needs a table built with the
    ``positive`` policy, which forces every non-final vertex to have an out-edge)."""
    if table.policy != DegreePolicy.positive():
        raise ValueError("requires a table built with the positive degree policy")
    return dag_count_by_vertices(table, n, k=1)


def _split_weights(table: DagCountTable, n: int, m: int, k: int):
    out = []
    for p in table.policy.degrees(n - k):
        if p > m:
            break
        for i in range(p + 1):
            kk = k - 1 + p - i
            if kk < 1:
                continue
            w = table.raw(n - 1, m - p, kk)
            if w:
                w = w * math.comb(n - k - p + i, i) * math.comb(kk, p - i)
                if w:
                    out.append(((p, i), w))
    return out


def sample_dag(rng: RngStream, table: DagCountTable, n: int, m: int | None = None,
               k: int | None = None) -> LabelledDag:
    """Uniform labelled DAG with ``n`` vertices, ``m`` edges and ``k`` sources.

    Leaving ``m`` and/or ``k`` unset samples uniformly from the union of the
    matching classes.
    """
    if m is None or k is None:
        if not 1 <= n <= table.max_n:
            raise OutOfRangeError(f"n={n} outside table bound {table.max_n}")
        options = [(mk, c) for mk, c in table.classes(n)
                   if (m is None or mk[0] == m) and (k is None or mk[1] == k)]
        if not options:
            raise EmptyClassError(f"no labelled DAG with n={n}, m={m}, k={k}")
        m, k = choose_weighted(rng, options)
    elif not table.count(n, m, k):
        raise EmptyClassError(f"no labelled DAG with n={n}, m={m}, k={k}")

    plan = []
    nn, mm, kk = n, m, k
    while nn > 1:
        weights = _split_weights(table, nn, mm, kk)
        # normalising by the sum of weights, which is k*A/n rather than A
        p, i = choose_weighted(rng, weights)
        plan.append((p, i))
        nn, mm, kk = nn - 1, mm - p, kk - 1 + p - i

    # vertices are creation ids; `order` holds them by current label
    order = [0]
    sources = [0]
    internal: list[int] = []
    succ: list[list[int]] = [[]]
    for p, i in reversed(plan):
        v = len(succ)
        picked_int = sample_subset(rng, internal, i)
        picked_src = sample_subset(rng, sources, p - i)
        succ.append(picked_int + picked_src)
        if picked_src:
            gone = set(picked_src)
            sources = [s for s in sources if s not in gone]
            internal.extend(picked_src)
        sources.append(v)
        order.insert(rng.randint(0, len(order)), v)
    label = [0] * len(succ)
    for pos, v in enumerate(order):
        label[v] = pos
    edges = frozenset((label[u], label[w]) for u in range(len(succ)) for w in succ[u])
    return LabelledDag(n, edges)


def format_dag_edgelist(g: LabelledDag) -> str:
    return "\n".join([str(g.n)] + [f"{u + 1} {v + 1}" for u, v in g.sorted_edges()])


def format_dag_dot(g: LabelledDag) -> str:
    lines = ["digraph {"]
    lines += [f"  {v + 1};" for v in range(g.n)]
    lines += [f"  {u + 1} -> {v + 1};" for u, v in g.sorted_edges()]
    lines.append("}")
    return "\n".join(lines)
