"""Brute-force ground truth at desk scale.

Nothing here reuses the predicates of the fast paths: variations, canonical
DOAG matrices and acyclicity are each re-checked from their definitions. The
size caps keep every enumeration under a few seconds.
"""

from __future__ import annotations

from collections import Counter
from itertools import product
from typing import Hashable, Iterable, Mapping

from scipy import stats

from .errors import SizeLimitError, UnderSampledError
from .graph import TransitionMatrix
from .labelled import LabelledDag

MAX_VARIATION_N = 8
MAX_DOAG_N = 5
MAX_LABELLED_N = 4


def _definitely_variation(seq: tuple[int, ...]) -> bool:
    positives = sorted(x for x in seq if x != 0)
    return positives == list(range(1, len(positives) + 1))


def enumerate_variations(n: int) -> list[tuple[int, ...]]:
    """All variations of size ``n`` in lexicographic order."""
    if n > MAX_VARIATION_N:
        raise SizeLimitError(f"variation enumeration is capped at n={MAX_VARIATION_N}")
    if n < 0:
        return []
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []
    used = [False] * (n + 1)

    def extend() -> None:
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for x in range(n + 1):
            if x and used[x]:
                continue
            used[x] = x != 0
            prefix.append(x)
            extend()
            prefix.pop()
            if x:
                used[x] = False

    extend()
    return [v for v in out if _definitely_variation(v)]


def _is_canonical_doag_matrix(rows: tuple[tuple[int, ...], ...]) -> bool:
    """Definition check: the matrix describes an acyclic ordered graph whose
    canonical BFS labelling (sources in column order) is the identity."""
    n = len(rows)
    children = []
    parents = [0] * n
    for i, row in enumerate(rows):
        ranked = sorted((r, j) for j, r in enumerate(row) if r)
        children.append([j for _, j in ranked])
        for j in children[-1]:
            parents[j] += 1
    sources = [j for j in range(n) if parents[j] == 0]
    seen = []
    waiting = list(sources)
    pending = parents[:]
    while waiting:
        v = waiting.pop(0)
        seen.append(v)
        for c in children[v]:
            pending[c] -= 1
            if pending[c] == 0:
                waiting.append(c)
    return seen == list(range(n))


def staircase_condition(rows: tuple[tuple[int, ...], ...]) -> bool:
    """Column-wise form of the same property, written from the characterisation
    by last parents: the last parent of each column never decreases, and ties
    (with a real parent) are ordered by the parent's ranks."""
    n = len(rows)
    last = []
    for j in range(n):
        col = [i for i in range(j) if rows[i][j] > 0]
        last.append(col[-1] if col else None)
    for j in range(n - 1):
        x, y = last[j], last[j + 1]
        if x is None:
            continue
        if y is None or y < x:
            return False
        if x == y and rows[x][j] >= rows[x][j + 1]:
            return False
    return True


def enumerate_variation_matrices(n: int) -> list[tuple[tuple[int, ...], ...]]:
    """Every strictly upper-triangular matrix whose row parts are variations."""
    if n > MAX_DOAG_N:
        raise SizeLimitError(f"matrix enumeration is capped at n={MAX_DOAG_N}")
    row_choices = [enumerate_variations(n - 1 - i) for i in range(n)]
    out = []
    for parts in product(*row_choices):
        out.append(tuple(tuple([0] * (i + 1) + list(p)) for i, p in enumerate(parts)))
    return out


def enumerate_doags(n: int) -> list[TransitionMatrix]:
    """Matrices of all DOAGs with ``n`` vertices, in lexicographic order."""
    if n > MAX_DOAG_N:
        raise SizeLimitError(f"DOAG enumeration is capped at n={MAX_DOAG_N}")
    if n < 1:
        return []
    kept = [m for m in enumerate_variation_matrices(n) if _is_canonical_doag_matrix(m)]
    kept.sort()
    return [TransitionMatrix(m) for m in kept]


def matrix_stats(rows: tuple[tuple[int, ...], ...]) -> tuple[int, int, int]:
    """``(n, m, k)`` read off a matrix: edges are non-zero cells, sources are
    empty columns."""
    n = len(rows)
    m = sum(1 for r in rows for x in r if x)
    k = sum(1 for j in range(n) if all(rows[i][j] == 0 for i in range(n)))
    return n, m, k


def _acyclic(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
    colour = [0] * n  # 0 new, 1 on stack, 2 done

    def visit(u: int) -> bool:
        colour[u] = 1
        for v in adj[u]:
            if colour[v] == 1 or (colour[v] == 0 and not visit(v)):
                return False
        colour[u] = 2
        return True

    return all(colour[u] or visit(u) for u in range(n))


def enumerate_labelled_dags(n: int) -> list[LabelledDag]:
    """All DAGs on labels ``0..n-1``, ordered by sorted edge list."""
    if n > MAX_LABELLED_N:
        raise SizeLimitError(f"labelled DAG enumeration is capped at n={MAX_LABELLED_N}")
    if n < 1:
        return []
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    found = []
    for mask in range(1 << len(pairs)):
        chosen = [pairs[b] for b in range(len(pairs)) if mask >> b & 1]
        if _acyclic(n, chosen):
            found.append(tuple(sorted(chosen)))
    found.sort()
    return [LabelledDag(n, frozenset(e)) for e in found]


def labelled_stats(g: LabelledDag) -> tuple[int, int, int]:
    heads = {v for _, v in g.edges}
    return g.n, len(g.edges), g.n - len(heads)


def group_counts(objects: Iterable, key) -> Counter:
    return Counter(key(o) for o in objects)


# statistics -----------------------------------------------------------------


def chi_square_uniformity(observed: Mapping[Hashable, int], expected_classes: int) -> float:
    """p-value of the chi-square test of ``observed`` against the uniform law
    on ``expected_classes`` objects (unseen objects count as zero)."""
    total = sum(observed.values())
    if expected_classes < 1:
        raise ValueError("need at least one class")
    if len(observed) > expected_classes:
        raise ValueError("more observed objects than classes")
    if total < 10 * expected_classes:
        raise UnderSampledError(
            f"{total} draws for {expected_classes} classes; need at least {10 * expected_classes}")
    counts = list(observed.values()) + [0] * (expected_classes - len(observed))
    if expected_classes == 1:
        return 1.0
    return float(stats.chisquare(counts).pvalue)


def chi_square_two_sample(a: Mapping[Hashable, int], b: Mapping[Hashable, int]) -> float:
    """p-value for the hypothesis that two samples share one distribution."""
    keys = sorted(set(a) | set(b), key=repr)
    if sum(a.values()) < 10 * len(keys) or sum(b.values()) < 10 * len(keys):
        raise UnderSampledError("each sample needs at least 10 draws per class")
    if len(keys) < 2:
        return 1.0
    table = [[a.get(x, 0) for x in keys], [b.get(x, 0) for x in keys]]
    return float(stats.chi2_contingency(table, correction=False).pvalue)


def chi_square_goodness(observed: Mapping[Hashable, int], probabilities: Mapping[Hashable, float]) -> float:
    """p-value of observed counts against arbitrary class probabilities."""
    keys = list(probabilities)
    total = sum(observed.values())
    if set(observed) - set(keys):
        raise ValueError("observed a class with zero probability")
    if total < 10 * len(keys):
        raise UnderSampledError("need at least 10 draws per class")
    norm = sum(probabilities.values())
    f_obs = [observed.get(x, 0) for x in keys]
    f_exp = [total * probabilities[x] / norm for x in keys]
    return float(stats.chisquare(f_obs, f_exp).pvalue)
