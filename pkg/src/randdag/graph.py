"""DOAGs, their transition-matrix encoding, and the smallest-source decomposition.

Vertices are numbered ``0..n-1`` in *canonical* order: run a BFS whose queue
starts with the sources in their prescribed order, pop the front vertex, and
push each child (in out-edge order) when its last incoming edge has been
consumed. A DOAG stored in canonical order has its ``k`` sources at indices
``0..k-1`` and every edge goes from a smaller to a larger index.

Removing vertex 0 leaves a DOAG whose canonical order is the old order shifted
by one, with the children that became sources appended after the surviving
sources. This is what makes the counting recurrence and both samplers work.

Text formats use 1-based vertex numbers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import InconsistentStepError, InvalidMatrixError, MalformedDoagError
from .variations import is_variation


def _bfs_order(n: int, out_edges: Sequence[Sequence[int]], sources: Sequence[int]) -> list[int]:
    indeg = [0] * n
    for targets in out_edges:
        for t in targets:
            indeg[t] += 1
    queue = deque(sources)
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for t in out_edges[v]:
            indeg[t] -= 1
            if indeg[t] == 0:
                queue.append(t)
    return order


def _check_shape(n: int, out_edges) -> None:
    for v, targets in enumerate(out_edges):
        if len(set(targets)) != len(targets):
            raise MalformedDoagError(f"vertex {v} has repeated out-edges")
        for t in targets:
            if not isinstance(t, int) or not 0 <= t < n or t == v:
                raise MalformedDoagError(f"bad edge {v} -> {t!r}")


@dataclass(frozen=True)
class Doag:
    """A DOAG in canonical order.

    ``out_edges[v]`` lists the targets of ``v`` in out-edge order. The
    constructor rejects anything not already canonical; use
    :meth:`from_ordered_graph` to canonicalize an arbitrary labelling.
    """

    out_edges: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        edges = tuple(tuple(t) for t in self.out_edges)
        object.__setattr__(self, "out_edges", edges)
        n = len(edges)
        if n == 0:
            raise MalformedDoagError("a DOAG has at least one vertex")
        _check_shape(n, edges)
        for v, targets in enumerate(edges):
            if any(t <= v for t in targets):
                raise MalformedDoagError(f"edge from {v} to a smaller index")
        k = self._source_count(edges)
        if _bfs_order(n, edges, range(k)) != list(range(n)):
            raise MalformedDoagError("vertices are not in canonical order")

    @staticmethod
    def _source_count(edges) -> int:
        hit = bytearray(len(edges))
        for targets in edges:
            for t in targets:
                hit[t] = 1
        k = 0
        while k < len(edges) and not hit[k]:
            k += 1
        if any(not h for h in hit[k:]):
            raise MalformedDoagError("sources must be a prefix of the vertex order")
        return k

    @classmethod
    def _trusted(cls, out_edges) -> "Doag":
        obj = object.__new__(cls)
        object.__setattr__(obj, "out_edges", out_edges)
        return obj

    @classmethod
    def from_ordered_graph(cls, out_edges: Sequence[Sequence[int]],
                           source_order: Sequence[int] | None = None) -> "Doag":
        """Canonicalize a graph given with arbitrary vertex numbers.

        ``source_order`` fixes the order among sources (default: increasing
        vertex number). Raises :class:`MalformedDoagError` on cycles, repeated
        edges or a bad source order.
        """
        edges = [list(t) for t in out_edges]
        n = len(edges)
        if n == 0:
            raise MalformedDoagError("a DOAG has at least one vertex")
        _check_shape(n, edges)
        indeg = [0] * n
        for targets in edges:
            for t in targets:
                indeg[t] += 1
        natural = [v for v in range(n) if indeg[v] == 0]
        if source_order is None:
            source_order = natural
        elif sorted(source_order) != natural:
            raise MalformedDoagError("source_order must list every source exactly once")
        order = _bfs_order(n, edges, source_order)
        if len(order) != n:
            raise MalformedDoagError("graph has a cycle")
        rank = [0] * n
        for new, old in enumerate(order):
            rank[old] = new
        return cls._trusted(tuple(tuple(rank[t] for t in edges[old]) for old in order))

    @property
    def n(self) -> int:
        return len(self.out_edges)

    @property
    def m(self) -> int:
        return sum(len(t) for t in self.out_edges)

    @property
    def k(self) -> int:
        return self._source_count(self.out_edges)

    def edges(self) -> list[tuple[int, int, int]]:
        """``(source, target, rank)`` triples, rank 1-based, in out-edge order."""
        return [(v, t, r) for v, targets in enumerate(self.out_edges)
                for r, t in enumerate(targets, 1)]


@dataclass(frozen=True)
class TransitionMatrix:
    """Square integer matrix; ``rows[i][j]`` is the rank of edge ``i -> j``
    among the out-edges of ``i`` (0 for no edge)."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise InvalidMatrixError("transition matrix must be square and non-empty")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def _from_trusted(cls, rows) -> "TransitionMatrix":
        obj = object.__new__(cls)
        object.__setattr__(obj, "rows", rows)
        return obj

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def from_suffixes(cls, suffixes: Sequence[Sequence[int]]) -> "TransitionMatrix":
        """Build from the strictly-upper row parts: ``suffixes[i]`` has length
        ``n - 1 - i``; the last row may be omitted."""
        suffixes = [list(s) for s in suffixes]
        n = len(suffixes[0]) + 1 if suffixes else 1
        if len(suffixes) == n - 1:
            suffixes.append([])
        return cls(tuple(tuple([0] * (i + 1) + s) for i, s in enumerate(suffixes)))

    def suffixes(self) -> list[tuple[int, ...]]:
        return [r[i + 1:] for i, r in enumerate(self.rows)]


def encode(d: Doag) -> TransitionMatrix:
    n = d.n
    rows = []
    for v, targets in enumerate(d.out_edges):
        row = [0] * n
        for r, t in enumerate(targets, 1):
            row[t] = r
        rows.append(tuple(row))
    return TransitionMatrix._from_trusted(tuple(rows))


def last_parents(a: TransitionMatrix) -> list[int]:
    """``b[j]``: largest row with a non-zero entry in column ``j``, -1 if none."""
    n = a.n
    b = [-1] * n
    for i, row in enumerate(a.rows):
        for j in range(i + 1, n):
            if row[j]:
                b[j] = i
    return b


def is_valid_transition_matrix(a: TransitionMatrix) -> bool:
    """True iff ``a`` encodes a DOAG in canonical order.

    Conditions: strictly upper triangular, each row part a variation, the
    last-parent sequence ``b`` weakly increasing, and for neighbouring
    columns with the same last parent ``i`` the ranks increase along row ``i``.
    """
    n = a.n
    rows = a.rows
    for i, row in enumerate(rows):
        if any(row[: i + 1]) or not is_variation(row[i + 1:]):
            return False
    b = last_parents(a)
    for j in range(n - 1):
        if b[j] > b[j + 1]:
            return False
        if b[j] == b[j + 1] >= 0 and rows[b[j]][j] > rows[b[j]][j + 1]:
            return False
    return True


def decode(a: TransitionMatrix) -> Doag:
    """Inverse of :func:`encode`; raises :class:`InvalidMatrixError` on
    matrices that encode nothing."""
    if not is_valid_transition_matrix(a):
        raise InvalidMatrixError("matrix is not a valid transition matrix")
    out = []
    for row in a.rows:
        ranked = sorted((r, j) for j, r in enumerate(row) if r)
        out.append([j for _, j in ranked])
    # re-run the canonical labelling rather than trusting the column order
    return Doag.from_ordered_graph(out)


class DecompositionStep(NamedTuple):
    """What is lost when vertex 0 is removed.

    ``s`` children became sources; ``internal`` lists the other children (as
    vertices of the remainder) and ``positions`` their 1-based ranks among the
    removed vertex's out-edges.
    """

    s: int
    internal: tuple[int, ...]
    positions: tuple[int, ...]


def decompose_step(d: Doag) -> tuple[Doag, DecompositionStep]:
    """Remove the smallest source of ``d``."""
    n = d.n
    if n < 2:
        raise MalformedDoagError("decomposition needs at least two vertices")
    indeg = [0] * n
    for targets in d.out_edges:
        for t in targets:
            indeg[t] += 1
    s = 0
    internal, positions = [], []
    for r, t in enumerate(d.out_edges[0], 1):
        if indeg[t] == 1:
            s += 1
        else:
            internal.append(t - 1)
            positions.append(r)
    rest = tuple(tuple(t - 1 for t in targets) for targets in d.out_edges[1:])
    return Doag._trusted(rest), DecompositionStep(s, tuple(internal), tuple(positions))


def recompose(d: Doag, step: DecompositionStep) -> Doag:
    """Inverse of :func:`decompose_step`."""
    s, internal, positions = step
    k = d.k
    width = s + len(internal)
    if not 0 <= s <= k:
        raise InconsistentStepError(f"s={s} but the DOAG has {k} sources")
    if len(internal) != len(positions):
        raise InconsistentStepError("internal and positions differ in length")
    if len(set(internal)) != len(internal) or any(not k <= v < d.n for v in internal):
        raise InconsistentStepError("internal targets must be distinct non-sources")
    if len(set(positions)) != len(positions) or any(not 1 <= r <= width for r in positions):
        raise InconsistentStepError("positions must be distinct ranks in 1..s+|I|")
    slots = [None] * width
    for v, r in zip(internal, positions):
        slots[r - 1] = v
    fresh = iter(range(k - s, k))
    targets = tuple(1 + (next(fresh) if v is None else v) for v in slots)
    rest = tuple(tuple(t + 1 for t in ts) for ts in d.out_edges)
    return Doag._trusted((targets,) + rest)


class DoagStats(NamedTuple):
    vertices: int
    edges: int
    sources: int
    sinks: int
    max_out_degree: int


def doag_stats(d: Doag) -> DoagStats:
    degs = [len(t) for t in d.out_edges]
    return DoagStats(d.n, sum(degs), d.k, degs.count(0), max(degs))


# text formats --------------------------------------------------------------


def format_matrix(a: TransitionMatrix) -> str:
    return "\n".join([str(a.n)] + [" ".join(map(str, r)) for r in a.rows])


def format_edgelist(d: Doag) -> str:
    lines = [str(d.n)]
    lines += [f"{v + 1} {t + 1} {r}" for v, t, r in d.edges()]
    return "\n".join(lines)


def format_dot(d: Doag) -> str:
    lines = ["digraph {", f"  // sources: 1..{d.k}"]
    lines += [f"  {v + 1};" for v in range(d.n)]
    lines += [f'  {v + 1} -> {t + 1} [label="{r}"];' for v, t, r in d.edges()]
    lines.append("}")
    return "\n".join(lines)


def format_doag(d: Doag, fmt: str) -> str:
    if fmt == "matrix":
        return format_matrix(encode(d))
    if fmt == "edgelist":
        return format_edgelist(d)
    if fmt == "dot":
        return format_dot(d)
    raise ValueError(f"unknown format {fmt!r}")


def parse_matrix(text: str) -> TransitionMatrix:
    lines = [ln.split() for ln in text.strip().splitlines()]
    try:
        n = int(lines[0][0])
        rows = [[int(x) for x in ln] for ln in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise InvalidMatrixError(f"bad matrix text: {exc}") from None
    if len(rows) != n:
        raise InvalidMatrixError(f"expected {n} rows, got {len(rows)}")
    return TransitionMatrix(tuple(tuple(r) for r in rows))


def parse_edgelist(text: str) -> Doag:
    lines = [ln.split() for ln in text.strip().splitlines()]
    try:
        n = int(lines[0][0])
        triples = [(int(a) - 1, int(b) - 1, int(r)) for a, b, r in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise MalformedDoagError(f"bad edge list: {exc}") from None
    out: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for v, t, r in triples:
        if not 0 <= v < n:
            raise MalformedDoagError(f"bad vertex {v + 1}")
        out[v].append((r, t))
    edges = []
    for v, pairs in enumerate(out):
        pairs.sort()
        if [r for r, _ in pairs] != list(range(1, len(pairs) + 1)):
            raise MalformedDoagError(f"ranks of vertex {v + 1} are not 1..d")
        edges.append(tuple(t for _, t in pairs))
    return Doag(tuple(edges))
