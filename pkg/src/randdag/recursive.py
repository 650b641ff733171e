"""Exact uniform DOAG sampler for a prescribed (n, m, k) via counting tables.

Stage ``n`` draws the out-degree ``p`` of the smallest source and the number
``i`` of its edges into internal vertices, with probability proportional to
the corresponding term of the counting recurrence, then moves to the class
``(n-1, m-p, k-1+p-i)``. Once every split is known the DOAG is built bottom
up in a single array of ``n`` vertex slots filled right to left: after the
stage for ``n'`` vertices the last ``n'`` slots hold that sub-DOAG, sources
first (in source order), internal vertices after them in arbitrary order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .counting import DoagCountTable, max_edges, support_bounds
from .errors import EmptyClassError, OutOfRangeError, TableCorruptionError
from .graph import Doag, TransitionMatrix, encode
from .rng import RngStream, choose_weighted


@dataclass
class SamplerCounters:
    multiplications: int = 0
    stages: int = 0


def _empty_class_message(table: DoagCountTable, n: int, m: int, k: int) -> str:
    bounds = support_bounds(n, k)
    if bounds is None:
        where = "k must satisfy 1 <= k <= n (k=1 only when n=1)"
    else:
        where = f"with n={n}, k={k} the edge count must lie in [{bounds[0]}, {bounds[1]}]"
    msg = f"no DOAG with n={n}, m={m}, k={k} under policy {table.policy}: {where}"
    if table.policy.max_degree is not None:
        msg += f"; the policy allows at most {max_edges(n, table.policy)} edges"
    return msg


def pick_degree_split(rng: RngStream, table: DoagCountTable, n: int, m: int, k: int,
                      counters: SamplerCounters | None = None) -> tuple[int, int]:
    """Draw ``(p, i)`` with probability ``W(p, i) / D[n, m, k]``.

    One uniform ``r < D[n, m, k]`` is compared against the running sum of
    weights in lexicographic ``(p, i)`` order, so only the weights up to the
    returned split are ever formed.
    """
    total = table.count(n, m, k)
    if n < 2 or not total:
        raise EmptyClassError(_empty_class_message(table, n, m, k))
    r = rng.randbelow(total)
    mults = 0
    for p in table.policy.degrees(n - k):
        if p > m:
            break
        j = n - k - p
        coef = 1
        for i in range(p + 1):
            if i:
                coef = coef * (j + i) * (p - i + 1) // i
                mults += 1
            kk = k - 1 + p - i
            if kk >= 1:
                prev = table.get(n - 1, m - p, kk)
                if prev:
                    w = prev * coef
                    mults += 1
                    if r < w:
                        if counters is not None:
                            counters.multiplications += mults
                        return p, i
                    r -= w
    raise TableCorruptionError(
        f"split weights of ({n}, {m}, {k}) sum below the stored count {total}")


def _new_source(rng: RngStream, arr: list, i: int, s: int,
                t_lo: int, t_hi: int, s_lo: int, s_hi: int) -> list:
    # partial Fisher-Yates: arr[t_lo:t_lo+i] becomes a uniform ordered i-subset of T
    for t in range(t_lo, t_lo + i):
        j = rng.randint(t, t_hi - 1)
        arr[t], arr[j] = arr[j], arr[t]
    # fill right to left, interleaving the i picks with the last s sources of S
    out = [0] * (i + s)
    left_i, left_s = i, s
    first_src = s_hi - s
    for slot in range(i + s - 1, -1, -1):
        if left_s == 0 or (left_i and rng.bernoulli(left_i, left_i + left_s)):
            left_i -= 1
            out[slot] = arr[t_lo + left_i]
        else:
            left_s -= 1
            out[slot] = arr[first_src + left_s]
    return out


def sample_new_source(rng: RngStream, i: int, s: int, targets: list, sources: list) -> list:
    """Ordered out-edge list of a new source pointing to ``i`` uniformly chosen
    vertices of ``targets`` and to the last ``s`` entries of ``sources``.

    The sources keep their relative order; the ``i`` internal targets form a
    uniform ordered subset and are interleaved uniformly. ``targets`` is
    permuted in place.
    """
    if not 0 <= i <= len(targets) or not 0 <= s <= len(sources):
        raise OutOfRangeError(f"need i <= {len(targets)} and s <= {len(sources)}")
    arr = list(sources) + list(targets)
    out = _new_source(rng, arr, i, s, len(sources), len(arr), 0, len(sources))
    targets[:] = arr[len(sources):]
    return out


def draw_class(rng: RngStream, table: DoagCountTable, n: int,
               m: int | None = None, k: int | None = None) -> tuple[int, int]:
    """``(m, k)`` drawn proportionally to ``D[n, m, k]`` among the classes
    compatible with the fixed parameters."""
    if not 1 <= n <= table.max_n:
        raise OutOfRangeError(f"n={n} outside table bound {table.max_n}")
    options = []
    for kk in table.sources(n):
        if k is not None and kk != k:
            continue
        lo, vals = table.row(n, kk)
        for off, c in enumerate(vals):
            if c and (m is None or lo + off == m):
                options.append(((lo + off, kk), c))
    if not options:
        if k is not None:
            raise EmptyClassError(_empty_class_message(table, n, -1 if m is None else m, k))
        raise EmptyClassError(
            f"no DOAG with n={n}, m={m} under policy {table.policy}: with k sources "
            f"the edge count must lie in [n-k, C(n,2)-C(k,2)], overall [0, {n * (n - 1) // 2}]")
    options.sort()
    return choose_weighted(rng, options)


def sample_doag(rng: RngStream, table: DoagCountTable, n: int, m: int | None = None,
                k: int | None = None, counters: SamplerCounters | None = None) -> Doag:
    """Uniform DOAG with ``n`` vertices, ``m`` edges and ``k`` sources whose
    out-degrees obey the table's policy. Unset ``m``/``k`` are drawn first
    with probability proportional to the class sizes."""
    if m is None or k is None:
        m, k = draw_class(rng, table, n, m, k)
    if not table.count(n, m, k):
        raise EmptyClassError(_empty_class_message(table, n, m, k))

    plan = []
    nn, mm, kk = n, m, k
    while nn > 1:
        p, i = pick_degree_split(rng, table, nn, mm, kk, counters)
        plan.append((p, i))
        nn, mm, kk = nn - 1, mm - p, kk - 1 + p - i
        if counters is not None:
            counters.stages += 1

    arr = [0] * n
    succ: list = [None] * n
    pos = n - 1
    arr[pos] = pos
    succ[pos] = []
    n_src = 1
    for p, i in reversed(plan):
        s = p - i
        out = _new_source(rng, arr, i, s, pos + n_src, n, pos, pos + n_src)
        pos -= 1
        arr[pos] = pos
        succ[pos] = out
        n_src += 1 - s
    return Doag.from_ordered_graph(succ, source_order=arr[:n_src])


def sample_labelled_transition(rng: RngStream, table: DoagCountTable, n: int,
                               m: int | None = None, k: int | None = None) -> TransitionMatrix:
    return encode(sample_doag(rng, table, n, m, k))
