"""Exact counting tables for DOAGs.

Three tables live here:

* :class:`DoagCountTable` holds ``D[n, m, k]``, the number of DOAGs with ``n``
  vertices, ``m`` edges and ``k`` sources whose out-degrees all belong to a
  :class:`~randdag.policy.DegreePolicy`. It is filled layer by layer in ``n``
  by removing the smallest source: a source of out-degree ``p`` that points to
  ``i`` internal vertices and ``p - i`` former sources contributes
  ``D[n-1, m-p, k-1+p-i] * C(n-k-p+i, i) * C(p, i) * i!``.
* :class:`GammaTable` memoizes ``gamma(a, b) = sum_i C(b+i, b) C(a, i) i!``.
* :class:`SourceCountTable` holds ``D[n, k]`` summed over every edge count,
  which only needs ``gamma`` and costs ``O(N^3)`` big-integer operations.

Counts are exact. ``gmpy2`` integers are used inside the hot loops when
available; every public accessor returns a plain :class:`int`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Iterator

from .errors import CacheError, CacheMismatchError, OutOfRangeError, ResourceLimitError
from .policy import DegreePolicy

try:
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _big = int

CACHE_MAGIC = "randdag-table"
CACHE_VERSION = "v1"

_ZERO = _big(0)
_ONE = _big(1)


def _binom2(x: int) -> int:
    return x * (x - 1) // 2


def support_bounds(n: int, k: int) -> tuple[int, int] | None:
    """Range of edge counts for which unconstrained DOAGs with ``n`` vertices
    and ``k`` sources exist, or ``None`` if there are none."""
    if n == 1:
        return (0, 0) if k == 1 else None
    if not 1 <= k <= n:
        return None
    return n - k, _binom2(n) - _binom2(k)


# ---------------------------------------------------------------------------
# DOAG table by (n, m, k)
# ---------------------------------------------------------------------------

# layer: {k: (m_lo, [count at m_lo, count at m_lo + 1, ...])}
Layer = dict


class DoagCountTable:
    """Immutable table of ``D[n, m, k]`` for ``n <= max_n`` and ``m <= max_m``.

    Only non-zero stretches are stored, one dense run of edge counts per
    ``(n, k)``; absent keys mean zero. A table built for a single target edge
    count (``target_edges``) is *partial*: layer ``n`` is only valid on the
    edge window ``[floors[n], ceilings[n]]`` and queries outside it raise
    :class:`OutOfRangeError` instead of silently answering zero.
    """

    def __init__(self, policy: DegreePolicy, max_n: int, max_m: int,
                 layers: list, floors: list | None = None,
                 ceilings: list | None = None) -> None:
        self.policy = policy
        self.max_n = max_n
        self.max_m = max_m
        self._layers = layers
        self.floors = floors
        self.ceilings = ceilings

    def __repr__(self) -> str:
        tag = " partial" if self.partial else ""
        return (f"<DoagCountTable policy={self.policy} max_n={self.max_n} "
                f"max_m={self.max_m}{tag} entries={self.n_entries}>")

    @property
    def partial(self) -> bool:
        return self.floors is not None

    @property
    def n_entries(self) -> int:
        return sum(len(vals) for layer in self._layers[1:]
                   for _, vals in layer.values())

    def _check(self, n: int, m: int) -> None:
        if not 1 <= n <= self.max_n or not 0 <= m <= self.max_m:
            raise OutOfRangeError(
                f"(n={n}, m={m}) outside table bounds n<={self.max_n}, m<={self.max_m}")
        if self.floors is not None and not self.floors[n] <= m <= self.ceilings[n]:
            raise OutOfRangeError(
                f"m={m} outside the window [{self.floors[n]}, {self.ceilings[n]}] "
                f"computed for n={n} in this partial table")

    def get(self, n: int, m: int, k: int):
        """Raw entry without bounds checks (0 when absent)."""
        run = self._layers[n].get(k)
        if run is None:
            return _ZERO
        lo, vals = run
        idx = m - lo
        if 0 <= idx < len(vals):
            return vals[idx]
        return _ZERO

    def count(self, n: int, m: int, k: int) -> int:
        self._check(n, m)
        return int(self.get(n, m, k))

    def sources(self, n: int) -> list[int]:
        """Source counts with at least one non-zero entry in layer ``n``."""
        return sorted(self._layers[n])

    def row(self, n: int, k: int) -> tuple[int, list]:
        """``(m_lo, counts)`` for layer ``n`` and ``k`` sources."""
        return self._layers[n].get(k, (0, []))

    def entries(self) -> Iterator[tuple[int, int, int, int]]:
        """Non-zero ``(n, m, k, count)`` tuples in lexicographic order."""
        for n in range(1, self.max_n + 1):
            layer = self._layers[n]
            keyed = []
            for k, (lo, vals) in layer.items():
                for off, c in enumerate(vals):
                    if c:
                        keyed.append((lo + off, k, c))
            keyed.sort()
            for m, k, c in keyed:
                yield n, m, k, int(c)


def _edge_windows(max_n: int, max_m: int, target_edges: int,
                  policy: DegreePolicy) -> tuple[list, list]:
    """Edge-count window per layer that can still reach ``target_edges`` at
    layer ``max_n``."""
    cap = policy.max_degree
    lo_deg = policy.min_degree
    floors = [0] * (max_n + 1)
    ceilings = [0] * (max_n + 1)
    removable = 0
    for n in range(max_n, 0, -1):
        floors[n] = max(0, target_edges - removable)
        ceilings[n] = min(max_m, target_edges - (max_n - n) * lo_deg)
        step = n - 1 if cap is None else min(n - 1, cap)
        removable += step
    return floors, ceilings


_coef_cache: dict[tuple[int, int], list] = {}


def split_coefficients(j: int, p: int) -> list:
    """``[C(j+i, i) * C(p, i) * i! for i in 0..p]`` via the ratio
    ``(j+i)(p-i+1)/i`` between consecutive terms (each step divides evenly)."""
    key = (j, p)
    coefs = _coef_cache.get(key)
    if coefs is None:
        coefs = [_ONE]
        c = _ONE
        for i in range(1, p + 1):
            c = c * (j + i) * (p - i + 1) // i
            coefs.append(c)
        if len(_coef_cache) < 200_000:
            _coef_cache[key] = coefs
    return coefs


def _doag_row(n: int, k: int, prev: Layer, policy: DegreePolicy,
              lo: int, hi: int) -> list:
    out = [_ZERO] * (hi - lo + 1)
    for p in policy.degrees(n - k):
        if p > hi:
            break
        coefs = split_coefficients(n - k - p, p)
        for i in range(p + 1):
            run = prev.get(k - 1 + p - i)
            if run is None:
                continue
            r_lo, vals = run
            a = max(lo, r_lo + p)
            b = min(hi, r_lo + len(vals) - 1 + p)
            if a > b:
                continue
            c = coefs[i]
            src = vals[a - p - r_lo: b - p - r_lo + 1]
            out[a - lo: b - lo + 1] = [o + c * v for o, v in zip(out[a - lo: b - lo + 1], src)]
    return out


def _trim(lo: int, vals: list) -> tuple[int, list] | None:
    start = 0
    end = len(vals)
    while start < end and not vals[start]:
        start += 1
    while end > start and not vals[end - 1]:
        end -= 1
    if start == end:
        return None
    return lo + start, vals[start:end]


def _layer_rows(args) -> list:
    n, ks, prev, policy, floor, ceil = args
    rows = []
    for k in ks:
        bounds = support_bounds(n, k)
        if bounds is None:
            continue
        lo, hi = max(bounds[0], floor), min(bounds[1], ceil)
        if lo > hi:
            continue
        run = _trim(lo, _doag_row(n, k, prev, policy, lo, hi))
        if run is not None:
            rows.append((k, run))
    return rows


def build_doag_table(max_n: int, max_m: int, policy: DegreePolicy | None = None, *,
                     target_edges: int | None = None, max_entries: int | None = None,
                     workers: int = 1) -> DoagCountTable:
    """Build ``D[n, m, k]`` for every ``n <= max_n`` and ``m <= max_m``.

    With ``target_edges`` only the entries that can contribute to
    ``D[max_n, target_edges, *]`` are computed, which is all a sampler for
    that class needs. ``max_entries`` bounds the number of stored counts
    (:class:`ResourceLimitError` beyond it). ``workers > 1`` spreads each
    layer across processes; the result does not depend on it.
    """
    if max_n < 1 or max_m < 0:
        raise OutOfRangeError("need max_n >= 1 and max_m >= 0")
    policy = policy or DegreePolicy.all()
    floors = ceilings = None
    if target_edges is not None:
        if not 0 <= target_edges <= max_m:
            raise OutOfRangeError("target_edges must lie in [0, max_m]")
        floors, ceilings = _edge_windows(max_n, max_m, target_edges, policy)

    layers: list = [{}]
    stored = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for n in range(1, max_n + 1):
            floor = floors[n] if floors else 0
            ceil = ceilings[n] if ceilings else max_m
            if n == 1:
                layer = {1: (0, [_ONE])} if floor <= 0 <= ceil else {}
            else:
                ks = list(range(1, n + 1))
                if pool is None:
                    rows = _layer_rows((n, ks, layers[n - 1], policy, floor, ceil))
                else:
                    chunks = [ks[w::workers] for w in range(workers)]
                    rows = [r for part in pool.map(
                        _layer_rows,
                        [(n, c, layers[n - 1], policy, floor, ceil) for c in chunks])
                        for r in part]
                layer = dict(sorted(rows))
            stored += sum(len(v) for _, v in layer.values())
            if max_entries is not None and stored > max_entries:
                raise ResourceLimitError(
                    f"table needs more than {max_entries} entries (reached n={n})")
            layers.append(layer)
    finally:
        if pool is not None:
            pool.shutdown()
    return DoagCountTable(policy, max_n, max_m, layers, floors, ceilings)


def doag_count(table: DoagCountTable, n: int, m: int, k: int) -> int:
    """``D[n, m, k]`` under the table's policy; 0 outside the support."""
    return table.count(n, m, k)


def max_edges(n: int, policy: DegreePolicy) -> int:
    """Largest edge count any ``n``-vertex DOAG allowed by ``policy`` can have."""
    cap = policy.max_degree
    if cap is None:
        return _binom2(n)
    # the vertex at canonical index v only points to the n-1-v vertices after it
    return sum(min(cap, n - 1 - v) for v in range(n))


def doag_count_by_vertices(table: DoagCountTable, n: int, k: int | None = None) -> int:
    """``D[n]`` summed over all edge counts (and over ``k`` unless given)."""
    if table.partial:
        raise OutOfRangeError("vertex totals need a full table, not a targeted one")
    if not 1 <= n <= table.max_n:
        raise OutOfRangeError(f"n={n} outside table bound {table.max_n}")
    if table.max_m < max_edges(n, table.policy):
        raise OutOfRangeError(
            f"table max_m={table.max_m} is below the {max_edges(n, table.policy)} "
            f"edges an {n}-vertex DOAG may have")
    total = _ZERO
    for kk, (_, vals) in table._layers[n].items():
        if k is None or kk == k:
            total += sum(vals, _ZERO)
    return int(total)


def doag_counts_by_edges(table: DoagCountTable, n: int, k: int | None = None) -> list[int]:
    """``[D[n, m] for m in 0..]`` (restricted to ``k`` sources if given),
    trailing zeros removed."""
    if not 1 <= n <= table.max_n:
        raise OutOfRangeError(f"n={n} outside table bound {table.max_n}")
    out = [0] * (table.max_m + 1)
    for kk, (lo, vals) in table._layers[n].items():
        if k is None or kk == k:
            for off, c in enumerate(vals):
                out[lo + off] += int(c)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def check_recurrence(table: DoagCountTable) -> list[tuple[int, int, int]]:
    """Recompute every layer from the stored previous layer and return the
    ``(n, m, k)`` keys whose stored value disagrees (empty when consistent)."""
    bad = []
    for n in range(1, table.max_n + 1):
        floor = table.floors[n] if table.floors else 0
        ceil = table.ceilings[n] if table.ceilings else table.max_m
        if n == 1:
            expected = {1: (0, [_ONE])} if floor <= 0 <= ceil else {}
        else:
            expected = dict(_layer_rows(
                (n, list(range(1, n + 1)), table._layers[n - 1], table.policy, floor, ceil)))
        stored = table._layers[n]
        for k in set(expected) | set(stored):
            e_lo, e_vals = expected.get(k, (0, []))
            s_lo, s_vals = stored.get(k, (0, []))
            ms = set(range(e_lo, e_lo + len(e_vals))) | set(range(s_lo, s_lo + len(s_vals)))
            for m in sorted(ms):
                ev = e_vals[m - e_lo] if 0 <= m - e_lo < len(e_vals) else 0
                sv = s_vals[m - s_lo] if 0 <= m - s_lo < len(s_vals) else 0
                if ev != sv:
                    bad.append((n, m, k))
    return sorted(bad)


# ---------------------------------------------------------------------------
# gamma and the edge-agnostic table D[n, k]
# ---------------------------------------------------------------------------


class GammaTable:
    """Memoized ``gamma(a, b)``, grown on demand.

    ``gamma(a, b) = gamma(a, b-1) + a * gamma(a-1, b) + [b == 0]`` with
    ``gamma(0, b) = 1`` and zero for negative arguments.
    """

    def __init__(self) -> None:
        self._rows: list[list] = []

    def _grow(self, a: int, b: int) -> None:
        rows = self._rows
        while len(rows) <= a:
            rows.append([])
        for x in range(a + 1):
            row = rows[x]
            while len(row) <= b:
                y = len(row)
                if x == 0:
                    row.append(_ONE)
                    continue
                below = rows[x - 1]
                if len(below) <= y:
                    self._grow(x - 1, y)
                val = x * below[y]
                if y == 0:
                    val += 1
                else:
                    val += row[y - 1]
                row.append(val)

    def raw(self, a: int, b: int):
        if a < 0 or b < 0:
            return _ZERO
        rows = self._rows
        if a >= len(rows) or b >= len(rows[a]):
            self._grow(a, b)
        return rows[a][b]

    def entries(self) -> Iterator[tuple[int, int, int]]:
        for a, row in enumerate(self._rows):
            for b, v in enumerate(row):
                yield a, b, int(v)


def gamma(table: GammaTable, a: int, b: int) -> int:
    return int(table.raw(a, b))


class SourceCountTable:
    """``D[n, k]``: DOAGs with ``n`` vertices and ``k`` sources, any edge count.

    ``D[n, k] = sum_s D[n-1, k-1+s] * gamma(n-k-s, s)`` with ``D[1, 1] = 1``.
    Layers are computed lazily up to ``max_n``.
    """

    def __init__(self, max_n: int, gammas: GammaTable | None = None) -> None:
        if max_n < 1:
            raise OutOfRangeError("max_n must be at least 1")
        self.max_n = max_n
        self.gammas = gammas or GammaTable()
        self._layers: list[list] = [[], [_ZERO, _ONE]]

    def _extend(self, n: int) -> None:
        g = self.gammas
        layers = self._layers
        if n > self.max_n:
            raise OutOfRangeError(f"n={n} exceeds table bound {self.max_n}")
        if len(layers) <= n:
            g.raw(n, n)
        while len(layers) <= n:
            nn = len(layers)
            prev = layers[nn - 1]
            grow = g._rows
            row = [_ZERO] * (nn + 1)
            for k in range(1, nn + 1):
                acc = _ZERO
                for s in range(max(0, 2 - k), nn - k + 1):
                    acc += prev[k - 1 + s] * grow[nn - k - s][s]
                row[k] = acc
            layers.append(row)

    def count(self, n: int, k: int) -> int:
        if not 1 <= n <= self.max_n:
            raise OutOfRangeError(f"n={n} outside [1, {self.max_n}]")
        if not 1 <= k <= n:
            return 0
        self._extend(n)
        return int(self._layers[n][k])

    def total(self, n: int) -> int:
        """``D[n]``, all source counts."""
        if not 1 <= n <= self.max_n:
            raise OutOfRangeError(f"n={n} outside [1, {self.max_n}]")
        self._extend(n)
        return int(sum(self._layers[n], _ZERO))

    def single_source(self, n: int) -> int:
        return self.count(n, 1)

    def entries(self) -> Iterator[tuple[int, int, int]]:
        for n in range(1, len(self._layers)):
            for k in range(1, n + 1):
                v = self._layers[n][k]
                if v:
                    yield n, k, int(v)


def build_source_table(max_n: int) -> SourceCountTable:
    table = SourceCountTable(max_n)
    table._extend(max_n)
    return table


def superfactorial(k: int) -> int:
    """``prod_{i=0..k} i!``."""
    out = 1
    f = 1
    for i in range(1, k + 1):
        f *= i
        out *= f
    return out


def _ratio_to_float(num: int, den: int) -> float:
    try:
        return num / den
    except OverflowError:
        return math.exp(math.log(num) - math.log(den))


def _normalize(count: int, sf: int, j: int) -> float:
    # count * sqrt(j) / (sf * e^(j-1)), computed from the exact integer ratio
    if j - 1 <= 700:
        return _ratio_to_float(count, sf) * math.sqrt(j) / math.exp(j - 1)
    return math.exp(math.log(count) - math.log(sf) - (j - 1) + 0.5 * math.log(j))


def normalized_constant_sequence(table: SourceCountTable, n: int) -> tuple[list[float], list[float]]:
    """``D[j] sqrt(j) / (sf(j-1) e^(j-1))`` for ``j = 1..n``, and the same
    for single-source DOAGs. Both sequences tend to the same constant."""
    if not 1 <= n <= table.max_n:
        raise OutOfRangeError(f"n={n} outside [1, {table.max_n}]")
    table._extend(n)
    every, single = [], []
    sf = 1
    fact = 1
    for j in range(1, n + 1):
        if j >= 2:
            fact *= j - 1
            sf *= fact
        every.append(_normalize(table.total(j), sf, j))
        single.append(_normalize(table.single_source(j), sf, j))
    return every, single


# ---------------------------------------------------------------------------
# cache files
# ---------------------------------------------------------------------------


def _header(kind: str, policy: str, max_n: int, max_m: int) -> str:
    return f"{CACHE_MAGIC} {CACHE_VERSION} kind={kind} policy={policy} maxN={max_n} maxM={max_m}"


def save_table(table, path: str | os.PathLike) -> None:
    """Write a table in the line-oriented cache format."""
    if isinstance(table, DoagCountTable):
        if table.partial:
            raise CacheError("targeted (partial) tables are not cacheable")
        head = _header("doag", str(table.policy), table.max_n, table.max_m)
        body = (f"{n} {m} {k} {c}" for n, m, k, c in table.entries())
    elif isinstance(table, GammaTable):
        rows = table._rows
        bound = max((len(r) for r in rows), default=0) - 1
        head = _header("gamma", "all", max(len(rows) - 1, 0), max(bound, 0))
        body = (f"{a} {b} {c}" for a, b, c in table.entries())
    elif isinstance(table, SourceCountTable):
        table._extend(table.max_n)
        head = _header("source", "all", table.max_n, 0)
        body = (f"{n} {k} {c}" for n, k, c in table.entries())
    else:
        raise TypeError(f"cannot cache {type(table).__name__}")
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(head + "\n")
        for line in body:
            fh.write(line + "\n")
    os.replace(tmp, path)


def _parse_header(line: str) -> dict:
    parts = line.split()
    if len(parts) != 6 or parts[0] != CACHE_MAGIC:
        raise CacheError(f"not a table cache header: {line!r}")
    if parts[1] != CACHE_VERSION:
        raise CacheError(f"unsupported cache version {parts[1]!r}")
    fields = {}
    for part in parts[2:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise CacheError(f"bad header field {part!r}")
        fields[key] = value
    try:
        fields["maxN"] = int(fields["maxN"])
        fields["maxM"] = int(fields["maxM"])
        fields["kind"], fields["policy"]
    except (KeyError, ValueError) as exc:
        raise CacheError(f"bad cache header: {exc}") from None
    return fields


def load_table(path: str | os.PathLike, *, kind: str | None = None,
               policy: DegreePolicy | None = None, max_n: int | None = None,
               max_m: int | None = None):
    """Read a cache file. Any of ``kind``/``policy``/``max_n``/``max_m`` that
    is given must match the header, otherwise :class:`CacheError`."""
    with open(path, encoding="ascii") as fh:
        head = _parse_header(fh.readline())
        expect = {"kind": kind, "policy": None if policy is None else str(policy),
                  "maxN": max_n, "maxM": max_m}
        for key, want in expect.items():
            if want is not None and head[key] != want:
                raise CacheMismatchError(f"cache {key}={head[key]} does not match requested {want}")
        lines = fh.read().splitlines()
    try:
        records = [tuple(int(x) for x in line.split()) for line in lines if line.strip()]
    except ValueError as exc:
        raise CacheError(f"bad cache line: {exc}") from None
    width = {"doag": 4, "gamma": 3, "source": 3}.get(head["kind"])
    if width is None:
        raise CacheError(f"unknown table kind {head['kind']!r}")
    if any(len(r) != width or min(r) < 0 for r in records):
        raise CacheError("malformed cache record")
    if records != sorted(records) or len(set(r[:-1] for r in records)) != len(records):
        raise CacheError("cache records are not sorted and unique")

    if head["kind"] == "doag":
        try:
            pol = DegreePolicy.parse(head["policy"])
        except ValueError as exc:
            raise CacheError(str(exc)) from None
        n_max, m_max = head["maxN"], head["maxM"]
        grouped: list[dict] = [{} for _ in range(n_max + 1)]
        for n, m, k, c in records:
            if not (1 <= n <= n_max and 0 <= m <= m_max and 1 <= k <= n) or c == 0:
                raise CacheError(f"cache entry ({n}, {m}, {k}) out of range")
            grouped[n].setdefault(k, {})[m] = _big(c)
        layers: list = [{}]
        for n in range(1, n_max + 1):
            layer = {}
            for k, ms in sorted(grouped[n].items()):
                lo, hi = min(ms), max(ms)
                layer[k] = (lo, [ms.get(m, _ZERO) for m in range(lo, hi + 1)])
            layers.append(layer)
        return DoagCountTable(pol, n_max, m_max, layers)
    if head["kind"] == "gamma":
        g = GammaTable()
        for a, b, c in records:
            while len(g._rows) <= a:
                g._rows.append([])
            if b != len(g._rows[a]):
                raise CacheError("gamma cache rows must be contiguous")
            g._rows[a].append(_big(c))
        return g
    table = SourceCountTable(head["maxN"])
    for n, k, c in records:
        if not 1 <= k <= n <= table.max_n:
            raise CacheError(f"cache entry ({n}, {k}) out of range")
        while len(table._layers) <= n:
            table._layers.append([_ZERO] * (len(table._layers) + 1))
        table._layers[n][k] = _big(c)
    return table
