"""Table-free uniform DOAG samplers by vertex count.

Both draw transition matrices whose rows are independent uniform variations
and keep the first one that encodes a DOAG. The naive sampler fills whole
matrices. The fast sampler generates cells lazily and checks the last-parent
conditions column by column, so a doomed attempt is abandoned after a few
cells:

* row ``i`` holds a permutation of ``1..L`` (``L = n-1-i``) that is shuffled
  lazily, one Fisher-Yates step per cell, left to right;
* its zero count ``p_i`` is drawn on first touch, and values above
  ``L - p_i`` read as zero, which turns the permutation into a uniform
  variation without rewriting it;
* column ``c`` is read from the diagonal upwards and the scan stops at the
  first non-zero cell or on reaching the last parent of column ``c-1``.

Cells of a row are therefore always touched as a prefix, and rows never need
re-initialising between attempts: shuffling any permutation yields a uniform
one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Doag, TransitionMatrix, decode, is_valid_transition_matrix
from .rng import RngStream
from .variations import bounded_poisson, sample_variation


@dataclass
class RejectionCounters:
    attempts: int = 0
    rejections: int = 0
    cells_rejected: int = 0
    swaps: int = 0


def sample_doag_naive(rng: RngStream, n: int, counters: RejectionCounters | None = None) -> TransitionMatrix:
    if n < 1:
        raise ValueError("n must be at least 1")
    while True:
        rows = [sample_variation(rng, n - 1 - i) for i in range(n)]
        a = TransitionMatrix.from_suffixes(rows)
        if counters is not None:
            counters.attempts += 1
        if is_valid_transition_matrix(a):
            return a
        if counters is not None:
            counters.rejections += 1


class _Poisoned(AssertionError):
    pass


def sample_doag_fast(rng: RngStream, n: int, counters: RejectionCounters | None = None,
                     debug: bool = False) -> TransitionMatrix:
    """Same law as :func:`sample_doag_naive`, with anticipated rejection.

    With ``debug`` every cell read is checked to have been drawn during the
    current attempt.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        if counters is not None:
            counters.attempts += 1
        return TransitionMatrix(((0,),))
    lengths = [n - 1 - i for i in range(n)]
    cells = [list(range(1, ln + 1)) for ln in lengths]
    drawn = [0] * n          # per row: number of cells drawn this attempt
    thresh = [0] * n         # per row: values above this read as zero
    randint = rng.randint
    swaps = 0
    seen = [bytearray(ln) for ln in lengths] if debug else None

    def draw(i: int, q: int) -> int:
        # lazily draw cell q of row i (q == drawn[i])
        nonlocal swaps
        row = cells[i]
        last = lengths[i] - 1
        if q < last:
            r = randint(q, last)
            row[q], row[r] = row[r], row[q]
            swaps += 1
        drawn[i] = q + 1
        if seen is not None:
            seen[i][q] = 1
        return row[q]

    def read(i: int, q: int) -> int:
        if seen is not None and not seen[i][q]:
            raise _Poisoned(f"cell ({i}, {q}) read before being drawn")
        return cells[i][q]

    attempts = rejections = cells_rejected = 0
    while True:
        attempts += 1
        touched = 0
        prev_parent = -1     # last parent of column c-1, -1 if empty
        ok = True
        for c in range(1, n):
            i = c - 1
            # fresh row: its first cell sits on column i+1 == c
            thresh[i] = lengths[i] - bounded_poisson(rng, 1.0, lengths[i])
            parent = -1
            while i >= 0:
                q = c - i - 1
                val = draw(i, q)
                touched += 1
                nonzero = val <= thresh[i]
                if i == prev_parent:
                    left = read(i, q - 1)
                    if not nonzero or val < left:
                        ok = False
                    else:
                        parent = i
                    break
                if nonzero:
                    parent = i
                    break
                i -= 1
            if not ok:
                break
            prev_parent = parent
        if ok:
            break
        rejections += 1
        cells_rejected += touched
        if seen is not None:
            for row in seen:
                row[:] = bytes(len(row))

    rows = []
    for i in range(n):
        ln = lengths[i]
        for q in range(drawn[i], ln):
            draw(i, q)
        t = thresh[i]
        rows.append(tuple([0] * (i + 1) + [v if v <= t else 0 for v in cells[i]]))
    if counters is not None:
        counters.attempts += attempts
        counters.rejections += rejections
        counters.cells_rejected += cells_rejected
        counters.swaps += swaps
    return TransitionMatrix._from_trusted(tuple(rows))


def sample_doag_by_vertices(rng: RngStream, n: int, method: str = "auto") -> Doag:
    """Uniform DOAG with ``n`` vertices (``auto`` uses the fast sampler above 8)."""
    if method == "auto":
        method = "fast" if n > 8 else "naive"
    if method == "fast":
        return decode(sample_doag_fast(rng, n))
    if method == "naive":
        return decode(sample_doag_naive(rng, n))
    raise ValueError(f"unknown method {method!r}")
