"""Variations: integer sequences whose positive entries are a permutation of 1..d.

A variation of size ``n`` with ``p`` zeros is a permutation of the multiset
``{0^p, 1, ..., n-p}``, so there are ``n!/p!`` of them and ``v_n = sum_p n!/p!``
overall. Sampling therefore reduces to drawing ``p`` with probability
proportional to ``1/p!`` (a Poisson(1) variable conditioned on ``p <= n``)
and shuffling.
"""

from __future__ import annotations

import math
from typing import Sequence

from .rng import RngStream


def is_variation(values: Sequence[int]) -> bool:
    """True iff the positive entries of ``values`` are exactly ``{1..d}``."""
    n = len(values)
    seen = bytearray(n + 1)
    positives = 0
    for x in values:
        if not isinstance(x, int) or x < 0 or x > n:
            return False
        if x:
            if seen[x]:
                return False
            seen[x] = 1
            positives += 1
    # distinct values in 1..n, `positives` of them: contiguous iff none exceeds the count
    return all(seen[1:positives + 1])


def variation_count_by_zeros(n: int, p: int) -> int:
    """Number of size-``n`` variations with exactly ``p`` zeros, ``n!/p!``."""
    if n < 0 or p < 0 or p > n:
        return 0
    out = 1
    for x in range(p + 1, n + 1):
        out *= x
    return out


def variation_count(n: int) -> int:
    """Number of size-``n`` variations."""
    if n < 0:
        return 0
    total = 0
    term = 1  # n!/p! going from p = n down to 0
    for p in range(n, -1, -1):
        total += term
        term *= p
    return total


def bounded_poisson(rng: RngStream, lam: float, n: int) -> int:
    """Poisson(``lam``) conditioned on being at most ``n``.

    Product-of-uniforms method, restarted as soon as the running count passes
    ``n``. Comparisons use doubles; the induced bias is of order 2**-53.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 0
    limit = math.exp(-lam)
    while True:
        k = 0
        prod = rng.random()
        while prod > limit:
            k += 1
            if k > n:
                break
            prod *= rng.random()
        if k <= n:
            return k


def sample_variation(rng: RngStream, n: int) -> list[int]:
    """Uniform random variation of size ``n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return []
    p = bounded_poisson(rng, 1.0, n)
    out = [0] * p + list(range(1, n - p + 1))
    for i in range(n - 1):
        j = rng.randint(i, n - 1)
        out[i], out[j] = out[j], out[i]
    return out
