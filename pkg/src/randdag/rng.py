"""Seeded random streams shared by every sampler."""

from __future__ import annotations

import hashlib
import random
import secrets


def derive_seed(seed: int, index: int) -> int:
    """Seed of the ``index``-th child stream of ``seed``.

    Stable across platforms and Python versions (sha256 based).
    """
    digest = hashlib.sha256(f"randdag:{seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class RngStream:
    """Deterministic source of uniform integers, reals and big integers.

    All draws go through :class:`random.Random` (Mersenne Twister), whose
    integer draws are unbiased (rejection on ``getrandbits``) and whose reals
    carry 53 random bits. ``int_draws`` and ``real_draws`` count calls, which
    the tests use as a random-bit budget proxy.
    """

    __slots__ = ("seed", "_random", "int_draws", "real_draws")

    def __init__(self, seed: int | None = None) -> None:
        if seed is None:
            seed = secrets.randbits(64)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
        self.seed = seed
        self._random = random.Random(seed)
        self.int_draws = 0
        self.real_draws = 0

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range ``[lo, hi]``."""
        self.int_draws += 1
        return self._random.randrange(lo, hi + 1)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``; ``bound`` may be arbitrarily large."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        self.int_draws += 1
        return self._random.randrange(bound)

    def random(self) -> float:
        """Uniform real in ``[0, 1)``."""
        self.real_draws += 1
        return self._random.random()

    def bernoulli(self, num: int, den: int) -> bool:
        """True with probability exactly ``num / den``."""
        return self.randbelow(den) < num

    def spawn(self, index: int) -> "RngStream":
        return RngStream(derive_seed(self.seed, index))


def choose_weighted(rng: RngStream, weighted):
    """Key drawn with probability proportional to its (big integer) weight.

    ``weighted`` is a sequence of ``(key, weight)`` pairs, scanned in order
    against one uniform draw below the total.
    """
    total = sum(w for _, w in weighted)
    if total <= 0:
        raise ValueError("weights must have a positive sum")
    r = rng.randbelow(int(total))
    for key, w in weighted:
        if r < w:
            return key
        r -= w
    raise AssertionError("unreachable: r below total")


def sample_subset(rng: RngStream, items, size: int) -> list:
    """Uniform ordered ``size``-subset of ``items`` (partial Fisher-Yates on a copy)."""
    pool = list(items)
    if not 0 <= size <= len(pool):
        raise ValueError("subset size out of range")
    for t in range(size):
        j = rng.randint(t, len(pool) - 1)
        pool[t], pool[j] = pool[j], pool[t]
    return pool[:size]
