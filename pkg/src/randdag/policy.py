"""Out-degree policies restricting which vertices may appear in a class."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True)
class DegreePolicy:
    """Set of allowed out-degrees.

    ``kind`` is one of ``"all"``, ``"positive"``, ``"max"`` (degrees ``0..bound``)
    or ``"set"`` (the explicit finite ``members``). Use the constructors
    :meth:`all`, :meth:`positive`, :meth:`bounded`, :meth:`explicit` or
    :meth:`parse` rather than building instances directly.
    """

    kind: str
    bound: int | None = None
    members: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("all", "positive", "max", "set"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "max" and (self.bound is None or self.bound < 0):
            raise ValueError("bounded policy needs a non-negative bound")
        if self.kind == "set":
            if any(d < 0 for d in self.members):
                raise ValueError("degrees must be non-negative")
            if tuple(sorted(set(self.members))) != self.members:
                raise ValueError("members must be sorted and distinct")

    @classmethod
    def all(cls) -> "DegreePolicy":
        return cls("all")

    @classmethod
    def positive(cls) -> "DegreePolicy":
        return cls("positive")

    @classmethod
    def bounded(cls, d: int) -> "DegreePolicy":
        return cls("max", bound=d)

    @classmethod
    def explicit(cls, degrees) -> "DegreePolicy":
        return cls("set", members=tuple(sorted(set(degrees))))

    @classmethod
    def parse(cls, text: str) -> "DegreePolicy":
        """Parse ``all | positive | max:<d> | set:<d1,d2,...>``."""
        text = text.strip()
        if text in ("all", "positive"):
            return cls(text)
        head, sep, tail = text.partition(":")
        if sep:
            try:
                if head == "max":
                    return cls.bounded(int(tail))
                if head == "set":
                    return cls.explicit(int(x) for x in tail.split(",") if x.strip())
            except ValueError as exc:
                raise ValueError(f"bad degree policy {text!r}: {exc}") from None
        raise ValueError(f"bad degree policy {text!r}")

    def __str__(self) -> str:
        if self.kind == "max":
            return f"max:{self.bound}"
        if self.kind == "set":
            return "set:" + ",".join(map(str, self.members))
        return self.kind

    def allows(self, d: int) -> bool:
        if d < 0:
            return False
        if self.kind == "all":
            return True
        if self.kind == "positive":
            return d > 0
        if self.kind == "max":
            return d <= self.bound
        return d in self.members

    def degrees(self, upto: int) -> Iterator[int]:
        """Allowed degrees in ``[0, upto]``, increasing."""
        if self.kind == "set":
            for d in self.members:
                if d > upto:
                    return
                yield d
            return
        lo = 1 if self.kind == "positive" else 0
        hi = upto if self.kind != "max" else min(upto, self.bound)
        yield from range(lo, hi + 1)

    @property
    def min_degree(self) -> int:
        if self.kind == "positive":
            return 1
        if self.kind == "set":
            return self.members[0] if self.members else 0
        return 0

    @property
    def max_degree(self) -> int | None:
        """Largest allowed degree, ``None`` when unbounded."""
        if self.kind == "max":
            return self.bound
        if self.kind == "set":
            return self.members[-1] if self.members else 0
        return None
