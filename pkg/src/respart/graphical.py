"""Graphicality of partitions and exact graphical fractions."""

from __future__ import annotations

import math
from itertools import combinations
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from respart.errors import DomainError
from respart.partitions import Partition, enumerate_partitions
from respart.restriction import RestrictionMu, builtin

__all__ = [
    "FractionReport",
    "fraction_scaling_table",
    "graphical_fraction",
    "is_graphical_erdos_gallai",
    "is_graphical_nash_williams",
    "is_realizable_bruteforce",
]

BRUTEFORCE_MAX_VERTICES = 8


def is_graphical_nash_williams(p: Partition) -> bool:
    """Even sum and, for every k up to the Durfee size, ``R_1 + ... + R_k <= -k``."""
    d = p.parts
    if sum(d) % 2:
        return False
    total = 0
    j = len(d)  # number of parts >= k
    for k in range(1, len(d) + 1):
        y = d[k - 1]
        if y < k:
            break
        while j > 0 and d[j - 1] < k:
            j -= 1
        total += y - j
        if total > -k:
            return False
    return True


def is_graphical_erdos_gallai(p: Partition) -> bool:
    d = p.parts
    if sum(d) % 2:
        return False
    head = 0
    for k in range(1, len(d) + 1):
        head += d[k - 1]
        tail = sum(min(di, k) for di in d[k:])
        if head > k * (k - 1) + tail:
            return False
    return True


def is_realizable_bruteforce(p: Partition) -> bool:
    """Search for a simple graph with degree sequence ``p``.

    Vertices are processed in order; each chooses its remaining neighbours
    among later vertices, so every edge subset is reachable exactly once.
    """
    d = list(p.parts)
    v = len(d)
    if v > BRUTEFORCE_MAX_VERTICES:
        raise DomainError(f"brute force limited to {BRUTEFORCE_MAX_VERTICES} vertices, got {v}")
    if any(x > v - 1 for x in d):
        return False

    def place(i: int, need: list[int]) -> bool:
        if i == v:
            return True
        if need[i] == 0:
            return place(i + 1, need)
        later = [j for j in range(i + 1, v) if need[j] > 0]
        if len(later) < need[i]:
            return False
        for combo in combinations(later, need[i]):
            nxt = need[:]
            nxt[i] = 0
            for j in combo:
                nxt[j] -= 1
            if place(i + 1, nxt):
                return True
        return False

    return place(0, d)


@dataclass(frozen=True)
class FractionReport:
    n: int
    total: int
    graphical: int
    fraction: Fraction

    @property
    def fraction_float(self) -> float:
        return float(self.fraction)

    @property
    def scaled(self) -> float:
        """fraction * sqrt(n)."""
        return float(self.fraction) * math.sqrt(self.n)

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "total": self.total,
            "graphical": self.graphical,
            "fraction": self.fraction_float,
            "fraction_exact": str(self.fraction),
            "scaled": self.scaled,
        }


def graphical_fraction(n: int, r: RestrictionMu) -> FractionReport:
    if n < 0 or n % 2:
        raise DomainError(f"graphical fractions need even n >= 0, got {n}")
    total = graphical = 0
    for p in enumerate_partitions(n, r):
        total += 1
        if is_graphical_nash_williams(p):
            graphical += 1
    frac = Fraction(graphical, total) if total else Fraction(0)
    return FractionReport(n, total, graphical, frac)


def fraction_scaling_table(
    n_values: Sequence[int], r: RestrictionMu, workers: int = 1
) -> list[FractionReport]:
    ns = list(n_values)
    if ns != sorted(ns):
        raise DomainError("n values must be ascending")
    for n in ns:
        if n < 0 or n % 2:
            raise DomainError(f"graphical fractions need even n >= 0, got {n}")
    if workers > 1 and len(ns) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            # restrictions hold closures, so workers rebuild them from the catalog
            return list(pool.map(_fraction_by_name, ns, [r.spec_string()] * len(ns)))
    return [graphical_fraction(n, r) for n in ns]


def _fraction_by_name(n: int, spec: str) -> FractionReport:
    return graphical_fraction(n, builtin(spec))
