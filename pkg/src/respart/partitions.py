"""Exact enumeration, counting and rank statistics of restricted partitions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from respart.restriction import RestrictionMu

__all__ = [
    "CountTable",
    "Partition",
    "PartitionStats",
    "count",
    "count_table",
    "count_with_max_parts",
    "enumerate_partitions",
    "stats",
]


@dataclass(frozen=True, slots=True)
class Partition:
    """Parts in weakly decreasing order.  The constructor trusts its input;
    use :meth:`of` for arbitrary iterables."""

    parts: tuple[int, ...]

    @classmethod
    def of(cls, parts: Iterable[int]) -> "Partition":
        ps = tuple(sorted((int(p) for p in parts), reverse=True))
        if ps and ps[-1] < 1:
            raise ValueError("parts must be positive integers")
        return cls(ps)

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))


@dataclass(frozen=True)
class PartitionStats:
    """Rank statistics, keyed from 1.

    x[k]: number of parts >= k (1 <= k <= Y_1); y[k]: k-th largest part
    (1 <= k <= X_1); r[k] = y[k] - x[k] for k up to the Durfee size.
    """

    x: dict[int, int]
    y: dict[int, int]
    r: dict[int, int]
    durfee: int


def stats(p: Partition) -> PartitionStats:
    d = p.parts
    if not d:
        return PartitionStats({}, {}, {}, 0)
    y = {k: d[k - 1] for k in range(1, len(d) + 1)}
    x = {}
    j = len(d)
    for k in range(1, d[0] + 1):
        while j > 0 and d[j - 1] < k:
            j -= 1
        x[k] = j
    durfee = 0
    while durfee < len(d) and d[durfee] >= durfee + 1:
        durfee += 1
    r = {k: y[k] - x[k] for k in range(1, durfee + 1)}
    return PartitionStats(x, y, r, durfee)


def _feasibility(n: int, parts: list[int]) -> list[list[bool]]:
    """feas[i][s]: s is a sum of parts[0..i] (with repetition)."""
    feas = []
    prev = [True] + [False] * n
    for p in parts:
        row = prev[:]
        for s in range(p, n + 1):
            if row[s - p]:
                row[s] = True
        feas.append(row)
        prev = row
    return feas


def enumerate_partitions(n: int, r: RestrictionMu) -> Iterator[Partition]:
    """Yield every partition of ``n`` into allowed parts, in descending
    lexicographic order of part lists (``[4], [3,1], [2,2], ...``)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        yield Partition(())
        return
    ps = r.parts_up_to(n)
    feas = _feasibility(n, ps)

    def next_choice(rem: int, top: int) -> int:
        for i in range(top, -1, -1):
            p = ps[i]
            if p <= rem and feas[i][rem - p]:
                return i
        return -1

    idx: list[int] = []
    vals: list[int] = []
    rem = n
    top = len(ps) - 1
    if top < 0 or not feas[top][n]:
        return
    while True:
        # descend greedily; every choice keeps the remainder fillable
        while rem:
            i = next_choice(rem, top)
            idx.append(i)
            vals.append(ps[i])
            rem -= ps[i]
            top = i
        yield Partition(tuple(vals))
        # backtrack to the deepest position with a smaller alternative
        while idx:
            j = idx.pop()
            rem += vals.pop()
            i = next_choice(rem, j - 1)
            if i >= 0:
                idx.append(i)
                vals.append(ps[i])
                rem -= ps[i]
                top = i
                break
        else:
            return


def count(n: int, r: RestrictionMu) -> int:
    """Number of restricted partitions of ``n`` (coin-change recurrence)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    ways = [1] + [0] * n
    if n:
        for p in r.parts_up_to(n):
            for s in range(p, n + 1):
                ways[s] += ways[s - p]
    return ways[n]


@dataclass(frozen=True)
class CountTable:
    """``counts[x][s]``: restricted partitions of ``s`` with at most ``x`` parts."""

    n_max: int
    x_max: int
    counts: list[list[int]]

    def __call__(self, n: int, x: int) -> int:
        if not (0 <= n <= self.n_max):
            raise IndexError(n)
        return self.counts[min(x, self.x_max)][n]


def count_table(n_max: int, x_max: int, r: RestrictionMu) -> CountTable:
    if n_max < 0 or x_max < 0:
        raise ValueError("n_max and x_max must be nonnegative")
    # exact[j][s]: partitions of s with exactly j parts
    exact = [[0] * (n_max + 1) for _ in range(x_max + 1)]
    exact[0][0] = 1
    for p in (r.parts_up_to(n_max) if n_max else []):
        for j in range(1, x_max + 1):
            row, below = exact[j], exact[j - 1]
            for s in range(p, n_max + 1):
                row[s] += below[s - p]
    cumulative = []
    running = [0] * (n_max + 1)
    for j in range(x_max + 1):
        running = [a + b for a, b in zip(running, exact[j])]
        cumulative.append(running)
    return CountTable(n_max, x_max, cumulative)


def count_with_max_parts(n: int, x: int, r: RestrictionMu) -> int:
    """Restricted partitions of ``n`` with at most ``x`` parts."""
    if n < 0 or x < 0:
        raise ValueError("n and x must be nonnegative")
    return count_table(n, min(x, n), r)(n, x)
