"""Boltzmann measure on restricted partitions.

Under ``P_q`` the multiplicity ``Z_m`` of each allowed part ``m`` is an
independent geometric variable with ``P(Z_m = j) = (1 - q^m) q^{m j}``.
Conditioning on the total size gives the uniform law on partitions of ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from respart.errors import DomainError, RejectionError, SolverError
from respart.partitions import Partition
from respart.restriction import RestrictionMu

__all__ = [
    "BoltzmannParams",
    "MultiplicityVector",
    "empirical_law",
    "expected_multiplicity",
    "expected_size",
    "iter_blocks",
    "sample",
    "sample_block",
    "sample_conditioned",
    "sample_conditioned_block",
    "solve_q",
    "statistic_values",
    "total_variation",
]

TAIL_CUTOFF = 1e-15
BLOCK = 4096
EXACT_CONDITIONING_LIMIT = 200

Statistic = Literal["X", "Y", "muY", "R"]


@dataclass(frozen=True)
class BoltzmannParams:
    n: int
    q: float
    alpha: float
    restriction: RestrictionMu
    truncation: int
    parts: tuple[int, ...]

    @property
    def parts_array(self) -> np.ndarray:
        return np.asarray(self.parts, dtype=np.int64)


@dataclass(frozen=True)
class MultiplicityVector:
    z: dict[int, int]

    @property
    def size(self) -> int:
        return sum(m * c for m, c in self.z.items())

    def to_partition(self) -> Partition:
        parts = []
        for m in sorted(self.z, reverse=True):
            parts.extend([m] * self.z[m])
        return Partition(tuple(parts))


def _mean_terms(parts: np.ndarray, alpha: float) -> np.ndarray:
    """m q^m / (1 - q^m) with q = e^{-alpha}, stable for small alpha*m."""
    am = alpha * parts
    return parts / np.expm1(am)


def _truncation_limit(n: int, alpha: float) -> float:
    # m e^{-alpha m} < 1e-15 n holds once alpha m > log(m / (1e-15 n)); iterate twice
    m = 1.0 / alpha
    for _ in range(3):
        m = max(m, (math.log(max(m, 1.0)) - math.log(TAIL_CUTOFF * n)) / alpha + 1.0)
    return m


def _parts_for(r: RestrictionMu, n: int, alpha: float) -> np.ndarray:
    limit = int(math.ceil(_truncation_limit(n, alpha)))
    ps = np.asarray(r.parts_up_to(max(limit, 1)), dtype=np.float64)
    if ps.size == 0:
        return ps
    terms = _mean_terms(ps, alpha)
    keep = terms >= TAIL_CUTOFF * n
    if not keep.any():
        return ps[:1]
    return ps[: np.nonzero(keep)[0][-1] + 1]


def expected_size(r: RestrictionMu, n: int, alpha: float) -> float:
    """Right-hand side of the size equation, truncated as in :func:`solve_q`."""
    ps = _parts_for(r, n, alpha)
    return float(np.sum(_mean_terms(ps, alpha)))


def solve_q(n: int, r: RestrictionMu, tol: float = 1e-10, max_iter: int = 400) -> BoltzmannParams:
    """Solve ``sum_m m q^m / (1 - q^m) = n`` for ``q`` by bisection on ``alpha = -log q``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not (0 < tol <= 1e-6):
        raise DomainError("tol must lie in (0, 1e-6]")

    def residual(alpha: float) -> float:
        return expected_size(r, n, alpha) - n

    # the size sum is strictly decreasing in alpha
    hi = max(2.0 * math.pi / math.sqrt(6.0 * n), 1e-3)
    for _ in range(200):
        if residual(hi) < 0:
            break
        hi *= 2.0
    else:
        raise SolverError("could not bracket alpha from above")
    lo = hi / 2.0
    for _ in range(200):
        if residual(lo) > 0:
            break
        hi, lo = lo, lo / 2.0
    else:
        raise SolverError("could not bracket alpha from below")

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        res = residual(mid)
        if abs(res) <= tol * n:
            lo = hi = mid
            break
        if res > 0:
            lo = mid
        else:
            hi = mid
    else:
        raise SolverError(f"bisection did not reach tolerance {tol} in {max_iter} steps")
    alpha = lo
    ps = _parts_for(r, n, alpha)
    return BoltzmannParams(
        n=n,
        q=math.exp(-alpha),
        alpha=alpha,
        restriction=r,
        truncation=int(ps[-1]) if ps.size else 0,
        parts=tuple(int(p) for p in ps),
    )


def expected_multiplicity(params: BoltzmannParams, m: int) -> float:
    """E[Z_m] = q^m / (1 - q^m)."""
    if m < 1 or m not in params.restriction.parts_up_to(m):
        raise DomainError(f"{m} is not an allowed part")
    return 1.0 / math.expm1(params.alpha * m)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def sample_block(params: BoltzmannParams, seed: int, block: int, size: int = BLOCK) -> np.ndarray:
    """Multiplicity matrix (``size`` x number of parts) for one RNG block.

    Row ``i`` of block ``b`` is attempt ``b * BLOCK + i``; columns follow
    ``params.parts``.  Streams are keyed by ``(seed, block)``.
    """
    rng = _block_rng(seed, block)
    u = 1.0 - rng.random((size, len(params.parts)))
    # inverse transform: P(Z >= j) = q^{m j}
    scale = -params.alpha * params.parts_array.astype(float)
    return np.floor(np.log(u) / scale).astype(np.int64)


def iter_blocks(params: BoltzmannParams, count: int, seed: int):
    """Yield unconditioned multiplicity matrices totalling ``count`` rows."""
    block = 0
    while count > 0:
        size = min(BLOCK, count)
        yield sample_block(params, seed, block, size=BLOCK)[:size]
        count -= size
        block += 1


def sample(params: BoltzmannParams, seed: int) -> MultiplicityVector:
    row = sample_block(params, seed, 0, size=1)[0]
    return MultiplicityVector({m: int(c) for m, c in zip(params.parts, row)})


def _window(n: int, delta: float) -> tuple[float, float]:
    return n * (1.0 - delta), n * (1.0 + delta)


def sample_conditioned_block(
    params: BoltzmannParams,
    count: int,
    window: float,
    seed: int,
    max_tries: int,
) -> np.ndarray:
    """``count`` multiplicity rows whose size lies in ``[n(1-w), n(1+w)]``."""
    if not (0 <= window < 1):
        raise DomainError("window must lie in [0, 1)")
    lo, hi = _window(params.n, window)
    weights = params.parts_array
    accepted = []
    have = tries = block = 0
    while have < count:
        if tries >= max_tries:
            rate = have / tries if tries else 0.0
            raise RejectionError(f"only {have} of {count} samples accepted in {tries} tries", rate)
        size = min(BLOCK, max_tries - tries)
        z = sample_block(params, seed, block, size=BLOCK)[:size]
        block += 1
        tries += size
        totals = z @ weights
        ok = z[(totals >= lo) & (totals <= hi)]
        accepted.append(ok)
        have += len(ok)
    return np.concatenate(accepted)[:count]


def sample_conditioned(
    params: BoltzmannParams, window: float = 0.0, max_tries: int = 10**6, seed: int = 0
) -> Partition:
    z = sample_conditioned_block(params, 1, window, seed, max_tries)[0]
    return MultiplicityVector({m: int(c) for m, c in zip(params.parts, z)}).to_partition()


def statistic_values(
    z: np.ndarray, parts: np.ndarray, statistic: Statistic, k: int, restriction: RestrictionMu
) -> np.ndarray:
    """Evaluate X_k, Y_k, mu(Y_k) or R_k on each multiplicity row.

    ``Y_k`` is 0 when a partition has fewer than ``k`` parts.  ``muY`` applies
    ``mu`` to the part value ``Y_k``.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    parts = np.asarray(parts)
    if statistic in ("X", "R"):
        x = z[:, parts >= k].sum(axis=1)
    if statistic in ("Y", "muY", "R"):
        # parts_ge[:, j] = number of parts >= parts[j]
        parts_ge = np.cumsum(z[:, ::-1], axis=1)[:, ::-1]
        has = parts_ge >= k
        idx = np.where(has.any(axis=1), has.shape[1] - 1 - np.argmax(has[:, ::-1], axis=1), -1)
        y = np.where(idx >= 0, parts[np.maximum(idx, 0)], 0)
    if statistic == "X":
        return x
    if statistic == "Y":
        return y
    if statistic == "R":
        return y - x
    if statistic == "muY":
        with np.errstate(over="ignore"):
            return np.asarray(restriction.mu(y.astype(float)))
    raise DomainError(f"unknown statistic {statistic!r}")


def empirical_law(
    params: BoltzmannParams,
    statistic: Statistic,
    k: int,
    samples: int,
    window: float,
    seed: int,
    max_tries: int | None = None,
) -> dict[float, float]:
    """Histogram of a statistic over conditioned samples, as value -> frequency."""
    if samples < 1:
        raise DomainError("samples must be >= 1")
    tries = max_tries if max_tries is not None else 2000 * samples + 10**6
    z = sample_conditioned_block(params, samples, window, seed, tries)
    vals = statistic_values(z, params.parts_array, statistic, k, params.restriction)
    uniq, counts = np.unique(vals, return_counts=True)
    return {_as_key(v): int(c) / samples for v, c in zip(uniq, counts)}


def _as_key(v):
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def total_variation(p: dict, q: dict) -> float:
    """Half the L1 distance between two histograms."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
