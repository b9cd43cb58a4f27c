"""Arithmetic restrictions on partition parts.

A restriction is a strictly increasing function ``mu`` with ``mu(k)`` the
k-th smallest allowed part.  Built-ins are defined analytically on
``x >= 1``; on ``[0, 1]`` they are linear through the origin and on the
negative axis they are extended as odd functions, so that ``mu``, ``mu'``
and ``mu^{-1}`` are defined on the whole real line.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from respart.errors import CatalogError

__all__ = [
    "RestrictionMu",
    "builtin",
    "builtin_names",
    "parts_up_to",
    "with_lower_bound",
]

RealFn = Callable[[np.ndarray], np.ndarray]

_SMOOTH_SCALE = 10.0


@dataclass(frozen=True)
class _Analytic:
    """Analytic branch of a restriction, valid for ``x >= 1``."""

    f: RealFn
    df: RealFn
    finv: RealFn
    # k -> k-th allowed integer part (vectorized, k >= 1)
    kth_part: Callable[[np.ndarray], np.ndarray]


def _extend(a: _Analytic) -> tuple[RealFn, RealFn, RealFn]:
    """Build odd, piecewise extensions of (f, f', f^{-1}) to the real line."""
    mu1 = float(a.f(np.array([1.0]))[0])

    def mu(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.where(ax >= 1.0, a.f(np.maximum(ax, 1.0)), ax * mu1)
        return np.sign(x) * out

    def mu_prime(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.where(ax >= 1.0, a.df(np.maximum(ax, 1.0)), mu1)

    def mu_inv(y):
        y = np.asarray(y, dtype=float)
        ay = np.abs(y)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(ay >= mu1, a.finv(np.maximum(ay, mu1)), ay / mu1)
        return np.sign(y) * out

    return mu, mu_prime, mu_inv


def _scalarize(fn: RealFn) -> Callable:
    def wrapped(x):
        out = fn(x)
        return float(out) if np.ndim(out) == 0 else out

    wrapped.__name__ = getattr(fn, "__name__", "fn")
    return wrapped


@dataclass(frozen=True, eq=False)
class RestrictionMu:
    """A restriction ``mu`` from the admissible class, with an optional lower bound.

    ``mu``, ``mu_prime`` and ``mu_inv`` accept floats or numpy arrays.  When a
    lower bound ``l`` is set, the discrete part set keeps only base parts
    ``>= l`` and the continuous functions are shifted vertically by
    ``shift = (smallest surviving part) - mu(1)``.
    """

    name: str
    analytic: _Analytic = field(repr=False)
    lower_shift: float = 0.0
    linear_slope: float | None = None
    _ext: tuple = field(init=False, repr=False)
    shift: float = field(init=False)

    def __post_init__(self):
        if self.lower_shift < 0:
            raise ValueError("lower bound must be nonnegative")
        object.__setattr__(self, "_ext", _extend(self.analytic))
        base_first = int(self.analytic.kth_part(np.array([1]))[0])
        first = _first_part_at_least(self.analytic, self.lower_shift)
        object.__setattr__(self, "shift", float(first - base_first))

    # Identity semantics keep lru_cache keys cheap; equal configs compare equal.
    def _key(self):
        return (self.name, self.lower_shift)

    def __eq__(self, other):
        return isinstance(other, RestrictionMu) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def mu(self, x):
        return _scalarize(self._ext[0])(x) + self.shift

    def mu_prime(self, x):
        return _scalarize(self._ext[1])(x)

    def mu_inv(self, y):
        return _scalarize(self._ext[2])(np.asarray(y, dtype=float) - self.shift)

    @property
    def is_linear(self) -> bool:
        """True when ``mu(x) = m*x`` exactly (no shift)."""
        return self.linear_slope is not None and self.shift == 0.0

    @property
    def smallest_part(self) -> int:
        return _first_part_at_least(self.analytic, self.lower_shift)

    def parts_up_to(self, limit: int) -> list[int]:
        return parts_up_to(self, limit)

    def spec_string(self) -> str:
        if self.lower_shift:
            return f"{self.name}@{self.lower_shift:g}"
        return self.name


def _first_part_at_least(a: _Analytic, lower: float) -> int:
    k = 1
    while True:
        # step through parts in blocks so binary/large bounds stay cheap
        ks = np.arange(k, k + 64)
        vals = a.kth_part(ks)
        hit = np.nonzero(vals >= lower)[0]
        if hit.size:
            return int(vals[hit[0]])
        k += 64


@lru_cache(maxsize=256)
def _parts_cached(r: RestrictionMu, limit: int) -> tuple[int, ...]:
    a = r.analytic
    if limit < 1:
        return ()
    mu1 = float(a.f(np.array([1.0]))[0])
    kmax = int(math.floor(float(a.finv(np.array([max(float(limit), mu1)]))[0]))) + 2
    ks = np.arange(1, kmax + 1)
    vals = a.kth_part(ks)
    vals = vals[(vals <= limit) & (vals >= r.lower_shift)]
    return tuple(int(v) for v in np.unique(vals))


def parts_up_to(r: RestrictionMu, limit: int) -> list[int]:
    """Allowed parts ``<= limit``, strictly increasing."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    return list(_parts_cached(r, int(limit)))


def with_lower_bound(r: RestrictionMu, l: float) -> RestrictionMu:
    """Restrict ``r`` to parts ``>= l``.  Bounds compose by taking the maximum."""
    if l < 0:
        raise ValueError("lower bound must be nonnegative")
    return replace(r, lower_shift=max(float(l), r.lower_shift))


# ---------------------------------------------------------------- built-ins


def _identity() -> RestrictionMu:
    a = _Analytic(
        f=lambda x: x,
        df=lambda x: np.ones_like(x),
        finv=lambda y: y,
        kth_part=lambda k: np.asarray(k, dtype=np.int64),
    )
    return RestrictionMu("identity", a, linear_slope=1.0)


def _linear(m: int) -> RestrictionMu:
    if m < 1:
        raise CatalogError(f"linear restriction needs m >= 1, got {m}")
    a = _Analytic(
        f=lambda x: m * x,
        df=lambda x: np.full_like(x, float(m)),
        finv=lambda y: y / m,
        kth_part=lambda k: m * np.asarray(k, dtype=np.int64),
    )
    return RestrictionMu("identity" if m == 1 else f"linear:{m}", a, linear_slope=float(m))


def _binary() -> RestrictionMu:
    ln2 = math.log(2.0)
    a = _Analytic(
        f=lambda x: np.exp2(x - 1.0),
        df=lambda x: np.exp2(x - 1.0) * ln2,
        finv=lambda y: 1.0 + np.log2(y),
        kth_part=lambda k: np.left_shift(1, np.asarray(k, dtype=np.int64) - 1),
    )
    return RestrictionMu("binary", a)


def _smooth_finv(y):
    y = np.asarray(y, dtype=float)
    return y * -np.expm1(-y / _SMOOTH_SCALE)


def _smooth_dfinv(t):
    e = np.exp(-t / _SMOOTH_SCALE)
    return 1.0 - e + (t / _SMOOTH_SCALE) * e


def _smooth_f(x):
    """Invert ``t (1 - e^{-t/10}) = x`` by bisection.

    The root lies in ``[x, x + 10/e]`` because ``t e^{-t/10} <= 10/e``.
    """
    x = np.asarray(x, dtype=float)
    lo = x.copy()
    hi = x + _SMOOTH_SCALE / math.e + 1e-9
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = _smooth_finv(mid) < x
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 1e-13 * np.maximum(1.0, np.abs(x))):
            break
    return 0.5 * (lo + hi)


def _smooth_kth(k):
    # Integer parts are ceil(mu(k)); neighbouring k can share a ceiling where
    # mu grows slower than 1, and parts_up_to de-duplicates them.
    return np.ceil(_smooth_f(np.asarray(k, dtype=float)) - 1e-9).astype(np.int64)


def _smooth_cutoff() -> RestrictionMu:
    a = _Analytic(
        f=_smooth_f,
        df=lambda x: 1.0 / _smooth_dfinv(_smooth_f(x)),
        finv=_smooth_finv,
        kth_part=_smooth_kth,
    )
    return RestrictionMu("smooth_cutoff", a)


_CATALOG = {
    "identity": _identity,
    "binary": _binary,
    "smooth_cutoff": _smooth_cutoff,
}

_LINEAR_RE = re.compile(r"^linear\s*[:(]\s*(\d+)\s*\)?$")


def builtin_names() -> list[str]:
    return ["identity", "linear:<m>", "binary", "smooth_cutoff"]


@lru_cache(maxsize=64)
def builtin(name: str) -> RestrictionMu:
    """Look up a catalog restriction.

    Accepts ``identity``, ``binary``, ``smooth_cutoff``, ``linear:<m>`` or
    ``linear(<m>)``, optionally followed by ``@<lower bound>``.
    """
    name = name.strip()
    base, _, bound = name.partition("@")
    base = base.strip()
    if base in _CATALOG:
        r = _CATALOG[base]()
    else:
        match = _LINEAR_RE.match(base)
        if not match:
            raise CatalogError(f"unknown restriction {name!r}; known: {', '.join(builtin_names())}")
        r = _linear(int(match.group(1)))
    if bound:
        try:
            r = with_lower_bound(r, float(bound))
        except ValueError as exc:
            raise CatalogError(f"bad lower bound in {name!r}") from exc
    return r
