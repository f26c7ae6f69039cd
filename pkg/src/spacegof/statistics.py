"""First-order (``V``) and second-order (``W``) statistics of scaled spacings.

``W`` is normalised by ``2 / (N (N - 1))`` with ``N`` the length of the
spacings vector, so the same formula covers both spacing schemes. ``V``
divides by the internal ``n``, not by ``N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _accel
from .errors import EmptyInput, NotScaled, TooFewSpacings
from .kernels import ScalarKernel, SymmetricKernel
from .spacings import Sample, Scheme, SpacingsVector, batch_scaled_spacings, scaled_spacings


class StatisticKind(str, Enum):
    FIRST_ORDER = "first_order"
    SECOND_ORDER = "second_order"


@dataclass(frozen=True)
class StatisticValue:
    value: float
    kind: StatisticKind
    kernel_label: str
    m: int
    n: int
    scheme: Scheme
    length: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "kind": self.kind.value,
            "kernel": self.kernel_label,
            "m": self.m,
            "n": self.n,
            "scheme": self.scheme.value,
            "spacings": self.length,
        }


def _require_scaled(v: SpacingsVector, minimum: int) -> int:
    if not v.scaled:
        raise NotScaled("statistics are defined on n-scaled spacings; call scale() first")
    size = len(v)
    if size < minimum:
        if minimum == 1:
            raise EmptyInput("empty spacings vector")
        raise TooFewSpacings(f"a pair statistic needs at least 2 spacings, got {size}")
    return size


def _second_order(v: SpacingsVector, label: str, total: float, size: int) -> StatisticValue:
    value = 2.0 * total / (size * (size - 1))
    return StatisticValue(value, StatisticKind.SECOND_ORDER, label, v.m, v.n, v.scheme, size)


def u_stat_naive(v: SpacingsVector, h: SymmetricKernel) -> StatisticValue:
    """Average of ``h`` over all unordered pairs, by explicit enumeration.

    Terms are accumulated with :func:`math.fsum`, so the result is correctly
    rounded and does not depend on the order of the spacings.
    """
    size = _require_scaled(v, 2)
    x = np.asarray(v.values, dtype=float)
    terms: list[float] = []
    for i in range(size - 1):
        terms.extend(np.broadcast_to(h.eval(x[i], x[i + 1 :]), (size - 1 - i,)).tolist())
    return _second_order(v, h.label, math.fsum(terms), size)


def u_stat_fast(v: SpacingsVector, r: int) -> StatisticValue:
    """Gini statistics for ``r`` in {1, 2} without the pair loop.

    ``r = 2`` uses ``sum_{i<j} (x_i - x_j)**2 = N * sum (x - mean)**2``
    (the centred form of ``N sum x**2 - (sum x)**2``); ``r = 1`` sorts and
    weights the k-th order statistic by ``2k - N - 1``.
    """
    size = _require_scaled(v, 2)
    x = np.asarray(v.values, dtype=float)
    if r == 2:
        mean = math.fsum(x) / size
        total = size * math.fsum((x - mean) ** 2)
    elif r == 1:
        xs = np.sort(x)
        weights = 2.0 * np.arange(1, size + 1) - size - 1.0
        total = math.fsum(weights * xs)
    else:
        raise ValueError(f"fast path exists only for r in {{1, 2}}, got {r}")
    return _second_order(v, f"gini:r={r:g}", total, size)


def v_stat(v: SpacingsVector, g: ScalarKernel) -> StatisticValue:
    size = _require_scaled(v, 1)
    total = math.fsum(np.broadcast_to(g.eval(np.asarray(v.values)), (size,)).tolist())
    return StatisticValue(total / v.n, StatisticKind.FIRST_ORDER, g.label, v.m, v.n, v.scheme, size)


def gini_statistic(v: SpacingsVector, r: float) -> StatisticValue:
    """``G_{m,n}(r)``, using the fast path for r in {1, 2} and the compiled pair loop otherwise."""
    if r in (1.0, 2.0):
        return u_stat_fast(v, int(r))
    size = _require_scaled(v, 2)
    row = np.ascontiguousarray(np.asarray(v.values, dtype=float)[None, :])
    total = float(_accel.pair_power_sums(row, float(r))[0])
    return _second_order(v, f"gini:r={r:g}", total, size)


def evaluate(v: SpacingsVector, kernel: SymmetricKernel | ScalarKernel) -> StatisticValue:
    """Dispatch to the cheapest exact evaluator for ``kernel``."""
    if isinstance(kernel, ScalarKernel):
        return v_stat(v, kernel)
    if kernel.gini_r is not None:
        out = gini_statistic(v, kernel.gini_r)
        return StatisticValue(out.value, out.kind, kernel.label, out.m, out.n, out.scheme, out.length)
    return u_stat_naive(v, kernel)


def statistic_of_sample(
    s: Sample, m: int, scheme: Scheme | str, kernel: SymmetricKernel | ScalarKernel
) -> StatisticValue:
    return evaluate(scaled_spacings(s, m, scheme), kernel)


def batch_gini(v: np.ndarray, r: float) -> np.ndarray:
    """``G(r)`` for every row of a ``(reps, N)`` array of scaled spacings."""
    v = np.ascontiguousarray(v, dtype=float)
    size = v.shape[1]
    if size < 2:
        raise TooFewSpacings(f"a pair statistic needs at least 2 spacings, got {size}")
    if r == 2.0:
        total = _accel.sq_diff_sums(v)
    elif r == 1.0:
        total = _accel.abs_diff_sums_sorted(np.sort(v, axis=1))
    else:
        total = _accel.pair_power_sums(v, float(r))
    return 2.0 * total / (size * (size - 1))


def batch_statistic(
    rows: np.ndarray, m: int, scheme: Scheme | str, kernel: SymmetricKernel | ScalarKernel
) -> np.ndarray:
    """Evaluate a statistic for each sorted sample row of ``rows``."""
    v = batch_scaled_spacings(rows, m, scheme)
    n = rows.shape[1] + 1
    if isinstance(kernel, ScalarKernel):
        return np.broadcast_to(kernel.eval(v), v.shape).sum(axis=1) / n
    if kernel.gini_r is not None:
        return batch_gini(v, kernel.gini_r)
    size = v.shape[1]
    if size < 2:
        raise TooFewSpacings(f"a pair statistic needs at least 2 spacings, got {size}")
    iu, ju = np.triu_indices(size, k=1)
    vals = np.broadcast_to(kernel.eval(v[:, iu], v[:, ju]), (v.shape[0], iu.size))
    return 2.0 * vals.sum(axis=1) / (size * (size - 1))
