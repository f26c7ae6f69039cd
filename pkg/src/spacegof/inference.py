"""Test decisions from asymptotic normality or simulated null distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import stats

from .asymptotics import KernelMoments
from .errors import DegenerateVariance, InsufficientReps, TableMismatch
from .kernels import ScalarKernel, SymmetricKernel
from .sampling import AlternativeModel, RngSpec, draw_rows, map_ordered
from .spacings import Scheme
from .statistics import StatisticKind, StatisticValue, batch_statistic

MIN_CRITICAL_REPS = 1000


class Tail(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    TWO_SIDED = "two_sided"


class Method(str, Enum):
    ASYMPTOTIC = "asymptotic"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    tail: Tail
    method: Method
    alpha: float
    reject: bool
    z_score: float | None = None
    metadata: dict = field(default_factory=dict)

    __test__ = False  # keep pytest from collecting this class

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "z_score": self.z_score,
            "p_value": self.p_value,
            "tail": self.tail.value,
            "method": self.method.value,
            "alpha": self.alpha,
            "reject": self.reject,
            "metadata": dict(self.metadata),
        }


@dataclass(frozen=True)
class CriticalTable:
    quantiles: dict[float, float]
    reps: int
    n: int
    m: int
    scheme: Scheme
    kernel: str
    seed: RngSpec
    # sorted simulated null statistics; needed for Monte Carlo p-values
    null_statistics: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "quantiles": {repr(float(p)): q for p, q in sorted(self.quantiles.items())},
            "reps": self.reps,
            "n": self.n,
            "m": self.m,
            "scheme": self.scheme.value,
            "kernel": self.kernel,
            "seed": self.seed.to_dict(),
        }


def _p_from_z(z: float, tail: Tail) -> float:
    if tail is Tail.UPPER:
        return float(stats.norm.sf(z))
    if tail is Tail.LOWER:
        return float(stats.norm.cdf(z))
    return float(min(1.0, 2.0 * stats.norm.sf(abs(z))))


def asymptotic_test(
    s: StatisticValue,
    moments: KernelMoments,
    tail: Tail | str = Tail.TWO_SIDED,
    alpha: float = 0.05,
) -> TestResult:
    """``z = sqrt(n) (W - theta) / sigma_h`` against the standard normal.

    Only meaningful for the overlapping scheme. A first-order value ``V`` is
    converted to the pair statistic of the symmetrised kernel through
    ``W = V n / N``, so ``moments`` must then describe ``symmetrize(g)``.
    """
    tail = Tail(tail)
    if s.scheme is not Scheme.OVERLAPPING:
        raise ValueError("the normal approximation is derived for overlapping spacings; use Monte Carlo")
    if not moments.sigma2 > 0:
        raise DegenerateVariance(f"sigma2 = {moments.sigma2} is not positive")
    if moments.m != s.m:
        raise TableMismatch(f"moments are for m={moments.m}, statistic has m={s.m}")
    value = s.value
    if s.kind is StatisticKind.FIRST_ORDER:
        value = value * s.n / s.length
    z = math.sqrt(s.n) * (value - moments.theta) / math.sqrt(moments.sigma2)
    p = _p_from_z(z, tail)
    meta = {
        "m": s.m,
        "n": s.n,
        "scheme": s.scheme.value,
        "kernel": s.kernel_label,
        "moments_source": moments.source.value,
        "theta": moments.theta,
        "sigma2": moments.sigma2,
    }
    return TestResult(s.value, p, tail, Method.ASYMPTOTIC, alpha, p < alpha, z, meta)


def mc_null_statistics(
    n: int,
    m: int,
    scheme: Scheme | str,
    kernel: SymmetricKernel | ScalarKernel,
    reps: int,
    rng: RngSpec,
    threads: int = 1,
    block: int = 2048,
) -> np.ndarray:
    """Sorted statistics of ``reps`` uniform samples of size ``n - 1``.

    Replication ``i`` uses ``rng.child(i)``; the result does not depend on
    ``threads``.
    """
    count = n - 1
    uniform = AlternativeModel("uniform")
    bounds = [(s, min(reps, s + block)) for s in range(0, reps, block)]

    def run(se):
        rows = draw_rows(uniform, count, se[1] - se[0], rng.child(se[0]), block=block)
        return batch_statistic(rows, m, scheme, kernel)

    parts = map_ordered(run, bounds, threads)
    return np.sort(np.concatenate(parts))


def mc_critical(
    n: int,
    m: int,
    scheme: Scheme | str,
    kernel: SymmetricKernel | ScalarKernel,
    probs: Sequence[float],
    reps: int,
    rng: RngSpec,
    threads: int = 1,
) -> CriticalTable:
    """Empirical null quantiles (linear interpolation, "type 7")."""
    if reps < MIN_CRITICAL_REPS:
        raise InsufficientReps(f"need at least {MIN_CRITICAL_REPS} null replications, got {reps}")
    scheme = Scheme(scheme)
    null = mc_null_statistics(n, m, scheme, kernel, reps, rng, threads)
    null.setflags(write=False)
    probs = [float(p) for p in probs]
    if any(not 0.0 <= p <= 1.0 for p in probs):
        raise ValueError("probabilities must lie in [0, 1]")
    qs = np.quantile(null, probs, method="linear") if probs else []
    quantiles = {p: float(q) for p, q in zip(probs, qs)}
    return CriticalTable(quantiles, reps, n, m, scheme, kernel.label, rng, null)


def mc_p_values(values, null_sorted: np.ndarray, tail: Tail | str) -> np.ndarray:
    """``(1 + #{null >= s}) / (R + 1)`` for the upper tail, mirrored for the lower tail.

    The two-sided value is twice the smaller tail, capped at one.
    """
    tail = Tail(tail)
    values = np.asarray(values, dtype=float)
    r = null_sorted.size
    upper = (1.0 + r - np.searchsorted(null_sorted, values, side="left")) / (r + 1.0)
    if tail is Tail.UPPER:
        return upper
    lower = (1.0 + np.searchsorted(null_sorted, values, side="right")) / (r + 1.0)
    if tail is Tail.LOWER:
        return lower
    return np.minimum(1.0, 2.0 * np.minimum(upper, lower))


def mc_test(
    s: StatisticValue,
    table: CriticalTable,
    tail: Tail | str = Tail.TWO_SIDED,
    alpha: float = 0.05,
) -> TestResult:
    """Compare ``s`` with a simulated null distribution.

    The decision is ``p < alpha``; with the add-one p-value this coincides
    with falling outside the empirical ``alpha`` quantiles up to one order
    statistic of the null sample.
    """
    tail = Tail(tail)
    for name, mine, theirs in (
        ("n", s.n, table.n),
        ("m", s.m, table.m),
        ("scheme", s.scheme, table.scheme),
        ("kernel", s.kernel_label, table.kernel),
    ):
        if mine != theirs:
            raise TableMismatch(f"{name} differs: statistic has {mine!r}, table has {theirs!r}")
    if table.null_statistics is None:
        raise TableMismatch("critical table carries no null sample; rebuild it with mc_critical")
    p = float(mc_p_values([s.value], table.null_statistics, tail)[0])
    meta = {
        "m": s.m,
        "n": s.n,
        "scheme": s.scheme.value,
        "kernel": s.kernel_label,
        "critical_reps": table.reps,
        "seed": table.seed.to_dict(),
    }
    return TestResult(s.value, p, tail, Method.MONTE_CARLO, alpha, p < alpha, None, meta)
