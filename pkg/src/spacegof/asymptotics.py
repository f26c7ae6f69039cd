"""Null moments, local-alternative shifts, efficacies and AREs.

Everything is expressed through windows ``zeta_j = Z_j + ... + Z_{j+m-1}``
of iid standard exponentials. Windows at least ``m`` apart are independent,
which is what makes the overlap bookkeeping below work.

Closed forms exist for the squared-difference kernel; any other kernel goes
through the Monte Carlo estimators, which report standard errors from
per-replication influence values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import (
    AnalyticUnavailable,
    DegenerateVariance,
    InsufficientReps,
    OverlapOutOfRange,
    QuadratureFailure,
)
from .kernels import ScalarKernel, SymmetricKernel, symmetrize
from .sampling import LOCAL_SHAPES, LocalAlternative, RngSpec, map_ordered, window_sums

MC_BLOCK = 4096
MIN_REPS = 100
RECOMMENDED_REPS = 10_000


class Source(str, Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class KernelMoments:
    theta: float
    A: float
    B: float
    sigma2: float
    source: Source
    m: int
    kernel_label: str
    reps: int | None = None
    std_errors: dict[str, float] | None = None

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel_label,
            "m": self.m,
            "theta": self.theta,
            "A": self.A,
            "B": self.B,
            "sigma2": self.sigma2,
            "source": self.source.value,
            "reps": self.reps,
            "std_errors": self.std_errors,
        }


@dataclass(frozen=True)
class LocalShift:
    cov_term: float
    integral_lprime_sq: float
    mu_h: float
    source: Source
    heuristic: bool = False
    cov_std_error: float | None = None

    @property
    def mu_std_error(self) -> float | None:
        if self.cov_std_error is None:
            return None
        return 0.5 * self.cov_std_error * abs(self.integral_lprime_sq)


@dataclass(frozen=True)
class EfficacyReport:
    kernel_label: str
    m: int
    alternative: str
    e2: float
    mu_h: float
    sigma2: float
    source: Source
    heuristic: bool = False
    e2_std_error: float | None = None
    # ratio of efficacies squared, as in the Pitman ARE definition used here
    are_vs: dict[str, float] = field(default_factory=dict)
    # the plain ratio e2(self) / e2(other), reported alongside
    efficacy_ratio_vs: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel_label,
            "m": self.m,
            "alternative": self.alternative,
            "e2": self.e2,
            "e2_std_error": self.e2_std_error,
            "mu_h": self.mu_h,
            "sigma2": self.sigma2,
            "source": self.source.value,
            "heuristic": self.heuristic,
            "are_vs": dict(self.are_vs),
            "efficacy_ratio_vs": dict(self.efficacy_ratio_vs),
        }


def _as_pair_kernel(h: SymmetricKernel | ScalarKernel) -> SymmetricKernel:
    return symmetrize(h) if isinstance(h, ScalarKernel) else h


# ---------------------------------------------------------------------------
# closed forms for h(x, y) = (x - y)**2


def overlap_cov_gini_sq(m: int, k: int) -> float:
    """``cov(g(zeta_a), g(zeta_b))`` for two windows sharing ``k`` exponentials.

    Here ``g(x) = m + (x - m)**2`` is the projection of the squared
    difference. Expanding with gamma central moments (second ``m``, third
    ``2m``, fourth ``3m**2 + 6m``) leaves ``2k**2 + 6k``, independent of ``m``.
    """
    if not 0 <= k <= m:
        raise OverlapOutOfRange(f"overlap k={k} must lie in [0, {m}]")
    return float(2 * k * k + 6 * k)


def moments_analytic_gini_sq(m: int) -> KernelMoments:
    if m < 1:
        raise ValueError("m must be positive")
    theta = 2.0 * m
    B = 2.0 * m
    # lags d = j - m for j = 1..2m, i.e. d in [1 - m, m]
    A = math.fsum(overlap_cov_gini_sq(m, max(0, m - abs(d))) for d in range(1 - m, m + 1))
    sigma2 = 4.0 * (A - B * B)
    return KernelMoments(theta, A, B, sigma2, Source.ANALYTIC, m, "gini:r=2")


def moments_analytic(h: SymmetricKernel | ScalarKernel, m: int) -> KernelMoments:
    h = _as_pair_kernel(h)
    if h.analytic_moments != "gini_sq":
        raise AnalyticUnavailable(f"no closed-form moments for kernel {h.label}")
    out = moments_analytic_gini_sq(m)
    return KernelMoments(out.theta, out.A, out.B, out.sigma2, out.source, m, h.label)


def sigma2_gini_sq(m: int) -> float:
    return 8.0 * m * (m + 1) * (2 * m + 1) / 3.0


# ---------------------------------------------------------------------------
# Monte Carlo estimators


def _check_reps(reps: int) -> None:
    if reps < MIN_REPS:
        raise InsufficientReps(f"need at least {MIN_REPS} replications, got {reps}")
    if reps < RECOMMENDED_REPS:
        warnings.warn(
            f"{reps} replications is below the recommended {RECOMMENDED_REPS}; "
            "standard errors will be large",
            RuntimeWarning,
            stacklevel=4,
        )


def _blocks(reps: int, block: int) -> list[tuple[int, int]]:
    return [(b, min(block, reps - b * block)) for b in range((reps + block - 1) // block)]


def _cov_with_influence(x: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Sample covariance and its per-replication influence values."""
    xc = x - x.mean()
    yc = y - y.mean()
    prod = xc * yc
    r = x.size
    cov = float(prod.sum() / (r - 1))
    return cov, prod - cov


def _se(influence: np.ndarray) -> float:
    return float(np.std(influence, ddof=1) / math.sqrt(influence.size))


def _moment_block(h: SymmetricKernel, m: int, rng: RngSpec, task: tuple[int, int]):
    b, size = task
    z = rng.child(b).generator().standard_exponential((size, 7 * m))
    w = window_sums(z, m)  # w[:, j - 1] is zeta_j
    x = np.broadcast_to(h.eval(w[:, m - 1], w[:, 4 * m - 1]), (size,))
    y = np.broadcast_to(h.eval(w[:, : 2 * m], w[:, 6 * m - 1 : 6 * m]), (size, 2 * m))
    return np.array(x, dtype=float), y.sum(axis=1), w[:, m - 1].copy()


def moments_mc(
    h: SymmetricKernel | ScalarKernel,
    m: int,
    reps: int,
    rng: RngSpec,
    threads: int = 1,
    block: int = MC_BLOCK,
) -> KernelMoments:
    """Estimate ``theta``, ``A``, ``B`` and ``sigma2 = 4 (A - B**2)``.

    Each replication draws a stream of ``7m`` exponentials and forms

    * ``X = h(zeta_m, zeta_4m)``, whose mean is ``theta``;
    * ``S = sum_{j=1..2m} h(zeta_j, zeta_6m)``, so ``A = cov(X, S)``;
    * ``B = cov(X, zeta_m)``.

    Windows ``4m`` and ``6m`` share nothing with any other window used, so
    only the overlap of ``zeta_m`` with ``zeta_j`` contributes. Block ``b``
    of ``block`` replications draws from ``rng.child(b)``.
    """
    return _moments_mc_core(_as_pair_kernel(h), m, reps, rng, threads, block)[0]


def _moments_mc_core(h: SymmetricKernel, m: int, reps: int, rng: RngSpec, threads: int, block: int):
    if m < 1:
        raise ValueError("m must be positive")
    _check_reps(reps)
    parts = map_ordered(lambda t: _moment_block(h, m, rng, t), _blocks(reps, block), threads)
    x = np.concatenate([p[0] for p in parts])
    s = np.concatenate([p[1] for p in parts])
    zeta = np.concatenate([p[2] for p in parts])

    theta = float(x.mean())
    A, infl_a = _cov_with_influence(x, s)
    B, infl_b = _cov_with_influence(x, zeta)
    sigma2 = 4.0 * (A - B * B)
    infl_sigma2 = 4.0 * (infl_a - 2.0 * B * infl_b)
    std_errors = {
        "theta": _se(x),
        "A": _se(infl_a),
        "B": _se(infl_b),
        "sigma2": _se(infl_sigma2),
    }
    return KernelMoments(theta, A, B, sigma2, Source.MONTE_CARLO, m, h.label, reps, std_errors), infl_sigma2


def kernel_projection(
    h: SymmetricKernel | ScalarKernel, m: int, x: np.ndarray, inner_reps: int, rng: RngSpec
) -> np.ndarray:
    """``g(x) = E h(zeta, x)`` with ``zeta ~ gamma(m, 1)``, by averaging over ``inner_reps`` draws.

    The same inner draws are used for every ``x``.
    """
    h = _as_pair_kernel(h)
    inner = rng.generator().standard_gamma(m, size=inner_reps)
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape)
    flat = x.ravel()
    res = out.ravel()
    step = max(1, (1 << 22) // inner_reps)
    for start in range(0, flat.size, step):
        chunk = flat[start : start + step]
        vals = np.broadcast_to(h.eval(chunk[:, None], inner[None, :]), (chunk.size, inner_reps))
        res[start : start + step] = vals.mean(axis=1)
    return out


# ---------------------------------------------------------------------------
# local alternatives


def _lprime(L) -> tuple[str, object, float | None]:
    if isinstance(L, LocalAlternative):
        return L.label, L.dL, L.lprime_sq
    if isinstance(L, str):
        _, dL, closed = LOCAL_SHAPES[L]
        return L, dL, closed
    if callable(L):
        return getattr(L, "__name__", "custom"), L, None
    raise TypeError("L must be a LocalAlternative, a built-in name or a derivative callable")


def integral_l_prime_sq(L) -> float:
    """``int_0^1 L'(u)**2 du`` by adaptive quadrature (relative tolerance 1e-10).

    ``L`` is a :class:`LocalAlternative`, a built-in shape name, or a callable
    giving ``L'`` directly.
    """
    _, dL, _ = _lprime(L)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _err = integrate.quad(
                lambda u: float(dL(np.float64(u))) ** 2, 0.0, 1.0, epsabs=1e-14, epsrel=1e-10, limit=200
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureFailure(str(exc)) from exc
    if not math.isfinite(value):
        raise QuadratureFailure("non-finite integral")
    return float(value)


def _shift_block(h: SymmetricKernel, m: int, rng: RngSpec, task: tuple[int, int]):
    b, size = task
    z = rng.child(b).generator().standard_gamma(m, size=(size, 2))
    hv = np.broadcast_to(h.eval(z[:, 0], z[:, 1]), (size,))
    q = (z - m - 1.0) ** 2
    return np.array(hv, dtype=float), q.sum(axis=1)


def local_shift(
    h: SymmetricKernel | ScalarKernel,
    m: int,
    L,
    mode: Source | str = Source.ANALYTIC,
    rng: RngSpec | None = None,
    reps: int = 1_000_000,
    threads: int = 1,
    block: int = MC_BLOCK,
) -> LocalShift:
    """Mean shift ``mu_h = cov_term * int L'^2 / 2`` under the local alternatives.

    ``cov_term = cov(h(zeta_1, zeta_2), (zeta_1 - m - 1)**2 + (zeta_2 - m - 1)**2)``
    for independent ``gamma(m, 1)`` windows. Analytic mode exists only for
    the squared difference, where it equals ``4m(m+1)``. For kernels without
    continuous second derivatives the result is flagged ``heuristic``.
    """
    h = _as_pair_kernel(h)
    mode = Source(mode)
    integral = integral_l_prime_sq(L)
    heuristic = not h.smooth
    if mode is Source.ANALYTIC:
        if h.analytic_moments != "gini_sq":
            raise AnalyticUnavailable(f"no closed-form shift for kernel {h.label}")
        cov = 4.0 * m * (m + 1)
        return LocalShift(cov, integral, 0.5 * cov * integral, Source.ANALYTIC, heuristic)
    if rng is None:
        raise ValueError("Monte Carlo mode needs an RngSpec")
    return _local_shift_core(h, m, integral, rng, reps, threads, block)[0]


def _local_shift_core(h: SymmetricKernel, m: int, integral: float, rng: RngSpec, reps: int, threads: int, block: int):
    _check_reps(reps)
    parts = map_ordered(lambda t: _shift_block(h, m, rng, t), _blocks(reps, block), threads)
    hv = np.concatenate([p[0] for p in parts])
    q = np.concatenate([p[1] for p in parts])
    cov, infl = _cov_with_influence(hv, q)
    shift = LocalShift(cov, integral, 0.5 * cov * integral, Source.MONTE_CARLO, not h.smooth, _se(infl))
    return shift, infl


# ---------------------------------------------------------------------------
# efficacy


def _alt_label(L) -> str:
    return _lprime(L)[0]


def _efficacy_core(
    h: SymmetricKernel,
    m: int,
    L,
    mode: Source,
    rng: RngSpec | None,
    reps: int,
    threads: int,
) -> EfficacyReport:
    if mode is Source.ANALYTIC:
        moments = moments_analytic(h, m)
        shift = local_shift(h, m, L, Source.ANALYTIC)
    else:
        if rng is None:
            raise ValueError("Monte Carlo mode needs an RngSpec")
        moments = moments_mc(h, m, reps, rng.child(0), threads=threads)
        # disjoint stream range from the moment estimator
        shift = local_shift(h, m, L, Source.MONTE_CARLO, rng.child(1 << 32), reps, threads=threads)
    scale = 1.0 + moments.theta * moments.theta
    if not moments.sigma2 > 1e-12 * scale:
        raise DegenerateVariance(f"null variance of {h.label} is not positive ({moments.sigma2})")
    e2 = shift.mu_h**2 / moments.sigma2
    se = None
    if mode is Source.MONTE_CARLO:
        se_mu = shift.mu_std_error or 0.0
        se_s2 = (moments.std_errors or {}).get("sigma2", 0.0)
        d_mu = 2.0 * shift.mu_h / moments.sigma2
        d_s2 = shift.mu_h**2 / moments.sigma2**2
        se = math.hypot(d_mu * se_mu, d_s2 * se_s2)
    return EfficacyReport(
        kernel_label=h.label,
        m=m,
        alternative=_alt_label(L),
        e2=e2,
        mu_h=shift.mu_h,
        sigma2=moments.sigma2,
        source=mode,
        heuristic=shift.heuristic,
        e2_std_error=se,
    )


def efficacy(
    h: SymmetricKernel | ScalarKernel,
    m: int,
    L,
    mode: Source | str = Source.ANALYTIC,
    rng: RngSpec | None = None,
    reps: int = 1_000_000,
    compare: Sequence[SymmetricKernel | ScalarKernel] = (),
    threads: int = 1,
) -> EfficacyReport:
    """Efficacy ``e2 = mu_h**2 / sigma2`` and AREs against ``compare``.

    ``ARE(h, k) = (e2(h) / e2(k))**2``. Comparison kernels use the same mode
    when they support it and fall back to Monte Carlo otherwise.
    """
    h = _as_pair_kernel(h)
    mode = Source(mode)
    report = _efficacy_core(h, m, L, mode, rng, reps, threads)
    are, ratio = {}, {}
    for i, k in enumerate(compare):
        k = _as_pair_kernel(k)
        k_mode = mode if (mode is Source.MONTE_CARLO or k.analytic_moments) else Source.MONTE_CARLO
        k_rng = rng.child((i + 1) << 40) if rng is not None else None
        if k_mode is Source.MONTE_CARLO and k_rng is None:
            raise ValueError(f"comparison with {k.label} needs Monte Carlo and therefore an RngSpec")
        other = _efficacy_core(k, m, L, k_mode, k_rng, reps, threads)
        ratio[k.label] = report.e2 / other.e2
        are[k.label] = ratio[k.label] ** 2
    return EfficacyReport(
        report.kernel_label,
        report.m,
        report.alternative,
        report.e2,
        report.mu_h,
        report.sigma2,
        report.source,
        report.heuristic,
        report.e2_std_error,
        are,
        ratio,
    )


@dataclass(frozen=True)
class EfficacyContrast:
    first: str
    second: str
    m: int
    alternative: str
    e2_first: float
    e2_second: float
    difference: float
    std_error: float
    reps: int

    @property
    def z(self) -> float:
        return self.difference / self.std_error if self.std_error > 0 else math.inf

    def to_dict(self) -> dict:
        return {
            "first": self.first,
            "second": self.second,
            "m": self.m,
            "alternative": self.alternative,
            "e2_first": self.e2_first,
            "e2_second": self.e2_second,
            "difference": self.difference,
            "std_error": self.std_error,
            "reps": self.reps,
        }


def efficacy_contrast(
    h: SymmetricKernel | ScalarKernel,
    k: SymmetricKernel | ScalarKernel,
    m: int,
    L,
    rng: RngSpec,
    reps: int = 1_000_000,
    threads: int = 1,
) -> EfficacyContrast:
    """Monte Carlo estimate of ``e2(h) - e2(k)`` with common random numbers.

    Both kernels see the same moment draws (``rng.child(0)``) and the same
    shift draws (``rng.child(1 << 32)``), exactly as :func:`efficacy` would
    use them. The standard error comes from the difference of the two
    delta-method influence values, so correlated noise cancels.
    """
    integral = integral_l_prime_sq(L)
    per_kernel = []
    for kern in (_as_pair_kernel(h), _as_pair_kernel(k)):
        moments, infl_s2 = _moments_mc_core(kern, m, reps, rng.child(0), threads, MC_BLOCK)
        shift, infl_cov = _local_shift_core(kern, m, integral, rng.child(1 << 32), reps, threads, MC_BLOCK)
        if not moments.sigma2 > 1e-12 * (1.0 + moments.theta**2):
            raise DegenerateVariance(f"null variance of {kern.label} is not positive ({moments.sigma2})")
        e2 = shift.mu_h**2 / moments.sigma2
        # influence of e2 on the moment draws and on the shift draws
        on_moments = -e2 / moments.sigma2 * infl_s2
        on_shift = (2.0 * shift.mu_h / moments.sigma2) * 0.5 * integral * infl_cov
        per_kernel.append((kern.label, e2, on_moments, on_shift))
    (lh, eh, mh, sh), (lk, ek, mk, sk) = per_kernel
    se = math.hypot(_se(mh - mk), _se(sh - sk))
    return EfficacyContrast(lh, lk, m, _alt_label(L), eh, ek, eh - ek, se, reps)


def are(e2_first: float, e2_second: float) -> float:
    return (e2_first / e2_second) ** 2


def almp_efficacy(m: int, L) -> float:
    """Largest efficacy over pair kernels: ``3m(m+1) / (2(2m+1)) * (int L'^2)**2``.

    ``L`` may be the integral itself (a float) or anything accepted by
    :func:`integral_l_prime_sq`.
    """
    if m < 1:
        raise ValueError("m must be positive")
    integral = float(L) if isinstance(L, (int, float)) else integral_l_prime_sq(L)
    return 3.0 * m * (m + 1) / (2.0 * (2 * m + 1)) * integral * integral
