"""Symmetric pair kernels ``h(x, y)`` and scalar functions ``g(x)``.

Kernels are vectorised: ``eval`` accepts scalars or numpy arrays and
broadcasts. A user kernel only has to be a pure, symmetric function of two
nonnegative arguments; its third absolute moment under the gamma-window law
must be finite for the normal limit to hold, which cannot be checked here
and remains the caller's obligation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import KernelSpecError, NonpositiveExponent

PairFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]
ScalarFunc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SymmetricKernel:
    label: str
    func: PairFunc = field(repr=False)
    # name of the closed-form moment pack in ``asymptotics``; only "gini_sq" exists
    analytic_moments: str | None = None
    # exponent when this is |x - y|**r, which enables the fast evaluators
    gini_r: float | None = None
    # twice differentiable; the local-alternative mean shift is only justified then
    smooth: bool = True

    def eval(self, x, y):
        out = self.func(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return out if np.ndim(out) else float(out)

    __call__ = eval


@dataclass(frozen=True)
class ScalarKernel:
    label: str
    func: ScalarFunc = field(repr=False)
    power: float | None = None

    def eval(self, x):
        out = self.func(np.asarray(x, dtype=float))
        return out if np.ndim(out) else float(out)

    __call__ = eval


def make_gini(r: float) -> SymmetricKernel:
    """``|x - y|**r``; the squared case carries the analytic moment pack."""
    r = float(r)
    if not r > 0:
        raise NonpositiveExponent(f"Gini exponent must be positive, got {r}")
    if r == 1.0:
        func = lambda x, y: np.abs(x - y)  # noqa: E731
    elif r == 2.0:
        func = lambda x, y: (x - y) * (x - y)  # noqa: E731
    else:
        func = lambda x, y: np.abs(x - y) ** r  # noqa: E731
    return SymmetricKernel(
        label=f"gini:r={r:g}",
        func=func,
        analytic_moments="gini_sq" if r == 2.0 else None,
        gini_r=r,
        smooth=r >= 2.0,
    )


def make_power_scalar(s: float) -> ScalarKernel:
    s = float(s)
    if not s > 0:
        raise NonpositiveExponent(f"power must be positive, got {s}")
    if s == 2.0:
        func = lambda x: x * x  # noqa: E731
    elif s == 1.0:
        func = lambda x: x * 1.0  # noqa: E731
    else:
        func = lambda x: x**s  # noqa: E731
    return ScalarKernel(label=f"pow:s={s:g}", func=func, power=s)


def symmetrize(g: ScalarKernel) -> SymmetricKernel:
    """``(g(x) + g(y)) / 2``.

    Its U-statistic equals the plain average of ``g`` over the spacings,
    which links first- and second-order statistics.
    """
    gf = g.func
    smooth = g.power is None or g.power >= 2.0 or g.power == 1.0
    return SymmetricKernel(
        label=f"sym({g.label})",
        func=lambda x, y: 0.5 * (gf(x) + gf(y)),
        smooth=smooth,
    )


def constant_kernel(c: float) -> SymmetricKernel:
    c = float(c)
    return SymmetricKernel(label=f"const:{c:g}", func=lambda x, y: np.full(np.broadcast(x, y).shape, c))


def greenwood() -> ScalarKernel:
    """``g(x) = x**2``, the overlapping Greenwood statistic."""
    g = make_power_scalar(2.0)
    return ScalarKernel(label="greenwood", func=g.func, power=2.0)


def symsq() -> SymmetricKernel:
    return SymmetricKernel(label="symsq", func=symmetrize(make_power_scalar(2.0)).func)


def parse_kernel(spec: str) -> SymmetricKernel | ScalarKernel:
    """Parse the CLI grammar ``gini:r=<float>`` | ``greenwood`` | ``symsq``.

    ``gini:<float>`` is accepted as shorthand for ``gini:r=<float>``.
    """
    text = spec.strip().lower()
    if text == "greenwood":
        return greenwood()
    if text == "symsq":
        return symsq()
    if text.startswith("gini"):
        _, _, rest = text.partition(":")
        rest = rest.strip()
        if rest.startswith("r="):
            rest = rest[2:]
        if not rest:
            raise KernelSpecError(f"missing exponent in kernel spec {spec!r}")
        try:
            r = float(rest)
        except ValueError as exc:
            raise KernelSpecError(f"bad exponent in kernel spec {spec!r}") from exc
        return make_gini(r)
    raise KernelSpecError(f"unknown kernel {spec!r}; expected gini:r=<float>, greenwood or symsq")


BUILTIN_KERNELS: dict[str, Callable[[], SymmetricKernel]] = {
    "gini:r=1": lambda: make_gini(1.0),
    "gini:r=1.5": lambda: make_gini(1.5),
    "gini:r=2": lambda: make_gini(2.0),
    "symsq": symsq,
}
