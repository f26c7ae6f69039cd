"""Samples on the unit interval and their m-spacings.

A sample of ``count`` observations corresponds to the internal parameter
``n = count + 1``: the order statistics are padded with the implicit
boundaries ``X_{0:n} = 0`` and ``X_{n:n} = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .errors import (
    AlreadyScaled,
    EmptyInput,
    NonFiniteInput,
    OrderTooLarge,
    UnsupportedFamily,
    ValueOutOfSupport,
    ValueOutOfUnitInterval,
)


class Scheme(str, Enum):
    OVERLAPPING = "overlapping"
    DISJOINT = "disjoint"


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class Sample:
    """Sorted observations strictly inside (0, 1)."""

    values: np.ndarray

    @property
    def count(self) -> int:
        return int(self.values.shape[0])

    @property
    def n(self) -> int:
        """Internal sample parameter, ``count + 1``."""
        return self.count + 1

    def __len__(self) -> int:
        return self.count


@dataclass(frozen=True)
class SpacingsVector:
    values: np.ndarray
    m: int
    scheme: Scheme
    n: int
    scaled: bool = False

    def __len__(self) -> int:
        return int(self.values.shape[0])


def from_observations(raw: Iterable[float]) -> Sample:
    """Validate and sort observations that already live on (0, 1).

    Raises
    ------
    EmptyInput
        If ``raw`` has no elements.
    ValueOutOfUnitInterval
        If any value is ``<= 0`` or ``>= 1``. The boundaries are excluded on
        purpose: data must be mapped through the null CDF first.
    """
    x = np.array(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("no observations")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("observations must be finite")
    bad = (x <= 0.0) | (x >= 1.0)
    if np.any(bad):
        first = float(x[np.argmax(bad)])
        raise ValueOutOfUnitInterval(
            f"value {first!r} is outside the open interval (0, 1); "
            "apply the probability integral transform (--null) first"
        )
    return Sample(_frozen(np.sort(x)))


@dataclass(frozen=True)
class NullDistribution:
    """A fully specified continuous null family used for the PIT."""

    family: str
    params: tuple[float, ...]

    def cdf(self, x: np.ndarray) -> np.ndarray:
        if self.family == "uniform":
            a, b = self.params
            if np.any((x < a) | (x > b)):
                raise ValueOutOfSupport(f"observation outside [{a}, {b}]")
            return (x - a) / (b - a)
        if self.family == "exponential":
            (rate,) = self.params
            if np.any(x < 0):
                raise ValueOutOfSupport("negative observation under an exponential null")
            return -np.expm1(-rate * x)
        if self.family == "normal":
            mean, sd = self.params
            return stats.norm.cdf(x, loc=mean, scale=sd)
        raise UnsupportedFamily(self.family)

    def label(self) -> str:
        return f"{self.family}:" + ",".join(repr(p) for p in self.params)


_FAMILY_ALIASES = {
    "uniform": "uniform",
    "unif": "uniform",
    "exp": "exponential",
    "exponential": "exponential",
    "normal": "normal",
    "norm": "normal",
}


def parse_null(spec: str) -> NullDistribution:
    """Parse ``uniform:a,b``, ``exp:rate`` or ``normal:mean,sd``.

    Parameters may be omitted to get the standard member of the family
    (``uniform`` is U[0,1], ``exp`` has rate 1, ``normal`` is N(0,1)).
    """
    name, _, rest = spec.partition(":")
    family = _FAMILY_ALIASES.get(name.strip().lower())
    if family is None:
        raise UnsupportedFamily(f"unsupported null family {name!r}")
    try:
        params = tuple(float(p) for p in rest.split(",")) if rest.strip() else ()
    except ValueError as exc:
        raise UnsupportedFamily(f"cannot parse parameters in {spec!r}") from exc
    defaults = {"uniform": (0.0, 1.0), "exponential": (1.0,), "normal": (0.0, 1.0)}
    if not params:
        params = defaults[family]
    if len(params) != len(defaults[family]):
        raise UnsupportedFamily(f"{family} takes {len(defaults[family])} parameter(s), got {spec!r}")
    if family == "uniform" and not params[0] < params[1]:
        raise UnsupportedFamily("uniform null needs a < b")
    if family == "exponential" and not params[0] > 0:
        raise UnsupportedFamily("exponential rate must be positive")
    if family == "normal" and not params[1] > 0:
        raise UnsupportedFamily("normal sd must be positive")
    return NullDistribution(family, params)


def pit_transform(raw: Iterable[float], null_cdf: NullDistribution | str) -> Sample:
    """Map observations through the null CDF, then validate as :func:`from_observations`."""
    if isinstance(null_cdf, str):
        null_cdf = parse_null(null_cdf)
    x = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("no observations")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("observations must be finite")
    return from_observations(null_cdf.cdf(x))


def read_observations(path: str | Path) -> list[float]:
    """Read one decimal value per line; blank lines and ``#`` comments are skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: cannot parse {text!r} as a number") from exc
    return values


def _check_order(count: int, m: int) -> int:
    n = count + 1
    if m < 1 or 2 * m > n:
        raise OrderTooLarge(f"spacing order m={m} must satisfy 1 <= m <= n/2 with n={n}")
    return n


def _padded(s: Sample) -> np.ndarray:
    return np.concatenate(([0.0], s.values, [1.0]))


def overlapping_spacings(s: Sample, m: int) -> SpacingsVector:
    """``D_j = X_{j+m-1:n} - X_{j-1:n}`` for ``j = 1..n-m+1``."""
    n = _check_order(s.count, m)
    x = _padded(s)
    return SpacingsVector(_frozen(x[m:] - x[:-m]), m, Scheme.OVERLAPPING, n)


def disjoint_spacings(s: Sample, m: int) -> SpacingsVector:
    """``D_j = X_{jm:n} - X_{(j-1)m:n}`` for ``j = 1..floor(n/m)``; the trailing remainder is dropped."""
    n = _check_order(s.count, m)
    x = _padded(s)
    k = n // m
    edges = x[: k * m + 1 : m]
    return SpacingsVector(_frozen(np.diff(edges)), m, Scheme.DISJOINT, n)


def spacings(s: Sample, m: int, scheme: Scheme | str = Scheme.OVERLAPPING) -> SpacingsVector:
    scheme = Scheme(scheme)
    if scheme is Scheme.OVERLAPPING:
        return overlapping_spacings(s, m)
    return disjoint_spacings(s, m)


def scale(v: SpacingsVector) -> SpacingsVector:
    if v.scaled:
        raise AlreadyScaled("spacings are already multiplied by n")
    return SpacingsVector(_frozen(v.values * v.n), v.m, v.scheme, v.n, scaled=True)


def scaled_spacings(s: Sample, m: int, scheme: Scheme | str = Scheme.OVERLAPPING) -> SpacingsVector:
    return scale(spacings(s, m, scheme))


def spacings_length(n: int, m: int, scheme: Scheme | str) -> int:
    return n - m + 1 if Scheme(scheme) is Scheme.OVERLAPPING else n // m


def batch_scaled_spacings(rows: np.ndarray, m: int, scheme: Scheme | str) -> np.ndarray:
    """Scaled m-spacings of many samples at once.

    ``rows`` is a ``(reps, count)`` array whose rows are already sorted and
    lie in [0, 1]. Returns a C-contiguous ``(reps, N)`` array.
    """
    rows = np.asarray(rows, dtype=float)
    reps, count = rows.shape
    n = _check_order(count, m)
    x = np.empty((reps, count + 2))
    x[:, 0] = 0.0
    x[:, -1] = 1.0
    x[:, 1:-1] = rows
    if Scheme(scheme) is Scheme.OVERLAPPING:
        d = x[:, m:] - x[:, :-m]
    else:
        k = n // m
        edges = x[:, : k * m + 1 : m]
        d = np.diff(edges, axis=1)
    return np.ascontiguousarray(d * n)


def equally_spaced_sample(count: int) -> Sample:
    """The grid ``i/n``, whose simple spacings are all equal."""
    n = count + 1
    return Sample(_frozen(np.arange(1, n, dtype=float) / n))


__all__: Sequence[str] = [
    "Scheme",
    "Sample",
    "SpacingsVector",
    "NullDistribution",
    "from_observations",
    "parse_null",
    "pit_transform",
    "read_observations",
    "overlapping_spacings",
    "disjoint_spacings",
    "spacings",
    "scale",
    "scaled_spacings",
    "spacings_length",
    "batch_scaled_spacings",
    "equally_spaced_sample",
]
