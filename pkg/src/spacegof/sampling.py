"""Reproducible random generation.

Every random quantity is a pure function of its parameters and an
:class:`RngSpec`. A spec maps to a Philox counter-based generator keyed by
``(master_seed, stream_id)``, so any replication of any Monte Carlo loop can
be regenerated on its own: replication ``i`` of a loop with base spec
``s`` draws from ``s.child(i)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import AlternativeSpecError, NonmonotoneAlternative, NonpositiveShape
from .spacings import Sample

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.master_seed <= _U64 and 0 <= self.stream_id <= _U64):
            raise ValueError("seed and stream id must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, offset: int) -> "RngSpec":
        return RngSpec(self.master_seed, (self.stream_id + offset) & _U64)

    def to_dict(self) -> dict:
        return {"master_seed": self.master_seed, "stream_id": self.stream_id}


def stream_base(namespace: int, *keys: int) -> int:
    """Pack up to three small keys above a 24-bit replication counter.

    Layout (high to low bits): namespace 8 | key0 8 | key1 8 | key2 16 | replication 24.
    """
    widths = (8, 8, 16)
    value = namespace & 0xFF
    for width, key in zip(widths, list(keys) + [0] * (3 - len(keys))):
        if not 0 <= key < (1 << width):
            raise ValueError(f"stream key {key} does not fit in {width} bits")
        value = (value << width) | key
    return value << 24


def open_uniform(gen: np.random.Generator, size) -> np.ndarray:
    """Uniforms strictly inside (0, 1): midpoints of a 2**52 grid."""
    return (gen.integers(0, 1 << 52, size=size, dtype=np.int64) + 0.5) * 2.0**-52


def _as_sample(x: np.ndarray) -> Sample:
    x = np.sort(np.clip(x, np.finfo(float).tiny, np.nextafter(1.0, 0.0)))
    x.setflags(write=False)
    return Sample(x)


def sample_uniform(count: int, rng: RngSpec) -> Sample:
    if count < 1:
        raise ValueError("count must be at least 1")
    return _as_sample(open_uniform(rng.generator(), count))


def _check_shapes(a: float, b: float) -> None:
    if not (a > 0 and b > 0):
        raise NonpositiveShape(f"Beta shapes must be positive, got ({a}, {b})")


def beta_quantile(a: float, b: float, u: np.ndarray) -> np.ndarray:
    return special.betaincinv(a, b, u)


def sample_beta(a: float, b: float, count: int, rng: RngSpec) -> Sample:
    """Beta(a, b) by inverting the regularised incomplete beta function.

    One uniform is consumed per variate, so streams stay aligned across
    parameter choices.
    """
    _check_shapes(a, b)
    if count < 1:
        raise ValueError("count must be at least 1")
    return _as_sample(beta_quantile(a, b, open_uniform(rng.generator(), count)))


@dataclass(frozen=True)
class LocalAlternative:
    """``F_n(x) = x + L(x) / n**0.25`` on [0, 1] with ``L(0) = L(1) = 0``."""

    L: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    dL: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    n: int
    label: str
    # closed form of the integral of L'(u)**2, when known
    lprime_sq: float | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        grid = np.linspace(0.0, 1.0, 10_001)
        slope = 1.0 + self.dL(grid) / self.scale
        if not np.all(slope > 0):
            raise NonmonotoneAlternative(
                f"F_n is not strictly increasing for L={self.label} at n={self.n}"
            )

    @property
    def scale(self) -> float:
        return self.n**0.25

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return x + self.L(x) / self.scale

    def quantile(self, u, tol: float = 1e-12, max_iter: int = 200) -> np.ndarray:
        """Invert ``F_n`` by Newton steps kept inside a shrinking bisection bracket."""
        u = np.asarray(u, dtype=float)
        c = self.scale
        x = u.copy()
        lo = np.zeros_like(u)
        hi = np.ones_like(u)
        active = (u > 0.0) & (u < 1.0)
        for _ in range(max_iter):
            if not active.any():
                break
            xa = x[active]
            f = xa + self.L(xa) / c - u[active]
            below = f < 0
            lo_a = np.where(below, xa, lo[active])
            hi_a = np.where(below, hi[active], xa)
            step = xa - f / (1.0 + self.dL(xa) / c)
            bad = ~((step > lo_a) & (step < hi_a))
            step = np.where(bad, 0.5 * (lo_a + hi_a), step)
            done = (np.abs(step - xa) <= tol) | (f == 0.0) | (hi_a - lo_a <= tol)
            x[active] = np.where(f == 0.0, xa, step)
            lo[active] = lo_a
            hi[active] = hi_a
            idx = np.flatnonzero(active)
            active[idx[done]] = False
        return x


def _sine_L(x):
    return np.sin(2.0 * np.pi * x) / (2.0 * np.pi)


def _sine_dL(x):
    return np.cos(2.0 * np.pi * x)


def _bump_L(x):
    return x * (1.0 - x)


def _bump_dL(x):
    return 1.0 - 2.0 * x


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


LOCAL_SHAPES: dict[str, tuple[Callable, Callable, float]] = {
    "sine": (_sine_L, _sine_dL, 0.5),
    "bump": (_bump_L, _bump_dL, 1.0 / 3.0),
    "zero": (_zero, _zero, 0.0),
}


def local_alternative(name: str, n: int) -> LocalAlternative:
    try:
        L, dL, integral = LOCAL_SHAPES[name]
    except KeyError:
        raise AlternativeSpecError(f"unknown local alternative {name!r}; choose from {sorted(LOCAL_SHAPES)}")
    return LocalAlternative(L=L, dL=dL, n=n, label=name, lprime_sq=integral)


def sample_local_alternative(alt: LocalAlternative, count: int, rng: RngSpec) -> Sample:
    if count < 1:
        raise ValueError("count must be at least 1")
    return _as_sample(alt.quantile(open_uniform(rng.generator(), count)))


@dataclass(frozen=True)
class GammaWindowSequence:
    """Overlapping sums of ``m`` consecutive standard exponentials."""

    windows: np.ndarray
    m: int

    def __len__(self) -> int:
        return int(self.windows.shape[0])


def window_sums(z: np.ndarray, m: int) -> np.ndarray:
    """Overlapping m-sums along the last axis: ``out[..., j] = z[..., j:j+m].sum()``."""
    return np.lib.stride_tricks.sliding_window_view(z, m, axis=-1).sum(axis=-1)


def gamma_windows(m: int, length: int, rng: RngSpec) -> GammaWindowSequence:
    if m < 1 or length < 1:
        raise ValueError("m and length must be positive")
    z = rng.generator().standard_exponential(length + m - 1)
    out = window_sums(z, m)
    out.setflags(write=False)
    return GammaWindowSequence(out, m)


# ---------------------------------------------------------------------------
# alternative models used by the CLI and the power harness


@dataclass(frozen=True)
class AlternativeModel:
    """A sampling model: uniform, Beta(a, b) or a named local alternative."""

    kind: str
    a: float | None = None
    b: float | None = None
    shape: str | None = None

    @property
    def label(self) -> str:
        if self.kind == "beta":
            return f"beta:{self.a:g},{self.b:g}"
        if self.kind == "local":
            return f"local:{self.shape}"
        return "uniform"

    def draw(self, count: int, gen: np.random.Generator) -> np.ndarray:
        """``count`` unsorted variates from one generator."""
        u = open_uniform(gen, count)
        if self.kind == "uniform":
            return u
        if self.kind == "beta":
            return beta_quantile(self.a, self.b, u)
        return local_alternative(self.shape, count + 1).quantile(u)


def parse_alternative(spec: str) -> AlternativeModel:
    """Parse ``uniform`` | ``beta:<a>,<b>`` | ``local:<sine|bump>``."""
    text = spec.strip().lower()
    if text in ("uniform", "null"):
        return AlternativeModel("uniform")
    kind, _, rest = text.partition(":")
    if kind == "beta":
        try:
            a, b = (float(p) for p in rest.split(","))
        except ValueError as exc:
            raise AlternativeSpecError(f"expected beta:<a>,<b>, got {spec!r}") from exc
        _check_shapes(a, b)
        return AlternativeModel("beta", a, b)
    if kind == "local":
        if rest not in LOCAL_SHAPES or rest == "zero":
            raise AlternativeSpecError(f"expected local:sine or local:bump, got {spec!r}")
        return AlternativeModel("local", shape=rest)
    raise AlternativeSpecError(f"unknown alternative {spec!r}")


def _draw_block(model: AlternativeModel, count: int, base: RngSpec, start: int, stop: int) -> np.ndarray:
    out = np.empty((stop - start, count))
    local = local_alternative(model.shape, count + 1) if model.kind == "local" else None
    for row, i in enumerate(range(start, stop)):
        gen = base.child(i).generator()
        if local is not None:
            out[row] = local.quantile(open_uniform(gen, count))
        else:
            out[row] = model.draw(count, gen)
    out.sort(axis=1)
    return out


def draw_rows(
    model: AlternativeModel,
    count: int,
    reps: int,
    base: RngSpec,
    threads: int = 1,
    block: int = 2048,
) -> np.ndarray:
    """``(reps, count)`` sorted samples; row ``i`` is drawn from ``base.child(i)``.

    Output does not depend on ``threads`` or ``block``.
    """
    bounds = [(s, min(reps, s + block)) for s in range(0, reps, block)]
    task = lambda se: _draw_block(model, count, base, *se)  # noqa: E731
    parts = map_ordered(task, bounds, threads)
    return np.concatenate(parts, axis=0) if parts else np.empty((0, count))


def map_ordered(func: Callable, items: Sequence, threads: int = 1) -> list:
    """``[func(x) for x in items]``, optionally on a thread pool; order is preserved."""
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
