"""Monte Carlo power studies over (alternative, m, scheme, r) grids.

Critical values come from simulated null samples. Streams are keyed by
cell content so a single cell recomputed on its own reproduces the value it
had inside a full grid run:

* null sample for ``(m, r)``: namespace 1, shared by both schemes;
* alternative draws for ``(alternative, m, r)``: namespace 2, also shared by
  both schemes, so the two schemes coincide exactly at ``m = 1``.
"""

from __future__ import annotations

import csv
import json
import math
import zlib
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .inference import Tail, mc_p_values
from .kernels import make_gini
from .sampling import AlternativeModel, RngSpec, draw_rows, parse_alternative, stream_base
from .spacings import Scheme, spacings_length
from .statistics import batch_statistic

NULL_NAMESPACE = 1
ALT_NAMESPACE = 2
SMALL_N = 10

REFERENCE_GRID_M = (1, 2, 4, 5, 10)
REFERENCE_GRID_R = (1.0, 1.5, 2.0)
REFERENCE_ALTERNATIVES = ("beta:0.5,0.5", "beta:3,3", "beta:1,3")

# Reference n = 50 powers, columns (disjoint r=1, 1.5, 2, overlapping r=1, 1.5, 2).
REFERENCE_POWERS: dict[str, dict[int, tuple[float, ...]]] = {
    "beta:0.5,0.5": {
        1: (0.6148, 0.5086, 0.4277, 0.6148, 0.5086, 0.4277),
        2: (0.6701, 0.6075, 0.5192, 0.7237, 0.6671, 0.5941),
        4: (0.7073, 0.6626, 0.6162, 0.7797, 0.7313, 0.7093),
        5: (0.6349, 0.6158, 0.5575, 0.7711, 0.7483, 0.7274),
        10: (0.5652, 0.5591, 0.5483, 0.7129, 0.7013, 0.6909),
    },
    "beta:3,3": {
        1: (0.7631, 0.8553, 0.8467, 0.7631, 0.8553, 0.8467),
        2: (0.2773, 0.4677, 0.5658, 0.2906, 0.5555, 0.6759),
        4: (0.2982, 0.5016, 0.5931, 0.1434, 0.1701, 0.3229),
        5: (0.0052, 0.0078, 0.0147, 0.0792, 0.1165, 0.19),
        10: (0.0115, 0.0172, 0.0159, 0.0247, 0.0368, 0.0591),
    },
    "beta:1,3": {
        1: (0.9946, 0.9978, 0.9977, 0.9946, 0.9978, 0.9977),
        2: (0.9991, 0.9995, 0.9999, 0.8869, 0.9963, 0.9984),
        4: (0.9999, 0.9999, 0.9999, 0.6724, 0.9578, 0.9887),
        5: (0.2599, 0.3245, 0.3426, 0.6363, 0.9143, 0.9801),
        10: (0.4539, 0.4572, 0.4935, 0.4827, 0.7253, 0.9116),
    },
}


def reference_power(alternative: str, m: int, scheme: Scheme | str, r: float) -> float | None:
    row = REFERENCE_POWERS.get(alternative, {}).get(m)
    if row is None or r not in REFERENCE_GRID_R:
        return None
    offset = 0 if Scheme(scheme) is Scheme.DISJOINT else 3
    return row[offset + REFERENCE_GRID_R.index(r)]


@dataclass(frozen=True)
class PowerStudyConfig:
    n: int = 50
    alpha: float = 0.05
    reps: int = 10_000
    critical_reps: int = 100_000
    alternatives: tuple[str, ...] = REFERENCE_ALTERNATIVES
    m_values: tuple[int, ...] = REFERENCE_GRID_M
    r_values: tuple[float, ...] = REFERENCE_GRID_R
    schemes: tuple[str, ...] = ("disjoint", "overlapping")
    tail: str = Tail.UPPER.value
    seed: int = 20241014
    threads: int = 1

    def __post_init__(self) -> None:
        if self.reps < 1 or self.critical_reps < 1:
            raise ValueError("replication counts must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        Tail(self.tail)
        for s in self.schemes:
            Scheme(s)
        for a in self.alternatives:
            parse_alternative(a)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PowerRecord:
    alternative: str
    a: float | None
    b: float | None
    n: int
    m: int
    scheme: str
    r: float
    power: float
    std_error: float
    tail: str
    critical_method: str
    seed: int
    spacings: int
    small_n: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PowerTable:
    alternative: str
    rows: list[PowerRecord] = field(default_factory=list)
    config: PowerStudyConfig | None = None

    def cell(self, m: int, scheme: str, r: float) -> PowerRecord:
        for row in self.rows:
            if row.m == m and row.scheme == Scheme(scheme).value and row.r == r:
                return row
        raise KeyError((m, scheme, r))


def _alt_key(label: str) -> int:
    return zlib.crc32(label.encode()) & 0xFF


def _r_key(r: float) -> int:
    return int(round(r * 1000)) & 0xFFFF


def null_stream(seed: int, m: int, r: float) -> RngSpec:
    return RngSpec(seed, stream_base(NULL_NAMESPACE, m, 0, _r_key(r)))


def alternative_stream(seed: int, alternative: str, m: int, r: float) -> RngSpec:
    return RngSpec(seed, stream_base(ALT_NAMESPACE, _alt_key(alternative), m, _r_key(r)))


def _record(config, model: AlternativeModel, m, scheme, r, rejections: np.ndarray) -> PowerRecord:
    power = float(rejections.mean())
    size = spacings_length(config.n, m, scheme)
    return PowerRecord(
        alternative=model.label,
        a=model.a,
        b=model.b,
        n=config.n,
        m=m,
        scheme=Scheme(scheme).value,
        r=float(r),
        power=power,
        std_error=math.sqrt(power * (1.0 - power) / rejections.size),
        tail=Tail(config.tail).value,
        critical_method="monte_carlo",
        seed=config.seed,
        spacings=size,
        small_n=size <= SMALL_N,
    )


def null_statistics(config: PowerStudyConfig, m: int, r: float, schemes: Sequence[str]) -> dict[str, np.ndarray]:
    rows = draw_rows(
        AlternativeModel("uniform"), config.n - 1, config.critical_reps, null_stream(config.seed, m, r), config.threads
    )
    kernel = make_gini(r)
    return {Scheme(s).value: np.sort(batch_statistic(rows, m, s, kernel)) for s in schemes}


def _cell_rows(config, model: AlternativeModel, m: int, r: float) -> np.ndarray:
    return draw_rows(model, config.n - 1, config.reps, alternative_stream(config.seed, model.label, m, r), config.threads)


def estimate_power(
    config: PowerStudyConfig,
    alternative: str,
    m: int,
    scheme: str,
    r: float,
    null_sorted: np.ndarray | None = None,
) -> PowerRecord:
    """Rejection rate of the Gini(r) test for one cell of the grid."""
    model = parse_alternative(alternative)
    if null_sorted is None:
        null_sorted = null_statistics(config, m, r, [scheme])[Scheme(scheme).value]
    values = batch_statistic(_cell_rows(config, model, m, r), m, scheme, make_gini(r))
    reject = mc_p_values(values, null_sorted, config.tail) < config.alpha
    return _record(config, model, m, scheme, r, reject)


def run_study(config: PowerStudyConfig) -> list[PowerTable]:
    """One :class:`PowerTable` per alternative, in configuration order."""
    return run_study_tails(config, [config.tail])[Tail(config.tail).value]


def run_study_tails(config: PowerStudyConfig, tails: Sequence[str]) -> dict[str, list[PowerTable]]:
    """Score the same simulated statistics under several tail conventions.

    Only the p-value computation differs between tails, so this costs about
    as much as a single :func:`run_study`.
    """
    models = [parse_alternative(a) for a in config.alternatives]
    configs = {Tail(t).value: with_overrides(config, tail=Tail(t).value) for t in tails}
    tables = {t: {mod.label: PowerTable(mod.label, config=c) for mod in models} for t, c in configs.items()}
    for m in config.m_values:
        for r in config.r_values:
            nulls = null_statistics(config, m, r, config.schemes)
            kernel = make_gini(r)
            for model in models:
                rows = _cell_rows(config, model, m, r)
                for scheme in config.schemes:
                    values = batch_statistic(rows, m, scheme, kernel)
                    for t, c in configs.items():
                        reject = mc_p_values(values, nulls[Scheme(scheme).value], t) < config.alpha
                        tables[t][model.label].rows.append(_record(c, model, m, scheme, r, reject))
    order = {s: i for i, s in enumerate(Scheme(s).value for s in config.schemes)}
    key = lambda rec: (config.m_values.index(rec.m), order[rec.scheme], config.r_values.index(rec.r))  # noqa: E731
    out = {}
    for t, by_alt in tables.items():
        for tab in by_alt.values():
            tab.rows.sort(key=key)
        out[t] = list(by_alt.values())
    return out


def reference_grid_config(
    reps: int = 10_000,
    critical_reps: int = 100_000,
    seed: int = 20241014,
    tail: str = Tail.UPPER.value,
    threads: int = 1,
    include_size_row: bool = False,
) -> PowerStudyConfig:
    """The three Beta grids at n = 50 (internal n, i.e. 49 observations).

    With ``include_size_row`` a uniform "alternative" is appended as a fourth
    table for size checks.
    """
    alternatives = REFERENCE_ALTERNATIVES + (("uniform",) if include_size_row else ())
    return PowerStudyConfig(
        n=50,
        alpha=0.05,
        reps=reps,
        critical_reps=critical_reps,
        alternatives=alternatives,
        tail=tail,
        seed=seed,
        threads=threads,
    )


def reproduce_reference_tables(
    reps: int = 10_000,
    critical_reps: int = 100_000,
    seed: int = 20241014,
    tail: str = Tail.UPPER.value,
    threads: int = 1,
    include_size_row: bool = False,
) -> list[PowerTable]:
    return run_study(reference_grid_config(reps, critical_reps, seed, tail, threads, include_size_row))


@dataclass(frozen=True)
class Discrepancy:
    alternative: str
    m: int
    scheme: str
    r: float
    ours: float
    reference: float
    within: bool

    @property
    def difference(self) -> float:
        return self.ours - self.reference


def compare_with_reference(
    tables: Iterable[PowerTable], tolerance: float = 0.05, schemes: Sequence[str] = ("overlapping",)
) -> list[Discrepancy]:
    wanted = {Scheme(s).value for s in schemes}
    out = []
    for t in tables:
        for row in t.rows:
            if row.scheme not in wanted:
                continue
            ref = reference_power(t.alternative, row.m, row.scheme, row.r)
            if ref is None:
                continue
            out.append(
                Discrepancy(t.alternative, row.m, row.scheme, row.r, row.power, ref, abs(row.power - ref) <= tolerance)
            )
    return out


def study_metadata(config: PowerStudyConfig) -> dict:
    return {
        "n_convention": f"internal n = observations + 1; each sample has {config.n - 1} observations",
        "tail": Tail(config.tail).value,
        "critical_method": "monte_carlo",
        "critical_reps": config.critical_reps,
        "p_value": "(1 + #null beyond) / (critical_reps + 1); reject when p < alpha",
        "disjoint_indexing": "D_j = X_{jm} - X_{(j-1)m}, j = 1..floor(n/m); remainder dropped",
        "seeding": (
            "Philox keyed by (seed, stream); null samples keyed by (m, r), alternative draws by "
            "(alternative, m, r); replication i uses stream base + i; schemes share streams"
        ),
        "small_n_threshold": SMALL_N,
    }


CSV_FIELDS = ("alternative", "a", "b", "n", "m", "scheme", "r", "power", "std_error", "tail", "critical_method", "seed")


def write_csv(tables: Iterable[PowerTable], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for t in tables:
            for row in t.rows:
                d = row.to_dict()
                writer.writerow(["" if d[k] is None else d[k] for k in CSV_FIELDS])


def tables_document(tables: Sequence[PowerTable], config: PowerStudyConfig) -> dict:
    return {
        "config": config.to_dict(),
        "metadata": study_metadata(config),
        "tables": [{"alternative": t.alternative, "rows": [r.to_dict() for r in t.rows]} for t in tables],
    }


def write_json(tables: Sequence[PowerTable], config: PowerStudyConfig, path: str | Path, extra: dict | None = None) -> None:
    doc = tables_document(tables, config)
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def format_table(table: PowerTable) -> str:
    """Plain-text grid: rows m, columns scheme x r."""
    config = table.config or PowerStudyConfig()
    schemes = [Scheme(s).value for s in config.schemes]
    header = ["m"] + [f"{s[:4]} r={r:g}" for s in schemes for r in config.r_values]
    lines = [f"Empirical powers, {table.alternative}, n={config.n}, tail={config.tail}", "  ".join(f"{h:>12}" for h in header)]
    for m in config.m_values:
        cells = [f"{m:>12}"]
        for s in schemes:
            for r in config.r_values:
                try:
                    cells.append(f"{table.cell(m, s, r).power:>12.4f}")
                except KeyError:
                    cells.append(f"{'':>12}")
        lines.append("  ".join(cells))
    return "\n".join(lines)


def with_overrides(config: PowerStudyConfig, **changes) -> PowerStudyConfig:
    return replace(config, **{k: v for k, v in changes.items() if v is not None})
