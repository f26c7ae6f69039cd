"""Command-line interface: ``spacegof <subcommand> [flags]``.

Subcommands: test, critical, moments, efficacy, power, tables. Any flag can
also be given in a JSON file passed with ``--config``; keys are the long
flag names (dashes or underscores), and flags on the command line win.

Exit codes: 0 success, 1 usage or input error, 2 rejection when
``--exit-on-reject`` is set.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .asymptotics import Source, efficacy, moments_analytic, moments_mc
from .errors import SpacingsError
from .inference import Tail, asymptotic_test, mc_critical, mc_test
from .kernels import ScalarKernel, parse_kernel, symmetrize
from .powerlab import (
    PowerStudyConfig,
    compare_with_reference,
    format_table,
    reproduce_reference_tables,
    run_study,
    write_csv,
    write_json,
)
from .sampling import RngSpec, stream_base
from .spacings import Scheme, from_observations, pit_transform, read_observations, scaled_spacings
from .statistics import evaluate

DEFAULT_SEED = 20241014
MOMENTS_NAMESPACE = 3
CRITICAL_NAMESPACE = 4
EFFICACY_NAMESPACE = 5


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(t) for t in str(text).split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in str(text).split(",") if t.strip()]


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"func", "config"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    return out


def _moment_kernel(kernel):
    return symmetrize(kernel) if isinstance(kernel, ScalarKernel) else kernel


def _moments(kernel, m: int, mode: str, reps: int, seed: int, threads: int):
    pair = _moment_kernel(kernel)
    if mode == "analytic":
        return moments_analytic(pair, m)
    return moments_mc(pair, m, reps, RngSpec(seed, stream_base(MOMENTS_NAMESPACE, 0, 0, m & 0xFFFF)), threads=threads)


def cmd_test(args: argparse.Namespace) -> int:
    raw = read_observations(args.input)
    sample = pit_transform(raw, args.null) if args.null else from_observations(raw)
    kernel = parse_kernel(args.kernel)
    stat = evaluate(scaled_spacings(sample, args.m, args.scheme), kernel)
    if args.method == "asymptotic":
        pair = _moment_kernel(kernel)
        mode = "analytic" if pair.analytic_moments else "monte_carlo"
        moments = _moments(kernel, args.m, mode, args.moment_reps, args.seed, args.threads)
        result = asymptotic_test(stat, moments, args.tail, args.alpha)
    else:
        probs = sorted({args.alpha / 2, args.alpha, 1 - args.alpha, 1 - args.alpha / 2})
        table = mc_critical(
            sample.n, args.m, args.scheme, kernel, probs, args.reps,
            RngSpec(args.seed, stream_base(CRITICAL_NAMESPACE)), threads=args.threads,
        )
        result = mc_test(stat, table, args.tail, args.alpha)
    doc = result.to_dict()
    doc["metadata"].update(
        {"observations_read": sample.count, "internal_n": sample.n, "seed": args.seed, "null": args.null}
    )
    doc["config"] = _config_echo(args)
    _emit(doc)
    return 2 if (args.exit_on_reject and result.reject) else 0


def cmd_critical(args: argparse.Namespace) -> int:
    kernel = parse_kernel(args.kernel)
    if args.probs:
        probs = _floats(args.probs)
    else:
        probs = sorted({p for a in _floats(args.alpha) for p in (a / 2, a, 1 - a, 1 - a / 2)})
    table = mc_critical(
        args.n, args.m, args.scheme, kernel, probs, args.reps,
        RngSpec(args.seed, stream_base(CRITICAL_NAMESPACE)), threads=args.threads,
    )
    doc = table.to_dict()
    doc["config"] = _config_echo(args)
    _emit(doc)
    return 0


def cmd_moments(args: argparse.Namespace) -> int:
    kernel = parse_kernel(args.kernel)
    moments = _moments(kernel, args.m, args.mode, args.reps, args.seed, args.threads)
    doc = moments.to_dict()
    doc["config"] = _config_echo(args)
    _emit(doc)
    return 0


def cmd_efficacy(args: argparse.Namespace) -> int:
    kernel = _moment_kernel(parse_kernel(args.kernel))
    compare = [_moment_kernel(parse_kernel(k)) for k in args.compare.split(",") if k.strip()] if args.compare else []
    mode = Source.ANALYTIC if args.mode == "analytic" else Source.MONTE_CARLO
    rng = RngSpec(args.seed, stream_base(EFFICACY_NAMESPACE, 0, 0, args.m & 0xFFFF))
    report = efficacy(kernel, args.m, args.L, mode, rng, args.reps, compare, threads=args.threads)
    doc = report.to_dict()
    doc["config"] = _config_echo(args)
    _emit(doc)
    return 0


def _write_study(tables, config: PowerStudyConfig, out: Path, stem: str, extra: dict | None = None) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_csv(tables, out / f"{stem}.csv")
    write_json(tables, config, out / f"{stem}.json", extra)


def cmd_power(args: argparse.Namespace) -> int:
    config = PowerStudyConfig(
        n=args.n,
        alpha=args.alpha,
        reps=args.reps,
        critical_reps=args.critical_reps,
        alternatives=tuple(args.alt or ("beta:0.5,0.5",)),
        m_values=tuple(_ints(args.m)),
        r_values=tuple(_floats(args.r)),
        schemes=tuple(s.strip() for s in args.scheme.split(",")),
        tail=args.tail,
        seed=args.seed,
        threads=args.threads,
    )
    for m in config.m_values:
        if 2 * m > config.n:
            raise UsageError(f"m={m} exceeds n/2 for n={config.n}")
    tables = run_study(config)
    _write_study(tables, config, Path(args.out), "power", {"cli": _config_echo(args)})
    print("\n\n".join(format_table(t) for t in tables))
    return 0


def cmd_tables(args: argparse.Namespace) -> int:
    tables = reproduce_reference_tables(args.reps, args.critical_reps, args.seed, args.tail, args.threads)
    config = tables[0].config
    comparison = compare_with_reference(tables, args.tolerance)
    within = sum(d.within for d in comparison)
    summary = {
        "tolerance": args.tolerance,
        "overlapping_cells": len(comparison),
        "within_tolerance": within,
        "fraction_within": within / len(comparison),
        "outside_tolerance": [
            {"alternative": d.alternative, "m": d.m, "r": d.r, "ours": d.ours, "reference": d.reference}
            for d in comparison
            if not d.within
        ],
    }
    _write_study(tables, config, Path(args.out), "tables", {"cli": _config_echo(args), "comparison": summary})
    print("\n\n".join(format_table(t) for t in tables))
    print(f"\noverlapping cells within +/-{args.tolerance}: {within}/{len(comparison)}")
    for d in comparison:
        if not d.within:
            print(f"  {d.alternative} m={d.m} r={d.r:g}: ours {d.ours:.4f} vs reference {d.reference:.4f}")
    return 0


def _add_common(p: argparse.ArgumentParser, seed: bool = True) -> None:
    if seed:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed (unsigned 64-bit)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo loops")
    p.add_argument("--config", type=Path, default=None, help="JSON file whose keys mirror the long flags")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="spacegof", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}
    schemes = [s.value for s in Scheme]
    tails = [t.value for t in Tail]

    p = sub.add_parser("test", help="test a data file for uniformity (after an optional PIT)")
    p.add_argument("input", type=Path, help="text file, one observation per line")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--scheme", choices=schemes, default="overlapping")
    p.add_argument("--kernel", default="gini:r=2", help="gini:r=<float> | greenwood | symsq")
    p.add_argument("--method", choices=["asymptotic", "mc"], default="mc")
    p.add_argument("--tail", choices=tails, default="two_sided")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--null", default=None, help="uniform:a,b | exp:rate | normal:mean,sd")
    p.add_argument("--reps", type=int, default=10_000, help="null replications for --method mc")
    p.add_argument("--moment-reps", type=int, default=200_000, help="Monte Carlo reps for non-analytic moments")
    p.add_argument("--exit-on-reject", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_test)
    subs["test"] = p

    p = sub.add_parser("critical", help="simulate null critical values")
    p.add_argument("--n", type=int, required=True, help="internal n (observations + 1)")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--scheme", choices=schemes, default="overlapping")
    p.add_argument("--kernel", default="gini:r=2")
    p.add_argument("--alpha", default="0.05", help="comma-separated significance levels")
    p.add_argument("--probs", default=None, help="explicit comma-separated probabilities")
    p.add_argument("--reps", type=int, default=10_000)
    _add_common(p)
    p.set_defaults(func=cmd_critical)
    subs["critical"] = p

    p = sub.add_parser("moments", help="null asymptotic moments theta, A, B, sigma2")
    p.add_argument("--kernel", default="gini:r=2")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--mode", choices=["analytic", "mc"], default="analytic")
    p.add_argument("--reps", type=int, default=1_000_000)
    _add_common(p)
    p.set_defaults(func=cmd_moments)
    subs["moments"] = p

    p = sub.add_parser("efficacy", help="efficacy and ARE under local alternatives")
    p.add_argument("--kernel", default="gini:r=2")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--L", choices=["sine", "bump"], default="sine")
    p.add_argument("--mode", choices=["analytic", "mc"], default="analytic")
    p.add_argument("--reps", type=int, default=1_000_000)
    p.add_argument("--compare", default=None, help="comma-separated kernels for ARE")
    _add_common(p)
    p.set_defaults(func=cmd_efficacy)
    subs["efficacy"] = p

    p = sub.add_parser("power", help="Monte Carlo power study over a custom grid")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--critical-reps", type=int, default=100_000)
    p.add_argument("--alt", action="append", help="uniform | beta:<a>,<b> | local:<sine|bump>; repeatable")
    p.add_argument("--m", default="1,2,4,5,10")
    p.add_argument("--r", default="1,1.5,2")
    p.add_argument("--scheme", default="disjoint,overlapping")
    p.add_argument("--tail", choices=tails, default="upper")
    p.add_argument("--out", default="power_out")
    _add_common(p)
    p.set_defaults(func=cmd_power)
    subs["power"] = p

    p = sub.add_parser("tables", help="regenerate the three n=50 Beta power tables")
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--critical-reps", type=int, default=100_000)
    p.add_argument("--tail", choices=tails, default="upper")
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--out", default="tables_out")
    _add_common(p)
    p.set_defaults(func=cmd_tables)
    subs["tables"] = p

    return parser, subs


def _config_path(argv: Sequence[str]) -> tuple[str | None, str | None]:
    """Subcommand name and ``--config`` value, found without a full parse."""
    command = next((a for a in argv if not a.startswith("-")), None)
    path = None
    for k, arg in enumerate(argv):
        if arg == "--config" and k + 1 < len(argv):
            path = argv[k + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    return command, path


def _apply_config_file(argv: Sequence[str], parser, subs) -> argparse.Namespace:
    command, path = _config_path(argv)
    if path is not None and command in subs:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        sp = subs[command]
        known = {a.dest for a in sp._actions}
        defaults = {}
        for key, value in data.items():
            dest = key.lstrip("-").replace("-", "_")
            if dest not in known or dest in ("config", "help"):
                raise UsageError(f"unknown config key {key!r} for '{command}'")
            defaults[dest] = value
        sp.set_defaults(**defaults)
        # options marked required may now come from the file
        for action in sp._actions:
            if action.dest in defaults:
                action.required = False
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    parser, subs = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config_file(argv, parser, subs)
        return int(args.func(args))
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for rejections here
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    except (UsageError, SpacingsError, OSError, ValueError) as exc:
        print(f"spacegof: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
