"""Command-line front end: configure runs, execute sweeps, emit results.

Subcommands: ``sweep`` (one row per scattering rate), ``single`` (one
row), ``enumerate-faults`` (exhaustive single-fault audit), ``fit``
(log-log exponents from a previous output file).  Flags can also be
given in a flat ``key=value`` config file; flags win on conflict.
Output is CSV or json-lines with a fixed column order and full-precision
deterministic number formatting, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .experiment import (
    CSV_FIELDS,
    SweepRecord,
    build_grid,
    fit_exponent,
    sweep,
)
from .faults import enumerate_single_faults
from .simulator import Architecture, LeakageModel

_INT_FIELDS = {"d", "rounds", "trials", "failures_x", "failures_z",
               "failures", "seed"}
_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def _parse_bool(raw: str) -> bool:
    word = raw.strip().lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_ps_list(raw: str) -> list[float]:
    values = [float(part) for part in raw.split(",") if part.strip()]
    if not values:
        raise ValueError(f"no scattering rates in {raw!r}")
    return values


def _read_config(path: str) -> dict[str, str]:
    """Flat key=value file; blank lines and #-comments are skipped."""
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            key, sep, value = text.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value, "
                                 f"got {text!r}")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


class _Options:
    """Merged view of flags and config-file values (flags win)."""

    def __init__(self, parser: argparse.ArgumentParser,
                 args: argparse.Namespace):
        self._parser = parser
        self._args = args
        self._file: dict[str, str] = {}
        if getattr(args, "config", None):
            try:
                self._file = _read_config(args.config)
            except OSError as exc:
                parser.error(f"cannot read config {args.config}: {exc}")
            except ValueError as exc:
                parser.error(str(exc))

    def get(self, name: str, cast, default=None):
        flag = getattr(self._args, name, None)
        if flag is not None:
            return flag
        if name in self._file:
            raw = self._file[name]
            try:
                return cast(raw)
            except ValueError:
                self._parser.error(f"invalid value for {name}: {raw!r}")
        return default

    def require(self, name: str, cast):
        value = self.get(name, cast)
        if value is None:
            self._parser.error(f"--{name.replace('_', '-')} is required")
        return value


def _check_distance(parser: argparse.ArgumentParser, d: int) -> int:
    if d < 3 or d % 2 == 0:
        parser.error(f"--d must be an odd integer >= 3, got {d}")
    return d


def _resolve_threads(opts: _Options):
    """Worker count passed on to the experiment layer.

    The environment variable takes precedence over the flag, so a
    scheduler can pin concurrency without editing run scripts.
    """
    if os.environ.get("LEAKSIM_THREADS"):
        return None
    return opts.get("threads", int)


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit(records, fmt: str, path: str | None) -> None:
    """Stream records to ``path`` (or stdout) in the requested format."""
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        if fmt == "csv":
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(CSV_FIELDS)
            for record in records:
                writer.writerow(_format_value(getattr(record, field))
                                for field in CSV_FIELDS)
                out.flush()
        else:
            for record in records:
                row = {field: getattr(record, field) for field in CSV_FIELDS}
                out.write(json.dumps(row) + "\n")
                out.flush()
    finally:
        if path:
            out.close()


def _typed(field: str, value):
    if value is None or value == "":
        return None if field == "sigma_uG" else value
    if field in _INT_FIELDS:
        return int(value)
    if field in ("arch", "model"):
        return str(value)
    return float(value)


def read_records(path: str) -> list[SweepRecord]:
    """Parse a CSV or json-lines output file back into records."""
    records = []
    with open(path, newline="") as fh:
        first = fh.read(1)
        fh.seek(0)
        if first == "{":
            rows = (json.loads(line) for line in fh if line.strip())
            for row in rows:
                records.append(SweepRecord(
                    **{f: _typed(f, row[f]) for f in CSV_FIELDS}))
        else:
            reader = csv.DictReader(fh)
            missing = set(CSV_FIELDS) - set(reader.fieldnames or ())
            if missing:
                raise ValueError(
                    f"{path}: missing columns {sorted(missing)}")
            for row in reader:
                records.append(SweepRecord(
                    **{f: _typed(f, row[f]) for f in CSV_FIELDS}))
    return records


def _grid_from_options(parser, opts, ps_values):
    arch = opts.require("arch", str)
    model = opts.require("model", str)
    try:
        arch = Architecture.from_token(arch)
        model = LeakageModel.from_token(model)
    except ValueError as exc:
        parser.error(str(exc))
    d = _check_distance(parser, opts.require("d", int))
    trials = opts.require("trials", int)
    if trials < 1:
        parser.error(f"--trials must be >= 1, got {trials}")
    seed = opts.require("seed", int)
    try:
        return build_grid(
            arch, model, d, ps_values, trials, seed,
            p_M=opts.get("pm", float),
            sigma_uG=opts.get("sigma", float),
            rounds=opts.get("rounds", int),
            leaked_meas_random=bool(
                opts.get("leaked_meas_random", _parse_bool, False)),
        )
    except ValueError as exc:
        parser.error(str(exc))


def _run_grid(parser, args, ps_values) -> int:
    opts = _Options(parser, args)
    configs = _grid_from_options(parser, opts, ps_values)
    fmt = opts.get("format", str, "csv")
    if fmt not in ("csv", "json-lines"):
        parser.error(f"--format must be csv or json-lines, got {fmt!r}")
    records = sweep(configs, backend=opts.get("backend", str, "auto"),
                    threads=_resolve_threads(opts))
    path = opts.get("out", str)
    try:
        _emit(records, fmt, path)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_sweep(parser, args) -> int:
    opts = _Options(parser, args)
    return _run_grid(parser, args, opts.require("ps", _parse_ps_list))


def _cmd_single(parser, args) -> int:
    opts = _Options(parser, args)
    ps_values = opts.require("ps", _parse_ps_list)
    if len(ps_values) != 1:
        parser.error(f"single takes exactly one --ps value, "
                     f"got {len(ps_values)}")
    return _run_grid(parser, args, ps_values)


def _cmd_enumerate(parser, args) -> int:
    opts = _Options(parser, args)
    archs = opts.get("arch", str, "mixed").split(",")
    models = opts.get("model", str, "ms").split(",")
    d = _check_distance(parser, opts.get("d", int, 3))
    rounds = opts.get("rounds", int)
    stop = bool(opts.get("stop_on_first", _parse_bool, False))
    try:
        combos = [(Architecture.from_token(a.strip()),
                   LeakageModel.from_token(m.strip()))
                  for a in archs for m in models]
    except ValueError as exc:
        parser.error(str(exc))
    for arch, model in combos:
        result = enumerate_single_faults(arch, model, d, rounds=rounds,
                                         stop_on_first=stop)
        print(result.summary())
    return 0


def _cmd_fit(parser, args) -> int:
    records = []
    for path in args.inputs:
        records.extend(read_records(path))
    groups: dict[tuple, list[SweepRecord]] = {}
    for record in records:
        key = (record.arch, record.model, record.d, record.sigma_uG)
        groups.setdefault(key, []).append(record)
    for (arch, model, d, sigma), rows in groups.items():
        label = f"{arch}/{model} d={d}"
        if sigma is not None:
            label += f" sigma_uG={_format_value(sigma)}"
        usable = [r for r in rows
                  if r.p_L > 0 and r.p_s >= 10.0 * r.p_M]
        if len(usable) < 3:
            print(f"{label}: skipped ({len(usable)} usable points, need 3)",
                  file=sys.stderr)
            continue
        print(f"{label}: slope={fit_exponent(usable):.4f}")
    return 0


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file; "
                                      "flags override its values")
    sub.add_argument("--arch",
                     help="architecture: hyperfine, zeeman, or mixed")
    sub.add_argument("--model", help="leakage model: dp or ms")
    sub.add_argument("--d", type=int, help="code distance (odd, >= 3)")
    sub.add_argument("--ps", type=_parse_ps_list,
                     help="two-qubit scattering rates, comma-separated")
    sub.add_argument("--sigma", type=float,
                     help="field fluctuation in uG (sets the dephasing "
                          "rate)")
    sub.add_argument("--pm", type=float,
                     help="per-gate dephasing probability (must agree "
                          "with --sigma when both are given)")
    sub.add_argument("--trials", type=int, help="Monte Carlo trials per "
                                                "point")
    sub.add_argument("--seed", type=int, help="base seed for the run")
    sub.add_argument("--rounds", type=int,
                     help="syndrome rounds per trial (default: d)")
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json-lines"),
                     help="output format (default: csv)")
    sub.add_argument("--threads", type=int,
                     help="worker processes (LEAKSIM_THREADS overrides)")
    sub.add_argument("--backend", choices=("auto", "kernel", "reference"),
                     help="trial engine selection (default: auto)")
    sub.add_argument("--leaked-meas-random", action="store_true",
                     default=None, dest="leaked_meas_random",
                     help="leaked ancillas read out a coin flip instead "
                          "of 1")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leaksim",
        description="Toric-code logical error rates under scattering, "
                    "dephasing, and leakage noise.")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("sweep", help="run a scattering-rate sweep")
    _add_run_flags(sub)
    sub.set_defaults(func=_cmd_sweep)

    sub = subs.add_parser("single", help="run one point")
    _add_run_flags(sub)
    sub.set_defaults(func=_cmd_single)

    sub = subs.add_parser("enumerate-faults",
                          help="count uncorrectable single faults")
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--arch", help="comma-separated architectures "
                                    "(default: mixed)")
    sub.add_argument("--model", help="comma-separated leakage models "
                                     "(default: ms)")
    sub.add_argument("--d", type=int, help="code distance (default: 3)")
    sub.add_argument("--rounds", type=int,
                     help="syndrome rounds (default: d)")
    sub.add_argument("--stop-on-first", action="store_true", default=None,
                     dest="stop_on_first",
                     help="stop each enumeration at the first "
                          "uncorrectable fault")
    sub.set_defaults(func=_cmd_enumerate)

    sub = subs.add_parser("fit", help="fit log-log slopes from output "
                                      "files")
    sub.add_argument("inputs", nargs="+",
                     help="CSV or json-lines files from sweep/single")
    sub.set_defaults(func=_cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
