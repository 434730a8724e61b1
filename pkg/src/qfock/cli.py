"""
Command line front end: ``qfock {verify,gram,mixing,decay}``.

Exit codes: 0 success, 2 invariant failure, 3 precondition or config error,
4 capability (memory budget) error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ArgumentError, CapabilityError, ConfigError, DefinitenessError, PreconditionError, QFockError,
)
from .fock import GramCache, QSpec, default_budget, gram_spectrum
from .invariants import DEFAULT_TOLERANCES, run_invariants
from .masa import MODES, ExperimentSpec, run_experiment
from .operators import LadderWord

EXIT_OK, EXIT_INVARIANT, EXIT_PRECONDITION, EXIT_CAPABILITY = 0, 2, 3, 4

_TOP_FIELDS = {"q_matrix", "max_degree", "xi0", "experiments", "tolerances",
               "memory_budget_bytes", "output_path", "seed"}
_EXP_FIELDS = {"name", "mode", "x_word", "y_word", "n_min", "n_max", "window",
               "ladder", "a_word", "b_word", "xi0"}

DEFAULT_CONFIG = {"q_matrix": [[0.0, 0.0], [0.0, 0.0]], "max_degree": 6, "xi0": [1.0, 0.0]}


@dataclass
class RunConfig:
    q: QSpec
    max_degree: int
    xi0: list
    experiments: list
    tolerances: dict
    memory_budget_bytes: int
    output_path: str | None
    seed: int
    raw: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        """The config as it was interpreted, suitable for re-running."""
        out = dict(self.raw)
        out.update(q_matrix=self.q.q.tolist(), max_degree=self.max_degree, xi0=list(self.xi0),
                   tolerances=self.tolerances, memory_budget_bytes=self.memory_budget_bytes,
                   output_path=self.output_path, seed=self.seed)
        out.setdefault("experiments", [])
        return out


def _int_field(payload: dict, key: str, where: str, default=None) -> int:
    value = payload.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}{key}: expected an integer, got {value!r}")
    return value


def _word_field(value, where: str):
    if value is None:
        return ()
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list of letters or vectors, got {value!r}")
    for a in value:
        ok = (isinstance(a, int) and not isinstance(a, bool)) or (
            isinstance(a, list) and all(isinstance(c, (int, float)) for c in a))
        if not ok:
            raise ConfigError(f"{where}: entry {a!r} is neither a letter nor a vector")
    return tuple(value)


def _ladder_field(value, where: str):
    if value is None:
        return None
    try:
        return LadderWord.parse(value)
    except ArgumentError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(data: dict, strict: bool = True) -> RunConfig:
    """Validate a decoded config dict. Unknown fields are rejected."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _TOP_FIELDS
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    if "q_matrix" not in data:
        raise ConfigError("q_matrix: required field missing")
    try:
        q = QSpec(np.array(data["q_matrix"], dtype=np.float64))
    except (ArgumentError, ValueError, TypeError) as exc:
        raise ConfigError(f"q_matrix: {exc}") from None
    max_degree = _int_field(data, "max_degree", "", 6)
    if max_degree < 1:
        raise ConfigError(f"max_degree: must be >= 1, got {max_degree}")
    xi0 = data.get("xi0", [1.0] + [0.0] * (q.N - 1))
    if not (isinstance(xi0, list) and len(xi0) == q.N):
        raise ConfigError(f"xi0: expected a list of {q.N} numbers, got {xi0!r}")
    tolerances = dict(DEFAULT_TOLERANCES)
    extra_tol = data.get("tolerances", {})
    if not isinstance(extra_tol, dict) or set(extra_tol) - set(DEFAULT_TOLERANCES):
        raise ConfigError(f"tolerances: unknown names {sorted(set(extra_tol) - set(DEFAULT_TOLERANCES))}")
    tolerances.update({k: float(v) for k, v in extra_tol.items()})
    budget = _int_field(data, "memory_budget_bytes", "", default_budget())
    seed = _int_field(data, "seed", "", 0)
    output_path = data.get("output_path")

    experiments = []
    payloads = data.get("experiments", [])
    if not isinstance(payloads, list):
        raise ConfigError("experiments: expected a list")
    for idx, e in enumerate(payloads):
        where = f"experiments[{idx}]."
        if not isinstance(e, dict):
            raise ConfigError(f"experiments[{idx}]: expected an object")
        unknown = set(e) - _EXP_FIELDS
        if unknown:
            raise ConfigError(f"{where}: unknown field(s): {', '.join(sorted(unknown))}")
        mode = e.get("mode", "mixing_sum")
        if mode not in MODES:
            raise ConfigError(f"{where}mode: expected one of {MODES}, got {mode!r}")
        window = e.get("window")
        if window is not None:
            if not (isinstance(window, list) and len(window) == 2):
                raise ConfigError(f"{where}window: expected [lo, hi]")
            window = tuple(window)
        try:
            experiments.append(ExperimentSpec(
                q=q,
                xi0=np.array(e.get("xi0", xi0), dtype=np.float64),
                x_word=_word_field(e.get("x_word"), where + "x_word"),
                y_word=_word_field(e.get("y_word"), where + "y_word"),
                n_min=_int_field(e, "n_min", where, 0),
                n_max=_int_field(e, "n_max", where, 6),
                max_degree=max_degree,
                mode=mode,
                ladder=_ladder_field(e.get("ladder"), where + "ladder"),
                a_word=_ladder_field(e.get("a_word"), where + "a_word"),
                b_word=_ladder_field(e.get("b_word"), where + "b_word"),
                window=window,
                name=str(e.get("name", f"exp{idx}")),
                strict=strict,
            ))
        except (PreconditionError, ArgumentError) as exc:
            raise ConfigError(f"{where[:-1]}: {exc}") from None
    return RunConfig(q, max_degree, xi0, experiments, tolerances, budget, output_path, seed, dict(data))


def load_config(path: str | None, strict: bool = True) -> RunConfig:
    if path is None:
        return parse_config(dict(DEFAULT_CONFIG), strict)
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(data, strict)


# ---------------------------------------------------------------------------
# output

def fmt(x) -> str:
    """Shortest round-trip decimal; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(c) if not isinstance(c, str) else c for c in r])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(args, cfg: RunConfig, csv_text: str, report: dict):
    out = args.out or cfg.output_path
    if out:
        Path(out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    report_path = args.report or (str(Path(out).with_suffix(".report.json")) if out else None)
    if report_path:
        report = dict(report)
        report["config"] = cfg.resolved()
        report["environment"] = {"precision": "float64", "budget_bytes": cfg.memory_budget_bytes,
                                 "seed": cfg.seed, "truncation": "strict" if args.strict else "lenient"}
        Path(report_path).write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")


def _fit_dict(fit) -> dict:
    return {"fitted_rate": fit.fitted_rate, "C_hat": fit.C_hat, "window": list(fit.window),
            "exact_zero": fit.exact_zero, "points": fit.points}


# ---------------------------------------------------------------------------
# commands

def cmd_verify(args, cfg: RunConfig) -> int:
    checks = run_invariants(cfg.q, cfg.max_degree, cfg.seed, cfg.tolerances,
                            cfg.experiments, cfg.memory_budget_bytes)
    rows = [(c.name, c.residual, c.tolerance, "pass" if c.passed else "FAIL", c.detail) for c in checks]
    _emit(args, cfg, _csv_text(["invariant", "residual", "tolerance", "status", "detail"], rows),
          {"invariants": [c.as_dict() for c in checks]})
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"invariant failures: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_gram(args, cfg: RunConfig) -> int:
    n = cfg.max_degree if args.n is None else args.n
    cache = GramCache(cfg.q, 0, cfg.memory_budget_bytes).build(n)
    lo, hi = gram_spectrum(cache, n)
    row = (n, cfg.q.N**n, lo, hi, hi / lo if lo > 0 else math.inf)
    _emit(args, cfg, _csv_text(["n", "dim", "min_eig", "max_eig", "cond"], [row]), {"gram": [row]})
    return EXIT_OK


def _run_mode(args, cfg: RunConfig, modes: tuple):
    specs = [s for s in cfg.experiments if s.mode in modes]
    if not specs:
        raise ConfigError(f"config has no experiments of mode {' or '.join(modes)}")
    cache = GramCache(cfg.q, 0, cfg.memory_budget_bytes)
    return [(s, run_experiment(s, cache)) for s in specs]


def cmd_mixing(args, cfg: RunConfig) -> int:
    results = _run_mode(args, cfg, ("mixing_sum",))
    header = ["experiment", "n", "term", "partial_sum", "ratio"]
    if not args.strict:
        header.append("lost_mass")
    rows = []
    for spec, res in results:
        for r in res.rows:
            row = [spec.name, r.n, r.term, r.partial_sum, r.ratio]
            if not args.strict:
                row.append(r.lost_mass)
            rows.append(row)
        print(f"{spec.name}: total {res.rows[-1].partial_sum!r}, fitted rate {res.fit.fitted_rate!r}, "
              f"C_hat {res.fit.C_hat!r}, empirical tail bound {res.tail_bound!r}", file=sys.stderr)
    report = {"experiments": {s.name: {"rows": [vars(r) for r in res.rows], "fit": _fit_dict(res.fit),
                                       "tail_bound_empirical": res.tail_bound}
                              for s, res in results}}
    _emit(args, cfg, _csv_text(header, rows), report)
    return EXIT_OK


def cmd_decay(args, cfg: RunConfig) -> int:
    results = _run_mode(args, cfg, ("zeta_probe", "lemma3_probe"))
    header = ["experiment", "n", "ratio", "q_max_pow_n", "fit_bound", "margin_bound"]
    rows = []
    margin = cfg.tolerances["decay_margin"]
    for spec, res in results:
        fit = res.fit
        for r in res.rows:
            rows.append([spec.name, r.n, r.zeta_norm_ratio, r.q_power, fit.bound(r.n),
                         fit.bound(r.n, cfg.q.q_max + margin)])
        flag = " (exact zero)" if fit.exact_zero else ""
        print(f"{spec.name}: fitted rate {fit.fitted_rate!r}, C_hat {fit.C_hat!r}{flag}", file=sys.stderr)
    report = {"experiments": {s.name: {"rows": [vars(r) for r in res.rows], "fit": _fit_dict(res.fit)}
                              for s, res in results}}
    _emit(args, cfg, _csv_text(header, rows), report)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "gram": cmd_gram, "mixing": cmd_mixing, "decay": cmd_decay}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfock", description=__doc__.strip().splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="CSV destination (default: stdout)")
    common.add_argument("--report", metavar="PATH", help="JSON report destination (default: next to --out)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--budget", type=int, metavar="BYTES", help="memory budget for Gram matrices")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=True,
                      help="fail when a creation leaves the truncation (default)")
    mode.add_argument("--lenient", dest="strict", action="store_false",
                      help="drop mass beyond the truncation and record it")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    g = sub.add_parser("gram", parents=[common], help="spectrum of the symmetrizer P_n")
    g.add_argument("--n", type=int, help="degree (default: max_degree)")
    sub.add_parser("mixing", parents=[common], help="mixing-sum experiments")
    sub.add_parser("decay", parents=[common], help="zeta and commutator-bound probes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.strict)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.budget is not None:
            cfg.memory_budget_bytes = args.budget
        return COMMANDS[args.command](args, cfg)
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except DefinitenessError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (PreconditionError, ArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except QFockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
