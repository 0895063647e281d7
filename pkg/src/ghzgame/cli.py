"""Command-line front end: runs experiments and emits deterministic reports.

Subcommands mirror the module operations: `bound`, `search`, `quantum`,
`noise`, `detect`, and `report` (which bundles every headline number into a
single document).  Reports are reproducible byte for byte for a fixed seed:
timing goes to stderr, never into the report body.

Exit codes: 0 success, 1 usage error, 2 when a verification check fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__, classical, noise, quantum
from .core import GameConfig, Question, enumerate_legitimate, target_parity

DEFAULT_SEED = 42

USAGE_ERROR = 1
CHECK_FAILED = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for failed checks
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config_file(args, argv, parser)
    started = time.perf_counter()
    try:
        report = args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    elapsed = time.perf_counter() - started
    _emit(report, args)
    print(f"[{report['command']}] completed in {elapsed:.2f}s", file=sys.stderr)
    if any(not c["ok"] for c in report.get("checks", [])):
        return CHECK_FAILED
    return 0


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="game", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help: str, default_format: str = "text") -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(handler=handler)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed (fixed default)")
        p.add_argument("--format", choices=("text", "json"), default=default_format)
        p.add_argument("--out", help="write the report to this path instead of stdout")
        p.add_argument("--config", help="JSON file whose keys mirror the command flags")
        return p

    p = add("bound", cmd_bound, "print the exact classical success-proportion bound")
    p.add_argument("--n", required=True, type=int)

    p = add("search", cmd_search, "exhaustively confirm the bound and the simple optimal strategy")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--witnesses", help="CSV path for all maximizing strategies")

    p = add("quantum", cmd_quantum, "play the perfect quantum strategy and verify certainty")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dense-check", action="store_true", dest="dense_check")

    p = add("noise", cmd_noise, "bit-flip noise: win probabilities, thresholds, Monte Carlo")
    p.add_argument("--n", required=True, help="player count or range, e.g. 3 or 3..9")
    p.add_argument("--p", default=None, help="reliability grid start:stop:step, e.g. 0.80:0.99:0.01")
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials per grid point (0 = none)")
    p.add_argument("--csv", help="CSV path for the grid records")

    p = add("detect", cmd_detect, "detection inefficiency: thresholds and the no-output sweep")
    p.add_argument("--n", required=True, help="player count or range, e.g. 3..5")
    p.add_argument("--eta", default=None, help="efficiency grid start:stop:step")
    p.add_argument("--csv", help="CSV path for the grid records")

    p = add("report", cmd_report, "one document reproducing every headline number", default_format="json")
    p.add_argument("--quantum-trials", type=int, default=50, dest="quantum_trials")
    p.add_argument("--mc-trials", type=int, default=100000, dest="mc_trials")

    return parser


# ---------------------------------------------------------------- commands


def cmd_bound(args) -> dict:
    n = _require_n(args.n)
    bound = classical.classical_bound(n)
    record = {"n": n, "derivation": "closed-form", **_fraction_fields("bound", bound)}
    return _report("bound", args, records=[record])


def cmd_search(args) -> dict:
    n = _require_n(args.n)
    if n > classical.exhaustive_limit():
        raise UsageError(
            f"n={n} exceeds the exhaustive limit {classical.exhaustive_limit()} "
            "(set GAME_EXHAUSTIVE_LIMIT to raise it); refusing to sample silently"
        )
    bound = classical.classical_bound(n)
    best, witnesses = classical.exhaustive_best(GameConfig(n))
    table1 = classical.table1_strategy(GameConfig(n))
    table1_prop = classical.success_proportion(table1)
    if args.witnesses:
        _write_witness_csv(args.witnesses, witnesses)
    records = [
        {
            "n": n,
            "derivation": "exhaustive",
            "strategies_swept": 1 << (2 * n),
            "witness_count": len(witnesses),
            **_fraction_fields("best_proportion", best),
            **_fraction_fields("table1_proportion", table1_prop),
            "table1_pairs": ["".join(map(str, pair)) for pair in table1.outputs],
        }
    ]
    checks = [
        _check("exhaustive_max_equals_formula", best == bound),
        _check("table1_achieves_formula", table1_prop == bound),
    ]
    return _report("search", args, records=records, checks=checks)


def cmd_quantum(args) -> dict:
    n = _require_n(args.n)
    if n > quantum.ANALYTIC_LIMIT:
        raise UsageError(f"n={n} exceeds the analytic limit {quantum.ANALYTIC_LIMIT}")
    trials = args.trials
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    rng = np.random.default_rng(args.seed)
    cfg = GameConfig(n)
    if n <= 16:
        rounds = 0
        wins = 0
        for q in enumerate_legitimate(cfg):
            wins += _analytic_wins(q, trials, rng)
            rounds += trials
        coverage = "all-questions"
    else:
        rounds = trials
        wins = 0
        for bits in _sample_legitimate(n, trials, rng):
            wins += _analytic_wins(Question(n, int(bits)), 1, rng)
        coverage = "sampled-questions"
    records = [
        {
            "n": n,
            "derivation": "monte-carlo",
            "mode": "analytic",
            "coverage": coverage,
            "rounds": rounds,
            "wins": wins,
            "win_rate": wins / rounds,
        }
    ]
    checks = [_check("quantum_win_rate_is_one", wins == rounds)]
    if args.dense_check:
        if n > quantum.dense_limit():
            raise UsageError(f"n={n} exceeds the dense limit {quantum.dense_limit()}")
        ok, questions_checked = _dense_consistency(cfg, rng)
        records.append(
            {
                "n": n,
                "derivation": "exhaustive",
                "mode": "dense",
                "questions_checked": questions_checked,
                "consistent": ok,
            }
        )
        checks.append(_check("dense_matches_analytic", ok))
    return _report("quantum", args, records=records, checks=checks)


def cmd_noise(args) -> dict:
    n_values = _parse_range(args.n)
    p_grid = _parse_grid(args.p) if args.p else []
    for p in p_grid:
        if not 0.5 <= p <= 1.0:
            raise UsageError(f"reliability p={p} outside [0.5, 1]")
    rng = np.random.default_rng(args.seed)
    records = []
    checks = []
    for n in n_values:
        threshold = noise.bitflip_threshold(n)
        records.append(
            {
                "kind": "threshold",
                "n": n,
                "derivation": "closed-form",
                "bitflip_threshold": threshold,
            }
        )
        for rec in noise.compare_report([n], p_grid=p_grid):
            records.append(_comparison_record(rec, "p"))
        flags_ok = all(
            (rec.param > rec.threshold) == (rec.flag == "quantum-wins")
            for rec in noise.compare_report([n], p_grid=p_grid)
        )
        if p_grid:
            checks.append(_check(f"threshold_flags_consistent_n{n}", flags_ok))
        if args.trials > 0:
            for p in p_grid:
                est = noise.bitflip_monte_carlo(n, noise.BitFlipModel(p), args.trials, rng)
                records.append(
                    {
                        "kind": "monte-carlo",
                        "n": n,
                        "p": p,
                        "derivation": "monte-carlo",
                        "trials": est.trials,
                        "wins": est.wins,
                        "estimate": est.estimate,
                        "std_error": est.std_error,
                    }
                )
    if args.csv:
        _write_grid_csv(args.csv, [r for r in records if r.get("kind") == "bitflip"])
    return _report("noise", args, records=records, checks=checks)


def cmd_detect(args) -> dict:
    n_values = _parse_range(args.n)
    eta_grid = _parse_grid(args.eta) if args.eta else []
    for eta in eta_grid:
        if not 0.0 <= eta <= 1.0:
            raise UsageError(f"efficiency eta={eta} outside [0, 1]")
    records = []
    checks = []
    for n in n_values:
        records.append(
            {
                "kind": "threshold",
                "n": n,
                "derivation": "closed-form",
                "detection_threshold": noise.detection_threshold(n),
            }
        )
        for rec in noise.compare_report([n], eta_grid=eta_grid):
            records.append(_comparison_record(rec, "eta"))
        if eta_grid:
            flags_ok = all(
                (rec.param > rec.threshold) == (rec.flag == "quantum-wins")
                for rec in noise.compare_report([n], eta_grid=eta_grid)
            )
            checks.append(_check(f"threshold_flags_consistent_n{n}", flags_ok))
        if n <= noise.extended_limit():
            best, witnesses = noise.errorfree_exhaustive(GameConfig(n))
            records.append(
                {
                    "kind": "errorfree",
                    "n": n,
                    "derivation": "exhaustive",
                    "tables_swept": 9**n,
                    "max_winnable": best,
                    "witness_count": len(witnesses),
                }
            )
            checks.append(_check(f"errorfree_max_is_two_n{n}", best == 2))
    if args.csv:
        _write_grid_csv(args.csv, [r for r in records if r.get("kind") == "detection"])
    return _report("detect", args, records=records, checks=checks)


def cmd_report(args) -> dict:
    rng = np.random.default_rng(args.seed)
    records = []
    checks = []

    # exact classical bounds, with exhaustive confirmation at desk scale
    for n in range(3, 8):
        bound = classical.classical_bound(n)
        records.append(
            {"section": "bound", "n": n, "derivation": "closed-form", **_fraction_fields("bound", bound)}
        )
    for n in range(3, 7):
        bound = classical.classical_bound(n)
        best, witnesses = classical.exhaustive_best(GameConfig(n))
        table1_prop = classical.success_proportion(classical.table1_strategy(GameConfig(n)))
        records.append(
            {
                "section": "search",
                "n": n,
                "derivation": "exhaustive",
                "witness_count": len(witnesses),
                **_fraction_fields("best_proportion", best),
            }
        )
        checks.append(_check(f"search_matches_bound_n{n}", best == bound))
        checks.append(_check(f"table1_matches_bound_n{n}", table1_prop == bound))

    # perfect quantum play, analytic everywhere plus dense cross-check
    for n in range(3, 9):
        cfg = GameConfig(n)
        trials = args.quantum_trials
        wins = sum(_analytic_wins(q, trials, rng) for q in enumerate_legitimate(cfg))
        rounds = trials * cfg.num_legitimate
        dense_ok, _ = _dense_consistency(cfg, rng)
        records.append(
            {
                "section": "quantum",
                "n": n,
                "derivation": "monte-carlo",
                "rounds": rounds,
                "wins": wins,
                "dense_consistent": dense_ok,
            }
        )
        checks.append(_check(f"quantum_perfect_n{n}", wins == rounds))
        checks.append(_check(f"dense_matches_analytic_n{n}", dense_ok))

    # bit-flip thresholds and the large-n limit
    e3 = noise.bitflip_threshold(3)
    e5 = noise.bitflip_threshold(5)
    e_limit = noise.bitflip_threshold(10**4)
    records.append(
        {
            "section": "bitflip",
            "derivation": "closed-form",
            "threshold_n3": e3,
            "threshold_n5": e5,
            "threshold_n10000": e_limit,
            "limit": 0.5 + math.sqrt(2) / 4,
        }
    )
    checks.append(_check("bitflip_threshold_n3", abs(e3 - 0.897) <= 0.001))
    checks.append(_check("bitflip_threshold_n5", abs(e5 - 0.879) <= 0.001))
    checks.append(_check("bitflip_threshold_limit", abs(e_limit - 0.85355) <= 0.0005))

    est = noise.bitflip_monte_carlo(3, noise.BitFlipModel(0.9), args.mc_trials, rng)
    expected = noise.bitflip_win_prob(3, noise.BitFlipModel(0.9))
    records.append(
        {
            "section": "bitflip",
            "derivation": "monte-carlo",
            "n": 3,
            "p": 0.9,
            "trials": est.trials,
            "estimate": est.estimate,
            "std_error": est.std_error,
            "closed_form": expected,
        }
    )
    checks.append(
        _check("bitflip_monte_carlo_n3", abs(est.estimate - expected) <= 4 * est.std_error)
    )

    # detection thresholds, the no-output sweep, and the reference table
    d3 = noise.detection_threshold(3)
    records.append(
        {
            "section": "detection",
            "derivation": "closed-form",
            "threshold_n3": d3,
            "threshold_n10000": noise.detection_threshold(10**4),
            "limit": 0.5,
        }
    )
    checks.append(_check("detection_threshold_n3", abs(d3 - 0.7937) <= 0.0001))
    for n in (3, 4):
        best, _witnesses = noise.errorfree_exhaustive(GameConfig(n))
        records.append(
            {
                "section": "detection",
                "derivation": "exhaustive",
                "n": n,
                "errorfree_max_winnable": best,
            }
        )
        checks.append(_check(f"errorfree_max_is_two_n{n}", best == 2))
    ref_ok = all(_reference_wins_expected(n) for n in range(3, 9))
    records.append(
        {"section": "detection", "derivation": "exhaustive", "reference_strategy_ok": ref_ok}
    )
    checks.append(_check("reference_strategy_wins_expected", ref_ok))

    return _report("report", args, records=records, checks=checks)


# ---------------------------------------------------------------- helpers


def _analytic_wins(q: Question, trials: int, rng: np.random.Generator) -> int:
    answers = quantum.sample_answers(q, trials, rng, mode="analytic")
    want = target_parity(q)
    return sum(1 for a in answers if a.parity == want)


def _sample_legitimate(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    free = rng.integers(0, 2, size=(count, n - 1), dtype=np.uint64)
    last = free.sum(axis=1) & np.uint64(1)
    return (free << np.arange(n - 1, 0, -1, dtype=np.uint64)).sum(axis=1) | last


def _dense_consistency(cfg: GameConfig, rng: np.random.Generator) -> tuple[bool, int]:
    """Dense pipeline agrees with phase tracking: one parity class, flat weights."""
    if cfg.n <= 12:
        questions = enumerate_legitimate(cfg)
    else:
        picks = _sample_legitimate(cfg.n, 256, rng)
        questions = [Question(cfg.n, int(b)) for b in picks]
    for q in questions:
        if not quantum.dense_matches_analytic(q):
            return False, len(questions)
    return True, len(questions)


def _reference_wins_expected(n: int) -> bool:
    cfg = GameConfig(n)
    strat = noise.errorfree_reference_strategy(cfg)
    won = {q.bits for q in noise.winnable_questions(strat, cfg)}
    return won == {0, 0b11 << (n - 2)}


def _comparison_record(rec: noise.ComparisonRecord, param_name: str) -> dict:
    return {
        "kind": rec.kind,
        "n": rec.n,
        param_name: rec.param,
        "derivation": "closed-form",
        "quantum": rec.quantum,
        "classical": rec.classical,
        "classical_exact": _rational(rec.classical_exact),
        "margin": rec.quantum - rec.classical,
        "threshold": rec.threshold,
        "flag": rec.flag,
    }


def _require_n(n: int) -> int:
    if n < 3:
        raise UsageError(f"the game needs at least 3 players, got n={n}")
    return n


def _parse_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(text)]
    except ValueError as exc:
        raise UsageError(f"bad n range {text!r}: {exc}") from None
    if not values:
        raise UsageError(f"empty n range {text!r}")
    for n in values:
        _require_n(n)
    return values


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError("expected start:stop:step")
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"bad grid bounds {text!r}")
    decimals = max(_decimals(p) for p in parts)
    values = []
    k = 0
    while True:
        v = round(start + k * step, decimals)
        if v > stop + 1e-12:
            break
        values.append(v)
        k += 1
    return values


def _decimals(text: str) -> int:
    return len(text.split(".")[1]) if "." in text else 0


def _rational(frac: Fraction) -> str:
    return f"{frac.numerator}/{frac.denominator}"


def _fraction_fields(name: str, frac: Fraction) -> dict:
    return {name: _rational(frac), f"{name}_decimal": format(float(frac), ".12g")}


def _check(name: str, ok: bool) -> dict:
    return {"name": name, "ok": bool(ok)}


def _report(command: str, args, records: list[dict], checks: list[dict] | None = None) -> dict:
    config = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("handler", "format", "out", "config") and v is not None
    }
    return {
        "tool": "ghzgame",
        "version": __version__,
        "command": command,
        "config": config,
        "records": records,
        "checks": checks or [],
    }


def _apply_config_file(args, argv: list[str], parser: argparse.ArgumentParser) -> None:
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config) as fh:
            overrides = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file {args.config!r}: {exc}")
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            parser.error(f"config key {key!r} does not match any flag")
        # explicit command-line flags win over the config file
        if f"--{key}" not in argv and f"--{dest}" not in argv:
            setattr(args, dest, value)


def _emit(report: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = _render_text(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_text(report: dict) -> str:
    lines = [f"ghzgame {report['version']} :: {report['command']}"]
    cfg = report["config"]
    lines.append("config: " + ", ".join(f"{k}={v}" for k, v in cfg.items()))
    for rec in report["records"]:
        fields = ", ".join(f"{k}={_fmt(v)}" for k, v in rec.items())
        lines.append("  " + fields)
    for chk in report["checks"]:
        lines.append(f"  [{'ok' if chk['ok'] else 'FAIL'}] {chk['name']}")
    return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_witness_csv(path: str, witnesses: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["code", "pairs"])
        for strat in witnesses:
            writer.writerow([strat.code, " ".join("".join(map(str, p)) for p in strat.outputs)])


def _write_grid_csv(path: str, records: list[dict]) -> None:
    if not records:
        return
    fields = sorted({k for r in records for k in r})
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(records)


if __name__ == "__main__":
    raise SystemExit(main())
