"""Command-line front end.

Configuration files are INI-style, one section per experiment::

    [reference]
    alpha = 0.5
    scenery = iid            # iid | gaussma:0.6,0.8 | movingmax:1
    marginal = frechet1      # frechet1 | pareto:2 | exponential1
    n = 100000
    tau = 1
    reps = 5000
    mode = annealed          # annealed | quenched
    seed = 42                # optional
    schedule = 316,17        # optional k_n,l_n override

The master seed is taken from ``--seed``, else ``RWRS_SEED``, else the
section's ``seed`` key, else 0. ``--config`` also accepts a ``manifest.json``
written by an earlier run: the run is replayed with the recorded config text,
arguments and resolved seeds (flags given explicitly still win). Every stream is derived from it, and work is
split into replications seeded by index, so ``--threads`` never changes
the output files.

Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime as _dt
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .blocks import decompose, lemma1_from_tallies, lemma2_from_tallies, block_tallies
from .conditions import default_schedule, dprime_statistic, make_schedule, validate_schedule
from .extremes import (
    ExperimentConfig,
    describe_dependence,
    describe_marginal,
    poisson_gof,
    run_experiment,
)
from .scenery import EXPONENTIAL1, FRECHET1, IID, GaussMA, MovingMax, make_scenery, pareto
from .walk import estimate_q_range, estimate_q_survival, simulate_walk, walk_stats

KEYS = ("alpha", "scenery", "marginal", "n", "tau", "reps", "mode", "seed", "schedule")
REQUIRED = ("alpha", "scenery", "marginal", "n", "tau", "reps", "mode")
SUBCOMMANDS = ("simulate-walk", "estimate-q", "run-extremes", "check-conditions", "decompose-blocks",
               "lemma-diagnostics", "poisson-test", "sweep")
DEFAULT_GRID = (1000, 10000, 100000)

COLUMNS = {
    "simulate-walk": ["section", "k", "position", "new_site"],
    "estimate-q": ["section", "method", "value", "stderr", "n", "reps", "seed"],
    "run-extremes": ["section", "mode", "n", "tau", "reps", "seed", "alpha", "scenery", "marginal",
                     "empirical_prob", "std_error", "target", "target_se", "abs_error", "z_score",
                     "q_hat", "q_se", "mean_count", "u_n"],
    "check-conditions": ["section", "n", "constraint", "value", "pass"],
    "decompose-blocks": ["section", "block", "size", "min_site", "max_site", "stripe_size", "trimmed_size"],
    "lemma-diagnostics": ["section", "n", "d_i", "d_ii", "d_iii", "se_i", "se_ii", "se_iii",
                          "product", "target", "stderr"],
    "poisson-test": ["section", "mode", "n", "tau", "reps", "seed", "poisson_mean", "q_hat",
                     "p_value", "zero_fraction", "empirical_prob"],
}
COLUMNS["sweep"] = COLUMNS["run-extremes"]


@dataclass
class ConfigIssue:
    line: int
    section: str
    key: str
    reason: str

    def __str__(self) -> str:
        return f"line {self.line}: [{self.section}] {self.key}: {self.reason}"


class ConfigError(Exception):
    def __init__(self, issues: list[ConfigIssue]):
        self.issues = issues
        super().__init__("\n".join(str(i) for i in issues))


@dataclass(frozen=True)
class NamedConfig:
    section: str
    config: ExperimentConfig
    seed_given: bool


def _line_index(text: str) -> dict:
    where, section = {}, None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            where[(section, None)] = no
        elif section is not None and ("=" in line or ":" in line) and not line.startswith(("#", ";")):
            key = line.split("=", 1)[0].split(":", 1)[0].strip().lower()
            where.setdefault((section, key), no)
    return where


def _parse_scenery(value: str):
    head, _, args = value.partition(":")
    head = head.strip().lower()
    if head == "iid" and not args:
        return IID()
    if head == "gaussma":
        return GaussMA(tuple(float(x) for x in args.split(",")))
    if head == "movingmax":
        return MovingMax(int(args))
    raise ValueError("expected iid, gaussma:w0,w1,... or movingmax:m")


def _parse_marginal(value: str):
    head, _, args = value.partition(":")
    head = head.strip().lower()
    if head == "frechet1" and not args:
        return FRECHET1
    if head == "exponential1" and not args:
        return EXPONENTIAL1
    if head == "pareto":
        return pareto(float(args))
    raise ValueError("expected frechet1, exponential1 or pareto:theta")


def parse_config(text: str) -> list[NamedConfig]:
    """Parse and validate every section; all problems are collected before raising."""
    lines = _line_index(text)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([ConfigIssue(getattr(exc, "lineno", 0) or 0, "-", "-", str(exc).splitlines()[0])])
    issues: list[ConfigIssue] = []
    out: list[NamedConfig] = []
    if not parser.sections():
        raise ConfigError([ConfigIssue(0, "-", "-", "no experiment sections found")])
    for sec in parser.sections():
        body = parser[sec]
        line = lambda key: lines.get((sec, key), lines.get((sec, None), 0))  # noqa: E731
        sec_issues: list[ConfigIssue] = []

        def bad(key, reason):
            sec_issues.append(ConfigIssue(line(key), sec, key, reason))

        for key in body:
            if key not in KEYS:
                bad(key, f"unknown key (allowed: {', '.join(KEYS)})")
        for key in REQUIRED:
            if key not in body:
                bad(key, "missing required key")
        fields = {}

        def convert(key, fn, check=None, message=""):
            if key not in body:
                return
            try:
                val = fn(body[key])
            except (TypeError, ValueError) as exc:
                bad(key, f"cannot parse {body[key]!r}: {exc}")
                return
            if check is not None and not check(val):
                bad(key, message)
                return
            fields[key] = val

        convert("alpha", float, lambda a: 0 < a < 1, "alpha must lie in (0,1)")
        convert("n", int, lambda n: n >= 1000, "n must be an integer >= 1000")
        convert("tau", float, lambda t: t >= 0 and math.isfinite(t), "tau must be a finite real >= 0")
        convert("reps", int, lambda r: r >= 100, "reps must be an integer >= 100")
        convert("mode", lambda s: s.strip().lower(), lambda m: m in ("annealed", "quenched"),
                "mode must be annealed or quenched")
        convert("seed", int, lambda s: s >= 0, "seed must be a non-negative integer")
        convert("scenery", _parse_scenery)
        convert("marginal", _parse_marginal)
        convert("schedule", lambda s: tuple(int(x) for x in s.split(",")),
                lambda kl: len(kl) == 2 and kl[0] >= 2 and kl[1] >= 1, "schedule must be k_n,l_n with k_n>=2, l_n>=1")
        if "n" in fields and "tau" in fields and not fields["tau"] < fields["n"]:
            bad("tau", "tau must be smaller than n")
        if "scenery" in fields and "marginal" in fields:
            try:
                make_scenery(fields["scenery"], fields["marginal"], 0)
            except ValueError as exc:
                bad("scenery", str(exc))
        if sec_issues:
            issues.extend(sec_issues)
            continue
        kl = fields.get("schedule", (None, None))
        cfg = ExperimentConfig(
            step_alpha=fields["alpha"], dependence=make_scenery(fields["scenery"], fields["marginal"], 0).dependence,
            marginal=fields["marginal"], n=fields["n"], tau=fields["tau"], reps=fields["reps"],
            mode=fields["mode"], master_seed=fields.get("seed", 0), k_n=kl[0], l_n=kl[1],
        )
        out.append(NamedConfig(sec, cfg, "seed" in fields))
    if issues:
        raise ConfigError(sorted(issues, key=lambda i: i.line))
    return out


# --------------------------------------------------------------------------
# output


def _cell(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        v = v.item()
    return v


def write_rows(path: Path, columns: Sequence[str], rows: list[dict], fmt: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_cell(r.get(c, "")) for c in columns])
        else:
            for r in rows:
                fh.write(json.dumps({c: _cell(r.get(c)) for c in columns}, allow_nan=True) + "\n")


def _schedule_for(cfg: ExperimentConfig, n: int):
    model = cfg.model
    if cfg.k_n is not None:
        return make_schedule(n, cfg.k_n, cfg.l_n, m=model.m)
    return default_schedule(model, n)


# --------------------------------------------------------------------------
# subcommands; each returns a list of row dicts


def _simulate_walk(nc: NamedConfig, args) -> list[dict]:
    cfg = nc.config
    walk = simulate_walk(cfg.law, cfg.n, cfg.master_seed)
    st = walk_stats(walk)
    new = np.zeros(cfg.n, dtype=bool)
    new[st.distinct_visit_times - 1] = True
    return [{"section": nc.section, "k": k + 1, "position": int(p), "new_site": bool(f)}
            for k, (p, f) in enumerate(zip(walk.positions, new))]


def _estimate_q(nc: NamedConfig, args) -> list[dict]:
    cfg = nc.config
    rows = []
    for est in (estimate_q_range(cfg.law, cfg.n, cfg.reps, cfg.master_seed, cfg.threads),
                estimate_q_survival(cfg.law, cfg.n, cfg.reps, cfg.master_seed, cfg.threads)):
        rows.append({"section": nc.section, "method": est.method, "value": est.value, "stderr": est.std_error,
                     "n": est.n_or_horizon, "reps": est.reps, "seed": cfg.master_seed})
    return rows


def _run_extremes(nc: NamedConfig, args) -> list[dict]:
    rec = run_experiment(nc.config).record()
    rec["section"] = nc.section
    return [rec]


def _sweep(nc: NamedConfig, args) -> list[dict]:
    rows = []
    for n in args.n_grid:
        rec = run_experiment(replace(nc.config, n=n)).record()
        rec["section"] = nc.section
        rows.append(rec)
    return rows


def _check_conditions(nc: NamedConfig, args) -> list[dict]:
    cfg = nc.config
    model = cfg.model
    report = validate_schedule(lambda n: _schedule_for(cfg, n), args.n_grid, model)
    rows = [dict(r, section=nc.section) for r in report.rows()]
    if cfg.tau > 0:
        vals = [dprime_statistic(model, n, _schedule_for(cfg, n), cfg.tau, seed=cfg.master_seed).value
                for n in args.n_grid]
        ok = bool(all(b < a for a, b in zip(vals, vals[1:])))
        rows += [{"section": nc.section, "n": n, "constraint": "dprime", "value": v, "pass": ok}
                 for n, v in zip(args.n_grid, vals)]
    return rows


def _decompose_blocks(nc: NamedConfig, args) -> list[dict]:
    cfg = nc.config
    st = walk_stats(simulate_walk(cfg.law, cfg.n, cfg.master_seed))
    dec = decompose(st, _schedule_for(cfg, cfg.n))
    rows = []
    for j, (b, s, t) in enumerate(zip(dec.blocks, dec.stripes, dec.trimmed_blocks), start=1):
        rows.append({"section": nc.section, "block": j, "size": int(b.size),
                     "min_site": int(b.min()) if b.size else "", "max_site": int(b.max()) if b.size else "",
                     "stripe_size": int(s.size), "trimmed_size": int(t.size)})
    return rows


def _lemma_diagnostics(nc: NamedConfig, args) -> list[dict]:
    cfg = nc.config
    model = cfg.model
    rows = []
    for n in args.n_grid:
        st = walk_stats(simulate_walk(cfg.law, n, cfg.master_seed))
        tallies = block_tallies(model, decompose(st, _schedule_for(cfg, n)), n, cfg.tau, cfg.reps, cfg.master_seed)
        l1 = lemma1_from_tallies(tallies)
        q = estimate_q_range(cfg.law, n, cfg.q_reps, cfg.master_seed, cfg.threads)
        l2 = lemma2_from_tallies(tallies, cfg.tau, q)
        rows.append({"section": nc.section, "n": n, "d_i": l1.d_i, "d_ii": l1.d_ii, "d_iii": l1.d_iii,
                     "se_i": l1.se_i, "se_ii": l1.se_ii, "se_iii": l1.se_iii,
                     "product": l2.product, "target": l2.target, "stderr": l2.combined_se})
    return rows


def _poisson_test(nc: NamedConfig, args) -> list[dict]:
    cfg = nc.config
    res = run_experiment(cfg)
    mean = cfg.tau * res.q_estimate.value
    p = poisson_gof(res.counts, mean) if mean > 0 else float("nan")
    return [{"section": nc.section, "mode": cfg.mode, "n": cfg.n, "tau": cfg.tau, "reps": cfg.reps,
             "seed": cfg.master_seed, "poisson_mean": mean, "q_hat": res.q_estimate.value, "p_value": p,
             "zero_fraction": res.zero_fraction, "empirical_prob": res.empirical_prob}]


HANDLERS = {
    "simulate-walk": _simulate_walk,
    "estimate-q": _estimate_q,
    "run-extremes": _run_extremes,
    "check-conditions": _check_conditions,
    "decompose-blocks": _decompose_blocks,
    "lemma-diagnostics": _lemma_diagnostics,
    "poisson-test": _poisson_test,
    "sweep": _sweep,
}


# --------------------------------------------------------------------------
# entry point


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _grid(text: str) -> list[int]:
    grid = [int(float(x)) for x in text.split(",")]
    if len(grid) < 1 or any(g < 1000 for g in grid):
        raise argparse.ArgumentTypeError("n-grid entries must be integers >= 1000")
    return grid


def build_parser() -> argparse.ArgumentParser:
    epilog = "output columns:\n" + "\n".join(f"  {k}: {', '.join(v)}" for k, v in COLUMNS.items())
    p = _Parser(prog="rwrs", description="Extremes of transient random walks in random sceneries.",
                formatter_class=argparse.RawDescriptionHelpFormatter, epilog=epilog)
    p.add_argument("--version", action="version", version=f"rwrs {__version__}")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="INI-style experiment file")
    p.add_argument("--out-dir", default=".", help="directory for data files and manifest.json")
    p.add_argument("--seed", type=int, default=None, help="master seed (overrides RWRS_SEED and the config)")
    p.add_argument("--reps", type=int, default=None, help="override reps of every section")
    p.add_argument("--format", choices=("csv", "jsonl"), default=None, help="default csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--n-grid", type=_grid, default=None,
                   help="comma-separated n values for sweep, check-conditions, lemma-diagnostics "
                        "(default 1000,10000,100000)")
    return p


def _resolve_seed(flag: int | None, nc: NamedConfig, replay: dict) -> tuple[int, str]:
    if flag is not None:
        return flag, "--seed"
    if nc.section in replay:
        return int(replay[nc.section]["master_seed"]), "manifest"
    env = os.environ.get("RWRS_SEED")
    if env not in (None, ""):
        return int(env), "RWRS_SEED"
    if nc.seed_given:
        return nc.config.master_seed, "config"
    return 0, "default"


def run_command(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        if args.reps is not None and args.reps < 100:
            raise UsageError("--reps must be >= 100")
        env = os.environ.get("RWRS_SEED")
        if args.seed is None and env not in (None, ""):
            try:
                if int(env) < 0:
                    raise ValueError
            except ValueError:
                raise UsageError(f"RWRS_SEED must be a non-negative integer, got {env!r}")
        text = Path(args.config).read_text(encoding="utf-8")
        replay = {}
        if args.config.endswith(".json"):
            text, replay = _load_manifest(text, args)
        if args.format is None:
            args.format = "csv"
        if args.n_grid is None:
            args.n_grid = list(DEFAULT_GRID)
        named = parse_config(text)
    except ConfigError as exc:
        for issue in exc.issues:
            print(f"config error: {issue}", file=sys.stderr)
        return 1
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    try:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        rows, seeds = [], {}
        for nc in named:
            seed, source = _resolve_seed(args.seed, nc, replay)
            cfg = replace(nc.config, master_seed=seed, threads=args.threads,
                          reps=args.reps if args.reps is not None else nc.config.reps)
            nc = NamedConfig(nc.section, cfg, nc.seed_given)
            seeds[nc.section] = {"master_seed": seed, "source": source, "streams": _stream_doc(seed)}
            rows.extend(HANDLERS[args.subcommand](nc, args))
        data = out_dir / f"{args.subcommand}.{args.format}"
        write_rows(data, COLUMNS[args.subcommand], rows, args.format)
    except Exception as exc:  # runtime failure, reported not raised
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    manifest = {
        "artifact_version": __version__,
        "subcommand": args.subcommand,
        "arguments": {"seed": args.seed, "reps": args.reps, "format": args.format, "threads": args.threads,
                      "n_grid": args.n_grid},
        "config_text": text,
        "experiments": [{"section": nc.section,
                         "alpha": nc.config.step_alpha,
                         "scenery": describe_dependence(nc.config.dependence),
                         "marginal": describe_marginal(nc.config.marginal),
                         "n": nc.config.n, "tau": nc.config.tau, "mode": nc.config.mode} for nc in named],
        "seeds": seeds,
        "outputs": [str(data)],
        "started": started,
        "finished": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return 0


def _load_manifest(text: str, args) -> tuple[str, dict]:
    try:
        man = json.loads(text)
        recorded = man["arguments"]
        if args.reps is None:
            args.reps = recorded["reps"]
        if args.format is None:
            args.format = recorded["format"]
        if args.n_grid is None:
            args.n_grid = list(recorded["n_grid"])
        return man["config_text"], man["seeds"]
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"not a run manifest: {exc}")


def _stream_doc(seed: int) -> dict:
    return {
        "walk (quenched)": f"SeedSequence({seed}, spawn_key=(1,))",
        "walk (annealed rep i)": f"SeedSequence({seed}, spawn_key=(1, i))",
        "scenery (rep i)": f"SeedSequence({seed}, spawn_key=(2, i)) -> 64-bit counter-hash key",
        "q range (rep i)": f"SeedSequence({seed}, spawn_key=(3, i))",
        "q survival (rep i)": f"SeedSequence({seed}, spawn_key=(4, i))",
        "lemma scenery (rep i)": f"SeedSequence({seed}, spawn_key=(2, 7, {seed}, i))",
    }


def main() -> None:
    sys.exit(run_command())
