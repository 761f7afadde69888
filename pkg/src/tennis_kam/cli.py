"""Command-line entry point: ``tennis-kam <subcommand> --config run.ini``.

CSV payloads (simulate, portrait, and the tables of scan/diffusion) use 17
significant digits. Reports are ``key: value`` blocks. Analysis outcomes
(conclusive, found, confined) are data; the exit status is nonzero only when
the tool itself fails:

    0  ran to completion
    2  bad command line or configuration
    3  orbit solver failure or domain error
    4  I/O failure
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import replace

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .criteria import (
    CriterionReport,
    d_bounds,
    estimate_bc,
    records_from_orbit,
    refined_criterion,
    second_variation_test,
    simple_criterion,
    tennis_thresholds,
)
from .explorer import (
    EnsembleSpec,
    diffusion_search,
    initial_conditions,
    layer_scan,
    lyapunov_max,
    single_step_bound,
)
from .reference import TennisSystem, make_system
from .tennis import DomainError, SolverError, bouncing_motion

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4
SIMULATE_HEADER = ("n", "t_lift", "t_mod1", "v", "e", "residual")
DEFAULT_BUDGET = 10_000_000


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return "none"
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def block(pairs) -> str:
    return "".join(f"{k}: {fmt(v)}\n" for k, v in pairs)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


# -- helpers ------------------------------------------------------------------

def _system(cfg: RunConfig):
    if cfg.kind == "tennis":
        return make_system("tennis", params=cfg.tennis_params())
    return make_system(cfg.kind, k=cfg.k)


def _spec(cfg: RunConfig) -> EnsembleSpec:
    e = cfg.ensemble
    return EnsembleSpec(e.t_grid, e.e_grid, (e.e_low, e.e_high), e.n_steps, cfg.seed)


def _initial_value(cfg: RunConfig) -> float:
    """Second coordinate of the single-orbit initial condition (e or y)."""
    if cfg.v0 is not None:
        return 0.5 * cfg.v0 ** 2 if cfg.kind == "tennis" else cfg.v0
    return 0.5 * (cfg.ensemble.e_low + cfg.ensemble.e_high)


def _second_name(system) -> str:
    return "e" if system.coord == "energy" else "y"


# -- subcommands ----------------------------------------------------------------

def cmd_simulate(cfg: RunConfig, args):
    system = _system(cfg)
    if isinstance(system, TennisSystem):
        v0 = cfg.v0 if cfg.v0 is not None else math.sqrt(2.0 * _initial_value(cfg))
        seg = bouncing_motion(system.params, cfg.t0, v0, cfg.steps)
        rows = [(n, seg.t[n], seg.phase[n], seg.value[n], 0.5 * seg.value[n] ** 2, seg.residuals[n])
                for n in range(len(seg))]
    else:
        seg = system.orbit(cfg.t0, _initial_value(cfg), cfg.steps)
        rows = [(n, seg.t[n], seg.phase[n] / seg.period, seg.value[n], 0.5 * seg.value[n] ** 2, 0.0)
                for n in range(len(seg))]
    return csv_text(SIMULATE_HEADER, rows), None


def cmd_portrait(cfg: RunConfig, args):
    system = _system(cfg)
    spec = _spec(cfg)
    x0, y0 = initial_conditions(system, spec)
    rows = []
    for i, (x, y) in enumerate(zip(x0, y0)):
        seg = system.orbit(float(x), float(y), spec.n_steps)
        rows += [(p / seg.period, v, i) for p, v in zip(seg.phase, seg.value)]
    return csv_text(("t_mod1", _second_name(system), "orbit_id"), rows), None


def _report_pairs(rep: CriterionReport, period: float):
    pairs = [("criterion", rep.criterion), ("conclusive", rep.conclusive),
             ("witness", rep.witness), ("witness_mod", (rep.witness % period) / period),
             ("margin", rep.margin)]
    db = rep.constants
    if db is None:
        pairs.append(("constants", "none"))
    else:
        pairs += [("B_plus", db.B_plus), ("B_minus", db.B_minus), ("C_plus", db.C_plus),
                  ("C_minus", db.C_minus), ("D_plus", db.D_plus), ("D_minus", db.D_minus)]
    if rep.note:
        pairs.append(("note", rep.note))
    return pairs


def cmd_criterion(cfg: RunConfig, args):
    """Sample a, b on unjittered grid orbits and run all three tests."""
    system = _system(cfg)
    e = cfg.ensemble
    xs = np.arange(e.t_grid) * system.period / e.t_grid
    levels = np.linspace(e.e_low, e.e_high, e.e_grid) if e.e_grid > 1 else np.array([e.e_low])
    n = max(cfg.steps, 2)
    records, owners, segments, skipped = [], [], [], 0
    for y in levels:
        for x in xs:
            x, y = float(x), float(y)
            start = system.inverse(x, y) if hasattr(system, "inverse") else (x, y)
            try:
                seg = system.orbit(start[0], start[1], n)
                recs = records_from_orbit(system, seg)
            except (DomainError, SolverError):
                skipped += 1
                continue
            owners += [len(segments)] * len(recs)
            segments.append(seg)
            records += recs
    if not records:
        raise DomainError("no orbit produced usable records")
    simple = simple_criterion(records)
    refined = refined_criterion(records, d_bounds(*estimate_bc(records)))
    worst = owners[int(np.argmin([r.a for r in records]))]
    second = second_variation_test(system, segments[worst])
    out = block(_report_pairs(simple, system.period))
    out += "\n" + block(_report_pairs(refined, system.period))
    out += "\n" + block(_report_pairs(second, system.period))
    out += "\n" + block([("records", len(records)), ("orbits_skipped", skipped)])
    return out, None


def cmd_threshold(cfg: RunConfig, args):
    if cfg.kind != "tennis":
        raise ConfigError(["threshold: only defined for map kind tennis"])
    p = cfg.tennis_params()
    rep = tennis_thresholds(p.norms, p.g, p.v_star)
    pairs = [("e_star_simple", rep.e_star_simple), ("e_star_refined", rep.e_star_refined),
             ("sup_df", rep.sup_df), ("sup_ddf", rep.sup_ddf), ("m", rep.m), ("M", rep.M),
             ("g", rep.g), ("v_star", rep.v_star), ("e_star_lower", rep.e_star_lower)]
    if rep.simple_summands is not None:
        pairs += [(f"summand_{i}", s) for i, s in enumerate(rep.simple_summands)]
    pairs.append(("refined_root", rep.refined_root))
    pairs.append(("surrogate_note", rep.surrogate_note))
    pairs += [(f"note_{i}", s) for i, s in enumerate(rep.notes)]
    return block(pairs), None


def cmd_diffusion(cfg: RunConfig, args):
    system = _system(cfg)
    spec = _spec(cfg)
    A = args.amplitude
    if A is None:
        if not isinstance(system, TennisSystem):
            raise ConfigError(["diffusion: --amplitude is required for reference maps"])
        A = 10.0 * single_step_bound(system.params.norms, spec.e_range[1])
    if not A > 0:
        raise ConfigError(["diffusion: amplitude must be positive"])
    budget = args.budget if args.budget is not None else DEFAULT_BUDGET
    res = diffusion_search(system, A, budget, spec)
    pairs = [("found", res.found), ("amplitude_target", A),
             ("achieved_amplitude", res.achieved_amplitude), ("budget_used", res.budget_used),
             ("budget", budget), ("n_steps", res.n_steps)]
    table = None
    if res.found:
        seg = res.orbit
        pairs += [("ic_t", res.ic.t), (f"ic_{_second_name(system)}", res.ic.value)]
        if system.coord == "energy":
            v = np.sqrt(2.0 * seg.value)
            pairs.append(("achieved_amplitude_v", float(v.max() - v.min())))
        table = csv_text(("n", "t_lift", "t_mod1", _second_name(system)),
                         [(n, seg.t[n], seg.phase[n] / seg.period, seg.value[n]) for n in range(len(seg))])
    return block(pairs), table


def cmd_lyapunov(cfg: RunConfig, args):
    system = _system(cfg)
    res = lyapunov_max(system, (cfg.t0, _initial_value(cfg)), max(cfg.steps, 1), cfg.renorm_every)
    pairs = [("lambda", res.value), ("tail_mean", res.tail_mean), ("n_steps", res.n_done),
             ("renorm_every", cfg.renorm_every), ("t0", cfg.t0),
             (_second_name(system) + "0", _initial_value(cfg))]
    return block(pairs), None


def cmd_scan(cfg: RunConfig, args):
    system = _system(cfg)
    e = cfg.ensemble
    res = layer_scan(system, (e.e_low, e.e_high), e.e_grid, beta=args.beta,
                     n_probe=e.t_grid, n_steps=e.n_steps)
    pairs = [("levels", len(res.levels)), ("beta", args.beta), ("n_steps", e.n_steps),
             ("lowest_unconfined", res.lowest_unconfined)]
    table = csv_text(("e", "confined", "spread"), zip(res.levels, res.confined, res.spread))
    return block(pairs), table


COMMANDS = {
    "simulate": cmd_simulate,
    "portrait": cmd_portrait,
    "criterion": cmd_criterion,
    "threshold": cmd_threshold,
    "diffusion": cmd_diffusion,
    "lyapunov": cmd_lyapunov,
    "scan": cmd_scan,
}
# commands whose main product is a table; the others print a report
TABLE_FIRST = {"simulate", "portrait"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tennis-kam", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="run configuration file")
    ap.add_argument("--out", help="output path (overrides [run] output)")
    ap.add_argument("--steps", type=int, help="orbit length (ensemble length for ensemble commands)")
    ap.add_argument("--t0", type=float, help="initial time / angle")
    ap.add_argument("--v0", type=float, help="initial velocity (tennis) or momentum")
    ap.add_argument("--k", type=float, help="standard-map kick; without --config selects that map")
    ap.add_argument("--amplitude", type=float, help="diffusion target in the energy scale")
    ap.add_argument("--budget", type=int, help="diffusion budget in map evaluations")
    ap.add_argument("--seed", type=int, help="ensemble jitter seed")
    ap.add_argument("--beta", type=float, default=0.1, help="scan band width relative to e")
    return ap


def resolve_config(args) -> RunConfig:
    if args.config:
        cfg = load_config(args.config)
    elif args.k is not None:
        cfg = RunConfig(kind="standard", k=args.k)
    else:
        raise ConfigError(["either --config or --k is required"])
    if args.k is not None:
        if cfg.kind != "standard":
            raise ConfigError([f"--k: unknown key for map kind {cfg.kind}"])
        if args.k < 0:
            raise ConfigError(["--k must be >= 0"])
        cfg = replace(cfg, k=args.k)
    over = {}
    if args.steps is not None:
        if args.steps < 0:
            raise ConfigError(["--steps must be >= 0"])
        if args.command in ("portrait", "diffusion", "scan"):
            cfg = replace(cfg, ensemble=replace(cfg.ensemble, n_steps=args.steps))
        else:
            over["steps"] = args.steps
    if args.t0 is not None:
        over["t0"] = args.t0
    if args.v0 is not None:
        over["v0"] = args.v0
    if args.seed is not None:
        over["seed"] = args.seed
    if args.out is not None:
        over["output"] = args.out
    return replace(cfg, **over)


def run(argv=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        report, table = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, DomainError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command in TABLE_FIRST:
            _emit(report, cfg.output, stdout)
        elif table is not None and cfg.output:
            _emit(table, cfg.output, stdout)
            stdout.write(report)
        else:
            _emit(report, cfg.output, stdout)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _emit(text: str, path, stdout):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
