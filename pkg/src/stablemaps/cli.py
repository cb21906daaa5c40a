"""Command-line entry point.

Subcommands:

- ``model solve``    solve the partition function, emit a JSON table
- ``peel run``       one exploration (trace CSV) or cell system (JSON)
- ``levy sample``    sample a continuum path to CSV
- ``verify <exp>``   run a harness experiment; exit 0 iff its gates pass
- ``report``         delegate to the figure/report renderer, if installed
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .cells import run_cell_system
from .exploration import run_exploration
from .experiments import EXPERIMENTS, default_config, load_config, \
    run_experiment
from .gf import growth_fragmentation
from .lamperti import lamperti
from .levy import sample_cauchy, sample_xi
from .partition import solve_partition_function
from .upsilon import sample_upsilon_up
from .weights import PRESET_NAME, make_weight_sequence

__all__ = ["main"]


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w")


def _close_out(fh):
    if fh is not sys.stdout:
        fh.close()


# ----------------------------------------------------------------------------
# model solve


def _model_table(args):
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        q = cfg.get("preset", cfg.get("q", PRESET_NAME))
        L_max = int(cfg.get("L_max", args.L_max))
        tol = float(cfg.get("tol", args.tol))
    else:
        q, L_max, tol = args.preset, args.L_max, args.tol
    return solve_partition_function(make_weight_sequence(q), L_max=L_max,
                                    tol=tol)


def _cmd_model_solve(args) -> int:
    table = _model_table(args)
    fh = _open_out(args.out)
    json.dump(table.to_dict(), fh, indent=2, default=float)
    fh.write("\n")
    _close_out(fh)
    return 0


# ----------------------------------------------------------------------------
# peel run


def _cmd_peel_run(args) -> int:
    table = _model_table(args)
    rng = np.random.default_rng(args.seed)
    if args.out and args.out.endswith(".json"):
        # cell-system form: breadth-first branching exploration
        cs = run_cell_system(table, args.perimeter, algo=args.algo,
                             cutoff=args.cutoff, rng=rng,
                             max_steps=args.max_steps, mode=args.mode)
        fh = _open_out(args.out)
        json.dump(cs.to_dict(), fh, indent=2)
        fh.write("\n")
        _close_out(fh)
        return 0
    tr = run_exploration(table, args.perimeter, algo=args.algo,
                         mode=args.mode, rng=rng, max_steps=args.max_steps)
    faces = {step: deg for deg, step, _h in tr.faces}
    fh = _open_out(args.out)
    fh.write("step,P,H,T,event_kind,event_param,face_degree\n")
    fh.write(f"0,{tr.P[0]},{tr.H[0]},0,,,\n")
    for n, ev in enumerate(tr.events):
        param = ev.k if ev.kind == "C" else ev.j
        kind = ev.kind if ev.kind == "C" else f"G{ev.side[0]}"
        deg = faces.get(n, "")
        fh.write(f"{n + 1},{tr.P[n + 1]},{tr.H[n + 1]},"
                 f"{tr.T[n + 1]:.17g},{kind},{param},{deg}\n")
    _close_out(fh)
    return 0


# ----------------------------------------------------------------------------
# levy sample


def _parse_grid(spec: str) -> np.ndarray:
    """Either comma-separated times or start:stop:num (inclusive)."""
    if ":" in spec:
        lo, hi, n = spec.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    return np.asarray([float(x) for x in spec.split(",")])


def _cmd_levy_sample(args) -> int:
    rng = np.random.default_rng(args.seed)
    grid = _parse_grid(args.grid)
    fh = _open_out(args.out)
    if args.process == "gf":
        states = growth_fragmentation(args.start, args.alpha, grid,
                                      args.delta, rng=rng,
                                      eps_cut=args.eps_cut)
        fh.write("time,value,ulam_label,birth_time\n")
        for st in states:
            for size, label, birth in st.cells:
                fh.write(f"{st.t:.17g},{size:.17g},{label or 'root'},"
                         f"{birth:.17g}\n")
        _close_out(fh)
        return 0

    if args.process == "xi":
        path = sample_xi(args.horizon, args.eps_cut, rng, start=args.start)
        values = path(np.clip(grid, 0.0, args.horizon))
    elif args.process == "cauchy":
        path = sample_cauchy(args.start, args.horizon, args.eps_cut, rng)
        values = path(np.clip(grid, 0.0, args.horizon))
    elif args.process == "upsilon":
        # conditioned process: resample one path proportionally to its
        # importance weight so the output is (approximately) unweighted
        ens = sample_upsilon_up(args.horizon, 64, rng, args.eps_cut)
        w = ens.weights / ens.weights.sum()
        path = ens.paths[rng.choice(len(w), p=w)]
        values = path(np.clip(grid, 0.0, args.horizon))
    elif args.process == "x-alpha":
        xi = sample_xi(args.horizon, args.eps_cut, rng)
        res = lamperti(xi, args.alpha, args.start, grid, rng=rng)
        values = res.values
    else:  # pragma: no cover - argparse enforces choices
        raise ValueError(args.process)

    fh.write("time,value\n")
    for t, v in zip(grid, values):
        fh.write(f"{t:.17g},{v:.17g}\n")
    _close_out(fh)
    return 0


# ----------------------------------------------------------------------------
# verify


def _cmd_verify(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        if cfg.experiment != args.experiment:
            raise SystemExit(f"config is for {cfg.experiment!r}, "
                             f"not {args.experiment!r}")
    else:
        over = {}
        if args.seed is not None:
            over["master_seed"] = args.seed
        if args.cache_dir is not None:
            over["cache_dir"] = args.cache_dir
        if args.n is not None:
            over["N"] = args.n
        cfg = default_config(args.experiment, **over)
    summary = run_experiment(cfg, out_dir=args.out)
    json.dump(summary.verdict(), sys.stdout, indent=2, default=float)
    sys.stdout.write("\n")
    return 0 if summary.passed else 1


# ----------------------------------------------------------------------------
# report (delegates to the renderer package when installed)


def _cmd_report(args, extra) -> int:
    try:
        from reportplots.cli import main as report_main
    except ImportError:
        sys.stderr.write("the 'reportplots' package is not installed; "
                         "install it to render figures\n")
        return 2
    argv = []
    if args.in_dir:
        argv += ["--in", args.in_dir]
    if args.out:
        argv += ["--out", args.out]
    if args.format:
        argv += ["--format", args.format]
    return report_main(argv + extra)


# ----------------------------------------------------------------------------


def _add_model_flags(p):
    p.add_argument("--preset", default=PRESET_NAME,
                   help="weight-sequence preset name")
    p.add_argument("--config", default=None,
                   help="model config JSON (preset or inline q, L_max, tol)")
    p.add_argument("--L-max", type=int, default=256, dest="L_max")
    p.add_argument("--tol", type=float, default=1e-10)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stablemaps",
        description="peeling explorations of critical planar maps and "
                    "statistical checks of their scaling limits")
    sub = ap.add_subparsers(dest="command", required=True)

    p_model = sub.add_parser("model", help="weight models")
    msub = p_model.add_subparsers(dest="subcommand", required=True)
    p_solve = msub.add_parser("solve",
                              help="solve the partition function (JSON out)")
    _add_model_flags(p_solve)
    p_solve.add_argument("--out", default=None, help="output path (- stdout)")

    p_peel = sub.add_parser("peel", help="peeling explorations")
    psub = p_peel.add_subparsers(dest="subcommand", required=True)
    p_run = psub.add_parser(
        "run", help="run one exploration; --out *.csv writes the step "
                    "trace, --out *.json writes the branching cell system")
    _add_model_flags(p_run)
    p_run.add_argument("--perimeter", type=int, required=True,
                       help="root boundary half-perimeter")
    p_run.add_argument("--algo", choices=("uniform", "layers"),
                       default="uniform")
    p_run.add_argument("--mode", choices=("finite", "infinite"),
                       default="finite")
    p_run.add_argument("--cutoff", type=int, default=1,
                       help="minimum child half-perimeter (cell system)")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--max-steps", type=int, default=100000)
    p_run.add_argument("--out", default=None)

    p_levy = sub.add_parser("levy", help="continuum samplers")
    lsub = p_levy.add_subparsers(dest="subcommand", required=True)
    p_samp = lsub.add_parser("sample", help="sample one path to CSV")
    p_samp.add_argument("--process", required=True,
                        choices=("xi", "cauchy", "upsilon", "x-alpha", "gf"))
    p_samp.add_argument("--alpha", type=float, default=-1.0)
    p_samp.add_argument("--start", type=float, default=1.0)
    p_samp.add_argument("--horizon", type=float, default=1.0)
    p_samp.add_argument("--eps-cut", type=float, default=0.01)
    p_samp.add_argument("--delta", type=float, default=0.05,
                        help="growth-fragmentation child cutoff")
    p_samp.add_argument("--grid", default="0:1:101",
                        help="times: a,b,c or start:stop:num")
    p_samp.add_argument("--seed", type=int, default=None)
    p_samp.add_argument("--out", default=None)

    p_ver = sub.add_parser("verify",
                           help="run a verification experiment")
    p_ver.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p_ver.add_argument("--config", default=None,
                       help="experiment config JSON")
    p_ver.add_argument("--out", default=None, help="output directory")
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--cache-dir", default=None)
    p_ver.add_argument("-n", type=int, default=None,
                       help="override the replicate budget")

    p_rep = sub.add_parser("report", help="render figures from harness CSVs")
    p_rep.add_argument("--in", dest="in_dir", default=None)
    p_rep.add_argument("--out", default=None)
    p_rep.add_argument("--format", choices=("svg", "png"), default=None)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args, extra = ap.parse_known_args(argv)
    if extra and args.command != "report":
        ap.error(f"unrecognized arguments: {' '.join(extra)}")
    if args.command == "model":
        return _cmd_model_solve(args)
    if args.command == "peel":
        return _cmd_peel_run(args)
    if args.command == "levy":
        return _cmd_levy_sample(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "report":
        return _cmd_report(args, extra)
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
