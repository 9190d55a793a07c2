"""Command-line harness for the amplitude-damping bottleneck experiments.

Exit codes: 0 success, 2 invariant violation, 3 non-convergence, 4 I/O or
parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiment as ex
from .bottleneck import xmq_probe
from .config import SolverConfig
from .errors import ConvergenceError, InvariantViolation, ParseError
from .mixture import e_project
from .plotting import emit_plot
from .serialization import (
    family_from_json,
    operator_from_json,
    operator_to_json,
    read_json,
    write_json,
)

EXIT_OK, EXIT_INVARIANT, EXIT_NONCONVERGENCE, EXIT_IO = 0, 2, 3, 4

RHO_T_CHOICES = {
    "zero": ((1.0, 0.0), (0.0, 0.0)),
    "mixed": ((0.5, 0.0), (0.0, 0.5)),
}

log = logging.getLogger("gqab")


def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--lambda", dest="lam", type=float, default=0.7, help="amplitude-damping decay")
    p.add_argument("--p", type=float, default=0.3, help="depolarizing weight in rho_X")
    p.add_argument("--n", type=int, default=40, help="number of rotation steps for initial states")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=None, help="step parameter (default: alpha)")
    p.add_argument("--seed", type=int, default=0, help="seed of the random ancilla unitary")
    p.add_argument("--rho-t", choices=sorted(RHO_T_CHOICES), default="zero", help="memory start state")
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-10, help="relative objective change for stopping")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for sweeps")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")


def _config(args, **overrides) -> ex.ExperimentConfig:
    solver = SolverConfig(max_iters=args.max_iter, tol_obj=args.tol)
    fields = dict(
        lam=args.lam,
        p=args.p,
        n=args.n,
        alpha=args.alpha,
        gamma=args.gamma,
        seed=args.seed,
        rho_t=RHO_T_CHOICES[args.rho_t],
        solver=solver,
    )
    fields.update(overrides)
    return ex.ExperimentConfig(**fields)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_run(args):
    cfg = _config(args, beta=args.beta, k=args.k)
    res = ex.run_single(cfg)
    _emit(res.to_csv(), args.out)
    tr = res.trace
    log.info(
        "%s after %d iterations: objective %.12g, fixed-point residual %.3e, monotone=%s",
        tr.reason, tr.iterations, tr.final_objective, res.fixpoint_residual, tr.monotone_guaranteed,
    )
    if args.restart:
        again = ex.run_single(cfg, start=tr.final_state)
        log.info("restart from converged state: objective change %.3e", again.objective - tr.final_objective)
    if tr.reason != "converged":
        raise ConvergenceError(f"no convergence within {cfg.solver.max_iters} iterations")


def _run_sweep(fn, cfg, args, **kw):
    try:
        res = fn(cfg, jobs=args.jobs, **kw)
    except (InvariantViolation, ConvergenceError) as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None:
            _emit(partial.to_csv(), args.out)
        raise
    _emit(res.to_csv(), args.out)


def cmd_sweep_k(args):
    cfg = _config(args, beta=args.beta, k=0)
    _run_sweep(ex.sweep_k, cfg, args)


def cmd_sweep_beta(args):
    cfg = _config(args, k=args.k)
    grid = ex.inverse_beta_grid(args.inv_beta_min, args.inv_beta_max, args.inv_beta_step)
    _run_sweep(ex.sweep_beta, cfg, args, inv_betas=grid)


def cmd_project(args):
    rho, dims = operator_from_json(read_json(args.state))
    fam = family_from_json(read_json(args.family))
    if tuple(dims) != fam.dims:
        raise ParseError(f"state dims {dims} do not match family dims {fam.dims}")
    res = e_project(rho, fam, SolverConfig(tol_proj=args.tol_proj, max_proj_iters=args.max_proj_iter))
    out = {
        "projected": operator_to_json(res.projected, dims),
        "tau": res.tau.tolist(),
        "iterations": res.iterations,
        "grad_norm": res.grad_norm,
    }
    if args.out is None:
        sys.stdout.write(json.dumps(out, indent=1) + "\n")
    else:
        write_json(args.out, out)


def cmd_probe_xmq(args):
    cfg = _config(args, beta=args.beta)
    value, _ = xmq_probe(cfg.problem(), args.trials, args.seed)
    _emit(f"min_value,{value!r}\nviolated,{int(value < 0)}\n", args.out)


def cmd_plot(args):
    emit_plot(args.csv, args.out, x=args.x, y=args.y or None, title=args.title)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gqab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single run, per-iteration trace CSV")
    _add_model_args(p)
    p.add_argument("--beta", type=float, default=5.0)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--restart", action="store_true", help="re-run from the converged state")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-k", help="converged objective for every k in 0..n-1")
    _add_model_args(p)
    p.add_argument("--beta", type=float, default=2.0)
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("sweep-beta", help="converged objective over a 1/beta grid")
    _add_model_args(p)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--inv-beta-min", type=float, default=0.11)
    p.add_argument("--inv-beta-max", type=float, default=0.30)
    p.add_argument("--inv-beta-step", type=float, default=0.01)
    p.set_defaults(func=cmd_sweep_beta)

    p = sub.add_parser("project", help="e-projection of a state (JSON) onto a family (JSON)")
    p.add_argument("--state", type=Path, required=True)
    p.add_argument("--family", type=Path, required=True)
    p.add_argument("--tol-proj", type=float, default=1e-10)
    p.add_argument("--max-proj-iter", type=int, default=10000)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("probe-xmq", help="random search for violations of the global-optimality condition")
    _add_model_args(p)
    p.add_argument("--beta", type=float, default=5.0)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_probe_xmq)

    p = sub.add_parser("plot", help="SVG line chart from a trace or sweep CSV")
    p.add_argument("csv", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--x", default=None)
    p.add_argument("--y", action="append", default=[])
    p.add_argument("--title", default=None)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    try:
        args.func(args)
    except InvariantViolation as exc:
        log.error("invariant violation: %s", exc)
        return EXIT_INVARIANT
    except ConvergenceError as exc:
        log.error("no convergence: %s", exc)
        return EXIT_NONCONVERGENCE
    except (ParseError, OSError, ValueError) as exc:
        log.error("error: %s", exc)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
