"""Command-line front end: run solvers, reproduce figures, certify assumptions.

Exit codes: 0 success, 1 numeric/solver failure, 2 usage error, 3 verdict
failure, 4 I/O failure.  The environment variable HOEG_SEED overrides any
configured seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import certify as cert
from .dynamics import ContinuousConfig, simulate
from .errors import ConvergenceError, NumericError
from .problems import OperatorMode, builtin, problem_names
from .recipes import RECIPES, run_recipe
from .solver import SolverConfig, TrajectoryLog, run
from .svgplot import line_plot_svg, trajectory_plot_svg

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_USAGE = 2
EXIT_VERDICT = 3
EXIT_IO = 4


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


@dataclass
class RunConfig:
    """Serializable description of one solver run."""

    problem: str
    p: int = 1
    Lp: Optional[float] = None
    K: int = 1000
    z0: tuple = (0.5, -0.5)
    mode: str = "standard"
    alpha: float = 0.0
    outputs: dict = field(default_factory=dict)  # csv / svg / json_summary paths
    seed: int = 0

    def resolved_lipschitz(self, problem) -> float:
        if self.Lp is not None:
            return float(self.Lp)
        published = problem.published_constants.get(self.p)
        if published is None:
            raise ValueError(
                f"{self.problem!r} has no published L_{self.p}; pass --Lp explicitly"
            )
        return float(published)

    def solver_config(self, problem) -> SolverConfig:
        mode = (OperatorMode.standard() if self.mode == "standard"
                else OperatorMode.competitive(self.alpha))
        return SolverConfig(
            order_p=self.p,
            lipschitz=self.resolved_lipschitz(problem),
            max_iterations=self.K,
            z0=np.array(self.z0, dtype=float),
            operator_mode=mode,
        )

    def to_json(self) -> str:
        payload = {
            "problem": self.problem, "p": self.p, "Lp": self.Lp, "K": self.K,
            "z0": list(self.z0), "mode": self.mode, "alpha": self.alpha,
            "outputs": self.outputs, "seed": self.seed,
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        raw = json.loads(text)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        if "z0" in raw:
            raw["z0"] = tuple(float(v) for v in raw["z0"])
        return cls(**raw)


def _write_run_csv(path: str, log: TrajectoryLog) -> None:
    d = log.records[0].z.size
    header = (["k"] + [f"z_{i}" for i in range(d)] + [f"zhalf_{i}" for i in range(d)]
              + ["lambda", "r", "opnorm", "residual"])
    lines = [",".join(header)]
    for rec in log.records:
        row = ([str(rec.k)] + [_fmt(v) for v in rec.z] + [_fmt(v) for v in rec.z_half]
               + [_fmt(rec.lambda_k), _fmt(rec.displacement_norm),
                  _fmt(rec.op_norm_half), _fmt(rec.subproblem_residual)])
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def _run_summary(config: RunConfig, log: TrajectoryLog) -> dict:
    try:
        slope = cert.fit_rate(log)
    except ValueError:
        slope = None
    return {
        "problem": config.problem,
        "p": config.p,
        "K": config.K,
        "seed": config.seed,
        "z_out": [float(v) for v in log.z_out],
        "out_index": log.out_index,
        "termination": log.termination,
        "min_opnorm": min(rec.op_norm_half for rec in log.records),
        "fitted_slope": slope,
        "records": len(log.records),
    }


def _write_run_svg(path: str, log: TrajectoryLog) -> None:
    norms = np.array([rec.op_norm_half for rec in log.records]) ** 2
    running = np.maximum(np.minimum.accumulate(norms), 1e-300)
    ks = np.arange(1, len(running) + 1)
    if log.records[0].z.size == 2:
        base, ext = os.path.splitext(path)
        trajectory_plot_svg(base + "_trajectory" + ext,
                            [("iterates", [rec.z for rec in log.records])])
    line_plot_svg(path, [("min ||F||^2", ks, running)],
                  xlabel="k+1", ylabel="min ||F||^2", logx=True, logy=True)


def _cmd_run(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            config = RunConfig.from_json(handle.read())
    else:
        if not args.problem:
            print("error: --problem (or --config) is required", file=sys.stderr)
            return EXIT_USAGE
        config = RunConfig(
            problem=args.problem, p=args.p, Lp=args.Lp, K=args.K,
            z0=tuple(args.z0), mode=args.mode, alpha=args.alpha, seed=args.seed,
            outputs={k: v for k, v in
                     (("csv", args.csv), ("svg", args.svg), ("json_summary", args.json))
                     if v},
        )
    if "HOEG_SEED" in os.environ:
        config.seed = int(os.environ["HOEG_SEED"])
    problem = builtin(config.problem)
    log = run(problem, config.solver_config(problem))
    summary = _run_summary(config, log)
    if config.outputs.get("csv"):
        _write_run_csv(config.outputs["csv"], log)
    if config.outputs.get("svg"):
        _write_run_svg(config.outputs["svg"], log)
    if config.outputs.get("json_summary"):
        with open(config.outputs["json_summary"], "w", encoding="utf-8") as handle:
            json.dump(summary, handle, indent=2)
    print(json.dumps(summary, indent=2))
    return EXIT_SOLVER if log.termination == "subproblem_failure" else EXIT_OK


def _cmd_reproduce(args) -> int:
    verdict = run_recipe(args.name, args.out_dir)
    print(json.dumps(verdict, indent=2))
    return EXIT_OK if verdict["ok"] else EXIT_VERDICT


def _cmd_simulate(args) -> int:
    problem = builtin(args.problem)
    config = ContinuousConfig(
        order_p=args.p, t_end=args.t_end, dt=args.dt,
        z0=np.array(args.z0), resolvent_tol=args.tol, norm_floor=args.floor,
    )
    log = simulate(problem, config)
    if log.failed_at is not None:
        print(f"error: resolvent failed at t={log.failed_at}", file=sys.stderr)
        return EXIT_SOLVER
    if args.csv:
        d = log.z.shape[1]
        header = (["t"] + [f"z_{i}" for i in range(d)] + [f"v_{i}" for i in range(d)]
                  + ["opnorm", "energy", "integral"])
        lines = [",".join(header)]
        for i in range(len(log.t)):
            row = ([_fmt(log.t[i])] + [_fmt(v) for v in log.z[i]] + [_fmt(v) for v in log.v[i]]
                   + [_fmt(log.op_norm[i]), _fmt(log.energy[i]), _fmt(log.running_integral[i])])
            lines.append(",".join(row))
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
    print(json.dumps({
        "problem": args.problem, "p": args.p, "t_end": args.t_end, "dt": args.dt,
        "final_opnorm": float(log.op_norm[-1]),
        "integral": float(log.running_integral[-1]),
        "samples": len(log.t),
    }, indent=2))
    return EXIT_OK


def _cmd_certify(args) -> int:
    seed = int(os.environ.get("HOEG_SEED", args.seed))
    problem = builtin(args.problem)
    mode = None if args.alpha is None else OperatorMode.competitive(args.alpha)
    report = cert.certify_problem(
        problem, args.p, q=args.q, mode=mode,
        n_samples=args.samples, seed=seed, workers=args.workers,
    )
    payload = report.to_dict()
    if args.q is not None:
        run_config = RunConfig(problem=args.problem, p=args.p, Lp=args.Lp,
                               K=args.K, z0=tuple(args.z0), seed=seed,
                               mode="standard" if args.alpha is None else "competitive",
                               alpha=args.alpha or 0.0)
        log = run(problem, run_config.solver_config(problem))
        L1 = problem.published_constants.get(1, report.L_hat.get(1))
        payload["decoupled"] = cert.decoupled_threshold_report(
            problem, log, args.p, args.q,
            run_config.resolved_lipschitz(problem), L1,
            n_samples=args.samples, seed=seed, mode=mode,
        )
    if args.json:
        with open(args.json, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _cmd_rate(args) -> int:
    problem = builtin(args.problem)
    config = RunConfig(problem=args.problem, p=args.p, Lp=args.Lp, K=args.K,
                       z0=tuple(args.z0), mode=args.mode, alpha=args.alpha)
    log = run(problem, config.solver_config(problem))
    print(json.dumps({"problem": args.problem, "p": args.p, "K": args.K,
                      "slope": cert.fit_rate(log)}, indent=2))
    return EXIT_OK


def _cmd_list(_args) -> int:
    for name in problem_names():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hoeg",
        description="Higher-order extragradient solvers for min-max problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the solver on a problem")
    run_p.add_argument("--problem")
    run_p.add_argument("--config", help="JSON file with RunConfig fields")
    run_p.add_argument("--p", type=int, default=1)
    run_p.add_argument("--Lp", type=float, default=None)
    run_p.add_argument("--K", type=int, default=1000)
    run_p.add_argument("--z0", type=_parse_vector, default=np.array([0.5, -0.5]))
    run_p.add_argument("--mode", choices=("standard", "competitive"), default="standard")
    run_p.add_argument("--alpha", type=float, default=0.0)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--csv")
    run_p.add_argument("--json")
    run_p.add_argument("--svg")
    run_p.set_defaults(func=_cmd_run)

    rep = sub.add_parser("reproduce", help="run a named figure recipe")
    rep.add_argument("name", choices=sorted(RECIPES))
    rep.add_argument("--out-dir", default="figures")
    rep.set_defaults(func=_cmd_reproduce)

    sim = sub.add_parser("simulate", help="integrate the continuous-time flow")
    sim.add_argument("--problem", required=True)
    sim.add_argument("--p", type=int, default=1)
    sim.add_argument("--t-end", type=float, required=True)
    sim.add_argument("--dt", type=float, required=True)
    sim.add_argument("--z0", type=_parse_vector, default=np.array([1.0, 1.0]))
    sim.add_argument("--tol", type=float, default=1e-10)
    sim.add_argument("--floor", type=float, default=1e-12)
    sim.add_argument("--csv")
    sim.set_defaults(func=_cmd_simulate)

    cfy = sub.add_parser("certify", help="estimate assumption constants")
    cfy.add_argument("--problem", required=True)
    cfy.add_argument("--p", type=int, default=1)
    cfy.add_argument("--q", type=float, default=None,
                     help="also certify the decoupled exponent against a run")
    cfy.add_argument("--alpha", type=float, default=None)
    cfy.add_argument("--samples", type=int, default=10000)
    cfy.add_argument("--seed", type=int, default=0)
    cfy.add_argument("--workers", type=int, default=1)
    cfy.add_argument("--Lp", type=float, default=None)
    cfy.add_argument("--K", type=int, default=2000)
    cfy.add_argument("--z0", type=_parse_vector, default=np.array([0.5, -0.5]))
    cfy.add_argument("--json")
    cfy.set_defaults(func=_cmd_certify)

    rate = sub.add_parser("rate", help="fit the empirical convergence slope of a run")
    rate.add_argument("--problem", required=True)
    rate.add_argument("--p", type=int, default=1)
    rate.add_argument("--Lp", type=float, default=None)
    rate.add_argument("--K", type=int, default=2000)
    rate.add_argument("--z0", type=_parse_vector, default=np.array([1.0, 0.0]))
    rate.add_argument("--mode", choices=("standard", "competitive"), default="standard")
    rate.add_argument("--alpha", type=float, default=0.0)
    rate.set_defaults(func=_cmd_rate)

    lst = sub.add_parser("list", help="list built-in problems")
    lst.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
