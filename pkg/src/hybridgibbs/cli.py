"""Command-line interface.

Subcommands:
  analyze    build the configured kernels and report their spectra
  check      run certification suites; exit 0 when nothing fails,
             1 on a failed bound, 2 on input errors
  simulate   run a trajectory and cross-validate the asymptotic variance
  demo       print (or run) a builtin demo model
  list-demos list builtin demo names

The state-space cap honours the HYBRIDGIBBS_STATE_CAP environment variable.
"""

import argparse
import json
import sys

import numpy as np

from .config import canonicalize, parse_config, serialize
from .demos import demo_config, list_demos
from .errors import HybridGibbsError
from .gibbs import exact_random_scan, hybrid_random_scan
from .simulate import cross_validate_variance, simulate, stepper_backend, write_trajectory
from .slicemodel import slice_exact, slice_hybrid
from .spectral import spectral_summary
from .suite import run_suite


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hybridgibbs",
        description="Exact spectral certification of hybrid Gibbs chains "
        "on finite state spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="build kernels and report spectra")
    p_analyze.add_argument("config")
    p_analyze.add_argument("--out", default=None)

    p_check = sub.add_parser("check", help="run certification suites")
    p_check.add_argument("config")
    p_check.add_argument(
        "--suite",
        default=None,
        help="comma-separated: random-scan,da,block,slice,selection,supplement or all",
    )
    p_check.add_argument("--t", default=None, help="comma-separated step counts, e.g. 2,4,8")
    p_check.add_argument("--tol", type=float, default=None)
    p_check.add_argument("--out", default=None, help="write the JSON report here")
    p_check.add_argument("--csv", default=None, help="also write a CSV table here")

    p_sim = sub.add_parser("simulate", help="simulate and cross-validate variance")
    p_sim.add_argument("config")
    p_sim.add_argument("--kernel", choices=["exact", "hybrid"], default="exact")
    p_sim.add_argument("--steps", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--f", default="coord:0", help="coord:<i> or vector:<csv>")
    p_sim.add_argument("--batch", type=int, default=None)
    p_sim.add_argument("--traj-out", default=None, help="write the trajectory here")

    p_demo = sub.add_parser("demo", help="print or run a builtin demo")
    p_demo.add_argument("name")
    p_demo.add_argument("--run", action="store_true")
    p_demo.add_argument("--out", default=None)

    sub.add_parser("list-demos", help="list builtin demo names")
    return parser


def _parse_suites(raw):
    if raw is None or raw == "all":
        return raw
    return [s.strip() for s in raw.split(",") if s.strip()]


def _observable(raw, rev, config):
    if raw.startswith("coord:"):
        i = int(raw.split(":", 1)[1])
        if config.is_slice:
            if i != 0:
                raise HybridGibbsError("slice models have a single coordinate")
            return np.arange(rev.n, dtype=float)
        joint = config.build_joint()
        if not 0 <= i < joint.space.ncoords:
            raise HybridGibbsError(f"coordinate {i} out of range")
        return np.array([joint.space.decode(s)[i] for s in range(joint.n)], dtype=float)
    if raw.startswith("vector:"):
        vals = np.array([float(v) for v in raw.split(":", 1)[1].split(",")], dtype=float)
        if vals.size != rev.n:
            raise HybridGibbsError(f"expected {rev.n} values, got {vals.size}")
        return vals
    raise HybridGibbsError("--f must look like coord:<i> or vector:<csv>")


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_analyze(args):
    config = parse_config(args.config)
    report = run_suite(config, suites=[])
    _emit(report.to_json(), args.out)
    return 0


def _cmd_check(args, config=None):
    config = config if config is not None else parse_config(args.config)
    suites = _parse_suites(getattr(args, "suite", None))
    t_values = None
    if getattr(args, "t", None):
        t_values = [int(v) for v in args.t.split(",") if v.strip()]
    report = run_suite(config, suites=suites, t_values=t_values, tol=getattr(args, "tol", None))
    _emit(report.to_json(), getattr(args, "out", None))
    if getattr(args, "csv", None):
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv())
    return report.exit_status()


def _cmd_simulate(args):
    config = parse_config(args.config)
    if config.is_slice:
        model = config.build_slice_model()
        rev = slice_exact(model) if args.kernel == "exact" else slice_hybrid(model)
    else:
        joint = config.build_joint()
        if args.kernel == "exact":
            rev = exact_random_scan(joint, config.selection())
        else:
            rev = hybrid_random_scan(joint, config.selection(), config.approximator_spec())
    f = _observable(args.f, rev, config)
    report = cross_validate_variance(
        rev, f, args.steps, args.seed, batch=args.batch, fingerprint=config.fingerprint
    )
    if args.traj_out:
        traj = simulate(rev, rev.stationary, args.steps, args.seed)
        write_trajectory(traj, args.traj_out)
    out = {
        "kernel": args.kernel,
        "spectral": spectral_summary(rev).to_dict(),
        "report": report.to_dict(),
        "stepper_backend": stepper_backend(),
    }
    sys.stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")
    return 0 if report.status != "fail" else 1


def _cmd_demo(args):
    config = canonicalize(demo_config(args.name))
    if not args.run:
        _emit(serialize(config), args.out)
        return 0
    ns = argparse.Namespace(suite=None, t=None, tol=None, out=args.out, csv=None)
    return _cmd_check(ns, config=config)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "demo":
            return _cmd_demo(args)
        if args.command == "list-demos":
            sys.stdout.write("\n".join(list_demos()) + "\n")
            return 0
    except (HybridGibbsError, KeyError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
