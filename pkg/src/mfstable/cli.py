"""Command line: ``mfstable {simulate, estimate, experiment, oracle}``.

Exit codes: 0 success, 2 configuration error (including odd ``n`` and an
empty neighborhood, told apart by the message), 3 degenerate data,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .config import estimator_from_section, experiment_from_config, load_config, model_from_section
from .errors import ConfigError, MfstableError
from .estim import estimate
from .experiment import format_failures, run_experiment, write_experiment
from .filters import FilterSeq, binomial_filter
from .oracle import (
    KernelSpec,
    fixed_point_residual,
    m_t0,
    m_t0_beta_closed,
    m_t0_beta_quadrature,
)
from .sim import HURST_PRESETS, HurstFunction, read_path, simulate, write_path
from .specfun import c_beta

EXIT_OK = 0


def _ints(text):
    return [int(x) for x in text.replace(",", " ").split()]


def _common(p):
    p.add_argument("--config", help="INI file with [model], [estimator], [experiment]")
    p.add_argument("--seed", type=int, help="base seed (overrides the config)")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--out", help="output file (stdout when omitted, where applicable)")


def _model_flags(p):
    g = p.add_argument_group("model overrides")
    g.add_argument("--alpha", type=float)
    g.add_argument("--n", type=int)
    g.add_argument("--H", type=float, help="constant H (replaces the config's H-function)")
    g.add_argument("--hurst-preset", choices=sorted(HURST_PRESETS))
    g.add_argument("--refinement", type=int)
    g.add_argument("--truncation-radius", type=float)
    g.add_argument("--normalization", choices=("unit", "none"))
    g.add_argument("--rule", choices=("cell", "midpoint"))
    g.add_argument("--near-field", type=int,
                   help="grid steps summed cell by cell (0 for the plain Riemann sum)")


def _estimator_flags(p):
    g = p.add_argument_group("estimator overrides")
    g.add_argument("--t0", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--beta1", type=float)
    g.add_argument("--beta2", type=float)
    g.add_argument("--L", type=int, help="binomial filter order")
    g.add_argument("--zero-guard", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfstable",
        description="Simulate multifractional stable paths and estimate H(t0) and alpha.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write one sample path")
    _common(p)
    _model_flags(p)

    p = sub.add_parser("estimate", help="estimate H(t0) and alpha from a path file")
    p.add_argument("path", help="path file written by 'simulate'")
    _common(p)
    _estimator_flags(p)

    p = sub.add_parser("experiment", help="Monte Carlo experiment to CSV")
    _common(p)
    _model_flags(p)
    _estimator_flags(p)
    p.add_argument("--n-values", type=_ints, help="comma separated even n")
    p.add_argument("--replicates", type=int)
    p.add_argument("--no-timing", action="store_true", help="write wall_ms as 0")

    p = sub.add_parser("oracle", help="table of the limiting constants")
    _common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, nargs="+", default=[-0.3],
                   help="one or more beta values")
    p.add_argument("--beta1", type=float, default=-0.4)
    p.add_argument("--beta2", type=float, default=-0.2)
    p.add_argument("--H", type=float, default=0.5, help="H(t0)")
    p.add_argument("--L", type=int, default=2, help="binomial filter order")
    p.add_argument("--filter", type=float, nargs="+", help="explicit coefficients (with --L)")
    p.add_argument("--normalization", choices=("unit", "none"), default="unit")
    return parser


def _model_overrides(args) -> dict:
    ov = {
        "alpha": args.alpha,
        "n": args.n,
        "seed": args.seed,
        "refinement": args.refinement,
        "truncation_radius": args.truncation_radius,
        "normalization": args.normalization,
        "rule": args.rule,
    }
    if args.H is not None:
        ov["hurst"] = HurstFunction.constant(args.H)
    elif args.hurst_preset is not None:
        ov["hurst"] = HURST_PRESETS[args.hurst_preset]()
    ov = {k: v for k, v in ov.items() if v is not None}
    if args.near_field is not None:
        ov["near_field"] = None if args.near_field == 0 else args.near_field
    return ov


def _estimator_overrides(args) -> dict:
    return {
        "t0": args.t0,
        "gamma": args.gamma,
        "beta": args.beta,
        "beta1": args.beta1,
        "beta2": args.beta2,
        "L": args.L,
        "zero_guard": args.zero_guard,
    }


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    cp = load_config(args.config)
    model = model_from_section(cp["model"], _model_overrides(args))
    path = simulate(model)
    target = args.out or f"path_n{model.n}_seed{model.seed}.txt"
    digest = write_path(path, target)
    print(f"n={model.n} seed={model.seed} checksum={digest} file={target}")
    return EXIT_OK


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def cmd_estimate(args) -> int:
    cp = load_config(args.config)
    cfg = estimator_from_section(cp["estimator"], _estimator_overrides(args))
    try:
        path = read_path(args.path)
    except OSError as exc:
        raise ConfigError(f"cannot read path file {args.path}: {exc}") from exc
    res = estimate(path, cfg)
    out = res.to_dict()
    out["d_n_reported"] = _jsonable(out["d_n_reported"])
    out["n"] = path.n
    _emit(json.dumps(out, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cp = load_config(args.config)
    ov = {
        "model": _model_overrides(args),
        "estimator": _estimator_overrides(args),
        "n_values": args.n_values,
        "replicates": args.replicates,
        "seed": args.seed,
        "workers": args.workers,
        "output_path": args.out,
        "timing": False if args.no_timing else None,
    }
    # the experiment seed drives the replicate streams; keep the model's in step
    ov["model"].pop("seed", None)
    cfg = experiment_from_config(cp, ov)
    cfg.estimator.check_gamma(cfg.model.hurst.h_plus)
    records = run_experiment(cfg)
    write_experiment(records, cfg.output_path)
    failed = sum(r.failed for r in records)
    sys.stderr.write(format_failures(records))
    print(f"wrote {len(records)} rows ({failed} failed) to {cfg.output_path}")
    return EXIT_OK


def _fmt(x):
    return "n/a" if x is None else f"{x:.12g}"


def cmd_oracle(args) -> int:
    if args.filter is not None:
        filt = FilterSeq.from_coefficients(args.filter, args.L)
    else:
        filt = binomial_filter(args.L)
    normalized = args.normalization == "unit"
    M = m_t0(KernelSpec(args.alpha, args.H, filt, normalized=normalized))
    lines = [
        f"# alpha={args.alpha!r} H={args.H!r} filter={list(filt.coefficients)} "
        f"normalization={args.normalization}",
        f"M_t0 = {M:.15g}",
        "beta          C_beta             M_beta_quad        M_beta_closed      rel_diff",
    ]
    for beta in args.beta:
        cb = c_beta(beta)
        if -0.5 < beta < 0.0:
            q = m_t0_beta_quadrature(args.alpha, beta, M)
            c = m_t0_beta_closed(args.alpha, beta, M)
            rel = abs(q - c) / abs(c)
        else:
            q = c = rel = None
        lines.append(f"{beta:<13.6g} {cb:<18.15g} {_fmt(q):<18} {_fmt(c):<18} {_fmt(rel)}")
    res = fixed_point_residual(args.alpha, args.beta1, args.beta2, M)
    lines.append(
        f"fixed-point residual |psi(M_b1, M_b2) - h(alpha)| "
        f"(beta1={args.beta1!r}, beta2={args.beta2!r}) = {abs(res):.3e}"
    )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "experiment": cmd_experiment,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except MfstableError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
