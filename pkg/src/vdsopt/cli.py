"""Command-line interface.

Subcommands: coherence, optimize, sample, recover, experiment, mri-prior.
Experiment spec files are line-oriented ``key = value`` text; every key is
also a flag, and flags override the file.  The seed can be overridden with
the VDSOPT_SEED environment variable.
"""

import argparse
import csv
import os
import sys

import numpy as np

from . import __version__
from .coherence import build_B, build_C
from .harness import (ExperimentSpec, SEED_ENV_VAR, emit_outputs,
                      gen_mri_like_supports, ingest_coefficient_dataset,
                      ingest_support_dataset, make_pair, run_phase_transition,
                      spec_from_dict, spec_from_file)
from .profile_opt import OptConfig, optimize_profile
from .profiles import SamplingProfile, uniform_profile
from .recovery import BPConfig, basis_pursuit, is_recovered
from .sampling import RngSeed, bernoulli_select, gen_sparse_signal, measure


def _env_seed(default: int) -> int:
    return int(os.environ.get(SEED_ENV_VAR, default))


def _add_pair_args(sub):
    sub.add_argument("--sensing", default="fourier")
    sub.add_argument("--sparsity", default="haar")
    sub.add_argument("--n", type=int, default=256)


def cmd_coherence(args) -> int:
    pair = make_pair(args.sensing, args.sparsity, args.n)
    if args.prior:
        dataset = ingest_support_dataset(args.prior, n=args.n)
        diag = build_C(pair, dataset.supports, dataset.s)
    else:
        diag = build_B(pair)
    diag.save_csv(args.output)
    print(f"wrote {diag.kind} diagonal for {diag.pair_descriptor} "
          f"to {args.output}")
    return 0


def cmd_optimize(args) -> int:
    pair = make_pair(args.sensing, args.sparsity, args.n)
    if args.prior:
        dataset = ingest_support_dataset(args.prior, n=args.n)
        diag = build_C(pair, dataset.supports, dataset.s)
    else:
        diag = build_B(pair)
    cfg = OptConfig(lam=args.lam, tau=args.tau, m=args.m)
    profile, trace = optimize_profile(diag, cfg)
    profile.save_csv(args.output)
    if args.trace:
        trace.save_csv(args.trace)
    print(f"optimized profile: sum={profile.p.sum():.6g}, "
          f"objective={trace.objective[-1]:.6g}, "
          f"iterations={len(trace.objective)}")
    return 0


def cmd_sample(args) -> int:
    if args.profile:
        profile = SamplingProfile.load_csv(args.profile, args.m)
    else:
        profile = uniform_profile(args.n, args.m)
    omega = bernoulli_select(profile, RngSeed(_env_seed(args.seed)))
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index"])
        for i in omega:
            writer.writerow([i])
    print(f"selected {len(omega)} indices (budget {args.m})")
    return 0


def cmd_recover(args) -> int:
    pair = make_pair(args.sensing, args.sparsity, args.n)
    seed = RngSeed(_env_seed(args.seed))
    signal = gen_sparse_signal(args.n, args.s, seed.child(0))
    if args.profile:
        profile = SamplingProfile.load_csv(args.profile, args.m)
    else:
        profile = uniform_profile(args.n, args.m)
    omega = bernoulli_select(profile, seed.child(1))
    ms = measure(signal, omega, pair)
    alpha_hat = basis_pursuit(ms.y, omega, pair, BPConfig())
    ok = is_recovered(signal.alpha, alpha_hat)
    rel = (np.linalg.norm(alpha_hat - signal.alpha)
           / max(np.linalg.norm(signal.alpha), 1e-300))
    print(f"|omega|={len(omega)} recovered={ok} rel_error={rel:.3e} "
          f"iterations={alpha_hat.iterations}")
    return 0 if ok else 1


def _spec_from_args(args) -> ExperimentSpec:
    overrides = {key: getattr(args, key) for key in
                 ("sensing", "sparsity", "n", "s", "m_grid", "trials", "arms",
                  "seed", "outdir", "lam", "tau", "signal_model",
                  "scale_decay", "prior_file", "workers")
                 if getattr(args, key, None) is not None}
    if args.spec_file:
        return spec_from_file(args.spec_file, overrides)
    return spec_from_dict({k: str(v) for k, v in overrides.items()})


def cmd_experiment(args) -> int:
    spec = _spec_from_args(args)
    curves, profiles, traces = run_phase_transition(spec)
    emit_outputs(spec, curves, profiles, traces, plot=args.plot)
    for arm, curve in curves.items():
        eps = " ".join(f"{e:.2f}" for e in curve.eps)
        print(f"{arm}: eps = [{eps}] over m = {list(curve.m)}")
    print(f"outputs in {spec.outdir}")
    return 0


def cmd_mri_prior(args) -> int:
    pair = make_pair(args.sensing, args.sparsity, args.n)
    if args.dataset:
        if args.coefficients:
            dataset = ingest_coefficient_dataset(args.dataset, args.s, args.n)
        else:
            dataset = ingest_support_dataset(args.dataset, n=args.n)
    else:
        dataset = gen_mri_like_supports(args.n, args.s, args.count,
                                        args.scale_decay,
                                        RngSeed(_env_seed(args.seed)))
        print("using synthetic mri-like supports (no dataset supplied)")
    diag = build_C(pair, dataset.supports, dataset.s)
    cfg = OptConfig(lam=args.lam, tau=args.tau, m=args.m)
    profile, trace = optimize_profile(diag, cfg)
    profile.save_csv(args.output)
    print(f"prior-informed profile from {len(dataset.supports)} supports: "
          f"sum={profile.p.sum():.6g}, objective={trace.objective[-1]:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdsopt",
        description="Variable-density sampling profile optimization and "
                    "sparse-recovery experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("coherence", help="emit a coherence diagonal as CSV")
    _add_pair_args(p)
    p.add_argument("--prior", default="", help="support dataset file (build C)")
    p.add_argument("--output", "-o", default="diagonal.csv")
    p.set_defaults(func=cmd_coherence)

    p = subs.add_parser("optimize", help="optimize a sampling profile")
    _add_pair_args(p)
    p.add_argument("--lambda", dest="lam", type=float, default=0.05)
    p.add_argument("--tau", type=float, default=1e-3)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--prior", default="", help="support dataset file (use C)")
    p.add_argument("--trace", default="", help="write convergence trace CSV")
    p.add_argument("--output", "-o", default="profile.csv")
    p.set_defaults(func=cmd_optimize)

    p = subs.add_parser("sample", help="draw one Bernoulli index set")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--profile", default="", help="profile CSV (else uniform)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default="omega.csv")
    p.set_defaults(func=cmd_sample)

    p = subs.add_parser("recover", help="solve one synthetic instance")
    _add_pair_args(p)
    p.add_argument("--s", type=int, default=12)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--profile", default="")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_recover)

    p = subs.add_parser("experiment", help="run a phase-transition experiment")
    p.add_argument("spec_file", nargs="?", default="",
                   help="key = value spec file (flags override)")
    p.add_argument("--sensing")
    p.add_argument("--sparsity")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--m-grid", dest="m_grid", help="comma-separated budgets")
    p.add_argument("--trials", type=int)
    p.add_argument("--arms", help="comma-separated arm names")
    p.add_argument("--seed", type=int)
    p.add_argument("--outdir")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--signal-model", dest="signal_model")
    p.add_argument("--scale-decay", dest="scale_decay", type=float)
    p.add_argument("--prior-file", dest="prior_file")
    p.add_argument("--workers", type=int)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = subs.add_parser("mri-prior",
                        help="build C from a dataset and optimize a profile")
    _add_pair_args(p)
    p.set_defaults(sparsity="daubechies4")
    p.add_argument("--s", type=int, default=50)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.05)
    p.add_argument("--tau", type=float, default=1e-3)
    p.add_argument("--dataset", default="", help="support dataset file")
    p.add_argument("--coefficients", action="store_true",
                   help="dataset holds dense coefficient vectors to threshold")
    p.add_argument("--count", type=int, default=150,
                   help="synthetic supports to generate when no dataset")
    p.add_argument("--scale-decay", dest="scale_decay", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default="profile_prior.csv")
    p.set_defaults(func=cmd_mri_prior)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
