"""Experiment orchestration: profiles per arm, Monte-Carlo recovery curves,
support-prior ingestion, and CSV/plot emission.

Every trial is seeded from (experiment seed, arm, budget, trial), so results
are a pure function of the manifest and independent of worker count.
"""

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import transforms as tr
from .coherence import CoherenceDiagonal, build_B, build_C
from .profile_opt import OptConfig, OptTrace, optimize_profile
from .profiles import SamplingProfile, renormalize_to_budget, uniform_profile
from .recovery import BPConfig, basis_pursuit, is_recovered
from .sampling import RngSeed, bernoulli_select, gen_sparse_signal, measure

SEED_ENV_VAR = "VDSOPT_SEED"

KNOWN_ARMS = ("uniform", "optimized_B", "optimized_C", "spread_spectrum")


@dataclass(frozen=True)
class ExperimentSpec:
    sensing: str = "fourier"
    sparsity: str = "haar"
    n: int = 256
    s: int = 12
    m_grid: Tuple[float, ...] = ()
    trials: int = 100
    arms: Tuple[str, ...] = ("uniform", "optimized_B")
    seed: int = 0
    outdir: str = "out"
    lam: float = 0.05
    tau: float = 1e-3
    signal_model: str = "uniform"   # or "mri_like"
    scale_decay: float = 0.5        # mri_like support bias per wavelet scale
    prior_file: str = ""            # support dataset for optimized_C
    shared_seeds: bool = False      # pair trials across arms
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        grid = tuple(float(m) for m in self.m_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("m-grid must be strictly increasing")
        object.__setattr__(self, "m_grid", grid)
        object.__setattr__(self, "arms", tuple(self.arms))
        for arm in self.arms:
            if arm in KNOWN_ARMS or arm.startswith(("file:", "powerlaw:")):
                continue
            raise ValueError(f"unknown arm {arm!r}")


@dataclass(frozen=True)
class SupportDataset:
    supports: List[np.ndarray]
    s: int
    provenance: str = ""

    def __post_init__(self):
        if not self.supports:
            raise ValueError("empty support dataset")
        for sup in self.supports:
            if len(sup) != self.s:
                raise ValueError("ragged support cardinalities")


@dataclass
class RecoveryCurve:
    arm: str
    m: List[float] = field(default_factory=list)
    eps: List[float] = field(default_factory=list)
    trials: List[int] = field(default_factory=list)
    wilson_lo: List[float] = field(default_factory=list)
    wilson_hi: List[float] = field(default_factory=list)

    def add(self, m: float, successes: int, trials: int) -> None:
        lo, hi = wilson_interval(successes, trials)
        self.m.append(m)
        self.eps.append(successes / trials)
        self.trials.append(trials)
        self.wilson_lo.append(lo)
        self.wilson_hi.append(hi)

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "eps", "trials", "wilson_lo", "wilson_hi"])
            for i in range(len(self.m)):
                writer.writerow([format(self.m[i], ".17g"),
                                 format(self.eps[i], ".17g"),
                                 self.trials[i],
                                 format(self.wilson_lo[i], ".17g"),
                                 format(self.wilson_hi[i], ".17g")])


def wilson_interval(successes: int, trials: int,
                    z: float = 1.959963984540054) -> Tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * np.sqrt(phat * (1 - phat) / trials
                       + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _basis_from_tag(tag: str, modulation=None) -> tr.BasisKind:
    if tag == "modulated_fourier":
        return tr.modulated_fourier(modulation)
    return tr.BasisKind(tag)


def make_pair(sensing: str, sparsity: str, n: int) -> tr.BasisPair:
    return tr.BasisPair(_basis_from_tag(sensing), _basis_from_tag(sparsity), n)


def ingest_support_dataset(path, s: Optional[int] = None,
                           n: Optional[int] = None) -> SupportDataset:
    """Read one support per line (whitespace or comma separated indices)."""
    supports = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                idx = np.array([int(tok) for tok in line.replace(",", " ").split()],
                               dtype=np.intp)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: unparseable support") from exc
            supports.append(np.sort(idx))
    if not supports:
        raise ValueError(f"{path}: no supports found")
    s = len(supports[0]) if s is None else s
    for sup in supports:
        if len(sup) != s:
            raise ValueError(f"{path}: ragged support cardinalities")
        if n is not None and sup.size and (sup.min() < 0 or sup.max() >= n):
            raise IndexError(f"{path}: support index out of range for N={n}")
    return SupportDataset(supports, s, provenance=str(path))


def ingest_coefficient_dataset(path, s: int,
                               n: Optional[int] = None) -> SupportDataset:
    """Read dense coefficient vectors (one per line) and hard-threshold at s."""
    supports = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                coeffs = np.array([float(tok) for tok in
                                   line.replace(",", " ").split()])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: unparseable vector") from exc
            if n is not None and len(coeffs) != n:
                raise ValueError(f"{path}:{lineno}: expected {n} coefficients")
            order = np.argsort(np.abs(coeffs))[::-1]
            supports.append(np.sort(order[:s].astype(np.intp)))
    if not supports:
        raise ValueError(f"{path}: no coefficient vectors found")
    return SupportDataset(supports, s, provenance=f"{path} (thresholded)")


def mri_like_support_weights(n: int, scale_decay: float) -> np.ndarray:
    """Support-inclusion weights biased toward coarse wavelet scales."""
    levels = int(np.log2(n))
    weights = np.empty(n)
    weights[0] = 1.0
    start, width = 1, 1
    for band in range(levels):
        # band 0 is the coarsest detail band, the last is the finest
        weights[start:start + width] = scale_decay ** band
        start += width
        width *= 2
    return weights / weights.sum()


def gen_mri_like_supports(n: int, s: int, count: int, scale_decay: float,
                          rng: RngSeed) -> SupportDataset:
    """Synthetic stand-in dataset: supports biased toward coarse scales."""
    weights = mri_like_support_weights(n, scale_decay)
    gen = rng.generator()
    supports = [np.sort(gen.choice(n, size=s, replace=False, p=weights)
                        .astype(np.intp)) for _ in range(count)]
    return SupportDataset(supports, s, provenance="synthetic mri-like")


def gen_mri_like_signal(n: int, s: int, scale_decay: float, rng: RngSeed):
    """Sparse signal whose support follows the coarse-scale-biased law."""
    weights = mri_like_support_weights(n, scale_decay)
    gen = rng.generator()
    support = np.sort(gen.choice(n, size=s, replace=False, p=weights)
                      .astype(np.intp))
    amplitudes = 1.0 - gen.random(s)
    phases = gen.random(s) * 2.0 * np.pi
    alpha = np.zeros(n, dtype=np.complex128)
    alpha[support] = amplitudes * np.exp(1j * phases)
    from .sampling import SparseSignal
    return SparseSignal(alpha, support, s)


def powerlaw_profile(n: int, m: float, d: float,
                     sensing: str = "fourier") -> SamplingProfile:
    """Generic distance-to-DC power-law profile normalized to the budget."""
    if d < 0:
        raise ValueError("decay exponent must be nonnegative")
    idx = np.arange(n)
    if sensing in ("fourier", "modulated_fourier"):
        dist = np.minimum(idx, n - idx) / (n // 2)
    else:
        dist = idx / max(n - 1, 1)
    shape = (1.0 - dist) ** d + 1e-12
    return renormalize_to_budget(shape, m)


def _arm_profile(arm: str, spec: ExperimentSpec, m: float,
                 B: Optional[CoherenceDiagonal],
                 C: Optional[CoherenceDiagonal]
                 ) -> Tuple[SamplingProfile, Optional[OptTrace]]:
    if arm in ("uniform", "spread_spectrum"):
        return uniform_profile(spec.n, m), None
    if arm == "optimized_B":
        cfg = OptConfig(lam=spec.lam, tau=spec.tau, m=m)
        return optimize_profile(B, cfg)
    if arm == "optimized_C":
        cfg = OptConfig(lam=spec.lam, tau=spec.tau, m=m)
        return optimize_profile(C, cfg)
    if arm.startswith("powerlaw:"):
        return powerlaw_profile(spec.n, m, float(arm.split(":", 1)[1]),
                                spec.sensing), None
    if arm.startswith("file:"):
        shape = SamplingProfile.load_csv(arm.split(":", 1)[1], m)
        return renormalize_to_budget(shape.p, m), None
    raise ValueError(f"unknown arm {arm!r}")


def _trial_seed(spec: ExperimentSpec, arm_index: int, m_index: int,
                trial: int) -> RngSeed:
    base = RngSeed(spec.seed)
    if spec.shared_seeds:
        return base.child(0xABCD, m_index, trial)
    return base.child(arm_index, m_index, trial)


def run_single_trial(spec: ExperimentSpec, arm: str, profile_p: np.ndarray,
                     m: float, seed: RngSeed) -> bool:
    """One signal draw, one index draw, one solve; True on perfect recovery."""
    profile = SamplingProfile(profile_p, m)
    if arm == "spread_spectrum":
        modulation = np.where(seed.child(2).generator().random(spec.n) < 0.5,
                              -1.0, 1.0)
        pair = tr.BasisPair(tr.modulated_fourier(modulation),
                            _basis_from_tag(spec.sparsity), spec.n)
    else:
        pair = make_pair(spec.sensing, spec.sparsity, spec.n)
    if spec.signal_model == "mri_like":
        signal = gen_mri_like_signal(spec.n, spec.s, spec.scale_decay,
                                     seed.child(0))
    else:
        signal = gen_sparse_signal(spec.n, spec.s, seed.child(0))
    omega = bernoulli_select(profile, seed.child(1))
    if len(omega) == 0:
        return False
    ms = measure(signal, omega, pair)
    alpha_hat = basis_pursuit(ms.y, omega, pair, BPConfig())
    if not alpha_hat.converged:
        return False
    return is_recovered(signal.alpha, alpha_hat)


def _trial_batch(args) -> int:
    spec, arm, profile_p, m, seeds = args
    return sum(run_single_trial(spec, arm, profile_p, m, sd) for sd in seeds)


def run_phase_transition(spec: ExperimentSpec,
                         dataset: Optional[SupportDataset] = None
                         ) -> Tuple[Dict[str, RecoveryCurve],
                                    Dict[str, SamplingProfile],
                                    Dict[str, OptTrace]]:
    """Full phase-transition experiment over all arms and budgets."""
    if not spec.m_grid:
        raise ValueError("empty m-grid")
    pair = make_pair(spec.sensing, spec.sparsity, spec.n)
    B = build_B(pair) if any(a == "optimized_B" for a in spec.arms) else None
    C = None
    if "optimized_C" in spec.arms:
        if dataset is None:
            if spec.prior_file:
                dataset = ingest_support_dataset(spec.prior_file, n=spec.n)
            else:
                raise ValueError("optimized_C arm requires a support dataset")
        C = build_C(pair, dataset.supports, dataset.s)
    curves: Dict[str, RecoveryCurve] = {}
    profiles: Dict[str, SamplingProfile] = {}
    traces: Dict[str, OptTrace] = {}
    for arm_index, arm in enumerate(spec.arms):
        curve = RecoveryCurve(arm)
        for m_index, m in enumerate(spec.m_grid):
            profile, trace = _arm_profile(arm, spec, m, B, C)
            seeds = [_trial_seed(spec, arm_index, m_index, t)
                     for t in range(spec.trials)]
            if spec.workers > 1:
                chunks = np.array_split(np.arange(spec.trials),
                                        min(spec.workers * 4, spec.trials))
                jobs = [(spec, arm, profile.p, m, [seeds[i] for i in chunk])
                        for chunk in chunks if len(chunk)]
                with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                    successes = sum(pool.map(_trial_batch, jobs))
            else:
                successes = _trial_batch((spec, arm, profile.p, m, seeds))
            curve.add(m, successes, spec.trials)
            profiles[arm] = profile
            if trace is not None:
                traces[arm] = trace
        curves[arm] = curve
    return curves, profiles, traces


# --- manifest / outputs -----------------------------------------------------

_SPEC_FIELDS = ("sensing", "sparsity", "n", "s", "m_grid", "trials", "arms",
                "seed", "outdir", "lam", "tau", "signal_model", "scale_decay",
                "prior_file", "shared_seeds", "workers")


def spec_to_manifest(spec: ExperimentSpec, path) -> None:
    import numpy
    from . import __version__
    with open(path, "w") as fh:
        fh.write(f"# vdsopt {__version__}, numpy {numpy.__version__}\n")
        for name in _SPEC_FIELDS:
            value = getattr(spec, name)
            if name in ("m_grid", "arms"):
                value = ",".join(str(v) for v in value)
            fh.write(f"{name} = {value}\n")


def spec_from_file(path, overrides: Optional[dict] = None) -> ExperimentSpec:
    """Parse a line-oriented key = value experiment spec (or manifest)."""
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            raw[key] = value
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return spec_from_dict(raw)


def spec_from_dict(raw: dict) -> ExperimentSpec:
    kwargs = {}
    for key, value in raw.items():
        if key not in _SPEC_FIELDS:
            raise ValueError(f"unknown experiment key {key!r}")
        if isinstance(value, str):
            if key in ("n", "s", "trials", "seed", "workers"):
                value = int(value)
            elif key in ("lam", "tau", "scale_decay"):
                value = float(value)
            elif key == "m_grid":
                value = tuple(float(v) for v in value.split(",") if v.strip())
            elif key == "arms":
                value = tuple(v.strip() for v in value.split(",") if v.strip())
            elif key == "shared_seeds":
                value = value.lower() in ("1", "true", "yes")
        kwargs[key] = value
    if SEED_ENV_VAR in os.environ:
        kwargs["seed"] = int(os.environ[SEED_ENV_VAR])
    return ExperimentSpec(**kwargs)


def emit_outputs(spec: ExperimentSpec, curves: Dict[str, RecoveryCurve],
                 profiles: Dict[str, SamplingProfile],
                 traces: Dict[str, OptTrace], plot: bool = False) -> None:
    os.makedirs(spec.outdir, exist_ok=True)

    def safe(arm):
        return arm.replace(":", "_").replace("/", "_")
    for arm, curve in curves.items():
        curve.save_csv(os.path.join(spec.outdir, f"curve_{safe(arm)}.csv"))
    for arm, profile in profiles.items():
        profile.save_csv(os.path.join(spec.outdir, f"profile_{safe(arm)}.csv"))
    with open(os.path.join(spec.outdir, "trace.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["arm", "iteration", "objective", "penalty_residual",
                         "iterate_change", "budget"])
        for arm, trace in traces.items():
            for i in range(len(trace.objective)):
                writer.writerow([arm, i,
                                 format(trace.objective[i], ".17g"),
                                 format(trace.penalty_residual[i], ".17g"),
                                 format(trace.iterate_change[i], ".17g"),
                                 format(trace.budget[i], ".17g")])
    spec_to_manifest(spec, os.path.join(spec.outdir, "manifest.txt"))
    if plot:
        _plot_outputs(spec, curves, profiles)


def _plot_outputs(spec, curves, profiles) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for arm, curve in curves.items():
        ax1.plot(curve.m, curve.eps, marker="o", label=arm)
    ax1.set_xlabel("m")
    ax1.set_ylabel("recovery probability")
    ax1.legend()
    for arm, profile in profiles.items():
        ax2.plot(profile.p, label=arm)
    ax2.set_xlabel("index")
    ax2.set_ylabel("p")
    ax2.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(spec.outdir, "curves.svg"))
    plt.close(fig)
