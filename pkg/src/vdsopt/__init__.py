"""Variable-density sampling toolkit: coherence-driven profile optimization
and Monte-Carlo sparse-recovery validation."""

__version__ = "0.1.0"

from .coherence import (CoherenceDiagonal, build_B, build_C, mu_measure,
                        mu_profile, mu_profile_support)
from .profile_opt import OptConfig, OptTrace, optimize_profile, \
    optimize_profile_with_prior
from .profiles import SamplingProfile, renormalize_to_budget, uniform_profile
from .recovery import BPConfig, basis_pursuit, is_recovered
from .sampling import (MeasurementSet, RngSeed, SparseSignal, bernoulli_select,
                       gen_sparse_signal, iid_select, measure)
from .transforms import (BasisKind, BasisPair, analyze, apply_A_masked,
                         apply_A_masked_adjoint, daubechies4, dirac, fourier,
                         gram_row, hadamard, haar, modulated_fourier,
                         synthesize)

__all__ = [
    "BasisKind", "BasisPair", "analyze", "synthesize", "gram_row",
    "apply_A_masked", "apply_A_masked_adjoint",
    "dirac", "fourier", "hadamard", "haar", "daubechies4", "modulated_fourier",
    "CoherenceDiagonal", "build_B", "build_C",
    "mu_measure", "mu_profile", "mu_profile_support",
    "SamplingProfile", "uniform_profile", "renormalize_to_budget",
    "OptConfig", "OptTrace", "optimize_profile", "optimize_profile_with_prior",
    "RngSeed", "SparseSignal", "MeasurementSet",
    "bernoulli_select", "iid_select", "gen_sparse_signal", "measure",
    "BPConfig", "basis_pursuit", "is_recovered",
]
