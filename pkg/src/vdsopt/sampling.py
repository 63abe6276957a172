"""Random index selection, sparse test signals, and measurement generation.

All randomness flows through (seed, stream) pairs backed by a counter-based
generator, so any Monte-Carlo trial is reproducible in isolation and trials
on distinct streams are independent.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .profiles import SamplingProfile
from .transforms import BasisPair, apply_A_masked


@dataclass(frozen=True)
class RngSeed:
    """Root seed plus a substream identifier."""

    seed: int
    stream: tuple = ()

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed,
                                    spawn_key=tuple(self.stream))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, *key) -> "RngSeed":
        return RngSeed(self.seed, tuple(self.stream) + tuple(key))


@dataclass(frozen=True)
class SparseSignal:
    alpha: np.ndarray
    support: np.ndarray
    s: int

    def __post_init__(self):
        if len(self.support) != self.s:
            raise ValueError("support size does not match sparsity")


@dataclass(frozen=True)
class MeasurementSet:
    omega: np.ndarray
    y: np.ndarray
    model: str  # "bernoulli" or "iid"

    def __post_init__(self):
        if len(self.y) != len(self.omega):
            raise ValueError("measurement length does not match index count")
        if self.model not in ("bernoulli", "iid"):
            raise ValueError(f"unknown sampling model {self.model!r}")


def bernoulli_select(profile: SamplingProfile, rng: RngSeed) -> np.ndarray:
    """Independent per-index inclusion with probability p_i; no duplicates."""
    gen = rng.generator()
    draws = gen.random(profile.n)
    return np.nonzero(draws < profile.p)[0]


def iid_select(P, m: int, rng: RngSeed) -> np.ndarray:
    """Exactly m draws with replacement from the measure P; duplicates kept."""
    P = np.asarray(P, dtype=float)
    if abs(P.sum() - 1.0) > 1e-8 or np.any(P < 0):
        raise ValueError("P must be a probability vector")
    if m == 0:
        return np.empty(0, dtype=np.intp)
    gen = rng.generator()
    return gen.choice(len(P), size=m, replace=True, p=P).astype(np.intp)


def gen_sparse_signal(n: int, s: int, rng: RngSeed) -> SparseSignal:
    """Uniform random support, Steinhaus phases, amplitudes uniform on (0, 1].

    The open lower endpoint keeps the support size exactly s.
    """
    if not 0 <= s <= n:
        raise ValueError("sparsity must lie in [0, N]")
    gen = rng.generator()
    support = np.sort(gen.choice(n, size=s, replace=False).astype(np.intp))
    amplitudes = 1.0 - gen.random(s)
    phases = gen.random(s) * 2.0 * np.pi
    alpha = np.zeros(n, dtype=np.complex128)
    alpha[support] = amplitudes * np.exp(1j * phases)
    return SparseSignal(alpha, support, s)


def measure(signal: SparseSignal, omega, pair: BasisPair,
            model: str = "bernoulli") -> MeasurementSet:
    """Probe the signal on the selected sensing rows."""
    omega = np.asarray(omega, dtype=np.intp)
    if model == "iid":
        # the masked operator rejects duplicates; evaluate unique rows and
        # replicate the measurements back onto the multiset
        unique, inverse = np.unique(omega, return_inverse=True)
        y_unique = apply_A_masked(pair, unique, signal.alpha)
        return MeasurementSet(omega, y_unique[inverse], model)
    return MeasurementSet(omega, apply_A_masked(pair, omega, signal.alpha),
                          model)
