"""Diagonal coherence summaries of a basis pair and coherence functionals.

The per-row maximum squared cross-Gram entry (kind ``max_row``) drives the
generic profile optimizer; the support-averaged squared row energy (kind
``support_avg``) drives the prior-informed variant.  Rows are streamed, so the
dense cross-Gram matrix is never materialized.
"""

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .transforms import BasisPair, gram_row

# Entries exactly orthogonal to a support would make 1/q blow up downstream.
DIAGONAL_FLOOR = 1e-15


@dataclass(frozen=True)
class CoherenceDiagonal:
    """Nonnegative diagonal driving the sampling-profile optimizer."""

    values: np.ndarray
    kind: str  # "max_row" or "support_avg"
    pair_descriptor: str

    def __post_init__(self):
        if self.kind not in ("max_row", "support_avg"):
            raise ValueError(f"unknown diagonal kind {self.kind!r}")
        if np.any(self.values <= 0):
            raise ValueError("diagonal entries must be strictly positive")

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "value"])
            for i, v in enumerate(self.values):
                writer.writerow([i, format(v, ".17g")])


def _floored(values: np.ndarray, what: str) -> np.ndarray:
    if np.any(values < DIAGONAL_FLOOR):
        warnings.warn(f"{what}: {int(np.sum(values < DIAGONAL_FLOOR))} entries "
                      f"floored at {DIAGONAL_FLOOR}")
        values = np.maximum(values, DIAGONAL_FLOOR)
    return values


def build_B(pair: BasisPair) -> CoherenceDiagonal:
    """Per-row maximum squared cross-Gram magnitude."""
    values = np.empty(pair.n)
    for i in range(pair.n):
        values[i] = np.max(np.abs(gram_row(pair, i)) ** 2)
    return CoherenceDiagonal(_floored(values, "build_B"), "max_row",
                             pair.describe())


def build_C(pair: BasisPair, supports, s: int) -> CoherenceDiagonal:
    """Support-averaged squared row energies, mean over a support dataset."""
    supports = [np.asarray(sup, dtype=np.intp) for sup in supports]
    if not supports:
        raise ValueError("empty support dataset")
    for sup in supports:
        if len(sup) != s:
            raise ValueError(f"support of size {len(sup)} != s={s}")
        if sup.size and (sup.min() < 0 or sup.max() >= pair.n):
            raise IndexError("support index out of range")
    values = np.zeros(pair.n)
    for i in range(pair.n):
        sq = np.abs(gram_row(pair, i)) ** 2
        values[i] = np.mean([sq[sup].sum() for sup in supports]) / s
    return CoherenceDiagonal(_floored(values, "build_C"), "support_avg",
                             f"{pair.describe()}+{len(supports)} supports")


def mu_measure(P, pair: BasisPair) -> float:
    """Coherence of i.i.d. index selection under probability measure P."""
    P = np.asarray(P, dtype=float)
    if np.any(P <= 0):
        raise ValueError("probability entries must be positive")
    if abs(P.sum() - 1.0) > 1e-8:
        raise ValueError("probability measure must sum to 1")
    B = build_B(pair)
    return float(np.sqrt(np.max(B.values / P) / pair.n))


def mu_profile(p, pair: BasisPair, B: CoherenceDiagonal = None) -> float:
    """Coherence of Bernoulli selection under an admissible sampling profile.

    Accepts a precomputed max_row diagonal to avoid re-streaming the Gram.
    """
    probs = np.asarray(p.p, dtype=float)
    if np.any(probs <= 0):
        raise ValueError("profile entries must be positive")
    if B is None:
        B = build_B(pair)
    n = len(probs)
    return float(np.sqrt(p.m / n * np.max(B.values / probs)))


def mu_profile_support(p, C: CoherenceDiagonal) -> float:
    """Support-adapted coherence from a support_avg diagonal.

    The 1/s factor of the support-adapted coherence is already folded into
    the support_avg entries, so only the diagonal is needed here.
    """
    if C.kind != "support_avg":
        raise ValueError("mu_profile_support requires a support_avg diagonal")
    probs = np.asarray(p.p, dtype=float)
    if np.any(probs <= 0):
        raise ValueError("profile entries must be positive")
    n = len(probs)
    return float(np.sqrt(p.m / n * np.max(C.values / probs)))
