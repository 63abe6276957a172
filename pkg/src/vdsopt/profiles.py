"""Sampling profiles: per-index Bernoulli inclusion probabilities."""

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SamplingProfile:
    """Inclusion probabilities p in (0, 1]^N with measurement budget m.

    A profile is admissible when sum(p) == m; optimizer outputs may undershoot
    the budget slightly, so admissibility is checked on demand rather than at
    construction.
    """

    p: np.ndarray
    m: float

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if np.any(p <= 0) or np.any(p > 1):
            raise ValueError("profile entries must lie in (0, 1]")
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return len(self.p)

    def is_admissible(self, tol: float = 1e-8) -> bool:
        return abs(self.p.sum() - self.m) <= tol

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "p"])
            for i, v in enumerate(self.p):
                writer.writerow([i, format(v, ".17g")])

    @classmethod
    def load_csv(cls, path, m: float) -> "SamplingProfile":
        values = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[:2] != ["index", "p"]:
                raise ValueError(f"unexpected profile header {header!r}")
            for row in reader:
                values.append(float(row[1]))
        return cls(np.array(values), m)


def uniform_profile(n: int, m: float) -> SamplingProfile:
    if not 0 < m <= n:
        raise ValueError("budget must lie in (0, N]")
    return SamplingProfile(np.full(n, m / n), m)


def renormalize_to_budget(p, m: float, tol: float = 1e-9,
                          max_rounds: int = 200) -> SamplingProfile:
    """Scale-then-clip a nonnegative shape until sum == m with entries <= 1.

    Clipping is monotone in the scale factor, so iterating scale-clip
    converges whenever m <= N.
    """
    p = np.asarray(p, dtype=float)
    n = len(p)
    if m > n:
        raise ValueError("budget exceeds dimension; no profile with p <= 1")
    if np.any(p < 0) or p.sum() <= 0:
        raise ValueError("profile shape must be nonnegative and nonzero")
    q = np.clip(p, 1e-300, None)
    for _ in range(max_rounds):
        q = np.minimum(q * (m / q.sum()), 1.0)
        if abs(q.sum() - m) <= tol:
            break
    else:
        # Mass stuck below the cap: distribute the remainder over free entries.
        free = q < 1.0
        q[free] += (m - q.sum()) / free.sum()
        q = np.minimum(q, 1.0)
    return SamplingProfile(q, m)
