"""Alternating minimization for the coherence-driven sampling profile.

The objective couples an auxiliary vector q to the profile p through a
penalty forcing p_i * q_i ~ 1, so minimizing the weighted sup-norm of q
minimizes the (squared) coherence of the resulting profile.  The q-update is
a forward-backward iteration (smooth penalty + sup-norm prox); the p-update
is projected gradient on the box/budget set.
"""

import csv
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .coherence import CoherenceDiagonal
from .profiles import SamplingProfile
from .prox import project_K_tau, prox_weighted_linf


@dataclass(frozen=True)
class OptConfig:
    lam: float = 0.05
    tau: float = 1e-3
    m: float = 0.0
    max_outer: int = 200
    outer_tol: float = 1e-6
    max_inner: int = 2000
    inner_tol: float = 1e-9

    def validate(self, n: int) -> None:
        if self.lam <= 0:
            raise ValueError("lambda must be positive (zero degenerates the q-step)")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0, 1]")
        if n * self.tau > self.m:
            raise ValueError(f"infeasible: N*tau = {n * self.tau} > m = {self.m}")


@dataclass
class OptTrace:
    """Per-outer-iteration convergence record."""

    objective: List[float] = field(default_factory=list)
    penalty_residual: List[float] = field(default_factory=list)
    iterate_change: List[float] = field(default_factory=list)
    budget: List[float] = field(default_factory=list)

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "objective", "penalty_residual",
                             "iterate_change", "budget"])
            for i in range(len(self.objective)):
                writer.writerow([i, format(self.objective[i], ".17g"),
                                 format(self.penalty_residual[i], ".17g"),
                                 format(self.iterate_change[i], ".17g"),
                                 format(self.budget[i], ".17g")])


def objective_value(p: np.ndarray, q: np.ndarray, diag: np.ndarray,
                    lam: float) -> float:
    return float(np.max(diag * np.abs(q)) + lam * np.sum((p * q - 1.0) ** 2))


def q_step(p: np.ndarray, D: CoherenceDiagonal, cfg: OptConfig,
           q0: Optional[np.ndarray] = None) -> np.ndarray:
    """Minimize max_i(D_ii |q_i|) + lam * ||p.q - 1||^2 over q.

    Forward-backward: explicit gradient step on the quadratic penalty,
    prox of the weighted sup-norm as the backward step.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("q_step requires a strictly positive profile")
    diag = D.values
    q = np.zeros_like(p) if q0 is None else np.asarray(q0, dtype=float).copy()
    lam = cfg.lam
    step = 1.0 / (2.0 * lam * np.max(p) ** 2)
    obj = objective_value(p, q, diag, lam)
    for _ in range(cfg.max_inner):
        grad = 2.0 * lam * p * (p * q - 1.0)
        q = prox_weighted_linf(q - step * grad, step, diag)
        new_obj = objective_value(p, q, diag, lam)
        if abs(obj - new_obj) <= cfg.inner_tol * max(1.0, abs(obj)):
            break
        obj = new_obj
    return q


def p_step(q: np.ndarray, cfg: OptConfig, n: int,
           p0: Optional[np.ndarray] = None) -> np.ndarray:
    """Minimize ||p.q - 1||^2 over the box/budget set via projected gradient."""
    q = np.asarray(q, dtype=float)
    q_max = np.max(np.abs(q))
    if q_max == 0.0:
        # objective is constant; any feasible point will do
        start = np.full(n, cfg.m / n) if p0 is None else p0
        return project_K_tau(start, cfg.tau, cfg.m)
    p = (np.full(n, cfg.m / n) if p0 is None
         else np.asarray(p0, dtype=float).copy())
    p = project_K_tau(p, cfg.tau, cfg.m)
    step = 1.0 / (2.0 * q_max ** 2)
    obj = float(np.sum((p * q - 1.0) ** 2))
    for _ in range(cfg.max_inner):
        grad = 2.0 * q * (p * q - 1.0)
        p = project_K_tau(p - step * grad, cfg.tau, cfg.m)
        new_obj = float(np.sum((p * q - 1.0) ** 2))
        if abs(obj - new_obj) <= cfg.inner_tol * max(1.0, abs(obj)):
            break
        obj = new_obj
    return p


def _coupled_refresh(p: np.ndarray, q: np.ndarray, diag: np.ndarray,
                     cfg: OptConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Escape the flat stall of the alternating scheme.

    Entries strictly below the sup-norm level exert no force on either block,
    so the single-block updates leave their mass wherever history put it.
    Any reallocation of that mass with q reset to 1/p keeps their penalty at
    zero, and keeps the sup-norm level as long as d_i / p_i stays below it,
    so the joint objective never increases.  Among those equivalent
    allocations we spread the mass as a concave power of the diagonal:
    monotone in d (more coherent rows keep higher probability) while staying
    close to flat, which preserves inclusion probability on the incoherent
    rows that carry most of the recovery work.
    """
    from scipy.optimize import brentq

    spread = 0.3  # tail allocation ~ d**spread; 1 would track d exactly

    level = np.max(diag * np.abs(q))
    inactive = diag * np.abs(q) < level * (1.0 - 1e-9)
    if inactive.sum() < 2:
        return p, q
    mass = p[inactive].sum()
    d_in = diag[inactive] ** spread

    def mass_mismatch(c):
        return np.clip(c * d_in, cfg.tau, 1.0).sum() - mass

    # smaller c would push some d_i / p_i above the current sup-norm level
    c_min = float(np.max(diag[inactive] / d_in)) / level
    if mass_mismatch(c_min) > 0:
        c = c_min
    elif mass_mismatch(1e12) < 0:
        return p, q
    else:
        c = brentq(mass_mismatch, c_min, 1e12)
    p_new = p.copy()
    q_new = q.copy()
    p_new[inactive] = np.clip(c * d_in, cfg.tau, 1.0)
    q_new[inactive] = 1.0 / p_new[inactive]
    if (objective_value(p_new, q_new, diag, cfg.lam)
            <= objective_value(p, q, diag, cfg.lam) + 1e-15):
        return p_new, q_new
    return p, q


def optimize_profile(D: CoherenceDiagonal, cfg: OptConfig,
                     strict_admissibility: bool = False
                     ) -> Tuple[SamplingProfile, OptTrace]:
    """Alternate q- and p-updates from the flat profile until convergence.

    With ``strict_admissibility`` the returned profile is rescaled (and
    re-clipped to 1) so its entries sum exactly to the budget m.
    """
    n = len(D.values)
    cfg.validate(n)
    p = np.full(n, cfg.m / n)
    q = 1.0 / p  # start at the penalty's stationary pairing with p^(0)
    trace = OptTrace()
    prev_obj = objective_value(p, q, D.values, cfg.lam)
    for _ in range(cfg.max_outer):
        q = q_step(p, D, cfg, q0=q)
        p_new = p_step(q, cfg, n, p0=p)
        p_new, q = _coupled_refresh(p_new, q, D.values, cfg)
        change = float(np.max(np.abs(p_new - p)))
        p = p_new
        obj = objective_value(p, q, D.values, cfg.lam)
        trace.objective.append(obj)
        trace.penalty_residual.append(float(np.linalg.norm(p * q - 1.0)))
        trace.iterate_change.append(change)
        trace.budget.append(float(p.sum()))
        if abs(prev_obj - obj) <= cfg.outer_tol * max(1.0, abs(prev_obj)):
            break
        prev_obj = obj
    if p.sum() < cfg.m - 1e-6:
        warnings.warn(f"budget not saturated: sum(p) = {p.sum():.6g} < m = "
                      f"{cfg.m:.6g}; consider a larger lambda")
    if strict_admissibility:
        from .profiles import renormalize_to_budget
        return renormalize_to_budget(p, cfg.m), trace
    return SamplingProfile(p, cfg.m), trace


def optimize_profile_with_prior(C: CoherenceDiagonal,
                                cfg: OptConfig) -> Tuple[SamplingProfile, OptTrace]:
    """Same alternating scheme with the support-averaged diagonal."""
    if C.kind != "support_avg":
        raise ValueError("prior-informed optimization expects a support_avg diagonal")
    return optimize_profile(C, cfg)
