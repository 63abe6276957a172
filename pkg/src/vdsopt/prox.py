"""Projections and proximity operators used by the profile optimizer.

All operators act on real vectors.  The weighted-infinity-norm prox is
computed through Moreau decomposition: prox of the norm equals the identity
minus a scaled projection onto the dual weighted l1-ball.
"""

from dataclasses import dataclass

import numpy as np


class EmptyFeasibleSetError(ValueError):
    """The constraint set contains no point (N*tau > m)."""


@dataclass(frozen=True)
class WeightedL1Ball:
    """{x : sum_i weights_i |x_i| <= radius} with positive weights."""

    weights: np.ndarray
    radius: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "weights", w)

    def contains(self, x, tol: float = 0.0) -> bool:
        return float(self.weights @ np.abs(x)) <= self.radius + tol


def project_l1_ball(x, r: float) -> np.ndarray:
    """Euclidean projection onto {z : ||z||_1 <= r} via sort-based threshold."""
    x = np.asarray(x, dtype=float)
    if r <= 0:
        raise ValueError("radius must be positive")
    mags = np.abs(x)
    if mags.sum() <= r:
        return x.copy()
    sorted_mags = np.sort(mags)[::-1]
    cumsum = np.cumsum(sorted_mags)
    ks = np.arange(1, len(x) + 1)
    thetas = (cumsum - r) / ks
    k = np.nonzero(sorted_mags > thetas)[0][-1]
    theta = thetas[k]
    return np.sign(x) * np.maximum(mags - theta, 0.0)


def project_weighted_l1_ball(x, ball: WeightedL1Ball) -> np.ndarray:
    """Euclidean projection onto a weighted l1-ball.

    The minimizer has the form z_i = sign(x_i) max(|x_i| - theta w_i, 0);
    theta is found exactly by sorting the activation breakpoints |x_i|/w_i.
    """
    x = np.asarray(x, dtype=float)
    w = ball.weights
    mags = np.abs(x)
    if float(w @ mags) <= ball.radius:
        return x.copy()
    ratios = mags / w
    order = np.argsort(ratios)[::-1]
    wm = (w * mags)[order]
    ww = (w * w)[order]
    # theta_k assumes the k+1 largest-ratio entries are active
    thetas = (np.cumsum(wm) - ball.radius) / np.cumsum(ww)
    k = np.nonzero(ratios[order] > thetas)[0][-1]
    theta = thetas[k]
    return np.sign(x) * np.maximum(mags - theta * w, 0.0)


def prox_weighted_linf(q, gamma: float, diag_values) -> np.ndarray:
    """Prox of gamma * max_i (d_i |x_i|) for positive diagonal values d.

    Moreau decomposition against the dual ball {x : sum |x_i| / d_i <= 1}.
    """
    q = np.asarray(q, dtype=float)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    d = np.asarray(diag_values, dtype=float)
    ball = WeightedL1Ball(1.0 / d, 1.0)
    return q - gamma * project_weighted_l1_ball(q / gamma, ball)


def project_box(x, lo: float, hi: float) -> np.ndarray:
    if lo > hi:
        raise ValueError("empty box")
    return np.clip(np.asarray(x, dtype=float), lo, hi)


def project_K_tau(x, tau: float, m: float) -> np.ndarray:
    """Projection onto {p in [tau, 1]^N : ||p||_1 <= m}.

    On the box the l1-norm is the plain sum, so the projection is
    clip(x - theta, tau, 1) with shift theta >= 0 chosen so the budget
    holds with equality whenever it binds.  theta is found exactly from
    the sorted clamp breakpoints.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    if n * tau > m:
        raise EmptyFeasibleSetError(f"N*tau = {n * tau} exceeds budget m = {m}")
    clipped = np.clip(x, tau, 1.0)
    if clipped.sum() <= m:
        return clipped
    # sum(clip(x - theta)) is piecewise linear and nonincreasing in theta;
    # its breakpoints are where entries enter or leave the clamps.
    breakpoints = np.unique(np.concatenate([x - tau, x - 1.0]))
    breakpoints = breakpoints[breakpoints > 0]
    if breakpoints.size == 0:
        # every entry is already at or below tau; the budget excess is
        # rounding noise from the sum above
        return np.full(n, tau)
    sums = np.array([np.clip(x - t, tau, 1.0).sum() for t in breakpoints])
    idx = int(np.searchsorted(-sums, -m))
    lo = 0.0 if idx == 0 else breakpoints[idx - 1]
    hi = breakpoints[min(idx, len(breakpoints) - 1)]
    # linear on [lo, hi]: solve for theta on the active set at the midpoint
    mid = 0.5 * (lo + hi)
    active = (x - mid > tau) & (x - mid < 1.0)
    n_active = int(active.sum())
    if n_active == 0:
        theta = hi
    else:
        fixed = np.clip(x[~active] - mid, tau, 1.0).sum()
        theta = (x[active].sum() + fixed - m) / n_active
    return np.clip(x - theta, tau, 1.0)
