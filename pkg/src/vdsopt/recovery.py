"""Equality-constrained complex basis pursuit and the recovery predicate.

The selected rows of the sensing/sparsity product form a row-orthonormal
matrix, so the projection onto the measurement-consistency affine set is
closed form (one forward and one adjoint application).  Douglas-Rachford
splitting combines that projection with complex soft-thresholding.
"""

from dataclasses import dataclass

import numpy as np

from .transforms import BasisPair, apply_A_masked, apply_A_masked_adjoint

RECOVERY_REL_TOL = 1e-3


@dataclass(frozen=True)
class BPConfig:
    max_iters: int = 20000
    tol: float = 1e-8
    relaxation: float = 1.0  # must lie in (0, 2)
    shrink: float = 0.1      # l1 prox scale; affects speed, not the limit

    def __post_init__(self):
        if self.tol <= 0 or self.max_iters < 1:
            raise ValueError("tol must be positive, max_iters >= 1")
        if not 0 < self.relaxation < 2:
            raise ValueError("relaxation must lie in (0, 2)")


class BasisPursuitResult(np.ndarray):
    """Solution vector with a convergence flag attached."""

    converged: bool = True
    iterations: int = 0


def soft_threshold(x: np.ndarray, threshold: float) -> np.ndarray:
    """Complex magnitude shrinkage; preserves phase."""
    mags = np.abs(x)
    scale = np.maximum(mags - threshold, 0.0) / np.where(mags > 0, mags, 1.0)
    return x * scale


def project_measurement_set(pair: BasisPair, omega, y,
                            alpha: np.ndarray) -> np.ndarray:
    """Closed-form projection onto {a : A_omega a = y} using A A^dagger = I."""
    residual = y - apply_A_masked(pair, omega, alpha)
    return alpha + apply_A_masked_adjoint(pair, omega, residual)


def basis_pursuit(y, omega, pair: BasisPair,
                  cfg: BPConfig = BPConfig()) -> BasisPursuitResult:
    """Minimize the complex l1 norm subject to exact measurement consistency.

    Douglas-Rachford on (l1 norm, affine indicator).  Duplicate rows from
    the with-replacement sampling model are collapsed first; the feasible
    set is unchanged because repeated equations are redundant.
    """
    y = np.asarray(y, dtype=np.complex128)
    omega = np.asarray(omega, dtype=np.intp)
    if len(np.unique(omega)) != len(omega):
        uniq, first = np.unique(omega, return_index=True)
        omega, y = uniq, y[first]
    z = np.zeros(pair.n, dtype=np.complex128)
    alpha = project_measurement_set(pair, omega, y, z)
    prev = alpha
    converged = False
    iterations = cfg.max_iters
    for it in range(cfg.max_iters):
        reflected = soft_threshold(2.0 * alpha - z, cfg.shrink)
        z = z + cfg.relaxation * (reflected - alpha)
        alpha = project_measurement_set(pair, omega, y, z)
        change = np.linalg.norm(alpha - prev)
        if change <= cfg.tol * max(1.0, np.linalg.norm(alpha)):
            converged = True
            iterations = it + 1
            break
        prev = alpha
    result = alpha.view(BasisPursuitResult)
    result.converged = converged
    result.iterations = iterations
    return result


def is_recovered(alpha, alpha_hat, rel_tol: float = RECOVERY_REL_TOL) -> bool:
    """Relative l2 error at most rel_tol (inclusive); zero/zero recovers."""
    alpha = np.asarray(alpha)
    alpha_hat = np.asarray(alpha_hat)
    if len(alpha) != len(alpha_hat):
        raise ValueError("length mismatch")
    ref = np.linalg.norm(alpha)
    err = np.linalg.norm(alpha - alpha_hat)
    if ref == 0.0:
        return err == 0.0
    return bool(err <= rel_tol * ref)
