"""Batched damped Newton solver for small nonlinear systems."""

import logging
from typing import Callable, Tuple

import numpy as np

from ..errors import ConvergenceError

logger = logging.getLogger(__name__)

ResidualFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
JacobianFn = Callable[[np.ndarray, np.ndarray], np.ndarray]

DEFAULT_TOLERANCE = 1e-9
DEFAULT_MAX_ITER = 50
MAX_BACKTRACK = 12
ARMIJO = 1e-4


def damped_newton(
    residual: ResidualFn,
    jacobian: JacobianFn,
    z0: np.ndarray,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Tuple[np.ndarray, int]:
    """Solve ``residual(z, rows) = 0`` independently for every row of ``z0``.

    ``residual`` and ``jacobian`` receive the current iterates of a subset of
    batch members together with the indices of those members, so per-member
    data can be gathered by the caller. Members stop iterating as soon as
    their residual infinity-norm drops to ``tol``; their result therefore does
    not depend on which other members share the batch.

    Returns the solution array and the number of iterations used.
    """
    z = np.array(z0, dtype=float, copy=True)
    everyone = np.arange(z.shape[0])
    r = residual(z, everyone)
    norms = np.max(np.abs(r), axis=1) if r.shape[1] else np.zeros(z.shape[0])

    iteration = 0
    while iteration < max_iter:
        rows = np.flatnonzero(norms > tol)
        if rows.size == 0:
            return z, iteration
        iteration += 1

        z_act, r_act, n_act = z[rows], r[rows], norms[rows]
        step = np.linalg.solve(jacobian(z_act, rows), -r_act[..., None])[..., 0]

        alpha = np.ones(rows.size)
        for _ in range(MAX_BACKTRACK):
            trial = z_act + alpha[:, None] * step
            r_trial = residual(trial, rows)
            n_trial = np.max(np.abs(r_trial), axis=1)
            shrink = n_trial > (1.0 - ARMIJO * alpha) * n_act
            if not shrink.any():
                break
            alpha[shrink] *= 0.5

        z[rows], r[rows], norms[rows] = trial, r_trial, n_trial

    worst = float(np.max(norms)) if norms.size else 0.0
    if worst > tol:
        logger.error(f"Newton failed after {max_iter} iterations, residual {worst:.3e}")
        raise ConvergenceError(
            f"Newton iteration did not converge (residual {worst:.3e})",
            residual_norm=worst,
            iterations=max_iter,
        )
    return z, iteration
