"""
Gauss-Newton projection onto the common zero set of complex constraints.

Each complex constraint contributes two real rows (Re, Im) to a k x d real
Jacobian in the left-translated basis coordinates. Steps are minimal-norm
solutions of J v = -F, applied through the group exponential and followed by
a retraction.
"""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from .calculus import gradient_coeffs
from .config import config
from .errors import NonConvergenceError, SingularityError
from .fields import ScalarField
from .groups import AlgebraBasis, GroupElement, build_basis, group_exp, retract_to_group


@dataclass(frozen=True)
class ProjectionResult:
    point: GroupElement
    iterations: int
    residual: float
    min_singular_value: float


def constraint_values(constraints: Sequence[ScalarField], p: GroupElement) -> np.ndarray:
    values = np.array([c(p) for c in constraints], dtype=complex)
    return np.column_stack([values.real, values.imag]).reshape(-1)


def real_jacobian(constraints: Sequence[ScalarField], p: GroupElement,
                  basis: Optional[AlgebraBasis] = None) -> np.ndarray:
    """Rows d(Re c), d(Im c) per constraint, over the basis"""
    basis = basis or build_basis(p.spec)
    rows = []
    for c in constraints:
        grad = gradient_coeffs(c, p, basis)
        rows.extend([grad.real, grad.imag])
    return np.array(rows)


def _min_singular(J: np.ndarray) -> float:
    return float(np.linalg.svd(J, compute_uv=False)[-1]) if J.size else 0.0


def gauss_newton(constraints: Sequence[ScalarField], p0: GroupElement, tol: Optional[float] = None,
                 max_iter: Optional[int] = None, basis: Optional[AlgebraBasis] = None,
                 least_squares: bool = False) -> ProjectionResult:
    """Drive every constraint to zero from ``p0``.

    In ``least_squares`` mode the system may be overdetermined; the iteration
    stops when the step stalls and returns the smallest residual reached
    instead of raising.
    """
    tol = tol if tol is not None else config.tolerances.level_set
    settings = config.projection
    max_iter = max_iter if max_iter is not None else settings.max_iter
    basis = basis or build_basis(p0.spec)
    rank_tol = config.tolerances.rank

    p = p0
    polish_left = None
    sigma = float("nan")
    for iteration in range(max_iter + settings.polish + 1):
        F = constraint_values(constraints, p)
        residual = float(np.max(np.abs(F)))
        logger.debug(f"Gauss-Newton iteration {iteration}: residual {residual:.3e}")

        if residual < tol:
            if iteration == 0:
                return ProjectionResult(p, 0, residual, _min_singular(real_jacobian(constraints, p, basis)))
            if polish_left is None:
                polish_left = settings.polish
            if polish_left == 0:
                return ProjectionResult(p, iteration, residual, sigma)
            polish_left -= 1
        elif iteration >= max_iter:
            break

        J = real_jacobian(constraints, p, basis)
        sigma = _min_singular(J)
        if sigma < rank_tol and not least_squares:
            raise SingularityError(
                f"Constraint differential is rank-deficient at iteration {iteration} (sigma_min {sigma:.2e})"
            )

        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        length = float(np.linalg.norm(step))
        if length > settings.max_step:
            step = step * (settings.max_step / length)
        if least_squares and length < 1e-14:
            return ProjectionResult(p, iteration, residual, sigma)
        p = retract_to_group(group_exp(p, basis.vector(step)).matrix, p.spec)

    if least_squares:
        return ProjectionResult(p, max_iter, float(np.max(np.abs(constraint_values(constraints, p)))), sigma)
    raise NonConvergenceError(f"Projection did not reach {tol:.1e} within {max_iter} iterations")
