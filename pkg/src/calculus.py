"""
Left-invariant calculus on the group: directional derivatives, the
Laplace-Beltrami operator tau, gradients and the conformality operator kappa.

For a bi-invariant metric the exponential curves t -> p exp(tX) are
geodesics, so tau(f) = sum_X d^2/dt^2 f(p exp(tX)) over an orthonormal basis.
Structured fields use closed forms; everything else falls back to central
differences along those curves and the report says so.
"""
from dataclasses import dataclass
from typing import Dict, Literal, Optional, Tuple

import numpy as np
from scipy.linalg import expm

from .config import config
from .errors import SpecMismatchError
from .fields import ScalarField
from .groups import AlgebraBasis, AlgebraVector, GroupElement, build_basis

Method = Literal["exact", "central-difference"]

# offsets and weights of central stencils, keyed by accuracy order
FIRST_STENCILS: Dict[int, Tuple[Tuple[int, ...], Tuple[float, ...]]] = {
    2: ((-1, 1), (-1 / 2, 1 / 2)),
    4: ((-2, -1, 1, 2), (1 / 12, -2 / 3, 2 / 3, -1 / 12)),
    6: ((-3, -2, -1, 1, 2, 3), (-1 / 60, 3 / 20, -3 / 4, 3 / 4, -3 / 20, 1 / 60)),
}
SECOND_STENCILS: Dict[int, Tuple[Tuple[int, ...], Tuple[float, ...]]] = {
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    4: ((-2, -1, 0, 1, 2), (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)),
    6: ((-3, -2, -1, 0, 1, 2, 3), (1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90)),
}


@dataclass(frozen=True)
class DerivativeReport:
    value: complex
    method: Method
    step: Optional[float] = None


def _check(f: ScalarField, p: GroupElement) -> None:
    if f.spec != p.spec:
        raise SpecMismatchError(f"Field on {f.spec.label} evaluated at a point of {p.spec.label}")


def _stencil(table, order: int):
    if order not in table:
        raise ValueError(f"Unsupported stencil order {order}; use one of {sorted(table)}")
    return table[order]


def fd_first(f: ScalarField, M: np.ndarray, X: np.ndarray, h: float, order: int) -> complex:
    offsets, weights = _stencil(FIRST_STENCILS, order)
    total = sum(w * f.value(M @ expm(o * h * X)) for o, w in zip(offsets, weights))
    return complex(total / h)


def fd_second(f: ScalarField, M: np.ndarray, X: np.ndarray, h: float, order: int,
              center: Optional[complex] = None) -> complex:
    offsets, weights = _stencil(SECOND_STENCILS, order)
    total = 0j
    for o, w in zip(offsets, weights):
        if o == 0:
            total += w * (f.value(M) if center is None else center)
        else:
            total += w * f.value(M @ expm(o * h * X))
    return complex(total / h**2)


def directional_derivative(f: ScalarField, p: GroupElement, X: AlgebraVector,
                           finite_difference: bool = False, step: Optional[float] = None,
                           order: Optional[int] = None) -> DerivativeReport:
    """d/dt f(p exp(tX)) at t = 0"""
    _check(f, p)
    if X.spec != p.spec:
        raise SpecMismatchError("Direction and point live on different groups")
    if not finite_difference:
        exact = f.exact_directional(p.matrix, X.matrix)
        if exact is not None:
            return DerivativeReport(exact, "exact")
    h = step or config.finite_differences.first_step
    value = fd_first(f, p.matrix, X.matrix, h, order or config.finite_differences.order)
    return DerivativeReport(value, "central-difference", h)


def gradient_report(f: ScalarField, p: GroupElement, basis: Optional[AlgebraBasis] = None,
                    finite_difference: bool = False, step: Optional[float] = None,
                    order: Optional[int] = None) -> Tuple[np.ndarray, Method, Optional[float]]:
    _check(f, p)
    basis = basis or build_basis(p.spec)
    if not finite_difference:
        exact = f.exact_gradient(p.matrix, basis)
        if exact is not None:
            return np.asarray(exact, dtype=complex), "exact", None
    h = step or config.finite_differences.first_step
    k = order or config.finite_differences.order
    grad = np.array([fd_first(f, p.matrix, X, h, k) for X in basis], dtype=complex)
    return grad, "central-difference", h


def gradient_coeffs(f: ScalarField, p: GroupElement, basis: Optional[AlgebraBasis] = None,
                    finite_difference: bool = False, step: Optional[float] = None,
                    order: Optional[int] = None) -> np.ndarray:
    """(X(f)(p)) over the basis; the left-translated gradient of f at p"""
    return gradient_report(f, p, basis, finite_difference, step, order)[0]


def laplacian(f: ScalarField, p: GroupElement, basis: Optional[AlgebraBasis] = None,
              finite_difference: bool = False, step: Optional[float] = None,
              order: Optional[int] = None) -> DerivativeReport:
    """tau(f)(p) = sum_X d^2/dt^2 f(p exp(tX))"""
    _check(f, p)
    basis = basis or build_basis(p.spec)
    if not finite_difference:
        exact = f.exact_laplacian(p.matrix, basis)
        if exact is not None:
            return DerivativeReport(exact, "exact")
    h = step or config.finite_differences.second_step
    k = order or config.finite_differences.order
    center = f.value(p.matrix)
    value = sum(fd_second(f, p.matrix, X, h, k, center) for X in basis)
    return DerivativeReport(complex(value), "central-difference", h)


def kappa(f: ScalarField, g: ScalarField, p: GroupElement, basis: Optional[AlgebraBasis] = None,
          finite_difference: bool = False) -> DerivativeReport:
    """kappa(f, g)(p) = sum_X X(f) X(g), complex bilinear"""
    basis = basis or build_basis(p.spec)
    grad_f, method_f, step_f = gradient_report(f, p, basis, finite_difference)
    grad_g, method_g, step_g = gradient_report(g, p, basis, finite_difference)
    value = complex(grad_f @ grad_g)
    if method_f == "exact" and method_g == "exact":
        return DerivativeReport(value, "exact")
    return DerivativeReport(value, "central-difference", step_f or step_g)


def product_rule_discrepancy(f: ScalarField, g: ScalarField, p: GroupElement,
                             basis: Optional[AlgebraBasis] = None) -> float:
    """|tau(fg) - f tau(g) - g tau(f) - 2 kappa(f, g)| with tau(fg) by finite differences"""
    basis = basis or build_basis(p.spec)
    fd = config.finite_differences
    product = (f * g).as_black_box()
    lhs = laplacian(product, p, basis, finite_difference=True,
                    step=fd.product_rule_step, order=fd.product_rule_order).value
    rhs = (
        f(p) * laplacian(g, p, basis).value
        + g(p) * laplacian(f, p, basis).value
        + 2.0 * kappa(f, g, p, basis).value
    )
    return float(abs(lhs - rhs))


def product_rule_check(f: ScalarField, g: ScalarField, p: GroupElement,
                       basis: Optional[AlgebraBasis] = None, tol: Optional[float] = None) -> bool:
    """Whether tau(fg) = f tau(g) + g tau(f) + 2 kappa(f, g) holds at p"""
    tol = tol if tol is not None else config.tolerances.product_rule
    return product_rule_discrepancy(f, g, p, basis) <= tol
