"""
Complex scalar fields on a matrix group.

Four structure tags carry exact calculus:

- ``linear``: f(p) = r^T M(p) s with M(p) = p or conj(p); covers the
  Hermitian form <pa, c>, the bilinear form (pa)^T b and the dual <c, pa>.
- ``adjoint``: f(p) = <p A p^-1, B> = trace(p A p* B*).
- ``polynomial``: f = N(f_1, ..., f_k) / D(f_1, ..., f_k) over child fields,
  D optional.
- ``black-box``: any callable; derivatives by finite differences.
"""
import threading
import weakref
from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import SpecMismatchError
from .groups import AlgebraBasis, AlgebraVector, GroupElement, GroupSpec
from .polynomials import Polynomial

Point = Union[GroupElement, np.ndarray]


def _matrix(p: Point) -> np.ndarray:
    return p.matrix if isinstance(p, GroupElement) else np.asarray(p)


class ScalarField(ABC):
    """A complex function on the group"""
    tag: str = "black-box"

    def __init__(self, spec: GroupSpec, name: str = ""):
        self.spec = spec
        self.name = name or self.tag

    def __call__(self, p: Point) -> complex:
        if isinstance(p, GroupElement) and p.spec != self.spec:
            raise SpecMismatchError(f"Field on {self.spec.label} evaluated on {p.spec.label}")
        return self.value(_matrix(p))

    @abstractmethod
    def value(self, M: np.ndarray) -> complex:
        ...

    @property
    def is_exact(self) -> bool:
        return False

    def exact_directional(self, M: np.ndarray, X: np.ndarray) -> Optional[complex]:
        grad = None
        if self.is_exact:
            grad = self._gradient_along(M, X[None, :, :])
        return None if grad is None else complex(grad[0])

    def exact_gradient(self, M: np.ndarray, basis: AlgebraBasis) -> Optional[np.ndarray]:
        if not self.is_exact:
            return None
        return self._gradient_along(M, basis.matrices)

    def exact_laplacian(self, M: np.ndarray, basis: AlgebraBasis) -> Optional[complex]:
        return None

    def _gradient_along(self, M: np.ndarray, stack: np.ndarray) -> Optional[np.ndarray]:
        return None

    def as_black_box(self) -> "BlackBoxField":
        return BlackBoxField(self.spec, self.value, name=f"black-box({self.name})")

    # field algebra: results are polynomial fields, so exact calculus survives

    def _lift(self, other) -> "ScalarField":
        if isinstance(other, ScalarField):
            if other.spec != self.spec:
                raise SpecMismatchError("Fields live on different groups")
            return other
        return ConstantField(self.spec, complex(other))

    def __add__(self, other) -> "PolynomialField":
        return PolynomialField(self.spec, (self, self._lift(other)), Polynomial.linear([1, 1]))

    __radd__ = __add__

    def __sub__(self, other) -> "PolynomialField":
        return PolynomialField(self.spec, (self, self._lift(other)), Polynomial.linear([1, -1]))

    def __rsub__(self, other) -> "PolynomialField":
        return PolynomialField(self.spec, (self._lift(other), self), Polynomial.linear([1, -1]))

    def __mul__(self, other) -> "PolynomialField":
        if isinstance(other, ScalarField):
            return PolynomialField(self.spec, (self, other), Polynomial.monomial([1, 1]))
        return PolynomialField(self.spec, (self,), Polynomial.linear([complex(other)]))

    __rmul__ = __mul__

    def __neg__(self) -> "PolynomialField":
        return self * -1.0

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec.label}, {self.name!r})"


class ConstantField(ScalarField):
    tag = "polynomial"

    def __init__(self, spec: GroupSpec, constant: complex):
        super().__init__(spec, name=f"const({constant})")
        self.constant = complex(constant)

    def value(self, M: np.ndarray) -> complex:
        return self.constant

    @property
    def is_exact(self) -> bool:
        return True

    def _gradient_along(self, M, stack):
        return np.zeros(stack.shape[0], dtype=complex)

    def exact_laplacian(self, M, basis):
        return 0j


class LinearCoefficientField(ScalarField):
    """f(p) = r^T M(p) s, M(p) = conj(p) when ``conjugate``"""
    tag = "linear"

    def __init__(self, spec: GroupSpec, r: Sequence[complex], s: Sequence[complex],
                 conjugate: bool = False, name: str = ""):
        super().__init__(spec, name)
        self.r = np.asarray(r, dtype=complex)
        self.s = np.asarray(s, dtype=complex)
        if self.r.shape != (spec.m,) or self.s.shape != (spec.m,):
            raise SpecMismatchError(f"Coefficient vectors must have length {spec.m}")
        self.conjugate = conjugate

    def _m(self, A: np.ndarray) -> np.ndarray:
        return A.conj() if self.conjugate else A

    def value(self, M: np.ndarray) -> complex:
        return complex(self.r @ self._m(M) @ self.s)

    @property
    def is_exact(self) -> bool:
        return True

    def _gradient_along(self, M, stack):
        w = self.r @ self._m(M)
        return np.einsum("i,kij,j->k", w, self._m(stack), self.s)

    def exact_laplacian(self, M, basis):
        w = self.r @ self._m(M)
        return complex(w @ self._m(basis.casimir) @ self.s)


class AdjointCoefficientField(ScalarField):
    """f(p) = <p A p^-1, B> = trace(p A p* B*)"""
    tag = "adjoint"

    def __init__(self, spec: GroupSpec, A: np.ndarray, B: np.ndarray, name: str = ""):
        super().__init__(spec, name)
        self.A = np.asarray(A, dtype=complex)
        self.B = np.asarray(B, dtype=complex)
        self._double = weakref.WeakKeyDictionary()
        self._double_lock = threading.Lock()

    def _pulled_back(self, M: np.ndarray) -> np.ndarray:
        # <p C p*, B> = <C, p* B p>
        return M.conj().T @ self.B @ M

    def value(self, M: np.ndarray) -> complex:
        return complex(np.vdot(self._pulled_back(M), self.A))

    @property
    def is_exact(self) -> bool:
        return True

    def _gradient_along(self, M, stack):
        commutators = stack @ self.A - self.A @ stack
        K = self._pulled_back(M)
        return np.einsum("ij,kij->k", K.conj(), commutators)

    def double_commutator(self, basis: AlgebraBasis) -> np.ndarray:
        """sum_X [X, [X, A]]"""
        with self._double_lock:
            if basis not in self._double:
                stack = basis.matrices
                XAX = stack @ (self.A @ stack)
                C = basis.casimir
                self._double[basis] = C @ self.A - 2.0 * XAX.sum(axis=0) + self.A @ C
            return self._double[basis]

    def exact_laplacian(self, M, basis):
        return complex(np.vdot(self._pulled_back(M), self.double_commutator(basis)))


class PolynomialField(ScalarField):
    """f = N(f_1..f_k) / D(f_1..f_k) over child fields"""
    tag = "polynomial"

    def __init__(self, spec: GroupSpec, children: Sequence[ScalarField], numerator: Polynomial,
                 denominator: Optional[Polynomial] = None, name: str = ""):
        super().__init__(spec, name or "polynomial")
        self.children: Tuple[ScalarField, ...] = tuple(children)
        if numerator.k != len(self.children) or (denominator is not None and denominator.k != numerator.k):
            raise SpecMismatchError("Polynomial variable count must match the number of child fields")
        for child in self.children:
            if child.spec != spec:
                raise SpecMismatchError("Child fields live on a different group")
        self.numerator = numerator
        self.denominator = denominator

    @property
    def is_exact(self) -> bool:
        return all(child.is_exact for child in self.children)

    def child_values(self, M: np.ndarray) -> np.ndarray:
        return np.array([child.value(M) for child in self.children], dtype=complex)

    def outer_derivatives(self, x: np.ndarray) -> Tuple[complex, np.ndarray, np.ndarray]:
        """Value, gradient and Hessian of N/D at x"""
        N, dN, HN = self.numerator(x), self.numerator.gradient(x), self.numerator.hessian(x)
        if self.denominator is None:
            return N, dN, HN
        D, dD, HD = self.denominator(x), self.denominator.gradient(x), self.denominator.hessian(x)
        F = N / D
        dF = (dN * D - N * dD) / D**2
        HF = (
            HN / D
            - (np.outer(dN, dD) + np.outer(dD, dN)) / D**2
            - N * HD / D**2
            + 2.0 * N * np.outer(dD, dD) / D**3
        )
        return F, dF, HF

    def value(self, M: np.ndarray) -> complex:
        x = self.child_values(M)
        if self.denominator is None:
            return self.numerator(x)
        return self.numerator(x) / self.denominator(x)

    def _child_gradients(self, M, stack) -> np.ndarray:
        return np.array([child._gradient_along(M, stack) for child in self.children])

    def _gradient_along(self, M, stack):
        if not self.is_exact:
            return None
        _, dF, _ = self.outer_derivatives(self.child_values(M))
        return dF @ self._child_gradients(M, stack)

    def exact_laplacian(self, M, basis):
        if not self.is_exact:
            return None
        _, dF, HF = self.outer_derivatives(self.child_values(M))
        grads = self._child_gradients(M, basis.matrices)
        taus = np.array([child.exact_laplacian(M, basis) for child in self.children])
        kappas = grads @ grads.T
        return complex(dF @ taus + np.sum(HF * kappas))


class BlackBoxField(ScalarField):
    """Opaque callable on m x m matrices"""
    tag = "black-box"

    def __init__(self, spec: GroupSpec, fn: Callable[[np.ndarray], complex], name: str = ""):
        super().__init__(spec, name or "black-box")
        self.fn = fn

    def value(self, M: np.ndarray) -> complex:
        return complex(self.fn(M))


# constructors for the forms used across the catalogue

def hermitian_coefficient(spec: GroupSpec, a, c, name: str = "") -> LinearCoefficientField:
    """p -> <pa, c> = c* p a"""
    return LinearCoefficientField(spec, np.conj(np.asarray(c, dtype=complex)), a, name=name or "<pa,c>")


def bilinear_coefficient(spec: GroupSpec, a, b, name: str = "") -> LinearCoefficientField:
    """p -> (pa)^T b"""
    return LinearCoefficientField(spec, b, a, name=name or "(pa,b)")


def dual_coefficient(spec: GroupSpec, a, c, name: str = "") -> LinearCoefficientField:
    """p -> <c, pa> = c^T conj(p) conj(a)"""
    return LinearCoefficientField(spec, c, np.conj(np.asarray(a, dtype=complex)), conjugate=True,
                                  name=name or "<c,pa>")


def matrix_entry(spec: GroupSpec, i: int, j: int, conjugate: bool = False) -> LinearCoefficientField:
    """p -> p_ij (or its conjugate), zero-based indices"""
    e = np.eye(spec.m, dtype=complex)
    bar = "~" if conjugate else ""
    return LinearCoefficientField(spec, e[i], e[j], conjugate=conjugate, name=f"{bar}z[{i + 1},{j + 1}]")


def column_form(spec: GroupSpec, H: np.ndarray, first: int = 0, second: int = 1) -> AdjointCoefficientField:
    """z -> z_first^T H conj(z_second) as <z (e_first e_second^T) z^-1, conj(H)>"""
    E = np.zeros((spec.m, spec.m), dtype=complex)
    E[first, second] = 1.0
    return AdjointCoefficientField(spec, E, np.conj(np.asarray(H, dtype=complex)),
                                   name=f"z{first + 1}^T H z{second + 1}~")


def algebra_vector(spec: GroupSpec, X: np.ndarray) -> AlgebraVector:
    return AlgebraVector(spec, np.asarray(X, dtype=complex))
