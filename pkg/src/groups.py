"""
Compact matrix groups SU(n), SO(n), Sp(n) with the bi-invariant metric
<X, Y> = Re trace(X Y*).

Sp(n) is realized as the complex 2n x 2n unitary matrices g with
g^T J g = J, J = [[0, I], [-I, 0]].
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import List, Literal, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.linalg import expm, logm, polar

from .config import config
from .errors import InvalidSpecError, RetractionError, SpecMismatchError

Family = Literal["SU", "SO", "Sp"]

MIN_RANK = {"SU": 2, "SO": 3, "Sp": 1}


class GroupSpec(BaseModel):
    """A compact matrix group realization"""
    model_config = ConfigDict(frozen=True)

    family: Family
    n: int

    @model_validator(mode="after")
    def _check_rank(self) -> "GroupSpec":
        if self.n < MIN_RANK[self.family]:
            raise InvalidSpecError(
                f"{self.family}({self.n}) is not supported; need n >= {MIN_RANK[self.family]}"
            )
        return self

    @property
    def m(self) -> int:
        """Matrix size of the realization"""
        return 2 * self.n if self.family == "Sp" else self.n

    @property
    def d(self) -> int:
        """Real dimension of the group"""
        n = self.n
        if self.family == "SU":
            return n * n - 1
        if self.family == "SO":
            return n * (n - 1) // 2
        return n * (2 * n + 1)

    @property
    def label(self) -> str:
        return f"{self.family}({self.n})"


def family_name(family: str) -> str:
    """Canonical family name from a loose spelling ("su", "SO", "sp")"""
    key = {"su": "SU", "so": "SO", "sp": "Sp"}.get(str(family).lower())
    if key is None:
        raise InvalidSpecError(f"Unknown group family: {family}")
    return key


def make_spec(family: str, n: int) -> GroupSpec:
    """Build a GroupSpec from a loosely spelled family name"""
    key = family_name(family)
    try:
        return GroupSpec(family=key, n=int(n))
    except InvalidSpecError:
        raise
    except Exception as e:
        # pydantic wraps validator errors
        raise InvalidSpecError(str(e)) from e


@lru_cache(maxsize=None)
def symplectic_form(n: int) -> np.ndarray:
    J = np.zeros((2 * n, 2 * n), dtype=complex)
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    J.setflags(write=False)
    return J


def inner(X: np.ndarray, Y: np.ndarray) -> float:
    """Bi-invariant inner product Re trace(X Y*)"""
    return float(np.real(np.vdot(Y, X)))


def _check_same(spec_a: GroupSpec, spec_b: GroupSpec) -> None:
    if spec_a != spec_b:
        raise SpecMismatchError(f"{spec_a.label} and {spec_b.label} do not match")


@dataclass(frozen=True)
class GroupElement:
    """A point on the group, stored as its m x m complex matrix"""
    spec: GroupSpec
    matrix: np.ndarray

    def membership_residual(self) -> float:
        return membership_residual(self.spec, self.matrix)

    @property
    def inverse(self) -> "GroupElement":
        return GroupElement(self.spec, self.matrix.conj().T)

    def distance(self, other: "GroupElement") -> float:
        """Spectral-norm distance between the matrices"""
        return float(np.linalg.norm(self.matrix - other.matrix, 2))


def membership_residual(spec: GroupSpec, M: np.ndarray) -> float:
    """Largest violation of the defining equations of the group"""
    m = spec.m
    eye = np.eye(m)
    residuals = [np.linalg.norm(M.conj().T @ M - eye, np.inf)]
    if spec.family in ("SU", "SO"):
        residuals.append(abs(np.linalg.det(M) - 1.0))
    if spec.family == "SO":
        residuals.append(np.max(np.abs(np.imag(M))))
    if spec.family == "Sp":
        J = symplectic_form(spec.n)
        residuals.append(np.linalg.norm(M.T @ J @ M - J, np.inf))
    return float(max(residuals))


@dataclass(frozen=True)
class AlgebraVector:
    """An element of the Lie algebra as an m x m complex matrix"""
    spec: GroupSpec
    matrix: np.ndarray

    def coefficients(self, basis: "AlgebraBasis") -> np.ndarray:
        _check_same(self.spec, basis.spec)
        return basis.coefficients(self.matrix)

    def membership_residual(self) -> float:
        return algebra_residual(self.spec, self.matrix)


def algebra_residual(spec: GroupSpec, X: np.ndarray) -> float:
    residuals = [np.max(np.abs(X + X.conj().T))]
    if spec.family == "SU":
        residuals.append(abs(np.trace(X)))
    if spec.family == "SO":
        residuals.append(np.max(np.abs(np.imag(X))))
    if spec.family == "Sp":
        J = symplectic_form(spec.n)
        residuals.append(np.max(np.abs(X.T @ J + J @ X)))
    return float(max(residuals))


class AlgebraBasis:
    """Ordered orthonormal basis of the Lie algebra"""

    def __init__(self, spec: GroupSpec, matrices: Sequence[np.ndarray], check: bool = True):
        self.spec = spec
        stack = np.array([np.asarray(X, dtype=complex) for X in matrices])
        stack.setflags(write=False)
        self._stack = stack
        if check:
            self._validate()

    def _validate(self) -> None:
        if len(self) != self.spec.d:
            raise InvalidSpecError(
                f"Basis of {self.spec.label} needs {self.spec.d} elements, got {len(self)}"
            )
        deviation = np.max(np.abs(self.gram() - np.eye(len(self))))
        if deviation > config.tolerances.gram:
            raise InvalidSpecError(f"Basis is not orthonormal (Gram deviation {deviation:.2e})")

    def __len__(self) -> int:
        return self._stack.shape[0]

    def __iter__(self):
        return iter(self._stack)

    def __getitem__(self, i: int) -> np.ndarray:
        return self._stack[i]

    @property
    def matrices(self) -> np.ndarray:
        """(d, m, m) array of basis matrices"""
        return self._stack

    def vectors(self) -> List[AlgebraVector]:
        return [AlgebraVector(self.spec, X) for X in self._stack]

    def gram(self) -> np.ndarray:
        flat = self._stack.reshape(len(self), -1)
        return np.real(flat.conj() @ flat.T)

    def coefficients(self, X: np.ndarray) -> np.ndarray:
        """Real coordinates of X (orthogonal projection onto the algebra)"""
        flat = self._stack.reshape(len(self), -1)
        return np.real(flat.conj() @ np.asarray(X).reshape(-1))

    def combine(self, coeffs: Sequence[complex]) -> np.ndarray:
        """sum_i c_i X_i; real c gives an algebra element, complex c its complexification"""
        return np.tensordot(np.asarray(coeffs), self._stack, axes=1)

    def vector(self, coeffs: Sequence[float]) -> AlgebraVector:
        return AlgebraVector(self.spec, self.combine(np.asarray(coeffs, dtype=float)))

    @cached_property
    def casimir(self) -> np.ndarray:
        """sum_X X^2 acting on the defining representation"""
        return np.einsum("kij,kjl->il", self._stack, self._stack)

    def recombined(self, orthogonal: np.ndarray) -> "AlgebraBasis":
        """Basis X'_i = sum_j O_ij X_j for an orthogonal d x d matrix O"""
        return AlgebraBasis(self.spec, np.tensordot(orthogonal, self._stack, axes=1))


def _unit(m: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((m, m), dtype=complex)
    E[i, j] = 1.0
    return E


def _unitary_blocks(n: int, include_center: bool) -> List[np.ndarray]:
    """Orthonormal anti-Hermitian n x n matrices: off-diagonal pairs then diagonal"""
    out = []
    r2 = np.sqrt(2.0)
    for j in range(n):
        for k in range(j + 1, n):
            out.append((_unit(n, j, k) - _unit(n, k, j)) / r2)
            out.append(1j * (_unit(n, j, k) + _unit(n, k, j)) / r2)
    if include_center:
        out.extend(1j * _unit(n, j, j) for j in range(n))
    else:
        # generalized Gell-Mann diagonal elements
        for l in range(1, n):
            h = np.zeros(n)
            h[:l] = 1.0
            h[l] = -float(l)
            out.append(1j * np.diag(h / np.sqrt(l * (l + 1))).astype(complex))
    return out


@lru_cache(maxsize=None)
def build_basis(spec: GroupSpec) -> AlgebraBasis:
    """Deterministic orthonormal basis of the Lie algebra of ``spec``"""
    n = spec.n
    r2 = np.sqrt(2.0)
    if spec.family == "SU":
        matrices = _unitary_blocks(n, include_center=False)
    elif spec.family == "SO":
        matrices = [
            (_unit(n, j, k) - _unit(n, k, j)) / r2 for j in range(n) for k in range(j + 1, n)
        ]
    elif spec.family == "Sp":
        matrices = []
        # X = [[A, B], [-conj(B), conj(A)]], A in u(n), B complex symmetric
        for A in _unitary_blocks(n, include_center=True):
            X = np.zeros((2 * n, 2 * n), dtype=complex)
            X[:n, :n] = A
            X[n:, n:] = A.conj()
            matrices.append(X / r2)
        symmetric = []
        for j in range(n):
            symmetric.append(_unit(n, j, j))
            for k in range(j + 1, n):
                symmetric.append((_unit(n, j, k) + _unit(n, k, j)) / r2)
        for S in symmetric:
            for B in (S, 1j * S):
                X = np.zeros((2 * n, 2 * n), dtype=complex)
                X[:n, n:] = B
                X[n:, :n] = -B.conj()
                matrices.append(X / r2)
    else:
        raise InvalidSpecError(f"Unsupported family {spec.family}")

    basis = AlgebraBasis(spec, matrices)
    logger.debug(f"Built orthonormal basis of {spec.label} with {len(basis)} elements")
    return basis


def identity(spec: GroupSpec) -> GroupElement:
    return GroupElement(spec, np.eye(spec.m, dtype=complex))


def haar_sample(spec: GroupSpec, seed) -> GroupElement:
    """Haar-distributed element; ``seed`` is an int, SeedSequence or Generator"""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = spec.n

    if spec.family == "SO":
        Z = rng.standard_normal((n, n))
        Q, R = np.linalg.qr(Z)
        Q = Q * np.sign(np.diag(R))
        if np.linalg.det(Q) < 0:
            Q[:, 0] = -Q[:, 0]
        return GroupElement(spec, Q.astype(complex))

    if spec.family == "SU":
        Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
        Q, R = np.linalg.qr(Z)
        d = np.diag(R)
        Q = Q * (d / np.abs(d))
        Q = Q / np.exp(1j * np.angle(np.linalg.det(Q)) / n)
        return GroupElement(spec, Q)

    # Sp(n): quaternionic Gram-Schmidt; column n+k is -J conj(column k)
    m = spec.m
    J = symplectic_form(n)
    G = np.zeros((m, m), dtype=complex)
    for k in range(n):
        v = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2.0)
        for _ in range(2):
            for col in list(range(k)) + list(range(n, n + k)):
                v = v - np.vdot(G[:, col], v) * G[:, col]
        v = v / np.linalg.norm(v)
        G[:, k] = v
        G[:, n + k] = -J @ v.conj()
    return GroupElement(spec, G)


def group_exp(p: GroupElement, X: AlgebraVector, t: float = 1.0) -> GroupElement:
    """p * exp(t X)"""
    _check_same(p.spec, X.spec)
    if t == 0:
        return p
    q = GroupElement(p.spec, p.matrix @ expm(t * X.matrix))
    drift = q.membership_residual()
    if drift > config.tolerances.exp_membership:
        logger.debug(f"Retracting exp(tX) with t = {t}: membership residual {drift:.2e}")
        q = retract_to_group(q.matrix, p.spec)
    return q


def group_log(p: GroupElement, q: GroupElement, basis: Optional[AlgebraBasis] = None) -> np.ndarray:
    """Algebra coordinates of log(p^-1 q) in the left-translated chart at p"""
    _check_same(p.spec, q.spec)
    basis = basis or build_basis(p.spec)
    Y = logm(p.matrix.conj().T @ q.matrix)
    return basis.coefficients(Y)


def _symplectic_mirror(U: np.ndarray, n: int) -> np.ndarray:
    J = symplectic_form(n)
    return J @ U.conj() @ J.T


def retract_to_group(M: np.ndarray, spec: GroupSpec, max_iter: int = 50) -> GroupElement:
    """Nearest-point style projection of a matrix close to the group"""
    M = np.asarray(M, dtype=complex)
    if M.shape != (spec.m, spec.m):
        raise RetractionError(f"Expected a {spec.m}x{spec.m} matrix, got {M.shape}")

    singular_values = np.linalg.svd(M, compute_uv=False)
    if singular_values[-1] < 1e-8:
        raise RetractionError("Matrix is singular; cannot retract")

    if spec.family == "SO":
        U, _ = polar(np.real(M))
        if np.linalg.det(U) < 0:
            raise RetractionError("Matrix lies on the det = -1 component")
        U = U.astype(complex)
    else:
        U, _ = polar(M)

    if spec.family == "SU":
        U = U / np.exp(1j * np.angle(np.linalg.det(U)) / spec.n)
    elif spec.family == "Sp":
        # the fixed set of U -> J conj(U) J^-1 inside U(2n) is Sp(n)
        for _ in range(max_iter):
            mirror = _symplectic_mirror(U, spec.n)
            gap = np.linalg.norm(U - mirror, np.inf)
            if gap < 1e-15:
                break
            U, _ = polar((U + mirror) / 2.0)

    distance = np.linalg.norm(M - U, 2)
    if distance > 0.5:
        raise RetractionError(f"Matrix is {distance:.3f} away from {spec.label}; limit is 0.5")

    return GroupElement(spec, U)
