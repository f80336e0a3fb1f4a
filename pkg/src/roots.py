"""
Root systems of types A, B, C, D and Casimir eigenvalues.

Roots and weights are exact rational vectors in the standard epsilon
coordinates. The inner product on them is the one induced by the trace form
Re trace(X Y*) on the torus algebra: sum x_i y_i for type A and half of it for
types B, C and D (the torus of SO(n) and Sp(n) sits in 2 x 2 blocks). With
that scale the Casimir sum over an orthonormal basis acts on the irreducible
representation of highest weight lam as -(|lam|^2 + 2 <lam, delta>).
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from .calculus import laplacian
from .config import config
from .errors import InvalidSpecError, PreconditionError, SpecMismatchError, UsageError
from .fields import AdjointCoefficientField, ScalarField, dual_coefficient, hermitian_coefficient
from .groups import AlgebraBasis, GroupSpec, build_basis, haar_sample, make_spec
from .models import CasimirReport

Vector = Tuple[Fraction, ...]

REPRESENTATIONS = ("standard", "dual", "adjoint", "zero")


def _vec(values: Sequence) -> Vector:
    return tuple(Fraction(v) for v in values)


def _unit(dim: int, *entries: Tuple[int, int]) -> Vector:
    out = [Fraction(0)] * dim
    for index, coeff in entries:
        out[index] += coeff
    return tuple(out)


@dataclass(frozen=True)
class Weight:
    coords: Vector
    label: str = ""

    def __str__(self) -> str:
        return f"{self.label}({', '.join(str(c) for c in self.coords)})"


@dataclass(frozen=True)
class RootSystem:
    """Positive and simple roots of a classical root system"""
    type: str
    rank: int
    dim: int
    scale: Fraction
    positive_roots: Tuple[Vector, ...]
    simple_roots: Tuple[Vector, ...]

    @property
    def label(self) -> str:
        return f"{self.type}{self.rank}"

    def inner(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
        if len(x) != self.dim or len(y) != self.dim:
            raise SpecMismatchError(f"Vectors must have {self.dim} coordinates for {self.label}")
        return self.scale * sum((a * b for a, b in zip(x, y)), Fraction(0))

    def norm2(self, x: Sequence[Fraction]) -> Fraction:
        return self.inner(x, x)

    @cached_property
    def delta(self) -> Vector:
        """Half the sum of the positive roots"""
        total = [Fraction(0)] * self.dim
        for root in self.positive_roots:
            for i, c in enumerate(root):
                total[i] += c
        return tuple(c / 2 for c in total)

    def coroot(self, root: Vector) -> Vector:
        factor = 2 / self.norm2(root)
        return tuple(factor * c for c in root)

    def is_dominant(self, weight: Weight) -> bool:
        return all(self.inner(weight.coords, root) >= 0 for root in self.simple_roots)

    def expected_count(self) -> int:
        r = self.rank
        return {"A": r * (r + 1) // 2, "B": r * r, "C": r * r, "D": r * (r - 1)}[self.type]


def _type_a(n: int) -> RootSystem:
    roots = tuple(_unit(n, (i, 1), (j, -1)) for i in range(n) for j in range(i + 1, n))
    simple = tuple(_unit(n, (i, 1), (i + 1, -1)) for i in range(n - 1))
    return RootSystem("A", n - 1, n, Fraction(1), roots, simple)


def _pairs(k: int, sign: int):
    return [_unit(k, (i, 1), (j, sign)) for i in range(k) for j in range(i + 1, k)]


def _type_b(k: int) -> RootSystem:
    roots = _pairs(k, -1) + _pairs(k, 1) + [_unit(k, (i, 1)) for i in range(k)]
    simple = [_unit(k, (i, 1), (i + 1, -1)) for i in range(k - 1)] + [_unit(k, (k - 1, 1))]
    return RootSystem("B", k, k, Fraction(1, 2), tuple(roots), tuple(simple))


def _type_c(k: int) -> RootSystem:
    roots = _pairs(k, -1) + _pairs(k, 1) + [_unit(k, (i, 2)) for i in range(k)]
    simple = [_unit(k, (i, 1), (i + 1, -1)) for i in range(k - 1)] + [_unit(k, (k - 1, 2))]
    return RootSystem("C", k, k, Fraction(1, 2), tuple(roots), tuple(simple))


def _type_d(k: int) -> RootSystem:
    roots = _pairs(k, -1) + _pairs(k, 1)
    simple = [_unit(k, (i, 1), (i + 1, -1)) for i in range(k - 1)] + [_unit(k, (k - 2, 1), (k - 1, 1))]
    return RootSystem("D", k, k, Fraction(1, 2), tuple(roots), tuple(simple))


def root_system(family: Union[str, GroupSpec], n: Optional[int] = None) -> RootSystem:
    """Root system of SU(n) -> A_{n-1}, SO(2k+1) -> B_k, Sp(n) -> C_n, SO(2k) -> D_k"""
    spec = family if isinstance(family, GroupSpec) else make_spec(family, n)
    if spec.family == "SU":
        return _type_a(spec.n)
    if spec.family == "Sp":
        return _type_c(spec.n)
    k = spec.n // 2
    if spec.n % 2:
        return _type_b(k)
    if k < 2:
        raise InvalidSpecError(f"{spec.label} has no simple root system of type D")
    return _type_d(k)


def named_weight(R: RootSystem, label: str) -> Weight:
    """Highest weight of the standard, dual, adjoint or trivial representation"""
    dim = R.dim
    if label == "zero":
        return Weight(_vec([0] * dim), "zero")
    if label in ("standard", "dual"):
        if R.type != "A":
            # the defining representations of SO(n) and Sp(n) are self-dual
            return Weight(_unit(dim, (0, 1)), label)
        shift = Fraction(1, dim)
        if label == "standard":
            coords = tuple((1 if i == 0 else 0) - shift for i in range(dim))
        else:
            coords = tuple(shift - (1 if i == dim - 1 else 0) for i in range(dim))
        return Weight(tuple(Fraction(c) for c in coords), label)
    if label == "adjoint":
        # highest root
        if R.type == "A":
            return Weight(_unit(dim, (0, 1), (dim - 1, -1)), label)
        if R.type == "C":
            return Weight(_unit(dim, (0, 2)), label)
        if R.type == "B" and R.rank == 1:
            return Weight(_unit(dim, (0, 1)), label)
        return Weight(_unit(dim, (0, 1), (1, 1)), label)
    raise UsageError(f"Unknown representation '{label}'; use one of {REPRESENTATIONS}")


def casimir_fraction(weight: Weight, R: RootSystem) -> Fraction:
    if len(weight.coords) != R.dim:
        raise SpecMismatchError(f"Weight {weight} does not live in the coordinates of {R.label}")
    if not R.is_dominant(weight):
        raise PreconditionError(f"Weight {weight} is not dominant for {R.label}")
    return -(R.norm2(weight.coords) + 2 * R.inner(weight.coords, R.delta))


def casimir_eigenvalue(weight: Weight, R: RootSystem) -> float:
    """alpha_lam = -(|lam|^2 + 2 <lam, delta>)"""
    return float(casimir_fraction(weight, R))


def adjoint_matrices(basis: AlgebraBasis) -> np.ndarray:
    """ad(X_i) as real d x d matrices in the basis coordinates"""
    stack = basis.matrices
    d = len(basis)
    flat = stack.reshape(d, -1).conj()
    out = np.zeros((d, d, d))
    for i, X in enumerate(stack):
        brackets = (X @ stack - stack @ X).reshape(d, -1)
        out[i] = np.real(flat @ brackets.T)
    return out


def brute_force_casimir(spec: GroupSpec, representation: str = "standard",
                        basis: Optional[AlgebraBasis] = None) -> Tuple[float, float]:
    """Scalar of sum_X rho(X)^2 and its distance from a scalar matrix"""
    basis = basis or build_basis(spec)
    if representation == "standard":
        C = basis.casimir
    elif representation == "dual":
        C = basis.casimir.conj()
    elif representation == "adjoint":
        ad = adjoint_matrices(basis)
        C = np.einsum("kij,kjl->il", ad, ad)
    elif representation == "zero":
        return 0.0, 0.0
    else:
        raise UsageError(f"Unknown representation '{representation}'; use one of {REPRESENTATIONS}")

    size = C.shape[0]
    scalar = np.trace(C) / size
    spread = float(np.max(np.abs(C - scalar * np.eye(size))))
    return float(np.real(scalar)), spread


def coefficient_field(spec: GroupSpec, representation: str, rng: np.random.Generator,
                      basis: Optional[AlgebraBasis] = None) -> ScalarField:
    """A random matrix coefficient of the named representation"""
    m = spec.m

    def vec():
        return rng.standard_normal(m) + 1j * rng.standard_normal(m)

    if representation == "standard":
        return hermitian_coefficient(spec, vec(), vec())
    if representation == "dual":
        return dual_coefficient(spec, vec(), vec())
    if representation == "adjoint":
        basis = basis or build_basis(spec)
        A = basis.combine(rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis)))
        B = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        return AdjointCoefficientField(spec, A, B, name="adjoint coefficient")
    raise UsageError(f"No matrix coefficients for representation '{representation}'")


def measured_eigenvalue(spec: GroupSpec, representation: str, samples: int = 8, seed: int = 0,
                        basis: Optional[AlgebraBasis] = None) -> float:
    """Least-squares fit of tau(f) = lam f over Haar points for a random coefficient f"""
    basis = basis or build_basis(spec)
    rng = np.random.default_rng(seed)
    f = coefficient_field(spec, representation, rng, basis)
    num, den = 0j, 0.0
    for child in np.random.SeedSequence(seed).spawn(samples):
        p = haar_sample(spec, child)
        value = f(p)
        num += np.conj(value) * laplacian(f, p, basis).value
        den += abs(value) ** 2
    return float(np.real(num / den))


def crosscheck_casimir(spec: GroupSpec, label: str = "standard", samples: int = 8, seed: int = 0,
                       tol: Optional[float] = None) -> CasimirReport:
    """Compare alpha_lam with the brute-force Casimir and the measured Laplacian eigenvalue"""
    tol = tol if tol is not None else config.tolerances.formula
    R = root_system(spec)
    weight = named_weight(R, label)
    predicted = casimir_eigenvalue(weight, R)
    brute, spread = brute_force_casimir(spec, label)
    measured = 0.0 if label == "zero" else measured_eigenvalue(spec, label, samples, seed)

    discrepancy = max(abs(predicted - brute), abs(predicted - measured), spread)
    passed = discrepancy < tol
    logger.info(
        f"Casimir {spec.label} {label}: predicted {predicted:.12g}, brute force {brute:.12g}, "
        f"measured {measured:.12g}"
    )
    return CasimirReport(
        group=spec.label,
        family=label,
        root_type=R.label,
        weight=[str(c) for c in weight.coords],
        predicted=predicted,
        brute_force=brute,
        brute_force_spread=spread,
        measured=measured,
        discrepancy=discrepancy,
        passed=passed,
    )
