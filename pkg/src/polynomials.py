"""
Sparse complex polynomials in k variables, with exact gradients and Hessians.

Plain-text sparse format, one term per line::

    # coeff_re coeff_im : i_1 i_2 ... i_k
    1.0 0.0 : 2 0 0
    0.5 -1.0 : 1 1 0
"""
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, DegreeMismatchError, PreconditionError

MultiIndex = Tuple[int, ...]


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial sum_e c_e x^e"""
    k: int
    terms: Tuple[Tuple[MultiIndex, complex], ...]

    def __post_init__(self):
        for exponents, _ in self.terms:
            if len(exponents) != self.k or any(e < 0 for e in exponents):
                raise PreconditionError(f"Bad multi-index {exponents} for {self.k} variables")

    @classmethod
    def from_dict(cls, k: int, terms: Mapping[MultiIndex, complex]) -> "Polynomial":
        merged: Dict[MultiIndex, complex] = {}
        for exponents, coeff in terms.items():
            key = tuple(int(e) for e in exponents)
            merged[key] = merged.get(key, 0) + complex(coeff)
        return cls(k, tuple(sorted(merged.items())))

    @classmethod
    def linear(cls, coeffs: Sequence[complex]) -> "Polynomial":
        k = len(coeffs)
        return cls.from_dict(k, {tuple(int(i == j) for j in range(k)): c for i, c in enumerate(coeffs)})

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: complex = 1.0) -> "Polynomial":
        return cls.from_dict(len(exponents), {tuple(exponents): coeff})

    @property
    def exponents(self) -> np.ndarray:
        return np.array([e for e, _ in self.terms], dtype=int).reshape(len(self.terms), self.k)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=complex)

    @property
    def degree(self) -> int:
        return max((sum(e) for e, c in self.terms if c != 0), default=0)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e, c in self.terms if c != 0}) <= 1

    def is_zero(self) -> bool:
        return all(c == 0 for _, c in self.terms)

    def scaled(self, factor: complex) -> "Polynomial":
        return Polynomial(self.k, tuple((e, c * factor) for e, c in self.terms))

    def _powers(self, x: np.ndarray, shift: np.ndarray) -> np.ndarray:
        exps = np.clip(self.exponents - shift, 0, None)
        return np.prod(np.power(x[None, :], exps), axis=1)

    def __call__(self, x: Sequence[complex]) -> complex:
        x = np.asarray(x, dtype=complex)
        if not self.terms:
            return 0j
        return complex(self.coefficients @ self._powers(x, np.zeros(self.k, dtype=int)))

    def gradient(self, x: Sequence[complex]) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        out = np.zeros(self.k, dtype=complex)
        if not self.terms:
            return out
        E = self.exponents
        c = self.coefficients
        for i in range(self.k):
            shift = np.zeros(self.k, dtype=int)
            shift[i] = 1
            out[i] = (c * E[:, i]) @ self._powers(x, shift)
        return out

    def hessian(self, x: Sequence[complex]) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        out = np.zeros((self.k, self.k), dtype=complex)
        if not self.terms:
            return out
        E = self.exponents
        c = self.coefficients
        for i in range(self.k):
            for j in range(i, self.k):
                shift = np.zeros(self.k, dtype=int)
                shift[i] += 1
                shift[j] += 1
                factor = E[:, i] * (E[:, j] - (1 if i == j else 0))
                out[i, j] = out[j, i] = (c * factor) @ self._powers(x, shift)
        return out

    def to_text(self) -> str:
        lines = [f"{c.real!r} {c.imag!r} : " + " ".join(str(e) for e in exps) for exps, c in self.terms]
        return "\n".join(lines) + "\n"


class HomogeneousPoly(Polynomial):
    """Polynomial whose multi-indices all share one degree, with a nonzero term"""

    def __post_init__(self):
        super().__post_init__()
        if self.is_zero():
            raise PreconditionError("Homogeneous polynomial needs a nonzero coefficient")
        if len({sum(e) for e, _ in self.terms}) != 1:
            raise DegreeMismatchError("Multi-indices of a homogeneous polynomial must share one degree")

    @classmethod
    def from_polynomial(cls, poly: Polynomial) -> "HomogeneousPoly":
        return cls(poly.k, tuple((e, c) for e, c in poly.terms if c != 0))


def parse_sparse_poly(text: str, k: Optional[int] = None) -> HomogeneousPoly:
    """Parse the one-term-per-line format into a HomogeneousPoly"""
    terms: Dict[MultiIndex, complex] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ConfigError(f"Line {lineno}: expected 'coeff_re coeff_im : i_1 ... i_k'")
        left, right = line.split(":", 1)
        try:
            re_part, im_part = (float(v) for v in left.split())
            exponents = tuple(int(v) for v in right.split())
        except ValueError as e:
            raise ConfigError(f"Line {lineno}: {e}") from e
        if k is None:
            k = len(exponents)
        if len(exponents) != k:
            raise DegreeMismatchError(f"Line {lineno}: expected {k} exponents, got {len(exponents)}")
        terms[exponents] = terms.get(exponents, 0) + complex(re_part, im_part)

    if k is None or not terms:
        raise ConfigError("Polynomial file contains no terms")
    return HomogeneousPoly.from_polynomial(Polynomial.from_dict(k, terms))


def random_homogeneous(k: int, degree: int, rng: np.random.Generator, n_terms: int = 3) -> HomogeneousPoly:
    """Random homogeneous polynomial with Gaussian complex coefficients"""
    terms: Dict[MultiIndex, complex] = {}
    while len(terms) < n_terms:
        cuts = np.sort(rng.integers(0, degree + 1, size=k - 1))
        exponents = np.diff(np.concatenate([[0], cuts, [degree]]))
        terms[tuple(int(e) for e in exponents)] = complex(rng.standard_normal(), rng.standard_normal())
        if len(terms) >= _count_monomials(k, degree):
            break
    return HomogeneousPoly.from_polynomial(Polynomial.from_dict(k, terms))


def _count_monomials(k: int, degree: int) -> int:
    from math import comb
    return comb(degree + k - 1, k - 1)


def coefficient_matrix(polys: Iterable[Polynomial]) -> np.ndarray:
    """Rows of coefficients over the union of multi-indices"""
    polys = list(polys)
    keys = sorted({e for p in polys for e, _ in p.terms})
    index = {e: i for i, e in enumerate(keys)}
    M = np.zeros((len(polys), len(keys)), dtype=complex)
    for row, poly in enumerate(polys):
        for e, c in poly.terms:
            M[row, index[e]] += c
    return M
