"""
Catalogue of eigenfamilies on SU(n), SO(n) and Sp(n), their verification and
product construction.

A family is stored through a canonical basis of members; every member is a
structured field, so tau and kappa are computed exactly. Linear combinations
stay in the family, which is why a basis is enough.
"""
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from .calculus import gradient_report, kappa, laplacian
from .config import config
from .errors import NotOrthogonalError, PreconditionError, SpecMismatchError, UsageError
from .fields import (
    AdjointCoefficientField,
    PolynomialField,
    ScalarField,
    bilinear_coefficient,
    dual_coefficient,
    hermitian_coefficient,
)
from .groups import AlgebraBasis, GroupSpec, build_basis, family_name, haar_sample, make_spec
from .models import VerificationReport
from .parallel import parallel_map
from .polynomials import Polynomial

# ratio below which a fit denominator counts as zero
DEGENERATE = 1e-20


@dataclass(frozen=True, eq=False)
class EigenFamily:
    """Canonical members of an eigenfamily plus what is known about its constants"""
    spec: GroupSpec
    label: str
    members: Tuple[ScalarField, ...]
    generators: Dict[str, Any] = field(default_factory=dict)
    index_space: str = ""
    index_dimension: int = 0
    expected_lambda: Optional[float] = None
    expected_mu: Optional[float] = None
    representation: Optional[str] = None

    def __post_init__(self):
        for member in self.members:
            if member.spec != self.spec:
                raise SpecMismatchError(f"Member {member.name} does not live on {self.spec.label}")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def pairs(self) -> List[Tuple[int, int]]:
        k = len(self.members)
        return [(i, j) for i in range(k) for j in range(i, k)]

    def combination(self, coeffs: Sequence[complex], name: str = "") -> PolynomialField:
        """sum_i c_i phi_i as an exact field"""
        if len(coeffs) != len(self.members):
            raise PreconditionError(f"Need {len(self.members)} coefficients, got {len(coeffs)}")
        return PolynomialField(self.spec, self.members, Polynomial.linear(list(coeffs)),
                               name=name or f"combination in {self.label}")

    def span_sample(self, count: int, rng: np.random.Generator) -> "EigenFamily":
        """Family of ``count`` random complex combinations of the members"""
        k = len(self.members)
        members = tuple(
            self.combination(rng.standard_normal(k) + 1j * rng.standard_normal(k), name=f"random {i}")
            for i in range(count)
        )
        return replace(self, members=members, label=f"{self.label} (span)")

    def with_member(self, index: int, member: ScalarField, label: str = "") -> "EigenFamily":
        """Copy with one member replaced; constants become unknown"""
        members = list(self.members)
        members[index] = member
        return replace(self, members=tuple(members), label=label or f"{self.label} (modified)",
                       expected_lambda=None, expected_mu=None, representation=None)


def _vector(values, size: int, name: str) -> np.ndarray:
    vec = np.asarray(values if values is not None else np.eye(size)[0], dtype=complex)
    if vec.shape != (size,):
        raise PreconditionError(f"Generator {name} must have {size} entries, got shape {vec.shape}")
    if not np.any(vec):
        raise PreconditionError(f"Generator {name} must be nonzero")
    return vec


def su_standard(n: int, a=None) -> EigenFamily:
    """phi_c(z) = <za, c> on SU(n)"""
    spec = make_spec("SU", n)
    a = _vector(a, n, "a")
    e = np.eye(n)
    members = tuple(hermitian_coefficient(spec, a, e[k], name=f"<za,e{k + 1}>") for k in range(n))
    return EigenFamily(spec, "su_standard", members, {"a": a}, "c in C^n", n,
                       -(n * n - 1) / n, -(n - 1) / n, "standard")


def su_dual(n: int, a=None) -> EigenFamily:
    """phi_c(z) = <c, za> on SU(n)"""
    spec = make_spec("SU", n)
    a = _vector(a, n, "a")
    e = np.eye(n)
    members = tuple(dual_coefficient(spec, a, e[k], name=f"<e{k + 1},za>") for k in range(n))
    return EigenFamily(spec, "su_dual", members, {"a": a}, "c in C^n", n,
                       -(n * n - 1) / n, -(n - 1) / n, "dual")


def is_isotropic(a: Sequence[complex], tol: Optional[float] = None) -> bool:
    """sum a_i^2 == 0; exact for Gaussian-integer input"""
    tol = tol if tol is not None else config.tolerances.isotropy
    a = np.asarray(a, dtype=complex)
    re, im = np.real(a), np.imag(a)
    if np.all(re == np.round(re)) and np.all(im == np.round(im)):
        x = [int(v) for v in np.round(re)]
        y = [int(v) for v in np.round(im)]
        return sum(p * p - q * q for p, q in zip(x, y)) == 0 and sum(p * q for p, q in zip(x, y)) == 0
    return abs(np.sum(a * a)) <= tol * max(1.0, float(np.sum(np.abs(a) ** 2)))


def so_isotropic(n: int, a=None) -> EigenFamily:
    """phi_b(x) = (xa)^T b on SO(n) for an isotropic a"""
    spec = make_spec("SO", n)
    if a is None:
        a = np.zeros(n, dtype=complex)
        a[0], a[1] = 1.0, 1j
    a = _vector(a, n, "a")
    if not is_isotropic(a):
        raise PreconditionError(f"Generator a is not isotropic: sum a_i^2 = {np.sum(a * a):.3e}")
    e = np.eye(n)
    members = tuple(bilinear_coefficient(spec, a, e[k], name=f"(xa,e{k + 1})") for k in range(n))
    return EigenFamily(spec, "so_isotropic", members, {"a": a}, "b in C^n", n,
                       -(n - 1) / 2, -0.5, "standard")


def sp_standard(n: int, a=None) -> EigenFamily:
    """phi_c(q) = <qa, c> on Sp(n) acting on C^{2n}"""
    spec = make_spec("Sp", n)
    a = _vector(a, 2 * n, "a")
    e = np.eye(2 * n)
    members = tuple(hermitian_coefficient(spec, a, e[k], name=f"<qa,e{k + 1}>") for k in range(2 * n))
    return EigenFamily(spec, "sp_standard", members, {"a": a}, "c in C^2n", 2 * n,
                       -(2 * n + 1) / 2, -0.5, "standard")


def tensor_member(spec: GroupSpec, a: np.ndarray, b: np.ndarray, A: np.ndarray,
                  name: str = "") -> AdjointCoefficientField:
    """z -> (za)^T A conj(zb) = <z (a b*) z^-1, conj(A)>"""
    return AdjointCoefficientField(spec, np.outer(a, b.conj()), np.conj(np.asarray(A, dtype=complex)),
                                   name=name or "(za)^T A (zb)~")


def su_tensor(n: int, a=None, b=None) -> EigenFamily:
    """phi_A(z) = (za)^T A conj(zb), A in C^{n x n}, for orthogonal a and b"""
    spec = make_spec("SU", n)
    a = _vector(a, n, "a")
    b = _vector(b if b is not None else np.eye(n)[1], n, "b")
    overlap = np.vdot(b, a)
    if abs(overlap) > config.tolerances.isotropy * np.linalg.norm(a) * np.linalg.norm(b):
        raise PreconditionError(f"Generators a and b must be orthogonal; <a,b> = {overlap:.3e}")
    members = []
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n))
            E[i, j] = 1.0
            members.append(tensor_member(spec, a, b, E, name=f"phi_E{i + 1}{j + 1}"))
    return EigenFamily(spec, "su_tensor", tuple(members), {"a": a, "b": b}, "A in C^(n x n)", n * n,
                       -2.0 * n, -2.0, "adjoint")


def su_extended(n: int, s: int = 1) -> EigenFamily:
    """sum_{r=1..s} z_{2r-1}^T A_r conj(z_{2r}) on SU(n), 2s <= n"""
    if s < 1 or 2 * s > n:
        raise PreconditionError(f"Extended family needs 1 <= s and 2s <= n; got s={s}, n={n}")
    spec = make_spec("SU", n)
    e = np.eye(n)
    members = []
    for r in range(s):
        for i in range(n):
            for j in range(n):
                E = np.zeros((n, n))
                E[i, j] = 1.0
                members.append(tensor_member(spec, e[2 * r], e[2 * r + 1], E, name=f"phi[{r + 1}]_E{i + 1}{j + 1}"))
    # only the single-summand family has a known kappa constant
    return EigenFamily(spec, "su_extended", tuple(members), {"s": s}, "(A_1..A_s) in (C^(n x n))^s",
                       s * n * n, -2.0 * n, -2.0 if s == 1 else None, "adjoint" if s == 1 else None)


def _sample_points(spec: GroupSpec, samples: int, seed: int):
    return [haar_sample(spec, child) for child in np.random.SeedSequence(seed).spawn(samples)]


def _fit(targets: np.ndarray, values: np.ndarray) -> Optional[complex]:
    """Least-squares c with targets ~ c * values"""
    den = float(np.sum(np.abs(values) ** 2))
    if den < DEGENERATE:
        return None
    return complex(np.sum(np.conj(values) * targets) / den)


def cross_kappa_constant(F: EigenFamily, G: EigenFamily, points: int = 20, seed: int = 0,
                         basis: Optional[AlgebraBasis] = None) -> Tuple[complex, float]:
    """Fitted nu with kappa(phi, psi) = nu phi psi over all cross pairs, and the worst residual"""
    basis = basis or build_basis(F.spec)
    values, kappas = [], []
    for p in _sample_points(F.spec, points, seed):
        for phi in F.members:
            for psi in G.members:
                values.append(phi(p) * psi(p))
                kappas.append(kappa(phi, psi, p, basis).value)
    values, kappas = np.array(values), np.array(kappas)
    nu = _fit(kappas, values)
    if nu is None:
        return 0j, float(np.max(np.abs(kappas), initial=0.0))
    return nu, float(np.max(np.abs(kappas - nu * values), initial=0.0))


def product_family(F: EigenFamily, G: EigenFamily, require_orthogonal: bool = False,
                   points: int = 20, seed: int = 0) -> EigenFamily:
    """Pairwise products phi * psi of two families whose cross pairs are kappa-proportional.

    With kappa(phi, psi) = nu phi psi for every cross pair the products form an
    eigenfamily with constants lambda_F + lambda_G + 2 nu and mu_F + mu_G + 2 nu.
    ``require_orthogonal`` insists on nu = 0.
    """
    if F.spec != G.spec:
        raise SpecMismatchError(f"Cannot multiply families on {F.spec.label} and {G.spec.label}")
    tol = config.tolerances.orthogonality_probe
    nu, residual = cross_kappa_constant(F, G, points, seed)
    if residual > tol:
        raise NotOrthogonalError(
            f"Cross pairs of {F.label} and {G.label} are not kappa-proportional (residual {residual:.3e})"
        )
    if require_orthogonal and abs(nu) > tol:
        raise NotOrthogonalError(f"Cross pairs of {F.label} and {G.label} have kappa = {nu:.6g} phi psi, not 0")
    logger.info(f"Cross pairs of {F.label} x {G.label}: kappa = ({nu.real:.12g}) phi psi")

    members = tuple(
        PolynomialField(F.spec, (phi, psi), Polynomial.monomial([1, 1]), name=f"{phi.name}*{psi.name}")
        for phi in F.members
        for psi in G.members
    )

    def combined(x: Optional[float], y: Optional[float]) -> Optional[float]:
        return None if x is None or y is None else x + y + 2.0 * nu.real

    return EigenFamily(
        F.spec,
        f"{F.label}*{G.label}",
        members,
        {"nu": nu, "left": F.label, "right": G.label},
        f"span of products ({F.index_space}) x ({G.index_space})",
        F.index_dimension * G.index_dimension,
        combined(F.expected_lambda, G.expected_lambda),
        combined(F.expected_mu, G.expected_mu),
    )


def _point_data(F: EigenFamily, basis: AlgebraBasis):
    def evaluate(p):
        values = np.array([phi(p) for phi in F.members])
        taus = np.array([laplacian(phi, p, basis).value for phi in F.members])
        grads = np.array([gradient_report(phi, p, basis)[0] for phi in F.members])
        return values, taus, grads @ grads.T

    return evaluate


def verify_family(F: EigenFamily, samples: Optional[int] = None, seed: int = 0,
                  tol: Optional[float] = None, threads: Optional[int] = None) -> VerificationReport:
    """Fit lambda and mu over Haar samples and report residuals and spreads"""
    samples = config.sampling.samples if samples is None else samples
    tol = tol if tol is not None else config.tolerances.family
    pairs = F.pairs()
    report = dict(family=F.label, group=F.spec.label, samples=samples, members=len(F), pairs=len(pairs),
                  expected_lambda=F.expected_lambda, expected_mu=F.expected_mu, tolerance=tol)

    if samples == 0 or len(F) == 0:
        logger.warning(f"Nothing to verify for {F.label}: {samples} samples, {len(F)} members")
        return VerificationReport(status="inconclusive", **report)

    basis = build_basis(F.spec)
    data = parallel_map(_point_data(F, basis), _sample_points(F.spec, samples, seed), threads)
    values = np.array([v for v, _, _ in data])            # (samples, k)
    taus = np.array([t for _, t, _ in data])
    kappas = np.array([K for _, _, K in data])            # (samples, k, k)
    rows, cols = np.array(pairs).T
    products = values[:, rows] * values[:, cols]
    pair_kappas = kappas[:, rows, cols]

    lam = _fit(taus, values)
    mu = _fit(pair_kappas, products)
    if lam is None or mu is None:
        logger.warning(f"Degenerate fit for {F.label}: member values vanish at every sample")
        return VerificationReport(status="inconclusive", **report)

    lam_each = [_fit(taus[:, i], values[:, i]) for i in range(len(F))]
    mu_each = [_fit(pair_kappas[:, q], products[:, q]) for q in range(len(pairs))]
    lam_spread = max((abs(x - lam) for x in lam_each if x is not None), default=0.0)
    mu_spread = max((abs(x - mu) for x in mu_each if x is not None), default=0.0)
    tau_residual = float(np.max(np.abs(taus - lam * values)))
    kappa_residual = float(np.max(np.abs(pair_kappas - mu * products)))

    passed = max(tau_residual, kappa_residual, lam_spread, mu_spread) < tol
    status = "pass" if passed else "fail"
    logger.info(
        f"{F.label} on {F.spec.label}: lambda={lam.real:.10g}, mu={mu.real:.10g}, "
        f"residuals tau={tau_residual:.2e} kappa={kappa_residual:.2e} -> {status}"
    )
    return VerificationReport(
        lambda_hat=lam,
        mu_hat=mu,
        lambda_spread=float(lam_spread),
        mu_spread=float(mu_spread),
        tau_residual=tau_residual,
        kappa_residual=kappa_residual,
        status=status,
        **report,
    )


FAMILY_LABELS: Dict[str, Tuple[str, Callable[..., EigenFamily]]] = {
    "su_standard": ("SU", su_standard),
    "su_dual": ("SU", su_dual),
    "so_isotropic": ("SO", so_isotropic),
    "sp_standard": ("Sp", sp_standard),
    "su_tensor": ("SU", su_tensor),
    "su_extended": ("SU", su_extended),
}

# short names accepted on the command line, per group
SHORT_LABELS = {
    ("SU", "standard"): "su_standard",
    ("SU", "dual"): "su_dual",
    ("SU", "tensor"): "su_tensor",
    ("SU", "adjoint"): "su_tensor",
    ("SU", "extended"): "su_extended",
    ("SO", "standard"): "so_isotropic",
    ("SO", "isotropic"): "so_isotropic",
    ("Sp", "standard"): "sp_standard",
}


def resolve_label(group: str, label: str) -> str:
    family = family_name(group)
    if label in FAMILY_LABELS:
        if FAMILY_LABELS[label][0] != family:
            raise UsageError(f"Family {label} does not live on {family}(n)")
        return label
    full = SHORT_LABELS.get((family, label))
    if full is None:
        raise UsageError(f"Unknown family '{label}' for {family}(n)")
    return full


def build_family(group: str, n: int, label: str, a=None, b=None, s: int = 1) -> EigenFamily:
    """Catalogue lookup by group name and (short or full) label"""
    full = resolve_label(group, label)
    if full == "su_tensor":
        return su_tensor(n, a, b)
    if full == "su_extended":
        return su_extended(n, s)
    return FAMILY_LABELS[full][1](n, a)


def catalogue() -> List[EigenFamily]:
    """Every catalogued constructor at desk scale with its default generators"""
    return [
        su_standard(3),
        su_dual(3),
        so_isotropic(4),
        sp_standard(2),
        su_tensor(3),
        su_extended(4, 1),
        su_extended(4, 2),
    ]
