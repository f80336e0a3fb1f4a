"""
Codimension-two level sets {p : Psi(p) = 0} of a complex constraint on the
group: projection onto them, regularity, tangent frames, mean curvature and
point-cloud sampling.

The main example is Phi_H(z) = z_1^T H conj(z_2) on SU(n), whose zero set is
minimal when H has n distinct eigenvalues.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from sklearn.decomposition import PCA
from sklearn.neighbors import NearestNeighbors

from .calculus import gradient_coeffs
from .config import config
from .errors import LabError, PreconditionError, SamplingError, SingularityError, SpecMismatchError
from .fields import PolynomialField, ScalarField, column_form, matrix_entry
from .groups import (
    AlgebraBasis,
    AlgebraVector,
    GroupElement,
    GroupSpec,
    build_basis,
    group_exp,
    group_log,
    haar_sample,
    make_spec,
)
from .models import CurvatureReport, RegularityReport, SamplingReport
from .morphisms import ProjectiveMorphism
from .parallel import parallel_map
from .polynomials import Polynomial
from .projection import gauss_newton, real_jacobian


@dataclass(frozen=True, eq=False)
class LevelSetSpec:
    """The zero set of one complex constraint"""
    spec: GroupSpec
    psi: ScalarField
    label: str = ""
    xi: Optional[Tuple[complex, complex]] = None
    H: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.psi.spec != self.spec:
            raise SpecMismatchError(f"Constraint lives on {self.psi.spec.label}, not {self.spec.label}")
        if self.xi is not None and self.xi[0] == 0 and self.xi[1] == 0:
            raise PreconditionError("xi must be a nonzero point of C^2")


def from_matrix(n: int, H) -> LevelSetSpec:
    """{z in SU(n) : z_1^T H conj(z_2) = 0}"""
    H = np.asarray(H, dtype=complex)
    if H.shape != (n, n):
        raise PreconditionError(f"H must be {n}x{n}, got {H.shape}")
    spec = make_spec("SU", n)
    return LevelSetSpec(spec, column_form(spec, H), label=f"z1^T H z2~ on {spec.label}", H=H)


def from_morphism(m: ProjectiveMorphism, xi: Tuple[complex, complex]) -> LevelSetSpec:
    """Fibre over [alpha : beta]: Psi = beta P o Phi - alpha Q o Phi"""
    alpha, beta = complex(xi[0]), complex(xi[1])
    if alpha == 0 and beta == 0:
        raise PreconditionError("xi must be a nonzero point of C^2")
    numerator = m.P.scaled(beta)
    terms = dict(numerator.terms)
    for e, c in m.Q.terms:
        terms[e] = terms.get(e, 0) - alpha * c
    psi = PolynomialField(m.spec, m.members, Polynomial.from_dict(m.P.k, terms), name="Psi_xi")
    return LevelSetSpec(m.spec, psi, label=f"fibre [{alpha}:{beta}] of {m.family.label}", xi=(alpha, beta))


def control(offset: float = 0.3) -> LevelSetSpec:
    """Re z11 = offset, Im z21 = 0 on SU(2): a small circle, not minimal"""
    spec = make_spec("SU", 2)
    z11, z11c = matrix_entry(spec, 0, 0), matrix_entry(spec, 0, 0, conjugate=True)
    z21, z21c = matrix_entry(spec, 1, 0), matrix_entry(spec, 1, 0, conjugate=True)
    psi = 0.5 * z11 + 0.5 * z11c + 0.5 * z21 - 0.5 * z21c - offset
    return LevelSetSpec(spec, psi, label=f"control circle Re z11 = {offset}")


@dataclass(eq=False)
class ManifoldPoint:
    """A point of the level set with its real differential and frames"""
    point: GroupElement
    psi_value: complex
    gradients: np.ndarray          # (2, d): d Re Psi, d Im Psi
    normal: np.ndarray             # (2, d) orthonormal rows spanning the gradients
    tangent: np.ndarray            # (d - 2, d) orthonormal rows
    iterations: int = 0
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(2))

    @property
    def min_singular_value(self) -> float:
        return float(self.singular_values[-1])

    def tangent_vectors(self, basis: AlgebraBasis) -> List[AlgebraVector]:
        return [basis.vector(t) for t in self.tangent]


def _frames(gradients: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    _, sigma, Vt = np.linalg.svd(gradients)
    if sigma[-1] < config.tolerances.rank:
        raise SingularityError(f"Constraint differential has rank < 2 (sigma_min {sigma[-1]:.2e})")
    return Vt[:2], Vt[2:], sigma


def make_point(level: LevelSetSpec, p: GroupElement, basis: Optional[AlgebraBasis] = None,
               iterations: int = 0) -> ManifoldPoint:
    basis = basis or build_basis(level.spec)
    gradients = real_jacobian([level.psi], p, basis)
    normal, tangent, sigma = _frames(gradients)
    return ManifoldPoint(p, level.psi(p), gradients, normal, tangent, iterations, sigma)


def distinct_eigenvalues(H, rel: Optional[float] = None) -> bool:
    """Whether the smallest eigenvalue gap exceeds rel times the spectral radius"""
    rel = rel if rel is not None else config.tolerances.eigen_gap
    eig = np.linalg.eigvals(np.asarray(H, dtype=complex))
    if eig.size < 2:
        return True
    radius = float(np.max(np.abs(eig)))
    gaps = np.abs(eig[:, None] - eig[None, :])[np.triu_indices(eig.size, k=1)]
    return bool(radius > 0 and gaps.min() > rel * radius)


def random_distinct(n: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian complex n x n matrix with n distinct eigenvalues"""
    while True:
        H = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if distinct_eigenvalues(H):
            return H


def commutator_gradient(H: np.ndarray, z: np.ndarray, basis: AlgebraBasis,
                        first: int = 0, second: int = 1) -> np.ndarray:
    """X(Phi_H)(z) = <[X, E], z^-1 conj(H) z> with E = e_first e_second^T"""
    m = z.shape[0]
    E = np.zeros((m, m), dtype=complex)
    E[first, second] = 1.0
    K = z.conj().T @ np.conj(H) @ z
    commutators = basis.matrices @ E - E @ basis.matrices
    # <M, K> = trace(M K*)
    return np.einsum("kij,ij->k", commutators, K.conj())


def complexified_differential(H: np.ndarray, z: np.ndarray, W: np.ndarray) -> complex:
    """dPhi_H(W) for W in the complexified algebra"""
    m = z.shape[0]
    E = np.zeros((m, m), dtype=complex)
    E[0, 1] = 1.0
    K = z.conj().T @ np.conj(H) @ z
    return complex(np.vdot(K, W @ E - E @ W))


def holomorphic_extension_discrepancy(level: LevelSetSpec, p: GroupElement, rng: np.random.Generator,
                                      trials: int = 4, basis: Optional[AlgebraBasis] = None) -> float:
    """Gap between dPhi_H(W) and its reconstruction from the real basis values.

    W = sum c_X X with c_X = -trace(W X); the differential is complex-linear,
    so dPhi_H(W) must equal sum c_X dPhi_H(X).
    """
    basis = basis or build_basis(level.spec)
    grad = commutator_gradient(level.H, p.matrix, basis)
    worst = 0.0
    for _ in range(trials):
        W = basis.combine(rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis)))
        c = -np.einsum("ij,kji->k", W, basis.matrices)
        worst = max(worst, abs(complexified_differential(level.H, p.matrix, W) - c @ grad))
    return float(worst)


def full_differential_norm(level: LevelSetSpec, p: GroupElement, basis: Optional[AlgebraBasis] = None) -> float:
    """Norm of dPhi_H over the complex basis {X, iX} of the complexified algebra"""
    basis = basis or build_basis(level.spec)
    values = [complexified_differential(level.H, p.matrix, s * X) for X in basis for s in (1.0, 1j)]
    return float(np.linalg.norm(values))


def regularity_check(level: LevelSetSpec, p, basis: Optional[AlgebraBasis] = None,
                     rng: Optional[np.random.Generator] = None) -> RegularityReport:
    """Rank of the 2 x d real differential; Phi_H specs also check the commutator formula"""
    point = p.point if isinstance(p, ManifoldPoint) else p
    basis = basis or build_basis(level.spec)
    gradients = real_jacobian([level.psi], point, basis)
    sigma = np.linalg.svd(gradients, compute_uv=False)

    formula, holomorphic = None, None
    if level.H is not None:
        closed = commutator_gradient(level.H, point.matrix, basis)
        exact = gradient_coeffs(level.psi, point, basis)
        numeric = gradient_coeffs(level.psi, point, basis, finite_difference=True)
        formula = float(max(np.max(np.abs(closed - exact)), np.max(np.abs(closed - numeric))))
        holomorphic = holomorphic_extension_discrepancy(level, point, rng or np.random.default_rng(0), basis=basis)

    return RegularityReport(
        grad_re_norm=float(np.linalg.norm(gradients[0])),
        grad_im_norm=float(np.linalg.norm(gradients[1])),
        min_singular_value=float(sigma[-1]),
        regular=bool(sigma[-1] > config.tolerances.regularity),
        formula_discrepancy=formula,
        holomorphic_discrepancy=holomorphic,
    )


def newton_project(level: LevelSetSpec, p0: GroupElement, max_iter: Optional[int] = None,
                   tol: Optional[float] = None, basis: Optional[AlgebraBasis] = None) -> ManifoldPoint:
    """Gauss-Newton onto Psi = 0 from p0"""
    basis = basis or build_basis(level.spec)
    result = gauss_newton([level.psi], p0, tol=tol, max_iter=max_iter, basis=basis)
    return make_point(level, result.point, basis, result.iterations)


def tangent_basis(level: LevelSetSpec, p, basis: Optional[AlgebraBasis] = None) -> List[AlgebraVector]:
    """Orthonormal frame of the orthogonal complement of the two constraint gradients"""
    basis = basis or build_basis(level.spec)
    if isinstance(p, ManifoldPoint):
        return p.tangent_vectors(basis)
    return make_point(level, p, basis).tangent_vectors(basis)


def normal_accelerations(level: LevelSetSpec, mp: ManifoldPoint, h: float = 1e-3,
                         basis: Optional[AlgebraBasis] = None) -> np.ndarray:
    """II(t, t) for every tangent frame vector t, as a (d - 2, 2) array.

    For each t the points newton_project(p exp(+-h t)) are pulled back to the
    algebra by log(p^-1 q), where geodesics through p are straight lines;
    the normal part of (Y+ + Y-) / h^2 is II(t, t) + O(h^2).
    """
    if not 1e-4 <= h <= 1e-2:
        raise PreconditionError(f"Curvature step {h} is outside [1e-4, 1e-2]")
    basis = basis or build_basis(level.spec)
    rows = []
    for t in mp.tangent:
        X = basis.vector(t)
        ends = [newton_project(level, group_exp(mp.point, X, s), basis=basis).point for s in (h, -h)]
        Y = [group_log(mp.point, q, basis) for q in ends]
        rows.append(mp.normal @ ((Y[0] + Y[1]) / h**2))
    return np.array(rows).reshape(-1, 2)


def mean_curvature(level: LevelSetSpec, mp: ManifoldPoint, h: float = 1e-3,
                   basis: Optional[AlgebraBasis] = None) -> CurvatureReport:
    """Trace of the second fundamental form from projected exponential curves"""
    normals = normal_accelerations(level, mp, h, basis)
    norm = float(np.linalg.norm(normals.sum(axis=0)))
    return CurvatureReport(
        step=h,
        norm=norm,
        normal_accelerations=[float(v) for v in np.linalg.norm(normals, axis=1)],
        tangent_dimension=len(mp.tangent),
        psi_residual=abs(mp.psi_value),
        minimal=norm < config.tolerances.curvature,
    )


def refinement_factor(level: LevelSetSpec, mp: ManifoldPoint, h: float = 1e-3,
                      basis: Optional[AlgebraBasis] = None) -> Tuple[float, float, float]:
    """Discretization errors of the curvature estimate at h and h/2, and their ratio.

    Errors are measured per tangent direction against the Richardson limit
    (4 A(2h) - A(4h)) / 3, which is exact to O(h^4). A second-order estimate
    gives a ratio near 4.
    """
    if not (1e-4 <= h / 2 and 4 * h <= 1e-2):
        raise PreconditionError(f"Refinement needs h/2 and 4h inside [1e-4, 1e-2], got h = {h}")
    basis = basis or build_basis(level.spec)
    limit = (4.0 * normal_accelerations(level, mp, 2 * h, basis)
             - normal_accelerations(level, mp, 4 * h, basis)) / 3.0
    coarse = float(np.linalg.norm(normal_accelerations(level, mp, h, basis) - limit))
    fine = float(np.linalg.norm(normal_accelerations(level, mp, h / 2, basis) - limit))
    return coarse, fine, coarse / fine if fine > 0 else float("inf")


def local_dimension(level: LevelSetSpec, mp: ManifoldPoint, neighbors: int = 50, scale: float = 0.05,
                    seed: int = 0, rel: float = 0.05, basis: Optional[AlgebraBasis] = None) -> int:
    """Number of dominant principal directions of a projected cloud around ``mp``"""
    basis = basis or build_basis(level.spec)
    rng = np.random.default_rng(seed)
    cloud = []
    for _ in range(neighbors):
        u = rng.standard_normal(len(basis))
        u *= scale / np.linalg.norm(u)
        try:
            q = newton_project(level, group_exp(mp.point, basis.vector(u)), basis=basis).point
        except LabError:
            continue
        cloud.append(group_log(mp.point, q, basis))
    pca = PCA().fit(np.array(cloud))
    variance = pca.explained_variance_
    return int(np.sum(variance >= rel * variance[0]))


def leaf_separation(points: Sequence[ManifoldPoint], other: LevelSetSpec) -> float:
    """min |Psi_other| over points sampled on another leaf"""
    if not points:
        return float("inf")
    return float(min(abs(other.psi(mp.point)) for mp in points))


@dataclass
class PointCloud:
    level: LevelSetSpec
    points: List[ManifoldPoint]
    report: SamplingReport
    curvature: Dict[int, CurvatureReport] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)


def _flatten(p: GroupElement) -> np.ndarray:
    return np.concatenate([p.matrix.real.ravel(), p.matrix.imag.ravel()])


def _dedup(candidates: List[ManifoldPoint], kept: List[ManifoldPoint], floor: float) -> List[ManifoldPoint]:
    """Greedy in order: keep a candidate unless it is within ``floor`` of a kept point"""
    pool = kept + candidates
    if not pool:
        return []
    coords = np.array([_flatten(mp.point) for mp in pool])
    neighbours = NearestNeighbors(radius=floor).fit(coords)
    _, close = neighbours.radius_neighbors(coords)
    accepted = set(range(len(kept)))
    out = []
    for offset, mp in enumerate(candidates):
        i = len(kept) + offset
        if not any(j in accepted for j in close[i] if j != i):
            accepted.add(i)
            out.append(mp)
    return out


def sample_manifold(level: LevelSetSpec, count: int, seed: int = 0, curvature_points: int = 0,
                    h: float = 1e-3, threads: Optional[int] = None) -> PointCloud:
    """Haar starts projected onto the level set, deduplicated, with diagnostics"""
    settings = config.sampling
    basis = build_basis(level.spec)
    if count == 0:
        return PointCloud(level, [], SamplingReport(requested=0, produced=0, attempts=0, yield_ratio=1.0))

    seeds = np.random.SeedSequence(seed).spawn(count * settings.max_attempt_factor)
    points: List[ManifoldPoint] = []
    attempts, singular = 0, 0

    def project(child):
        try:
            return newton_project(level, haar_sample(level.spec, child), basis=basis)
        except SingularityError:
            return "singular"
        except LabError as e:
            logger.debug(f"Projection failed: {e}")
            return None

    while len(points) < count and attempts < len(seeds):
        batch = seeds[attempts:attempts + (count - len(points))]
        attempts += len(batch)
        results = parallel_map(project, batch, threads)
        singular += sum(1 for r in results if isinstance(r, str))
        candidates = [r for r in results if isinstance(r, ManifoldPoint)]
        points.extend(_dedup(candidates, points, settings.dedup_floor)[: count - len(points)])

    if not points:
        if singular == attempts:
            raise SingularityError(f"Constraint of {level.label} is singular at every start ({attempts})")
        raise SamplingError(f"No start projected onto {level.label} ({singular} of {attempts} singular)")

    yield_ratio = len(points) / count
    if yield_ratio < settings.min_yield:
        logger.warning(f"Sampling yield {yield_ratio:.0%} below {settings.min_yield:.0%} for {level.label}")

    curvature: Dict[int, CurvatureReport] = {}
    if curvature_points and points:
        chosen = list(range(min(curvature_points, len(points))))
        reports = parallel_map(lambda i: mean_curvature(level, points[i], h, basis), chosen, threads)
        curvature = dict(zip(chosen, reports))

    report = SamplingReport(
        requested=count,
        produced=len(points),
        attempts=attempts,
        yield_ratio=yield_ratio,
        max_psi=float(max((abs(mp.psi_value) for mp in points), default=0.0)),
        min_singular_value=float(min(mp.min_singular_value for mp in points)) if points else None,
        max_curvature=max((r.norm for r in curvature.values()), default=None),
    )
    logger.info(f"Sampled {len(points)} of {count} points on {level.label} in {attempts} attempts")
    return PointCloud(level, points, report, curvature)
