"""
Maps p -> [P(phi_1(p), ..., phi_k(p)), Q(phi_1(p), ..., phi_k(p))] into the
projective line, built from an eigenfamily and two homogeneous polynomials of
the same degree, and their harmonic-morphism check in affine charts.

In the chart f = P o Phi / Q o Phi the map is a harmonic morphism exactly when
tau(f) = 0 and kappa(f, f) = 0; the opposite chart Q / P gives the same
verdict wherever both are defined.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from .calculus import kappa, laplacian
from .config import config
from .eigenfamilies import EigenFamily
from .errors import DegreeMismatchError, DependenceError, LabError
from .fields import PolynomialField, ScalarField
from .groups import GroupElement, build_basis, haar_sample
from .models import MorphismReport, SingularSetReport
from .parallel import parallel_map
from .polynomials import HomogeneousPoly, coefficient_matrix
from .projection import gauss_newton


@dataclass(frozen=True, eq=False)
class ProjectiveMorphism:
    family: EigenFamily
    members: Tuple[ScalarField, ...]
    P: HomogeneousPoly
    Q: HomogeneousPoly

    @property
    def spec(self):
        return self.family.spec

    @property
    def degree(self) -> int:
        return self.P.degree

    @cached_property
    def p_field(self) -> PolynomialField:
        return PolynomialField(self.spec, self.members, self.P, name="P o Phi")

    @cached_property
    def q_field(self) -> PolynomialField:
        return PolynomialField(self.spec, self.members, self.Q, name="Q o Phi")

    @cached_property
    def chart(self) -> PolynomialField:
        """f = (P o Phi) / (Q o Phi)"""
        return PolynomialField(self.spec, self.members, self.P, self.Q, name="P/Q")

    @cached_property
    def opposite_chart(self) -> PolynomialField:
        return PolynomialField(self.spec, self.members, self.Q, self.P, name="Q/P")

    def __call__(self, p: GroupElement) -> Tuple[complex, complex]:
        """Homogeneous coordinates [P o Phi(p), Q o Phi(p)]"""
        return self.p_field(p), self.q_field(p)

    def in_domain(self, p: GroupElement, eps: float = 1e-12) -> bool:
        P, Q = self(p)
        return abs(P) > eps or abs(Q) > eps


def build_morphism(F: EigenFamily, P: HomogeneousPoly, Q: HomogeneousPoly,
                   members: Optional[Sequence[Union[int, ScalarField]]] = None) -> ProjectiveMorphism:
    """Theorem-style map [P o Phi, Q o Phi] over chosen members of ``F``"""
    if members is None:
        chosen = tuple(F.members)
    else:
        chosen = tuple(F.members[m] if isinstance(m, (int, np.integer)) else m for m in members)

    k = len(chosen)
    if P.k != k or Q.k != k:
        raise DegreeMismatchError(f"Polynomials need {k} variables, got P: {P.k}, Q: {Q.k}")
    if P.degree != Q.degree:
        raise DegreeMismatchError(f"P has degree {P.degree} but Q has degree {Q.degree}")

    coeffs = coefficient_matrix([P, Q])
    if np.linalg.matrix_rank(coeffs, tol=1e-12 * max(1.0, np.abs(coeffs).max())) < 2:
        raise DependenceError("P and Q are linearly dependent")

    logger.debug(f"Built morphism of degree {P.degree} over {k} members of {F.label}")
    return ProjectiveMorphism(F, chosen, P, Q)


def _chart_residuals(field: ScalarField, points: List[GroupElement], threads: Optional[int]) -> Tuple[float, float]:
    if not points:
        return 0.0, 0.0
    basis = build_basis(field.spec)

    def evaluate(p):
        return abs(laplacian(field, p, basis).value), abs(kappa(field, field, p, basis).value)

    values = np.array(parallel_map(evaluate, points, threads))
    return float(values[:, 0].max()), float(values[:, 1].max())


def _guarded(values: np.ndarray, guard: float) -> np.ndarray:
    """Mask of samples comfortably inside the chart"""
    threshold = guard * float(np.median(values))
    return values > max(threshold, 1e-300)


def verify_harmonic_morphism(m: ProjectiveMorphism, samples: Optional[int] = None, seed: int = 0,
                             tol: Optional[float] = None, threads: Optional[int] = None) -> MorphismReport:
    """max |tau(f)| and max |kappa(f, f)| of the chart field over guarded Haar samples"""
    samples = config.sampling.samples if samples is None else samples
    tol = tol if tol is not None else config.tolerances.morphism
    guard = config.sampling.chart_guard
    report = dict(family=m.family.label, group=m.spec.label, degree=m.degree,
                  samples_requested=samples, tolerance=tol)

    points = [haar_sample(m.spec, child) for child in np.random.SeedSequence(seed).spawn(samples)]
    if not points:
        return MorphismReport(samples_used=0, status="inconclusive", **report)

    coords = np.array([m(p) for p in points])
    primary = [p for p, keep in zip(points, _guarded(np.abs(coords[:, 1]), guard)) if keep]
    opposite = [p for p, keep in zip(points, _guarded(np.abs(coords[:, 0]), guard)) if keep]
    if not primary:
        logger.warning(f"Every sample lies outside the chart of {m.family.label}")
        return MorphismReport(samples_used=0, status="inconclusive", **report)

    tau_res, kappa_res = _chart_residuals(m.chart, primary, threads)
    opp_tau, opp_kappa = _chart_residuals(m.opposite_chart, opposite, threads)
    status = "pass" if max(tau_res, kappa_res) < tol else "fail"
    logger.info(
        f"Morphism over {m.family.label} (degree {m.degree}): tau {tau_res:.2e}, kappa {kappa_res:.2e} "
        f"on {len(primary)} points -> {status}"
    )
    return MorphismReport(
        samples_used=len(primary),
        tau_residual=tau_res,
        kappa_residual=kappa_res,
        opposite_tau_residual=opp_tau,
        opposite_kappa_residual=opp_kappa,
        status=status,
        **report,
    )


def singular_set_probe(m: ProjectiveMorphism, samples: int = 1000, seed: int = 0, refine: int = 5,
                       extra_points: Iterable[GroupElement] = ()) -> SingularSetReport:
    """Search for common zeros of P o Phi and Q o Phi.

    Samples give an upper bound on min max(|P o Phi|, |Q o Phi|); the best
    ``refine`` candidates are then pushed towards the joint zero set by
    least-squares Gauss-Newton.
    """
    points = [haar_sample(m.spec, child) for child in np.random.SeedSequence(seed).spawn(samples)]
    points.extend(extra_points)
    if not points:
        return SingularSetReport(samples=0, sampled_floor=float("inf"), floor=float("inf"), likely_empty=True)

    def height(p):
        P, Q = m(p)
        return max(abs(P), abs(Q))

    heights = np.array([height(p) for p in points])
    sampled_floor = float(heights.min())
    floor = sampled_floor
    basis = build_basis(m.spec)
    for index in np.argsort(heights, kind="stable")[:refine]:
        if floor == 0.0:
            break
        try:
            result = gauss_newton([m.p_field, m.q_field], points[index], basis=basis, least_squares=True)
        except LabError as e:
            logger.debug(f"Refinement from sample {index} failed: {e}")
            continue
        floor = min(floor, height(result.point))

    likely_empty = floor > config.sampling.singular_floor
    logger.info(f"Singular set probe: sampled floor {sampled_floor:.3e}, refined floor {floor:.3e}")
    return SingularSetReport(
        samples=len(points),
        sampled_floor=sampled_floor,
        floor=floor,
        likely_empty=likely_empty,
        witness_residual=None if likely_empty else floor,
    )
