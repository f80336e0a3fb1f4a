"""
Tests for codimension-two level sets: projection, regularity, curvature and sampling
"""
import numpy as np
import pytest
from loguru import logger

from src.errors import NonConvergenceError, PreconditionError, SamplingError, SingularityError
from src.groups import build_basis, haar_sample, identity
from src.level_sets import (
    commutator_gradient,
    control,
    distinct_eigenvalues,
    from_matrix,
    from_morphism,
    full_differential_norm,
    leaf_separation,
    local_dimension,
    mean_curvature,
    newton_project,
    normal_accelerations,
    random_distinct,
    refinement_factor,
    regularity_check,
    sample_manifold,
    tangent_basis,
)
from src.morphisms import build_morphism
from src.eigenfamilies import su_standard
from src.polynomials import HomogeneousPoly, Polynomial

DIAG = np.diag([1.0, 2.0, 3.0])


def _hopf():
    F = su_standard(2)
    P = HomogeneousPoly.from_polynomial(Polynomial.linear([1, 0]))
    Q = HomogeneousPoly.from_polynomial(Polynomial.linear([0, 1]))
    return build_morphism(F, P, Q)


def test_distinct_eigenvalues():
    assert distinct_eigenvalues(DIAG)
    assert not distinct_eigenvalues(np.eye(3))
    assert not distinct_eigenvalues(np.diag([1.0, 1.0, 2.0]))
    H = random_distinct(4, np.random.default_rng(0))
    assert H.shape == (4, 4)
    assert distinct_eigenvalues(H)


def test_from_matrix_shape_is_checked():
    with pytest.raises(PreconditionError):
        from_matrix(3, np.eye(2))


def test_projection_lands_on_a_regular_point():
    level = from_matrix(3, DIAG)
    mp = newton_project(level, haar_sample(level.spec, 0))
    assert abs(mp.psi_value) < 1e-12
    assert mp.point.membership_residual() < 1e-11
    assert mp.min_singular_value > 1e-4
    assert mp.tangent.shape == (level.spec.d - 2, level.spec.d)


def test_tangent_frame_is_orthonormal_and_normal_to_the_gradients():
    level = from_matrix(3, DIAG)
    basis = build_basis(level.spec)
    mp = newton_project(level, haar_sample(level.spec, 1), basis=basis)
    T = np.array([X.coefficients(basis) for X in tangent_basis(level, mp, basis)])
    assert len(T) == 6
    assert np.allclose(T @ T.T, np.eye(6), atol=1e-12)
    assert np.max(np.abs(T @ mp.gradients.T)) < 1e-10


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_commutator_formula_for_the_gradient(seed):
    rng = np.random.default_rng(seed)
    level = from_matrix(3, random_distinct(3, rng))
    p = haar_sample(level.spec, seed)
    report = regularity_check(level, p, rng=rng)
    assert report.formula_discrepancy < 1e-9
    assert report.holomorphic_discrepancy < 1e-9
    assert report.regular


def test_identity_matrix_is_the_degenerate_case():
    # the columns of z are orthogonal, so z1^T conj(z2) vanishes everywhere
    level = from_matrix(3, np.eye(3))
    basis = build_basis(level.spec)
    p = haar_sample(level.spec, 3)
    assert np.max(np.abs(commutator_gradient(level.H, p.matrix, basis))) < 1e-14
    assert full_differential_norm(level, p, basis) < 1e-14
    assert not regularity_check(level, p, basis).regular
    with pytest.raises(SingularityError):
        newton_project(level, p, basis=basis)
    with pytest.raises(SingularityError):
        sample_manifold(level, 3, seed=0)


def test_distinct_spectrum_level_set_is_minimal():
    level = from_matrix(3, DIAG)
    mp = newton_project(level, haar_sample(level.spec, 4))
    report = mean_curvature(level, mp, h=1e-3)
    logger.info(f"|H| = {report.norm:.2e} on {level.label}")
    assert report.tangent_dimension == 6
    assert report.minimal
    assert report.norm < 5e-4


def test_control_circle_is_not_minimal():
    level = control()
    mp = newton_project(level, haar_sample(level.spec, 0))
    report = mean_curvature(level, mp, h=1e-3)
    assert report.tangent_dimension == 1
    assert not report.minimal
    # a circle of Euclidean radius sqrt(0.91) on a sphere of radius sqrt(2)
    assert report.norm == pytest.approx(np.sqrt(1 / 0.91 - 1) / np.sqrt(2), rel=1e-2)


@pytest.mark.parametrize("h", [1e-5, 0.05])
def test_curvature_step_range(h):
    level = control()
    mp = newton_project(level, haar_sample(level.spec, 0))
    with pytest.raises(PreconditionError):
        mean_curvature(level, mp, h=h)


def test_local_dimension_is_codimension_two():
    level = from_matrix(3, DIAG)
    mp = newton_project(level, haar_sample(level.spec, 5))
    assert local_dimension(level, mp, neighbors=50, seed=1) == level.spec.d - 2


def test_hopf_fibres_are_disjoint_geodesics():
    m = _hopf()
    south = from_morphism(m, (1, 0))
    north = from_morphism(m, (0, 1))
    cloud = sample_manifold(south, 5, seed=2, curvature_points=2)
    assert len(cloud) == 5
    assert cloud.report.max_psi < 1e-12
    # z21 = 0 forces |z11| = 1
    assert leaf_separation(cloud.points, north) == pytest.approx(1.0, abs=1e-10)
    assert all(r.minimal for r in cloud.curvature.values())
    with pytest.raises(PreconditionError):
        from_morphism(m, (0, 0))


def test_sampling_report_and_determinism():
    level = from_matrix(3, DIAG)
    first = sample_manifold(level, 8, seed=11, threads=1)
    second = sample_manifold(level, 8, seed=11, threads=2)
    assert first.report.produced == 8
    assert first.report.max_psi < 1e-12
    assert first.report.min_singular_value > 1e-4
    assert first.report.yield_ratio == 1.0
    for a, b in zip(first.points, second.points):
        assert np.array_equal(a.point.matrix, b.point.matrix)
    coords = np.array([mp.point.matrix.ravel() for mp in first.points])
    gaps = np.linalg.norm(coords[:, None] - coords[None, :], axis=-1)
    assert np.min(gaps[np.triu_indices(8, k=1)]) > 1e-8


def test_sampling_nothing():
    cloud = sample_manifold(from_matrix(3, DIAG), 0)
    assert len(cloud) == 0
    assert cloud.report.produced == 0


def test_identity_lies_on_diagonal_levels():
    # z = I has z_1^T H conj(z_2) = H[0, 1]
    level = from_matrix(3, DIAG)
    assert abs(level.psi(identity(level.spec))) == 0.0


def _char_poly(H):
    # Faddeev-LeVerrier, leading coefficient first
    n = H.shape[0]
    coeffs = [1.0 + 0j]
    M = np.zeros_like(H, dtype=complex)
    for k in range(1, n + 1):
        M = H @ M + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(H @ M) / k)
    return np.array(coeffs)


def _discriminant(H):
    """|Res(p, p')| of the characteristic polynomial, zero exactly on repeated eigenvalues"""
    p = _char_poly(np.asarray(H, dtype=complex))
    dp = np.polyder(p)
    n, m = len(p) - 1, len(dp) - 1
    sylvester = np.zeros((n + m, n + m), dtype=complex)
    for row in range(m):
        sylvester[row, row:row + n + 1] = p
    for row in range(n):
        sylvester[m + row, row:row + m + 1] = dp
    return abs(np.linalg.det(sylvester))


@pytest.mark.parametrize(
    "H",
    [
        DIAG,
        np.diag([1.0, 1.0, 2.0]),
        np.eye(3),
        np.array([[1.0, 1.0], [0.0, 1.0]]),
        np.diag([1.0, 1.0 + 1e-12, 2.0]),
        np.array([[0.0, -1.0], [1.0, 0.0]]),
        *[np.random.default_rng(s).standard_normal((4, 4)) for s in range(5)],
    ],
    ids=["diag", "double", "scalar", "jordan", "near-double", "rotation", *[f"gauss-{s}" for s in range(5)]],
)
def test_distinct_eigenvalues_agrees_with_the_discriminant(H):
    disc = _discriminant(H)
    logger.debug(f"discriminant {disc:.3e}")
    assert distinct_eigenvalues(H) == (disc > 1e-9)


def test_curvature_estimate_is_second_order():
    level = from_matrix(3, DIAG)
    mp = newton_project(level, haar_sample(level.spec, 4))
    coarse, fine, ratio = refinement_factor(level, mp, h=1e-3)
    logger.info(f"refinement {coarse:.3e} -> {fine:.3e} ({ratio:.3f})")
    assert 3.0 <= ratio <= 5.0


def test_accelerations_have_one_row_per_tangent_direction():
    level = from_matrix(3, DIAG)
    mp = newton_project(level, haar_sample(level.spec, 4))
    rows = normal_accelerations(level, mp, h=1e-3)
    assert rows.shape == (6, 2)
    assert np.linalg.norm(rows.sum(axis=0)) == pytest.approx(mean_curvature(level, mp, h=1e-3).norm, rel=1e-12)


@pytest.mark.parametrize("h", [1e-4, 5e-3])
def test_refinement_steps_stay_in_range(h):
    level = control()
    mp = newton_project(level, haar_sample(level.spec, 0))
    with pytest.raises(PreconditionError):
        refinement_factor(level, mp, h=h)


def test_sampling_with_no_projected_start(monkeypatch):
    def never_converges(level, p0, **kwargs):
        raise NonConvergenceError("budget exhausted")

    monkeypatch.setattr("src.level_sets.newton_project", never_converges)
    with pytest.raises(SamplingError):
        sample_manifold(from_matrix(3, DIAG), 2, seed=0)
