"""
Tests for the eigenfamily catalogue, verification and product families
"""
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from loguru import logger

from src.eigenfamilies import (
    build_family,
    catalogue,
    cross_kappa_constant,
    is_isotropic,
    product_family,
    so_isotropic,
    sp_standard,
    su_dual,
    su_extended,
    su_standard,
    su_tensor,
    verify_family,
)
from src.errors import NotOrthogonalError, PreconditionError, SpecMismatchError, UsageError
from src.fields import matrix_entry


@pytest.mark.parametrize("family", catalogue(), ids=lambda F: f"{F.label}-{F.spec.label}-{F.index_dimension}")
def test_catalogue(family):
    report = verify_family(family, samples=20, seed=1)
    logger.info(f"{family.label} on {family.spec.label}: {report.status}")
    assert report.lambda_hat.real == pytest.approx(family.expected_lambda, abs=1e-8)
    if family.label == "su_extended" and family.generators["s"] > 1:
        # cross-summand pairs break the conformality identity
        assert report.status == "fail"
        assert report.tau_residual < 1e-8
        assert report.kappa_residual > 1e-2
        return
    assert report.status == "pass"
    assert report.mu_hat.real == pytest.approx(family.expected_mu, abs=1e-8)
    assert abs(report.lambda_hat.imag) < 1e-10


@pytest.mark.parametrize(
    "family, lam, mu",
    [
        (su_standard(2), -1.5, -0.5),
        (su_standard(4), -3.75, -0.75),
        (su_dual(3), -8 / 3, -2 / 3),
        (so_isotropic(3, [1, 1j, 0]), -1.0, -0.5),
        (so_isotropic(5), -2.0, -0.5),
        (sp_standard(1), -1.5, -0.5),
        (su_tensor(4), -8.0, -2.0),
    ],
    ids=["su2", "su4", "dual3", "so3", "so5", "sp1", "tensor4"],
)
def test_expected_constants(family, lam, mu):
    report = verify_family(family, samples=10, seed=2)
    assert report.passed
    assert family.expected_lambda == pytest.approx(lam)
    assert family.expected_mu == pytest.approx(mu)
    assert report.lambda_hat.real == pytest.approx(lam, abs=1e-9)
    assert report.mu_hat.real == pytest.approx(mu, abs=1e-9)


def test_tensor_family_index_space():
    F = su_tensor(3)
    assert len(F) == 9
    assert F.index_dimension == 9
    assert len(F.pairs()) == 45
    assert su_extended(4, 2).index_dimension == 32


def test_isotropy():
    assert is_isotropic([1, 1j, 0])
    assert is_isotropic([3, 4, 5j])
    assert not is_isotropic([1, 0, 0])
    assert not is_isotropic([1, 1j + 1, 0])
    # float path
    assert is_isotropic(np.array([1.0, 1j]) / np.sqrt(2.0))


def test_constructor_preconditions():
    with pytest.raises(PreconditionError):
        so_isotropic(4, [1, 0, 0, 0])
    with pytest.raises(PreconditionError):
        su_standard(3, [1, 0])
    with pytest.raises(PreconditionError):
        su_standard(3, [0, 0, 0])
    with pytest.raises(PreconditionError):
        su_tensor(3, [1, 0, 0], [1, 1, 0])
    with pytest.raises(PreconditionError):
        su_extended(3, 2)
    with pytest.raises(PreconditionError):
        su_extended(4, 0)


@settings(max_examples=8, deadline=None)
@given(p=st.integers(-3, 3), q=st.integers(-3, 3))
def test_isotropic_gaussian_integer_generators(p, q):
    a = [p, q, 1j * p, 1j * q] if (p or q) else [1, 1j, 0, 0]
    F = so_isotropic(4, a)
    report = verify_family(F, samples=5, seed=(p + 3) * 7 + (q + 3))
    assert report.passed
    assert report.lambda_hat.real == pytest.approx(-1.5, abs=1e-9)


def test_corrupted_member_fails():
    F = su_standard(3)
    corrupted = F.with_member(0, su_tensor(3).members[1])
    assert corrupted.expected_lambda is None
    report = verify_family(corrupted, samples=20, seed=0)
    assert report.status == "fail"
    assert report.tau_residual > 1e-2


def test_span_of_a_family_is_a_family():
    F = su_standard(3).span_sample(4, np.random.default_rng(0))
    report = verify_family(F, samples=10, seed=0)
    assert report.passed
    assert report.mu_hat.real == pytest.approx(-2 / 3, abs=1e-9)


def test_nothing_to_verify_is_inconclusive():
    report = verify_family(su_standard(2), samples=0)
    assert report.status == "inconclusive"
    assert not report.passed


def test_verification_is_deterministic_and_thread_independent():
    F = sp_standard(2)
    first = verify_family(F, samples=12, seed=9, threads=1)
    second = verify_family(F, samples=12, seed=9, threads=3)
    assert first.model_dump_json() == second.model_dump_json()


def test_cross_pairs_of_columns_and_conjugate_columns():
    n = 3
    columns = su_standard(n, np.eye(n)[0])
    conjugates = su_dual(n, np.eye(n)[1])
    nu, residual = cross_kappa_constant(columns, conjugates, points=10, seed=4)
    assert residual < 1e-10
    assert nu.real == pytest.approx(-1 / n, abs=1e-10)

    with pytest.raises(NotOrthogonalError):
        product_family(columns, conjugates, require_orthogonal=True)

    products = product_family(columns, conjugates)
    assert len(products) == 9
    assert products.expected_lambda == pytest.approx(-6.0)
    assert products.expected_mu == pytest.approx(-2.0)
    report = verify_family(products, samples=10, seed=5)
    assert report.passed
    assert report.lambda_hat.real == pytest.approx(-6.0, abs=1e-9)


def test_symmetric_square_of_the_standard_family():
    F = su_standard(3)
    squares = product_family(F, F)
    report = verify_family(squares, samples=10, seed=6)
    assert report.passed
    assert report.lambda_hat.real == pytest.approx(-20 / 3, abs=1e-9)
    assert report.mu_hat.real == pytest.approx(-8 / 3, abs=1e-9)


def test_products_need_kappa_proportional_cross_pairs():
    spec_family = su_tensor(3)
    other = su_standard(3)
    foreign = other.with_member(0, matrix_entry(other.spec, 0, 0) * matrix_entry(other.spec, 1, 1))
    with pytest.raises(NotOrthogonalError):
        product_family(spec_family, foreign)
    with pytest.raises(SpecMismatchError):
        product_family(su_standard(2), su_standard(3))


def test_build_family_labels():
    assert build_family("su", 3, "tensor").label == "su_tensor"
    assert build_family("SU", 3, "su_dual").label == "su_dual"
    assert build_family("so", 4, "standard").label == "so_isotropic"
    assert build_family("sp", 2, "standard").label == "sp_standard"
    assert len(build_family("su", 4, "extended", s=2)) == 32
    with pytest.raises(UsageError):
        build_family("so", 4, "tensor")
    with pytest.raises(UsageError):
        build_family("su", 3, "sp_standard")
    with pytest.raises(UsageError):
        build_family("su", 3, "nonsense")
