"""
Tests for group specs, algebra bases, Haar sampling and exp/log/retraction
"""
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from loguru import logger

from src.errors import InvalidSpecError, RetractionError, SpecMismatchError
from src.config import config
from src.groups import (
    AlgebraVector,
    algebra_residual,
    build_basis,
    group_exp,
    group_log,
    haar_sample,
    identity,
    inner,
    make_spec,
    retract_to_group,
)

SPECS = [("SU", 2), ("SU", 3), ("SU", 4), ("SO", 3), ("SO", 4), ("SO", 5), ("Sp", 1), ("Sp", 2)]


@pytest.mark.parametrize(
    "family, n, m, d",
    [
        ("su", 2, 2, 3),
        ("SU", 4, 4, 15),
        ("so", 3, 3, 3),
        ("SO", 4, 4, 6),
        ("sp", 1, 2, 3),
        ("Sp", 2, 4, 10),
    ],
)
def test_dimensions(family, n, m, d):
    spec = make_spec(family, n)
    assert spec.m == m
    assert spec.d == d
    assert len(build_basis(spec)) == d


@pytest.mark.parametrize("family, n", [("SU", 1), ("SO", 2), ("Sp", 0), ("GL", 3)])
def test_unsupported_specs(family, n):
    with pytest.raises(InvalidSpecError):
        make_spec(family, n)


@pytest.mark.parametrize("family, n", SPECS)
def test_basis_is_orthonormal(family, n):
    spec = make_spec(family, n)
    basis = build_basis(spec)
    assert np.max(np.abs(basis.gram() - np.eye(spec.d))) < 1e-12
    for X in basis:
        assert algebra_residual(spec, X) < 1e-12


@pytest.mark.parametrize("family, n", SPECS)
def test_basis_coefficients_recover_combination(family, n):
    spec = make_spec(family, n)
    basis = build_basis(spec)
    coeffs = np.random.default_rng(3).standard_normal(spec.d)
    assert np.allclose(basis.coefficients(basis.combine(coeffs)), coeffs, atol=1e-12)


def test_inner_is_real_trace_form():
    X = np.array([[1j, 2], [-2, -1j]])
    assert inner(X, X) == pytest.approx(np.sum(np.abs(X) ** 2))


@settings(max_examples=40, deadline=None)
@given(index=st.integers(0, len(SPECS) - 1), seed=st.integers(0, 2**32 - 1))
def test_haar_samples_are_members(index, seed):
    family, n = SPECS[index]
    spec = make_spec(family, n)
    assert haar_sample(spec, seed).membership_residual() < 1e-12


def test_haar_sample_is_deterministic():
    spec = make_spec("Sp", 2)
    first = haar_sample(spec, 11)
    second = haar_sample(spec, 11)
    assert np.array_equal(first.matrix, second.matrix)
    assert not np.array_equal(first.matrix, haar_sample(spec, 12).matrix)


def test_haar_su2_first_entry_is_uniform_on_disk():
    # |z11|^2 is uniform on [0, 1] for Haar SU(2)
    spec = make_spec("SU", 2)
    values = np.array([abs(haar_sample(spec, child).matrix[0, 0]) ** 2
                       for child in np.random.SeedSequence(5).spawn(4000)])
    assert abs(values.mean() - 0.5) < 0.03
    assert abs(np.mean(values < 0.25) - 0.25) < 0.03


@pytest.mark.parametrize("family, n", SPECS)
def test_exp_stays_on_group_and_log_inverts(family, n):
    spec = make_spec(family, n)
    basis = build_basis(spec)
    p = haar_sample(spec, 1)
    coeffs = 0.3 * np.random.default_rng(2).standard_normal(spec.d)
    q = group_exp(p, basis.vector(coeffs))
    assert q.membership_residual() < 1e-11
    assert np.allclose(group_log(p, q, basis), coeffs, atol=1e-10)


def test_exp_with_zero_time_is_identity_map():
    spec = make_spec("SU", 3)
    p = haar_sample(spec, 0)
    X = build_basis(spec).vectors()[0]
    assert group_exp(p, X, 0.0) is p


def test_exp_of_a_diagonal_generator_in_closed_form():
    spec = make_spec("SU", 2)
    X = AlgebraVector(spec, np.diag([1j, -1j]) / np.sqrt(2.0))
    q = group_exp(identity(spec), X, np.pi * np.sqrt(2.0))
    assert np.allclose(q.matrix, -np.eye(2), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(s=st.floats(-3, 3), t=st.floats(-3, 3), seed=st.integers(0, 1000))
def test_exp_is_a_one_parameter_subgroup(s, t, seed):
    spec = make_spec("SU", 3)
    basis = build_basis(spec)
    coeffs = np.random.default_rng(seed).standard_normal(spec.d)
    X = basis.vector(coeffs / np.linalg.norm(coeffs))
    p = identity(spec)
    together = group_exp(p, X, s + t)
    stepwise = group_exp(group_exp(p, X, s), X, t)
    assert np.max(np.abs(together.matrix - stepwise.matrix)) < 1e-12


@pytest.mark.parametrize("family, n", [("SU", 3), ("SO", 4), ("Sp", 2)])
@settings(max_examples=15, deadline=None)
@given(t=st.floats(-10, 10), seed=st.integers(0, 1000))
def test_exp_stays_on_group_for_long_times(family, n, t, seed):
    spec = make_spec(family, n)
    basis = build_basis(spec)
    coeffs = np.random.default_rng(seed).standard_normal(spec.d)
    q = group_exp(haar_sample(spec, seed), basis.vector(coeffs / np.linalg.norm(coeffs)), t)
    assert q.membership_residual() < config.tolerances.exp_membership


def test_exp_rejects_mismatched_groups():
    p = identity(make_spec("SU", 3))
    X = build_basis(make_spec("SO", 3)).vectors()[0]
    with pytest.raises(SpecMismatchError):
        group_exp(p, X)


@pytest.mark.parametrize("family, n", SPECS)
def test_retraction(family, n):
    spec = make_spec(family, n)
    p = haar_sample(spec, 4)
    assert retract_to_group(p.matrix, spec).distance(p) < 1e-10

    noise = 1e-3 * np.random.default_rng(0).standard_normal((spec.m, spec.m))
    if spec.family != "SO":
        noise = noise + 1e-3j * np.random.default_rng(1).standard_normal((spec.m, spec.m))
    q = retract_to_group(p.matrix + noise, spec)
    assert q.membership_residual() < 1e-11
    assert q.distance(p) < 1e-2
    logger.info(f"Retraction on {spec.label} moved {q.distance(p):.2e}")


def test_retraction_failures():
    spec = make_spec("SU", 3)
    with pytest.raises(RetractionError):
        retract_to_group(np.zeros((3, 3)), spec)
    with pytest.raises(RetractionError):
        retract_to_group(3.0 * np.eye(3), spec)
    with pytest.raises(RetractionError):
        retract_to_group(np.eye(2), spec)
    with pytest.raises(RetractionError):
        retract_to_group(np.diag([1.0, 1.0, -1.0]), make_spec("SO", 3))
