"""
Tests for sparse polynomials and the plain-text polynomial format
"""
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from src.errors import ConfigError, DegreeMismatchError, PreconditionError
from src.polynomials import (
    HomogeneousPoly,
    Polynomial,
    coefficient_matrix,
    parse_sparse_poly,
    random_homogeneous,
)


def test_evaluation_gradient_hessian():
    # x0^2 x1 + 3i x2
    p = Polynomial.from_dict(3, {(2, 1, 0): 1.0, (0, 0, 1): 3j})
    x = np.array([2.0, -1.0, 0.5j])
    assert p(x) == pytest.approx(4 * -1 + 3j * 0.5j)
    assert np.allclose(p.gradient(x), [2 * 2 * -1, 4, 3j])
    expected = np.array([[2 * -1, 2 * 2, 0], [2 * 2, 0, 0], [0, 0, 0]])
    assert np.allclose(p.hessian(x), expected)
    assert p.degree == 3
    assert not p.is_homogeneous()


def test_evaluation_at_zero():
    p = Polynomial.from_dict(2, {(0, 0): 2.0, (1, 0): 1.0})
    assert p([0, 0]) == 2.0
    assert np.allclose(p.gradient([0, 0]), [1, 0])


def test_bad_multi_index():
    with pytest.raises(PreconditionError):
        Polynomial(2, (((1, -1), 1.0),))
    with pytest.raises(PreconditionError):
        Polynomial(2, (((1, 0, 0), 1.0),))


def test_homogeneous_requirements():
    with pytest.raises(DegreeMismatchError):
        HomogeneousPoly.from_polynomial(Polynomial.from_dict(2, {(1, 0): 1.0, (1, 1): 1.0}))
    with pytest.raises(PreconditionError):
        HomogeneousPoly(2, (((1, 0), 0j),))
    h = HomogeneousPoly.from_polynomial(Polynomial.from_dict(2, {(2, 0): 1.0, (1, 1): 0.0, (0, 2): -1.0}))
    assert h.degree == 2
    assert len(h.terms) == 2


def test_parse_sparse_format():
    text = """
    # x0^2 - (0.5 - i) x0 x1
    1.0 0.0 : 2 0
    -0.5 1.0 : 1 1   # trailing comment
    """
    p = parse_sparse_poly(text)
    assert p.k == 2
    assert p.degree == 2
    assert p([1.0, 2.0]) == pytest.approx(1.0 + (-0.5 + 1j) * 2.0)


@pytest.mark.parametrize(
    "text, error",
    [
        ("", ConfigError),
        ("1.0 0.0 2 0", ConfigError),
        ("1.0 : 2 0", ConfigError),
        ("1.0 0.0 : 2 x", ConfigError),
        ("1.0 0.0 : 2 0\n1.0 0.0 : 1 1 0", DegreeMismatchError),
        ("1.0 0.0 : 2 0\n1.0 0.0 : 1 0", DegreeMismatchError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_sparse_poly(text)


def test_parse_checks_variable_count():
    with pytest.raises(DegreeMismatchError):
        parse_sparse_poly("1 0 : 1 0", k=3)


@settings(max_examples=30, deadline=None)
@given(k=st.integers(1, 6), degree=st.integers(1, 4), seed=st.integers(0, 1000))
def test_random_homogeneous(k, degree, seed):
    p = random_homogeneous(k, degree, np.random.default_rng(seed))
    assert p.k == k
    assert p.degree == degree
    assert p.is_homogeneous()
    # Euler: x . grad p = degree * p
    x = np.random.default_rng(seed + 1).standard_normal(k) + 0j
    assert np.dot(x, p.gradient(x)) == pytest.approx(degree * p(x), rel=1e-9, abs=1e-9)


def test_text_format_reparses():
    p = random_homogeneous(4, 3, np.random.default_rng(2))
    assert parse_sparse_poly(p.to_text()) == p


def test_coefficient_matrix_detects_dependence():
    p = Polynomial.from_dict(2, {(1, 0): 1.0, (0, 1): 2.0})
    q = Polynomial.from_dict(2, {(1, 0): -2.0, (0, 1): -4.0})
    r = Polynomial.from_dict(2, {(0, 1): 1.0})
    assert np.linalg.matrix_rank(coefficient_matrix([p, q])) == 1
    assert np.linalg.matrix_rank(coefficient_matrix([p, r])) == 2
