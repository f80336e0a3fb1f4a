"""
Tests for root systems, highest weights and Casimir values
"""
from fractions import Fraction

import pytest
from loguru import logger

from src.errors import InvalidSpecError, PreconditionError, UsageError
from src.groups import make_spec
from src.roots import (
    Weight,
    brute_force_casimir,
    casimir_eigenvalue,
    casimir_fraction,
    crosscheck_casimir,
    named_weight,
    root_system,
)


@pytest.mark.parametrize(
    "family, n, label, count",
    [("SU", 2, "A1", 1), ("SU", 4, "A3", 6), ("SO", 3, "B1", 1), ("SO", 5, "B2", 4),
     ("SO", 4, "D2", 2), ("SO", 6, "D3", 6), ("Sp", 1, "C1", 1), ("Sp", 3, "C3", 9)],
)
def test_root_systems(family, n, label, count):
    R = root_system(family, n)
    assert R.label == label
    assert len(R.positive_roots) == count == R.expected_count()
    # every simple coroot pairs to 1 with delta
    for root in R.simple_roots:
        pairing = R.inner(R.delta, root) * 2 / R.norm2(root)
        assert pairing == 1


def test_root_system_accepts_spec():
    assert root_system(make_spec("Sp", 2)).label == "C2"


def test_so_rank_too_small():
    with pytest.raises(InvalidSpecError):
        root_system("SO", 2)


@pytest.mark.parametrize(
    "family, n, label, expected",
    [
        ("SU", 2, "standard", Fraction(-3, 2)),
        ("SU", 3, "standard", Fraction(-8, 3)),
        ("SU", 4, "standard", Fraction(-15, 4)),
        ("SU", 3, "dual", Fraction(-8, 3)),
        ("SU", 3, "adjoint", Fraction(-6)),
        ("SU", 5, "adjoint", Fraction(-10)),
        ("SO", 3, "standard", Fraction(-1)),
        ("SO", 5, "standard", Fraction(-2)),
        ("SO", 6, "standard", Fraction(-5, 2)),
        ("SO", 5, "adjoint", Fraction(-3)),
        ("SO", 6, "adjoint", Fraction(-4)),
        ("Sp", 1, "standard", Fraction(-3, 2)),
        ("Sp", 2, "standard", Fraction(-5, 2)),
        ("Sp", 2, "adjoint", Fraction(-6)),
        ("SU", 3, "zero", Fraction(0)),
    ],
)
def test_closed_form_casimir(family, n, label, expected):
    R = root_system(family, n)
    assert casimir_fraction(named_weight(R, label), R) == expected


def test_non_dominant_weight_is_rejected():
    R = root_system("SU", 3)
    with pytest.raises(PreconditionError):
        casimir_eigenvalue(Weight((Fraction(-1), Fraction(0), Fraction(1)), "lowest"), R)


def test_unknown_representation():
    with pytest.raises(UsageError):
        named_weight(root_system("SU", 2), "spin")
    with pytest.raises(UsageError):
        brute_force_casimir(make_spec("SU", 2), "spin")


@pytest.mark.parametrize(
    "family, n, label",
    [("SU", 2, "standard"), ("SU", 3, "dual"), ("SU", 3, "adjoint"), ("SO", 4, "standard"),
     ("SO", 5, "adjoint"), ("Sp", 2, "standard"), ("Sp", 2, "adjoint")],
)
def test_brute_force_matches_closed_form(family, n, label):
    spec = make_spec(family, n)
    R = root_system(spec)
    scalar, spread = brute_force_casimir(spec, label)
    assert spread < 1e-12
    assert scalar == pytest.approx(casimir_eigenvalue(named_weight(R, label), R), abs=1e-12)


@pytest.mark.parametrize(
    "family, n, label",
    [("SU", 2, "standard"), ("SU", 4, "standard"), ("SU", 3, "adjoint"), ("SO", 5, "standard"),
     ("Sp", 2, "standard"), ("Sp", 1, "adjoint")],
)
def test_crosscheck(family, n, label):
    report = crosscheck_casimir(make_spec(family, n), label, seed=3)
    logger.info(f"{report.group} {label}: alpha {report.predicted}, discrepancy {report.discrepancy:.2e}")
    assert report.passed
    assert report.discrepancy < 1e-9
    assert report.measured == pytest.approx(report.predicted, abs=1e-9)


def test_crosscheck_su2_standard_is_minus_three_halves():
    report = crosscheck_casimir(make_spec("SU", 2), "standard")
    assert report.predicted == -1.5
    assert report.weight == ["1/2", "-1/2"]
