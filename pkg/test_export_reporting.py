"""
Tests for file formats and report envelopes
"""
import json
from datetime import datetime

import numpy as np
import pytest

from src.errors import ConfigError
from src.export import cloud_frame, parse_pairs, read_matrix, read_vector, write_csv, write_ply
from src.level_sets import from_matrix, sample_manifold
from src.models import SCHEMA_ID, CheckResult, ReportEnvelope, RunConfig, Timing
from src.reporting import build_envelope, check, clean, envelope_json, without_timing, write_report


@pytest.fixture(scope="module")
def cloud():
    return sample_manifold(from_matrix(3, np.diag([1.0, 2.0, 3.0])), 4, seed=0, curvature_points=1)


def test_parse_pairs():
    M = parse_pairs("1 0  0 1   # first row\n# comment line\n-1 0.5 2 -2\n")
    assert M.shape == (2, 2)
    assert M[0, 1] == 1j
    assert M[1, 0] == -1 + 0.5j


@pytest.mark.parametrize("text", ["", "1 0 2", "1 0 0 1\n1 0", "a b"])
def test_parse_pairs_errors(text):
    with pytest.raises(ConfigError):
        parse_pairs(text)


def test_read_matrix_and_vector(tmp_path):
    square = tmp_path / "h.txt"
    square.write_text("1 0 0 0\n0 0 2 0\n")
    assert np.array_equal(read_matrix(str(square), 2), np.diag([1.0, 2.0]))
    with pytest.raises(ConfigError):
        read_matrix(str(square), 3)

    wide = tmp_path / "wide.txt"
    wide.write_text("1 0 0 0\n")
    with pytest.raises(ConfigError):
        read_matrix(str(wide))
    assert np.array_equal(read_vector(str(wide), 2), [1.0, 0.0])
    with pytest.raises(ConfigError):
        read_vector(str(wide), 3)
    with pytest.raises(ConfigError):
        read_vector(str(tmp_path / "missing.txt"))


def test_csv_layout(cloud, tmp_path):
    frame = cloud_frame(cloud)
    assert list(frame.columns[:4]) == ["z11_re", "z11_im", "z12_re", "z12_im"]
    assert list(frame.columns[-3:]) == ["psi_abs", "sigma_min", "curvature"]
    assert len(frame.columns) == 2 * 9 + 3
    assert frame["z21_im"].iloc[0] == cloud.points[0].point.matrix[1, 0].imag
    assert not np.isnan(frame["curvature"].iloc[0])
    assert np.isnan(frame["curvature"].iloc[1])

    out = write_csv(cloud, str(tmp_path / "nested" / "cloud.csv"))
    lines = out.read_text().splitlines()
    assert len(lines) == 5
    # missing curvature is an empty field
    assert lines[2].endswith(",")


def test_ply_layout(cloud, tmp_path):
    out = write_ply(cloud, str(tmp_path / "cloud.ply"), chart=(0, 2, 4))
    lines = out.read_text().splitlines()
    assert lines[0] == "ply"
    assert "element vertex 4" in lines
    body = lines[lines.index("end_header") + 1:]
    assert len(body) == 4
    first = [float(v) for v in body[0].split()]
    z = cloud.points[0].point.matrix
    assert first == [z[0, 0].real, z[0, 1].real, z[0, 2].real]


@pytest.mark.parametrize("chart", [(0, 1), (0, 1, 18)])
def test_ply_chart_errors(cloud, tmp_path, chart):
    with pytest.raises(ConfigError):
        write_ply(cloud, str(tmp_path / "bad.ply"), chart=chart)


def test_check_semantics():
    assert check("small", 1e-13, 1e-12).passed
    assert not check("small", 1e-11, 1e-12).passed
    assert check("large", 0.2, 1e-2, ">").passed
    assert not check("missing", None, 1e-12).passed
    assert check("explicit", None, None, passed=True).passed
    with pytest.raises(ValueError):
        check("odd", 1.0, 2.0, "<=")


def test_clean():
    data = {"a": np.float64(1.5), "b": float("nan"), "c": 1 + 2j, "d": np.array([1, 2]), 3: (np.inf,)}
    assert clean(data) == {"a": 1.5, "b": None, "c": [1.0, 2.0], "d": [1, 2], "3": [None]}


def _envelope(checks):
    run = RunConfig(command="casimir", group="su", n=2)
    return build_envelope("casimir", run, checks, {"alpha": np.float64(-1.5)}, datetime.now(),
                          durations={"casimir": 0.1234567891})


def test_envelope_validates_and_sorts_keys(tmp_path):
    envelope = _envelope([check("a", 0.0, 1.0)])
    text = envelope_json(envelope)
    data = json.loads(text)
    assert data["schema"] == SCHEMA_ID
    assert data["verdict"] == "pass"
    assert data["results"]["alpha"] == -1.5
    assert data["timing"]["durations"]["casimir"] == 0.123457
    assert list(data) == sorted(data)
    assert json.loads(write_report(envelope, str(tmp_path / "r.json")).read_text()) == data


def test_failed_check_fails_the_envelope():
    envelope = _envelope([check("a", 0.0, 1.0), check("b", 2.0, 1.0)])
    assert envelope.verdict == "fail"


def test_verdict_must_match_checks():
    with pytest.raises(ValueError):
        ReportEnvelope(command="casimir", config={}, checks=[CheckResult(name="x", passed=False)],
                       verdict="pass", timing=Timing(started="", finished=""))


def test_reports_compare_without_timing():
    first = envelope_json(_envelope([check("a", 0.0, 1.0)]))
    second = envelope_json(_envelope([check("a", 0.0, 1.0)]))
    assert without_timing(first) == without_timing(second)
    assert "timing" not in json.loads(without_timing(first))
