"""
File formats: whitespace-delimited complex matrices and vectors ("re im"
pairs, row-major), point-cloud CSV and PLY.
"""
from io import StringIO
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from .errors import ConfigError
from .level_sets import PointCloud

FLOAT_FORMAT = "%.17g"


def _read_pairs(path: str) -> np.ndarray:
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"File not found: {path}")
    text = file_path.read_text()
    return parse_pairs(text, source=path)


def parse_pairs(text: str, source: str = "<text>") -> np.ndarray:
    """Rows of complex numbers from lines of "re im re im ..." pairs"""
    try:
        frame = pd.read_csv(StringIO(text), sep=r"\s+", header=None, comment="#", dtype=float)
    except (ValueError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"Cannot parse {source}: {e}") from e
    values = frame.to_numpy()
    if np.isnan(values).any():
        raise ConfigError(f"{source}: rows have different lengths")
    if values.shape[1] % 2:
        raise ConfigError(f"{source}: expected 're im' pairs, got {values.shape[1]} numbers per row")
    return values[:, 0::2] + 1j * values[:, 1::2]


def read_matrix(path: str, size: Optional[int] = None) -> np.ndarray:
    M = _read_pairs(path)
    if M.shape[0] != M.shape[1]:
        raise ConfigError(f"{path}: matrix must be square, got {M.shape}")
    if size is not None and M.shape[0] != size:
        raise ConfigError(f"{path}: expected a {size}x{size} matrix, got {M.shape}")
    return M


def read_vector(path: str, size: Optional[int] = None) -> np.ndarray:
    v = _read_pairs(path).reshape(-1)
    if size is not None and v.shape[0] != size:
        raise ConfigError(f"{path}: expected {size} entries, got {v.shape[0]}")
    return v


def cloud_frame(cloud: PointCloud) -> pd.DataFrame:
    """One row per point: matrix entries (re, im, row-major), |Psi|, sigma_min, curvature"""
    m = cloud.level.spec.m
    columns = [f"z{i + 1}{j + 1}_{part}" for i in range(m) for j in range(m) for part in ("re", "im")]
    rows = []
    for index, mp in enumerate(cloud.points):
        entries = np.column_stack([mp.point.matrix.real.ravel(), mp.point.matrix.imag.ravel()]).ravel()
        curvature = cloud.curvature.get(index)
        rows.append(list(entries) + [abs(mp.psi_value), mp.min_singular_value,
                                     curvature.norm if curvature else np.nan])
    return pd.DataFrame(rows, columns=columns + ["psi_abs", "sigma_min", "curvature"])


def write_csv(cloud: PointCloud, path: str) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    cloud_frame(cloud).to_csv(out, index=False, float_format=FLOAT_FORMAT, na_rep="")
    logger.info(f"Wrote {len(cloud)} points to {out}")
    return out


def write_ply(cloud: PointCloud, path: str, chart: Sequence[int] = (0, 1, 2)) -> Path:
    """ASCII PLY of three chosen real coordinates of each point"""
    if len(chart) != 3:
        raise ConfigError(f"PLY chart needs three coordinate indices, got {list(chart)}")
    frame = cloud_frame(cloud)
    width = 2 * cloud.level.spec.m ** 2
    if any(not 0 <= c < width for c in chart):
        raise ConfigError(f"Chart indices must lie in [0, {width})")
    xyz = frame.iloc[:, list(chart)].to_numpy()

    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    header = [
        "ply",
        "format ascii 1.0",
        f"comment {cloud.level.label}",
        f"element vertex {len(xyz)}",
        "property double x",
        "property double y",
        "property double z",
        "end_header",
    ]
    lines = [" ".join(FLOAT_FORMAT % v for v in row) for row in xyz]
    out.write_text("\n".join(header + lines) + "\n")
    logger.info(f"Wrote {len(xyz)} vertices to {out}")
    return out
