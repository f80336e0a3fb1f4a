"""
The five command operations. Each takes a validated RunConfig and returns a
ReportEnvelope; data files (CSV/PLY) are written as a side effect.
"""
import asyncio
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from loguru import logger

from .config import config
from .criteria import CRITERIA
from .eigenfamilies import build_family, verify_family
from .errors import ConfigError, UsageError
from .export import parse_pairs, read_matrix, read_vector, write_csv, write_ply
from .graph import AcceptanceGraph
from .groups import build_basis, family_name, identity, make_spec
from .level_sets import (
    distinct_eigenvalues,
    from_matrix,
    local_dimension,
    random_distinct,
    regularity_check,
    sample_manifold,
)
from .models import CheckResult, ReportEnvelope, RunConfig
from .morphisms import build_morphism, singular_set_probe, verify_harmonic_morphism
from .polynomials import parse_sparse_poly
from .reporting import build_envelope, check
from .roots import crosscheck_casimir

# command-line family names -> representation labels
REPRESENTATIONS = {
    "standard": "standard",
    "su_standard": "standard",
    "so_isotropic": "standard",
    "isotropic": "standard",
    "sp_standard": "standard",
    "dual": "dual",
    "su_dual": "dual",
    "adjoint": "adjoint",
    "tensor": "adjoint",
    "su_tensor": "adjoint",
    "zero": "zero",
    "trivial": "zero",
}

DEFAULT_SAMPLES = 500
REGULARITY_SPOT_CHECKS = 3


def _seed(run: RunConfig) -> int:
    return 0 if run.seed is None else run.seed


def _generators(run: RunConfig):
    a = read_vector(run.gen_a) if run.gen_a else None
    b = read_vector(run.gen_b) if run.gen_b else None
    return a, b


def cmd_casimir(run: RunConfig) -> ReportEnvelope:
    started = datetime.now()
    label = REPRESENTATIONS.get(run.family)
    if label is None:
        raise UsageError(f"Unknown representation '{run.family}' (choose from {', '.join(sorted(REPRESENTATIONS))})")
    spec = make_spec(run.group, run.n)
    report = crosscheck_casimir(spec, label, seed=_seed(run), tol=run.tol)
    logger.info(f"alpha for {label} on {spec.label}: {report.predicted:.12g}")

    tol = run.tol if run.tol is not None else config.tolerances.formula
    checks = [check("predicted vs brute force vs measured", report.discrepancy, tol)]
    return build_envelope("casimir", run, checks, {"alpha": report.predicted, "casimir": report.model_dump()},
                          started)


def cmd_verify_family(run: RunConfig) -> ReportEnvelope:
    started = datetime.now()
    a, b = _generators(run)
    family = build_family(run.group, run.n, run.family, a, b, run.s)
    report = verify_family(family, run.samples, _seed(run), run.tol)
    tol = report.tolerance

    checks: List[CheckResult] = [
        check("tau residual", report.tau_residual, tol),
        check("kappa residual", report.kappa_residual, tol),
        check("lambda spread", report.lambda_spread, tol),
        check("mu spread", report.mu_spread, tol),
    ]
    if report.status == "inconclusive":
        checks.append(check("fit", None, None, passed=False, detail="degenerate or empty sample"))
    if report.lambda_hat is not None and family.expected_lambda is not None:
        checks.append(check("lambda matches expected", abs(report.lambda_hat - family.expected_lambda), tol))
    if report.mu_hat is not None and family.expected_mu is not None:
        checks.append(check("mu matches expected", abs(report.mu_hat - family.expected_mu), tol))

    warnings = [] if report.status != "inconclusive" else [f"Verification of {family.label} was inconclusive"]
    return build_envelope("verify-family", run, checks, {"family": report.model_dump(mode="json")},
                          started, warnings)


def cmd_verify_morphism(run: RunConfig) -> ReportEnvelope:
    started = datetime.now()
    if not run.poly_p or not run.poly_q:
        raise ConfigError("verify-morphism needs --poly-p and --poly-q")
    for path in (run.poly_p, run.poly_q):
        if not Path(path).exists():
            raise ConfigError(f"File not found: {path}")

    a, b = _generators(run)
    family = build_family(run.group, run.n, run.family, a, b, run.s)
    P = parse_sparse_poly(Path(run.poly_p).read_text(), len(family))
    Q = parse_sparse_poly(Path(run.poly_q).read_text(), len(family))
    morphism = build_morphism(family, P, Q)

    seed = _seed(run)
    report = verify_harmonic_morphism(morphism, run.samples, seed, run.tol)
    probe = singular_set_probe(morphism, samples=max(10 * report.samples_requested, 1000), seed=seed + 1,
                               extra_points=[identity(family.spec)])

    checks = [
        check("chart tau residual", report.tau_residual, report.tolerance),
        check("chart kappa residual", report.kappa_residual, report.tolerance),
    ]
    if report.status == "inconclusive":
        checks.append(check("chart samples", None, None, passed=False, detail="no sample inside the chart"))
    warnings = [] if probe.likely_empty else [f"Singular set is likely nonempty (floor {probe.floor:.3e})"]
    return build_envelope(
        "verify-morphism", run, checks,
        {"morphism": report.model_dump(), "singular_set": probe.model_dump(), "P": P.to_text(), "Q": Q.to_text()},
        started, warnings,
    )


def resolve_h_matrix(source: Optional[str], n: int, seed: int) -> np.ndarray:
    """H from a file, the literal "random-distinct", or inline rows separated by ';'"""
    if source is None:
        raise ConfigError("sample-manifold needs --h-matrix (file, inline rows or random-distinct)")
    if source == "random-distinct":
        return random_distinct(n, np.random.default_rng(seed))
    if Path(source).exists():
        return read_matrix(source, n)
    H = parse_pairs(source.replace(";", "\n"), source="--h-matrix")
    if H.shape != (n, n):
        raise ConfigError(f"--h-matrix: expected a {n}x{n} matrix, got {H.shape}")
    return H


def cmd_sample_manifold(run: RunConfig) -> ReportEnvelope:
    started = datetime.now()
    if family_name(run.group) != "SU":
        raise UsageError("sample-manifold works on SU(n)")
    seed = _seed(run)
    H = resolve_h_matrix(run.h_matrix, run.n, seed)
    warnings = []
    if not distinct_eigenvalues(H):
        message = "H has repeated eigenvalues; the level set may not be regular"
        logger.warning(message)
        warnings.append(message)

    level = from_matrix(run.n, H)
    count = DEFAULT_SAMPLES if run.samples is None else run.samples
    h = run.h_step if run.h_step is not None else 1e-3
    cloud = sample_manifold(level, count, seed, run.curvature_points, h)
    report = cloud.report

    basis = build_basis(level.spec)
    rng = np.random.default_rng(seed)
    regularity = [regularity_check(level, mp, basis, rng) for mp in cloud.points[:REGULARITY_SPOT_CHECKS]]
    if cloud.points:
        dimension = local_dimension(level, cloud.points[0], seed=seed, basis=basis)
        report = report.model_copy(update={"local_dimension": dimension})

    tol = config.tolerances
    checks = [
        check("points produced", report.produced, count, ">", passed=report.produced == count),
        check("max |Psi|", report.max_psi, tol.level_set),
        check("min singular value", report.min_singular_value, tol.regularity, ">"),
    ]
    if report.local_dimension is not None:
        expected = level.spec.d - 2
        checks.append(check("local dimension", report.local_dimension, expected,
                            passed=report.local_dimension == expected, detail=f"expected {expected}"))
    for i, r in enumerate(regularity):
        checks.append(check(f"gradient formula at point {i}", r.formula_discrepancy, tol.formula))
    for i, c in sorted(cloud.curvature.items()):
        checks.append(check(f"mean curvature at point {i}", c.norm, tol.curvature))

    results = {
        "sampling": report.model_dump(),
        "regularity": [r.model_dump() for r in regularity],
        "curvature": {str(i): c.model_dump() for i, c in sorted(cloud.curvature.items())},
        "H": H,
    }
    if run.format in ("csv", "ply"):
        out = run.out or str(Path(config.output_dir) / f"manifold.{run.format}")
        written = write_csv(cloud, out) if run.format == "csv" else write_ply(cloud, out, run.chart)
        results["output"] = str(written)
    return build_envelope("sample-manifold", run, checks, results, started, warnings)


def cmd_acceptance(run: RunConfig) -> ReportEnvelope:
    started = datetime.now()
    selected = run.only or list(CRITERIA)
    graph = AcceptanceGraph(selected)
    output = asyncio.run(graph.run(run, _seed(run)))

    warnings = list(output.get("warnings", [])) + [f"error: {e}" for e in output.get("errors", [])]
    results = {"criteria": output.get("criteria", {}), **output.get("results", {})}
    return build_envelope("acceptance", run, list(output.get("checks", [])), results, started, warnings,
                          output.get("durations", {}))


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig], ReportEnvelope]] = {
    "casimir": cmd_casimir,
    "verify-family": cmd_verify_family,
    "verify-morphism": cmd_verify_morphism,
    "sample-manifold": cmd_sample_manifold,
    "acceptance": cmd_acceptance,
}


def run_command(run: RunConfig) -> ReportEnvelope:
    return COMMAND_HANDLERS[run.command](run)
