"""
Acceptance criteria, one runner per criterion.

Each runner takes a base seed and returns its checks, a results record and
any warnings. Runners are plain functions; the acceptance graph calls them in
worker threads.
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from .calculus import gradient_coeffs, product_rule_discrepancy
from .config import config
from .eigenfamilies import (
    EigenFamily,
    catalogue,
    cross_kappa_constant,
    product_family,
    su_dual,
    su_standard,
    su_tensor,
    verify_family,
)
from .errors import NotOrthogonalError
from .fields import hermitian_coefficient, matrix_entry
from .groups import build_basis, haar_sample, make_spec, retract_to_group
from .level_sets import (
    commutator_gradient,
    control,
    from_matrix,
    random_distinct,
    refinement_factor,
    sample_manifold,
)
from .models import CheckResult
from .morphisms import build_morphism, singular_set_probe, verify_harmonic_morphism
from .polynomials import HomogeneousPoly, Polynomial, random_homogeneous
from .reporting import check
from .roots import crosscheck_casimir


@dataclass
class Outcome:
    checks: List[CheckResult] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)


def casimir_agreement(seed: int) -> Outcome:
    out = Outcome()
    for n in range(2, 6):
        spec = make_spec("SU", n)
        report = crosscheck_casimir(spec, "standard", seed=seed)
        closed_form = -(n * n - 1) / n
        out.checks.append(check(f"casimir SU({n}) standard", report.discrepancy, 1e-9))
        out.checks.append(check(f"casimir SU({n}) closed form", abs(report.predicted - closed_form), 1e-12))
        out.results[spec.label] = report.model_dump()
    adjoint = crosscheck_casimir(make_spec("SU", 3), "adjoint", seed=seed)
    out.checks.append(check("casimir SU(3) adjoint", adjoint.discrepancy, 1e-9))
    out.results["SU(3) adjoint"] = adjoint.model_dump()
    return out


def tensor_constant(seed: int) -> Outcome:
    out = Outcome()
    for n in (3, 4):
        report = verify_family(su_tensor(n), samples=50, seed=seed)
        label = f"SU({n})"
        out.checks.append(check(f"mu = -2 on {label}", abs(report.mu_hat + 2.0), 1e-9))
        out.checks.append(check(f"mu spread on {label}", report.mu_spread, 1e-9))
        out.checks.append(check(f"member pairs on {label}", report.pairs, 20, ">", passed=report.pairs >= 20))
        out.results[label] = report.model_dump(mode="json")
    return out


def kappa_orthogonality(seed: int) -> Outcome:
    """kappa(z_i1, conj(z_k2)) on SU(3) and the product family built from it"""
    out = Outcome()
    n = 3
    columns = su_standard(n, np.eye(n)[0])      # z -> z_k1
    conjugates = su_dual(n, np.eye(n)[1])       # z -> conj(z_k2)
    nu, residual = cross_kappa_constant(columns, conjugates, points=50, seed=seed)
    out.checks.append(check("kappa(z_i1, conj z_k2) proportional", residual, 1e-10))
    out.checks.append(check("cross constant nu = -1/n", abs(nu + 1.0 / n), 1e-10))

    try:
        product_family(columns, conjugates, require_orthogonal=True, seed=seed)
        strict = False
    except NotOrthogonalError:
        strict = True
    out.checks.append(check("strict orthogonality probe rejects", None, None, passed=strict))

    products = product_family(columns, conjugates, seed=seed)
    product_report = verify_family(products, samples=50, seed=seed + 1)
    tensor_report = verify_family(su_tensor(n), samples=50, seed=seed + 1)
    out.checks.append(check("product verdict matches tensor family", None, None,
                            passed=product_report.status == tensor_report.status == "pass"))
    out.checks.append(check("product lambda = -2n", abs(product_report.lambda_hat + 2.0 * n), 1e-8))
    out.checks.append(check("product mu = -2", abs(product_report.mu_hat + 2.0), 1e-8))
    out.results = {"nu": [nu.real, nu.imag], "residual": residual,
                   "product": product_report.model_dump(mode="json")}
    return out


def eigenfamily_suite(seed: int) -> Outcome:
    out = Outcome()
    tol = 1e-8
    for F in catalogue():
        report = verify_family(F, samples=50, seed=seed)
        key = f"{F.label} {F.spec.label}" + (f" s={F.generators['s']}" if "s" in F.generators else "")
        out.results[key] = report.model_dump(mode="json")
        if F.label == "su_extended" and F.generators["s"] > 1:
            # tau holds, kappa does not
            out.checks.append(check(f"{key}: tau residual", report.tau_residual, tol))
            out.checks.append(check(f"{key}: lambda = -2n", abs(report.lambda_hat - F.expected_lambda), tol))
            out.checks.append(check(f"{key}: kappa identity fails", report.kappa_residual, 1e-2, ">"))
            continue
        out.checks.append(check(f"{key}: verification", None, None, passed=report.passed,
                                detail=f"tau {report.tau_residual:.2e}, kappa {report.kappa_residual:.2e}"))
        out.checks.append(check(f"{key}: lambda", abs(report.lambda_hat - F.expected_lambda), tol))
        out.checks.append(check(f"{key}: mu", abs(report.mu_hat - F.expected_mu), tol))
        if F.representation:
            casimir = crosscheck_casimir(F.spec, F.representation, seed=seed)
            out.checks.append(check(f"{key}: casimir", abs(casimir.predicted - report.lambda_hat.real), tol))
    return out


def hopf():
    """z -> [z11, z21] on SU(2)"""
    F = su_standard(2)
    x1 = HomogeneousPoly.from_polynomial(Polynomial.linear([1, 0]))
    x2 = HomogeneousPoly.from_polynomial(Polynomial.linear([0, 1]))
    return build_morphism(F, x1, x2)


def morphism_suite(seed: int) -> Outcome:
    out = Outcome()
    tol = 1e-7
    rng = np.random.default_rng(seed)
    families: List[EigenFamily] = [F for F in catalogue() if F.expected_mu is not None]
    for F in families:
        worst = 0.0
        for trial in range(10):
            degree = 1 + trial % 3
            P = random_homogeneous(len(F), degree, rng)
            Q = random_homogeneous(len(F), degree, rng)
            report = verify_harmonic_morphism(build_morphism(F, P, Q), samples=20, seed=seed + trial)
            worst = max(worst, report.tau_residual, report.kappa_residual)
        out.checks.append(check(f"{F.label} {F.spec.label}: chart residuals", worst, tol))
        out.results[f"{F.label} {F.spec.label}"] = worst

    m = hopf()
    report = verify_harmonic_morphism(m, samples=100, seed=seed)
    out.checks.append(check("Hopf map chart residuals", max(report.tau_residual, report.kappa_residual), 1e-8))
    probe = singular_set_probe(m, samples=10_000, seed=seed)
    out.checks.append(check("Hopf singular set floor", probe.floor, config.sampling.singular_floor, ">"))
    out.results["hopf"] = report.model_dump()
    out.results["hopf singular set"] = probe.model_dump()
    return out


def main_theorem(seed: int) -> Outcome:
    """Zero sets of z_1^T H conj(z_2) for random H with distinct eigenvalues"""
    out = Outcome()
    rng = np.random.default_rng(seed)
    h = 1e-3
    for n in (3, 4):
        worst = {"psi": 0.0, "sigma": np.inf, "curvature": 0.0}
        factors = []
        for trial in range(5):
            level = from_matrix(n, random_distinct(n, rng))
            cloud = sample_manifold(level, 20, seed=seed + 100 * n + trial, curvature_points=20, h=h)
            worst["psi"] = max(worst["psi"], cloud.report.max_psi)
            worst["sigma"] = min(worst["sigma"], cloud.report.min_singular_value)
            worst["curvature"] = max(worst["curvature"], cloud.report.max_curvature)
            factors.append(refinement_factor(level, cloud.points[0], h)[2])
        label = f"SU({n})"
        out.checks.append(check(f"{label}: |Psi|", worst["psi"], config.tolerances.level_set))
        out.checks.append(check(f"{label}: min singular value", worst["sigma"], config.tolerances.regularity, ">"))
        out.checks.append(check(f"{label}: mean curvature", worst["curvature"], config.tolerances.curvature))
        out.checks.append(check(f"{label}: h-refinement factor", min(factors), 3.0, ">",
                                passed=all(3.0 <= f <= 5.0 for f in factors),
                                detail=", ".join(f"{f:.3f}" for f in factors)))
        out.results[label] = {**worst, "refinement": factors}

    circle = control()
    cloud = sample_manifold(circle, 5, seed=seed, curvature_points=5, h=h)
    smallest = min(r.norm for r in cloud.curvature.values())
    out.checks.append(check("non-minimal control flagged", smallest, 1e-2, ">"))
    out.results["control"] = smallest
    return out


def gradient_formula(seed: int) -> Outcome:
    out = Outcome()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for child in np.random.SeedSequence(seed).spawn(100):
        n = 3 if rng.random() < 0.5 else 4
        H = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        level = from_matrix(n, H)
        p = haar_sample(level.spec, child)
        basis = build_basis(level.spec)
        closed = commutator_gradient(H, p.matrix, basis)
        numeric = gradient_coeffs(level.psi, p, basis, finite_difference=True)
        worst = max(worst, float(np.max(np.abs(closed - numeric))))
    out.checks.append(check("commutator formula vs finite differences", worst, 1e-9))

    level = from_matrix(3, np.eye(3))
    p = haar_sample(level.spec, seed)
    zero = float(np.max(np.abs(commutator_gradient(level.H, p.matrix, build_basis(level.spec)))))
    out.checks.append(check("H = I gives zero gradient", zero, 1e-14))
    out.results = {"max_discrepancy": worst, "identity_gradient": zero}
    return out


def numerical_hygiene(seed: int) -> Outcome:
    out = Outcome()
    rng = np.random.default_rng(seed)

    spec = make_spec("SU", 3)
    basis = build_basis(spec)
    f = hermitian_coefficient(spec, rng.standard_normal(3) + 1j * rng.standard_normal(3),
                              rng.standard_normal(3) + 1j * rng.standard_normal(3))
    p = haar_sample(spec, seed)
    exact = gradient_coeffs(f, p, basis)
    coarse = np.linalg.norm(gradient_coeffs(f, p, basis, True, step=1e-4, order=2) - exact)
    fine = np.linalg.norm(gradient_coeffs(f, p, basis, True, step=5e-5, order=2) - exact)
    factor = coarse / fine
    out.checks.append(check("finite-difference refinement factor", factor, 3.5, ">",
                            passed=3.5 <= factor <= 4.5, detail=f"{coarse:.3e} -> {fine:.3e}"))

    for family, n in (("SU", 3), ("SO", 4), ("Sp", 2)):
        spec = make_spec(family, n)
        gram = float(np.max(np.abs(build_basis(spec).gram() - np.eye(spec.d))))
        out.checks.append(check(f"{spec.label}: Gram deviation", gram, config.tolerances.gram))
        points = [haar_sample(spec, child) for child in np.random.SeedSequence(seed).spawn(10)]
        membership = max(q.membership_residual() for q in points)
        out.checks.append(check(f"{spec.label}: Haar membership", membership, config.tolerances.membership))
        idempotence = max(retract_to_group(q.matrix, spec).distance(q) for q in points)
        out.checks.append(check(f"{spec.label}: retraction idempotence", idempotence, config.tolerances.retraction))

    spec = make_spec("SU", 3)
    g = matrix_entry(spec, 0, 0)
    h = hermitian_coefficient(spec, np.eye(3)[1], np.eye(3)[0])
    rule = product_rule_discrepancy(g, h, haar_sample(spec, seed))
    out.checks.append(check("product rule", rule, config.tolerances.product_rule))

    first = verify_family(su_standard(2), samples=5, seed=seed).model_dump_json()
    second = verify_family(su_standard(2), samples=5, seed=seed).model_dump_json()
    out.checks.append(check("fixed-seed reports identical", None, None, passed=first == second))
    out.results = {"refinement_factor": factor, "product_rule": rule}
    return out


# name -> (runner, runtime budget in seconds)
CRITERIA: Dict[str, Tuple[Callable[[int], Outcome], float]] = {
    "casimir": (casimir_agreement, 10.0),
    "constant": (tensor_constant, 30.0),
    "kappa": (kappa_orthogonality, 30.0),
    "families": (eigenfamily_suite, 120.0),
    "morphisms": (morphism_suite, 120.0),
    "theorem": (main_theorem, 300.0),
    "gradient": (gradient_formula, 30.0),
    "hygiene": (numerical_hygiene, 60.0),
}
