"""
Data models for lie-eigenlab reports and runs
"""
from datetime import datetime
from typing import Annotated, Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, PlainSerializer, PlainValidator, field_validator, model_validator

from .errors import ConfigError

SCHEMA_ID = "lie-eigenlab-report/1"
ARTIFACT_VERSION = "1.0.0"

Status = Literal["pass", "fail", "inconclusive"]


def _to_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(value)


# complex numbers travel as [re, im] pairs
Complex = Annotated[
    complex,
    PlainValidator(_to_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list),
]


class CasimirReport(BaseModel):
    """Casimir scalar of one representation, three ways"""
    group: str
    family: str
    root_type: str
    weight: List[str] = Field(description="Highest weight in epsilon coordinates, as fractions")
    predicted: float = Field(description="-(|lambda|^2 + 2 <lambda, delta>)")
    brute_force: float = Field(description="Scalar of sum_X rho(X)^2 on the representation space")
    brute_force_spread: float = Field(description="Distance of sum_X rho(X)^2 from a scalar matrix")
    measured: float = Field(description="Laplacian eigenvalue fitted on matrix coefficients")
    discrepancy: float
    passed: bool


class VerificationReport(BaseModel):
    """Eigenfamily identities tau(phi) = lambda phi and kappa(phi, psi) = mu phi psi"""
    family: str
    group: str
    samples: int
    members: int
    pairs: int
    lambda_hat: Optional[Complex] = None
    mu_hat: Optional[Complex] = None
    lambda_spread: float = 0.0
    mu_spread: float = 0.0
    tau_residual: float = 0.0
    kappa_residual: float = 0.0
    expected_lambda: Optional[float] = None
    expected_mu: Optional[float] = None
    tolerance: float
    status: Status

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class MorphismReport(BaseModel):
    """Chart residuals of a projective-line valued map"""
    family: str
    group: str
    degree: int
    samples_requested: int
    samples_used: int
    tau_residual: float = 0.0
    kappa_residual: float = 0.0
    opposite_tau_residual: float = 0.0
    opposite_kappa_residual: float = 0.0
    tolerance: float
    status: Status

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class SingularSetReport(BaseModel):
    """Probe of the common zero set of P o Phi and Q o Phi"""
    samples: int
    sampled_floor: float = Field(description="min over samples of max(|P o Phi|, |Q o Phi|)")
    floor: float = Field(description="Floor after Gauss-Newton refinement")
    likely_empty: bool
    witness_residual: Optional[float] = None


class RegularityReport(BaseModel):
    """Rank of the real differential of the constraint at a point"""
    grad_re_norm: float
    grad_im_norm: float
    min_singular_value: float
    regular: bool
    formula_discrepancy: Optional[float] = None
    holomorphic_discrepancy: Optional[float] = None


class CurvatureReport(BaseModel):
    """Mean-curvature estimate from projected-curve accelerations"""
    step: float
    norm: float
    normal_accelerations: List[float]
    tangent_dimension: int
    psi_residual: float
    minimal: bool


class SamplingReport(BaseModel):
    """Summary of a sampled point cloud"""
    requested: int
    produced: int
    attempts: int
    yield_ratio: float
    max_psi: float = 0.0
    min_singular_value: Optional[float] = None
    max_curvature: Optional[float] = None
    local_dimension: Optional[int] = None


class CheckResult(BaseModel):
    """One named pass/fail check"""
    name: str
    measured: Optional[float] = None
    tolerance: Optional[float] = None
    passed: bool
    detail: str = ""


class Timing(BaseModel):
    """Wall-clock data; the only non-deterministic part of an envelope"""
    started: str
    finished: str
    durations: Dict[str, float] = {}


class ReportEnvelope(BaseModel):
    """Schema-versioned output of every command"""
    schema_id: str = Field(default=SCHEMA_ID, alias="schema")
    version: str = ARTIFACT_VERSION
    command: str
    config: Dict[str, Any]
    checks: List[CheckResult] = []
    results: Dict[str, Any] = {}
    warnings: List[str] = []
    verdict: Literal["pass", "fail"]
    timing: Timing

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def _verdict_matches_checks(self) -> "ReportEnvelope":
        expected = "pass" if all(c.passed for c in self.checks) else "fail"
        if self.verdict != expected:
            raise ValueError(f"Verdict {self.verdict} contradicts the checks ({expected})")
        return self


RANDOMIZED = {"verify-family", "verify-morphism", "sample-manifold"}
COMMANDS = ("casimir", "verify-family", "verify-morphism", "sample-manifold", "acceptance")


class RunConfig(BaseModel):
    """Everything a command needs, from flags and the config file's ``run`` section"""
    command: Literal["casimir", "verify-family", "verify-morphism", "sample-manifold", "acceptance"]
    group: str = "su"
    n: int = 2
    family: str = "standard"
    gen_a: Optional[str] = None
    gen_b: Optional[str] = None
    s: int = 1
    poly_p: Optional[str] = None
    poly_q: Optional[str] = None
    h_matrix: Optional[str] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    tol: Optional[float] = None
    h_step: Optional[float] = None
    curvature_points: int = 5
    chart: List[int] = [0, 1, 2]
    out: Optional[str] = None
    format: Literal["json", "csv", "ply"] = "json"
    only: List[str] = []

    @field_validator("n", "s", "samples", "seed", "curvature_points")
    @classmethod
    def _nonnegative(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 0:
            raise ValueError("must be nonnegative")
        return v

    @field_validator("tol", "h_step")
    @classmethod
    def _positive_float(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and v <= 0:
            raise ValueError("must be positive")
        return v

    @model_validator(mode="after")
    def _seed_for_random_commands(self) -> "RunConfig":
        if self.command in RANDOMIZED and self.seed is None:
            raise ValueError(f"--seed is required for {self.command}")
        return self

    @classmethod
    def build(cls, **values) -> "RunConfig":
        """Validate, surfacing problems as ConfigError"""
        try:
            return cls(**values)
        except ConfigError:
            raise
        except Exception as e:
            raise ConfigError(f"Invalid run configuration: {e}") from e


class AcceptanceState(BaseModel):
    """State that flows through the acceptance workflow"""
    run: RunConfig
    selected: List[str]
    seed: int = 0

    checks: Dict[str, List[CheckResult]] = {}
    results: Dict[str, Any] = {}
    durations: Dict[str, float] = {}

    final_output: Optional[Dict[str, Any]] = None

    started: datetime = Field(default_factory=datetime.now)
    warnings: List[str] = []
    errors: List[str] = []
