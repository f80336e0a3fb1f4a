"""
Configuration management for lie-eigenlab
"""
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


class ToleranceConfig(BaseModel):
    """Numerical tolerances shared by every module"""
    membership: float = Field(default=1e-12, description="Group membership residual")
    gram: float = Field(default=1e-12, description="Basis Gram matrix deviation from identity")
    retraction: float = Field(default=1e-10, description="Retraction idempotence")
    exp_membership: float = Field(default=1e-11, description="Membership after group_exp")
    isotropy: float = Field(default=1e-12, description="Isotropy test for the SO(n) generator")
    orthogonality_probe: float = Field(default=1e-10, description="Cross-pair kappa probe")
    family: float = Field(default=1e-8, description="Eigenfamily residual tolerance")
    morphism: float = Field(default=1e-7, description="Chart residual tolerance")
    level_set: float = Field(default=1e-12, description="|Psi| on projected points")
    regularity: float = Field(default=1e-4, description="Smallest singular value of the differential")
    rank: float = Field(default=1e-10, description="Rank-deficiency threshold for Newton steps")
    eigen_gap: float = Field(default=1e-8, description="Relative eigenvalue gap for distinct spectra")
    curvature: float = Field(default=5e-4, description="Mean-curvature norm certifying minimality")
    product_rule: float = Field(default=1e-9, description="Product-rule identity tolerance")
    formula: float = Field(default=1e-9, description="Closed-form versus numeric gradient agreement")


class FiniteDifferenceConfig(BaseModel):
    """Central-difference settings for black-box fields"""
    first_step: float = Field(default=1e-5, description="Step for first derivatives")
    second_step: float = Field(default=1e-3, description="Step for second derivatives")
    order: int = Field(default=4, description="Accuracy order of the stencils (2, 4 or 6)")
    product_rule_step: float = Field(default=5e-3, description="Step used by product_rule_check")
    product_rule_order: int = Field(default=6, description="Stencil order used by product_rule_check")


class SamplingConfig(BaseModel):
    """Sampling settings for Monte-Carlo verification"""
    samples: int = Field(default=50, description="Default number of Haar points")
    chart_guard: float = Field(default=0.1, description="Relative |Q o Phi| threshold for chart samples")
    dedup_floor: float = Field(default=1e-6, description="Minimum distance between manifold samples")
    min_yield: float = Field(default=0.5, description="Yield ratio below which sampling warns")
    max_attempt_factor: int = Field(default=4, description="Projection attempts per requested point")
    singular_floor: float = Field(default=1e-2, description="Floor above which the singular set is likely empty")


class ProjectionConfig(BaseModel):
    """Gauss-Newton projection settings"""
    max_iter: int = Field(default=30, description="Maximum Newton iterations")
    polish: int = Field(default=2, description="Extra iterations after convergence")
    max_step: float = Field(default=0.5, description="Largest algebra step per iteration")


class Config(BaseModel):
    """Main configuration class"""
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    finite_differences: FiniteDifferenceConfig = Field(default_factory=FiniteDifferenceConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    projection: ProjectionConfig = Field(default_factory=ProjectionConfig)
    threads: int = Field(default=1, description="Worker threads for sample-parallel work")
    logging_level: str = Field(default="INFO", description="Logging level")
    output_dir: str = Field(default="outputs", description="Directory for output files")


# Global configuration instance
config = Config()

SECTIONS = ("tolerances", "finite_differences", "sampling", "projection")


def get_config() -> Config:
    """Get configuration from environment variables and defaults"""
    load_dotenv()

    return Config(
        threads=max(1, int(os.getenv("LIE_EIGENLAB_THREADS", "1"))),
        logging_level=os.getenv("LIE_EIGENLAB_LOG_LEVEL", "INFO"),
        output_dir=os.getenv("LIE_EIGENLAB_OUTPUT_DIR", "outputs"),
    )


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a sectioned YAML config file.

    Numeric sections are applied to the global config; the ``run`` section is
    returned so the caller can merge it with command-line flags.
    """
    from .errors import ConfigError

    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"Config file not found: {path}")

    with open(file_path, "r") as f:
        raw = yaml.safe_load(f) or {}

    if not isinstance(raw, dict):
        raise ConfigError(f"Config file {path} must contain sections of key/value pairs")

    unknown = set(raw) - set(SECTIONS) - {"run"}
    if unknown:
        raise ConfigError(f"Unknown config sections: {sorted(unknown)}")

    for section in SECTIONS:
        values = raw.get(section) or {}
        current = getattr(config, section)
        try:
            merged = type(current).model_validate({**current.model_dump(), **values})
            setattr(config, section, merged)
        except Exception as e:
            raise ConfigError(f"Invalid values in section '{section}': {e}") from e

    return dict(raw.get("run") or {})


def update_config(**kwargs) -> None:
    """Update configuration with new values"""
    global config
    for key, value in kwargs.items():
        if hasattr(config, key):
            setattr(config, key, value)
        else:
            raise ValueError(f"Unknown configuration key: {key}")


def reset_config() -> None:
    """Restore defaults on the global instance in place"""
    fresh = get_config()
    for key in Config.model_fields:
        setattr(config, key, getattr(fresh, key))


def thread_count(override: Optional[int] = None) -> int:
    if override is not None:
        return max(1, override)
    return max(1, config.threads)
