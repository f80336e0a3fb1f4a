"""
Report envelopes: assembly, JSON-schema validation and deterministic JSON
"""
import json
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from jsonschema import Draft202012Validator
from loguru import logger

from .models import COMMANDS, SCHEMA_ID, CheckResult, ReportEnvelope, RunConfig, Timing

_NUMBER = {"type": ["number", "null"]}

REPORT_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": SCHEMA_ID,
    "type": "object",
    "required": ["schema", "version", "command", "config", "checks", "results", "warnings", "verdict", "timing"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "version": {"type": "string"},
        "command": {"enum": list(COMMANDS)},
        "config": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "measured": _NUMBER,
                    "tolerance": _NUMBER,
                    "passed": {"type": "boolean"},
                    "detail": {"type": "string"},
                },
            },
        },
        "results": {"type": "object"},
        "warnings": {"type": "array", "items": {"type": "string"}},
        "verdict": {"enum": ["pass", "fail"]},
        "timing": {
            "type": "object",
            "required": ["started", "finished", "durations"],
            "properties": {
                "started": {"type": "string"},
                "finished": {"type": "string"},
                "durations": {"type": "object", "additionalProperties": {"type": "number"}},
            },
        },
    },
}

_validator = Draft202012Validator(REPORT_SCHEMA)


def check(name: str, measured: Optional[float], tolerance: Optional[float], compare: str = "<",
          detail: str = "", passed: Optional[bool] = None) -> CheckResult:
    """CheckResult with the verdict derived from ``measured compare tolerance``"""
    if passed is None:
        if measured is None or tolerance is None:
            passed = False
        elif compare == "<":
            passed = measured < tolerance
        elif compare == ">":
            passed = measured > tolerance
        else:
            raise ValueError(f"Unknown comparison {compare}")
    return CheckResult(
        name=name,
        measured=None if measured is None else float(measured),
        tolerance=None if tolerance is None else float(tolerance),
        passed=bool(passed),
        detail=detail,
    )


def clean(value: Any) -> Any:
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as null"""
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return clean(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [clean(value.real), clean(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def build_envelope(command: str, run: RunConfig, checks: List[CheckResult], results: Dict[str, Any],
                   started: datetime, warnings: Optional[List[str]] = None,
                   durations: Optional[Dict[str, float]] = None) -> ReportEnvelope:
    verdict = "pass" if all(c.passed for c in checks) else "fail"
    return ReportEnvelope(
        command=command,
        config=clean(run.model_dump(mode="json")),
        checks=checks,
        results=clean(results),
        warnings=list(warnings or []),
        verdict=verdict,
        timing=Timing(
            started=started.isoformat(),
            finished=datetime.now().isoformat(),
            durations={k: round(float(v), 6) for k, v in (durations or {}).items()},
        ),
    )


def envelope_json(envelope: ReportEnvelope) -> str:
    """Validated JSON with sorted keys"""
    data = clean(envelope.model_dump(mode="json", by_alias=True))
    errors = sorted(_validator.iter_errors(data), key=lambda e: list(e.path))
    if errors:
        raise ValueError(f"Report does not match {SCHEMA_ID}: {errors[0].message}")
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def without_timing(text: str) -> str:
    """Envelope JSON with the timing record removed, for reproducibility checks"""
    data = json.loads(text)
    data.pop("timing", None)
    return json.dumps(data, sort_keys=True, indent=2)


def write_report(envelope: ReportEnvelope, path: str) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(envelope_json(envelope))
    logger.info(f"Report written to {out}")
    return out
