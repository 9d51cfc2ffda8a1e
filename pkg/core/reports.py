# core/reports.py
"""
Modelos Pydantic de los informes de validación (comprobaciones con residuo,
tolerancia y resultado) y del informe de la batería de identidades.
"""
import json
import math
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field

from core.constants import REPORT_SCHEMA_VERSION, TOLERANCE_NOTE


class CheckResult(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str = Field(..., description="Identificador de la comprobación")
    formula: str = Field("", description="Identidad o predicado comprobado")
    residual: Optional[float] = Field(None, description="Residuo relativo o valor medido")
    tolerance: Optional[float] = Field(None, description="Tolerancia aplicada")
    passed: Optional[bool] = Field(None, alias="pass", description="None = no comprobable")
    point: Optional[str] = None
    note: Optional[str] = None


def make_check(
    name: str,
    formula: str,
    residual: float,
    tolerance: float,
    passed: Optional[bool] = None,
    **extra: Any
) -> CheckResult:
    """Crea una comprobación; por defecto pasa si residual ≤ tolerancia (NaN falla)."""
    residual = float(residual)
    if passed is None:
        passed = (not math.isnan(residual)) and residual <= tolerance
    return CheckResult(name=name, formula=formula, residual=residual,
                       tolerance=float(tolerance), passed=bool(passed), **extra)


def skipped_check(name: str, formula: str, note: str, **extra: Any) -> CheckResult:
    return CheckResult(name=name, formula=formula, passed=None, note=note, **extra)


class ValidationReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    title: str
    checks: List[CheckResult] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=lambda: [TOLERANCE_NOTE])
    data: Dict[str, Any] = Field(default_factory=dict)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.passed is not None)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if c.passed is False]

    def get(self, name: str) -> List[CheckResult]:
        return [c for c in self.checks if c.name == name]

    def max_residual(self, name: Optional[str] = None) -> float:
        values = [c.residual for c in self.checks
                  if c.residual is not None and (name is None or c.name == name)]
        return max(values) if values else 0.0

    def extend(self, other: "ValidationReport") -> "ValidationReport":
        self.checks.extend(other.checks)
        return self

    def to_json(self) -> str:
        """JSON con claves ordenadas; NaN e infinitos se escriben como null."""
        return json.dumps(json.loads(self.model_dump_json(by_alias=True)), indent=2, sort_keys=True, ensure_ascii=False)


class SuiteReport(ValidationReport):
    schema_version: str = REPORT_SCHEMA_VERSION
    model: str = ""
    points: List[str] = Field(default_factory=list)
