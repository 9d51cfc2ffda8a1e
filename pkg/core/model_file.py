# core/model_file.py
"""
Fichero JSON de modelo: esquema Pydantic versionado y carga a objetos de
`core.vhs_models`.

Los complejos se escriben como número o como par [re, im]. En los modelos de
Picard–Fuchs la matriz `basis` se da en el marco normalizado
y_k/(2π√−1)^k, es decir M = basis·diag((2π√−1)^{−k}); sin `basis` se usa la
identidad.
"""
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from core.constants import MODEL_SCHEMA_VERSION
from core.errors import InputError
from core.hodge_core import PolarizationForm
from core.logger import get_logger
from core.vhs_models import NilpotentOrbitModel, PicardFuchsModel

logger = get_logger(__name__)

ComplexEntry = Union[float, List[float]]


def parse_complex(value: Any) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(x, (int, float)) for x in value):
        return complex(value[0], value[1])
    raise ValueError(f"Entrada compleja inválida: {value!r} (usa número o [re, im])")


def parse_matrix(rows: List[List[ComplexEntry]]) -> np.ndarray:
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("Matriz vacía o con filas de longitud distinta")
    return np.array([[parse_complex(x) for x in r] for r in rows], dtype=complex)


class RaySpec(BaseModel):
    r0: float = Field(..., gt=0, description="Radio inicial")
    factor: float = Field(0.5, gt=0, lt=1, description="Razón geométrica")
    count: int = Field(10, ge=1)
    angle: float = Field(0.0, description="Argumento del rayo en radianes")


class ModelDefaults(BaseModel):
    mu: Optional[float] = Field(None, description="μ del métrico de Hodge parcial")
    points: List[Union[ComplexEntry, List[ComplexEntry]]] = Field(default_factory=list)
    ray: Optional[RaySpec] = None


class OrbitSpec(BaseModel):
    N: List[List[List[ComplexEntry]]] = Field(..., description="Matrices nilpotentes N_i")
    A: Dict[str, List[ComplexEntry]] = Field(..., description="Multi-índice 'a1,a2,…' → vector")

    @field_validator("A")
    @classmethod
    def _check_indices(cls, v):
        for key in v:
            try:
                [int(x) for x in key.split(",")]
            except ValueError:
                raise ValueError(f"Multi-índice inválido: '{key}'")
        return v


class PicardFuchsSpec(BaseModel):
    order: int = Field(..., ge=2)
    coeffs: List[List[ComplexEntry]] = Field(..., description="c_j(z), de menor a mayor grado")
    r_max: float = Field(..., gt=0)
    basis: Optional[List[List[ComplexEntry]]] = None

    @model_validator(mode="after")
    def _check_order(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError(f"Se esperaban {self.order + 1} polinomios c_j, hay {len(self.coeffs)}")
        return self


class ModelFile(BaseModel):
    model_config = {
        "json_schema_extra": {
            "example": {
                "schema_version": MODEL_SCHEMA_VERSION,
                "name": "model_a",
                "type": "nilpotent_orbit",
                "weight": 3,
                "dim": 4,
                "Q": [[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]],
                "orbit": {"N": [[[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]],
                          "A": {"0": [1, 0, 0, 0]}},
            }
        }
    }

    schema_version: str = MODEL_SCHEMA_VERSION
    name: str = "modelo"
    description: str = ""
    type: Literal["nilpotent_orbit", "picard_fuchs"]
    weight: int = Field(..., ge=1)
    dim: int = Field(..., ge=2)
    Q: Optional[List[List[ComplexEntry]]] = None
    orbit: Optional[OrbitSpec] = None
    pf: Optional[PicardFuchsSpec] = None
    defaults: ModelDefaults = Field(default_factory=ModelDefaults)

    @field_validator("schema_version")
    @classmethod
    def _check_version(cls, v):
        if v.split(".")[0] != MODEL_SCHEMA_VERSION.split(".")[0]:
            raise ValueError(f"Versión de esquema no soportada: {v}")
        return v

    @model_validator(mode="after")
    def _check_sections(self):
        if self.type == "nilpotent_orbit":
            if self.orbit is None or self.Q is None:
                raise ValueError("Un modelo 'nilpotent_orbit' necesita 'Q' y 'orbit'")
        elif self.pf is None:
            raise ValueError("Un modelo 'picard_fuchs' necesita la sección 'pf'")
        elif self.pf.order != self.dim or self.weight != self.dim - 1:
            raise ValueError("En Picard–Fuchs se requiere order = dim = weight + 1")
        return self


def build_model(spec: ModelFile) -> Union[NilpotentOrbitModel, PicardFuchsModel]:
    Q = PolarizationForm(parse_matrix(spec.Q), spec.weight) if spec.Q is not None else None
    if Q is not None and Q.dim != spec.dim:
        raise InputError("La dimensión de Q no coincide con 'dim'", d=spec.dim, dQ=Q.dim)
    if spec.type == "nilpotent_orbit":
        Ns = tuple(parse_matrix(N) for N in spec.orbit.N)
        A = {tuple(int(x) for x in key.split(",")): np.array([parse_complex(x) for x in vec])
             for key, vec in spec.orbit.A.items()}
        return NilpotentOrbitModel(weight=spec.weight, Q=Q, N=Ns, A=A, name=spec.name)
    pf = spec.pf
    d = pf.order
    scaling = np.diag([(2j * math.pi) ** (-k) for k in range(d)])
    frame = parse_matrix(pf.basis) if pf.basis is not None else np.eye(d, dtype=complex)
    coeffs = tuple(tuple(parse_complex(x) for x in c) for c in pf.coeffs)
    return PicardFuchsModel(coeffs=coeffs, r_max=pf.r_max, basis=frame @ scaling, Q=Q, name=spec.name)


def parse_model(text: str, source: str = "<texto>") -> Tuple[Union[NilpotentOrbitModel, PicardFuchsModel], ModelFile]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"JSON mal formado en {source}: {e.msg}", linea=e.lineno, columna=e.colno)
    try:
        spec = ModelFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(x) for x in first.get("loc", ()))
        raise InputError(f"Modelo inválido en {source}: {first.get('msg')}", campo=where,
                         errores=len(e.errors()))
    try:
        model = build_model(spec)
    except ValueError as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"Modelo inválido en {source}: {e}")
    logger.info(f"Modelo '{spec.name}' cargado desde {source} ({spec.type}, n={spec.weight}, d={spec.dim})")
    return model, spec


def load_model(path: Union[str, Path]):
    path = Path(path)
    if not path.exists():
        raise InputError(f"No existe el fichero de modelo: {path}")
    return parse_model(path.read_text(encoding="utf-8"), source=str(path))


def model_json_schema() -> Dict[str, Any]:
    schema = ModelFile.model_json_schema()
    schema["$comment"] = f"schema_version {MODEL_SCHEMA_VERSION}"
    return schema
