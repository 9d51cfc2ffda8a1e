# tests/test_model_file.py
"""
Tests unitarios para el módulo core.model_file
"""
import json

import numpy as np
import pytest

from core.constants import MODEL_SCHEMA_VERSION
from core.errors import InputError
from core.model_file import load_model, model_json_schema, parse_complex, parse_matrix, parse_model
from core.vhs_models import NilpotentOrbitModel, PicardFuchsModel


def _orbit_dict(**overrides):
    data = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "name": "prueba",
        "type": "nilpotent_orbit",
        "weight": 3,
        "dim": 4,
        "Q": [[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]],
        "orbit": {"N": [[[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]],
                  "A": {"0": [1, 0, 0, 0]}},
    }
    data.update(overrides)
    return data


class TestParseComplex:
    """Tests para parse_complex y parse_matrix"""

    def test_number_and_pair(self):
        """Debe aceptar números y pares [re, im]"""
        assert parse_complex(2) == 2 + 0j
        assert parse_complex([0.5, -1]) == 0.5 - 1j

    def test_invalid(self):
        """Debe rechazar otros formatos"""
        with pytest.raises(ValueError, match="Entrada compleja inválida"):
            parse_complex("1+2j")
        with pytest.raises(ValueError):
            parse_complex([1, 2, 3])

    def test_ragged_matrix(self):
        """Debe rechazar filas de longitud distinta"""
        with pytest.raises(ValueError, match="longitud distinta"):
            parse_matrix([[1, 0], [0]])


class TestParseModel:
    """Tests para parse_model"""

    def test_orbit(self):
        """Debe construir una órbita nilpotente"""
        model, spec = parse_model(json.dumps(_orbit_dict()))
        assert isinstance(model, NilpotentOrbitModel)
        assert spec.name == "prueba"
        assert model.m == 1

    def test_bad_json(self):
        """Debe informar línea y columna del JSON mal formado"""
        with pytest.raises(InputError) as exc:
            parse_model('{\n  "type": ,\n}')
        assert exc.value.detalle["linea"] == 2

    def test_missing_orbit(self):
        """Debe exigir la sección 'orbit'"""
        data = _orbit_dict()
        del data["orbit"]
        with pytest.raises(InputError, match="necesita 'Q' y 'orbit'"):
            parse_model(json.dumps(data))

    def test_unsupported_version(self):
        """Debe rechazar una versión mayor distinta"""
        with pytest.raises(InputError, match="Versión de esquema no soportada") as exc:
            parse_model(json.dumps(_orbit_dict(schema_version="2.0")))
        assert exc.value.detalle["campo"] == "schema_version"

    def test_bad_multi_index(self):
        """Debe rechazar multi-índices no enteros"""
        data = _orbit_dict()
        data["orbit"]["A"] = {"a": [1, 0, 0, 0]}
        with pytest.raises(InputError, match="Multi-índice inválido"):
            parse_model(json.dumps(data))

    def test_dimension_mismatch(self):
        """Debe rechazar Q de dimensión distinta a 'dim'"""
        with pytest.raises(InputError, match="dimensión de Q"):
            parse_model(json.dumps(_orbit_dict(dim=5)))

    def test_picard_fuchs_order(self):
        """Debe exigir order = dim = weight + 1"""
        data = {"type": "picard_fuchs", "weight": 3, "dim": 3,
                "pf": {"order": 3, "coeffs": [[0], [0], [0], [1]], "r_max": 0.1}}
        with pytest.raises(InputError, match="order = dim = weight \\+ 1"):
            parse_model(json.dumps(data))


class TestLoadModel:
    """Tests para load_model sobre los modelos incluidos"""

    def test_model_a_defaults(self, models_dir):
        """Debe leer μ, puntos y rayo por defecto"""
        _, spec = load_model(models_dir / "model_a.json")
        assert spec.defaults.mu == 4
        assert spec.defaults.ray.count == 12
        assert len(spec.defaults.points) == 3

    def test_quintic_basis(self, models_dir):
        """Debe escalar la base por (2π√−1)^{−k}"""
        model, spec = load_model(models_dir / "quintic.json")
        assert isinstance(model, PicardFuchsModel)
        assert spec.defaults.mu is None
        assert model.basis[2, 2] == pytest.approx(-5 / (2j * np.pi) ** 2)

    def test_missing_file(self, tmp_path):
        """Debe fallar si el fichero no existe"""
        with pytest.raises(InputError, match="No existe el fichero de modelo"):
            load_model(tmp_path / "nada.json")


class TestSchema:
    """Tests para model_json_schema"""

    def test_comment(self):
        """Debe anotar la versión del esquema"""
        schema = model_json_schema()
        assert schema["$comment"] == f"schema_version {MODEL_SCHEMA_VERSION}"
        assert "weight" in schema["properties"]
