# tests/test_utils.py
"""
Tests unitarios para el módulo core.utils
"""
import pytest
from core.utils import format_number, output_filename, parse_kv, parse_point


class TestParsePoint:
    """Tests para la función parse_point"""

    def test_parse_point_real(self):
        """Debe aceptar un número real"""
        assert parse_point("1e-5") == [1e-5 + 0j]

    def test_parse_point_pair_and_complex(self):
        """Debe aceptar pares 're,im' y complejos separados por ';'"""
        assert parse_point("0.1,0.2; 0.3+0.4j") == [0.1 + 0.2j, 0.3 + 0.4j]

    def test_parse_point_empty_raises_error(self):
        """Debe lanzar error si el punto está vacío"""
        with pytest.raises(ValueError, match="no puede estar vacío"):
            parse_point("   ")

    def test_parse_point_invalid_raises_error(self):
        """Debe rechazar coordenadas no numéricas"""
        with pytest.raises(ValueError, match="Coordenada inválida"):
            parse_point("abc")
        with pytest.raises(ValueError, match="Coordenada inválida"):
            parse_point("1,2,3")


class TestParseKv:
    """Tests para la función parse_kv"""

    def test_parse_kv(self):
        """Debe separar clave y valor"""
        assert parse_kv(["r0=1e-5", " count = 20"]) == {"r0": "1e-5", "count": "20"}

    def test_parse_kv_invalid(self):
        """Debe rechazar tokens sin '=' o sin clave"""
        with pytest.raises(ValueError, match="Parámetro inválido"):
            parse_kv(["r0"])
        with pytest.raises(ValueError, match="Parámetro sin clave"):
            parse_kv(["=3"])


class TestFormatNumber:
    """Tests para la función format_number"""

    def test_format_number(self):
        """Debe usar 17 cifras, 'true'/'false' y vacío para None"""
        assert format_number(0.1) == "0.10000000000000001"
        assert format_number(True) == "true"
        assert format_number(3) == "3"
        assert format_number(None) == ""
        assert format_number(float("nan")) == "nan"


class TestOutputFilename:
    """Tests para la función output_filename"""

    def test_joins_and_sanitizes(self):
        """Debe unir las partes con '_' y sustituir caracteres especiales"""
        assert output_filename("quintic sweep (2)", "wp_hsc_max", suffix=".svg") == "quintic_sweep_2_wp_hsc_max.svg"

    def test_preserves_valid_chars(self):
        """Debe preservar letras, dígitos, puntos y guiones"""
        assert output_filename("model_a-v2", "sweep", suffix=".csv") == "model_a-v2_sweep.csv"

    def test_truncates_keeping_suffix(self):
        """Debe recortar la raíz y conservar la extensión"""
        name = output_filename("A" * 200, suffix=".svg")
        assert len(name) == 128
        assert name.endswith(".svg")
        assert output_filename("A" * 100, max_length=50) == "A" * 50

    def test_empty_name(self):
        """Debe rechazar un nombre sin caracteres válidos"""
        with pytest.raises(ValueError, match="vacío"):
            output_filename("  ", "", suffix=".svg")
