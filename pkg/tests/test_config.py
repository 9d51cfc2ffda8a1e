# tests/test_config.py
"""
Tests unitarios para el módulo core.config
"""
import pytest
from unittest.mock import patch
from core.config import get_cfg, get_log_level, get_output_dir


class TestGetCfg:
    """Tests para la función get_cfg"""

    @patch('os.getenv')
    def test_get_cfg_returns_env_value(self, mock_getenv):
        """Debe retornar el valor de la variable de entorno"""
        mock_getenv.return_value = "test_value"
        assert get_cfg("TEST_KEY") == "test_value"
        mock_getenv.assert_called_once_with("TEST_KEY", "")

    @patch('os.getenv')
    def test_get_cfg_returns_default_when_not_set(self, mock_getenv):
        """Debe retornar el valor por defecto si no existe la variable"""
        mock_getenv.return_value = None
        assert get_cfg("MISSING_KEY", "default") == "default"


class TestGetLogLevel:
    """Tests para la función get_log_level"""

    @patch('os.getenv')
    def test_default_warning(self, mock_getenv):
        """Debe usar WARNING si HODGE_LOG_LEVEL no está definido"""
        mock_getenv.side_effect = lambda key, default="": default
        assert get_log_level() == "WARNING"

    @patch('os.getenv')
    def test_normalizes_case(self, mock_getenv):
        """Debe aceptar el nivel en minúsculas"""
        mock_getenv.return_value = " debug "
        assert get_log_level() == "DEBUG"

    @patch('os.getenv')
    def test_invalid_level(self, mock_getenv):
        """Debe lanzar error con un nivel desconocido"""
        mock_getenv.return_value = "VERBOSE"
        with pytest.raises(ValueError, match="Nivel de logging inválido"):
            get_log_level()


class TestGetOutputDir:
    """Tests para la función get_output_dir"""

    @patch('os.getenv')
    def test_env_value(self, mock_getenv):
        """Debe retornar HODGE_OUTPUT_DIR"""
        mock_getenv.return_value = "/tmp/hodge"
        assert get_output_dir() == "/tmp/hodge"

    @patch('os.getenv')
    def test_blank_falls_back(self, mock_getenv):
        """Debe usar el directorio por defecto si la variable está en blanco"""
        mock_getenv.return_value = "   "
        assert get_output_dir() == "salida"
