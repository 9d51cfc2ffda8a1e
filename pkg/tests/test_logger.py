# tests/test_logger.py
"""
Tests unitarios para el módulo core.logger
"""
import io
import logging
import sys

from core.logger import ROOT_LOGGER, configure_root, get_logger


class TestGetLogger:
    """Tests para la función get_logger"""

    def test_module_under_root(self):
        """Debe colgar los módulos de la jerarquía 'hodge.*'"""
        assert get_logger("core.service").name == "hodge.core.service"

    def test_root_and_children_unchanged(self):
        """Debe devolver tal cual los nombres que ya están en la jerarquía"""
        assert get_logger("hodge").name == "hodge"
        assert get_logger("hodge.cli").name == "hodge.cli"

    def test_no_handlers_on_children(self):
        """Debe dejar sin handlers los loggers de módulo"""
        assert not get_logger("core.jets").handlers


class TestConfigureRoot:
    """Tests para la función configure_root"""

    def teardown_method(self):
        configure_root(logging.WARNING, stream=sys.stderr)

    def test_switches_stream_without_duplicating(self):
        """Debe redirigir el único handler al nuevo flujo"""
        first, second = io.StringIO(), io.StringIO()
        configure_root(logging.INFO, stream=first)
        root = configure_root(logging.INFO, stream=second)
        assert len(root.handlers) == 1
        get_logger("core.service").info("barrido de 3 puntos")
        assert "barrido de 3 puntos" in second.getvalue()
        assert first.getvalue() == ""

    def test_level_filters_children(self):
        """Debe filtrar los mensajes por debajo del nivel de la raíz"""
        buf = io.StringIO()
        configure_root("WARNING", stream=buf)
        log = get_logger("core.vhs_models")
        log.info("oculto")
        log.warning("Q derivada no es real")
        assert "oculto" not in buf.getvalue()
        assert "hodge.core.vhs_models - WARNING - Q derivada no es real" in buf.getvalue()
        assert logging.getLogger(ROOT_LOGGER).level == logging.WARNING
