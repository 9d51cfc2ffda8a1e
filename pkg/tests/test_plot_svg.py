# tests/test_plot_svg.py
"""
Tests unitarios para el módulo core.plot_svg
"""
import pytest

from core.errors import InputError
from core.plot_svg import choose_x_axis, emit_plot, render_svg
from core.service import write_csv


@pytest.fixture
def sweep_csv(tmp_path):
    rows = [{"re_z1": 0.1 / 2 ** j, "u": float(j + 2), "wp_hsc_max": 0.5 - 0.25 * j, "dim1_lambda": 10.0 ** j}
            for j in range(4)]
    path = tmp_path / "barrido.csv"
    write_csv(rows, path)
    return path


class TestRenderSvg:
    """Tests para render_svg"""

    def test_deterministic(self):
        """Debe producir el mismo texto con los mismos datos"""
        a = render_svg([1, 2, 3], [0.5, -0.5, 1.0], "x", "y")
        b = render_svg([1, 2, 3], [0.5, -0.5, 1.0], "x", "y")
        assert a == b
        assert a.startswith("<svg")
        assert 'stroke-dasharray="4,4"' in a

    def test_log_drops_nonpositive(self):
        """Debe descartar valores ≤ 0 en escala logarítmica"""
        svg = render_svg([1, 2, 3], [1.0, -1.0, 100.0], "x", "y", log_y=True)
        assert svg.count("<circle") == 2
        assert "(log)" in svg

    def test_too_few_points(self):
        """Debe exigir al menos dos valores finitos"""
        with pytest.raises(InputError, match="al menos 2"):
            render_svg([1, 2], [1.0, float("nan")], "x", "y")


class TestEmitPlot:
    """Tests para emit_plot"""

    def test_axis_choice(self):
        """Debe preferir u y luego re_z1"""
        assert choose_x_axis(["re_z1", "u"]) == "u"
        assert choose_x_axis(["re_z1"]) == "re_z1"
        with pytest.raises(InputError):
            choose_x_axis(["r"])

    def test_writes_file(self, sweep_csv, tmp_path):
        """Debe escribir el SVG frente a log(1/r)"""
        out = emit_plot(sweep_csv, "wp_hsc_max", tmp_path / "hsc.svg")
        text = out.read_text(encoding="utf-8")
        assert "log(1/r)" in text
        assert text.count("<circle") == 4

    def test_log_column(self, sweep_csv, tmp_path):
        """Debe usar escala logarítmica en las columnas de magnitudes"""
        text = emit_plot(sweep_csv, "dim1_lambda", tmp_path / "l.svg").read_text(encoding="utf-8")
        assert "dim1_lambda (log)" in text

    def test_unknown_column(self, sweep_csv, tmp_path):
        """Debe listar las columnas disponibles"""
        with pytest.raises(InputError, match="Disponibles"):
            emit_plot(sweep_csv, "nada", tmp_path / "x.svg")
