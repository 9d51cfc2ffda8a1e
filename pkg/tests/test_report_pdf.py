# tests/test_report_pdf.py
"""
Tests unitarios para el módulo core.report_pdf
"""
from core.report_pdf import column_stats, generate_sweep_pdf, predicate_counts

ROWS = [
    {"re_z1": "0.1", "im_z1": "0", "r": "0.1", "u": "2.3", "wp_hsc_max": "-0.5", "wp_hsc_positive": "false", "ok": "true"},
    {"re_z1": "0.01", "im_z1": "0", "r": "0.01", "u": "4.6", "wp_hsc_max": "0.25", "wp_hsc_positive": "true", "ok": "true"},
    {"re_z1": "0.001", "im_z1": "0", "r": "0.001", "u": "6.9", "wp_hsc_max": "nan", "wp_hsc_positive": "", "ok": "false"},
]


class TestStats:
    """Tests para column_stats y predicate_counts"""

    def test_column_stats(self):
        """Debe ignorar coordenadas, u, banderas y valores no finitos"""
        stats = {s["column"]: s for s in column_stats(ROWS)}
        assert set(stats) == {"r", "wp_hsc_max"}
        assert stats["wp_hsc_max"]["min"] == -0.5
        assert stats["wp_hsc_max"]["last"] == 0.25
        assert stats["wp_hsc_max"]["count"] == 2

    def test_predicate_counts(self):
        """Debe contar las filas con 'true'"""
        counts = {p["column"]: p for p in predicate_counts(ROWS)}
        assert counts["ok"] == {"column": "ok", "true": 2, "false": 1}
        assert counts["wp_hsc_positive"]["true"] == 1

    def test_empty(self):
        """Debe devolver listas vacías sin filas"""
        assert column_stats([]) == []
        assert predicate_counts([]) == []


class TestPdf:
    """Tests para generate_sweep_pdf"""

    def test_pdf_header(self):
        """Debe generar un PDF válido"""
        buf = generate_sweep_pdf(ROWS, "Barrido <quintic>", notes=["Nota\nsegunda línea"])
        data = buf.getvalue()
        assert data.startswith(b"%PDF")
        assert len(data) > 1000

    def test_reproducible(self):
        """Debe ser reproducible byte a byte"""
        a = generate_sweep_pdf(ROWS, "Barrido").getvalue()
        b = generate_sweep_pdf(ROWS, "Barrido").getvalue()
        assert a == b
