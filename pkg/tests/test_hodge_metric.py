# tests/test_hodge_metric.py
"""
Tests unitarios para el módulo core.hodge_metric
"""
import numpy as np
import pytest

from core.hodge_core import block_gram
from core.hodge_metric import closed_form_hodge, domination_report, hodge_metric_direct, orthonormal_block
from core.vhs_models import decomposition_at, model_jet, polarization_of
from core.wp_geometry import covariant_frame, f_tensor, kahler_jets, wp_curvature, wp_metric, wp_ricci


def _metrics(model, z):
    Q = polarization_of(model)
    section = model_jet(model, z, 4)
    kj = kahler_jets(section, Q)
    g = wp_metric(section, Q, kj=kj)
    frame = covariant_frame(section, Q, kj=kj)
    F = f_tensor(frame, Q)
    ric = wp_ricci(wp_curvature(frame, g, Q, F=F), g, F=F)
    dec = decomposition_at(section, Q)
    return g, ric, hodge_metric_direct(section, dec, Q), dec, Q


class TestOrthonormalBlock:
    """Tests para orthonormal_block"""

    def test_unit_gram(self, model_a):
        """Debe dar Gram de Q₁ igual a la identidad"""
        _, _, _, dec, Q = _metrics(model_a, 0.05)
        for p in range(4):
            U = orthonormal_block(dec, Q, p)
            np.testing.assert_allclose(block_gram(Q, U, p), np.eye(U.shape[1]), atol=1e-9)


class TestHodgeMetric:
    """Tests para hodge_metric_direct y la forma cerrada"""

    def test_threefold(self, model_a):
        """Debe dar h^H = (m+3)g + Ric = (10/3)g"""
        g, ric, hH, _, _ = _metrics(model_a, 0.01)
        assert hH.matrix[0, 0].real == pytest.approx(10 / 3 * g.scalar(), rel=1e-8)
        np.testing.assert_allclose(hH.matrix, closed_form_hodge(g, ric, 3), rtol=1e-8)

    def test_fourfold(self, model_c):
        """Debe dar h^H = 2(m+2)g + 2Ric = 5g"""
        g, ric, hH, _, _ = _metrics(model_c, 0.01)
        assert hH.matrix[0, 0].real == pytest.approx(5 * g.scalar(), rel=1e-8)
        np.testing.assert_allclose(hH.matrix, closed_form_hodge(g, ric, 4), rtol=1e-8)

    def test_product(self, product_model):
        """Debe coincidir con la forma cerrada en el producto"""
        g, ric, hH, _, _ = _metrics(product_model, [0.01 + 0.003j, 0.004])
        closed = closed_form_hodge(g, ric, 3)
        assert np.linalg.norm(hH.matrix - closed) / np.linalg.norm(closed) < 1e-8

    def test_quintic(self, quintic):
        """Debe coincidir con la forma cerrada en la quíntica"""
        g, ric, hH, _, _ = _metrics(quintic, 1e-5)
        closed = closed_form_hodge(g, ric, 3)
        assert abs(hH.matrix[0, 0] - closed[0, 0]) / abs(closed[0, 0]) < 1e-6

    def test_no_closed_form(self, model_a):
        """Debe devolver None fuera de n = 3, 4"""
        g, ric, _, _, _ = _metrics(model_a, 0.05)
        assert closed_form_hodge(g, ric, 5) is None

    def test_transversality(self, model_a):
        """Debe registrar un residuo de transversalidad despreciable"""
        _, _, hH, _, _ = _metrics(model_a, 0.05)
        assert hH.data["transversality_residual"] < 1e-9


class TestDomination:
    """Tests para domination_report"""

    def test_threefold_constant(self, model_a):
        """Debe dar C = 3/10 en la órbita de peso 3"""
        g, _, hH, _, _ = _metrics(model_a, 0.01)
        report = domination_report([g], [hH])
        assert report.passed
        assert report.data["C"] == pytest.approx(0.3, rel=1e-8)

    def test_product(self, product_model):
        """Debe cumplir g ≤ h^H en el producto"""
        g, _, hH, _, _ = _metrics(product_model, [0.05, 0.02])
        assert domination_report([g], [hH]).passed
