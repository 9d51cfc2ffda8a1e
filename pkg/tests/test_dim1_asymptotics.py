# tests/test_dim1_asymptotics.py
"""
Tests unitarios para el módulo core.dim1_asymptotics
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.dim1_asymptotics import (
    boundary_classifier,
    boundary_model,
    case1_estimates,
    completeness_test,
    curvature_boundedness_scan,
    first_fraction_bound,
    geometric_ray,
    pairing_moments,
    trend_ratio,
    truncation_bound,
    two_fraction_form,
    weight_degree,
    weight_polynomial,
    wp_leading,
    yukawa_chain,
)
from core.constants import WP_LEADING_TOL
from core.errors import DomainError, InputError
from core.vhs_models import NilpotentOrbitModel, model_jet, polarization_of, shift_orbit


class TestYukawaChain:
    """Tests para yukawa_chain y la forma de dos fracciones"""

    def test_threefold_values(self, model_a):
        """Debe dar |F₁₁₁| = 1/(8π³r³), F₁₁₁₁ = 0, A = (4/3)λ y ρ = −1/5"""
        r = 0.01
        chain = yukawa_chain(model_jet(model_a, r, 4), model_a.Q)
        assert abs(chain.F111) == pytest.approx(1 / (8 * math.pi ** 3 * r ** 3), rel=1e-9)
        assert abs(chain.F1111) < 1e-8 * abs(chain.F111) / r
        assert chain.A == pytest.approx(4 / 3 * chain.lam, rel=1e-9)
        assert chain.rho == pytest.approx(-0.2, rel=1e-9)

    def test_two_fractions(self, model_a):
        """Debe reproducir ρ con x = A/λ"""
        chain = yukawa_chain(model_jet(model_a, 0.003 + 0.002j, 4), model_a.Q)
        parts = two_fraction_form(chain)
        assert parts["x"] == pytest.approx(4 / 3, rel=1e-9)
        assert parts["rho"] == pytest.approx(chain.rho, rel=1e-10)

    def test_quintic_fractions(self, quintic):
        """Debe coincidir la forma de dos fracciones en la quíntica"""
        chain = yukawa_chain(model_jet(quintic, 1e-5, 4), polarization_of(quintic))
        assert two_fraction_form(chain)["rho"] == pytest.approx(chain.rho, rel=1e-9)

    def test_requires_threefold_curve(self, model_c):
        """Debe rechazar n ≠ 3"""
        with pytest.raises(DomainError, match="n = 3 y m = 1"):
            yukawa_chain(model_jet(model_c, 0.05, 4), model_c.Q)


class TestFirstFraction:
    """Tests para first_fraction_bound"""

    def test_grid(self):
        """Debe acotar la primera fracción por 2; en [0, 2] el máximo está en x = 0"""
        report = first_fraction_bound(np.linspace(0, 2, 201))
        assert report.passed
        assert report.data["max"] == pytest.approx(1.0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=0, max_value=1e6, allow_nan=False), min_size=1, max_size=20))
    def test_bound_holds(self, xs):
        """Debe cumplirse para cualquier x ≥ 0"""
        assert first_fraction_bound(xs).passed

    def test_negative(self):
        """Debe rechazar x negativo"""
        with pytest.raises(InputError):
            first_fraction_bound([-1.0, 0.0])


class TestWeightPolynomial:
    """Tests para el polinomio de pesos y la completitud"""

    def test_threefold(self, model_a):
        """Debe dar (4/3)(u/2π)³"""
        poly = weight_polynomial(model_a)
        np.testing.assert_allclose(poly, [0, 0, 0, 4 / 3 / (2 * math.pi) ** 3], atol=1e-15)
        assert weight_degree(model_a) == 3

    def test_fourfold(self, model_c):
        """Debe dar (2/3)(u/2π)⁴"""
        poly = weight_polynomial(model_c)
        assert len(poly) == 5
        assert poly[4] == pytest.approx(2 / 3 / (2 * math.pi) ** 4, rel=1e-12)

    def test_case2_constant(self, case2):
        """Debe ser constante cuando NA₀ = 0"""
        poly = weight_polynomial(case2)
        assert len(poly) == 1
        assert poly[0] == pytest.approx(2.0)
        assert all(abs(x) < 1e-12 for x in pairing_moments(case2))

    def test_moments(self, model_a):
        """Debe anular (N^lA₀, Ā₀) salvo l = n"""
        moments = pairing_moments(model_a)
        assert abs(moments[0]) < 1e-15 and abs(moments[1]) < 1e-15
        assert abs(moments[2]) == pytest.approx(1.0)

    def test_quintic_degree(self, quintic):
        """Debe dar l = 3 en el punto MUM"""
        assert weight_degree(quintic) == 3
        assert completeness_test(quintic)[0]

    def test_completeness(self, model_a, case2):
        """Debe distinguir NA₀ ≠ 0 de NA₀ = 0"""
        assert completeness_test(model_a)[0]
        complete, report = completeness_test(case2)
        assert not complete
        assert report.data["NA0_ratio"] == 0.0


class TestLeading:
    """Tests para wp_leading"""

    def test_threefold(self, model_a):
        """Debe dar l = 3 y λr²u² → 3/4"""
        l, report = wp_leading(model_a)
        assert l == 3
        assert report.passed
        assert report.data["values"][-1] == pytest.approx(0.75, rel=1e-9)
        assert report.data["exact_potential"] is True
        assert report.get("limite")[0].tolerance == WP_LEADING_TOL

    def test_quintic_rate(self, quintic):
        """Debe aceptar la desviación O(1/u) de la quíntica y rechazarla con tolerancia 1e-6"""
        l, report = wp_leading(quintic)
        assert l == 3
        assert report.data["exact_potential"] is False
        assert report.passed
        assert report.data["values"][-1] == pytest.approx(0.75, abs=1e-2)
        _, strict = wp_leading(quintic, tol=WP_LEADING_TOL)
        assert not strict.passed

    def test_incomplete(self, case2):
        """Debe rechazar modelos con NA₀ = 0"""
        with pytest.raises(DomainError, match="caso 2"):
            wp_leading(case2)


class TestTruncation:
    """Tests para truncation_bound"""

    @pytest.mark.parametrize("s", [0, 1, 2])
    def test_dominated(self, quintic, s):
        """Debe acotar la cola empírica en r = 1e-5"""
        est = truncation_bound(quintic, 0.5, s, 1e-5)
        assert est.dominated
        assert est.k0 == 1

    def test_outside_radius(self, quintic):
        """Debe rechazar r ≥ δ/4"""
        with pytest.raises(DomainError, match="δ/4"):
            truncation_bound(quintic, 0.5, 0, 1e-3)

    def test_negative_order(self, quintic):
        """Debe rechazar s < 0"""
        with pytest.raises(InputError):
            truncation_bound(quintic, 0.5, -1, 1e-5)


class TestClassifier:
    """Tests para boundary_classifier"""

    def test_case1(self, model_a):
        """Debe clasificar NA₀ ≠ 0 como caso 1"""
        cls = boundary_classifier(model_a)
        assert cls.case == 1
        assert cls.l == 3

    def test_case2(self, case2):
        """Debe dar caso 2 con k = 1, l = 1"""
        cls = boundary_classifier(case2)
        assert (cls.case, cls.k, cls.l) == (2, 1, 1)
        assert cls.status == "ok"
        assert not cls.degenerate

    def test_flat(self):
        """Debe marcar como degenerado el caso N = 0"""
        base = shift_orbit(3)
        A0 = np.array([1, 0, 0, -1j])
        flat = NilpotentOrbitModel(weight=3, Q=base.Q, N=(np.zeros((4, 4)),), A={(0,): A0})
        cls = boundary_classifier(boundary_model(flat))
        assert cls.case == 2
        assert cls.degenerate
        assert cls.note == "N = 0"


class TestScans:
    """Tests para los barridos sobre el rayo"""

    def test_geometric_ray(self):
        """Debe dar radios r0·factor^j"""
        ray = geometric_ray(0.1, count=4, factor=0.5)
        assert [abs(z) for z in ray] == pytest.approx([0.1, 0.05, 0.025, 0.0125])

    def test_trend_ratio(self):
        """Debe comparar el último cuarto con el primero"""
        assert trend_ratio([1.0] * 8) == pytest.approx(1.0)
        assert trend_ratio([1, 1, 2, 2, 4, 4, 8, 8]) == pytest.approx(8.0)
        assert trend_ratio([0.0] * 4) == 0.0

    def test_bounded_threefold(self, model_a):
        """Debe dar ρ constante = −1/5 a lo largo del rayo"""
        report = curvature_boundedness_scan(model_a, count=12)
        assert report.passed
        assert report.data["trend"] == pytest.approx(1.0, rel=1e-6)
        assert report.data["sup_abs_rho"] == pytest.approx(0.2, rel=1e-6)

    def test_refuses_fourfold(self, model_c):
        """Debe negarse fuera de n = 3, m = 1"""
        report = curvature_boundedness_scan(model_c)
        assert "refused" in report.data
        assert report.checks[0].passed is None

    def test_unknown_metric(self, model_a):
        """Debe rechazar una métrica desconocida"""
        with pytest.raises(InputError):
            curvature_boundedness_scan(model_a, count=4, metric="otra")

    def test_case1_estimates(self, model_a):
        """Debe dar r³|F₁₁₁| acotado y F₁₁₁₁ despreciable"""
        report = case1_estimates(model_a, count=12)
        assert report.passed
        assert report.data["r3_F111"][0] == pytest.approx(1 / (8 * math.pi ** 3), rel=1e-9)
