# tests/test_vhs_models.py
"""
Tests unitarios para el módulo core.vhs_models
"""
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from core.errors import ConvergenceError, DomainError, InputError, OrderError
from core.model_file import load_model
from core.vhs_models import (
    PicardFuchsModel,
    decomposition_at,
    derive_flat_pairing,
    gauge_transform,
    model_jet,
    monodromy_logarithms,
    ode_residual,
    orbit_jet,
    polarization_of,
    product_orbit,
    shift_orbit,
    transversality_residual,
    validate_orbit_model,
    wp_geometry_checklist,
)
from core.wp_geometry import wp_metric

QUINTIC_COEFFS = ((0, -120), (0, -1250), (0, -4375), (0, -6250), (1, -3125))


class TestOrbitModel:
    """Tests para las órbitas nilpotentes"""

    def test_shift_orbit_valid(self):
        """Debe superar nilpotencia, invariancia y paridad"""
        assert validate_orbit_model(shift_orbit(3)).passed

    def test_product_orbit_valid(self, product_model):
        """Debe validar el producto y sus logaritmos conmutantes"""
        report = validate_orbit_model(product_model)
        assert report.passed
        assert report.get("conmutacion")

    def test_product_matches_file(self, product_model):
        """Debe coincidir con product_orbit(desplazamiento 1, desplazamiento 2)"""
        built = product_orbit(shift_orbit(1), shift_orbit(2))
        assert built.m == 2 and built.weight == 3 and built.dim == 6
        np.testing.assert_allclose(built.Q.matrix, product_model.Q.matrix)
        for a, b in zip(built.N, product_model.N):
            np.testing.assert_allclose(a, b)

    def test_invariance_failure(self):
        """Debe detectar N que no preserva Q"""
        base = shift_orbit(3)
        N = np.diag(np.ones(3), -1)
        N[3, 2] = 2.0
        bad = type(base)(weight=3, Q=base.Q, N=(N,), A=base.A)
        report = validate_orbit_model(bad)
        assert "invariancia" in [c.name for c in report.failures()]


class TestOrbitJet:
    """Tests para orbit_jet"""

    def test_value(self):
        """Debe dar Ω₁ = ζ = (√−1/2π) log(1/z)"""
        section = orbit_jet(shift_orbit(3), 0.1, 2)
        zeta = 1j / (2 * math.pi) * math.log(10.0)
        assert section.value()[0] == pytest.approx(1.0)
        assert section.value()[1] == pytest.approx(zeta)
        assert section.value()[2] == pytest.approx(zeta ** 2 / 2)

    def test_first_derivative(self):
        """Debe dar ∂Ω₁ = −√−1/(2πz)"""
        z = 0.02 + 0.01j
        section = orbit_jet(shift_orbit(3), z, 1)
        assert section.derivative((1,))[1] == pytest.approx(-1j / (2 * math.pi * z))

    def test_zero_point(self):
        """Debe rechazar z = 0"""
        with pytest.raises(DomainError):
            orbit_jet(shift_orbit(3), 0.0, 2)

    def test_outside_disc(self):
        """Debe rechazar |z| ≥ 1"""
        with pytest.raises(DomainError, match=r"0 < \|z_i\| < 1"):
            orbit_jet(shift_orbit(3), 1.5, 2)

    def test_wrong_coordinates(self):
        """Debe rechazar un número de coordenadas distinto de m"""
        with pytest.raises(InputError, match="coordenadas"):
            orbit_jet(shift_orbit(3), [0.1, 0.2], 2)

    def test_order_out_of_range(self):
        """Debe rechazar órdenes por encima del máximo"""
        with pytest.raises(OrderError):
            orbit_jet(shift_orbit(3), 0.1, 9)

    def test_branch_cut_flag(self):
        """Debe marcar los puntos junto al corte de rama"""
        section = orbit_jet(shift_orbit(3), complex(-0.1, 1e-9), 2)
        assert section.flags == ("corte_de_rama:0",)


class TestPicardFuchs:
    """Tests para los modelos de Picard–Fuchs"""

    def test_ode_residual(self, quintic):
        """Debe anular el operador sobre la serie de Frobenius"""
        assert ode_residual(quintic, 1e-5) < 1e-10

    def test_flat_pairing(self, quintic):
        """Debe derivar una Q antisimétrica con (Ω,Ω̄) > 0"""
        Q = polarization_of(quintic)
        np.testing.assert_allclose(Q.matrix.T, -Q.matrix, atol=1e-8 * np.max(np.abs(Q.matrix)))
        omega = model_jet(quintic, 1e-5, 0).value()
        assert Q.pairing(omega, np.conj(omega)).real > 0

    def test_flat_pairing_cached(self, quintic):
        """Debe reutilizar la polarización derivada"""
        assert polarization_of(quintic) is polarization_of(quintic)

    def test_monodromy_nilpotent(self, quintic):
        """Debe tener N⁴ = 0 y N³ ≠ 0"""
        N = monodromy_logarithms(quintic)[0]
        assert np.linalg.norm(np.linalg.matrix_power(N, 4)) < 1e-10
        assert np.linalg.norm(np.linalg.matrix_power(N, 3)) > 1e-3

    def test_radius_limit(self, quintic):
        """Debe rechazar |z| ≥ 0.8·r_max"""
        with pytest.raises(ConvergenceError):
            model_jet(quintic, 0.9 * quintic.r_max, 2)

    def test_mum_point_excluded(self, quintic):
        """Debe rechazar z = 0"""
        with pytest.raises(DomainError):
            model_jet(quintic, 0.0, 2)

    def test_not_mum(self):
        """Debe rechazar operadores sin monodromía máximamente unipotente"""
        coeffs = ((1, -120),) + QUINTIC_COEFFS[1:]
        with pytest.raises(InputError, match="máximamente unipotente"):
            PicardFuchsModel(coeffs=coeffs, r_max=5.0 ** -5)

    def test_leading_zero(self):
        """Debe rechazar c_d(0) = 0"""
        coeffs = QUINTIC_COEFFS[:-1] + ((0, 1),)
        with pytest.raises(InputError, match="c_d"):
            PicardFuchsModel(coeffs=coeffs, r_max=5.0 ** -5)

    def test_default_pairing_derivation(self):
        """Debe derivar la polarización sin matriz de base explícita"""
        model = PicardFuchsModel(coeffs=QUINTIC_COEFFS, r_max=5.0 ** -5)
        Q = derive_flat_pairing(model)
        assert Q.weight == 3 and Q.dim == 4

    def test_pairing_from_model_file(self, models_dir):
        """Debe derivar Q de la quíntica recién cargada, sin caché previa"""
        model, _ = load_model(models_dir / "quintic.json")
        Q = derive_flat_pairing(model)
        omega = model_jet(model, 1e-5, 0).value()
        assert Q.pairing(omega, np.conj(omega)).real > 0

    def test_order_zero_section(self, quintic):
        """Debe dar en orden 0 el mismo valor de Ω que en orden 2"""
        np.testing.assert_allclose(model_jet(quintic, 1e-5, 0).value(),
                                   model_jet(quintic, 1e-5, 2).value(), rtol=1e-12)

    def test_frobenius_concurrent(self):
        """Debe extender la tabla de Frobenius igual con varios hilos a la vez"""
        expected = PicardFuchsModel(coeffs=QUINTIC_COEFFS, r_max=5.0 ** -5).frobenius(60)
        for _ in range(5):
            model = PicardFuchsModel(coeffs=QUINTIC_COEFFS, r_max=5.0 ** -5)
            model.frobenius(2)
            with ThreadPoolExecutor(max_workers=8) as pool:
                list(pool.map(model.frobenius, [20 + 5 * k for k in range(8)]))
            np.testing.assert_array_equal(model.frobenius(60), expected)


class TestDecomposition:
    """Tests para decomposition_at y los axiomas"""

    def test_quintic_dims(self, quintic):
        """Debe dar números de Hodge (1, 1, 1, 1) en la quíntica"""
        dec = decomposition_at(model_jet(quintic, 1e-5, 3), polarization_of(quintic))
        assert dec.dims == [1, 1, 1, 1]

    def test_product_dims(self, product_model):
        """Debe dar (1, 2, 2, 1) en el producto"""
        section = model_jet(product_model, [0.05, 0.02], 3)
        assert decomposition_at(section, product_model.Q).dims == [1, 2, 2, 1]

    def test_transversality(self, model_a):
        """Debe cumplir la transversalidad de Griffiths"""
        section = model_jet(model_a, 0.05, 3)
        dec = decomposition_at(section, model_a.Q)
        assert transversality_residual(section, dec, model_a.Q) < 1e-9

    def test_checklist(self, model_a):
        """Debe superar los axiomas comprobables y omitir la cuasi-proyectividad"""
        report = wp_geometry_checklist(model_a, [np.array([0.05]), np.array([0.001])])
        assert report.passed
        skipped = report.get("axioma_3")
        assert skipped and skipped[0].passed is None

    def test_gauge_invariance(self, model_a):
        """Debe dejar g_WP invariante bajo Ω → fΩ"""
        section = model_jet(model_a, 0.05, 2)
        gauged = gauge_transform(section, {(0,): 2.0, (1,): 0.5 + 1j})
        g0 = wp_metric(section, model_a.Q).matrix
        g1 = wp_metric(gauged, model_a.Q).matrix
        np.testing.assert_allclose(g1, g0, rtol=1e-10)

    def test_gauge_zero_factor(self, model_a):
        """Debe rechazar un factor que se anula en el punto"""
        section = model_jet(model_a, 0.05, 2)
        with pytest.raises(DomainError):
            gauge_transform(section, {(0,): -0.05, (1,): 1.0})
