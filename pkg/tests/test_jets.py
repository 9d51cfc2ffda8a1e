# tests/test_jets.py
"""
Tests unitarios para el módulo core.jets
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import InputError, OrderError, SingularityError
from core.jets import TaylorJet, einsum, matrix_inverse, monomial_basis, polyval


finite = st.floats(min_value=-3, max_value=3, allow_nan=False, allow_infinity=False)
complex_coef = st.builds(complex, finite, finite)


class TestMonomialBasis:
    """Tests para monomial_basis"""

    def test_size(self):
        """Debe contener C(nvars + order, order) monomios"""
        assert monomial_basis(2, 3).size == 10
        assert monomial_basis(1, 4).size == 5

    def test_constant_first(self):
        """Debe ordenar por grado, con el monomio constante primero"""
        basis = monomial_basis(2, 2)
        assert tuple(basis.exponents[0]) == (0, 0)
        assert list(basis.degrees) == sorted(basis.degrees)

    def test_cached(self):
        """Debe reutilizar la misma base"""
        assert monomial_basis(3, 2) is monomial_basis(3, 2)

    def test_invalid(self):
        """Debe rechazar bases sin variables"""
        with pytest.raises(InputError):
            monomial_basis(0, 2)


class TestTaylorJet:
    """Tests para la aritmética de jets"""

    def test_product(self):
        """Debe truncar el producto (1 + x)(1 − x) = 1 − x²"""
        basis = monomial_basis(1, 3)
        x = TaylorJet.variable(basis, 0)
        prod = (1 + x) * (1 - x)
        assert prod.coefficient((0,)) == pytest.approx(1)
        assert prod.coefficient((1,)) == pytest.approx(0)
        assert prod.coefficient((2,)) == pytest.approx(-1)

    def test_reciprocal_geometric(self):
        """Debe dar la serie geométrica para 1/(1 − x)"""
        basis = monomial_basis(1, 4)
        x = TaylorJet.variable(basis, 0)
        inv = (1 - x).reciprocal()
        np.testing.assert_allclose(inv.coeffs, np.ones(5))

    def test_log_series(self):
        """Debe dar log(1 + x) = x − x²/2 + x³/3"""
        basis = monomial_basis(1, 3)
        x = TaylorJet.variable(basis, 0)
        lg = (1 + x).log()
        np.testing.assert_allclose(lg.coeffs, [0, 1, -0.5, 1 / 3], atol=1e-15)

    def test_log_at_point(self):
        """Debe dar ∂ log z = 1/z en z₀"""
        basis = monomial_basis(1, 2)
        z = TaylorJet.variable(basis, 0, 0.3 + 0.1j)
        lg = z.log()
        assert lg.value() == pytest.approx(np.log(0.3 + 0.1j))
        assert lg.coefficient((1,)) == pytest.approx(1 / (0.3 + 0.1j))

    def test_reciprocal_singular(self):
        """Debe lanzar SingularityError si el jet se anula en el punto"""
        basis = monomial_basis(1, 2)
        with pytest.raises(SingularityError):
            TaylorJet.variable(basis, 0).reciprocal()

    def test_deriv_lowers_order(self):
        """Debe reducir en uno el orden válido"""
        basis = monomial_basis(1, 2)
        x = TaylorJet.variable(basis, 0, 1.0)
        assert x.deriv(0).order == 1
        assert (x * x).deriv(0).value() == pytest.approx(2.0)

    def test_deriv_order_zero(self):
        """Debe lanzar OrderError al derivar un jet de orden 0"""
        basis = monomial_basis(1, 1)
        x = TaylorJet.variable(basis, 0)
        with pytest.raises(OrderError):
            x.deriv(0).deriv(0)

    def test_negative_power(self):
        """Debe rechazar potencias negativas"""
        basis = monomial_basis(1, 2)
        with pytest.raises(InputError, match="potencias enteras"):
            TaylorJet.variable(basis, 0, 1.0) ** -1

    def test_mismatched_bases(self):
        """Debe rechazar operaciones entre bases distintas"""
        a = TaylorJet.variable(monomial_basis(1, 2), 0)
        b = TaylorJet.variable(monomial_basis(1, 3), 0)
        with pytest.raises(InputError, match="bases de monomios distintas"):
            a + b

    @settings(max_examples=25, deadline=None)
    @given(st.lists(complex_coef, min_size=6, max_size=6))
    def test_conj_swap_involution(self, values):
        """Debe ser una involución sobre jets en (w, w̄)"""
        basis = monomial_basis(2, 2)
        jet = TaylorJet(basis, np.array(values))
        np.testing.assert_allclose(jet.conj_swap().conj_swap().coeffs, jet.coeffs)

    @settings(max_examples=25, deadline=None)
    @given(st.lists(complex_coef, min_size=10, max_size=10),
           st.lists(complex_coef, min_size=10, max_size=10))
    def test_leibniz(self, a, b):
        """Debe cumplir ∂(fg) = ∂f·g + f·∂g hasta el orden válido"""
        basis = monomial_basis(2, 3)
        f = TaylorJet(basis, np.array(a))
        g = TaylorJet(basis, np.array(b))
        lhs = (f * g).deriv(0)
        rhs = f.deriv(0) * g + f * g.deriv(0)
        valid = basis.degrees <= lhs.order
        np.testing.assert_allclose(lhs.coeffs[valid], rhs.coeffs[valid], atol=1e-9)


class TestFunctions:
    """Tests para einsum, matrix_inverse y polyval"""

    def test_matrix_inverse(self):
        """Debe invertir un jet matricial hasta su orden"""
        basis = monomial_basis(1, 3)
        x = TaylorJet.variable(basis, 0)
        A = np.array([[2.0, 1.0], [0.5, 3.0]])
        G = TaylorJet.constant(basis, np.eye(2)) + x * A
        prod = einsum("ij,jk->ik", G, matrix_inverse(G))
        np.testing.assert_allclose(prod.value(), np.eye(2), atol=1e-12)
        for k in range(1, 4):
            np.testing.assert_allclose(prod.coefficient((k,)), np.zeros((2, 2)), atol=1e-10)

    def test_matrix_inverse_singular(self):
        """Debe rechazar matrices mal condicionadas"""
        basis = monomial_basis(1, 1)
        G = TaylorJet.constant(basis, np.array([[1.0, 1.0], [1.0, 1.0]]))
        with pytest.raises(SingularityError):
            matrix_inverse(G)

    def test_polyval(self):
        """Debe evaluar 1 + 2x + 3x² y su derivada en x₀"""
        basis = monomial_basis(1, 1)
        x = TaylorJet.variable(basis, 0, 2.0)
        p = polyval([1, 2, 3], x)
        assert p.value() == pytest.approx(17)
        assert p.coefficient((1,)) == pytest.approx(14)

    def test_einsum_requires_jet(self):
        """Debe exigir al menos un jet"""
        with pytest.raises(InputError):
            einsum("i,i->", np.ones(2), np.ones(2))
