# core/jets.py
"""
Aritmética de jets de Taylor truncados en varias variables.

Un jet guarda los coeficientes de Taylor (hasta grado total `order`) de una
función con valores tensoriales. Para las cantidades no holomorfas se usan
2m variables independientes (w, v) con v = w̄: el jet de la conjugada de f se
obtiene intercambiando w ↔ v y conjugando coeficientes (`conj_swap`).

El atributo `order` del jet es el grado hasta el que los coeficientes son
válidos: cada derivada lo reduce en uno y los productos toman el mínimo.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from core.errors import InputError, OrderError, SingularityError

Number = Union[int, float, complex]


@dataclass(frozen=True, eq=False)
class MonomialBasis:
    """Monomios de grado total ≤ order en nvars variables, con tabla de productos."""

    nvars: int
    order: int
    exponents: np.ndarray
    index: Dict[Tuple[int, ...], int]
    degrees: np.ndarray
    scatter: sparse.csr_matrix
    left: np.ndarray
    right: np.ndarray
    swap: np.ndarray
    _deriv_maps: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = field(
        default_factory=dict, repr=False
    )

    @property
    def size(self) -> int:
        return len(self.exponents)

    def deriv_map(self, var: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if var not in self._deriv_maps:
            src, dst, fac = [], [], []
            for i, e in enumerate(self.exponents):
                if e[var] >= 1:
                    lowered = list(e)
                    lowered[var] -= 1
                    src.append(i)
                    dst.append(self.index[tuple(lowered)])
                    fac.append(e[var])
            self._deriv_maps[var] = (
                np.array(src, dtype=int), np.array(dst, dtype=int), np.array(fac, dtype=float)
            )
        return self._deriv_maps[var]


@lru_cache(maxsize=None)
def monomial_basis(nvars: int, order: int) -> MonomialBasis:
    if nvars < 1 or order < 0:
        raise InputError("Base de monomios inválida", nvars=nvars, order=order)
    exps = [e for e in product(range(order + 1), repeat=nvars) if sum(e) <= order]
    exps.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    index = {e: i for i, e in enumerate(exps)}
    degrees = np.array([sum(e) for e in exps], dtype=int)

    left, right, target = [], [], []
    for i, a in enumerate(exps):
        for j, b in enumerate(exps):
            if degrees[i] + degrees[j] <= order:
                left.append(i)
                right.append(j)
                target.append(index[tuple(x + y for x, y in zip(a, b))])
    npairs = len(left)
    scatter = sparse.csr_matrix(
        (np.ones(npairs), (np.array(target), np.arange(npairs))), shape=(len(exps), npairs)
    )

    half = nvars // 2
    if nvars % 2 == 0:
        swap = np.array([index[e[half:] + e[:half]] for e in exps], dtype=int)
    else:
        swap = np.arange(len(exps))

    return MonomialBasis(
        nvars=nvars,
        order=order,
        exponents=np.array(exps, dtype=int),
        index=index,
        degrees=degrees,
        scatter=scatter,
        left=np.array(left, dtype=int),
        right=np.array(right, dtype=int),
        swap=swap,
    )


def _align(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # eje 0 = monomios; los ejes de valor se alinean por la derecha (numpy)
    dx, dy = x.ndim, y.ndim
    if dx < dy:
        x = x.reshape((x.shape[0],) + (1,) * (dy - dx) + x.shape[1:])
    elif dy < dx:
        y = y.reshape((y.shape[0],) + (1,) * (dx - dy) + y.shape[1:])
    return x, y


class TaylorJet:
    """Jet truncado con valores tensoriales (coeficientes de forma (T, *shape))."""

    __array_ufunc__ = None
    __slots__ = ("basis", "coeffs", "order")

    def __init__(self, basis: MonomialBasis, coeffs, order: int = None):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim == 0 or coeffs.shape[0] != basis.size:
            raise InputError("Coeficientes incompatibles con la base de monomios",
                             esperado=basis.size, recibido=list(coeffs.shape))
        self.basis = basis
        self.coeffs = coeffs
        self.order = basis.order if order is None else int(order)

    # ---------------------------------------------------------------- construcción
    @classmethod
    def constant(cls, basis: MonomialBasis, value) -> "TaylorJet":
        value = np.asarray(value, dtype=complex)
        coeffs = np.zeros((basis.size,) + value.shape, dtype=complex)
        coeffs[0] = value
        return cls(basis, coeffs)

    @classmethod
    def variable(cls, basis: MonomialBasis, var: int, point: Number = 0.0) -> "TaylorJet":
        coeffs = np.zeros(basis.size, dtype=complex)
        coeffs[0] = point
        unit = [0] * basis.nvars
        unit[var] = 1
        coeffs[basis.index[tuple(unit)]] = 1.0
        return cls(basis, coeffs)

    # ---------------------------------------------------------------- acceso
    @property
    def shape(self) -> Tuple[int, ...]:
        return self.coeffs.shape[1:]

    def value(self) -> np.ndarray:
        return self.coeffs[0]

    def coefficient(self, exponents: Sequence[int]) -> np.ndarray:
        return self.coeffs[self.basis.index[tuple(exponents)]]

    def __getitem__(self, key) -> "TaylorJet":
        if not isinstance(key, tuple):
            key = (key,)
        return TaylorJet(self.basis, self.coeffs[(slice(None),) + key], self.order)

    def transpose(self, *axes: int) -> "TaylorJet":
        if not axes:
            axes = tuple(reversed(range(len(self.shape))))
        return TaylorJet(self.basis, self.coeffs.transpose((0,) + tuple(a + 1 for a in axes)), self.order)

    @property
    def T(self) -> "TaylorJet":
        return self.transpose()

    # ---------------------------------------------------------------- aritmética
    def _lift(self, other) -> "TaylorJet":
        if isinstance(other, TaylorJet):
            if other.basis is not self.basis:
                raise InputError("Jets sobre bases de monomios distintas")
            return other
        return TaylorJet.constant(self.basis, other)

    def __add__(self, other) -> "TaylorJet":
        other = self._lift(other)
        x, y = _align(self.coeffs, other.coeffs)
        return TaylorJet(self.basis, x + y, min(self.order, other.order))

    __radd__ = __add__

    def __neg__(self) -> "TaylorJet":
        return TaylorJet(self.basis, -self.coeffs, self.order)

    def __sub__(self, other) -> "TaylorJet":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "TaylorJet":
        return self._lift(other) - self

    def __mul__(self, other) -> "TaylorJet":
        if not isinstance(other, TaylorJet):
            const = np.asarray(other, dtype=complex)
            x, y = _align(self.coeffs, const[None, ...])
            return TaylorJet(self.basis, x * y, self.order)
        other = self._lift(other)
        x, y = _align(self.coeffs[self.basis.left], other.coeffs[self.basis.right])
        prod = x * y
        return TaylorJet(self.basis, self._scatter(prod), min(self.order, other.order))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TaylorJet":
        if isinstance(other, TaylorJet):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other, dtype=complex))

    def __rtruediv__(self, other) -> "TaylorJet":
        return self.reciprocal() * other

    def __pow__(self, k: int) -> "TaylorJet":
        if not isinstance(k, int) or k < 0:
            raise InputError("Sólo se admiten potencias enteras no negativas de jets", potencia=k)
        result = TaylorJet.constant(self.basis, np.ones(self.shape, dtype=complex))
        for _ in range(k):
            result = result * self
        return result

    def _scatter(self, prod: np.ndarray) -> np.ndarray:
        npairs = prod.shape[0]
        flat = prod.reshape(npairs, -1)
        out = self.basis.scatter @ flat
        return np.asarray(out).reshape((self.basis.size,) + prod.shape[1:])

    # ---------------------------------------------------------------- cálculo
    def deriv(self, var: int) -> "TaylorJet":
        if self.order < 1:
            raise OrderError("Orden de jet insuficiente para derivar", orden=self.order)
        src, dst, fac = self.basis.deriv_map(var)
        out = np.zeros_like(self.coeffs)
        out[dst] = self.coeffs[src] * fac.reshape((-1,) + (1,) * len(self.shape))
        return TaylorJet(self.basis, out, self.order - 1)

    def conj_swap(self) -> "TaylorJet":
        return TaylorJet(self.basis, np.conj(self.coeffs[self.basis.swap]), self.order)

    def linear(self, matrix: np.ndarray) -> "TaylorJet":
        """Aplica una matriz constante al último eje de valores."""
        return TaylorJet(self.basis, np.einsum("...b,ab->...a", self.coeffs, matrix), self.order)

    def _nilpotent_part(self) -> Tuple[np.ndarray, "TaylorJet"]:
        c0 = self.coeffs[0]
        if np.any(c0 == 0):
            raise SingularityError("El jet se anula en el punto base", valor=str(c0))
        h = (self - c0) * (1.0 / c0)
        return c0, h

    def reciprocal(self) -> "TaylorJet":
        """1/f elemento a elemento mediante la serie geométrica truncada."""
        c0, h = self._nilpotent_part()
        one = np.ones(self.shape, dtype=complex)
        result = TaylorJet.constant(self.basis, one)
        term = TaylorJet.constant(self.basis, one)
        for _ in range(self.basis.order):
            term = term * (-h)
            result = result + term
        return TaylorJet(self.basis, (result * (1.0 / c0)).coeffs, self.order)

    def log(self) -> "TaylorJet":
        """Logaritmo principal elemento a elemento."""
        c0, h = self._nilpotent_part()
        result = TaylorJet.constant(self.basis, np.log(c0))
        term = TaylorJet.constant(self.basis, np.ones(self.shape, dtype=complex))
        for k in range(1, self.basis.order + 1):
            term = term * h
            result = result + term * ((-1.0) ** (k + 1) / k)
        return TaylorJet(self.basis, result.coeffs, self.order)

    def __repr__(self) -> str:
        return f"TaylorJet(nvars={self.basis.nvars}, order={self.order}, shape={self.shape})"


# -------------------------------------------------------------------- funciones
def einsum(subscripts: str, a, b) -> TaylorJet:
    """Contracción binaria tipo numpy.einsum; índices en minúsculas."""
    ins, out = subscripts.replace(" ", "").split("->")
    sa, sb = ins.split(",")
    if isinstance(a, TaylorJet) and isinstance(b, TaylorJet):
        if a.basis is not b.basis:
            raise InputError("Jets sobre bases de monomios distintas")
        prod = np.einsum(f"Z{sa},Z{sb}->Z{out}", a.coeffs[a.basis.left], b.coeffs[a.basis.right])
        return TaylorJet(a.basis, a._scatter(prod), min(a.order, b.order))
    if isinstance(a, TaylorJet):
        return TaylorJet(a.basis, np.einsum(f"Z{sa},{sb}->Z{out}", a.coeffs, np.asarray(b, dtype=complex)), a.order)
    if isinstance(b, TaylorJet):
        return TaylorJet(b.basis, np.einsum(f"{sa},Z{sb}->Z{out}", np.asarray(a, dtype=complex), b.coeffs), b.order)
    raise InputError("einsum de jets requiere al menos un jet")


def stack(jets: Sequence[TaylorJet], axis: int = 0) -> TaylorJet:
    if not jets:
        raise InputError("No se puede apilar una lista vacía de jets")
    basis = jets[0].basis
    coeffs = np.stack([j.coeffs for j in jets], axis=axis + 1)
    return TaylorJet(basis, coeffs, min(j.order for j in jets))


def matmul(a, b) -> TaylorJet:
    return einsum("ij,jk->ik", a, b)


def matrix_inverse(G: TaylorJet) -> TaylorJet:
    """Inversa de un jet matricial por serie de Neumann alrededor del valor."""
    G0 = G.value()
    if np.linalg.cond(G0) > 1e12:
        raise SingularityError("Matriz mal condicionada al invertir el jet", cond=float(np.linalg.cond(G0)))
    G0inv = np.linalg.inv(G0)
    X = -einsum("ij,jk->ik", G0inv, G - G0)
    eye = np.eye(G0.shape[0], dtype=complex)
    term = TaylorJet.constant(G.basis, eye)
    acc = TaylorJet.constant(G.basis, eye)
    for _ in range(G.basis.order):
        term = matmul(term, X)
        acc = acc + term
    inv = einsum("ij,jk->ik", acc, G0inv)
    return TaylorJet(G.basis, inv.coeffs, G.order)


def polyval(coeffs: Sequence[Number], x: TaylorJet) -> TaylorJet:
    """Evalúa Σ c_j x^j (coeficientes de menor a mayor grado) por Horner."""
    acc = TaylorJet.constant(x.basis, complex(coeffs[-1]) if len(coeffs) else 0.0)
    for c in reversed(list(coeffs)[:-1]):
        acc = acc * x + complex(c)
    return acc
