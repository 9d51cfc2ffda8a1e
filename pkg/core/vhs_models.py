# core/vhs_models.py
"""
Modelos de variaciones de estructura de Hodge: órbitas nilpotentes y familias
de Picard–Fuchs de un parámetro. Construye jets de la sección de periodos Ω,
descomposiciones de Hodge en un punto y la lista de comprobación de los
axiomas de la geometría de Weil–Petersson.

Convención de ramas: logaritmo principal con corte en el semieje real
negativo; los puntos cercanos al corte se marcan, sin continuación analítica.
Exponente de la órbita: Ω = exp(ζ·N) A(z) con ζ = (√−1/2π) log(1/z).
"""
import math
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.special import comb

from core import jets
from core.constants import (
    BRANCH_CUT_TOL,
    MAX_JET_ORDER,
    NILPOTENCY_TOL,
    PF_MAX_TERMS,
    PF_MIN_TERMS,
    PF_PAIRING_ORDER_FACTOR,
    PF_RADIUS_FRACTION,
    PF_REFERENCE_FRACTION,
    PF_TAIL_TOL,
    RANK_TOL,
    RESIDUAL_TOL,
)
from core.errors import (
    AmbiguityError,
    ConvergenceError,
    DegeneracyError,
    DomainError,
    HodgeError,
    HodgeRiemannError,
    InputError,
    OrderError,
)
from core.hodge_core import (
    HodgeDecompositionAt,
    PolarizationForm,
    hodge_riemann_report,
    project_pq,
    validate_polarization,
)
from core.jets import TaylorJet, monomial_basis
from core.logger import get_logger
from core.reports import ValidationReport, make_check, skipped_check

logger = get_logger(__name__)

TWO_PI_I = 2j * math.pi


# ======================================================================
# Jets de la sección de periodos
# ======================================================================
@dataclass(frozen=True, eq=False)
class JetSection:
    """Coeficientes ∂^aΩ(z₀)/a! para |a| ≤ order (base de monomios holomorfos)."""

    point: np.ndarray
    order: int
    coeffs: np.ndarray
    flags: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        point = np.atleast_1d(np.asarray(self.point, dtype=complex))
        object.__setattr__(self, "point", point)
        basis = monomial_basis(len(point), self.order)
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape[0] != basis.size:
            raise InputError("Coeficientes de jet incompletos", esperado=basis.size,
                             recibido=int(coeffs.shape[0]))
        if not np.any(coeffs[0]):
            raise DegeneracyError("La sección se anula en el punto base", level=None)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def m(self) -> int:
        return len(self.point)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def basis(self) -> jets.MonomialBasis:
        return monomial_basis(self.m, self.order)

    def value(self) -> np.ndarray:
        return self.coeffs[0]

    def coefficient(self, a: Sequence[int]) -> np.ndarray:
        return self.coeffs[self.basis.index[tuple(a)]]

    def derivative(self, a: Sequence[int]) -> np.ndarray:
        factor = math.prod(math.factorial(x) for x in a)
        return factor * self.coefficient(a)

    def derivatives_of_degree(self, k: int) -> List[Tuple[Tuple[int, ...], np.ndarray]]:
        return [(tuple(int(x) for x in e), self.derivative(e))
                for e in self.basis.exponents if sum(e) == k]

    def require(self, order: int, motivo: str = "") -> None:
        if self.order < order:
            raise OrderError(f"Se requiere un jet de orden {order} {motivo}".strip(),
                             requerido=order, disponible=self.order)

    def to_jet(self) -> TaylorJet:
        """Jet en 2m variables (w, w̄) con la parte antiholomorfa nula."""
        m = self.m
        big = monomial_basis(2 * m, self.order)
        coeffs = np.zeros((big.size, self.dim), dtype=complex)
        for i, e in enumerate(self.basis.exponents):
            coeffs[big.index[tuple(int(x) for x in e) + (0,) * m]] = self.coeffs[i]
        return TaylorJet(big, coeffs)


def _check_order(order: int) -> None:
    if order < 0 or order > MAX_JET_ORDER:
        raise OrderError(f"Orden de jet fuera de rango (0..{MAX_JET_ORDER})", orden=order)


def _branch_flags(z0: np.ndarray) -> Tuple[str, ...]:
    flags = []
    for i, z in enumerate(z0):
        if abs(abs(np.angle(z)) - math.pi) < BRANCH_CUT_TOL:
            logger.warning(f"Punto z_{i}={z} a menos de {BRANCH_CUT_TOL} del corte de rama")
            flags.append(f"corte_de_rama:{i}")
    return tuple(flags)


# ======================================================================
# Órbitas nilpotentes
# ======================================================================
@dataclass(frozen=True, eq=False)
class NilpotentOrbitModel:
    weight: int
    Q: PolarizationForm
    N: Tuple[np.ndarray, ...]
    A: Dict[Tuple[int, ...], np.ndarray]
    name: str = "orbita"

    def __post_init__(self):
        d = self.Q.dim
        Ns = tuple(np.asarray(N, dtype=complex) for N in self.N)
        if not Ns:
            raise InputError("La órbita necesita al menos una matriz N")
        for N in Ns:
            if N.shape != (d, d):
                raise InputError("Dimensión de N incompatible con Q", forma=list(N.shape), d=d)
        A = {}
        for key, vec in self.A.items():
            key = tuple(int(k) for k in key)
            vec = np.asarray(vec, dtype=complex)
            if len(key) != len(Ns) or vec.shape != (d,):
                raise InputError("Coeficiente A incompatible", indice=list(key), forma=list(vec.shape))
            A[key] = vec
        if not A:
            raise InputError("La órbita necesita coeficientes A")
        if self.Q.weight != self.weight:
            raise InputError("El peso de Q no coincide con el del modelo", n=self.weight, nQ=self.Q.weight)
        object.__setattr__(self, "N", Ns)
        object.__setattr__(self, "A", A)

    @property
    def m(self) -> int:
        return len(self.N)

    @property
    def dim(self) -> int:
        return self.Q.dim

    @property
    def A0(self) -> np.ndarray:
        return self.A.get((0,) * self.m, np.zeros(self.dim, dtype=complex))


def validate_orbit_model(model: NilpotentOrbitModel, tol: float = RESIDUAL_TOL) -> ValidationReport:
    report = validate_polarization(model.Q)
    report.title = f"Validación de la órbita {model.name}"
    n = model.weight
    Q = model.Q.matrix
    for i, N in enumerate(model.N):
        scale = max(np.linalg.norm(N), 1.0)
        power = np.linalg.matrix_power(N, n + 1)
        report.checks.append(make_check(
            "nilpotencia", "‖N^{n+1}‖ = 0", np.linalg.norm(power) / scale ** (n + 1),
            NILPOTENCY_TOL, point=f"N_{i + 1}"))
        invariance = np.linalg.norm(N.T @ Q + Q @ N) / (np.linalg.norm(Q) * scale)
        report.checks.append(make_check(
            "invariancia", "Q(Nx, y) + Q(x, Ny) = 0", invariance, tol, point=f"N_{i + 1}"))
        for j in range(i + 1, model.m):
            M = model.N[j]
            comm = np.linalg.norm(N @ M - M @ N) / (scale * max(np.linalg.norm(M), 1.0))
            report.checks.append(make_check(
                "conmutacion", "[N_i, N_j] = 0", comm, tol, point=f"N_{i + 1},N_{j + 1}"))
    return report


def orbit_jet(model: NilpotentOrbitModel, z0, order: int) -> JetSection:
    _check_order(order)
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    if z0.shape != (model.m,):
        raise InputError("Número de coordenadas incompatible con el modelo", m=model.m,
                         recibido=int(z0.size))
    if np.any(z0 == 0):
        raise DomainError("Componente nula del punto: fuera del dominio de la órbita", z=str(z0))
    if np.any(np.abs(z0) >= 1):
        raise DomainError("Se requiere 0 < |z_i| < 1", z=str(z0))
    flags = _branch_flags(z0)

    basis = monomial_basis(model.m, order)
    d = model.dim
    zvars = [TaylorJet.variable(basis, i, z0[i]) for i in range(model.m)]
    X = TaylorJet.constant(basis, np.zeros((d, d), dtype=complex))
    for zi, N in zip(zvars, model.N):
        zeta = zi.log() * (-1j / (2 * math.pi))
        X = X + zeta * N

    eye = np.eye(d, dtype=complex)
    E = TaylorJet.constant(basis, eye)
    term = TaylorJet.constant(basis, eye)
    for k in range(1, model.m * model.weight + 1):
        term = jets.matmul(term, X) * (1.0 / k)
        if not np.any(term.coeffs):
            break
        E = E + term

    Ajet = TaylorJet.constant(basis, np.zeros(d, dtype=complex))
    for a, vec in model.A.items():
        mono = TaylorJet.constant(basis, 1.0)
        for zi, power in zip(zvars, a):
            if power:
                mono = mono * (zi ** power)
        Ajet = Ajet + mono * vec
    omega = jets.einsum("ab,b->a", E, Ajet)
    return JetSection(point=z0, order=order, coeffs=omega.coeffs, flags=flags)


def product_orbit(a: NilpotentOrbitModel, b: NilpotentOrbitModel, name: str = "") -> NilpotentOrbitModel:
    """Producto tensorial de dos órbitas: m = m_a + m_b, peso n_a + n_b."""
    Ia = np.eye(a.dim)
    Ib = np.eye(b.dim)
    Ns = tuple(np.kron(N, Ib) for N in a.N) + tuple(np.kron(Ia, N) for N in b.N)
    A = {}
    for ka, va in a.A.items():
        for kb, vb in b.A.items():
            A[ka + kb] = np.kron(va, vb)
    Q = PolarizationForm(np.kron(a.Q.matrix, b.Q.matrix), a.weight + b.weight)
    return NilpotentOrbitModel(weight=a.weight + b.weight, Q=Q, N=Ns, A=A,
                               name=name or f"{a.name}x{b.name}")


def shift_orbit(weight: int, name: str = "") -> NilpotentOrbitModel:
    """Órbita del desplazamiento N e_k = e_{k+1} con Q(e_i, e_{n−i}) = (−1)^i y A = e₀."""
    d = weight + 1
    N = np.diag(np.ones(weight), -1)
    Q = np.zeros((d, d))
    for i in range(d):
        Q[i, weight - i] = (-1) ** i
    e0 = np.zeros(d)
    e0[0] = 1.0
    return NilpotentOrbitModel(weight=weight, Q=PolarizationForm(Q, weight), N=(N,),
                               A={(0,): e0}, name=name or f"desplazamiento_{weight}")


# ======================================================================
# Familias de Picard–Fuchs
# ======================================================================
@dataclass(frozen=True, eq=False)
class PicardFuchsModel:
    """
    Operador Σ_j c_j(z) θ^j (θ = z d/dz) con c_j polinomios (coeficientes de
    menor a mayor grado), normalizado con c_d(0) = 1 en el punto MUM z = 0.
    `basis` es la matriz M con Ω = M·y, y_k = Σ_j (log z)^j/j!·g_{k−j}.
    """

    coeffs: Tuple[Tuple[complex, ...], ...]
    r_max: float
    basis: Optional[np.ndarray] = None
    Q: Optional[PolarizationForm] = None
    name: str = "picard_fuchs"
    _cache: Dict[str, object] = field(default_factory=dict, repr=False)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def __post_init__(self):
        polys = [np.asarray(c, dtype=complex) for c in self.coeffs]
        if len(polys) < 3:
            raise InputError("El operador necesita orden d ≥ 2")
        d = len(polys) - 1
        lead = polys[d][0] if polys[d].size else 0
        if lead == 0:
            raise InputError("c_d(0) = 0: el punto z = 0 no es regular singular normalizable")
        polys = [p / lead for p in polys]
        for j in range(d):
            if polys[j].size and abs(polys[j][0]) > 0:
                raise InputError("El punto z = 0 no es de monodromía máximamente unipotente",
                                 j=j, c_j0=str(polys[j][0]))
        if not self.r_max or self.r_max <= 0:
            raise InputError("r_max debe ser positivo", r_max=self.r_max)
        object.__setattr__(self, "coeffs", tuple(tuple(p) for p in polys))
        M = np.diag([TWO_PI_I ** (-k) for k in range(d)]) if self.basis is None else np.asarray(self.basis, dtype=complex)
        if M.shape != (d, d) or abs(np.linalg.det(M)) == 0:
            raise InputError("Matriz de base de periodos inválida", forma=list(M.shape))
        object.__setattr__(self, "basis", M)
        if self.Q is not None and self.Q.dim != d:
            raise InputError("Q incompatible con el orden del operador", d=d, dQ=self.Q.dim)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def weight(self) -> int:
        return self.order - 1

    @property
    def dim(self) -> int:
        return self.order

    @property
    def m(self) -> int:
        return 1

    def indicial_polys(self) -> List[np.ndarray]:
        """P_s(x) = Σ_j c_{j,s} x^j para cada potencia z^s."""
        smax = max(len(c) for c in self.coeffs) - 1
        out = []
        for s in range(smax + 1):
            out.append(np.array([c[s] if s < len(c) else 0 for c in self.coeffs], dtype=complex))
        return out

    def frobenius(self, n_terms: int) -> np.ndarray:
        """b[N, t] = a_{N,t}·r_max^N (coeficientes de Frobenius escalados)."""
        with self._lock:
            return self._frobenius_locked(n_terms)

    def _frobenius_locked(self, n_terms: int) -> np.ndarray:
        table = self._cache.get("frobenius")
        if table is not None and table.shape[0] >= n_terms:
            return table[:n_terms]
        d = self.order
        P = self.indicial_polys()
        basis = monomial_basis(1, d - 1)
        eps = TaylorJet.variable(basis, 0)
        rho = self.r_max
        stored = list(self._cache.get("frobenius_jets", []))
        if not stored:
            stored = [TaylorJet.constant(basis, 1.0)]
        for N in range(len(stored), n_terms):
            acc = TaylorJet.constant(basis, 0.0)
            for s in range(1, min(N, len(P) - 1) + 1):
                if not np.any(P[s]):
                    continue
                acc = acc + jets.polyval(P[s], eps + (N - s)) * stored[N - s] * (rho ** s)
            P0 = jets.polyval(P[0], eps + N)
            stored.append(-(acc / P0))
        table = np.array([j.coeffs for j in stored])
        self._cache["frobenius_jets"] = stored
        self._cache["frobenius"] = table
        return table[:n_terms]


def monodromy_logarithms(model) -> Tuple[np.ndarray, ...]:
    if isinstance(model, NilpotentOrbitModel):
        return model.N
    d = model.order
    S = np.diag(np.ones(d - 1), -1)
    M = model.basis
    return (M @ (TWO_PI_I * S) @ np.linalg.inv(M),)


def _pf_terms(model: PicardFuchsModel, x0: float, order: int) -> Tuple[int, float]:
    """Número de términos K y cota de cola relativa para |z₀|/r_max = x0."""
    tol = PF_TAIL_TOL
    K = max(PF_MIN_TERMS, int(math.ceil(math.log(tol) / math.log(x0))) + order + 10) if x0 > 0 else PF_MIN_TERMS
    K = min(K, PF_MAX_TERMS)
    while True:
        b = model.frobenius(K + 1)
        mags = np.max(np.abs(b), axis=1)
        Ns = np.arange(K + 1)
        terms = mags * comb(Ns, order) * x0 ** np.maximum(Ns - order, 0)
        total = float(np.sum(terms[:K])) or 1.0
        ratio = x0 * max(1.0, mags[K] / mags[K - 1] if mags[K - 1] else 1.0) * (K + 1) / max(K + 1 - order, 1)
        tail = terms[K] / (1.0 - ratio) if ratio < 1 else float("inf")
        rel = tail / total
        if rel < tol:
            return K, rel
        if K >= PF_MAX_TERMS:
            return K, rel
        K = min(2 * K, PF_MAX_TERMS)


def _pf_section(model: PicardFuchsModel, z0: complex, order: int) -> JetSection:
    z0 = complex(np.asarray(z0).reshape(-1)[0])
    if z0 == 0:
        raise DomainError("z₀ = 0 es el punto MUM: fuera del dominio de la serie")
    x0 = abs(z0) / model.r_max
    if x0 >= PF_RADIUS_FRACTION:
        K, rel = _pf_terms(model, min(x0, 0.999), order)
        raise ConvergenceError(
            f"|z₀| ≥ {PF_RADIUS_FRACTION}·r_max: la serie no alcanza la tolerancia",
            z=str(z0), r_max=model.r_max, cola_estimada=rel, terminos=K)
    flags = _branch_flags(np.array([z0]))
    K, rel = _pf_terms(model, x0, order)
    if rel >= PF_TAIL_TOL:
        raise ConvergenceError("Cola de la serie por encima de la tolerancia",
                               z=str(z0), cola_estimada=rel, terminos=K)
    logger.debug(f"Serie de Frobenius en z={z0}: K={K}, cola relativa {rel:.1e}")

    d = model.order
    b = model.frobenius(K)
    rho = model.r_max
    xz = z0 / rho
    Ns = np.arange(K)
    G = np.zeros((order + 1, d), dtype=complex)
    for s in range(order + 1):
        weights = np.where(Ns >= s, comb(Ns, s) * xz ** np.maximum(Ns - s, 0), 0.0)
        G[s] = (weights @ b) * rho ** (-s)

    basis = monomial_basis(1, order)
    gjets = [TaylorJet(basis, G[:, t]) for t in range(d)]
    if order == 0:
        L = TaylorJet.constant(basis, np.log(z0))
    else:
        L = TaylorJet.variable(basis, 0, z0).log()
    Lpow = [TaylorJet.constant(basis, 1.0)]
    for j in range(1, d):
        Lpow.append(Lpow[-1] * L * (1.0 / j))
    ys = []
    for k in range(d):
        acc = TaylorJet.constant(basis, 0.0)
        for j in range(k + 1):
            acc = acc + Lpow[j] * gjets[k - j]
        ys.append(acc)
    omega = jets.stack(ys).linear(model.basis)
    return JetSection(point=np.array([z0]), order=order, coeffs=omega.coeffs, flags=flags)


def pf_jet(model: PicardFuchsModel, z0, order: int) -> JetSection:
    _check_order(order)
    return _pf_section(model, z0, order)


def ode_residual(model: PicardFuchsModel, z0) -> float:
    """‖Σ c_j(z₀) θ^jΩ‖ relativo a Σ_j ‖c_j(z₀) θ^jΩ‖."""
    d = model.order
    section = _pf_section(model, z0, d)
    basis = monomial_basis(1, d)
    omega = TaylorJet(basis, section.coeffs)
    z = TaylorJet.variable(basis, 0, section.point[0])
    z0c = section.point[0]
    total = np.zeros(model.dim, dtype=complex)
    scale = 0.0
    theta = omega
    for j in range(d + 1):
        cj = np.polynomial.polynomial.polyval(z0c, np.array(model.coeffs[j]))
        contrib = cj * theta.value()
        total = total + contrib
        scale += float(np.linalg.norm(contrib))
        if j < d:
            theta = z * theta.deriv(0)
    return float(np.linalg.norm(total) / scale) if scale else 0.0


def _divided_product(X: np.ndarray, Y: np.ndarray, nmax: int) -> np.ndarray:
    """Producto de series Σ X[i,N] ℓ^i/i! x^N truncado en N ≤ nmax."""
    I = X.shape[0] + Y.shape[0] - 1
    out = np.zeros((I, nmax + 1), dtype=complex)
    for i in range(X.shape[0]):
        for j in range(Y.shape[0]):
            if not (np.any(X[i]) and np.any(Y[j])):
                continue
            conv = np.convolve(X[i], Y[j])[: nmax + 1]
            out[i + j, : conv.size] += comb(i + j, i) * conv
    return out


def derive_flat_pairing(model: PicardFuchsModel, rank_tol: float = RANK_TOL) -> PolarizationForm:
    """
    Q plana con paridad (−1)^n y Q(Ω, θ^kΩ) ≡ 0 para k < n, impuesta sobre los
    coeficientes de las series hasta orden 2d, normalizada con (Ω,Ω̄) > 0 en
    z = 0.1·r_max.
    """
    d = model.order
    n = model.weight
    nmax = PF_PAIRING_ORDER_FACTOR * d
    b = model.frobenius(nmax + 1)
    c = math.log(model.r_max)

    # y_k en la base ℓ^i/i!, ℓ = log(z/r_max)
    Y = np.zeros((d, d, nmax + 1), dtype=complex)
    for k in range(d):
        for i in range(k + 1):
            for j in range(i, k + 1):
                Y[k, i] += c ** (j - i) / math.factorial(j - i) * b[:, k - j]

    def theta(S: np.ndarray) -> np.ndarray:
        out = S * np.arange(nmax + 1)[None, :]
        out[:-1] += S[1:]
        return out

    thetas = [Y.copy()]
    for _ in range(1, n):
        thetas.append(np.array([theta(Yk) for Yk in thetas[-1]]))

    rows = []
    for k in range(n):
        blocks = {}
        for a in range(d):
            for bb in range(d):
                blocks[(a, bb)] = _divided_product(Y[a], thetas[k][bb], nmax).ravel()
        size = len(next(iter(blocks.values())))
        for idx in range(size):
            row = np.array([blocks[(a, bb)][idx] for a in range(d) for bb in range(d)])
            rows.append(row)
    sign = (-1) ** n
    for a in range(d):
        for bb in range(a, d):
            row = np.zeros(d * d, dtype=complex)
            row[a * d + bb] += 1.0
            row[bb * d + a] -= sign
            rows.append(row)
    A = np.array(rows)
    scale = np.max(np.abs(A), axis=1)
    A = A[scale > 0] / scale[scale > 0, None]
    null = linalg.null_space(A, rcond=rank_tol)
    if null.shape[1] != 1:
        raise AmbiguityError("La polarización plana no es única", nulidad=int(null.shape[1]))
    Qy = null[:, 0].reshape(d, d)

    Minv = np.linalg.inv(model.basis)
    Qomega = Minv.T @ Qy @ Minv
    pivot = Qomega.flat[np.argmax(np.abs(Qomega))]
    Qomega = Qomega / pivot
    if np.max(np.abs(Qomega.imag)) < RESIDUAL_TOL:
        Qomega = Qomega.real.astype(complex)
    else:
        logger.warning(f"{model.name}: Q derivada no es real en la base de periodos; "
                       "la estructura real de la base puede no ser la correcta")
    Q = PolarizationForm(Qomega, n)
    z_ref = PF_REFERENCE_FRACTION * model.r_max
    omega = _pf_section(model, z_ref, 0).value()
    P = Q.pairing(omega, np.conj(omega))
    if P.real < 0:
        Q = Q.scaled(-1.0)
    logger.info(f"{model.name}: polarización plana derivada (d={d}, n={n})")
    return Q


# ======================================================================
# Despacho común
# ======================================================================
Model = Union[NilpotentOrbitModel, PicardFuchsModel]


def polarization_of(model: Model) -> PolarizationForm:
    if isinstance(model, NilpotentOrbitModel):
        return model.Q
    if model.Q is not None:
        return model.Q
    with model._lock:
        cached = model._cache.get("Q")
        if cached is None:
            cached = derive_flat_pairing(model)
            model._cache["Q"] = cached
    return cached


def model_jet(model: Model, z0, order: int) -> JetSection:
    if isinstance(model, NilpotentOrbitModel):
        return orbit_jet(model, z0, order)
    return pf_jet(model, z0, order)


def model_m(model: Model) -> int:
    return model.m


def gauge_transform(section: JetSection, polynomial: Dict[Tuple[int, ...], complex]) -> JetSection:
    """Ω → fΩ con f = Σ f_a z^a polinomio holomorfo sin ceros en el punto."""
    basis = section.basis
    zvars = [TaylorJet.variable(basis, i, section.point[i]) for i in range(section.m)]
    f = TaylorJet.constant(basis, 0.0)
    for a, coef in polynomial.items():
        mono = TaylorJet.constant(basis, complex(coef))
        for zi, power in zip(zvars, a):
            if power:
                mono = mono * (zi ** int(power))
        f = f + mono
    if f.value() == 0:
        raise DomainError("El factor de gauge se anula en el punto")
    omega = f * TaylorJet(basis, section.coeffs)
    return JetSection(point=section.point, order=section.order, coeffs=omega.coeffs, flags=section.flags)


# ======================================================================
# Descomposición de Hodge en un punto
# ======================================================================
def _independent_columns(B: np.ndarray, rank_tol: float) -> np.ndarray:
    if B.shape[1] == 0:
        return np.zeros(0, dtype=int)
    norms = np.linalg.norm(B, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    _, R, piv = linalg.qr(B / safe, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0:
        return np.zeros(0, dtype=int)
    rank = int(np.sum(diag > rank_tol * diag[0]))
    return np.sort(piv[:rank])


def decomposition_at(section: JetSection, Q: PolarizationForm, rank_tol: float = RANK_TOL,
                     tol: float = RESIDUAL_TOL, check: bool = True) -> HodgeDecompositionAt:
    n = Q.weight
    d = Q.dim
    m = section.m
    if section.dim != d:
        raise InputError("Dimensión de Ω incompatible con Q", d=d, dOmega=section.dim)
    p_min = (n + 1) // 2
    section.require(n - p_min, "para la filtración de Hodge")

    bases: Dict[int, np.ndarray] = {}
    prev = np.zeros((d, 0), dtype=complex)
    for p in range(n, p_min - 1, -1):
        k = n - p
        cand = np.column_stack([vec for _, vec in section.derivatives_of_degree(k)])
        full = np.hstack([prev, cand])
        rank = len(_independent_columns(full, rank_tol))
        expected_min = prev.shape[1] + 1
        if p == n - 1 and rank != 1 + m:
            raise DegeneracyError(f"Caída de rango en F^{p}: rango {rank}, esperado {1 + m}",
                                  level=p, rango=rank)
        if rank < expected_min:
            raise DegeneracyError(f"Caída de rango en F^{p}: rango {rank}", level=p, rango=rank)
        if prev.shape[1]:
            S = prev.T @ Q.matrix @ np.conj(prev)
            R = cand.T @ Q.matrix @ np.conj(prev)
            coef = np.linalg.solve(S.T, R.T)
            cand = cand - prev @ coef
        cols = _independent_columns(cand, rank_tol)
        if len(cols) != rank - prev.shape[1]:
            raise DegeneracyError(f"Complemento de F^{p + 1} en F^{p} mal condicionado", level=p)
        bases[p] = cand[:, cols]
        prev = np.hstack([prev, bases[p]])
    for p in range(p_min - 1, -1, -1):
        bases[p] = np.conj(bases[n - p])

    total = sum(B.shape[1] for B in bases.values())
    if total != d:
        dims = [bases[p].shape[1] for p in range(n, -1, -1)]
        raise DegeneracyError(f"Las dimensiones de Hodge {dims} no suman d={d}", level=p_min, dims=dims)
    dec = HodgeDecompositionAt(point=section.point, weight=n, bases=bases, flags=section.flags)
    if check:
        report = hodge_riemann_report(dec, Q, tol)
        if not report.passed:
            raise HodgeRiemannError("La descomposición no satisface Hodge–Riemann",
                                    fallos=[c.name for c in report.failures()], dims=dec.dims)
    return dec


# ======================================================================
# Axiomas de la geometría de Weil–Petersson
# ======================================================================
def transversality_residual(section: JetSection, dec: HodgeDecompositionAt, Q: PolarizationForm) -> float:
    """Máxima componente relativa de ∂^aΩ (|a| = k) en bloques H^{r} con r < n − k."""
    n = Q.weight
    worst = 0.0
    for k in range(1, min(section.order, n) + 1):
        for _, vec in section.derivatives_of_degree(k):
            nrm = np.linalg.norm(vec)
            if nrm == 0:
                continue
            stray = sum((project_pq(vec, dec, Q, r) for r in range(0, n - k)),
                        np.zeros_like(vec))
            worst = max(worst, float(np.linalg.norm(stray) / nrm))
    return worst


def wp_geometry_checklist(model: Model, points: Sequence, tol: float = RESIDUAL_TOL) -> ValidationReport:
    from core.wp_geometry import wp_metric

    Q = polarization_of(model)
    n = Q.weight
    report = ValidationReport(title=f"Axiomas de la geometría de Weil–Petersson: {getattr(model, 'name', '')}")
    report.checks.append(skipped_check(
        "axioma_3", "cuasi-proyectividad", "no verificable automáticamente: fuera de alcance"))
    for i, N in enumerate(monodromy_logarithms(model)):
        scale = max(np.linalg.norm(N), 1.0)
        norm = float(np.linalg.norm(np.linalg.matrix_power(N, n + 1)))
        report.checks.append(make_check(
            "axioma_4", "‖N^{n+1}‖ = 0 (cuasi-unipotencia)", norm / scale ** (n + 1), NILPOTENCY_TOL,
            point=f"N_{i + 1}", note=f"‖N^{{n+1}}‖ = {norm:.3e}"))

    order = min(MAX_JET_ORDER, max(n, 2))
    for z in points:
        label = str(np.atleast_1d(np.asarray(z, dtype=complex)).tolist())
        try:
            section = model_jet(model, z, order)
            dec = decomposition_at(section, Q, tol=tol)
            report.checks.append(make_check(
                "axioma_1", "∂(F^p) ⊂ F^{p−1}", transversality_residual(section, dec, Q), tol, point=label))
        except HodgeError as exc:
            report.checks.append(make_check("axioma_1", "∂(F^p) ⊂ F^{p−1}", float("inf"), tol,
                                            point=label, note=str(exc)))
        try:
            g = wp_metric(model_jet(model, z, 2), Q)
            report.checks.append(make_check(
                "axioma_2", "g_WP > 0", g.min_eigenvalue, 0.0, passed=g.min_eigenvalue > 0, point=label))
        except HodgeError as exc:
            report.checks.append(make_check("axioma_2", "g_WP > 0", float("nan"), 0.0,
                                            passed=False, point=label, note=str(exc)))
    if not report.passed:
        logger.warning(f"Lista de axiomas con fallos: {sorted({c.name for c in report.failures()})}")
    return report
