# core/dim1_asymptotics.py
"""
Análisis en dimensión uno cerca de un punto frontera z = 0: cadena
F₁₁₁/F₁₁₁₁, curvatura escalar de la métrica de Hodge, polinomio de pesos de
la órbita nilpotente, asintótica dominante de Weil–Petersson, test de
completitud, cotas de truncación y clasificación de casos.

Desarrollo de frontera: Ω = Σ A_{k,l} (z/δ)^k (log 1/z)^l, con δ el radio de
convergencia almacenado (δ = 1 en las órbitas) y l ≤ n.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import signal

from core.constants import (
    ANGULAR_SAMPLES,
    IDENTITY_TOL,
    RAY_POINTS,
    RESIDUAL_TOL,
    TREND_FACTOR,
    WP_LEADING_RATE,
    WP_LEADING_TOL,
    WP_LEADING_U,
)
from core.errors import DomainError, HodgeError, InputError
from core.hodge_core import PolarizationForm
from core.jets import TaylorJet, monomial_basis
from core.logger import get_logger
from core.reports import ValidationReport, make_check, skipped_check
from core.vhs_models import (
    JetSection,
    NilpotentOrbitModel,
    PicardFuchsModel,
    decomposition_at,
    model_jet,
    monodromy_logarithms,
    polarization_of,
)
from core.wp_geometry import covariant_frame, f_tensor, kahler_jets, wp_metric

logger = get_logger(__name__)

Model = Union[NilpotentOrbitModel, PicardFuchsModel]


# ======================================================================
# Cadena de Yukawa en dimensión uno
# ======================================================================
@dataclass(frozen=True)
class YukawaChain1D:
    z: complex
    kahler_potential: float
    lam: float
    gamma: complex
    K1: complex
    F111: complex
    F1111: complex
    A: float
    h: float
    R_tilde: float
    rho: float


def _require_threefold_curve(section: JetSection, Q: PolarizationForm) -> None:
    if Q.weight != 3 or section.m != 1:
        raise DomainError("La cadena F₁₁₁/F₁₁₁₁ requiere n = 3 y m = 1", n=Q.weight, m=section.m)


def yukawa_chain(section: JetSection, Q: PolarizationForm) -> YukawaChain1D:
    _require_threefold_curve(section, Q)
    section.require(4, "para F₁₁₁₁")
    kj = kahler_jets(section, Q)
    frame = covariant_frame(section, Q, kj=kj)
    lam = float(kj.g.value()[0, 0].real)
    P = float(kj.potential.value().real)
    omega = section.value()
    d1, d3, d4 = (section.derivative((k,)) for k in (1, 3, 4))
    F111 = complex(Q.pairing(omega, d3))
    dF111 = complex(Q.pairing(d1, d3) + Q.pairing(omega, d4))
    gamma = complex(frame.gamma[0, 0, 0])
    K1 = complex(frame.K[0])
    F1111 = dF111 - 3 * gamma * F111 + 2 * K1 * F111
    e2K = 1.0 / P ** 2
    A = e2K * abs(F111) ** 2 / lam ** 2
    h = 2 * lam + A
    R = 4 * lam ** 2 - 4 * lam * A + 2 * A ** 2 + 2 * e2K * abs(F1111) ** 2 / (lam * h)
    return YukawaChain1D(
        z=complex(section.point[0]), kahler_potential=-math.log(P), lam=lam, gamma=gamma, K1=K1,
        F111=F111, F1111=F1111, A=A, h=h, R_tilde=R, rho=-R / h ** 2,
    )


def two_fraction_form(chain: YukawaChain1D) -> Dict[str, float]:
    """ρ = −(4 − 4x + 2x²)/(2+x)² − 2y/(2+x)³ con x = e^{2K}λ^{−3}|F₁₁₁|², y = e^{2K}λ^{−4}|F₁₁₁₁|²."""
    e2K = math.exp(2 * chain.kahler_potential)
    x = e2K * abs(chain.F111) ** 2 / chain.lam ** 3
    y = e2K * abs(chain.F1111) ** 2 / chain.lam ** 4
    first = (4 - 4 * x + 2 * x ** 2) / (2 + x) ** 2
    second = 2 * y / (2 + x) ** 3
    return {"x": x, "y": y, "first": first, "second": second, "rho": -first - second}


def first_fraction_bound(x_grid: Sequence[float]) -> ValidationReport:
    """|(4 − 4x + 2x²)/(2+x)²| ≤ 2 para x ≥ 0."""
    x = np.asarray(x_grid, dtype=float)
    if np.any(x < 0):
        raise InputError("La malla de x debe ser no negativa")
    values = np.abs((4 - 4 * x + 2 * x ** 2) / (2 + x) ** 2)
    report = ValidationReport(title="Acotación de la primera fracción")
    report.checks.append(make_check("primera_fraccion", "|(4 − 4x + 2x²)/(2+x)²| ≤ 2",
                                    max(0.0, float(np.max(values)) - 2.0), 0.0,
                                    note=f"máximo {float(np.max(values)):.12g}"))
    report.data["max"] = float(np.max(values))
    return report


# ======================================================================
# Modelo de frontera
# ======================================================================
@dataclass(frozen=True, eq=False)
class BoundaryModel1D:
    weight: int
    N: np.ndarray
    Q: PolarizationForm
    coeffs: Dict[Tuple[int, int], np.ndarray]
    delta: float = 1.0
    name: str = ""

    def __post_init__(self):
        for (k, l), vec in self.coeffs.items():
            if l > self.weight or k < 0 or l < 0:
                raise InputError("Índice (k, l) fuera de rango", k=k, l=l, n=self.weight)
        if not np.any(self.A0):
            raise InputError("A₀ = A_{0,0} debe ser no nulo")

    @property
    def A0(self) -> np.ndarray:
        return self.coeffs.get((0, 0), np.zeros(self.Q.dim, dtype=complex))

    @property
    def max_k(self) -> int:
        return max(k for k, _ in self.coeffs)

    def degree(self, k: int, l: int) -> float:
        return k - l / (self.weight + 1)


def boundary_model(model: Model, n_terms: int = 60) -> BoundaryModel1D:
    """A_{k,l} de una órbita de una variable o de un modelo de Picard–Fuchs."""
    Q = polarization_of(model)
    n = Q.weight
    if isinstance(model, NilpotentOrbitModel):
        if model.m != 1:
            raise DomainError("El modelo de frontera requiere m = 1", m=model.m)
        N = model.N[0]
        coeffs = {}
        for (k,), Ak in model.A.items():
            vec = Ak.copy()
            for l in range(n + 1):
                if np.any(vec):
                    coeffs[(k, l)] = (1j / (2 * math.pi)) ** l / math.factorial(l) * vec
                vec = N @ vec
        return BoundaryModel1D(weight=n, N=N, Q=Q, coeffs=coeffs, delta=1.0, name=model.name)
    d = model.order
    b = model.frobenius(n_terms)
    M = model.basis
    coeffs = {}
    for k in range(n_terms):
        for l in range(d):
            y = np.zeros(d, dtype=complex)
            for t in range(l, d):
                y[t] = (-1) ** l / math.factorial(l) * b[k, t - l]
            if np.any(y):
                coeffs[(k, l)] = M @ y
    return BoundaryModel1D(weight=n, N=monodromy_logarithms(model)[0], Q=Q, coeffs=coeffs,
                           delta=model.r_max, name=model.name)


def _as_boundary(model) -> BoundaryModel1D:
    return model if isinstance(model, BoundaryModel1D) else boundary_model(model)


# ======================================================================
# Polinomio de pesos y asintótica dominante
# ======================================================================
def weight_polynomial(model) -> np.ndarray:
    """Coeficientes reales (grado creciente en u = log 1/r) de (e^{ζN}A₀, conj e^{ζN}A₀) sobre el rayo real."""
    bm = _as_boundary(model)
    n = bm.weight
    A0l = [bm.coeffs.get((0, l), np.zeros(bm.Q.dim, dtype=complex)) for l in range(n + 1)]
    coeffs = np.zeros(2 * n + 1)
    for a in range(n + 1):
        for b in range(n + 1):
            coeffs[a + b] += complex(bm.Q.pairing(A0l[a], np.conj(A0l[b]))).real
    scale = np.max(np.abs(coeffs)) or 1.0
    coeffs[np.abs(coeffs) < IDENTITY_TOL * scale] = 0.0
    top = np.nonzero(coeffs)[0]
    return coeffs[: (top[-1] + 1 if top.size else 1)]


def weight_degree(model) -> int:
    return len(weight_polynomial(model)) - 1


def pairing_moments(model) -> List[complex]:
    """(N^lA₀, Ā₀) para l = 1..n."""
    bm = _as_boundary(model)
    A0 = bm.A0
    out, vec = [], A0
    for _ in range(bm.weight):
        vec = bm.N @ vec
        out.append(complex(bm.Q.pairing(vec, np.conj(A0))))
    return out


def completeness_test(model, tol: float = RESIDUAL_TOL) -> Tuple[bool, ValidationReport]:
    bm = _as_boundary(model)
    ratio = float(np.linalg.norm(bm.N @ bm.A0) / np.linalg.norm(bm.A0))
    complete = ratio > tol
    report = ValidationReport(title="Completitud en el punto frontera")
    report.checks.append(make_check("NA0", "‖NA₀‖ > tol·‖A₀‖", ratio, tol, passed=complete,
                                    note="completo" if complete else "NA₀ = 0"))
    report.data["NA0_ratio"] = ratio
    return complete, report


def ray_point(r: float, angle: float = 0.0) -> complex:
    return complex(r * np.exp(1j * angle))


def wp_leading(model: Model, u_grid: Sequence[float] = WP_LEADING_U,
               tol: Optional[float] = None) -> Tuple[int, ValidationReport]:
    """
    l del polinomio de pesos y comprobación de λ·r²u² → l/4 sobre el rayo real.

    Sin `tol` explícita: WP_LEADING_TOL si el polinomio de pesos es un monomio
    (potencial exacto), WP_LEADING_RATE/u_max en otro caso.
    """
    complete, _ = completeness_test(model)
    if not complete:
        raise DomainError("NA₀ = 0: caso 2, usar boundary_classifier")
    poly = weight_polynomial(model)
    l = len(poly) - 1
    exact = bool(np.count_nonzero(poly) == 1)
    Q = polarization_of(model)
    report = ValidationReport(title="Asintótica dominante de Weil–Petersson")
    values = []
    for u in u_grid:
        r = math.exp(-u)
        g = wp_metric(model_jet(model, r, 2), Q)
        values.append(g.scalar() * r ** 2 * u ** 2)
    u_max = float(max(u_grid))
    deviation = abs(values[-1] - l / 4)
    if tol is None:
        tol = WP_LEADING_TOL if exact else WP_LEADING_RATE / u_max
    report.checks.append(make_check("limite", "λ·r²(log 1/r)² → l/4", deviation, tol,
                                    note=f"l = {l}, " + ("potencial exacto" if exact else "desviación O(1/u)")))
    report.data.update({"exact_potential": exact, "l": l, "u": list(map(float, u_grid)), "values": values})
    return l, report


# ======================================================================
# Cota de truncación
# ======================================================================
@dataclass(frozen=True)
class TruncationEstimate:
    bound: float
    empirical: float
    k0: int
    l0: int
    constant: float

    @property
    def dominated(self) -> bool:
        return self.empirical <= self.bound


def _selection(bm: BoundaryModel1D, mu: float) -> Tuple[int, int]:
    n = bm.weight
    k0 = int(math.floor(mu)) + 1 if mu >= 0 else 0
    while True:
        ls = [l for l in range(n + 1) if bm.degree(k0, l) > mu]
        if ls:
            return k0, max(ls)
        k0 += 1


def truncation_bound(model, mu: float, s: int, r: float, max_terms: int = 400) -> TruncationEstimate:
    bm = _as_boundary(model)
    delta = bm.delta
    if not 0 < r < delta / 4:
        raise DomainError(f"Se requiere 0 < r < δ/4 = {delta / 4:.6g}", r=r, delta=delta)
    if s < 0:
        raise InputError("El orden de derivación s debe ser ≥ 0", s=s)
    n = bm.weight
    u = math.log(1.0 / r)
    k0, l0 = _selection(bm, mu)
    C = 0.0
    for k in range(k0, k0 + max_terms):
        ls = range(l0 + 1) if k == k0 else range(n + 1)
        term = sum((delta / 4) ** (-k - 1) * (s + 1) * (2 * (k + l)) ** s
                   * r ** (k - k0) * u ** (l - l0) for l in ls)
        C += term
        if term < 1e-17 * C:
            break
    bound = C * r ** (k0 - s) * u ** l0

    basis = monomial_basis(1, s)
    rv = TaylorJet.variable(basis, 0, r)
    uj = -rv.log()
    x = rv * (1.0 / delta)
    tail = TaylorJet.constant(basis, np.zeros(bm.Q.dim, dtype=complex))
    for (k, l), vec in bm.coeffs.items():
        if bm.degree(k, l) > mu:
            tail = tail + (x ** k) * (uj ** l) * vec
    empirical = float(np.linalg.norm(tail.coefficient((s,))) * math.factorial(s))
    logger.debug(f"Truncación μ={mu}, s={s}, r={r}: (k0,l0)=({k0},{l0}), cota {bound:.3e}, cola {empirical:.3e}")
    return TruncationEstimate(bound=bound, empirical=empirical, k0=k0, l0=l0, constant=C)


# ======================================================================
# Clasificación de casos
# ======================================================================
@dataclass(frozen=True)
class BoundaryClassification:
    case: int
    k: Optional[int] = None
    l: int = 0
    degenerate: bool = False
    status: str = "ok"
    residuals: Dict[str, float] = field(default_factory=dict)
    note: str = ""


Series2D = Dict[Tuple[int, int], np.ndarray]


def _series_mul(a: Series2D, b: Series2D, max_degree: int) -> Series2D:
    out: Series2D = {}
    for (j1, k1), c1 in a.items():
        for (j2, k2), c2 in b.items():
            if j1 + k1 + j2 + k2 > max_degree:
                continue
            key = (j1 + j2, k1 + k2)
            prod = signal.convolve2d(c1, c2)
            if key in out:
                shape = np.maximum(out[key].shape, prod.shape)
                acc = np.zeros(shape, dtype=complex)
                acc[: out[key].shape[0], : out[key].shape[1]] += out[key]
                acc[: prod.shape[0], : prod.shape[1]] += prod
                out[key] = acc
            else:
                out[key] = prod
    return out


def potential_expansion(bm: BoundaryModel1D, max_degree: int) -> Series2D:
    """(Ω,Ω̄) = Σ x^j x̄^k C_{jk}(ζ, ζ̄) con C_{jk}[a, b] coeficiente de ζ^a ζ̄^b."""
    n = bm.weight
    by_k: Dict[int, Dict[int, np.ndarray]] = {}
    for (k, l), vec in bm.coeffs.items():
        if k <= max_degree:
            by_k.setdefault(k, {})[l] = vec * (-2j * math.pi) ** l
    out: Series2D = {}
    for j, left in by_k.items():
        for k, right in by_k.items():
            if j + k > max_degree:
                continue
            C = np.zeros((n + 1, n + 1), dtype=complex)
            for a, va in left.items():
                for b, vb in right.items():
                    C[a, b] += complex(bm.Q.pairing(va, np.conj(vb)))
            if np.any(np.abs(C) > 0):
                out[(j, k)] = C
    return out


def _top_u_coefficient(C: np.ndarray, l: int) -> complex:
    """Coeficiente de u^l de C(ζ, ζ̄) con ζ = (i/2π)(u − iθ); no depende de θ."""
    total = 0.0 + 0.0j
    for a in range(C.shape[0]):
        b = l - a
        if 0 <= b < C.shape[1]:
            total += C[a, b] * (1j / (2 * math.pi)) ** a * (-1j / (2 * math.pi)) ** b
    return total


def boundary_classifier(model, max_degree: int = 6, tol: float = RESIDUAL_TOL) -> BoundaryClassification:
    bm = _as_boundary(model)
    NA0 = float(np.linalg.norm(bm.N @ bm.A0) / np.linalg.norm(bm.A0))
    if NA0 > tol:
        return BoundaryClassification(case=1, l=weight_degree(bm), note="NA₀ ≠ 0")

    series = potential_expansion(bm, max_degree)
    c0 = series.get((0, 0))
    if c0 is None or abs(c0[0, 0]) == 0 or np.any(np.abs(c0.ravel()[1:]) > tol * abs(c0[0, 0])):
        return BoundaryClassification(case=2, status="inconclusivo",
                                      note="el término constante de (Ω,Ω̄) depende de log(1/r)")
    base = c0[0, 0]
    X = {key: val / base for key, val in series.items() if key != (0, 0)}
    log_series: Series2D = {}
    power = dict(X)
    for p in range(1, max_degree + 1):
        for key, val in power.items():
            coef = val * ((-1) ** (p + 1) / p)
            if key in log_series:
                shape = np.maximum(log_series[key].shape, coef.shape)
                acc = np.zeros(shape, dtype=complex)
                acc[: log_series[key].shape[0], : log_series[key].shape[1]] += log_series[key]
                acc[: coef.shape[0], : coef.shape[1]] += coef
                log_series[key] = acc
            else:
                log_series[key] = coef
        power = _series_mul(power, X, max_degree)
        if not power:
            break

    scale = max((float(np.max(np.abs(v))) for v in log_series.values()), default=0.0) or 1.0
    pure = 0.0
    for (j, k), val in log_series.items():
        if j > 0 and k == 0:
            pure = max(pure, float(np.max(np.abs(val[:, 1:]), initial=0.0)) / scale)
        elif k > 0 and j == 0:
            pure = max(pure, float(np.max(np.abs(val[1:, :]), initial=0.0)) / scale)
    mixed = {key: val for key, val in log_series.items()
             if key[0] > 0 and key[1] > 0 and np.max(np.abs(val)) > tol * scale}
    if not mixed:
        flat = not np.any(np.abs(bm.N) > 0)
        return BoundaryClassification(case=2, k=None, l=0, degenerate=True,
                                      residuals={"puros_con_log": pure},
                                      note="N = 0" if flat else "sin término mixto hasta el grado analizado")
    D = min(j + k for j, k in mixed)
    leading = {key: val for key, val in mixed.items() if sum(key) == D}
    l = 0
    for val in leading.values():
        idx = np.argwhere(np.abs(val) > tol * scale)
        l = max(l, int(np.max(idx.sum(axis=1))))
    thetas = np.linspace(0.0, 2 * math.pi, ANGULAR_SAMPLES, endpoint=False)
    samples = np.array([
        sum(np.exp(1j * (j - k) * th) * _top_u_coefficient(val, l) for (j, k), val in leading.items())
        for th in thetas
    ])
    ref = float(np.max(np.abs(samples))) or 1.0
    rotational = float(np.max(np.abs(samples - samples.mean()))) / ref
    status = "ok" if D % 2 == 0 and rotational < tol else "inconclusivo"
    if status != "ok":
        logger.warning(f"Clasificación de caso 2 inconclusa: D={D}, residuo angular {rotational:.2e}")
    return BoundaryClassification(
        case=2, k=D // 2 if D % 2 == 0 else None, l=l, degenerate=l == 0, status=status,
        residuals={"rotacional": rotational, "puros_con_log": pure},
        note=f"grado mixto mínimo {D} ({'par' if D % 2 == 0 else 'impar'})",
    )


# ======================================================================
# Barridos sobre el rayo
# ======================================================================
def geometric_ray(r0: float, count: int = RAY_POINTS, factor: float = 0.5, angle: float = 0.0) -> List[complex]:
    return [ray_point(r0 * factor ** j, angle) for j in range(count)]


def trend_ratio(values: Sequence[float]) -> float:
    vals = np.abs(np.asarray(values, dtype=float))
    q = max(1, len(vals) // 4)
    first = float(np.max(vals[:q]))
    last = float(np.max(vals[-q:]))
    return last / first if first > 0 else (0.0 if last == 0 else float("inf"))


def _default_r0(model: Model) -> float:
    return 0.25 * (model.r_max if isinstance(model, PicardFuchsModel) else 1.0)


def _partial_rho(model: Model, z: complex, mu: float) -> float:
    from core.partial_hodge import ph_curvature, ph_metric, ph_scalar_curvature, third_order_chain

    Q = polarization_of(model)
    section = model_jet(model, z, 4)
    kj = kahler_jets(section, Q)
    g = wp_metric(section, Q, kj=kj)
    frame = covariant_frame(section, Q, kj=kj)
    F = f_tensor(frame, Q)
    h = ph_metric(g, F, mu)
    dec = decomposition_at(section, Q)
    chain = third_order_chain(section, frame, g, dec, Q, mu)
    return ph_scalar_curvature(ph_curvature(chain, frame, g, h, F, Q), h)


def curvature_boundedness_scan(model: Model, r0: Optional[float] = None, count: int = RAY_POINTS,
                               metric: str = "hodge", mu: Optional[float] = None) -> ValidationReport:
    report = ValidationReport(title="Acotación de la curvatura escalar cerca de la frontera")
    Q = polarization_of(model)
    m = model.m
    formula = "sup|ρ| último cuarto / primer cuarto < factor"
    if Q.weight != 3 or m != 1:
        reason = f"hipótesis no satisfecha: n = {Q.weight}, m = {m} (se requiere n = 3, m = 1)"
        report.checks.append(skipped_check("acotacion", formula, reason))
        report.data["refused"] = reason
        return report
    complete, _ = completeness_test(model)
    if not complete:
        cls = boundary_classifier(model)
        if cls.case != 2 or cls.l < 1:
            reason = "modelo no completo en z = 0 (NA₀ = 0 sin caso 2 con l ≥ 1)"
            report.checks.append(skipped_check("acotacion", formula, reason))
            report.data["refused"] = reason
            return report
    if metric not in ("hodge", "partial"):
        raise InputError(f"Métrica de barrido desconocida: {metric}")
    r0 = r0 or _default_r0(model)
    points = geometric_ray(r0, count)
    rhos = []
    for z in points:
        if metric == "hodge":
            rhos.append(yukawa_chain(model_jet(model, z, 4), Q).rho)
        else:
            rhos.append(_partial_rho(model, z, mu if mu is not None else m + 2.0))
    trend = trend_ratio(rhos)
    report.checks.append(make_check("acotacion", formula, trend, TREND_FACTOR,
                                    note=f"sup|ρ| = {max(abs(x) for x in rhos):.12g}"))
    if metric == "partial":
        report.notes.append("Barrido con ω_μ: resultado exploratorio, no garantizado")
    report.data.update({
        "metric": metric, "r": [abs(z) for z in points], "rho": rhos,
        "sup_abs_rho": max(abs(x) for x in rhos), "trend": trend,
    })
    return report


def case1_estimates(model: Model, r0: Optional[float] = None, count: int = RAY_POINTS) -> ValidationReport:
    """r³|F₁₁₁| y r⁴·u·|F₁₁₁₁| a lo largo del rayo, con el mismo test de tendencia."""
    Q = polarization_of(model)
    r0 = r0 or _default_r0(model)
    report = ValidationReport(title="Estimaciones del caso 1")
    f3, f4 = [], []
    for z in geometric_ray(r0, count):
        try:
            chain = yukawa_chain(model_jet(model, z, 4), Q)
        except HodgeError as exc:
            report.checks.append(make_check("punto", "cadena evaluable", float("nan"), 0.0,
                                            point=str(z), note=str(exc)))
            continue
        r = abs(z)
        u = math.log(1.0 / r)
        f3.append(r ** 3 * abs(chain.F111))
        f4.append(r ** 4 * u * abs(chain.F1111))
    if f3:
        # F₁₁₁₁ ≡ 0 en las órbitas puras: el ruido de redondeo cuenta como cero
        floor = IDENTITY_TOL * max(f3)
        f4 = [x if x > floor else 0.0 for x in f4]
        report.checks.append(make_check("F111", "r³|F₁₁₁| acotado", trend_ratio(f3), TREND_FACTOR))
        report.checks.append(make_check("F1111", "r⁴ log(1/r)|F₁₁₁₁| acotado", trend_ratio(f4), TREND_FACTOR))
    report.data.update({"r3_F111": f3, "r4u_F1111": f4})
    return report


def model_summary(model: Model) -> Dict[str, Any]:
    bm = _as_boundary(model)
    return {"weight_polynomial": weight_polynomial(bm).tolist(), "l": weight_degree(bm),
            "delta": bm.delta, "terms": len(bm.coeffs)}
