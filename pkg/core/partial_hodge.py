# core/partial_hodge.py
"""
Métrica de Hodge parcial ω_μ = μ·ω_WP + Ric(ω_WP), cadena de tercer orden
T = E + DDD, tensor de curvatura completo de ω_μ, acoplamiento de Yukawa de
cuatro-pliegues e informes de cotas de curvatura.

Mismas convenciones de índices que `core.wp_geometry`:
    T[k, a, i] = D_kD_aD_iΩ proyectado según H^{n−2,2} (E) y H^{n−3,3} (DDD).
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.constants import DEFAULT_SEED, PAIRS_PER_POINT, RESIDUAL_TOL
from core.errors import DegeneracyError, DomainError, ParameterError
from core.hodge_core import HodgeDecompositionAt, PolarizationForm, project_pq
from core.logger import get_logger
from core.reports import ValidationReport, make_check
from core.vhs_models import JetSection
from core.wp_geometry import (
    CovariantFrame,
    CurvatureField,
    MetricField,
    bisectional_minimum,
    holomorphic_sectional,
    metric_products,
    scalar_curvature,
    sectional_curvature,
    symmetry_residual,
)

logger = get_logger(__name__)


def default_mu(m: int, n: int) -> float:
    """μ = m+2 para cuatro-pliegues y μ = m+3 en otro caso (métrica de Hodge si n = 3)."""
    return float(m + 2) if n == 4 else float(m + 3)


def ph_metric(g: MetricField, F: np.ndarray, mu: float) -> MetricField:
    """h_{ij̄} = (μ−m−1)g_{ij̄} + g^{αβ̄}F_{ij̄αβ̄}."""
    m = g.m
    lam = mu - m - 1
    if lam <= 0:
        raise ParameterError(f"Se requiere μ > m+1 = {m + 1} (μ = {mu})", mu=mu, m=m)
    H = lam * g.matrix + np.einsum("ab,ijab->ij", g.inverse, F)
    h = MetricField(point=g.point, matrix=H, role=f"ph:{mu:g}", data={"mu": mu, "lambda": lam})
    if h.min_eigenvalue <= 0:
        raise DegeneracyError("Métrica de Hodge parcial no definida positiva", level=None,
                              min_autovalor=h.min_eigenvalue)
    return h


# ======================================================================
# Cadena de tercer orden
# ======================================================================
@dataclass(frozen=True, eq=False)
class ThirdOrderChain:
    T: np.ndarray
    E: np.ndarray
    DDD: np.ndarray
    mu: float
    lam: float
    residuals: Dict[str, float] = field(default_factory=dict)


def third_order_tensor(section: JetSection, frame: CovariantFrame) -> np.ndarray:
    """T[k, a, i] = ∂_kD_aD_iΩ + K_kD_aD_iΩ − Γ^p_{ak}D_pD_iΩ − Γ^p_{ik}D_aD_pΩ."""
    section.require(4, "para la cadena de tercer orden")
    m = frame.m
    dDD = np.array([frame.DD_jet.deriv(k).value() for k in range(m)])  # [k, a, i, :]
    DD = frame.DD
    G = frame.gamma
    return (dDD
            + frame.K[:, None, None, None] * DD[None, :, :, :]
            - np.einsum("pak,pix->kaix", G, DD)
            - np.einsum("pik,apx->kaix", G, DD))


def third_order_chain(section: JetSection, frame: CovariantFrame, g: MetricField,
                      dec: HodgeDecompositionAt, Q: PolarizationForm, mu: float) -> ThirdOrderChain:
    n = Q.weight
    m = frame.m
    if mu - m - 1 <= 0:
        raise ParameterError(f"Se requiere μ > m+1 = {m + 1} (μ = {mu})", mu=mu, m=m)
    if n < 3:
        raise DomainError("La cadena de tercer orden requiere peso n ≥ 3", n=n)
    T = third_order_tensor(section, frame)
    E = project_pq(T, dec, Q, n - 2)
    DDD = project_pq(T, dec, Q, n - 3)
    tnorm = float(np.linalg.norm(T)) or 1.0
    high = sum((project_pq(T, dec, Q, p) for p in (n, n - 1)), np.zeros_like(T))
    omega = frame.omega
    top = np.abs(Q.pairing(T, np.conj(omega)[None, None, None, :]))
    scale = np.linalg.norm(Q.matrix, 2) * np.linalg.norm(T, axis=-1) * np.linalg.norm(omega)
    residuals = {
        "proyeccion_superior": float(np.linalg.norm(high)) / tnorm,
        "descomposicion": float(np.linalg.norm(T - E - DDD)) / tnorm,
        "ortogonal_omega": float(np.max(np.where(scale > 0, top / np.where(scale > 0, scale, 1.0), top))),
        "simetria": max(float(np.linalg.norm(T - T.transpose(1, 0, 2, 3))),
                        float(np.linalg.norm(T - T.transpose(0, 2, 1, 3)))) / tnorm,
    }
    logger.debug(f"Cadena T en z={frame.point}: {residuals}")
    return ThirdOrderChain(T=T, E=E, DDD=DDD, mu=mu, lam=mu - m - 1, residuals=residuals)


# ======================================================================
# Curvatura de ω_μ
# ======================================================================
def _third_pairing(Q: PolarizationForm, X: np.ndarray, P: complex) -> np.ndarray:
    """S[k, a, i, l, b, j] = (X[k, a, i], conj X[l, b, j])/(Ω,Ω̄)."""
    return Q.pairing(X[:, :, :, None, None, None, :], np.conj(X)[None, None, None, :, :, :, :]) / P


def ph_curvature(chain: ThirdOrderChain, frame: CovariantFrame, g: MetricField, h: MetricField,
                 F: np.ndarray, Q: PolarizationForm) -> CurvatureField:
    """Tensor R̃_{ij̄kl̄} de ω_μ, término a término (mismo convenio que la curvatura WP)."""
    m = g.m
    mu = chain.mu
    lam = chain.lam
    P = frame.potential
    ginv = g.inverse
    try:
        hinv = h.inverse
    except np.linalg.LinAlgError:
        raise DegeneracyError("Métrica h singular", level=None)

    R = lam * metric_products(g.matrix) - (mu - m) * F
    R = R + np.einsum("iqal,pjkb,ab,pq->ijkl", F, F, ginv, ginv)
    R = R + np.einsum("aqkl,ijpb,ab,pq->ijkl", F, F, ginv, ginv)

    S3 = _third_pairing(Q, chain.DDD, P)  # [k, a, i, l, b, j]
    R = R + np.einsum("kailbj,ab->ijkl", S3, ginv)
    S2 = _third_pairing(Q, chain.E, P)
    R = R + np.einsum("kailbj,ab->ijkl", S2, ginv)

    DD = frame.DD
    # M1[k, a, i, b, t] = (E[k, a, i], conj D_bD_tΩ)/P ; M2[c, s, l, e, j] = (D_cD_sΩ, conj E[l, e, j])/P
    M1 = Q.pairing(chain.E[:, :, :, None, None, :], np.conj(DD)[None, None, None, :, :, :]) / P
    M2 = Q.pairing(DD[:, :, None, None, None, :], np.conj(chain.E)[None, None, :, :, :, :]) / P
    R = R - np.einsum("st,kaibt,cslej,ab,ce->ijkl", hinv, M1, M2, ginv, ginv)
    return CurvatureField(point=g.point, tensor=R, role=f"ph:{mu:g}")


def ph_scalar_curvature(R: CurvatureField, h: MetricField) -> float:
    return scalar_curvature(R.tensor, h.matrix)


def ph_residuals(R: CurvatureField) -> Dict[str, float]:
    return {"simetria": symmetry_residual(R.tensor)}


# ======================================================================
# Cuatro-pliegues
# ======================================================================
def yukawa4(section: JetSection, Q: PolarizationForm) -> np.ndarray:
    """ξ_{ijkl} = (Ω, ∂_i∂_j∂_k∂_lΩ)."""
    if Q.weight != 4:
        raise DomainError("El acoplamiento de Yukawa cuártico requiere n = 4", n=Q.weight)
    section.require(4, "para ξ_{ijkl}")
    m = section.m
    omega = section.value()
    xi = np.zeros((m,) * 4, dtype=complex)
    for idx in np.ndindex(*(m,) * 4):
        a = [0] * m
        for v in idx:
            a[v] += 1
        xi[idx] = Q.pairing(omega, section.derivative(a))
    return xi


def yukawa4_residuals(xi: np.ndarray, frame: CovariantFrame, chain: ThirdOrderChain,
                      Q: PolarizationForm) -> Dict[str, float]:
    """Residuos de ξ_{ijkl} = (D_kD_lΩ, D_jD_iΩ) = −(D_jD_kD_lΩ, D_iΩ)."""
    DD = frame.DD
    via_dd = Q.pairing(DD[None, None, :, :, :], DD.transpose(1, 0, 2)[:, :, None, None, :])
    via_t = -Q.pairing(chain.T[None, :, :, :, :], frame.D[:, None, None, None, :])
    ref = float(np.linalg.norm(xi)) or 1.0
    sym = max(float(np.linalg.norm(xi - xi.transpose(p))) for p in
              [(1, 0, 2, 3), (0, 2, 1, 3), (0, 1, 3, 2)])
    return {
        "dd": float(np.linalg.norm(xi - via_dd)) / ref,
        "ddd": float(np.linalg.norm(xi - via_t)) / ref,
        "simetria": sym / ref,
    }


def random_orthogonal_pair(h: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """ξ, η con X = ξ + ξ̄ e Y = η + η̄ ortogonales para 2Re h(·, ·̄)."""
    m = h.shape[0]
    real_inner = lambda a, b: 2.0 * float(np.einsum("ij,i,j->", h, a, np.conj(b)).real)  # noqa: E731
    while True:
        xi = rng.normal(size=m) + 1j * rng.normal(size=m)
        eta = rng.normal(size=m) + 1j * rng.normal(size=m)
        eta = eta - real_inner(eta, xi) / real_inner(xi, xi) * xi
        if real_inner(eta, eta) > 1e-12 * real_inner(xi, xi):
            return xi, eta


def fourfold_report(samples: Sequence[Tuple[CurvatureField, MetricField]], seed: int = DEFAULT_SEED,
                    pairs: int = PAIRS_PER_POINT, tol: float = RESIDUAL_TOL,
                    labels: Optional[List[str]] = None) -> ValidationReport:
    """
    Predicados de curvatura de ω_μ por punto: bisectional (min R̃_{iīkk̄} ≥ 0),
    seccional holomorfa (R̃_{iīiī}/h² ≥ 1/(m+4)) y |K(X,Y)| ≤ 1/2 + 9/8|ρ| en
    pares ortogonales aleatorios.
    """
    rng = np.random.default_rng(seed)
    report = ValidationReport(title="Cotas de curvatura de la métrica de Hodge parcial")
    report.data.update({"seed": seed, "pairs_per_point": pairs})
    report.notes.append("Convenio: R̃_{iīkk̄} ≥ 0 ⇔ curvatura bisectional holomorfa ≤ 0")
    for idx, (R, h) in enumerate(samples):
        label = labels[idx] if labels else str(np.asarray(h.point).tolist())
        m = h.m
        Rt = R.tensor
        H = h.matrix
        scale = float(np.max(np.abs(np.diag(H)))) ** 2
        bis = bisectional_minimum(Rt) / scale
        report.checks.append(make_check(
            "bisectional", "min R̃_{iīkk̄} ≥ 0", max(0.0, -bis), tol, point=label,
            note=f"min R̃_{{iīkk̄}}/h² = {bis:.6g}"))
        holo = float(np.min(holomorphic_sectional(Rt, H)))
        bound = 1.0 / (m + 4)
        report.checks.append(make_check(
            "seccional_holomorfa", "R̃_{iīiī}/h_{iī}² ≥ 1/(m+4)", max(0.0, bound - holo), tol,
            point=label, note=f"min R̃/h² = {holo:.12g}; cota {bound:.12g}"))
        rho = scalar_curvature(Rt, H)
        limit = 0.5 + 9.0 / 8.0 * abs(rho)
        worst = -np.inf
        for _ in range(pairs):
            xi, eta = random_orthogonal_pair(H, rng)
            worst = max(worst, abs(sectional_curvature(Rt, H, xi, eta)) - limit)
        report.checks.append(make_check(
            "cota_seccional", "|K(X,Y)| ≤ 1/2 + 9/8·|ρ|", worst, tol, point=label,
            note=f"ρ = {rho:.12g}"))
    if not report.passed:
        logger.warning(f"Fallos en cotas de curvatura: {[c.point for c in report.failures()]}")
    return report
