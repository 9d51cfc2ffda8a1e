# core/hodge_metric.py
"""
Métrica de Hodge como suma de normas de Hom entre bloques consecutivos de la
descomposición de Hodge.

Los vectores de H^{p,q} se extienden como combinaciones constantes del marco
∂^aΩ (|a| ≤ n−p); la componente en H^{p−1,q+1} de su derivada no depende de la
extensión elegida. Normalización: h^H_{αβ̄} = Σ_p tr(M_α M_β^H), con lo que el
bloque superior reproduce g_WP.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from core.constants import HERMITIAN_TOL, RESIDUAL_TOL
from core.errors import DegeneracyError, SingularityError
from core.hodge_core import HodgeDecompositionAt, PolarizationForm, block_gram, project_pq
from core.logger import get_logger
from core.reports import ValidationReport, make_check
from core.vhs_models import JetSection
from core.wp_geometry import MetricField

logger = get_logger(__name__)

HODGE_NORMALIZATION = "h^H_{αβ̄} = Σ_p tr(M_α^{(p)} (M_β^{(p)})^H), bases Q₁-ortonormales, factor 1"


@dataclass(frozen=True, eq=False)
class TangentAction:
    """Matrices de H^{p,q} → H^{p−1,q+1} (clave p) en bases Q₁-ortonormales."""

    direction: int
    blocks: Dict[int, np.ndarray]
    transversality_residual: float = 0.0
    block_norms: Dict[int, float] = field(default_factory=dict)


def orthonormal_block(dec: HodgeDecompositionAt, Q: PolarizationForm, p: int) -> np.ndarray:
    """U = B L^{-T} con block_gram(B) = L L^H: base Q₁-ortonormal de H^{p,n−p}."""
    B = dec.bases[p]
    G = block_gram(Q, B, p)
    G = 0.5 * (G + G.conj().T)
    try:
        L = linalg.cholesky(G, lower=True)
    except linalg.LinAlgError:
        raise SingularityError("Gram de Q₁ no definida positiva en el bloque", p=p)
    return B @ np.linalg.inv(L).T


def _frame(section: JetSection, k: int):
    exps, cols = [], []
    for deg in range(k + 1):
        for a, vec in section.derivatives_of_degree(deg):
            exps.append(a)
            cols.append(vec)
    return exps, np.column_stack(cols)


def _coordinates(v: np.ndarray, U: np.ndarray, Q: PolarizationForm, r: int) -> np.ndarray:
    """y_f = Q₁(v, u_f) = i^{2r−n} Q(v, ū_f) para u_f ∈ H^{r,n−r} ortonormales."""
    return (1j ** (2 * r - Q.weight)) * (v.T @ Q.matrix @ np.conj(U))


def tangent_action(section: JetSection, dec: HodgeDecompositionAt, Q: PolarizationForm,
                   alpha: int, orthonormal: Optional[Dict[int, np.ndarray]] = None) -> TangentAction:
    n = Q.weight
    m = section.m
    section.require(n, "para la acción tangente en todos los bloques")
    U = orthonormal or {p: orthonormal_block(dec, Q, p) for p in range(n + 1)}
    blocks: Dict[int, np.ndarray] = {}
    norms: Dict[int, float] = {}
    stray = 0.0
    for p in range(n, 0, -1):
        exps, frame = _frame(section, n - p)
        coef, *_ = np.linalg.lstsq(frame, U[p], rcond=None)
        fit = np.linalg.norm(frame @ coef - U[p]) / max(np.linalg.norm(U[p]), 1.0)
        if fit > RESIDUAL_TOL ** 0.5:
            raise DegeneracyError(f"H^{p} no está generado por el marco de orden {n - p}", level=p,
                                  residuo=float(fit))
        derivs = []
        for a in exps:
            raised = list(a)
            raised[alpha] += 1
            derivs.append(section.derivative(raised))
        dU = np.column_stack(derivs) @ coef
        M = _coordinates(dU, U[p - 1], Q, p - 1)  # [c, f]
        blocks[p] = M.T
        norms[p] = float(np.sum(np.abs(M) ** 2))
        ref = float(np.linalg.norm(dU)) or 1.0
        for r in range(0, p - 1):
            stray = max(stray, float(np.linalg.norm(project_pq(dU.T, dec, Q, r))) / ref)
    return TangentAction(direction=alpha, blocks=blocks, transversality_residual=stray,
                         block_norms=norms)


def hodge_metric_direct(section: JetSection, dec: HodgeDecompositionAt,
                        Q: PolarizationForm) -> MetricField:
    n = Q.weight
    m = section.m
    U = {p: orthonormal_block(dec, Q, p) for p in range(n + 1)}
    actions = [tangent_action(section, dec, Q, a, orthonormal=U) for a in range(m)]
    H = np.zeros((m, m), dtype=complex)
    for a in range(m):
        for b in range(m):
            H[a, b] = sum(np.trace(actions[a].blocks[p] @ actions[b].blocks[p].conj().T)
                          for p in range(n, 0, -1))
    metric = MetricField(point=section.point, matrix=H, role="hodge", data={
        "normalization": HODGE_NORMALIZATION,
        "block_norms": [{str(p): v for p, v in act.block_norms.items()} for act in actions],
        "transversality_residual": max(act.transversality_residual for act in actions),
    })
    if metric.hermitian_residual > HERMITIAN_TOL:
        logger.warning(f"h^H no hermítica en z={section.point}: {metric.hermitian_residual:.2e}")
    if metric.min_eigenvalue <= 0:
        raise DegeneracyError("Métrica de Hodge no definida positiva", level=None,
                              min_autovalor=metric.min_eigenvalue)
    return metric


def closed_form_hodge(g: MetricField, ricci: MetricField, n: int) -> Optional[np.ndarray]:
    """(m+3)g + Ric para n = 3; 2(m+2)g + 2Ric para n = 4; None en otro caso."""
    m = g.m
    if n == 3:
        return (m + 3) * g.matrix + ricci.matrix
    if n == 4:
        return 2 * (m + 2) * g.matrix + 2 * ricci.matrix
    return None


def domination_report(g_list: Sequence[MetricField], hodge_list: Sequence[MetricField],
                      tol: float = RESIDUAL_TOL, labels: Optional[List[str]] = None) -> ValidationReport:
    """Mayor autovalor generalizado C de g respecto de h^H; pasa si C ≤ 1."""
    report = ValidationReport(title="Dominación de Weil–Petersson por la métrica de Hodge")
    worst = 0.0
    for idx, (g, hH) in enumerate(zip(g_list, hodge_list)):
        label = labels[idx] if labels else str(np.asarray(g.point).tolist())
        Hg = 0.5 * (g.matrix + g.matrix.conj().T)
        HH = 0.5 * (hH.matrix + hH.matrix.conj().T)
        C = float(np.max(linalg.eigh(Hg, HH, eigvals_only=True)))
        gap = float(np.min(linalg.eigh(HH - Hg, HH, eigvals_only=True)))
        worst = max(worst, C)
        report.checks.append(make_check(
            "dominacion", "g ≤ C·h^H con C ≤ 1", max(0.0, C - 1.0), tol, point=label,
            note=f"C = {C:.12g}; min autovalor de (h^H − g) relativo a h^H = {gap:.6g}"))
    report.data["C"] = worst
    return report
