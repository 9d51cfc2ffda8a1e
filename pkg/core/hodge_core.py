# core/hodge_core.py
"""
Álgebra de estructuras de Hodge polarizadas: forma de polarización y
emparejamiento (ξ,η) = (√−1)^n Q(ξ,η) (bilineal, sin conjugación), operador de
Weil, relaciones de Hodge–Riemann y proyección Q₁-ortogonal sobre H^{p,q}.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from core.constants import RANK_TOL, RESIDUAL_TOL
from core.errors import InputError, SingularityError
from core.logger import get_logger
from core.reports import ValidationReport, make_check

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class PolarizationForm:
    matrix: np.ndarray
    weight: int

    def __post_init__(self):
        Q = np.asarray(self.matrix, dtype=complex)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise InputError("Q debe ser una matriz cuadrada", forma=list(Q.shape))
        if Q.shape[0] < 2:
            raise InputError("Q debe tener dimensión d ≥ 2", d=int(Q.shape[0]))
        if int(self.weight) < 1:
            raise InputError("El peso n debe ser positivo", n=self.weight)
        object.__setattr__(self, "matrix", Q)
        object.__setattr__(self, "weight", int(self.weight))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def phase(self) -> complex:
        return 1j ** self.weight

    def q(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("...a,ab,...b->...", x, self.matrix, y)

    def pairing(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """(x, y) = (√−1)^n Q(x, y), sin conjugación."""
        return self.phase * self.q(x, y)

    def hermitian(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """S(x, y) = Q(x, ȳ)."""
        return self.q(x, np.conj(y))

    def scaled(self, factor: complex) -> "PolarizationForm":
        return PolarizationForm(self.matrix * factor, self.weight)


def validate_polarization(Q: PolarizationForm, tol: float = RESIDUAL_TOL,
                          rank_tol: float = RANK_TOL) -> ValidationReport:
    n = Q.weight
    M = Q.matrix
    norm = np.linalg.norm(M)
    parity = np.linalg.norm(M.T - (-1) ** n * M)
    sv = np.linalg.svd(M, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    report = ValidationReport(title="Validación de la polarización")
    report.checks.append(make_check(
        "paridad", "‖Qᵀ − (−1)ⁿ Q‖ / ‖Q‖", parity / norm if norm else float("inf"), tol,
        note=f"residuo absoluto {parity:.3e}"))
    report.checks.append(make_check(
        "no_degenerada", "σ_min(Q) > rank_tol · σ_max(Q)", 1.0 / cond if cond else 0.0, rank_tol,
        passed=bool(sv[-1] > rank_tol * sv[0])))
    report.data.update({"parity_residual": float(parity), "condition_number": cond, "d": Q.dim, "n": n})
    return report


@dataclass(frozen=True, eq=False)
class HodgeDecompositionAt:
    """Bases de H^{p,n−p} (columnas) en un punto, indexadas por p."""

    point: np.ndarray
    weight: int
    bases: Dict[int, np.ndarray]
    flags: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def dims(self) -> List[int]:
        """(h^{n,0}, h^{n−1,1}, …, h^{0,n})."""
        return [self.bases[p].shape[1] for p in range(self.weight, -1, -1)]

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def filtration(self, p: int) -> np.ndarray:
        blocks = [self.bases[r] for r in range(self.weight, max(p, 0) - 1, -1)]
        return np.hstack(blocks) if blocks else np.zeros((self.bases[self.weight].shape[0], 0))

    def adapted_basis(self) -> np.ndarray:
        return self.filtration(0)


@dataclass(frozen=True, eq=False)
class WeilOperator:
    matrix: np.ndarray
    weight: int

    def q1(self, Q: PolarizationForm, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Q₁(x, y) = Q(Cx, ȳ)."""
        return Q.q(np.einsum("ab,...b->...a", self.matrix, x), np.conj(y))

    def gram(self, Q: PolarizationForm, basis: np.ndarray) -> np.ndarray:
        CB = self.matrix @ basis
        return CB.T @ Q.matrix @ np.conj(basis)


def weil_operator(dec: HodgeDecompositionAt) -> WeilOperator:
    n = dec.weight
    B = dec.adapted_basis()
    if B.shape[0] != B.shape[1]:
        raise InputError("La descomposición no cubre todo H", dims=dec.dims)
    phases = np.concatenate([
        np.full(dec.bases[p].shape[1], 1j ** (2 * p - n)) for p in range(n, -1, -1)
    ])
    C = B @ np.diag(phases) @ np.linalg.inv(B)
    return WeilOperator(matrix=C, weight=n)


def _unit_columns(B: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(B, axis=0)
    norms[norms == 0] = 1.0
    return B / norms


def block_gram(Q: PolarizationForm, B: np.ndarray, p: int) -> np.ndarray:
    """Matriz de Gram de Q₁ sobre las columnas de B ⊂ H^{p,n−p}: i^{p−q} Q(b_a, b̄_b)."""
    q = Q.weight - p
    return (1j ** (p - q)) * (B.T @ Q.matrix @ np.conj(B))


def hodge_riemann_report(dec: HodgeDecompositionAt, Q: PolarizationForm,
                         tol: float = RESIDUAL_TOL) -> ValidationReport:
    n = Q.weight
    d = Q.dim
    if dec.dim != d or dec.weight != n:
        raise InputError("Las dimensiones de la descomposición no suman d",
                         dims=dec.dims, d=d, n=n)
    qnorm = np.linalg.norm(Q.matrix)
    units = {p: _unit_columns(dec.bases[p]) for p in range(n + 1)}
    report = ValidationReport(title="Relaciones de Hodge–Riemann")

    conj_res = 0.0
    for p in range(n + 1):
        Bp, Bq = units[p], units[n - p]
        coef, *_ = np.linalg.lstsq(Bq, np.conj(Bp), rcond=None)
        conj_res = max(conj_res, float(np.linalg.norm(Bq @ coef - np.conj(Bp)) / np.sqrt(Bp.shape[1])))
    report.checks.append(make_check("conjugacion", "H^{p,q} = conj H^{q,p}", conj_res, tol))

    off_block = 0.0
    for p in range(n + 1):
        for pp in range(n + 1):
            if pp == n - p:
                continue
            block = units[p].T @ Q.matrix @ units[pp]
            if block.size:
                off_block = max(off_block, float(np.max(np.abs(block)) / qnorm))
    report.checks.append(make_check(
        "primera_relacion", "(√−1)ⁿ Q(H^{p,q}, H^{p',q'}) = 0 si p' ≠ n−p", off_block, tol))

    min_eigs = {}
    for p in range(n + 1):
        G = block_gram(Q, units[p], p) / qnorm
        herm = float(np.linalg.norm(G - G.conj().T))
        eig = float(np.min(np.linalg.eigvalsh(0.5 * (G + G.conj().T)))) if G.size else float("inf")
        min_eigs[p] = eig
        report.checks.append(make_check(
            "segunda_relacion", "(√−1)^{p−q} Q(φ, φ̄) > 0", eig, 0.0,
            passed=bool(eig > 0 and herm < tol), point=f"p={p}",
            note=f"residuo hermítico {herm:.2e}"))
    report.data.update({
        "dims": dec.dims, "conjugation_residual": conj_res,
        "off_block_residual": off_block, "min_positivity": {str(p): v for p, v in min_eigs.items()},
    })
    if not report.passed:
        logger.warning(f"Hodge–Riemann falla en z={dec.point}: {[c.name for c in report.failures()]}")
    return report


def project_pq(v: np.ndarray, dec: HodgeDecompositionAt, Q: PolarizationForm, p: int,
               rank_tol: float = RANK_TOL) -> np.ndarray:
    """
    Proyección Q₁-ortogonal de v (o de un lote (..., d)) sobre H^{p,n−p}.

    Sólo la componente de v en H^{p,n−p} contribuye a Q(v, b̄) para b ∈ H^{p,n−p},
    de modo que basta un sistema con la matriz S = Bᵀ Q B̄ del bloque.
    """
    if p not in dec.bases:
        raise InputError("Índice p fuera de rango", p=p, n=dec.weight)
    B = dec.bases[p]
    if B.shape[1] == 0:
        return np.zeros_like(np.asarray(v, dtype=complex))
    v = np.asarray(v, dtype=complex)
    flat = v.reshape(-1, v.shape[-1])
    S = B.T @ Q.matrix @ np.conj(B)
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > 1.0 / rank_tol:
        raise SingularityError("Matriz de Gram degenerada en la proyección", p=p, cond=float(cond))
    R = flat @ Q.matrix @ np.conj(B)
    C = np.linalg.solve(S.T, R.T).T
    return (C @ B.T).reshape(v.shape)


def block_coordinates(v: np.ndarray, dec: HodgeDecompositionAt, Q: PolarizationForm, p: int) -> np.ndarray:
    """Coordenadas de la proyección sobre H^{p,n−p} en la base almacenada."""
    B = dec.bases[p]
    v = np.asarray(v, dtype=complex)
    S = B.T @ Q.matrix @ np.conj(B)
    R = v.reshape(-1, v.shape[-1]) @ Q.matrix @ np.conj(B)
    return np.linalg.solve(S.T, R.T).T.reshape(v.shape[:-1] + (B.shape[1],))
