# core/wp_geometry.py
"""
Métrica de Weil–Petersson, cadena de derivadas covariantes, tensor F,
curvatura de Strominger y tensor de Ricci a partir de un jet de Ω.

Convenciones de índices (arrays numpy):
    G[i, j]        = g_{ij̄}
    ginv[k, l]     = g^{kl̄}          (= inv(G).T)
    gamma[k, i, j] = Γ^k_{ij}        = g^{kq̄} ∂_j g_{iq̄}
    D[i]           = D_iΩ            = ∂_iΩ + K_iΩ
    DD[j, i]       = D_jD_iΩ
    R[i, j, k, l]  = R_{ij̄kl̄}        = ∂_k∂̄_l g_{ij̄} − g^{pq̄} ∂_k g_{iq̄} ∂̄_l g_{pj̄}

Con este convenio, R_{iīiī} ≥ 0 equivale a curvatura seccional holomorfa no
positiva y Ric_{ij̄} = −g^{kl̄} R_{ij̄kl̄}.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from core import jets
from core.constants import HERMITIAN_TOL, RESIDUAL_TOL
from core.errors import DegeneracyError, HodgeRiemannError, OrderError
from core.hodge_core import PolarizationForm
from core.jets import TaylorJet
from core.logger import get_logger
from core.vhs_models import JetSection

logger = get_logger(__name__)

CURVATURE_CONVENTION = (
    "R_{ij̄kl̄} = ∂_k∂̄_l g_{ij̄} − g^{pq̄}∂_k g_{iq̄}∂̄_l g_{pj̄}; "
    "R_{iīiī} ≥ 0 ⇔ curvatura seccional holomorfa ≤ 0; Ric_{ij̄} = −g^{kl̄}R_{ij̄kl̄}"
)


def inverse_metric(G: np.ndarray) -> np.ndarray:
    """ginv[k, l] = g^{kl̄}."""
    return np.linalg.inv(G).T


def _relative(x: np.ndarray, ref: float) -> float:
    nrm = float(np.linalg.norm(x))
    return nrm / ref if ref > 0 else nrm


# ======================================================================
# Tipos
# ======================================================================
@dataclass(frozen=True, eq=False)
class MetricField:
    point: np.ndarray
    matrix: np.ndarray
    role: str = "wp"
    data: Dict[str, Any] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def inverse(self) -> np.ndarray:
        return inverse_metric(self.matrix)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))))

    @property
    def hermitian_residual(self) -> float:
        return _relative(self.matrix - self.matrix.conj().T, float(np.linalg.norm(self.matrix)))

    def scalar(self) -> float:
        """Valor real g_{11̄} (modelos de una variable)."""
        return float(self.matrix[0, 0].real)


@dataclass(frozen=True, eq=False)
class CurvatureField:
    point: np.ndarray
    tensor: np.ndarray
    convention: str = CURVATURE_CONVENTION
    role: str = "wp"

    @property
    def m(self) -> int:
        return self.tensor.shape[0]


@dataclass(frozen=True, eq=False)
class KahlerJets:
    """Jets en (w, w̄) del potencial P = (Ω,Ω̄), de K_i y de g_{ij̄}."""

    section: JetSection
    Q: PolarizationForm
    omega: TaylorJet
    omega_bar: TaylorJet
    potential: TaylorJet
    K: TaylorJet
    g: TaylorJet

    @property
    def m(self) -> int:
        return self.section.m

    @property
    def point(self) -> np.ndarray:
        return self.section.point

    def pairing(self, x: TaylorJet, y: TaylorJet) -> TaylorJet:
        """(x, y) sobre el último eje de valores, sin conjugación."""
        return _pair(self.Q, x, y)


def _pair(Q: PolarizationForm, x: TaylorJet, y: TaylorJet) -> TaylorJet:
    Qy = y.linear(Q.matrix)
    letters = "ijkl"[: len(x.shape) - 1]
    other = "pqrs"[: len(Qy.shape) - 1]
    return jets.einsum(f"{letters}a,{other}a->{letters}{other}", x, Qy) * Q.phase


def kahler_jets(section: JetSection, Q: PolarizationForm, strict: bool = True) -> KahlerJets:
    section.require(2, "para la métrica")
    if section.dim != Q.dim:
        raise DegeneracyError("Dimensión de Ω incompatible con Q", level=None, d=Q.dim)
    m = section.m
    W = section.to_jet()
    Wb = W.conj_swap()
    P = _pair(Q, W, Wb)
    P0 = complex(P.value())
    if strict and (P0.real <= 0 or abs(P0.imag) > HERMITIAN_TOL * abs(P0)):
        raise HodgeRiemannError("(Ω,Ω̄) no es real positivo en el punto", P=str(P0),
                                z=str(section.point))
    logP = P.log()
    K = jets.stack([-logP.deriv(i) for i in range(m)])
    G = jets.stack([K.deriv(m + j) for j in range(m)], axis=1)
    return KahlerJets(section=section, Q=Q, omega=W, omega_bar=Wb, potential=P, K=K, g=G)


# ======================================================================
# Métrica
# ======================================================================
def _check_positive(G: np.ndarray, point, role: str) -> None:
    eig = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
    scale = max(float(np.max(np.abs(eig))), np.finfo(float).tiny)
    if eig[0] <= RESIDUAL_TOL * scale:
        raise DegeneracyError(f"Métrica {role} no definida positiva en z={point}",
                              level=None, min_autovalor=float(eig[0]))


def wp_metric(section: JetSection, Q: PolarizationForm, kj: Optional[KahlerJets] = None,
              strict: bool = True) -> MetricField:
    """g_{ij̄} = −∂_i∂̄_j log(Ω,Ω̄), contrastada con −(D_iΩ, conj D_jΩ)/(Ω,Ω̄)."""
    kj = kj or kahler_jets(section, Q, strict=strict)
    G = kj.g.value()
    omega = section.value()
    P = complex(kj.potential.value())
    dO = np.array([section.derivative(tuple(int(i == k) for i in range(section.m)))
                   for k in range(section.m)])
    K = kj.K.value()
    D = dO + K[:, None] * omega[None, :]
    paired = -Q.pairing(D[:, None, :], np.conj(D)[None, :, :]) / P
    residual = _relative(G - paired, float(np.linalg.norm(G)))
    metric = MetricField(point=section.point, matrix=G, role="wp",
                         data={"pairing_residual": residual, "potential": P.real})
    if strict:
        if metric.hermitian_residual > HERMITIAN_TOL:
            raise DegeneracyError("Métrica WP no hermítica", level=None,
                                  residuo=metric.hermitian_residual)
        _check_positive(G, section.point, "WP")
    return metric


def kahler_residual(kj: KahlerJets) -> float:
    """‖∂_k g_{ij̄} − ∂_i g_{kj̄}‖ relativo (requiere jet de orden 3)."""
    kj.section.require(3, "para la condición de Kähler")
    dG = np.array([kj.g.deriv(k).value() for k in range(kj.m)])  # dG[k, i, j]
    diff = dG - dG.transpose(1, 0, 2)
    return _relative(diff, float(np.linalg.norm(dG)))


# ======================================================================
# Marco covariante
# ======================================================================
@dataclass(frozen=True, eq=False)
class CovariantFrame:
    point: np.ndarray
    omega: np.ndarray
    potential: complex
    K: np.ndarray
    D: np.ndarray
    gamma: np.ndarray
    DD: np.ndarray
    kahler: KahlerJets
    D_jet: TaylorJet
    gamma_jet: TaylorJet
    DD_jet: TaylorJet
    ginv_jet: TaylorJet

    @property
    def m(self) -> int:
        return len(self.K)


def covariant_frame(section: JetSection, Q: PolarizationForm, kj: Optional[KahlerJets] = None,
                    strict: bool = True, drop_kahler_term: bool = False) -> CovariantFrame:
    section.require(3, "para el marco covariante")
    kj = kj or kahler_jets(section, Q, strict=strict)
    m = kj.m
    W = kj.omega
    dW = jets.stack([W.deriv(i) for i in range(m)])
    if drop_kahler_term:
        D = dW
    else:
        D = dW + jets.einsum("i,a->ia", kj.K, W)
    ginv = jets.matrix_inverse(kj.g).T
    dG = jets.stack([kj.g.deriv(j) for j in range(m)])  # dG[j, i, q]
    gamma = jets.einsum("kq,jiq->kij", ginv, dG)
    dD = jets.stack([D.deriv(j) for j in range(m)])  # dD[j, i, a] = ∂_j D_iΩ
    DD = dD - jets.einsum("kij,ka->jia", gamma, D) + jets.einsum("j,ia->jia", kj.K, D)
    return CovariantFrame(
        point=section.point, omega=section.value(), potential=complex(kj.potential.value()),
        K=kj.K.value(), D=D.value(), gamma=gamma.value(), DD=DD.value(), kahler=kj,
        D_jet=D, gamma_jet=gamma, DD_jet=DD, ginv_jet=ginv,
    )


def _pair_rel(Q: PolarizationForm, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """|(x, ȳ)| / (‖Q‖ ‖x‖ ‖y‖)."""
    val = np.abs(Q.pairing(x, np.conj(y)))
    scale = np.linalg.norm(Q.matrix, 2) * np.linalg.norm(x, axis=-1) * np.linalg.norm(y, axis=-1)
    return np.where(scale > 0, val / np.where(scale > 0, scale, 1.0), val)


def frame_residuals(frame: CovariantFrame, Q: PolarizationForm) -> Dict[str, float]:
    """Residuos de (D_iΩ,Ω̄)=0, (D_jD_iΩ,Ω̄)=0, (D_jD_iΩ, conj D_lΩ)=0 y D_jD_iΩ=D_iD_jΩ."""
    m = frame.m
    omega = frame.omega
    DD = frame.DD
    res = {
        "D_ortogonal": float(np.max(_pair_rel(Q, frame.D, omega[None, :]))),
        "DD_ortogonal_omega": float(np.max(_pair_rel(Q, DD, omega[None, None, :]))),
        "DD_ortogonal_D": float(np.max(_pair_rel(Q, DD[:, :, None, :], frame.D[None, None, :, :]))),
        "DD_simetrico": _relative(DD - DD.transpose(1, 0, 2), float(np.linalg.norm(DD))),
    }
    if m and not np.all(np.isfinite(list(res.values()))):
        logger.warning(f"Residuos no finitos en z={frame.point}")
    return res


# ======================================================================
# Tensor F, Strominger y Ricci
# ======================================================================
def f_tensor(frame: CovariantFrame, Q: PolarizationForm) -> np.ndarray:
    """F[i, j, k, l] = (D_kD_iΩ, conj D_lD_jΩ)/(Ω,Ω̄)."""
    DD = frame.DD
    F = Q.pairing(DD[:, :, None, None, :], np.conj(DD)[None, None, :, :, :])  # [k, i, l, j]
    return F.transpose(1, 3, 0, 2) / frame.potential


def metric_products(G: np.ndarray) -> np.ndarray:
    """g_{ij̄}g_{kl̄} + g_{il̄}g_{kj̄}."""
    return np.einsum("ij,kl->ijkl", G, G) + np.einsum("il,kj->ijkl", G, G)


def wp_curvature(frame: CovariantFrame, g: MetricField, Q: PolarizationForm,
                 F: Optional[np.ndarray] = None) -> CurvatureField:
    F = f_tensor(frame, Q) if F is None else F
    return CurvatureField(point=g.point, tensor=metric_products(g.matrix) - F, role="wp")


def ricci_contraction(R: np.ndarray, G: np.ndarray) -> np.ndarray:
    return -np.einsum("kl,ijkl->ij", inverse_metric(G), R)


def wp_ricci(R: CurvatureField, g: MetricField, F: Optional[np.ndarray] = None) -> MetricField:
    """Ric_{ij̄} = −g^{kl̄}R_{ij̄kl̄}; con F se contrasta con −(m+1)g + g^{kl̄}F_{ij̄kl̄}."""
    ric = ricci_contraction(R.tensor, g.matrix)
    data = {}
    if F is not None:
        closed = -(g.m + 1) * g.matrix + np.einsum("kl,ijkl->ij", g.inverse, F)
        data["closed_form_residual"] = _relative(ric - closed, float(np.linalg.norm(ric)) or 1.0)
    return MetricField(point=g.point, matrix=ric, role="ricci", data=data)


def curvature_from_metric_jet(gjet: TaylorJet, m: int) -> np.ndarray:
    """R = ∂_k∂̄_l g − g^{-1}∂_k g ∂̄_l g con derivadas exactas del jet de la métrica."""
    if gjet.order < 2:
        raise OrderError("Se requiere el 2-jet de la métrica", disponible=gjet.order)
    G = gjet.value()
    ginv = inverse_metric(G)
    dg = np.array([gjet.deriv(k).value() for k in range(m)])              # [k, i, j]
    dbg = np.array([gjet.deriv(m + l).value() for l in range(m)])         # [l, i, j]
    ddg = np.array([[gjet.deriv(k).deriv(m + l).value() for l in range(m)] for k in range(m)])
    term = np.einsum("pq,kiq,lpj->ijkl", ginv, dg, dbg)
    return ddg.transpose(2, 3, 0, 1) - term


def exact_curvature(kj: KahlerJets) -> CurvatureField:
    kj.section.require(4, "para la curvatura exacta por jets")
    R = curvature_from_metric_jet(kj.g, kj.m)
    return CurvatureField(point=kj.point, tensor=R, role="wp_jet")


def symmetry_residual(R: np.ndarray) -> float:
    """Máximo de las simetrías de Kähler del tensor, relativo a ‖R‖."""
    ref = float(np.linalg.norm(R)) or 1.0
    return max(
        _relative(R - R.transpose(2, 1, 0, 3), ref),
        _relative(R - R.transpose(0, 3, 2, 1), ref),
        _relative(np.conj(R) - R.transpose(1, 0, 3, 2), ref),
    )


# ======================================================================
# Curvaturas escalares
# ======================================================================
def scalar_curvature(R: np.ndarray, h: np.ndarray) -> float:
    """ρ = −h^{ij̄}h^{kl̄}R_{ij̄kl̄}; en dimensión uno, ρ = −R/h²."""
    hinv = inverse_metric(h)
    return float(-np.einsum("ij,kl,ijkl->", hinv, hinv, R).real)


def holomorphic_sectional(R: np.ndarray, h: np.ndarray) -> np.ndarray:
    """R_{iīiī}/h_{iī}² por dirección de coordenadas (≥ 0 ⇔ seccional holomorfa ≤ 0)."""
    idx = np.arange(R.shape[0])
    return (R[idx, idx, idx, idx] / np.diag(h) ** 2).real


def holomorphic_sectional_along(R: np.ndarray, h: np.ndarray, xi: np.ndarray) -> float:
    """R(ξ, ξ̄, ξ, ξ̄)/h(ξ, ξ̄)² para un vector tangente ξ."""
    num = np.einsum("ijkl,i,j,k,l->", R, xi, np.conj(xi), xi, np.conj(xi))
    den = np.einsum("ij,i,j->", h, xi, np.conj(xi))
    return float((num / den ** 2).real)


def bisectional_minimum(R: np.ndarray) -> float:
    """min_{i,k} R_{iīkk̄}."""
    idx = np.arange(R.shape[0])
    return float(np.min(R[idx[:, None], idx[:, None], idx[None, :], idx[None, :]].real))


def sectional_curvature(R: np.ndarray, h: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> float:
    """
    Curvatura seccional del plano real de X = ξ + ξ̄, Y = η + η̄ (signo usual:
    para m = 1 coincide con ρ = −R/h²).
    """
    t1 = np.einsum("ijkl,i,j,k,l->", R, xi, np.conj(eta), eta, np.conj(xi))
    s = np.einsum("ijkl,i,j,k,l->", R, xi, np.conj(eta), xi, np.conj(eta))
    num = -(2 * t1.real - 2 * s.real)
    hxx = 2 * np.einsum("ij,i,j->", h, xi, np.conj(xi)).real
    hyy = 2 * np.einsum("ij,i,j->", h, eta, np.conj(eta)).real
    hxy = 2 * np.einsum("ij,i,j->", h, xi, np.conj(eta)).real
    den = hxx * hyy - hxy ** 2
    if den <= 0:
        raise DegeneracyError("Vectores tangentes linealmente dependientes", level=None)
    return float(num / den)
