# core/verification.py
"""
Oráculos de diferencias finitas y batería de identidades.

Los oráculos no reutilizan los jets de la implementación: evalúan Ω (o la
métrica) en un estencil de puntos desplazados en las direcciones reales x_a,
y_a y combinan las derivadas reales en derivadas de Wirtinger:

    ∂_k    = ½(∂x_k − √−1 ∂y_k)
    ∂̄_l    = ½(∂x_l + √−1 ∂y_l)
    ∂_k∂̄_l = ¼(∂x_k∂x_l + ∂y_k∂y_l + √−1(∂x_k∂y_l − ∂y_k∂x_l))

con extrapolación de Richardson sobre pasos h, h/2, … (factores 4^j).
"""
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from core.constants import (
    FD_POTENTIAL_STEP,
    FD_RICHARDSON_LEVELS,
    FD_STEP,
    FD_TOL,
    FD_TOL_PARTIAL,
    FD_TOL_POTENTIAL,
    RESIDUAL_TOL,
)
from core.errors import ConvergenceError, DomainError, HodgeError
from core.hodge_core import PolarizationForm
from core.logger import get_logger
from core.partial_hodge import (
    default_mu,
    ph_curvature,
    ph_metric,
    third_order_chain,
    yukawa4,
    yukawa4_residuals,
)
from core.reports import CheckResult, SuiteReport, ValidationReport, make_check, skipped_check
from core.vhs_models import Model, decomposition_at, model_jet, polarization_of
from core.wp_geometry import (
    CurvatureField,
    MetricField,
    covariant_frame,
    exact_curvature,
    f_tensor,
    frame_residuals,
    inverse_metric,
    kahler_jets,
    wp_curvature,
    wp_metric,
    wp_ricci,
)

logger = get_logger(__name__)

CLOSED_FORM_CHECKS = (
    "D_ortogonal_omega", "metrica_por_D", "DD_ortogonal_omega", "DD_ortogonal_D", "DD_simetrico",
    "T_proyeccion", "T_descomposicion", "T_omega", "T_simetria",
    "xi_dd", "xi_ddd", "xi_simetria", "strominger_jet", "ricci_cerrada",
)
FD_CHECKS = (
    "dbar_D", "dbar_DD", "oraculo_metrica", "oraculo_curvatura_wp", "oraculo_curvatura_ph",
)


def _default_tolerances() -> Dict[str, float]:
    table = {name: RESIDUAL_TOL for name in CLOSED_FORM_CHECKS}
    table.update({"dbar_D": FD_TOL, "dbar_DD": FD_TOL, "oraculo_metrica": FD_TOL_POTENTIAL,
                  "oraculo_curvatura_wp": FD_TOL, "oraculo_curvatura_ph": FD_TOL_PARTIAL})
    return table


class FDConfig(BaseModel):
    step: float = Field(FD_STEP, gt=0, lt=0.25, description="Paso base relativo a |z|")
    potential_step: float = Field(FD_POTENTIAL_STEP, gt=0, lt=0.25,
                                  description="Paso relativo para el oráculo del potencial")
    richardson_levels: int = Field(FD_RICHARDSON_LEVELS, ge=1, le=4)
    tolerances: Dict[str, float] = Field(default_factory=_default_tolerances)

    @field_validator("tolerances")
    @classmethod
    def _positive(cls, v):
        bad = [k for k, t in v.items() if not t > 0]
        if bad:
            raise ValueError(f"Tolerancias no positivas: {bad}")
        return v

    @model_validator(mode="after")
    def _complete(self):
        missing = [k for k in CLOSED_FORM_CHECKS + FD_CHECKS if k not in self.tolerances]
        if missing:
            raise ValueError(f"Faltan tolerancias para: {missing}")
        return self

    def tolerance(self, name: str) -> float:
        return self.tolerances[name]


class Fault(str, Enum):
    FLIP_Q_ENTRY = "flip_q_entry"
    DROP_KAHLER_TERM = "drop_kahler_term"


# ======================================================================
# Diferencias finitas
# ======================================================================
def _displaced(point: np.ndarray, moves: Tuple[Tuple[int, int], ...], h: float) -> np.ndarray:
    m = len(point)
    z = point.copy()
    for a, s in moves:
        if a < m:
            z[a] += s * h
        else:
            z[a - m] += 1j * s * h
    return z


def _real_derivatives(f: Callable[[np.ndarray], np.ndarray], point: np.ndarray,
                      h: float) -> Tuple[np.ndarray, np.ndarray]:
    """Diferencias centrales: d1[a] = ∂_a f, d2[a, b] = ∂_a∂_b f (a, b sobre x_1..x_m, y_1..y_m)."""
    cache: Dict[Tuple, np.ndarray] = {}

    def at(*moves):
        key = tuple(sorted(moves))
        if key not in cache:
            cache[key] = np.asarray(f(_displaced(point, key, h)), dtype=complex)
        return cache[key]

    n2 = 2 * len(point)
    f0 = at()
    d1 = np.array([(at((a, 1)) - at((a, -1))) / (2 * h) for a in range(n2)])
    d2 = np.zeros((n2, n2) + f0.shape, dtype=complex)
    for a in range(n2):
        d2[a, a] = (at((a, 1)) - 2 * f0 + at((a, -1))) / h ** 2
        for b in range(a + 1, n2):
            val = (at((a, 1), (b, 1)) - at((a, 1), (b, -1))
                   - at((a, -1), (b, 1)) + at((a, -1), (b, -1))) / (4 * h ** 2)
            d2[a, b] = val
            d2[b, a] = val
    return d1, d2


def _richardson(estimates: List[np.ndarray]) -> np.ndarray:
    table = [estimates[0]]
    for j in range(1, len(estimates)):
        row = [estimates[j]]
        for k in range(1, j + 1):
            row.append(row[k - 1] + (row[k - 1] - table[k - 1]) / (4 ** k - 1))
        table = row
    return table[-1]


def wirtinger_derivatives(f: Callable[[np.ndarray], np.ndarray], point, h: float,
                          levels: int = FD_RICHARDSON_LEVELS) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(∂_k f, ∂̄_l f, ∂_k∂̄_l f) con Richardson sobre `levels` pasos."""
    point = np.atleast_1d(np.asarray(point, dtype=complex))
    m = len(point)
    runs = [_real_derivatives(f, point, h / 2 ** j) for j in range(levels)]
    d1 = _richardson([r[0] for r in runs])
    d2 = _richardson([r[1] for r in runs])
    hol = 0.5 * (d1[:m] - 1j * d1[m:])
    antihol = 0.5 * (d1[:m] + 1j * d1[m:])
    mixed = 0.25 * (d2[:m, :m] + d2[m:, m:] + 1j * (d2[:m, m:] - d2[m:, :m]))
    return hol, antihol, mixed


def _step(point, rel: float) -> float:
    point = np.atleast_1d(np.asarray(point, dtype=complex))
    scale = float(np.min(np.abs(point)))
    if scale == 0:
        raise DomainError("El estencil no puede centrarse en z = 0")
    return rel * scale


def _guarded(f: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    def wrapped(z):
        try:
            return f(z)
        except (ConvergenceError, DomainError) as e:
            raise DomainError(f"El estencil sale del dominio del modelo en z={z.tolist()}: {e}")
    return wrapped


def fd_levi_form(phi: Callable[[np.ndarray], float], point, step: float,
                 levels: int = FD_RICHARDSON_LEVELS) -> np.ndarray:
    """Matriz ∂_i∂̄_j φ por diferencias."""
    _, _, mixed = wirtinger_derivatives(phi, point, step, levels)
    return mixed


def potential_at(model: Model, z) -> float:
    Q = polarization_of(model)
    omega = model_jet(model, z, 0).value()
    P = complex(Q.pairing(omega, np.conj(omega)))
    if P.real <= 0:
        raise DomainError("(Ω,Ω̄) ≤ 0 en el estencil", P=str(P))
    return P.real


def fd_metric_from_potential(model: Model, point, cfg: Optional[FDConfig] = None) -> MetricField:
    cfg = cfg or FDConfig()
    point = np.atleast_1d(np.asarray(point, dtype=complex))
    phi = _guarded(lambda z: -np.log(potential_at(model, z)))
    G = fd_levi_form(phi, point, _step(point, cfg.potential_step), cfg.richardson_levels)
    return MetricField(point=point, matrix=G, role="fd_potencial")


def fd_curvature(metric_fn: Callable[[np.ndarray], np.ndarray], point,
                 cfg: Optional[FDConfig] = None, step: Optional[float] = None,
                 levels: Optional[int] = None) -> CurvatureField:
    """R_{ij̄kl̄} = ∂_k∂̄_l g_{ij̄} − g^{pq̄}∂_k g_{iq̄}∂̄_l g_{pj̄} por diferencias."""
    cfg = cfg or FDConfig()
    point = np.atleast_1d(np.asarray(point, dtype=complex))
    h = step if step is not None else _step(point, cfg.step)
    dg, dbg, ddg = wirtinger_derivatives(_guarded(metric_fn), point, h, levels or cfg.richardson_levels)
    G = np.asarray(metric_fn(point), dtype=complex)
    ginv = inverse_metric(G)
    R = ddg.transpose(2, 3, 0, 1) - np.einsum("pq,kiq,lpj->ijkl", ginv, dg, dbg)
    return CurvatureField(point=point, tensor=R, role="fd")


def wp_metric_fn(model: Model) -> Callable[[np.ndarray], np.ndarray]:
    Q = polarization_of(model)
    return lambda z: wp_metric(model_jet(model, z, 2), Q).matrix


def ph_metric_fn(model: Model, mu: float) -> Callable[[np.ndarray], np.ndarray]:
    Q = polarization_of(model)

    def evaluate(z):
        section = model_jet(model, z, 3)
        kj = kahler_jets(section, Q)
        g = wp_metric(section, Q, kj=kj)
        frame = covariant_frame(section, Q, kj=kj)
        return ph_metric(g, f_tensor(frame, Q), mu).matrix
    return evaluate


def _relative(diff: np.ndarray, ref: np.ndarray) -> float:
    scale = float(np.linalg.norm(ref))
    nrm = float(np.linalg.norm(diff))
    return nrm / scale if scale > 0 else nrm


def richardson_gain(model: Model, point, step: float = 1e-2) -> ValidationReport:
    """Calibración: error de un paso frente a Richardson, contra Strominger cerrado."""
    point = np.atleast_1d(np.asarray(point, dtype=complex))
    Q = polarization_of(model)
    section = model_jet(model, point, 3)
    kj = kahler_jets(section, Q)
    g = wp_metric(section, Q, kj=kj)
    exact = wp_curvature(covariant_frame(section, Q, kj=kj), g, Q).tensor
    h = _step(point, step)
    single = fd_curvature(wp_metric_fn(model), point, step=h, levels=1).tensor
    extrap = fd_curvature(wp_metric_fn(model), point, step=h, levels=2).tensor
    e1 = _relative(single - exact, exact)
    e2 = _relative(extrap - exact, exact)
    gain = e1 / e2 if e2 > 0 else float("inf")
    report = ValidationReport(title="Calibración de Richardson")
    report.checks.append(make_check("ganancia_richardson", "error(1 paso)/error(Richardson) ≥ 10",
                                    1.0 / gain if gain else float("inf"), 0.1,
                                    note=f"ganancia {gain:.3g}"))
    report.data.update({"error_un_paso": e1, "error_richardson": e2, "ganancia": gain})
    return report


# ======================================================================
# Batería de identidades
# ======================================================================
def corrupt_polarization(Q: PolarizationForm) -> PolarizationForm:
    """Cambia el signo de la entrada Q[0, d−1] (sólo esa)."""
    M = Q.matrix.copy()
    M[0, -1] = -M[0, -1]
    return PolarizationForm(M, Q.weight)


_FORMULAS = {
    "D_ortogonal_omega": "(D_iΩ, Ω̄) = 0",
    "dbar_D": "∂̄_j D_iΩ = g_{ij̄}Ω",
    "metrica_por_D": "g_{ij̄} = −(D_iΩ, conj D_jΩ)/(Ω,Ω̄)",
    "DD_ortogonal_omega": "(D_jD_iΩ, Ω̄) = 0",
    "DD_ortogonal_D": "(D_jD_iΩ, conj D_lΩ) = 0",
    "DD_simetrico": "D_jD_iΩ = D_iD_jΩ",
    "T_proyeccion": "T_{kαi} sin componentes en H^{n,0} ⊕ H^{n−1,1}",
    "T_descomposicion": "T = E + D_kD_αD_iΩ",
    "T_omega": "(T_{kαi}, Ω̄) = 0",
    "T_simetria": "T_{kαi} simétrico",
    "xi_dd": "ξ_{ijkl} = (D_kD_lΩ, D_jD_iΩ)",
    "xi_ddd": "ξ_{ijkl} = −(D_jD_kD_lΩ, D_iΩ)",
    "xi_simetria": "ξ_{ijkl} totalmente simétrico",
    "dbar_DD": "∂̄_l(D_αD_iΩ) = F_{iτ̄αl̄} g^{γτ̄} D_γΩ",
    "strominger_jet": "g g + g g − F = ∂∂̄g − g^{-1}∂g∂̄g",
    "ricci_cerrada": "Ric = −(m+1)g + g^{kl̄}F_{ij̄kl̄}",
    "oraculo_metrica": "g = −∂∂̄ log(Ω,Ω̄) por diferencias",
    "oraculo_curvatura_wp": "Strominger = curvatura de g por diferencias",
    "oraculo_curvatura_ph": "R̃ de ω_μ = curvatura de h por diferencias",
}


class _PointSuite:
    """Comprobaciones de un punto; los errores de una identidad la marcan como fallida."""

    def __init__(self, model: Model, point, cfg: FDConfig, fault: Optional[Fault], include_fd: bool,
                 mu: Optional[float]):
        self.model = model
        self.point = np.atleast_1d(np.asarray(point, dtype=complex))
        self.label = str(self.point.tolist())
        self.cfg = cfg
        self.fault = fault
        self.include_fd = include_fd
        self.Q = polarization_of(model)
        self.Qf = corrupt_polarization(self.Q) if fault is Fault.FLIP_Q_ENTRY else self.Q
        self.strict = fault is None
        self.mu = mu
        self.checks: List[CheckResult] = []

    def _add(self, name: str, fn: Callable[[], float]) -> None:
        tol = self.cfg.tolerance(name)
        try:
            residual = fn()
            self.checks.append(make_check(name, _FORMULAS[name], residual, tol, point=self.label))
        except HodgeError as e:
            self.checks.append(make_check(name, _FORMULAS[name], float("nan"), tol, point=self.label,
                                          note=f"{e.codigo}: {e}"))

    def _skip(self, name: str, reason: str) -> None:
        self.checks.append(skipped_check(name, _FORMULAS[name], reason, point=self.label))

    def _frame_at(self, z, order: int):
        section = model_jet(self.model, z, order)
        kj = kahler_jets(section, self.Qf, strict=self.strict)
        frame = covariant_frame(section, self.Qf, kj=kj, strict=self.strict,
                                drop_kahler_term=self.fault is Fault.DROP_KAHLER_TERM)
        return section, kj, frame

    def run(self) -> List[CheckResult]:
        Q = self.Q
        n = Q.weight
        try:
            section, kj, frame = self._frame_at(self.point, 4)
        except HodgeError as e:
            self.checks.append(make_check("evaluacion", "jets evaluables en el punto", float("nan"), 0.0,
                                          point=self.label, note=f"{e.codigo}: {e}"))
            return self.checks
        m = frame.m
        G = kj.g.value()
        g = MetricField(point=self.point, matrix=G)
        P = complex(Q.pairing(frame.omega, np.conj(frame.omega)))
        residuals: Dict[str, float] = {}

        def frame_residual(key):
            if not residuals:
                residuals.update(frame_residuals(frame, Q))
            return residuals[key]

        self._add("D_ortogonal_omega", lambda: frame_residual("D_ortogonal"))
        self._add("metrica_por_D", lambda: _relative(
            G + Q.pairing(frame.D[:, None, :], np.conj(frame.D)[None, :, :]) / P, G))
        self._add("DD_ortogonal_omega", lambda: frame_residual("DD_ortogonal_omega"))
        self._add("DD_ortogonal_D", lambda: frame_residual("DD_ortogonal_D"))
        self._add("DD_simetrico", lambda: frame_residual("DD_simetrico"))

        F = f_tensor(frame, Q)
        self._add("strominger_jet", lambda: _relative(
            wp_curvature(frame, g, Q, F=F).tensor - exact_curvature(kj).tensor, exact_curvature(kj).tensor))
        self._add("ricci_cerrada", lambda: wp_ricci(wp_curvature(frame, g, Q, F=F), g, F=F)
                  .data["closed_form_residual"])

        mu = self.mu if self.mu is not None else default_mu(m, n)
        chain = None
        if n >= 3:
            try:
                dec = decomposition_at(section, Q, check=self.strict)
                chain = third_order_chain(section, frame, g, dec, Q, mu)
            except HodgeError as e:
                for key in ("proyeccion", "descomposicion", "omega", "simetria"):
                    name = f"T_{key}"
                    self.checks.append(make_check(name, _FORMULAS[name], float("nan"), self.cfg.tolerance(name),
                                                  point=self.label, note=f"{e.codigo}: {e}"))
        if chain is not None:
            for key, src in (("proyeccion", "proyeccion_superior"), ("descomposicion", "descomposicion"),
                             ("omega", "ortogonal_omega"), ("simetria", "simetria")):
                self._add(f"T_{key}", lambda src=src: chain.residuals[src])
        elif n < 3:
            for key in ("proyeccion", "descomposicion", "omega", "simetria"):
                self._skip(f"T_{key}", "requiere n ≥ 3")

        if n == 4 and chain is not None:
            xi_res = yukawa4_residuals(yukawa4(section, Q), frame, chain, Q)
            for key in ("dd", "ddd", "simetria"):
                self._add(f"xi_{key}", lambda key=key: xi_res[key])
        else:
            for key in ("dd", "ddd", "simetria"):
                self._skip(f"xi_{key}", "requiere n = 4")

        if not self.include_fd:
            for name in FD_CHECKS:
                self._skip(name, "diferencias finitas desactivadas")
            return self.checks

        h = _step(self.point, self.cfg.step)
        levels = self.cfg.richardson_levels
        self._add("dbar_D", lambda: self._dbar_D(h, levels, G, frame.omega))
        self._add("dbar_DD", lambda: self._dbar_DD(h, levels, F, G, frame.D))
        self._add("oraculo_metrica", lambda: _relative(
            fd_metric_from_potential(self.model, self.point, self.cfg).matrix - G, G))
        R_wp = wp_curvature(frame, g, Q, F=F).tensor
        self._add("oraculo_curvatura_wp", lambda: _relative(
            fd_curvature(wp_metric_fn(self.model), self.point, self.cfg).tensor - R_wp, R_wp))
        if chain is not None and self.strict:
            self._add("oraculo_curvatura_ph", lambda: self._ph_oracle(chain, frame, g, F, mu))
        else:
            self._skip("oraculo_curvatura_ph", "requiere n ≥ 3 y modelo sin fallos inyectados")
        return self.checks

    def _dbar_D(self, h: float, levels: int, G: np.ndarray, omega: np.ndarray) -> float:
        D_fn = _guarded(self._first_covariant)
        _, dbar, _ = wirtinger_derivatives(D_fn, self.point, h, levels)  # dbar[j, i, :]
        expected = G.T[:, :, None] * omega[None, None, :]
        return _relative(dbar - expected, expected)

    def _first_covariant(self, z) -> np.ndarray:
        section = model_jet(self.model, z, 2)
        kj = kahler_jets(section, self.Qf, strict=self.strict)
        dO = np.array([section.derivative(tuple(int(i == k) for i in range(section.m)))
                       for k in range(section.m)])
        if self.fault is Fault.DROP_KAHLER_TERM:
            return dO
        return dO + kj.K.value()[:, None] * section.value()[None, :]

    def _dbar_DD(self, h: float, levels: int, F: np.ndarray, G: np.ndarray, D: np.ndarray) -> float:
        DD_fn = _guarded(lambda z: self._frame_at(z, 3)[2].DD)
        _, dbar, _ = wirtinger_derivatives(DD_fn, self.point, h, levels)  # dbar[l, α, i, :]
        ginv = inverse_metric(G)
        expected = np.einsum("ital,gt,gx->laix", F, ginv, D)
        return _relative(dbar - expected, expected)

    def _ph_oracle(self, chain, frame, g: MetricField, F: np.ndarray, mu: float) -> float:
        h = ph_metric(g, F, mu)
        R = ph_curvature(chain, frame, g, h, F, self.Q).tensor
        fd = fd_curvature(ph_metric_fn(self.model, mu), self.point, self.cfg).tensor
        return _relative(fd - R, R)


def lemma_suite(model: Model, points: Sequence, cfg: Optional[FDConfig] = None,
                fault: Optional[Fault] = None, include_fd: bool = True, mu: Optional[float] = None,
                jobs: int = 1) -> SuiteReport:
    cfg = cfg or FDConfig()
    name = getattr(model, "name", "")
    report = SuiteReport(title="Batería de identidades", model=name)
    suites = [_PointSuite(model, z, cfg, fault, include_fd, mu) for z in points]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(lambda s: s.run(), suites))
    for suite, checks in zip(suites, results):
        report.points.append(suite.label)
        report.checks.extend(checks)
    report.data["fault"] = fault.value if fault else None
    report.data["fd"] = include_fd
    failures = report.failures()
    if failures:
        first = failures[0]
        report.data["primera_falla"] = {"name": first.name, "formula": first.formula, "point": first.point}
        logger.error(f"Batería '{name}': falla {first.name} ({first.formula}) en z={first.point}")
    else:
        logger.info(f"Batería '{name}': {len(report.checks)} comprobaciones correctas")
    return report
