# core/service.py
"""
Orquestación de las subórdenes: validación de modelos, barridos por puntos,
curvatura en un punto, asintótica en dimensión uno y batería de identidades.
Las funciones devuelven informes Pydantic o filas de CSV; la escritura de
ficheros se hace siempre en el hilo principal.
"""
import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, TextIO, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from core.constants import DEFAULT_SEED, PAIRS_PER_POINT, RESIDUAL_TOL
from core.dim1_asymptotics import (
    boundary_classifier,
    boundary_model,
    case1_estimates,
    completeness_test,
    curvature_boundedness_scan,
    first_fraction_bound,
    two_fraction_form,
    pairing_moments,
    truncation_bound,
    weight_polynomial,
    wp_leading,
    yukawa_chain,
)
from core.errors import DomainError, HodgeError, InputError
from core.hodge_core import validate_polarization
from core.hodge_metric import closed_form_hodge, domination_report, hodge_metric_direct
from core.logger import get_logger
from core.model_file import ModelDefaults, RaySpec, parse_complex
from core.partial_hodge import (
    default_mu,
    fourfold_report,
    ph_curvature,
    ph_metric,
    ph_residuals,
    ph_scalar_curvature,
    third_order_chain,
)
from core.reports import SuiteReport, ValidationReport, make_check, skipped_check
from core.utils import format_number
from core.verification import FDConfig, lemma_suite, richardson_gain
from core.vhs_models import (
    Model,
    NilpotentOrbitModel,
    decomposition_at,
    model_jet,
    monodromy_logarithms,
    ode_residual,
    polarization_of,
    validate_orbit_model,
    wp_geometry_checklist,
)
from core.wp_geometry import (
    CURVATURE_CONVENTION,
    covariant_frame,
    f_tensor,
    holomorphic_sectional,
    kahler_jets,
    scalar_curvature,
    wp_curvature,
    wp_metric,
    wp_ricci,
)

logger = get_logger(__name__)

PH_SYMMETRY_TOL = 1e-6

CSV_COLUMNS_HELP = """\
Columnas del CSV (en este orden; sólo las de las magnitudes pedidas):
  re_z<i>, im_z<i>     coordenadas del punto
  r, u                 min_i |z_i| y log(1/r)
  wp_g<i><j>_re/_im    entradas de g_WP
  wp_hsc_max           máximo de −R_{iīiī}/g_{iī}² (seccional holomorfa WP, signo usual)
  wp_scalar            −g^{ij̄}g^{kl̄}R_{ij̄kl̄}
  wp_hsc_positive      bandera: alguna seccional holomorfa WP > 0
  ph_mu, ph_rho        μ y curvatura escalar de ω_μ
  ph_hsc_min           min R̃_{iīiī}/h_{iī}²
  ok_ph                predicados de cuatro-pliegue (n = 4) o simetría de R̃
  hodge_h<i><j>_re/_im entradas de h^H (suma de normas de Hom)
  hodge_closed_residual, hodge_C, ok_hodge
  dim1_lambda, dim1_A, dim1_F111_abs, dim1_F1111_abs, dim1_rho, dim1_fraction_residual, ok_dim1
  ok                   conjunción de todas las banderas ok_*
"""

Quantity = str


# ======================================================================
# Especificación de barrido y puntos de muestreo
# ======================================================================
class GridSpec(BaseModel):
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    resolution: int = Field(5, ge=1)

    @model_validator(mode="after")
    def _check_box(self):
        if self.re_max < self.re_min or self.im_max < self.im_min:
            raise ValueError("Caja de la malla vacía")
        return self


class SweepSpec(BaseModel):
    kind: Literal["ray", "grid", "list"] = "ray"
    ray: Optional[RaySpec] = None
    grid: Optional[GridSpec] = None
    points: List[List[complex]] = Field(default_factory=list)
    quantities: List[Quantity] = Field(default_factory=lambda: ["wp"])

    @field_validator("quantities")
    @classmethod
    def _check_quantities(cls, v):
        for q in v:
            if q in ("wp", "hodge", "dim1", "ph"):
                continue
            if q.startswith("ph:"):
                try:
                    float(q[3:])
                except ValueError:
                    raise ValueError(f"μ inválido en '{q}'")
                continue
            raise ValueError(f"Magnitud desconocida: '{q}' (usa wp, ph[:μ], hodge, dim1)")
        if not v:
            raise ValueError("Se requiere al menos una magnitud")
        return v

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == "grid" and self.grid is None:
            raise ValueError("Un barrido 'grid' necesita la caja de la malla")
        if self.kind == "list" and not self.points:
            raise ValueError("Un barrido 'list' necesita al menos un punto")
        return self


def spec_with_defaults(spec: SweepSpec, defaults: ModelDefaults) -> SweepSpec:
    """Precedencia: opciones > sección `defaults` del modelo > constantes."""
    if spec.kind == "ray" and spec.ray is None:
        if defaults.ray is None:
            raise InputError("Barrido por rayo sin parámetros y el modelo no define 'defaults.ray'")
        spec = spec.model_copy(update={"ray": defaults.ray})
    if spec.kind == "list" and not spec.points and defaults.points:
        spec = spec.model_copy(update={"points": _listed_points(defaults)})
    return spec


def _listed_points(defaults: ModelDefaults) -> List[List[complex]]:
    """Un punto es una entrada compleja (m = 1) o una lista de entradas."""
    return [[parse_complex(c) for c in (p if isinstance(p, list) and p and isinstance(p[0], list) else [p])]
            for p in defaults.points]


def default_points(defaults: ModelDefaults, m: int, count: int = 3) -> List[np.ndarray]:
    """Puntos de muestra del modelo: `defaults.points` o los primeros `count` del rayo por defecto."""
    if defaults.points:
        return sample_points(SweepSpec(kind="list", points=_listed_points(defaults)), m)
    if defaults.ray is not None:
        ray = defaults.ray.model_copy(update={"count": min(defaults.ray.count, count)})
        return sample_points(SweepSpec(kind="ray", ray=ray), m)
    raise InputError("Indica puntos: el modelo no define 'defaults.points' ni 'defaults.ray'")


def sample_points(spec: SweepSpec, m: int) -> List[np.ndarray]:
    if spec.kind == "ray":
        ray = spec.ray
        pts = []
        for j in range(ray.count):
            z = ray.r0 * ray.factor ** j * complex(math.cos(ray.angle), math.sin(ray.angle))
            pts.append(np.full(m, z, dtype=complex))
        return pts
    if spec.kind == "grid":
        if m != 1:
            raise InputError("La malla sólo está disponible para m = 1", m=m)
        g = spec.grid
        xs = np.linspace(g.re_min, g.re_max, g.resolution)
        ys = np.linspace(g.im_min, g.im_max, g.resolution)
        return [np.array([complex(x, y)]) for y in ys for x in xs]
    pts = []
    for p in spec.points:
        if len(p) != m:
            raise InputError(f"El punto {p} no tiene {m} coordenadas", m=m)
        pts.append(np.asarray(p, dtype=complex))
    return pts


def _mu_of(quantity: str, model: Model, defaults_mu: Optional[float]) -> float:
    Q = polarization_of(model)
    if quantity.startswith("ph:"):
        return float(quantity[3:])
    return defaults_mu if defaults_mu is not None else default_mu(model.m, Q.weight)


# ======================================================================
# Fila de un punto
# ======================================================================
def _matrix_columns(prefix: str, M: np.ndarray) -> Dict[str, float]:
    cols = {}
    for i in range(M.shape[0]):
        for j in range(M.shape[1]):
            cols[f"{prefix}{i + 1}{j + 1}_re"] = float(M[i, j].real)
            cols[f"{prefix}{i + 1}{j + 1}_im"] = float(M[i, j].imag)
    return cols


def compute_row(model: Model, z: np.ndarray, quantities: Sequence[str],
                mu: Optional[float] = None) -> Dict[str, Any]:
    Q = polarization_of(model)
    n = Q.weight
    m = model.m
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    row: Dict[str, Any] = {}
    for i, zi in enumerate(z):
        row[f"re_z{i + 1}"] = float(zi.real)
        row[f"im_z{i + 1}"] = float(zi.imag)
    r = float(np.min(np.abs(z)))
    row["r"] = r
    row["u"] = math.log(1.0 / r) if 0 < r < 1 else float("nan")

    order = 3 if list(quantities) == ["wp"] else 4
    section = model_jet(model, z, order)
    kj = kahler_jets(section, Q)
    g = wp_metric(section, Q, kj=kj)
    frame = covariant_frame(section, Q, kj=kj)
    F = f_tensor(frame, Q)
    R = wp_curvature(frame, g, Q, F=F)
    oks = []

    if "wp" in quantities:
        row.update(_matrix_columns("wp_g", g.matrix))
        hsc = -holomorphic_sectional(R.tensor, g.matrix)
        row["wp_hsc_max"] = float(np.max(hsc))
        row["wp_scalar"] = scalar_curvature(R.tensor, g.matrix)
        row["wp_hsc_positive"] = bool(np.max(hsc) > 0)

    ph_quantities = [q for q in quantities if q == "ph" or q.startswith("ph:")]
    dec = None
    for q in ph_quantities:
        mu_q = _mu_of(q, model, mu)
        prefix = "ph" if len(ph_quantities) == 1 else f"ph{mu_q:g}"
        h = ph_metric(g, F, mu_q)
        dec = dec or decomposition_at(section, Q)
        chain = third_order_chain(section, frame, g, dec, Q, mu_q)
        Rt = ph_curvature(chain, frame, g, h, F, Q)
        row[f"{prefix}_mu"] = mu_q
        row[f"{prefix}_rho"] = ph_scalar_curvature(Rt, h)
        row[f"{prefix}_hsc_min"] = float(np.min(holomorphic_sectional(Rt.tensor, h.matrix)))
        if n == 4 and abs(mu_q - (m + 2)) < 1e-12:
            ok = fourfold_report([(Rt, h)], seed=DEFAULT_SEED, pairs=PAIRS_PER_POINT).passed
        else:
            ok = ph_residuals(Rt)["simetria"] < PH_SYMMETRY_TOL
        row[f"ok_{prefix}"] = bool(ok)
        oks.append(ok)

    if "hodge" in quantities:
        dec = dec or decomposition_at(section, Q)
        hH = hodge_metric_direct(section, dec, Q)
        row.update(_matrix_columns("hodge_h", hH.matrix))
        closed = closed_form_hodge(g, wp_ricci(R, g, F=F), n)
        if closed is not None:
            res = float(np.linalg.norm(hH.matrix - closed) / np.linalg.norm(closed))
        else:
            res = float("nan")
        C = domination_report([g], [hH]).data["C"]
        row["hodge_closed_residual"] = res
        row["hodge_C"] = C
        ok = (closed is None or res < RESIDUAL_TOL) and C <= 1 + RESIDUAL_TOL
        row["ok_hodge"] = bool(ok)
        oks.append(bool(ok))

    if "dim1" in quantities:
        chain1 = yukawa_chain(section, Q)
        fractions = two_fraction_form(chain1)
        row["dim1_lambda"] = chain1.lam
        row["dim1_A"] = chain1.A
        row["dim1_F111_abs"] = abs(chain1.F111)
        row["dim1_F1111_abs"] = abs(chain1.F1111)
        row["dim1_rho"] = chain1.rho
        kres = abs(fractions["rho"] - chain1.rho) / max(abs(chain1.rho), 1e-300)
        row["dim1_fraction_residual"] = kres
        row["ok_dim1"] = bool(kres < 1e-9)
        oks.append(row["ok_dim1"])

    row["ok"] = all(oks)
    return row


def run_sweep(model: Model, points: Sequence[np.ndarray], quantities: Sequence[str],
              mu: Optional[float] = None, jobs: int = 1) -> List[Dict[str, Any]]:
    logger.info(f"Barrido de {len(points)} puntos ({', '.join(quantities)}) con {jobs} hilo(s)")
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        rows = list(pool.map(lambda z: compute_row(model, z, quantities, mu), points))
    flagged = [i for i, row in enumerate(rows) if row.get("wp_hsc_positive")]
    if flagged and len(flagged) < len(rows):
        logger.info(f"Cambio de signo de la seccional holomorfa WP en las filas {flagged[0]}..{flagged[-1]}")
    return rows


def sign_changes(rows: Sequence[Dict[str, Any]], column: str) -> List[int]:
    """Índices i con signo distinto entre las filas i e i+1."""
    vals = [row.get(column) for row in rows]
    return [i for i in range(len(vals) - 1)
            if vals[i] is not None and vals[i + 1] is not None and vals[i] * vals[i + 1] < 0]


def write_csv(rows: Sequence[Dict[str, Any]], out: Union[str, Path, TextIO]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)

    def emit(handle):
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_number(row.get(c)) for c in columns])

    if isinstance(out, (str, Path)):
        with open(out, "w", newline="", encoding="utf-8") as handle:
            emit(handle)
    else:
        emit(out)
    return columns


def read_csv(path: Union[str, Path]) -> List[Dict[str, str]]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"No existe el CSV: {path}")
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def rows_to_text(rows: Sequence[Dict[str, Any]]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


# ======================================================================
# Subórdenes
# ======================================================================
def validate_model(model: Model, points: Sequence) -> ValidationReport:
    Q = polarization_of(model)
    if isinstance(model, NilpotentOrbitModel):
        report = validate_orbit_model(model)
    else:
        report = validate_polarization(Q)
        report.title = f"Validación del modelo de Picard–Fuchs {model.name}"
        for z in points:
            report.checks.append(make_check("ecuacion", "Σ c_j θ^jΩ = 0", ode_residual(model, z[0]),
                                            RESIDUAL_TOL, point=str(np.asarray(z).tolist())))
        N = monodromy_logarithms(model)[0]
        report.data["N_nilpotency_index"] = next(
            (k for k in range(1, Q.weight + 2) if np.linalg.norm(np.linalg.matrix_power(N, k)) < 1e-12), None)
    report.extend(wp_geometry_checklist(model, points))
    return report


def curvature_at(model: Model, z, mu: Optional[float] = None) -> Dict[str, Any]:
    """Métrica, curvatura WP y (si n ≥ 3) curvatura de ω_μ en un punto, como diccionario serializable."""
    Q = polarization_of(model)
    n = Q.weight
    m = model.m
    section = model_jet(model, z, 4)
    kj = kahler_jets(section, Q)
    g = wp_metric(section, Q, kj=kj)
    frame = covariant_frame(section, Q, kj=kj)
    F = f_tensor(frame, Q)
    R = wp_curvature(frame, g, Q, F=F)
    ric = wp_ricci(R, g, F=F)

    def cplx(a):
        a = np.asarray(a)
        return {"re": a.real.tolist(), "im": a.imag.tolist()}

    out: Dict[str, Any] = {
        "point": cplx(section.point),
        "convention": CURVATURE_CONVENTION,
        "wp": {"g": cplx(g.matrix), "R": cplx(R.tensor), "ricci": cplx(ric.matrix),
               "scalar": scalar_curvature(R.tensor, g.matrix),
               "pairing_residual": g.data["pairing_residual"]},
    }
    if n >= 3:
        mu = mu if mu is not None else default_mu(m, n)
        h = ph_metric(g, F, mu)
        dec = decomposition_at(section, Q)
        chain = third_order_chain(section, frame, g, dec, Q, mu)
        Rt = ph_curvature(chain, frame, g, h, F, Q)
        out["ph"] = {"mu": mu, "h": cplx(h.matrix), "R": cplx(Rt.tensor),
                     "scalar": ph_scalar_curvature(Rt, h), "chain_residuals": chain.residuals}
    return out


def asymptotics_report(model: Model, radii: Optional[Sequence[float]] = None, mu_trunc: float = 0.5,
                       scan_metric: str = "hodge") -> SuiteReport:
    """Completitud, polinomio de pesos, asintótica dominante, clasificación, truncación y barrido."""
    Q = polarization_of(model)
    name = getattr(model, "name", "")
    report = SuiteReport(title="Asintótica en dimensión uno", model=name)
    if model.m != 1:
        report.checks.append(skipped_check("dimension", "m = 1", f"m = {model.m}: fuera de alcance"))
        return report
    bm = boundary_model(model)
    complete, comp = completeness_test(bm)
    report.data["complete"] = complete
    report.data["NA0_ratio"] = comp.data["NA0_ratio"]
    poly = weight_polynomial(bm)
    report.data["weight_polynomial"] = poly.tolist()
    report.data["l"] = len(poly) - 1
    moments = pairing_moments(bm)
    constant = len(poly) == 1
    report.checks.append(make_check(
        "polinomio_constante", "constante ⇔ (N^lA₀, Ā₀) = 0 ∀ l ≥ 1",
        0.0, 0.0, passed=constant == all(abs(x) < 1e-12 * max(1.0, abs(poly[0])) for x in moments)))
    cls = boundary_classifier(bm)
    report.data["classification"] = {"case": cls.case, "k": cls.k, "l": cls.l, "status": cls.status,
                                     "degenerate": cls.degenerate, "residuals": cls.residuals}
    if complete:
        _, lead = wp_leading(model)
        report.extend(lead)
        report.data["wp_leading"] = lead.data
    radii = radii or [bm.delta / 4 * 0.5 ** k for k in range(1, 11)]
    for r in radii:
        est = truncation_bound(bm, mu_trunc, 0, r)
        report.checks.append(make_check(
            "truncacion", "‖cola‖ ≤ C·r^{k₀−s}(log 1/r)^{l₀}", est.empirical / est.bound if est.bound else 0.0,
            1.0, point=format_number(r), note=f"(k₀,l₀) = ({est.k0},{est.l0})"))
    report.extend(first_fraction_bound(np.linspace(0.0, 100.0, 1001)))
    scan = curvature_boundedness_scan(model, metric=scan_metric)
    report.extend(scan)
    report.data["scan"] = {k: v for k, v in scan.data.items() if k != "r"}
    if complete and Q.weight == 3:
        report.extend(case1_estimates(model))
    return report


def verify_model(model: Model, points: Sequence, suite: str = "all", cfg: Optional[FDConfig] = None,
                 seed: int = DEFAULT_SEED, jobs: int = 1) -> SuiteReport:
    """Batería de identidades; con `all` añade Hodge, cotas de cuatro-pliegue y calibración."""
    if suite not in ("identities", "all"):
        raise InputError(f"Batería desconocida: '{suite}' (usa identities o all)")
    report = lemma_suite(model, points, cfg=cfg, jobs=jobs)
    if suite == "identities":
        return report
    Q = polarization_of(model)
    n = Q.weight
    m = model.m
    gs, hs, samples = [], [], []
    for z in points:
        try:
            section = model_jet(model, z, 4)
            kj = kahler_jets(section, Q)
            g = wp_metric(section, Q, kj=kj)
            frame = covariant_frame(section, Q, kj=kj)
            F = f_tensor(frame, Q)
            dec = decomposition_at(section, Q)
            hH = hodge_metric_direct(section, dec, Q)
            gs.append(g)
            hs.append(hH)
            closed = closed_form_hodge(g, wp_ricci(wp_curvature(frame, g, Q, F=F), g, F=F), n)
            label = str(np.atleast_1d(np.asarray(z)).tolist())
            if closed is not None:
                res = float(np.linalg.norm(hH.matrix - closed) / np.linalg.norm(closed))
                report.checks.append(make_check("hodge_cerrada", "h^H = (m+3)g + Ric | 2(m+2)g + 2Ric",
                                                res, RESIDUAL_TOL, point=label))
            if n == 4:
                mu = float(m + 2)
                h = ph_metric(g, F, mu)
                chain = third_order_chain(section, frame, g, dec, Q, mu)
                samples.append((ph_curvature(chain, frame, g, h, F, Q), h))
        except HodgeError as e:
            report.checks.append(make_check("hodge_cerrada", "evaluación en el punto", float("nan"),
                                            RESIDUAL_TOL, point=str(z), note=f"{e.codigo}: {e}"))
    if gs:
        report.extend(domination_report(gs, hs))
    if samples:
        report.extend(fourfold_report(samples, seed=seed))
    if points:
        try:
            report.extend(richardson_gain(model, points[0]))
        except DomainError as e:
            report.checks.append(skipped_check("ganancia_richardson", "calibración", str(e)))
    return report
