# cli/main.py
"""
Línea de comandos: validate, sweep, curvature, asymptotics, verify, report y
schema.

Códigos de salida: 0 = todos los predicados se cumplen; 1 = algún predicado
falla; 2 = error de entrada o de dominio (mensaje JSON en stderr).
"""
import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

# --- Hacer que 'core' sea importable ejecutando como script ---
ROOT_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT_DIR not in sys.path:
    sys.path.insert(0, ROOT_DIR)

import numpy as np
from pydantic import ValidationError

from core.config import get_log_level, get_output_dir
from core.constants import DEFAULT_SEED
from core.errors import HodgeError, InputError
from core.logger import configure_root, get_logger
from core.model_file import ModelFile, RaySpec, load_model, model_json_schema
from core.plot_svg import emit_plot
from core.report_pdf import generate_sweep_pdf
from core.service import (
    CSV_COLUMNS_HELP,
    GridSpec,
    SweepSpec,
    asymptotics_report,
    curvature_at,
    default_points,
    read_csv,
    run_sweep,
    sample_points,
    sign_changes,
    spec_with_defaults,
    validate_model,
    verify_model,
    write_csv,
)
from core.utils import output_filename, parse_kv, parse_point
from core.verification import FDConfig

logger = get_logger("cli")

EXIT_OK = 0
EXIT_PREDICATE = 1
EXIT_INPUT = 2


class CliParser(argparse.ArgumentParser):
    """ArgumentParser que convierte los errores de uso en InputError."""

    def error(self, message):
        raise InputError(f"Argumentos inválidos: {message}", uso=self.format_usage().strip())


def _normalize_argv(argv: Sequence[str]) -> List[str]:
    """'--ph:4' → '--ph', '4'."""
    out: List[str] = []
    for tok in argv:
        if tok.startswith("--ph:"):
            out.extend(["--ph", tok[5:]])
        else:
            out.append(tok)
    return out


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR (por defecto HODGE_LOG_LEVEL)")
    common.add_argument("--out", default=None, help="Fichero de salida (por defecto stdout)")
    common.add_argument("--jobs", type=int, default=1, help="Hilos para evaluar puntos")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Semilla del muestreo aleatorio")

    parser = CliParser(
        prog="hodge",
        description="Métricas de Weil–Petersson, Hodge parcial y Hodge a partir de variaciones de estructura de Hodge.",
        epilog=CSV_COLUMNS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    p = sub.add_parser("validate", parents=[common], help="Lista de comprobación del modelo")
    p.add_argument("model")
    p.add_argument("--points", nargs="+", default=None, help="Puntos 'z1;z2' (complejo o 're,im')")

    p = sub.add_parser("sweep", parents=[common], help="Barrido por rayo, malla o lista de puntos → CSV",
                       epilog=CSV_COLUMNS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("model")
    p.add_argument("--ray", nargs="+", default=None, metavar="CLAVE=VALOR", help="r0, factor, count, angle")
    p.add_argument("--grid", nargs="+", default=None, metavar="CLAVE=VALOR",
                   help="re_min, re_max, im_min, im_max, resolution")
    p.add_argument("--points", nargs="+", default=None)
    p.add_argument("--wp", action="store_true")
    p.add_argument("--ph", nargs="?", action="append", const="", default=None, metavar="MU",
                   help="ω_μ (repetible; también --ph:μ)")
    p.add_argument("--hodge", action="store_true")
    p.add_argument("--dim1", action="store_true")
    p.add_argument("--plot", nargs="+", default=None, metavar="COLUMNA", help="SVG de columnas (junto al CSV; sin --out, en HODGE_OUTPUT_DIR)")

    p = sub.add_parser("curvature", parents=[common], help="Métrica y curvaturas en un punto (JSON)")
    p.add_argument("model")
    p.add_argument("--point", required=True)
    p.add_argument("--mu", type=float, default=None)

    p = sub.add_parser("asymptotics", parents=[common], help="Asintótica en dimensión uno (JSON)")
    p.add_argument("model")
    p.add_argument("--metric", choices=("hodge", "partial"), default="hodge")
    p.add_argument("--mu-trunc", type=float, default=0.5)

    p = sub.add_parser("verify", parents=[common], help="Batería de identidades (JSON)")
    p.add_argument("model")
    p.add_argument("--suite", choices=("identities", "all"), default="all")
    p.add_argument("--points", nargs="+", default=None)
    p.add_argument("--step", type=float, default=None, help="Paso relativo de diferencias finitas")
    p.add_argument("--richardson", type=int, default=None, help="Niveles de Richardson")

    p = sub.add_parser("report", parents=[common], help="SVG y resumen PDF de un CSV de barrido")
    p.add_argument("csv")
    p.add_argument("--column", required=True)
    p.add_argument("--svg", default=None, help="Ruta del SVG (por defecto junto al CSV)")
    p.add_argument("--pdf", default=None, help="Ruta del resumen PDF (opcional)")

    sub.add_parser("schema", parents=[common], help="Esquema JSON versionado del fichero de modelo")
    return parser


# ======================================================================
# Auxiliares
# ======================================================================
def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Salida escrita en {out}")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _points(args, spec: ModelFile, m: int) -> List[np.ndarray]:
    if args.points:
        return sample_points(SweepSpec(kind="list", points=[parse_point(p) for p in args.points]), m)
    return default_points(spec.defaults, m)


def _numbers(raw: Dict[str, str], ints: Sequence[str] = ()) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, val in raw.items():
        try:
            out[key] = int(val) if key in ints else float(val)
        except ValueError:
            raise InputError(f"Valor numérico inválido para '{key}': '{val}'")
    return out


def _sweep_spec(args, spec: ModelFile) -> SweepSpec:
    quantities: List[str] = []
    if args.wp:
        quantities.append("wp")
    for mu in args.ph or []:
        quantities.append(f"ph:{mu}" if mu else "ph")
    if args.hodge:
        quantities.append("hodge")
    if args.dim1:
        quantities.append("dim1")
    quantities = quantities or ["wp"]
    kinds = [k for k in ("ray", "grid", "points") if getattr(args, k)]
    if len(kinds) > 1:
        raise InputError("Usa sólo una de --ray, --grid o --points")
    if args.grid:
        sweep = SweepSpec(kind="grid", grid=GridSpec(**_numbers(parse_kv(args.grid), ints=("resolution",))),
                          quantities=quantities)
    elif args.points:
        sweep = SweepSpec(kind="list", points=[parse_point(p) for p in args.points], quantities=quantities)
    else:
        ray = None
        if args.ray:
            values = _numbers(parse_kv(args.ray), ints=("count",))
            base = spec.defaults.ray.model_dump() if spec.defaults.ray else {}
            ray = RaySpec(**{**base, **values})
        sweep = SweepSpec(kind="ray", ray=ray, quantities=quantities)
    return spec_with_defaults(sweep, spec.defaults)


# ======================================================================
# Subórdenes
# ======================================================================
def cmd_validate(args) -> int:
    model, spec = load_model(args.model)
    report = validate_model(model, _points(args, spec, model.m))
    _emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_PREDICATE


def cmd_sweep(args) -> int:
    model, spec = load_model(args.model)
    sweep = _sweep_spec(args, spec)
    points = sample_points(sweep, model.m)
    rows = run_sweep(model, points, sweep.quantities, mu=spec.defaults.mu, jobs=args.jobs)
    if args.plot and not args.out:
        out_dir = Path(get_output_dir())
        out_dir.mkdir(parents=True, exist_ok=True)
        args.out = str(out_dir / output_filename(Path(args.model).stem, "sweep", suffix=".csv"))
    flips = sign_changes(rows, "wp_hsc_max")
    if flips:
        logger.warning(f"La curvatura seccional holomorfa WP cambia de signo entre las filas "
                       f"{', '.join(f'{i}-{i + 1}' for i in flips)}")
    if args.out:
        write_csv(rows, args.out)
        logger.info(f"CSV con {len(rows)} filas escrito en {args.out}")
    else:
        write_csv(rows, sys.stdout)
    for column in args.plot or []:
        target = Path(args.out).with_name(output_filename(Path(args.out).stem, column, suffix=".svg"))
        emit_plot(args.out, column, target)
    return EXIT_OK if all(row.get("ok", True) for row in rows) else EXIT_PREDICATE


def cmd_curvature(args) -> int:
    model, spec = load_model(args.model)
    point = parse_point(args.point)
    if len(point) != model.m:
        raise InputError(f"El punto tiene {len(point)} coordenadas y el modelo {model.m}")
    mu = args.mu if args.mu is not None else spec.defaults.mu
    out = curvature_at(model, np.asarray(point, dtype=complex), mu=mu)
    _emit(json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False), args.out)
    return EXIT_OK


def cmd_asymptotics(args) -> int:
    model, _ = load_model(args.model)
    report = asymptotics_report(model, mu_trunc=args.mu_trunc, scan_metric=args.metric)
    _emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_PREDICATE


def cmd_verify(args) -> int:
    model, spec = load_model(args.model)
    overrides: Dict[str, Any] = {}
    if args.step is not None:
        overrides["step"] = args.step
    if args.richardson is not None:
        overrides["richardson_levels"] = args.richardson
    try:
        cfg = FDConfig(**overrides)
    except ValidationError as e:
        raise InputError(f"Configuración de diferencias finitas inválida: {e.errors()[0].get('msg')}")
    report = verify_model(model, _points(args, spec, model.m), suite=args.suite, cfg=cfg,
                          seed=args.seed, jobs=args.jobs)
    _emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_PREDICATE


def cmd_report(args) -> int:
    csv_path = Path(args.csv)
    svg = Path(args.svg) if args.svg else csv_path.with_name(
        output_filename(csv_path.stem, args.column, suffix=".svg"))
    emit_plot(csv_path, args.column, svg)
    if args.pdf:
        rows = read_csv(csv_path)
        buffer = generate_sweep_pdf(rows, title=f"Resumen del barrido {csv_path.stem}")
        Path(args.pdf).write_bytes(buffer.getvalue())
        logger.info(f"PDF escrito en {args.pdf}")
    return EXIT_OK


def cmd_schema(args) -> int:
    _emit(json.dumps(model_json_schema(), indent=2, sort_keys=True, ensure_ascii=False), args.out)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "sweep": cmd_sweep,
    "curvature": cmd_curvature,
    "asymptotics": cmd_asymptotics,
    "verify": cmd_verify,
    "report": cmd_report,
    "schema": cmd_schema,
}


def _error_payload(e: Exception) -> Dict[str, Any]:
    if isinstance(e, HodgeError):
        return e.to_dict()
    if isinstance(e, json.JSONDecodeError):
        return {"error": "entrada", "mensaje": e.msg, "linea": e.lineno, "columna": e.colno}
    return {"error": "entrada", "mensaje": str(e)}


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_normalize_argv(argv))
        level = args.log_level.upper() if args.log_level else get_log_level()
        # Los artefactos que van a stdout no se mezclan con el log
        configure_root(level, stream=sys.stdout if args.out else sys.stderr)
        if args.out:
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args)
    except (HodgeError, ValueError) as e:
        sys.stderr.write(json.dumps(_error_payload(e), ensure_ascii=False, default=str) + "\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
