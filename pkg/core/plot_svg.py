# core/plot_svg.py
"""
Gráficas SVG deterministas (sin marcas de tiempo ni dependencias de
dibujo) de una columna de un CSV de barrido frente a log(1/r) o al eje de
la malla.
"""
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from core.constants import SVG_HEIGHT, SVG_MARGIN, SVG_WIDTH
from core.errors import InputError
from core.logger import get_logger
from core.service import read_csv

logger = get_logger(__name__)

# Columnas que se dibujan con eje vertical logarítmico
LOG_COLUMNS = {"dim1_lambda", "dim1_A", "dim1_F111_abs", "dim1_F1111_abs", "wp_g11_re", "hodge_h11_re"}


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def _column(rows: Sequence[Dict[str, str]], name: str) -> List[float]:
    out = []
    for row in rows:
        try:
            out.append(float(row[name]))
        except (TypeError, ValueError):
            out.append(float("nan"))
    return out


def choose_x_axis(columns: Sequence[str]) -> str:
    for name in ("u", "re_z1"):
        if name in columns:
            return name
    raise InputError("El CSV no tiene columna de abscisas ('u' o 're_z1')")


def render_svg(xs: Sequence[float], ys: Sequence[float], x_label: str, y_label: str,
               log_y: bool = False, title: str = "") -> str:
    pts: List[Tuple[float, float]] = [
        (x, y) for x, y in zip(xs, ys)
        if math.isfinite(x) and math.isfinite(y) and (not log_y or y > 0)
    ]
    if len(pts) < 2:
        raise InputError("Se requieren al menos 2 valores finitos para dibujar")
    pts.sort()
    tx = [p[0] for p in pts]
    ty = [math.log10(p[1]) if log_y else p[1] for p in pts]
    x0, x1 = min(tx), max(tx)
    y0, y1 = min(ty), max(ty)
    if y1 == y0:
        pad = abs(y0) * 0.1 or 1.0
        y0, y1 = y0 - pad, y1 + pad
    if x1 == x0:
        x0, x1 = x0 - 1.0, x1 + 1.0

    W, H, M = SVG_WIDTH, SVG_HEIGHT, SVG_MARGIN

    def sx(x):
        return M + (x - x0) / (x1 - x0) * (W - 2 * M)

    def sy(y):
        return H - M - (y - y0) / (y1 - y0) * (H - 2 * M)

    path = " ".join(f"{'M' if i == 0 else 'L'}{sx(x):.3f},{sy(y):.3f}" for i, (x, y) in enumerate(zip(tx, ty)))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{M}" y1="{H - M}" x2="{W - M}" y2="{H - M}" stroke="black"/>',
        f'<line x1="{M}" y1="{M}" x2="{M}" y2="{H - M}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        parts.append(f'<text x="{sx(t):.3f}" y="{H - M + 18}" font-size="11" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        label = _fmt(10 ** t) if log_y else _fmt(t)
        parts.append(f'<text x="{M - 6}" y="{sy(t) + 4:.3f}" font-size="11" text-anchor="end">{label}</text>')
    if y0 < 0 < y1 and not log_y:
        parts.append(f'<line x1="{M}" y1="{sy(0):.3f}" x2="{W - M}" y2="{sy(0):.3f}" '
                     f'stroke="gray" stroke-dasharray="4,4"/>')
    parts.append(f'<path d="{path}" fill="none" stroke="#1f4e79" stroke-width="1.5"/>')
    for x, y in zip(tx, ty):
        parts.append(f'<circle cx="{sx(x):.3f}" cy="{sy(y):.3f}" r="2.5" fill="#1f4e79"/>')
    parts.append(f'<text x="{W / 2}" y="{H - 12}" font-size="13" text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="16" y="{H / 2}" font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 16 {H / 2})">{y_label}{" (log)" if log_y else ""}</text>')
    if title:
        parts.append(f'<text x="{W / 2}" y="24" font-size="15" text-anchor="middle">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(csv_path: Union[str, Path], column: str, out_path: Union[str, Path],
              x_column: Optional[str] = None, log_y: Optional[bool] = None) -> Path:
    rows = read_csv(csv_path)
    if len(rows) < 2:
        raise InputError(f"El CSV {csv_path} tiene {len(rows)} fila(s); se requieren al menos 2")
    columns = list(rows[0].keys())
    if column not in columns:
        raise InputError(f"Columna desconocida: '{column}'. Disponibles: {', '.join(columns)}")
    x_column = x_column or choose_x_axis(columns)
    if x_column not in columns:
        raise InputError(f"Columna de abscisas desconocida: '{x_column}'. Disponibles: {', '.join(columns)}")
    log_y = column in LOG_COLUMNS if log_y is None else log_y
    x_label = "log(1/r)" if x_column == "u" else x_column
    svg = render_svg(_column(rows, x_column), _column(rows, column), x_label, column, log_y=log_y,
                     title=Path(csv_path).stem)
    out_path = Path(out_path)
    out_path.write_text(svg, encoding="utf-8")
    logger.info(f"SVG escrito en {out_path} ({column} frente a {x_column})")
    return out_path
