# core/report_pdf.py
import io
import math
from typing import Dict, List, Optional, Sequence

from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import cm
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from core.logger import get_logger

logger = get_logger(__name__)

# Tipografías compactas
FONT_SIZE_BASE = 9
LEADING_BASE = 12
TITLE_SIZE = 12

# Espaciados verticales (pt)
SP_AFTER_TITLE = 14
SP_BETWEEN_BLOCKS = 12

# Columnas que no son magnitudes numéricas del barrido
_COORDINATE_PREFIXES = ("re_z", "im_z")


def _html_escape(text: str) -> str:
    if text is None:
        return ""
    return (text.replace("&", "&amp;")
                .replace("<", "&lt;")
                .replace(">", "&gt;"))


def _is_flag(name: str) -> bool:
    return name == "ok" or name.startswith("ok_") or name.endswith("_positive")


def _floats(rows: Sequence[Dict[str, str]], name: str) -> List[float]:
    out = []
    for row in rows:
        try:
            v = float(row.get(name, ""))
        except ValueError:
            continue
        if math.isfinite(v):
            out.append(v)
    return out


def column_stats(rows: Sequence[Dict[str, str]]) -> List[Dict[str, object]]:
    """Mínimo, máximo y valor en la última fila de cada columna numérica."""
    if not rows:
        return []
    stats = []
    for name in rows[0].keys():
        if _is_flag(name) or name == "u" or name.startswith(_COORDINATE_PREFIXES):
            continue
        vals = _floats(rows, name)
        if not vals:
            continue
        stats.append({"column": name, "min": min(vals), "max": max(vals), "last": vals[-1], "count": len(vals)})
    return stats


def predicate_counts(rows: Sequence[Dict[str, str]]) -> List[Dict[str, object]]:
    """Número de filas en las que cada predicado vale 'true'."""
    if not rows:
        return []
    out = []
    for name in rows[0].keys():
        if not _is_flag(name):
            continue
        true = sum(1 for row in rows if row.get(name) == "true")
        out.append({"column": name, "true": true, "false": len(rows) - true})
    return out


def generate_sweep_pdf(rows: Sequence[Dict[str, str]], title: str, notes: Optional[Sequence[str]] = None) -> io.BytesIO:
    """Resumen PDF de un barrido: estadísticas por columna y recuento de predicados."""
    buffer = io.BytesIO()
    doc = SimpleDocTemplate(
        buffer,
        pagesize=A4,
        leftMargin=2 * cm, rightMargin=2 * cm,
        topMargin=1.6 * cm, bottomMargin=1.6 * cm,
        title=title, author="", creator="", subject="",
        invariant=True,
    )

    styles = getSampleStyleSheet()
    style_normal = ParagraphStyle(name="Base", parent=styles["Normal"], fontSize=FONT_SIZE_BASE, leading=LEADING_BASE)
    style_bold = ParagraphStyle(name="Bold", parent=style_normal, fontName="Helvetica-Bold")
    style_title = ParagraphStyle(name="Titulo", parent=style_bold, alignment=1, fontSize=TITLE_SIZE)
    green_fill = colors.Color(red=0.88, green=0.94, blue=0.88)
    green_dark = colors.Color(red=0.60, green=0.75, blue=0.60)
    red_fill = colors.Color(red=0.98, green=0.88, blue=0.88)

    def boxed(data, widths, header_fill=green_fill, extra=()):
        table = Table(data, colWidths=widths)
        table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), header_fill),
            ('BOX', (0, 0), (-1, -1), 1, green_dark),
            ('INNERGRID', (0, 0), (-1, -1), 0.5, green_dark),
            ('LEFTPADDING', (0, 0), (-1, -1), 4),
            ('RIGHTPADDING', (0, 0), (-1, -1), 4),
            ('TOPPADDING', (0, 0), (-1, -1), 2),
            ('BOTTOMPADDING', (0, 0), (-1, -1), 2),
            ('VALIGN', (0, 0), (-1, -1), 'TOP'),
            *extra,
        ]))
        return table

    elements = [Paragraph(_html_escape(title), style_title), Spacer(1, SP_AFTER_TITLE)]
    elements.append(Paragraph(f"<b>Filas:</b> {len(rows)}", style_normal))
    elements.append(Spacer(1, SP_BETWEEN_BLOCKS))

    preds = predicate_counts(rows)
    if preds:
        data = [[Paragraph("<b>Predicado</b>", style_bold), Paragraph("<b>true</b>", style_bold),
                 Paragraph("<b>false</b>", style_bold)]]
        extra = []
        for i, p in enumerate(preds, start=1):
            data.append([Paragraph(_html_escape(str(p["column"])), style_normal), str(p["true"]), str(p["false"])])
            if p["false"] and p["column"] != "wp_hsc_positive":
                extra.append(('BACKGROUND', (0, i), (-1, i), red_fill))
        elements.append(boxed(data, [doc.width * 0.6, doc.width * 0.2, doc.width * 0.2], extra=extra))
        elements.append(Spacer(1, SP_BETWEEN_BLOCKS))

    stats = column_stats(rows)
    if stats:
        data = [[Paragraph(f"<b>{h}</b>", style_bold) for h in ("Columna", "mín", "máx", "última fila")]]
        for s in stats:
            data.append([Paragraph(_html_escape(str(s["column"])), style_normal),
                         f"{s['min']:.6g}", f"{s['max']:.6g}", f"{s['last']:.6g}"])
        elements.append(boxed(data, [doc.width * 0.4, doc.width * 0.2, doc.width * 0.2, doc.width * 0.2]))
        elements.append(Spacer(1, SP_BETWEEN_BLOCKS))

    for note in notes or []:
        elements.append(Paragraph(_html_escape(note).replace("\n", "<br/>"), style_normal))
        elements.append(Spacer(1, 4))

    doc.build(elements)
    buffer.seek(0)
    logger.info(f"PDF de resumen generado ({len(rows)} filas, {len(stats)} columnas)")
    return buffer
