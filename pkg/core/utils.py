import math
import re
from typing import Dict, List, Sequence, Union

from core.constants import CSV_DIGITS, MAX_FILENAME_LENGTH

_COMPLEX_RE = re.compile(r"^\s*[-+0-9.eEjJ()\s]+\s*$")


def parse_point(value: str) -> List[complex]:
    """
    Convierte texto en un punto de ℂ^m.

    Acepta coordenadas separadas por ';' y cada coordenada como complejo de
    Python ('1e-5', '0.1+0.2j') o como par 're,im'.

    Raises:
        ValueError: Si alguna coordenada no es un número complejo válido
    """
    v = (value or "").strip()
    if not v:
        raise ValueError("El punto no puede estar vacío.")
    coords = []
    for part in v.split(";"):
        part = part.strip()
        if "," in part:
            pieces = part.split(",")
            if len(pieces) != 2:
                raise ValueError(f"Coordenada inválida: '{part}'. Usa 're,im' o un complejo.")
            try:
                coords.append(complex(float(pieces[0]), float(pieces[1])))
            except ValueError:
                raise ValueError(f"Coordenada inválida: '{part}'.")
            continue
        if not _COMPLEX_RE.match(part):
            raise ValueError(f"Coordenada inválida: '{part}'.")
        try:
            coords.append(complex(part.replace(" ", "")))
        except ValueError:
            raise ValueError(f"Coordenada inválida: '{part}'.")
    return coords


def parse_kv(tokens: Sequence[str]) -> Dict[str, str]:
    """['r0=1e-5', 'count=20'] → {'r0': '1e-5', 'count': '20'}."""
    out: Dict[str, str] = {}
    for tok in tokens:
        if "=" not in tok:
            raise ValueError(f"Parámetro inválido: '{tok}'. Usa clave=valor.")
        key, val = tok.split("=", 1)
        key = key.strip()
        if not key:
            raise ValueError(f"Parámetro sin clave: '{tok}'.")
        out[key] = val.strip()
    return out


def format_number(value: Union[float, complex, bool, int, str, None], digits: int = CSV_DIGITS) -> str:
    """Formato fijo para CSV: 17 cifras significativas, 'true'/'false', vacío para None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, f".{digits}g")
    return str(value)


def output_filename(*parts: str, suffix: str = "", max_length: int = MAX_FILENAME_LENGTH) -> str:
    """
    Nombre de fichero de salida a partir de sus partes (modelo, columna...).

    Une las partes con '_', sustituye lo que no sea letra, dígito, punto o
    guion y recorta la raíz para que el total con `suffix` no pase de
    `max_length`; la extensión nunca se recorta.

    Raises:
        ValueError: Si no queda ningún carácter válido
    """
    cleaned = (re.sub(r"[^\w\.-]+", "_", p.strip()).strip("_") for p in parts if p)
    stem = "_".join(c for c in cleaned if c)
    if not stem:
        raise ValueError(f"Nombre de fichero vacío: {parts!r}")
    return stem[: max(1, max_length - len(suffix))] + suffix
