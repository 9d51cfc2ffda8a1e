import os

# Carga .env (opcional)
try:
    from dotenv import load_dotenv
    load_dotenv()
except Exception:
    pass

from core.constants import DEFAULT_LOG_LEVEL, DEFAULT_OUTPUT_DIR

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def get_cfg(key: str, default: str = "") -> str:
    value = os.getenv(key, default)
    return default if value is None else value


def get_log_level() -> str:
    """
    Nivel de logging desde HODGE_LOG_LEVEL.
    Los valores numéricos del cálculo nunca se leen del entorno.
    """
    level = get_cfg("HODGE_LOG_LEVEL", DEFAULT_LOG_LEVEL).strip().upper()
    if level not in _LOG_LEVELS:
        raise ValueError(
            f"Nivel de logging inválido: '{level}'. Usa uno de: " + ", ".join(_LOG_LEVELS)
        )
    return level


def get_output_dir() -> str:
    """Directorio de salida por defecto para CSV/SVG/PDF (HODGE_OUTPUT_DIR)."""
    return get_cfg("HODGE_OUTPUT_DIR", DEFAULT_OUTPUT_DIR).strip() or DEFAULT_OUTPUT_DIR
