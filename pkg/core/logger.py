# core/logger.py
"""
Logging de la librería. Todos los módulos cuelgan del logger "hodge"; la
línea de comandos fija nivel y destino una sola vez con `configure_root`
(stderr por defecto, stdout cuando el resultado va a un fichero).
"""
import logging
import sys
from typing import Optional, TextIO, Union

ROOT_LOGGER = "hodge"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logger(
    name: str = ROOT_LOGGER,
    level: Union[int, str] = logging.INFO,
    stream: Optional[TextIO] = None
) -> logging.Logger:
    """
    Logger con un único StreamHandler y formato LOG_FORMAT.

    Args:
        name: Nombre del logger (por defecto la raíz "hodge")
        level: Nivel de logging
        stream: Flujo de salida; stderr si no se indica, para no mezclar
            los mensajes con el JSON o CSV que se escribe en stdout

    Returns:
        Logger configurado
    """
    logger = logging.getLogger(name)
    handlers = [h for h in logger.handlers if isinstance(h, logging.StreamHandler)]
    if handlers:
        if stream is not None:
            for handler in handlers:
                handler.setStream(stream)
    else:
        handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    logger.setLevel(level)
    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Logger del módulo dentro de la jerarquía "hodge.*".

    No añade handlers: los mensajes suben hasta la raíz configurada por la CLI.
    """
    if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def configure_root(level: Union[int, str] = logging.WARNING, stream: Optional[TextIO] = None) -> logging.Logger:
    """Nivel y flujo del logger raíz; se puede llamar varias veces (tests, CLI)."""
    return setup_logger(ROOT_LOGGER, level=level, stream=stream)
