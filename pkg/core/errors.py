# core/errors.py
"""
Jerarquía de errores del cálculo. Cada error lleva un código y un diccionario
de detalle que la línea de comandos serializa como mensaje estructurado.
"""
from typing import Any, Dict


class HodgeError(Exception):
    """Error base de la librería."""

    codigo = "error"

    def __init__(self, mensaje: str, **detalle: Any):
        super().__init__(mensaje)
        self.detalle: Dict[str, Any] = detalle

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.codigo, "mensaje": str(self), **self.detalle}


class InputError(HodgeError, ValueError):
    codigo = "entrada"


class DomainError(HodgeError, ValueError):
    codigo = "dominio"


class ParameterError(HodgeError, ValueError):
    codigo = "parametro"


class OrderError(HodgeError):
    codigo = "orden"


class DegeneracyError(HodgeError):
    """Caída de rango en la filtración o métrica no definida positiva."""

    codigo = "degeneracion"


class SingularityError(HodgeError):
    codigo = "singular"


class HodgeRiemannError(HodgeError):
    codigo = "hodge_riemann"


class ConvergenceError(HodgeError):
    codigo = "convergencia"


class AmbiguityError(HodgeError):
    codigo = "ambiguedad"
