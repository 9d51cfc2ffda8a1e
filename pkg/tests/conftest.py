# tests/conftest.py
"""
Fixtures compartidas: modelos de ejemplo del directorio models/.
"""
from pathlib import Path

import pytest

from core.model_file import load_model

MODELS_DIR = Path(__file__).resolve().parent.parent / "models"


def _load(name: str):
    model, _ = load_model(MODELS_DIR / f"{name}.json")
    return model


@pytest.fixture(scope="session")
def models_dir() -> Path:
    return MODELS_DIR


@pytest.fixture(scope="session")
def model_a():
    """Órbita del desplazamiento de peso 3."""
    return _load("model_a")


@pytest.fixture(scope="session")
def model_c():
    """Órbita del desplazamiento de peso 4 (cuatro-pliegue)."""
    return _load("model_c")


@pytest.fixture(scope="session")
def quintic():
    return _load("quintic")


@pytest.fixture(scope="session")
def case2():
    return _load("case2")


@pytest.fixture(scope="session")
def product_model():
    return _load("product")
