from pathlib import Path

import pytest

from walsh.config.settings import get_settings
from walsh.schemas.matrix import BinaryMatrix
from walsh.services.bitmatrix import build_augmented_l_banded, build_l_banded

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def banded_10x5() -> BinaryMatrix:
    """
    The 10×5 3-banded matrix.
    """
    return build_l_banded(5, 10)


@pytest.fixture
def augmented_10x6() -> BinaryMatrix:
    """
    The 10×6 augmented 3-banded matrix.
    """
    return build_augmented_l_banded(6, 10)


@pytest.fixture
def null_column() -> BinaryMatrix:
    return BinaryMatrix.from_rows([[1, 1, 0], [1, 1, 0], [0, 1, 0]])


@pytest.fixture
def settings_env(monkeypatch):
    """
    Set WALSH_* variables for one test and rebuild the cached settings.
    """

    def apply(**values):
        for key, value in values.items():
            monkeypatch.setenv(f"WALSH_{key.upper()}", str(value))
        get_settings.cache_clear()

    yield apply
    get_settings.cache_clear()
