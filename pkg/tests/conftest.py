import pytest

from qcoh import fano


@pytest.fixture(scope="session")
def tables():
    return {name: fano.build_table(name) for name in ("Q", "V5", "V22")}


@pytest.fixture(scope="session")
def spectral(tables):
    return {name: fano.SpectralData(t) for name, t in tables.items()}
