import pytest
from jetbrane.algebroid import Theory
from jetbrane.dsl import parse_theory
from jetbrane.theories import read_text


def load(name: str) -> Theory:
    return parse_theory(read_text(name), name).theory


@pytest.fixture(scope="session")
def mechanics() -> Theory:
    return load("mechanics")


@pytest.fixture(scope="session")
def em2d() -> Theory:
    return load("em2d")


@pytest.fixture(scope="session")
def cs3d() -> Theory:
    return load("cs-ab3d")


@pytest.fixture(scope="session")
def ym() -> Theory:
    return load("ym-su2-2d")


@pytest.fixture(name="load", scope="session")
def fixture_load():
    return load
