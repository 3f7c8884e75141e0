import pytest

from cmzv import PrecisionContext


@pytest.fixture(scope="session")
def ctx50():
    """Default 50-digit context (working 65)."""
    return PrecisionContext()


@pytest.fixture(scope="session")
def ctx30():
    """Light context for structural tests."""
    return PrecisionContext.for_target(30)


@pytest.fixture(scope="session")
def ctx40():
    return PrecisionContext.for_target(40)
