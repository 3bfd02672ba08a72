import mpmath
import pytest

from zetalab.precision import PrecisionContext
from zetalab.sieve import mobius_table
from zetalab import roots


@pytest.fixture(scope="session")
def ctx256():
    return PrecisionContext(working_bits=256)


@pytest.fixture(scope="session")
def ctx128():
    return PrecisionContext(working_bits=128)


@pytest.fixture(scope="session")
def ctx64():
    return PrecisionContext(working_bits=64, target_rel_err=1e-10)


@pytest.fixture(scope="session")
def table_1e4():
    return mobius_table(10**4)


@pytest.fixture(scope="session")
def table_1e5():
    return mobius_table(10**5)


@pytest.fixture(scope="session")
def gamma1(ctx256):
    res = roots.find_zeta_zero(14.0, 14.2, ctx256)
    assert res.found
    return float(res.value)
