import pytest
from hypothesis import HealthCheck, settings

from hodgecert.equivariant import DiagonalAction
from hodgecert.hodge import FamilySpec
from hodgecert.jacobian import build
from hodgecert.poly import parse_polynomial

settings.register_profile("ci", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

FERMAT_QUARTIC = "x0^4 + x1^4 + x2^4 + x3^4"
FERMAT_SEXTIC = "x0^6 + x1^6 + x2^6 + x3^6 + x4^6 + x5^6"
IOTA = DiagonalAction(2, (1, 1, 0, 0, 0, 0))


def fermat(num_vars, d):
    return parse_polynomial(" + ".join(f"x{i}^{d}" for i in range(num_vars)), num_vars)


@pytest.fixture(scope="session")
def quartic_spec():
    return FamilySpec(parse_polynomial(FERMAT_QUARTIC, 4), name="quartic")


@pytest.fixture(scope="session")
def quartic_ring(quartic_spec):
    return quartic_spec.ring


@pytest.fixture(scope="session")
def dwork_spec():
    return FamilySpec(parse_polynomial("x0^4 + x1^4 + x2^4 + x3^4 + 2*x0*x1*x2*x3", 4))


@pytest.fixture(scope="session")
def sextic_iota():
    return FamilySpec(parse_polynomial(FERMAT_SEXTIC, 6), IOTA, character=1, name="sextic_iota")


@pytest.fixture(scope="session")
def cubic_ring():
    return build(fermat(4, 3))
