import pytest

from merosolve import find_balances, normalize, parse_ode

EP_TEXT = "y'' + omega^2*y - y^-3"


@pytest.fixture
def ep_poly():
    """Cleared width equation with omega = 1, exact coefficients."""
    return normalize(parse_ode(EP_TEXT), {"omega": 1})


@pytest.fixture
def ep_poly_w0():
    """Cleared width equation with omega = 0."""
    return normalize(parse_ode(EP_TEXT), {"omega": 0})


@pytest.fixture
def w3_poly():
    return normalize(parse_ode("y'' - 2*y^3"), {})


@pytest.fixture
def cot_poly():
    """First-order equation solved exactly by cot."""
    return normalize(parse_ode("y' + 1 + y^2"), {})


@pytest.fixture
def ep_branch_family(ep_poly):
    fams = [f for f in find_balances(ep_poly) if f.consistent]
    assert len(fams) == 1
    return fams[0]


@pytest.fixture
def w3_family(w3_poly):
    return next(f for f in find_balances(w3_poly) if f.consistent)


@pytest.fixture
def cot_family(cot_poly):
    return next(f for f in find_balances(cot_poly) if f.consistent)
