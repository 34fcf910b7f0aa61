import cmath
import random

import pytest

from merosolve.errors import (
    NormalizationError,
    OdeSyntaxError,
    UnboundParameterError,
)
from merosolve.odemodel import (
    Add,
    Const,
    DiffMonomial,
    DifferentialPolynomial,
    Mul,
    Param,
    Pow,
    Y,
    ast_max_order,
    eval_ast,
    normalize,
    parse_ode,
    unique_highest_degree_term,
    unparse,
)
from merosolve.scalars import QComplex


def degrees_map(poly):
    return {m.degrees: m.coeff for m in poly.monomials}


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def test_parse_ep_has_three_addends():
    ast = parse_ode("y'' + omega^2*y - y^-3")
    assert isinstance(ast, Add)
    assert len(ast.terms) == 3


def test_parse_fourth_derivative():
    ast = parse_ode("y'''' ")
    assert ast == Y(4)
    assert ast_max_order(ast) == 4


def test_parse_stray_operator_reports_position():
    with pytest.raises(OdeSyntaxError) as err:
        parse_ode("y'' + * y")
    assert err.value.column == 7


def test_parse_rejects_tenth_derivative():
    parse_ode("y" + "'" * 9)  # order 9 is the limit
    with pytest.raises(OdeSyntaxError):
        parse_ode("y" + "'" * 10)


def test_parse_rejects_unknown_token():
    with pytest.raises(OdeSyntaxError):
        parse_ode("y'' + $")


def test_parse_rejects_zero_exponent():
    with pytest.raises(OdeSyntaxError):
        parse_ode("y^0")


def test_parse_empty_input():
    with pytest.raises(OdeSyntaxError):
        parse_ode("   ")


def test_parse_leading_minus_and_parens():
    ast = parse_ode("-(y + 1)*y''")
    assert isinstance(ast, Mul)


def test_unparse_round_trip_on_text():
    for text in (
        "y'' + omega^2*y - y^-3",
        "y'' - 2*y^3",
        "y' + 1 + y^2",
        "-y + 2.5*y''",
        "(y + 1)^2 - omega*y",
    ):
        ast = parse_ode(text)
        assert parse_ode(unparse(ast)) == ast


def _random_ast(rng, depth=0):
    choice = rng.random()
    if depth > 2 or choice < 0.35:
        kind = rng.randrange(3)
        if kind == 0:
            return Const(QComplex(rng.randrange(1, 9)))
        if kind == 1:
            return Param(rng.choice(["omega", "mu"]))
        return Y(rng.randrange(0, 4))
    if choice < 0.55:
        return Add(tuple(_random_ast(rng, depth + 1) for _ in range(2)))
    if choice < 0.8:
        return Mul(tuple(_random_ast(rng, depth + 1) for _ in range(2)))
    base = _random_ast(rng, depth + 1)
    exponent = rng.choice([1, 2, 3])
    return Pow(base, exponent)


def test_unparse_round_trip_generated():
    from fractions import Fraction

    rng = random.Random(7)
    env = {"omega": 2, "mu": 3}
    # exact values make the comparison independent of summation order
    values = [
        QComplex(Fraction(7, 10)),
        QComplex(Fraction(-3, 10)),
        QComplex(Fraction(11, 10)),
        QComplex(Fraction(1, 2)),
    ]
    for _ in range(200):
        ast = _random_ast(rng)
        text = unparse(ast)
        reparsed = parse_ode(text)
        assert eval_ast(reparsed, env, values) == eval_ast(ast, env, values)


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def test_normalize_ep(ep_poly):
    assert ep_poly.clearing_multiplier == 3
    got = degrees_map(ep_poly)
    assert got[((0, 3), (2, 1))] == 1
    assert got[((0, 4),)] == 1
    assert got[()] == -1
    assert len(ep_poly.monomials) == 3
    assert ep_poly.is_exact


def test_normalize_already_polynomial(w3_poly):
    assert w3_poly.clearing_multiplier == 0
    got = degrees_map(w3_poly)
    assert got[((2, 1),)] == 1
    assert got[((0, 3),)] == -2


def test_normalize_rejects_constant_result():
    with pytest.raises(NormalizationError):
        normalize(parse_ode("y^-1 * y^1"), {})


def test_normalize_rejects_identically_zero():
    with pytest.raises(NormalizationError):
        normalize(parse_ode("y - y"), {})


def test_normalize_rejects_negative_derivative_power():
    with pytest.raises(NormalizationError):
        normalize(parse_ode("y'^-1 + y"), {})


def test_normalize_rejects_unbound_parameter():
    with pytest.raises(UnboundParameterError):
        normalize(parse_ode("y'' + omega^2*y"), {})


def test_normalize_merges_like_monomials():
    poly = normalize(parse_ode("y*y + y^2 + y''"), {})
    got = degrees_map(poly)
    assert got[((0, 2),)] == 2
    assert len(poly.monomials) == 2


def test_normalize_signatures_unique(ep_poly, w3_poly, cot_poly):
    for poly in (ep_poly, w3_poly, cot_poly):
        sigs = [m.degrees for m in poly.monomials]
        assert len(sigs) == len(set(sigs))


def _smooth_probe(t):
    """A strictly positive test function with analytic derivatives."""
    f = 2.5 + cmath.sin(t) * 0.4 + cmath.cos(2 * t) * 0.2
    d1 = cmath.cos(t) * 0.4 - 2 * cmath.sin(2 * t) * 0.2
    d2 = -cmath.sin(t) * 0.4 - 4 * cmath.cos(2 * t) * 0.2
    d3 = -cmath.cos(t) * 0.4 + 8 * cmath.sin(2 * t) * 0.2
    d4 = cmath.sin(t) * 0.4 + 16 * cmath.cos(2 * t) * 0.2
    return [f, d1, d2, d3, d4]


@pytest.mark.parametrize(
    "text,env",
    [
        ("y'' + omega^2*y - y^-3", {"omega": 1}),
        ("y'' + omega^2*y - y^-3", {"omega": 2.5}),
        ("y'' - 2*y^3", {}),
        ("y' + 1 + y^2", {}),
        ("y^-2 + y'*y + mu", {"mu": 0.25}),
    ],
)
def test_normalize_preserves_solution_set(text, env):
    # original expression times f**multiplier equals the cleared polynomial
    ast = parse_ode(text)
    poly = normalize(ast, env)
    rng = random.Random(11)
    for _ in range(20):
        t = complex(rng.uniform(-2, 2), rng.uniform(-0.5, 0.5))
        values = _smooth_probe(t)
        lhs = complex(eval_ast(ast, env, values)) * values[0] ** poly.clearing_multiplier
        rhs = complex(poly.evaluate(values))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_round_trip_normalize_equivalence():
    rng = random.Random(23)
    env = {"omega": 2, "mu": 3}
    count = 0
    for _ in range(300):
        ast = _random_ast(rng)
        try:
            poly = normalize(ast, env)
        except NormalizationError:
            continue
        count += 1
        again = normalize(parse_ode(unparse(ast)), env)
        assert degrees_map(again) == degrees_map(poly)
        assert again.clearing_multiplier == poly.clearing_multiplier
    assert count > 100


# ---------------------------------------------------------------------------
# top-degree uniqueness
# ---------------------------------------------------------------------------

def test_top_degree_unique_for_cubic(w3_poly):
    result = unique_highest_degree_term(w3_poly)
    assert result.holds
    assert result.top_degree == 3


def test_top_degree_not_unique_for_cleared_width_equation(ep_poly):
    result = unique_highest_degree_term(ep_poly)
    assert not result.holds
    assert result.top_degree == 4
    assert len(result.top_monomials) == 2


def test_top_degree_constant_polynomial():
    poly = DifferentialPolynomial(
        (DiffMonomial.from_map(QComplex(-1), {}),), 0
    )
    result = unique_highest_degree_term(poly)
    assert result.holds
    assert result.top_degree == 0


def test_cleared_text_reparses_to_same_polynomial(ep_poly, w3_poly, cot_poly):
    for poly in (ep_poly, w3_poly, cot_poly):
        again = normalize(parse_ode(poly.to_text()), {})
        assert degrees_map(again) == degrees_map(poly)
        assert again.clearing_multiplier == 0
