import math
from fractions import Fraction

import jsonschema
import pytest

from merosolve.balance import find_balances
from merosolve.report import (
    REPORT_SCHEMA,
    analyze_payload,
    claimed_pole_coefficients,
    coefficient_comparison_section,
    complex_json,
    frac_str,
    numeric_claims,
    recomputed_pole_coefficients,
    to_json,
)
from merosolve.scalars import QComplex

EP_TEXT = "y'' + omega^2*y - y^-3"


# ---------------------------------------------------------------------------
# claimed recursion values (formula evaluations, checked by hand)
# ---------------------------------------------------------------------------

def test_claimed_coefficients_at_unit_frequency():
    claimed = claimed_pole_coefficients(QComplex(1), QComplex(0, 1))
    assert claimed[-1] == QComplex(0, 1)
    assert claimed[0] == 0
    assert claimed[1] == QComplex(0, Fraction(-2, 3))
    # a2 = -(a*a1) / (6 a1 + 4 a a1 + 2 a) with a = i: denominator 8/3 - 2i
    assert claimed[2] == QComplex(Fraction(-4, 25), Fraction(-3, 25))
    assert claimed[3] is not None


def test_recomputed_coefficients_at_unit_frequency(ep_poly):
    # hand-derived forced expansion: y = i/tau + c1 tau + c3 tau^3 + ...
    # order tau^-5 gives c0 = 0; tau^-4 gives 6 a^3 c1 + a^4 = 0, so
    # c1 = -i/6; tau^-3 vanishes identically, c2 = 0; tau^-2 carries
    # 6 a^2 c1^2 + 4 a^3 c1 = -1/2 against response 12 a^3 = -12i, so
    # c3 = i/24.
    families = find_balances(ep_poly)
    forced = recomputed_pole_coefficients(ep_poly, families, QComplex(0, 1))
    series = forced.series.coeffs
    assert series.get(0, 0) == 0
    assert series[1] == QComplex(0, Fraction(-1, 6))
    assert series.get(2, 0) == 0
    assert series[3] == QComplex(0, Fraction(1, 24))


def test_comparison_table_flags(ep_poly):
    families = find_balances(ep_poly)
    table = coefficient_comparison_section(ep_poly, families, QComplex(1))
    rows = {row["index"]: row for row in table["rows"]}
    assert rows[0]["match"] is True
    assert rows[1]["match"] is False
    assert rows[2]["match"] is False
    assert table["leading_equation_violated"] is True


def test_comparison_table_none_without_pole_family():
    from merosolve.odemodel import normalize, parse_ode

    # first-order equation: the p = -1 family exists, so a table is built;
    # a window excluding -1 yields no family and no table
    poly = normalize(parse_ode(EP_TEXT), {"omega": 1})
    families = [f for f in find_balances(poly) if f.p != Fraction(-1)]
    assert coefficient_comparison_section(poly, families, QComplex(1)) is None


# ---------------------------------------------------------------------------
# claims evaluation on synthetic probe payloads
# ---------------------------------------------------------------------------

def probe(t_star, kind="zero-of-alpha"):
    return {"kind": kind, "t_star": complex_json(t_star) if t_star else None}


def test_numeric_claims_confirmed_for_conjugate_pair():
    claims = numeric_claims([probe(1j), probe(-1j)])
    assert claims[0]["status"] == "confirmed"
    assert claims[0]["evidence"]["conjugate_pair_found"] is True


def test_numeric_claims_refuted_off_axis():
    claims = numeric_claims([probe(0.5 + 1j), probe(0.5 - 1j)])
    assert claims[0]["status"] == "refuted"


def test_numeric_claims_not_applicable_without_detection():
    claims = numeric_claims([probe(None, kind="none")])
    assert claims[0]["status"] == "not-applicable"


def test_analysis_claim_statuses_default(ep_poly):
    payload = analyze_payload(EP_TEXT, {"omega": QComplex(1)})
    statuses = {c["id"]: c["status"] for c in payload["claims"]}
    assert statuses["simple-pole-family"] == "refuted"
    assert statuses["branch-point-order-two"] == "confirmed"
    assert statuses["imaginary-free-residue"] == "refuted"
    assert statuses["pole-coefficient-recursion"] == "refuted"
    assert statuses["exact-cot-solution"] == "refuted"
    assert statuses["cot-expansion-magnitudes"] == "confirmed"
    assert statuses["no-painleve-property"] == "confirmed"
    assert statuses["global-exponential-form"] == "not-applicable"
    jsonschema.validate(payload, REPORT_SCHEMA)


def test_dual_bookkeeping_in_family_json():
    payload = analyze_payload(EP_TEXT, {"omega": QComplex(1)})
    fam = next(
        f for f in payload["balance"]["families"] if f["p"] == "-1"
    )
    assert fam["q"] == "-6"          # cleared form
    assert fam["uncleared_q"] == "-3"  # original form


# ---------------------------------------------------------------------------
# JSON emitter
# ---------------------------------------------------------------------------

def test_to_json_float_formatting():
    assert to_json(math.pi) == "3.1415926535897931"
    assert to_json(1e30) == "1e+30"
    assert to_json(0.0) == "0"
    assert to_json(True) == "true"
    assert to_json(None) == "null"


def test_to_json_rejects_non_finite():
    with pytest.raises(ValueError):
        to_json(float("nan"))
    with pytest.raises(ValueError):
        to_json(float("inf"))


def test_to_json_escapes_strings():
    assert to_json('a"b\\c') == '"a\\"b\\\\c"'
    assert to_json("line\nbreak") == '"line\\u000abreak"'


def test_to_json_rejects_unknown_types():
    with pytest.raises(TypeError):
        to_json({"x": object()})
    with pytest.raises(TypeError):
        to_json({1: "non-string key"})


def test_frac_str():
    assert frac_str(Fraction(-1)) == "-1"
    assert frac_str(Fraction(3, 2)) == "3/2"
