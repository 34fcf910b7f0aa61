"""Dominant-balance search for movable-singularity families.

Substituting ``y ~ a * tau**p`` into a cleared differential polynomial sends
each monomial to a single power of tau; a candidate exponent p is kept when
at least two monomials share the minimal exponent q and every other monomial
sits at or above it.  Negative integer p are additionally reported even when
a single monomial dominates, so claimed pole families always receive an
explicit verdict instead of silently disappearing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateFamilyError, InternalInconsistencyError
from .odemodel import DiffMonomial, DifferentialPolynomial
from .scalars import (
    QComplex,
    canonical_scalar,
    is_exact,
    is_zero,
    mul_frac,
    scalar_pow,
    to_complex,
)

DEFAULT_BRANCH_MAX = 4
DEFAULT_WINDOW = 6

_ROOT_SNAP_DENOMS = (1, 2, 3, 4, 6, 8, 12)


def falling(x: Fraction, k: int) -> Fraction:
    """Falling factorial x(x-1)...(x-k+1); empty product for k = 0."""
    out = Fraction(1)
    for i in range(k):
        out *= x - i
    return out


def monomial_exponent(mono: DiffMonomial, p: Fraction) -> Fraction:
    """Leading tau-exponent of a monomial under y ~ a * tau**p."""
    p = Fraction(p)
    return sum((Fraction(d) * (p - k) for k, d in mono.degrees), Fraction(0))


@dataclass(frozen=True)
class BalanceFamily:
    """One movable-singularity family: exponent, dominance data, leading
    coefficients and resonances.  ``branch_order == 1`` is a pole family,
    larger values mark algebraic branch points."""

    p: Fraction
    branch_order: int
    q: Fraction
    dominant: tuple
    leading_poly: tuple  # coefficients of the leading equation, ascending in a
    leading_coeffs: tuple  # nonzero roots, sorted by (re, im)
    consistent: bool
    resonances: tuple
    two_term: bool  # False when reported via the negative-integer fallback


def _fall_poly_in_r(p: Fraction, k: int):
    """Coefficients (ascending, Fractions) of prod_{i<k} (r + p - i)."""
    coeffs = [Fraction(1)]
    for i in range(k):
        shift = p - i
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for deg, c in enumerate(coeffs):
            nxt[deg] += c * shift
            nxt[deg + 1] += c
        coeffs = nxt
    return coeffs


def _perturbation_poly(mono: DiffMonomial, p: Fraction):
    """Fraction-coefficient polynomial in r multiplying ``a**total_degree``
    when y = a*tau**p*(1 + eps*tau**r) is linearized inside the monomial."""
    degrees = mono.degree_map()
    out = [Fraction(0)]
    for k, d in degrees.items():
        prefactor = Fraction(d) * falling(p, k) ** (d - 1)
        for l, dl in degrees.items():
            if l != k:
                prefactor *= falling(p, l) ** dl
        if prefactor == 0:
            continue
        fall_poly = _fall_poly_in_r(p, k)
        if len(fall_poly) > len(out):
            out.extend([Fraction(0)] * (len(fall_poly) - len(out)))
        for deg, c in enumerate(fall_poly):
            out[deg] += prefactor * c
    return out


def _scalar_poly_add(acc, poly):
    if len(poly) > len(acc):
        acc.extend([0] * (len(poly) - len(acc)))
    for i, c in enumerate(poly):
        acc[i] = acc[i] + c
    return acc


def _scalar_poly_scale(poly, scalar):
    return [scalar * c for c in poly]


def _frac_poly_to_scalar(poly, scalar):
    return [mul_frac(scalar, c) for c in poly]


def _poly_eval(coeffs, x):
    total = 0
    power = 1
    for c in coeffs:
        total = total + c * power
        power = power * x
    return total


def _trim(coeffs):
    out = list(coeffs)
    while out and is_zero(out[-1], 1e-14):
        out.pop()
    return out


def _leading_polynomial(poly: DifferentialPolynomial, p: Fraction, dominant):
    """Leading equation in the coefficient a, ascending powers."""
    coeffs = [0]
    for idx in dominant:
        mono = poly.monomials[idx]
        weight = Fraction(1)
        for k, d in mono.degrees:
            weight *= falling(p, k) ** d
        s = mono.total_degree
        if len(coeffs) <= s:
            coeffs.extend([0] * (s + 1 - len(coeffs)))
        coeffs[s] = coeffs[s] + mul_frac(mono.coeff, weight)
    return coeffs


def _snap_root(root: complex, lead_coeffs, exact: bool):
    """Replace a numeric root by a nearby Gaussian rational when it verifies
    exactly against an exact leading polynomial."""
    if not exact:
        return root
    for den in _ROOT_SNAP_DENOMS:
        cand = QComplex(
            Fraction(round(root.real * den), den),
            Fraction(round(root.imag * den), den),
        )
        if abs(complex(cand) - root) < 1e-9 and _poly_eval(lead_coeffs, cand) == 0:
            return cand
    return root


def _nonzero_roots(lead_coeffs):
    """Nonzero roots of the leading polynomial, snapped and sorted."""
    trimmed = _trim(lead_coeffs)
    low = 0
    while low < len(trimmed) and is_zero(trimmed[low], 1e-14):
        low += 1
    core = trimmed[low:]
    if len(core) <= 1:
        return ()
    exact = all(is_exact(c) or c == 0 for c in lead_coeffs)
    descending = [to_complex(c) for c in reversed(core)]
    roots = np.roots(descending)
    snapped = [_snap_root(complex(r), lead_coeffs, exact) for r in roots]
    snapped.sort(key=lambda z: (to_complex(z).real, to_complex(z).imag))
    return tuple(snapped)


def _reduced_resonance_poly(poly: DifferentialPolynomial, fam: BalanceFamily):
    """Resonance polynomial with powers of the leading coefficient eliminated
    through the leading equation.  Exact whenever the dominant monomials fall
    into at most two total-degree groups; otherwise None."""
    groups = {}
    for idx in fam.dominant:
        mono = poly.monomials[idx]
        s = mono.total_degree
        weight = Fraction(1)
        for k, d in mono.degrees:
            weight *= falling(fam.p, k) ** d
        phi = mul_frac(mono.coeff, weight)
        gamma = _frac_poly_to_scalar(_perturbation_poly(mono, fam.p), mono.coeff)
        if s in groups:
            old_phi, old_gamma = groups[s]
            groups[s] = (old_phi + phi, _scalar_poly_add(list(old_gamma), gamma))
        else:
            groups[s] = (phi, gamma)
    if len(groups) == 1:
        (_, (_, gamma)), = groups.items()
        return gamma
    if len(groups) == 2:
        (s1, (phi1, gamma1)), (s2, (phi2, gamma2)) = sorted(groups.items())
        lhs = _scalar_poly_scale(gamma1, phi2)
        rhs = _scalar_poly_scale(gamma2, phi1)
        neg_rhs = [-c for c in rhs]
        return _scalar_poly_add(lhs, neg_rhs)
    return None


def _numeric_resonance_poly(poly: DifferentialPolynomial, fam: BalanceFamily, a):
    coeffs = [0]
    for idx in fam.dominant:
        mono = poly.monomials[idx]
        weight = mono.coeff * scalar_pow(a, mono.total_degree)
        gamma = _frac_poly_to_scalar(_perturbation_poly(mono, fam.p), weight)
        coeffs = _scalar_poly_add(coeffs, gamma)
    return coeffs


def linear_response(poly: DifferentialPolynomial, fam: BalanceFamily, a, r: Fraction):
    """Coefficient multiplying a raw series coefficient injected at relative
    order r.  The scaled perturbation y = a*tau**p*(1 + eps*tau**r) responds
    with eps * R(r); a raw coefficient delta at the same order corresponds to
    eps = delta/a, so the response is R(r)/a."""
    total = 0
    for idx in fam.dominant:
        mono = poly.monomials[idx]
        weight = mono.coeff * scalar_pow(a, mono.total_degree)
        g = _poly_eval(
            [mul_frac(weight, c) for c in _perturbation_poly(mono, fam.p)],
            canonical_scalar(r),
        )
        total = total + g
    return total / a


def _rationalize_roots(coeffs):
    """Roots of a scalar polynomial as Fractions; each candidate is verified
    (exactly in exact mode) before being accepted.  Non-rational roots are
    dropped -- callers decide whether that is an error."""
    trimmed = _trim(coeffs)
    if len(trimmed) <= 1:
        return [], trimmed
    exact = all(is_exact(c) or c == 0 for c in coeffs)
    scale = max(abs(to_complex(c)) for c in trimmed)
    descending = [to_complex(c) for c in reversed(trimmed)]
    found = []
    for root in np.roots(descending):
        root = complex(root)
        if abs(root.imag) > 1e-7 * max(1.0, abs(root)):
            continue
        for den in (1, 2, 3, 4, 6, 12, 24, 60, 120, 360):
            cand = Fraction(round(root.real * den), den)
            if abs(float(cand) - root.real) > 1e-7 * max(1.0, abs(root)):
                continue
            value = _poly_eval(coeffs, QComplex(cand))
            cond = value == 0 if exact else abs(to_complex(value)) <= 1e-8 * scale
            if cond:
                found.append(cand)
                break
    return sorted(set(found)), trimmed


def compute_resonances(poly: DifferentialPolynomial, fam: BalanceFamily, a):
    """Resonances (orders at which free coefficients enter) for one family.

    The leading coefficient powers are eliminated through the leading
    equation whenever possible, so the result is exact for exact input.
    -1 must appear (it tracks the free singularity location); its absence
    signals an inconsistent balance and raises.
    """
    a = canonical_scalar(a)
    if is_zero(a, 0.0):
        raise ValueError("leading coefficient must be nonzero")
    reduced = _reduced_resonance_poly(poly, fam)
    coeffs = reduced if reduced is not None else _numeric_resonance_poly(poly, fam, a)
    roots, trimmed = _rationalize_roots(coeffs)
    if not trimmed:
        raise DegenerateFamilyError(
            f"degenerate family at p = {fam.p}: resonance polynomial vanishes"
        )
    if Fraction(-1) not in roots:
        raise InternalInconsistencyError(
            f"resonance -1 missing for family p = {fam.p}; balance inconsistent"
        )
    return roots


def rational_resonances(poly: DifferentialPolynomial, fam: BalanceFamily, a):
    """Rational resonances without the -1 membership requirement; used for
    force-solved families whose leading equation is knowingly violated."""
    reduced = _reduced_resonance_poly(poly, fam)
    coeffs = reduced if reduced is not None else _numeric_resonance_poly(poly, fam, a)
    roots, trimmed = _rationalize_roots(coeffs)
    if not trimmed:
        raise DegenerateFamilyError(
            f"degenerate family at p = {fam.p}: resonance polynomial vanishes"
        )
    return roots


def candidate_exponents(n_max: int = DEFAULT_BRANCH_MAX, window: int = DEFAULT_WINDOW):
    """Reduced candidate exponents m/n; zero and the nonnegative integers are
    excluded (those are regular-point behaviors, not singularities)."""
    seen = set()
    for n in range(1, n_max + 1):
        for m in range(-window, window + 1):
            if m == 0:
                continue
            p = Fraction(m, n)
            if p.denominator == 1 and p > 0:
                continue
            seen.add(p)
    return sorted(seen)


def find_balances(
    poly: DifferentialPolynomial,
    n_max: int = DEFAULT_BRANCH_MAX,
    window: int = DEFAULT_WINDOW,
):
    """All balance families in the search window, sorted by exponent.

    Families whose leading equation has only the zero root are reported with
    ``consistent=False`` rather than dropped.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    families = []
    for p in candidate_exponents(n_max, window):
        exps = [monomial_exponent(m, p) for m in poly.monomials]
        q = min(exps)
        dominant = tuple(i for i, e in enumerate(exps) if e == q)
        two_term = len(dominant) >= 2
        if not two_term and not (p.denominator == 1 and p < 0):
            continue
        lead = _leading_polynomial(poly, p, dominant)
        roots = _nonzero_roots(lead)
        consistent = bool(roots)
        resonances = ()
        if consistent:
            resonances = tuple(compute_resonances(poly, fam=BalanceFamily(
                p=p,
                branch_order=p.denominator,
                q=q,
                dominant=dominant,
                leading_poly=tuple(lead),
                leading_coeffs=roots,
                consistent=True,
                resonances=(),
                two_term=two_term,
            ), a=roots[0]))
        families.append(
            BalanceFamily(
                p=p,
                branch_order=p.denominator,
                q=q,
                dominant=dominant,
                leading_poly=tuple(lead),
                leading_coeffs=roots,
                consistent=consistent,
                resonances=resonances,
                two_term=two_term,
            )
        )
    return families
