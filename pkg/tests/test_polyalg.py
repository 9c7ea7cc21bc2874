from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncatenoid.errors import ZeroPolynomial
from ncatenoid.polyalg import ComplexPoly, poly_gcd, poly_roots, resultant, resultant_vanishes, sylvester_matrix

cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def test_zero_poly_degree_and_addition():
    z = ComplexPoly()
    assert z.is_zero and z.degree == -1
    p = ComplexPoly([1, 2])
    assert (z + p) == p and (p + z) == p
    assert (p - p).is_zero


def test_arithmetic_and_divmod():
    a = ComplexPoly.from_roots([1, 2j, -3])
    b = ComplexPoly([1, 1])
    qt, r = a.divmod(b)
    assert (qt * b + r).allclose(a)
    assert r.degree < b.degree
    assert a.deriv()(0.5) == pytest.approx(np.polynomial.polynomial.polyval(0.5, np.polynomial.polynomial.polyder(a.coeffs)))


def test_reversed_and_trimmed():
    p = ComplexPoly([1, 2, 3])
    assert np.allclose(p.reversed().coeffs, [3, 2, 1])
    assert p.reversed(4).degree == 4
    assert ComplexPoly([1, 2, 1e-20]).trimmed(1e-14).degree == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(cplx, min_size=1, max_size=7))
def test_roots_recover_distinct_roots(rts):
    # keep roots well separated so the comparison is meaningful
    rts = [r for i, r in enumerate(rts) if all(abs(r - s) > 0.05 for s in rts[:i])]
    p = ComplexPoly.from_roots(rts)
    got = poly_roots(p)
    assert len(got) == len(rts)
    for r in rts:
        assert min(abs(r - g) for g in got) < 1e-7


def test_double_root_full_precision():
    s2 = np.sqrt(2)
    p = ComplexPoly.from_roots([1 / s2, 1 / s2, -s2, -s2], 3 / 8)
    got = sorted(poly_roots(p), key=lambda z: z.real)
    assert np.allclose(got, [-s2, -s2, 1 / s2, 1 / s2], atol=1e-10)


def test_roots_with_zero_roots():
    got = poly_roots(ComplexPoly([0, 0, -1, 1]))
    assert sorted(abs(x) for x in got) == pytest.approx([0, 0, 1])


def test_roots_rejects_constant():
    with pytest.raises(ValueError):
        poly_roots(ComplexPoly([3]))


def test_resultant_matches_root_product():
    f = ComplexPoly.from_roots([1, 2])
    g = ComplexPoly.from_roots([3, -1j])
    want = np.prod([a - b for a in (1, 2) for b in (3, -1j)])
    assert resultant(f, g) == pytest.approx(want)
    assert sylvester_matrix(f, g).shape == (4, 4)


def test_resultant_detects_common_root():
    f = ComplexPoly.from_roots([1, 2])
    g = ComplexPoly.from_roots([2, 5j])
    assert resultant_vanishes(f, g)
    assert not resultant_vanishes(f, ComplexPoly.from_roots([3, 4]))


def test_gcd():
    f = ComplexPoly.from_roots([1, 2, 3j])
    g = ComplexPoly.from_roots([2, 3j, -4])
    d = poly_gcd(f, g)
    assert d.degree == 2
    assert abs(d(2)) < 1e-9 and abs(d(3j)) < 1e-9
    assert poly_gcd(f, ComplexPoly.from_roots([7])).degree == 0
    with pytest.raises(ZeroPolynomial):
        poly_gcd(f, ComplexPoly())
