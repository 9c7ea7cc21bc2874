from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncatenoid.errors import NoSolution, ParamOutOfRange, UnknownName
from ncatenoid.fluxmodel import FluxData, random_rotation
from ncatenoid.residues import build_matrix_A, verify_solution
from ncatenoid.solver import (
    congruent,
    flux_vectors,
    named_example,
    phi_type2,
    solve,
    solve_type1_family,
    solve_type2,
    solve_type3,
    square_flux_data,
    tetrahedral_points,
)


def _tet_data():
    return FluxData.from_points(tetrahedral_points(), [1, 1, 1, 1])


def test_tetrahedral_solve_is_congruent_to_named():
    got = solve_type3(_tet_data())
    assert got and congruent(got[0], named_example("tetrahedral").candidates[0])


def test_flux_vectors_reproduce_input():
    d = square_flux_data(1.2)
    for c in solve_type3(d):
        assert np.allclose(flux_vectors(c), 4 * math.pi * d.weights[:, None] * d.vectors, atol=1e-9)


def test_square_flux_solver_matches_closed_form():
    got = solve_type3(square_flux_data(1.2))
    named = named_example("square-flux", {"p": 1.2}).candidates
    assert len(got) == 4
    for c in got:
        assert sum(congruent(c, e) for e in named) >= 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_solutions_invariant_under_rotation(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(3, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    a = rng.uniform(0.5, 2.0, 3)
    s = -(a @ v)
    d = FluxData(np.vstack([v, s / np.linalg.norm(s)]), np.append(a, np.linalg.norm(s)))
    base = solve_type3(d)
    rot = solve_type3(d.rotated(random_rotation(rng)))
    assert len(base) == len(rot)
    for c in base:
        assert verify_solution(c).reduction2_residual < 1e-9
        assert np.allclose(flux_vectors(c), 4 * math.pi * d.weights[:, None] * d.vectors, atol=1e-8)


def test_type2_pfaffian_identity():
    # det A is the square of the Pfaffian-type bracket, and the reduced
    # quartic gives that bracket (not det A itself) on the normalised slice
    p = (0.3, -1.7, 2.2, -0.4)
    pj = lambda j, k: p[j] * p[k] + 1  # noqa: E731
    for x in (0.37 + 0.2j, 2.5, -3.1 + 1j):
        q = (x, -x, 1.0, -1.0)
        pf = (pj(0, 1) * pj(2, 3) / ((q[0] - q[1]) * (q[2] - q[3]))
              - pj(0, 2) * pj(1, 3) / ((q[0] - q[2]) * (q[1] - q[3]))
              + pj(0, 3) * pj(1, 2) / ((q[0] - q[3]) * (q[1] - q[2])))
        det = np.linalg.det(build_matrix_A(p, q))
        assert abs(det - pf ** 2) < 1e-10 * max(1.0, abs(det))
        reduced = x * phi_type2(p)(x + 1 / x) / (4 * (x - 1) ** 2 * (x + 1) ** 2)
        assert abs(reduced - pf) < 1e-10 * max(1.0, abs(pf))


def test_type2_random_planar():
    rng = np.random.default_rng(11)
    for _ in range(10):
        th = rng.uniform(0, 2 * np.pi, 3)
        v = np.stack([np.cos(th), np.zeros(3), np.sin(th)], 1)
        a = rng.uniform(0.3, 2, 3)
        s = -(a @ v)
        d = FluxData(np.vstack([v, s / np.linalg.norm(s)]), np.append(a, np.linalg.norm(s)))
        out = solve_type2(d)
        assert len(out) <= 4
        for c in out:
            assert verify_solution(c).reduction2_residual < 1e-9
            assert np.allclose(flux_vectors(c), 4 * math.pi * d.weights[:, None] * d.vectors, atol=1e-8)


def test_type1_newton_family():
    # n = 6 parallel ends: one down, five up with e2 = 0 weights
    a = np.array([1.0, 1.0, 1.0, 1.0, 0.0])
    a[4] = -(sum(x * y for x, y in itertools.combinations(a[:4], 2))) / a[:4].sum()
    e3 = np.array([0, 0, 1.0])
    d = FluxData(np.vstack([-e3] + [e3] * 5), np.append(a.sum(), a))
    kind, fam = solve(d)
    assert kind == "TYPE_I" and fam.residual() < 1e-10
    assert verify_solution(fam.candidate(2.0)).reduction2_residual < 1e-9


def test_type1_deterministic_with_seed():
    e3 = np.array([0, 0, 1.0])
    a = np.array([1.0, 1.0, 1.0, 1.0, 0.0])
    a[4] = -(sum(x * y for x, y in itertools.combinations(a[:4], 2))) / a[:4].sum()
    d = FluxData(np.vstack([-e3] + [e3] * 5), np.append(a.sum(), a))
    f1 = solve_type1_family(d, seed=5)
    f2 = solve_type1_family(d, seed=5)
    assert f1.q == f2.q


def test_unsupported_n_raises():
    e = np.eye(3)
    v = np.vstack([e, -e[:2] / 1.0, [[0, 0, -1.0]]])
    d = FluxData(v, np.ones(6))
    with pytest.raises(NoSolution):
        solve(d)


def test_named_examples_errors():
    with pytest.raises(UnknownName):
        named_example("trinoid-of-doom")
    with pytest.raises(ParamOutOfRange):
        named_example("parallel4", {"a2": 1, "a3": 1, "a4": 1})
    with pytest.raises(ParamOutOfRange):
        named_example("zm", {"m": 1})


def test_tetrahedral_flat_has_zero_weights():
    ex = named_example("tetrahedral-flat")
    assert ex.flat
    c = ex.candidates[0]
    assert verify_solution(c).reduction2_residual < 1e-9


def test_square_flux_at_one_has_two_roots():
    ex = named_example("square-flux", {"p": 1.0})
    assert len(ex.candidates) + len(ex.notes) == 2
