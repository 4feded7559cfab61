from fractions import Fraction

import sympy as sp
from hypothesis import given, strategies as st

from projcoh.linalg import LinearSystem, eliminate, matrix_rank, solve_system
from projcoh.scalar_field import LAM, ONE, ZERO, as_ratfun


def system(rows, rhs, names=("x", "y")):
    data = {}
    for i, (row, b) in enumerate(zip(rows, rhs)):
        entry = {u: as_ratfun(c) for u, c in zip(names, row)}
        entry[None] = -as_ratfun(b)
        data[i] = entry
    return LinearSystem.from_rows(data, names)


def test_generic_solution_with_pole():
    rep = solve_system(system([[LAM + 1, 0], [0, 1]], [1, 2]))
    assert rep.generic_solvable
    assert rep.solution["x"] == 1 / (LAM + 1)
    ev = rep.at(Fraction(-1))
    assert ev is not None and ev.resolution == "becomes_unsolvable" and not ev.solvable


def test_becomes_solvable():
    # (2λ+1)x = 2λ+1 together with x = 0 only holds where 2λ+1 vanishes
    rep = solve_system(system([[2 * LAM + 1, 0], [1, 0]], [2 * LAM + 1, 0]))
    assert not rep.generic_solvable
    ev = rep.at(Fraction(-1, 2))
    assert ev.resolution == "becomes_solvable" and ev.solution["x"] == ZERO


def test_dimension_jump():
    rep = solve_system(system([[LAM, 1], [1, LAM]], [0, 0]))
    assert rep.nullity == 0
    jumps = {ev.value: ev.nullity for ev in rep.exceptional_values}
    assert jumps == {Fraction(1): 1, Fraction(-1): 1}


def test_irrational_conditions_are_reported():
    rep = solve_system(system([[LAM * LAM - 2, 0], [0, 1]], [0, 0]))
    assert rep.exceptional_values == []
    assert [str(f) for f in rep.irrational_factors] == ["λ^2 - 2"]


def test_rows_are_deduplicated():
    s = system([[1, 2], [2, 4], [Fraction(1, 2), 1]], [1, 2, Fraction(1, 2)])
    assert len(s) == 1


matrices = st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=5)


@given(matrices)
def test_rank_matches_sympy(rows):
    ours, _ = matrix_rank([[as_ratfun(c) for c in r] for r in rows])
    assert ours == sp.Matrix(rows).rank()


@given(matrices, st.integers(-3, 3))
def test_nullspace_vectors_solve(rows, shift):
    names = tuple(f"u{i}" for i in range(4))
    mat = [[LAM * c + shift if (i + j) % 2 else c for j, c in enumerate(r)] for i, r in enumerate(rows)]
    s = LinearSystem.homogeneous(mat, names)
    e = eliminate(s)
    for vec in e.nullspace:
        for row in s.matrix:
            assert sum((c * vec[u] for c, u in zip(row, names)), ZERO) == ZERO
