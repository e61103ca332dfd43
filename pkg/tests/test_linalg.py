from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from reflecta.linalg import (
    ApproxContext,
    DimensionMismatch,
    SpanBasis,
    as_fraction,
    fmpq_matrix,
    format_rational,
    matrix_entries,
    nullspace,
    solve_commutant,
    solve_intertwiners,
    solve_invariant_form,
    span_of,
)

small = st.integers(-3, 3).map(Fraction)
vectors = st.lists(st.lists(small, min_size=5, max_size=5), min_size=0, max_size=7)


def dense_to_sparse(row):
    return {i: x for i, x in enumerate(row) if x}


@given(vectors)
def test_span_dimension_matches_sympy_rank(rows):
    basis = span_of((dense_to_sparse(r) for r in rows), 5)
    expected = sympy.Matrix(rows).rank() if rows else 0
    assert basis.dim() == expected


@given(vectors, st.randoms())
@settings(max_examples=50)
def test_span_is_independent_of_insertion_order(rows, rnd):
    a = span_of((dense_to_sparse(r) for r in rows), 5)
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    b = span_of((dense_to_sparse(r) for r in shuffled), 5)
    assert a.same_span(b)
    assert a.sorted_rows() == b.sorted_rows()  # reduced echelon form is canonical


@given(vectors)
def test_rows_are_reduced_echelon(rows):
    basis = span_of((dense_to_sparse(r) for r in rows), 5)
    for p in basis.pivots():
        row = basis.rows[basis.pivot_index[p]]
        assert min(row) == p and row[p] == 1
        for q in basis.pivots():
            if q != p:
                assert p not in basis.rows[basis.pivot_index[q]]


@given(vectors)
def test_decompose_reconstructs(rows):
    basis = span_of((dense_to_sparse(r) for r in rows), 5)
    for r in rows:
        coeffs, res = basis.decompose(dense_to_sparse(r))
        assert not res
        total = {}
        for k, c in coeffs.items():
            for i, x in basis.rows[k].items():
                total[i] = total.get(i, 0) + c * x
        assert {i: x for i, x in total.items() if x} == dense_to_sparse(r)


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=4))
def test_nullspace_matches_sympy(rows):
    sols = nullspace((dense_to_sparse(r) for r in rows), 4)
    m = sympy.Matrix(rows)
    assert len(sols) == 4 - m.rank()
    for s in sols:
        assert all(sum(r[i] * s.get(i, 0) for i in range(4)) == 0 for r in rows)


def test_dimension_mismatch():
    b = SpanBasis(3)
    with pytest.raises(DimensionMismatch):
        b.insert({3: Fraction(1)})


def test_rational_formatting():
    assert format_rational(Fraction(-3, 4)) == "-3/4"
    assert format_rational(Fraction(2)) == "2"
    assert as_fraction("5/6") == Fraction(5, 6)


def perm_matrices():
    s = fmpq_matrix([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    c = fmpq_matrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    return s, c


def test_commutant_of_permutation_module():
    # the permutation module of S_3 is trivial + standard, so the commutant is 2-dimensional
    assert solve_commutant(list(perm_matrices())).dim() == 2


def test_invariant_form_of_so2():
    j = fmpq_matrix([[0, -1], [1, 0]])
    forms = solve_invariant_form([j])
    assert forms.dim() == 2  # the identity, and j itself
    assert forms.contains({0: Fraction(1), 3: Fraction(1)})


def test_invariant_form_uses_diagonal_support():
    h = fmpq_matrix([[1, 0], [0, -1]])
    e = fmpq_matrix([[0, 1], [0, 0]])
    f = fmpq_matrix([[0, 0], [1, 0]])
    forms = solve_invariant_form([h, e, f])
    assert forms.dim() == 1
    (row,) = forms.rows
    g = [[row.get(2 * i + j, 0) for j in range(2)] for i in range(2)]
    assert g[0][0] == g[1][1] == 0 and g[0][1] == -g[1][0] != 0


def test_intertwiners_between_equivalent_modules():
    s, c = perm_matrices()
    p = fmpq_matrix([[1, 1, 0], [0, 1, 0], [0, 0, 2]])
    pinv = p.inv()
    moved = [p * m * pinv for m in (s, c)]
    sols = solve_intertwiners([s, c], moved)
    assert sols.dim() == 2
    assert matrix_entries(p * s) == matrix_entries(moved[0] * p)


def test_approx_context():
    ctx = ApproxContext()
    assert ctx.ctx() is ApproxContext().ctx()
    assert ctx.tolerance > 0
    with pytest.raises(ValueError):
        ApproxContext(precision_bits=32)
