from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflecta import weyl
from reflecta.group_algebra import (
    AlgebraElement,
    bracket,
    center_projection,
    class_sums_of_reflections,
    derived_subalgebra,
    lie_closure,
    regular_representation_matrix,
    t_sum,
    yjm_element,
    yjm_sum,
)
from reflecta.linalg import SpanBasis, flatten_matrix

GROUP3 = weyl.enumerate_group(3, "type_b")


@st.composite
def elements(draw):
    terms = draw(st.dictionaries(st.sampled_from(GROUP3), st.integers(-3, 3), max_size=4))
    return AlgebraElement(3, "type_b", terms)


@given(elements(), elements(), elements())
@settings(max_examples=40)
def test_jacobi_and_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)
    total = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
    assert total.is_zero()


@given(elements(), elements())
@settings(max_examples=30)
def test_regular_representation_is_multiplicative(a, b):
    assert regular_representation_matrix(a * b) == regular_representation_matrix(a) * regular_representation_matrix(b)


def test_yjm_elements_commute():
    xs = [yjm_element(i, 4) for i in range(1, 5)]
    ts = [AlgebraElement.of(weyl.t(i, 4)) for i in range(1, 5)]
    for a in xs + ts:
        for b in xs + ts:
            assert bracket(a, b).is_zero()
    assert yjm_element(1, 4).is_zero()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_reflection_sums_are_central(n):
    gens = [AlgebraElement.of(g) for g in weyl.generators(n, "coxeter_b")]
    for z in [yjm_sum(n), t_sum(n)] + class_sums_of_reflections(n, "type_b"):
        assert all(bracket(z, g).is_zero() for g in gens)
        assert center_projection(z) == z


def test_center_projection_of_reflection():
    z = center_projection(AlgebraElement.of(weyl.t(1, 3)))
    assert z == t_sum(3).scale(Fraction(1, 3))


def test_family_membership_is_enforced():
    with pytest.raises(ValueError):
        AlgebraElement.of(weyl.t(1, 3), "type_d")


FROZEN = {  # (n, family): (closure dim, derived dim)
    (2, "type_b"): (5, 3),
    (3, "type_b"): (21, 19),
    (2, "type_d"): (2, 0),
    (3, "type_d"): (12, 11),
    (4, "type_d"): (79, 78),
    (4, "type_a"): (12, 11),
}


@pytest.mark.parametrize("key", list(FROZEN), ids=str)
def test_closure_engines_agree(key):
    n, family = key
    refl = weyl.reflections(n, family)
    dims = {lie_closure(refl, family=family, engine=e).dim for e in ("rational", "certified")}
    dims.add(lie_closure(refl, family=family, engine="rational", schedule="all_pairs").dim)
    dims.add(lie_closure(weyl.small_generating_set(n, family), family=family).dim)
    assert dims == {FROZEN[key][0]}


@pytest.mark.parametrize("key", list(FROZEN), ids=str)
def test_derived_algebra(key):
    n, family = key
    c = lie_closure(weyl.reflections(n, family), family=family)
    assert derived_subalgebra(c).dim == FROZEN[key][1]


def test_derived_algebra_exhaustive_route():
    c = lie_closure(weyl.reflections(2, "type_b"), family="type_b")
    assert derived_subalgebra(c, exhaustive=True).dim == 3


def test_closure_in_matrix_algebra_matches():
    # the regular representation is faithful, so closing the matrices gives the same dimension
    n = 2
    mats = [regular_representation_matrix(AlgebraElement.of(r)) for r in weyl.reflections(n, "type_b")]
    basis = SpanBasis(64)
    accepted = []
    for m in mats:
        if basis.insert(flatten_matrix(m)):
            accepted.append(m)
    head = 0
    while head < len(accepted):
        x = accepted[head]
        head += 1
        for g in mats:
            y = g * x - x * g
            if basis.insert(flatten_matrix(y)):
                accepted.append(y)
    assert basis.dim() == FROZEN[(2, "type_b")][0]
