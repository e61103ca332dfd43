from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflecta import weyl
from reflecta.weyl import LinearCharacterKind, SignedPermutation, character_value


@st.composite
def signed_permutations(draw, n_min=1, n_max=6, family="type_b"):
    n = draw(st.integers(n_min, n_max))
    images = tuple(draw(st.permutations(range(1, n + 1))))
    signs = list(draw(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n)))
    if family == "type_d" and signs.count(-1) % 2:
        signs[0] = -signs[0]
    return SignedPermutation(n, images, tuple(signs))


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


@given(st.data())
def test_product_matches_matrix_product(data):
    g = data.draw(signed_permutations())
    h = data.draw(signed_permutations(n_min=g.n, n_max=g.n))
    assert (g * h).matrix() == _matmul(g.matrix(), h.matrix())


@given(signed_permutations())
def test_inverse_and_identity(g):
    e = weyl.identity(g.n)
    assert (g * g.inverse()).is_identity()
    assert g * e == g == e * g


@given(st.data())
def test_linear_characters_are_multiplicative(data):
    g = data.draw(signed_permutations())
    h = data.draw(signed_permutations(n_min=g.n, n_max=g.n))
    for kind in LinearCharacterKind:
        assert character_value(kind, g * h) == character_value(kind, g) * character_value(kind, h)


def test_character_values_on_generators():
    n = 4
    assert character_value("epsilon_prime", weyl.t(2, n)) == -1
    assert character_value("epsilon_prime", weyl.s(1, n)) == 1
    assert character_value("epsilon_double_prime", weyl.t(2, n)) == 1
    assert character_value("epsilon_double_prime", weyl.s(1, n)) == -1
    for r in weyl.reflections(n, "type_b"):
        assert character_value("epsilon", r) == -1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("family", ["type_b", "type_d", "type_a"])
def test_enumeration_matches_order(n, family):
    group = weyl.enumerate_group(n, family)
    assert len(group) == len(set(group)) == weyl.group_order(n, family)
    assert group == sorted(group, key=SignedPermutation.sort_key)


def test_enumeration_budget():
    with pytest.raises(weyl.BudgetExceeded):
        weyl.enumerate_group(6, "type_b", budget=1000)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("family", ["coxeter_b", "coxeter_d", "b_with_t1"])
def test_coxeter_relations_hold(n, family):
    gens = weyl.generators(n, family)
    for word in weyl.coxeter_relation_words(n, family):
        g = weyl.identity(n)
        for w in word:
            g = g * gens[w]
        assert g.is_identity(), word


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("family,gen_family", [("type_b", "coxeter_b"), ("type_d", "coxeter_d"),
                                               ("type_b", "b_with_t1")])
def test_generators_generate(n, family, gen_family):
    gens = weyl.generators(n, gen_family)
    seen = {weyl.identity(n)}
    frontier = list(seen)
    while frontier:
        frontier = [g * s for g in frontier for s in gens if g * s not in seen]
        seen.update(frontier)
    assert len(seen) == weyl.group_order(n, family)


@given(st.one_of(signed_permutations(n_min=2, n_max=5), signed_permutations(n_min=2, n_max=5, family="type_d")))
@settings(max_examples=60)
def test_word_in_generators_round_trip(g):
    families = ["coxeter_b", "b_with_t1"] + (["coxeter_d"] if g.in_type_d() else [])
    for fam in families:
        gens = weyl.generators(g.n, fam)
        h = weyl.identity(g.n)
        for w in weyl.word_in_generators(g, fam):
            h = h * gens[w]
        assert h == g


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_reflection_counts_and_orders(n):
    assert len(weyl.reflections(n, "type_b")) == n * n
    assert len(weyl.reflections(n, "type_d")) == n * (n - 1)
    assert len(weyl.reflections(n, "type_a")) == n * (n - 1) // 2
    for r in weyl.reflections(n, "type_b"):
        assert r.order() == 2


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("family", ["type_b", "type_d"])
def test_reflection_classes_are_conjugacy_classes(n, family):
    group_gens = weyl.generators(n, "coxeter_b" if family == "type_b" else "coxeter_d")
    classes = weyl.reflection_classes(n, family)
    for cls in classes:
        assert set(weyl.conjugation_closure([cls[0]], group_gens)) == set(cls)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("family", ["type_b", "type_d", "type_a"])
def test_small_generating_set_meets_every_reflection_class(n, family):
    small = set(weyl.small_generating_set(n, family))
    for cls in weyl.reflection_classes(n, family):
        assert small & set(cls)


def test_type_membership():
    g = weyl.t(1, 3) * weyl.t(2, 3)
    assert g.in_type_d() and not weyl.t(1, 3).in_type_d()
    assert weyl.s(1, 3).in_type_a() and not g.in_type_a()
    assert all(x.in_type_d() for x in weyl.generators(4, "coxeter_d"))


def test_permutation_sign_small_cases():
    for perm in itertools.permutations(range(1, 5)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        assert weyl.permutation_sign(perm) == (-1) ** inversions
