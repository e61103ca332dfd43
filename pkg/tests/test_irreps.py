from __future__ import annotations

import json
from fractions import Fraction

import flint
import pytest

from reflecta import weyl
from reflecta.irreps import (
    APPROX,
    EXACT,
    artin_wedderburn_check,
    basis_weights,
    bilinear_form,
    build_rep_b,
    build_rep_d,
    commutant,
    intertwiner,
    intertwiner_failures,
    relation_error,
    relation_failures,
    rep_to_dict,
    split_twist_sign,
    twist_trace_failures,
    verify_branching,
    verify_exterior_power,
)
from reflecta.tableaux import Bipartition, DLabel, Partition, bipartitions, dim_formula, parse_label

B3 = bipartitions(3)
D4 = bipartitions(4, "unordered")


def exact_trace(m) -> Fraction:
    return sum((Fraction(int(m[i, i].p), int(m[i, i].q)) for i in range(m.nrows())), Fraction(0))


def characters(reps, family, n):
    group = weyl.enumerate_group(n, family)
    return [[exact_trace(r.matrix_of(g)) for g in group] for r in reps], len(group)


@pytest.mark.parametrize("n", [2, 3])
def test_b_characters_are_orthonormal(n):
    # brute force over the whole group: irreducible and pairwise inequivalent
    chars, order = characters([build_rep_b(b) for b in bipartitions(n)], "type_b", n)
    for i, a in enumerate(chars):
        for j, b in enumerate(chars):
            assert sum(x * y for x, y in zip(a, b)) == (order if i == j else 0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_d_characters_are_orthonormal(n):
    chars, order = characters([build_rep_d(lab) for lab in bipartitions(n, "unordered")], "type_d", n)
    for i, a in enumerate(chars):
        for j, b in enumerate(chars):
            assert sum(x * y for x, y in zip(a, b)) == (order if i == j else 0)


@pytest.mark.parametrize("b", B3 + bipartitions(4), ids=str)
def test_b_relations_and_commutant(b):
    rep = build_rep_b(b)
    assert rep.dim == dim_formula(b)
    assert relation_failures(rep) == []
    assert commutant(rep).dim() == 1
    assert commutant(rep, use_helpers=False).dim() == 1


@pytest.mark.parametrize("lab", D4, ids=str)
def test_d_relations_and_commutant(lab):
    rep = build_rep_d(lab)
    assert rep.dim == dim_formula(lab)
    assert relation_failures(rep) == []
    assert commutant(rep).dim() == 1


@pytest.mark.parametrize("b", B3, ids=str)
def test_orthogonal_form_is_orthogonal_and_conjugate(b):
    approx, exact = build_rep_b(b, APPROX), build_rep_b(b, EXACT)
    assert relation_error(approx) <= approx.ops.mp.mpf(2) ** -100
    for name, m in approx.gen_matrices.items():
        assert approx.ops.close(m * m.T, approx.ops.identity(approx.dim))
        assert approx.ops.close(m, m.T)
    for g in weyl.enumerate_group(3, "type_b"):
        assert abs(approx.ops.trace(approx.matrix_of(g)) - float(exact_trace(exact.matrix_of(g)))) < 1e-30


def test_split_halves():
    lam = Partition.of(2)
    plus, minus = build_rep_d(DLabel(lam, lam, "+")), build_rep_d(DLabel(lam, lam, "-"))
    assert plus.dim == minus.dim == 3
    sp = [exact_trace(plus.matrix_of(g)) for g in weyl.enumerate_group(4, "type_d")]
    sm = [exact_trace(minus.matrix_of(g)) for g in weyl.enumerate_group(4, "type_d")]
    assert sp != sm
    assert plus.parent is not None and plus.embedding is not None


def test_split_twist_signs():
    one, two, hook = Partition.of(1), Partition.of(2), Partition.of(2, 1)
    assert split_twist_sign(one, "+") == "-"
    assert split_twist_sign(two, "+") == "+" and split_twist_sign(two, "-") == "-"
    assert split_twist_sign(hook, "+") == "-" and split_twist_sign(hook, "-") == "+"


@pytest.mark.parametrize("b", bipartitions(4), ids=str)
@pytest.mark.parametrize("kind", ["eps_prime", "eps_double_prime"])
def test_intertwiners(b, kind):
    assert intertwiner_failures(kind, b) == []


def test_eps_prime_squares_to_identity():
    for b in bipartitions(4):
        phi = intertwiner("eps_prime", b)
        back = intertwiner("eps_prime", b.swap())
        assert back * phi == flint.fmpq_mat(phi.nrows(), phi.nrows(), [int(i == j) for i in range(phi.nrows())
                                                                         for j in range(phi.nrows())])


@pytest.mark.parametrize("b", bipartitions(3), ids=str)
@pytest.mark.parametrize("kind", ["eps_prime", "epsilon", "eps_double_prime"])
def test_twisted_traces(b, kind):
    assert twist_trace_failures(b, kind) == []


@pytest.mark.parametrize("text,kind,parity", [
    ("([2,1],[2,1])", "b_form", "antisymmetric"),
    ("([2],[1,1])", "b_form", "symmetric"),
    ("([1],[1])", "b_form", "antisymmetric"),
    ("([1],[1])", "d_form", "symmetric"),
    ("([2,1],[1])", "d_form", "antisymmetric"),
    ("([2,1],[2,1])", "d_form", "symmetric"),
    ("([1],[])", "d_form", "symmetric"),
])
def test_bilinear_forms(text, kind, parity):
    form = bilinear_form(parse_label(text), kind)
    assert form.ok and form.parity == parity


def test_bilinear_form_rejects_unqualified_labels():
    with pytest.raises(ValueError):
        bilinear_form(parse_label("([2],[1])"), "b_form")
    with pytest.raises(ValueError):
        bilinear_form(parse_label("{[2],+}"), "d_form")


@pytest.mark.parametrize("lab", bipartitions(4) + D4, ids=str)
def test_branching(lab):
    flavors = ["b_to_b"] if isinstance(lab, Bipartition) else ["d_to_d", "d_to_folding"]
    for flavor in flavors:
        report = verify_branching(lab, flavor)
        assert report.mismatches == [], report.mismatches


def test_split_weights_from_diagonals():
    rep = build_rep_d(parse_label("{[1],+}"))
    assert basis_weights(rep) == [((1, -1), (0, 0))]
    half = build_rep_d(parse_label("{[2],+}"))
    assert basis_weights(half) == [((1, 1, -1, -1), (0, 2, 0, 2)), ((1, -1, 1, -1), (0, 0, 2, 2)),
                                   ((1, -1, -1, 1), (0, 0, 2, 2))]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_exterior_powers(n):
    for d in range(1, n):
        for tag in ("beta", "gamma"):
            assert verify_exterior_power(n, d, tag).ok


@pytest.mark.parametrize("n", range(1, 9))
def test_artin_wedderburn(n):
    assert artin_wedderburn_check(n, "B").ok
    if n >= 2:
        assert artin_wedderburn_check(n, "D").ok


def test_export_is_json_and_exact():
    doc = rep_to_dict(build_rep_b(parse_label("([2],[1])")))
    text = json.dumps(doc)
    assert json.loads(text)["dim"] == 3
    assert doc["schema_version"] == 1 and doc["mode"] == EXACT
    assert set(doc["generators"]) == {"s1", "s2", "t1", "t2", "t3"}
    assert all("." not in x for rows in doc["generators"].values() for row in rows for x in row)
