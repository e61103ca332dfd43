from __future__ import annotations

import flint
import pytest

from reflecta import weyl
from reflecta.irreps import build_rep_b, build_rep_d
from reflecta.lie_structure import (
    block_from_matrices,
    block_image,
    center_report,
    classify,
    dual_pair_collapse,
    improper_agreement,
    type_a_check,
    osp_containment,
    verify_main_theorem,
)
from reflecta.tableaux import Bipartition, Partition, bipartitions, parse_label


def traceless(m):
    d = m.nrows()
    tr = sum((m[i, i] for i in range(d)), flint.fmpq(0))
    out = flint.fmpq_mat(m)
    for i in range(d):
        out[i, i] -= tr / d
    return out


def oracle_block_dim(rep, family):
    # the image of the whole reflection algebra differs from the derived image only by scalars
    mats = [traceless(rep.matrix_of(r)) for r in weyl.reflections(rep.n, family)]
    return block_from_matrices(mats).dim


@pytest.mark.parametrize("lab", bipartitions(3) + bipartitions(4), ids=str)
def test_b_block_dims_match_all_reflection_oracle(lab):
    assert block_image(lab, lab.n, "B").dim == oracle_block_dim(build_rep_b(lab), "type_b")


@pytest.mark.parametrize("lab", bipartitions(4, "unordered"), ids=str)
def test_d_block_dims_match_all_reflection_oracle(lab):
    assert block_image(lab, lab.n, "D").dim == oracle_block_dim(build_rep_d(lab), "type_d")


def test_block_without_upper_bound_agrees():
    lab = parse_label("([2,1],[1])")
    a = block_image(lab, 4, "B")
    b = block_image(lab, 4, "B", use_upper_bound=False)
    assert a.dim == b.dim == 63 and b.method == "exact-certificate"


def test_classify_small_algebras():
    so3 = [flint.fmpq_mat([[0, 1, 0], [-1, 0, 0], [0, 0, 0]]), flint.fmpq_mat([[0, 0, 1], [0, 0, 0], [-1, 0, 0]])]
    cls = classify(block_from_matrices(so3))
    assert (cls.family, cls.module_dim, cls.algebra_dim, cls.form_parity) == ("so", 3, 3, "symmetric")
    sl2 = [flint.fmpq_mat([[0, 1], [0, 0]]), flint.fmpq_mat([[0, 0], [1, 0]])]
    cls = classify(block_from_matrices(sl2))
    assert (cls.family, cls.algebra_dim, cls.form_parity) == ("sl", 3, "antisymmetric")
    diag = [flint.fmpq_mat([[1, 0], [0, -1]])]
    assert classify(block_from_matrices(diag)).family == "other"


@pytest.mark.parametrize("text,expected", [
    ("([2,1],[1])", ("sl", 8, 63)),
    ("([1],[1])", ("sl", 2, 3)),
    ("([2],[1,1])", ("so", 6, 15)),
    ("([1],[1,1])", ("sl", 3, 8)),
    ("([3],[])", ("sl", 1, 0)),
])
def test_classify_blocks(text, expected):
    lab = parse_label(text)
    cls = classify(block_image(lab, lab.n, "B"))
    assert (cls.family, cls.module_dim, cls.algebra_dim) == expected


@pytest.mark.parametrize("lab", [b for b in bipartitions(4) if b.is_proper()], ids=str)
def test_dual_pair_collapse(lab):
    assert dual_pair_collapse(lab)


@pytest.mark.parametrize("parts", [(2, 1), (3, 1), (2, 2)])
def test_improper_blocks_agree(parts):
    assert improper_agreement(Partition(parts))


@pytest.mark.parametrize("text,family", [("([2],[1,1])", "B"), ("([2,1],[1])", "D"), ("([1],[1])", "B"),
                                         ("{[2,1],[1]}", "D")])
def test_osp_containment(text, family):
    assert osp_containment(parse_label(text), family)


@pytest.mark.parametrize("n,family", [(2, "B"), (3, "B"), (3, "D"), (4, "D")])
def test_center(n, family):
    report = center_report(n, family)
    assert report.ok
    assert report.center_dim == (2 if family == "B" else 1)


@pytest.mark.parametrize("n,derived", [(2, 0), (3, 3), (4, 11)])
def test_type_a(n, derived):
    report = type_a_check(n)
    assert report.ok and report.derived_dim == derived


def test_regular_report_small_cases():
    report = verify_main_theorem(3, "B")
    assert report.overall and report.totals["closure"] == 21
    d2 = verify_main_theorem(2, "D")
    assert d2.overall and d2.totals["closure"] == 2 and d2.notes
    b2 = verify_main_theorem(2, "B")
    assert b2.overall and any("coincide" in x for x in b2.notes)


@pytest.mark.parametrize("n,family", [(3, "B"), (4, "B"), (3, "D"), (4, "D")])
def test_blocks_report(n, family):
    report = verify_main_theorem(n, family, "blocks")
    assert report.overall, report.rows()
    assert report.totals["computed_distinct"] == report.totals["predicted_derived"]


def test_block_report_is_thread_independent():
    one = verify_main_theorem(4, "B", "blocks", threads=1).to_dict()
    many = verify_main_theorem(4, "B", "blocks", threads=4).to_dict()
    assert one == many


def test_budget_is_enforced():
    with pytest.raises(weyl.BudgetExceeded):
        verify_main_theorem(4, "B", max_group_order=100)


def test_type_d_block_takes_ordered_label():
    assert block_image(Bipartition.of([2], [1]), 3, "D").dim == 8
