from __future__ import annotations

import pytest

from reflecta.predicted import (
    algebra_dim,
    center_dim,
    marin_structure,
    predicted_structure,
    predicted_total,
    summand_for_label,
)
from reflecta.tableaux import bipartitions, classify_bipartition, dim_formula, parse_label, partitions

FROZEN_B = {2: 3, 3: 19, 4: 139, 5: 1630, 6: 21740, 7: 316241, 8: 5125618}
FROZEN_D = {3: 11, 4: 78, 5: 840, 6: 10954, 7: 159040, 8: 2572429}
FROZEN_TYPE_A = {2: 0, 3: 3, 4: 11, 5: 39, 6: 248, 7: 2089}


def type_a_oracle(n):
    total, seen = 0, set()
    for lam in partitions(n):
        if lam in seen or lam.dim() <= 1:
            continue
        conj = lam.conjugate()
        seen.update({lam, conj})
        if lam.is_hook():
            continue
        d = lam.dim()
        if lam != conj:
            total += d * d - 1
        elif ((n - lam.diagonal_length()) // 2) % 2 == 0:
            total += d * (d - 1) // 2
        else:
            total += d * (d + 1) // 2
    return total + (n - 1) ** 2 - 1


def b_oracle(n):
    total = type_a_oracle(n) + (n * n - 1) * (1 if n == 2 else 2)
    seen = set()
    for b in bipartitions(n):
        kind = classify_bipartition(b).kind
        if kind in ("improper", "arm_and_leg") or b in seen:
            continue
        seen.update({b, b.dual()})
        d = dim_formula(b)
        if kind == "E":
            total += d * d - 1
        else:
            total += d * (d - 1) // 2 if (n // 2) % 2 == 0 else d * (d + 1) // 2
    return total


@pytest.mark.parametrize("n", range(2, 8))
def test_type_a_totals(n):
    assert sum(s.algebra_dim for s in marin_structure(n).values()) == FROZEN_TYPE_A[n] == type_a_oracle(n)


@pytest.mark.parametrize("n", range(2, 9))
def test_b_totals(n):
    assert predicted_total(n, "B") == FROZEN_B[n] == b_oracle(n)


@pytest.mark.parametrize("n", range(3, 9))
def test_d_totals(n):
    assert predicted_total(n, "D") == FROZEN_D[n]


def test_algebra_dims():
    assert algebra_dim("sl", 40) == 1599
    assert algebra_dim("so", 36) == 630
    assert algebra_dim("sp", 80) == 3240
    assert algebra_dim("sl", 0) == 0


def test_center_dims():
    assert center_dim(4, "B") == 2 and center_dim(4, "D") == 1 and center_dim(2, "D") == 2


def test_n6_osp_summands():
    d = predicted_structure(6, "D")
    b = predicted_structure(6, "B")
    assert (d["{[3,1,1],[1]}"].kind, d["{[3,1,1],[1]}"].module_dim) == ("so", 36)
    assert (b["([2,1],[2,1])"].kind, b["([2,1],[2,1])"].module_dim) == ("sp", 80)
    assert (d["{[2,1],+}"].kind, d["{[2,1],+}"].module_dim) == ("sl", 40)
    assert d["{[2,1],+}"].labels == ("{[2,1],+}", "{[2,1],-}")


def test_n8_split_summands():
    d = predicted_structure(8, "D")
    assert (d["{[2,2],+}"].kind, d["{[2,2],+}"].module_dim) == ("so", 140)
    assert (d["{[2,1,1],-}"].kind, d["{[2,1,1],-}"].module_dim) == ("sl", 315)


def test_n2_beta_gamma_counted_once():
    b = predicted_structure(2, "B")
    assert "gamma" not in b and b["beta"].labels == ("([1],[1])",)


def test_summand_for_label():
    assert summand_for_label(4, "B", parse_label("([3],[])")) is None
    assert summand_for_label(4, "B", parse_label("([2,1],[])")).key == "L:alpha"
    assert summand_for_label(4, "B", parse_label("([],[2,2])")).key == "L:[2,2]"
    assert summand_for_label(4, "B", parse_label("([2],[2])")).key == "([1,1],[1,1])"
    assert summand_for_label(4, "B", parse_label("([1],[1,1,1])")).key == "beta"
    assert summand_for_label(4, "B", parse_label("([1],[3])")).key == "gamma"
    assert summand_for_label(2, "D", parse_label("{[1],+}")) is None
    assert summand_for_label(5, "D", parse_label("{[1,1,1,1],[1]}")).key == "beta"


@pytest.mark.parametrize("family,n", [("B", n) for n in range(2, 7)] + [("D", n) for n in range(3, 7)])
def test_every_proper_label_has_a_summand(family, n):
    flavor = "ordered" if family == "B" else "unordered"
    for lab in bipartitions(n, flavor):
        s = summand_for_label(n, family, lab)
        if lab.is_proper():
            assert s is not None and s.module_dim <= dim_formula(lab)
