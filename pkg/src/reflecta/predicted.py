"""Purely combinatorial prediction of the simple summands of the derived algebras.

Nothing here touches matrices; the output is compared against closures and
block classifications computed elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tableaux import (
    Bipartition,
    DLabel,
    Label,
    Partition,
    arm_and_leg,
    classify_partition,
    dim_formula,
    e_set,
    e_set_unordered,
    f_set,
    f_set_unordered,
    partitions,
    sim_classes,
)


@dataclass(frozen=True)
class Summand:
    key: str
    kind: str  # sl | so | sp
    module_dim: int
    labels: tuple[str, ...]  # the block labels collapsing onto this summand
    note: str = ""

    @property
    def algebra_dim(self) -> int:
        return algebra_dim(self.kind, self.module_dim)


def algebra_dim(kind: str, d: int) -> int:
    if kind == "sl":
        return d * d - 1 if d > 0 else 0
    if kind == "so":
        return d * (d - 1) // 2
    if kind == "sp":
        return d * (d + 1) // 2
    raise ValueError(kind)


def osp_kind(symmetric: bool) -> str:
    return "so" if symmetric else "sp"


def b_form_symmetric(n: int) -> bool:
    """Parity of the form on S^(lambda,mu) with (lambda,mu) = (mu*,lambda*)."""
    return (n // 2) % 2 == 0


def d_form_symmetric(b: Bipartition) -> bool:
    """Parity of the form on S^(lambda,mu) with lambda, mu self-conjugate."""
    return ((b.n - b.first.diagonal_length() - b.second.diagonal_length()) // 2) % 2 == 0


def split_form_symmetric(lam: Partition) -> bool:
    """Parity of the form on S^{lambda,+/-} when n/2 is even."""
    return lam.diagonal_length() % 2 == 0


def type_a_form_symmetric(lam: Partition) -> bool:
    return ((lam.size() - lam.diagonal_length()) // 2) % 2 == 0


def alpha(n: int) -> Partition:
    return Partition((n - 1, 1)) if n >= 2 else Partition((1,))


def marin_structure(n: int) -> dict[str, Summand]:
    """Simple summands of the derived algebra generated by transpositions in Q S_n."""
    if n < 2:
        raise ValueError("need n >= 2")
    out: dict[str, Summand] = {}
    a = alpha(n)
    out["alpha"] = Summand("alpha", "sl", a.dim(), (a.label(),), "natural")
    pool = [lam for lam in partitions(n) if classify_partition(lam) == "E"]
    for cls in _partition_classes(pool):
        lam = cls[0]
        out[lam.label()] = Summand(lam.label(), "sl", lam.dim(), tuple(p.label() for p in cls))
    for lam in partitions(n):
        if classify_partition(lam) == "F":
            out[lam.label()] = Summand(lam.label(), osp_kind(type_a_form_symmetric(lam)), lam.dim(), (lam.label(),))
    return out


def _partition_classes(pool: list[Partition]) -> list[list[Partition]]:
    seen, out = set(), []
    for lam in sorted(pool, key=lambda p: p.parts):
        if lam in seen:
            continue
        cls = sorted({lam, lam.conjugate()}, key=lambda p: p.parts)
        seen.update(cls)
        out.append(cls)
    return out


def _l_part(n: int) -> dict[str, Summand]:
    return {f"L:{k}": Summand(f"L:{k}", s.kind, s.module_dim, s.labels, s.note) for k, s in marin_structure(n).items()}


def predicted_structure(n: int, family: str) -> dict[str, Summand]:
    """Predicted simple summands of the derived algebra (reflections of B_n or D_n).

    Zero-dimensional summands are kept so that every block label has an
    entry; callers summing dimensions are unaffected.
    """
    if family in ("B", "type_b"):
        return _predicted_b(n)
    if family in ("D", "type_d"):
        return _predicted_d(n)
    raise ValueError(f"unknown family {family!r}")


def _predicted_b(n: int) -> dict[str, Summand]:
    if n < 2:
        raise ValueError("type B prediction needs n >= 2")
    out = _l_part(n)
    beta, gamma = arm_and_leg(n, "beta", 1), arm_and_leg(n, "gamma", 1)
    beta_labels = tuple(arm_and_leg(n, "beta", d).label() for d in range(1, n))
    gamma_labels = tuple(arm_and_leg(n, "gamma", d).label() for d in range(1, n))
    if beta == gamma:
        labels = tuple(dict.fromkeys(beta_labels + gamma_labels))
        out["beta"] = Summand("beta", "sl", n, labels, "beta and gamma coincide at n=2; counted once")
    else:
        out["beta"] = Summand("beta", "sl", n, beta_labels, "exterior powers of the natural module")
        out["gamma"] = Summand("gamma", "sl", n, gamma_labels, "exterior powers of the twisted natural module")
    for cls in sim_classes(e_set(n)):
        rep = cls[0]
        out[rep.label()] = Summand(rep.label(), "sl", dim_formula(rep), tuple(b.label() for b in cls))
    for b in f_set(n):
        out[b.label()] = Summand(b.label(), osp_kind(b_form_symmetric(n)), dim_formula(b), (b.label(),))
    return out


def _predicted_d(n: int) -> dict[str, Summand]:
    if n < 3:
        raise ValueError("type D prediction needs n >= 3")
    out = _l_part(n)
    labels = tuple(DLabel.pair(Partition((n - d,)), Partition((1,) * d)).label() for d in range(1, n))
    out["beta"] = Summand("beta", "sl", n, tuple(dict.fromkeys(labels)), "exterior powers of the natural module")
    for cls in sim_classes(e_set_unordered(n)):
        rep = cls[0]
        if rep.first != rep.second:
            out[rep.label()] = Summand(rep.label(), "sl", dim_formula(rep), tuple(x.label() for x in cls))
        else:
            half = dim_formula(rep) // 2
            for sign in ("+", "-"):
                key = DLabel(rep.first, rep.first, sign).label()
                out[key] = Summand(key, "sl", half, tuple(sorted(set(_d_sign_class(n, rep.first, sign)))))
    for lab in f_set_unordered(n):
        if lab.first != lab.second:
            b = lab.bipartition()
            sym = b_form_symmetric(n) if b.second == b.first.conjugate() else d_form_symmetric(b)
            out[lab.label()] = Summand(lab.label(), osp_kind(sym), dim_formula(lab), (lab.label(),))
        else:
            half = dim_formula(lab) // 2
            lam = lab.first
            if (n // 2) % 2 == 0:
                for sign in ("+", "-"):
                    key = DLabel(lam, lam, sign).label()
                    out[key] = Summand(key, osp_kind(split_form_symmetric(lam)), half, (key,))
            else:
                key = DLabel(lam, lam, "+").label()
                out[key] = Summand(key, "sl", half, (key, DLabel(lam, lam, "-").label()),
                                   "the minus half is dual to the plus half")
    return out


def _d_sign_class(n: int, lam: Partition, sign: str) -> list[str]:
    lab = DLabel(lam, lam, sign)
    return [lab.label(), lab.conjugate().label()]


def predicted_total(n: int, family: str) -> int:
    return sum(s.algebra_dim for s in predicted_structure(n, family).values())


def center_dim(n: int, family: str) -> int:
    if family in ("B", "type_b"):
        return 2
    if family in ("D", "type_d"):
        return 2 if n == 2 else 1
    if family in ("A", "type_a"):
        return 1
    raise ValueError(family)


def summand_for_label(n: int, family: str, label: Label) -> Summand | None:
    """The predicted summand onto which the block of ``label`` maps isomorphically.

    Returns None for labels whose block is zero (one-dimensional modules, and
    every module of the abelian group D_2).
    """
    if family in ("D", "type_d") and n < 3:
        return None
    if not label.is_proper():
        lam = label.first if not label.first.is_empty() else label.second
        if lam.dim() <= 1:
            return None
        l_part = _l_part(n)
        if lam.is_hook():
            return l_part["L:alpha"]
        for s in l_part.values():
            if lam.label() in s.labels:
                return s
        return None
    text = label.label()
    for s in predicted_structure(n, family).values():
        if text in s.labels:
            return s
    return None
