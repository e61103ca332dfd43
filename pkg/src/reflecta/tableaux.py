"""Partitions, bipartitions, standard bitableaux and their weight data.

Diagrams are drawn in English notation; the residue (content) of the box in
row ``r`` and column ``c`` (both 0-based) is ``c - r``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Union

from .weyl import BudgetExceeded

DEFAULT_TABLEAU_BUDGET = 200_000


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts) or list(parts) != sorted(parts, reverse=True):
            raise ValueError(f"not a partition: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def is_empty(self) -> bool:
        return not self.parts

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def is_hook(self) -> bool:
        return len(self.parts) <= 1 or self.parts[1] <= 1

    def diagonal_length(self) -> int:
        """b(lambda): number of boxes on the main diagonal."""
        return sum(1 for i, p in enumerate(self.parts) if p > i)

    def boxes(self) -> Iterator[tuple[int, int]]:
        for r, p in enumerate(self.parts):
            for c in range(p):
                yield (r, c)

    def removable(self) -> list[tuple[int, int]]:
        """Removable corners (row, col), top to bottom."""
        out = []
        for r, p in enumerate(self.parts):
            if r + 1 == len(self.parts) or self.parts[r + 1] < p:
                out.append((r, p - 1))
        return out

    def addable(self) -> list[tuple[int, int]]:
        out = []
        for r in range(len(self.parts) + 1):
            p = self.parts[r] if r < len(self.parts) else 0
            if r == 0 or self.parts[r - 1] > p:
                out.append((r, p))
        return out

    def remove(self, row: int) -> "Partition":
        parts = list(self.parts)
        parts[row] -= 1
        return Partition(tuple(p for p in parts if p > 0))

    def add(self, row: int) -> "Partition":
        parts = list(self.parts) + [0]
        parts[row] += 1
        return Partition(tuple(p for p in parts if p > 0))

    def dim(self) -> int:
        """f^lambda by counting standard tableaux."""
        return _count_standard(self.parts)

    def hook_length_dim(self) -> int:
        conj = self.conjugate().parts
        prod = 1
        for r, c in self.boxes():
            prod *= (self.parts[r] - c - 1) + (conj[c] - r - 1) + 1
        return math.factorial(self.size()) // prod

    def label(self) -> str:
        return "[" + ",".join(str(p) for p in self.parts) + "]"

    def __str__(self) -> str:
        return self.label()


@lru_cache(maxsize=None)
def _count_standard(parts: tuple[int, ...]) -> int:
    if sum(parts) <= 1:
        return 1
    lam = Partition(parts)
    return sum(_count_standard(lam.remove(r).parts) for r, _ in lam.removable())


def partitions(n: int) -> list[Partition]:
    """Partitions of n in decreasing lexicographic order."""
    out: list[Partition] = []

    def rec(remaining: int, cap: int, acc: list[int]) -> None:
        if remaining == 0:
            out.append(Partition(tuple(acc)))
            return
        for p in range(min(remaining, cap), 0, -1):
            acc.append(p)
            rec(remaining - p, p, acc)
            acc.pop()

    rec(n, n, [])
    return out


def classify_partition(lam: Partition) -> str:
    """'hook', 'E' (non-hook, not self-conjugate) or 'F' (non-hook, self-conjugate)."""
    if lam.is_hook():
        return "hook"
    return "F" if lam == lam.conjugate() else "E"


@dataclass(frozen=True, order=True)
class Bipartition:
    first: Partition
    second: Partition

    @classmethod
    def of(cls, first: Sequence[int], second: Sequence[int]) -> "Bipartition":
        return cls(Partition(tuple(first)), Partition(tuple(second)))

    @property
    def n(self) -> int:
        return self.first.size() + self.second.size()

    def swap(self) -> "Bipartition":
        return Bipartition(self.second, self.first)

    def conjugate(self) -> "Bipartition":
        """(lambda*, mu*)"""
        return Bipartition(self.first.conjugate(), self.second.conjugate())

    def dual(self) -> "Bipartition":
        """(mu*, lambda*), the partner under the ~ relation."""
        return Bipartition(self.second.conjugate(), self.first.conjugate())

    def is_proper(self) -> bool:
        return not self.first.is_empty() and not self.second.is_empty()

    def sort_key(self) -> tuple:
        return (self.first.parts, self.second.parts)

    def label(self) -> str:
        return f"({self.first.label()},{self.second.label()})"

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class DLabel:
    """Label of a simple D_n-module: an unordered pair, or (lambda, sign) when both halves agree."""

    first: Partition
    second: Partition
    sign: str | None = None

    def __post_init__(self) -> None:
        if self.sign is not None:
            if self.sign not in ("+", "-"):
                raise ValueError(f"bad sign {self.sign!r}")
            if self.first != self.second:
                raise ValueError("signed D-labels need equal halves")
        elif _part_key(self.first) < _part_key(self.second):
            a, b = self.first, self.second
            object.__setattr__(self, "first", b)
            object.__setattr__(self, "second", a)

    @classmethod
    def pair(cls, a: Partition, b: Partition) -> "DLabel":
        return cls(a, b, None)

    @property
    def n(self) -> int:
        return self.first.size() + self.second.size()

    def is_split(self) -> bool:
        return self.sign is not None

    def unsigned(self) -> "DLabel":
        return DLabel(self.first, self.second, None)

    def bipartition(self) -> Bipartition:
        """The ordered bipartition whose restriction carries this label."""
        return Bipartition(self.first, self.second)

    def conjugate(self) -> "DLabel":
        """{lambda*, mu*}; signed labels follow the epsilon'' rule (sign kept iff n/2 even)."""
        if self.sign is None:
            return DLabel(self.first.conjugate(), self.second.conjugate())
        keep = (self.n // 2) % 2 == 0
        sign = self.sign if keep else ("-" if self.sign == "+" else "+")
        c = self.first.conjugate()
        return DLabel(c, c, sign)

    def is_proper(self) -> bool:
        return not self.first.is_empty() and not self.second.is_empty()

    def sort_key(self) -> tuple:
        return (self.first.parts, self.second.parts, self.sign or "")

    def __lt__(self, other: "DLabel") -> bool:
        return self.sort_key() < other.sort_key()

    def label(self) -> str:
        tail = self.sign if self.sign is not None else self.second.label()
        return "{" + self.first.label() + "," + tail + "}"

    def __str__(self) -> str:
        return self.label()


def _part_key(p: Partition) -> tuple:
    return (p.size(), p.parts)


Label = Union[Bipartition, DLabel]


def dim_formula(shape: Bipartition | DLabel) -> int:
    if isinstance(shape, DLabel):
        d = dim_formula(shape.bipartition())
        return d // 2 if shape.sign is not None else d
    a = shape.first.size()
    return math.comb(shape.n, a) * shape.first.dim() * shape.second.dim()


def bipartitions(n: int, flavor: str = "ordered") -> list:
    """All ordered bipartitions of n, or all D_n labels (flavor 'unordered').

    The unordered flavor lists {lambda, mu} once, and replaces {lambda, lambda}
    by its two halves {lambda, +}, {lambda, -}.
    """
    ordered = [Bipartition(a, b) for k in range(n, -1, -1) for a in partitions(k) for b in partitions(n - k)]
    if flavor == "ordered":
        return ordered
    if flavor != "unordered":
        raise ValueError(f"unknown flavor {flavor!r}")
    out: list[DLabel] = []
    seen = set()
    for b in ordered:
        key = DLabel.pair(b.first, b.second)
        if key in seen:
            continue
        seen.add(key)
        if b.first == b.second:
            out.append(DLabel(b.first, b.first, "+"))
            out.append(DLabel(b.first, b.first, "-"))
        else:
            out.append(key)
    return out


def unordered_pairs(n: int) -> list[DLabel]:
    """Unordered pairs {lambda, mu} of total size n (no sign split)."""
    out, seen = [], set()
    for b in bipartitions(n):
        key = DLabel.pair(b.first, b.second)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


@dataclass(frozen=True)
class BipartitionClass:
    kind: str  # improper | arm_and_leg | E | F
    tag: str | None = None  # beta / gamma for arm_and_leg
    index: int | None = None

    def __str__(self) -> str:
        if self.kind == "arm_and_leg":
            return f"arm_and_leg({self.tag},d={self.index})"
        return self.kind


def arm_and_leg(n: int, tag: str, d: int) -> Bipartition:
    if not 1 <= d <= n - 1:
        raise ValueError("arm and leg index must satisfy 1 <= d <= n-1")
    arm, leg = Partition((n - d,)), Partition((1,) * d)
    return Bipartition(arm, leg) if tag == "beta" else Bipartition(leg, arm)


def _arm_leg_index(b: Bipartition) -> BipartitionClass | None:
    n = b.n
    for d in range(1, n):
        if b == arm_and_leg(n, "beta", d):
            return BipartitionClass("arm_and_leg", "beta", d)
    for d in range(1, n):
        if b == arm_and_leg(n, "gamma", d):
            return BipartitionClass("arm_and_leg", "gamma", d)
    return None


def classify_bipartition(b: Bipartition) -> BipartitionClass:
    if not b.is_proper():
        return BipartitionClass("improper")
    al = _arm_leg_index(b)
    if al is not None:
        return al
    return BipartitionClass("F" if b == b.dual() else "E")


def classify_unordered(label: DLabel) -> BipartitionClass:
    """Classification of an unordered pair {lambda, mu} into improper / A&L / E{n} / F{n}."""
    pair = label.unsigned()
    if not pair.is_proper():
        return BipartitionClass("improper")
    for b in (pair.bipartition(), pair.bipartition().swap()):
        al = _arm_leg_index(b)
        if al is not None and al.tag == "beta":
            return al
    return BipartitionClass("F" if pair == pair.conjugate() else "E")


def sim_partner(item: Label) -> Label:
    if isinstance(item, Bipartition):
        return item.dual()
    return item.conjugate()


def sim_classes(items: Sequence[Label]) -> list[list[Label]]:
    """Partition items into ~-classes; each class sorted, classes sorted by representative."""
    pool = set(items)
    classes = []
    done = set()
    for x in items:
        if x in done:
            continue
        cls = {x}
        y = sim_partner(x)
        if y in pool:
            cls.add(y)
        done |= cls
        classes.append(sorted(cls, key=lambda z: z.sort_key()))
    classes.sort(key=lambda c: c[0].sort_key())
    return classes


def e_set(n: int) -> list[Bipartition]:
    return [b for b in bipartitions(n) if classify_bipartition(b).kind == "E"]


def f_set(n: int) -> list[Bipartition]:
    return [b for b in bipartitions(n) if classify_bipartition(b).kind == "F"]


def e_set_unordered(n: int) -> list[DLabel]:
    return [p for p in unordered_pairs(n) if classify_unordered(p).kind == "E"]


def f_set_unordered(n: int) -> list[DLabel]:
    return [p for p in unordered_pairs(n) if classify_unordered(p).kind == "F"]


# --- standard bitableaux -------------------------------------------------

Tableau = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Weight:
    rho: tuple[int, ...]
    chi: tuple[int, ...]

    def restricted_d(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Weight seen by D_n: (rho_1 rho_{i+1})_{i<n} together with chi."""
        r = tuple(self.rho[0] * x for x in self.rho[1:])
        return (r, self.chi)


@dataclass(frozen=True)
class StandardBitableau:
    shape: Bipartition
    tableaux: tuple[Tableau, Tableau]

    def __post_init__(self) -> None:
        pos = {}
        for which, tab in enumerate(self.tableaux):
            for r, row in enumerate(tab):
                for c, x in enumerate(row):
                    pos[x] = (which, r, c)
        object.__setattr__(self, "_pos", tuple(pos[i] for i in range(1, len(pos) + 1)))

    @property
    def n(self) -> int:
        return self.shape.n

    @property
    def positions(self) -> tuple[tuple[int, int, int], ...]:
        return self._pos  # type: ignore[attr-defined]

    def sort_key(self) -> tuple:
        return self.positions

    def position(self, i: int) -> tuple[int, int, int]:
        return self.positions[i - 1]

    def residue(self, i: int) -> int:
        _, r, c = self.positions[i - 1]
        return c - r

    def rho(self, i: int) -> int:
        return 1 if self.positions[i - 1][0] == 0 else -1

    def weight(self) -> Weight:
        return Weight(tuple(self.rho(i) for i in range(1, self.n + 1)),
                      tuple(2 * self.residue(i) for i in range(1, self.n + 1)))

    def transpose(self) -> "StandardBitableau":
        """T*: transpose both tableaux."""
        return StandardBitableau(self.shape.conjugate(), tuple(_transpose(t) for t in self.tableaux))  # type: ignore[arg-type]

    def swap(self) -> "StandardBitableau":
        """T^natural: exchange the two tableaux."""
        return StandardBitableau(self.shape.swap(), (self.tableaux[1], self.tableaux[0]))

    def apply_s(self, i: int) -> "StandardBitableau | None":
        """s_i T (swap entries i, i+1), or None if the result is not standard."""
        def sw(x: int) -> int:
            return i + 1 if x == i else i if x == i + 1 else x
        tabs = tuple(tuple(tuple(sw(x) for x in row) for row in tab) for tab in self.tableaux)
        out = StandardBitableau(self.shape, tabs)  # type: ignore[arg-type]
        return out if out.is_standard() else None

    def is_standard(self) -> bool:
        for tab in self.tableaux:
            for r, row in enumerate(tab):
                for c, x in enumerate(row):
                    if c and row[c - 1] > x:
                        return False
                    if r and tab[r - 1][c] > x:
                        return False
        return True

    def length(self) -> int:
        """Coxeter length of sigma_T, where sigma_T applied to the row-major filling gives T."""
        ref = row_major(self.shape)
        images = [0] * self.n
        for ta, tb in zip(ref.tableaux, self.tableaux):
            for ra, rb in zip(ta, tb):
                for x, y in zip(ra, rb):
                    images[x - 1] = y
        return sum(1 for i in range(self.n) for j in range(i + 1, self.n) if images[i] > images[j])

    def seminormal_scale_sq(self):
        """Square of the factor relating the seminormal vector of T to the orthonormal one.

        Product over pairs j < k in the same tableau, k strictly north-east of
        j, of 1 - 1/(c_k - c_j)^2.
        """
        from fractions import Fraction

        out = Fraction(1)
        pos = self.positions
        for j in range(self.n):
            wj, rj, cj = pos[j]
            for k in range(j + 1, self.n):
                wk, rk, ck = pos[k]
                if wk == wj and rk < rj:
                    diff = (ck - rk) - (cj - rj)
                    out *= 1 - Fraction(1, diff * diff)
        return out

    def __str__(self) -> str:
        return "(" + "|".join("/".join(",".join(map(str, r)) for r in tab) or "." for tab in self.tableaux) + ")"


def _transpose(tab: Tableau) -> Tableau:
    if not tab:
        return ()
    return tuple(tuple(row[c] for row in tab if len(row) > c) for c in range(len(tab[0])))


def row_major(shape: Bipartition) -> StandardBitableau:
    k = 1
    tabs = []
    for lam in (shape.first, shape.second):
        rows = []
        for p in lam.parts:
            rows.append(tuple(range(k, k + p)))
            k += p
        tabs.append(tuple(rows))
    return StandardBitableau(shape, (tabs[0], tabs[1]))


def standard_bitableaux(shape: Bipartition, budget: int = DEFAULT_TABLEAU_BUDGET) -> list[StandardBitableau]:
    """All standard bitableaux of the shape, in canonical order."""
    total = dim_formula(shape)
    if total > budget:
        raise BudgetExceeded(f"{total} bitableaux exceed budget {budget}")
    n = shape.n
    target = (shape.first.parts, shape.second.parts)
    out: list[StandardBitableau] = []
    fill: list[list[list[int]]] = [[], []]

    def rec(k: int) -> None:
        if k > n:
            tabs = tuple(tuple(tuple(row) for row in f) for f in fill)
            out.append(StandardBitableau(shape, tabs))  # type: ignore[arg-type]
            return
        for which in (0, 1):
            rows = fill[which]
            tgt = target[which]
            for r in range(len(rows) + 1):
                cur = len(rows[r]) if r < len(rows) else 0
                if r >= len(tgt) or cur >= tgt[r]:
                    continue
                if r > 0 and len(rows[r - 1]) <= cur:
                    continue
                if r == len(rows):
                    rows.append([k])
                else:
                    rows[r].append(k)
                rec(k + 1)
                if len(rows[r]) == 1:
                    rows.pop()
                else:
                    rows[r].pop()

    rec(1)
    out.sort(key=StandardBitableau.sort_key)
    return out


def predecessors(shape: Bipartition | DLabel, flavor: str = "ordered") -> list[tuple[Label, int]]:
    """Shapes obtained by removing one box, with the residue of the removed box.

    Ordered: (nu, mu) for nu < lambda then (lambda, tau) for tau < mu.
    Unordered: {nu, tau} < {lambda, mu}; for {lambda, +/-} only {nu, lambda}.
    """
    if isinstance(shape, Bipartition) and flavor == "ordered":
        out: list[tuple[Label, int]] = []
        for r, c in shape.first.removable():
            out.append((Bipartition(shape.first.remove(r), shape.second), c - r))
        for r, c in shape.second.removable():
            out.append((Bipartition(shape.first, shape.second.remove(r)), c - r))
        return out
    if flavor != "unordered":
        raise ValueError(f"unknown flavor {flavor!r}")
    lab = shape if isinstance(shape, DLabel) else DLabel.pair(shape.first, shape.second)
    out = []
    seen = set()
    if lab.sign is not None:
        for r, c in lab.first.removable():
            out.append((DLabel.pair(lab.first.remove(r), lab.first), c - r))
        return out
    for b, res in predecessors(lab.bipartition(), "ordered"):
        key = (DLabel.pair(b.first, b.second), res)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


# --- label grammar --------------------------------------------------------

_PART_RE = re.compile(r"^\[(\d+(,\d+)*)?\]$")


def parse_partition(text: str) -> Partition:
    text = text.strip()
    if text in ("", "∅", "[]", "0"):
        return Partition(())
    if not _PART_RE.match(text):
        raise ValueError(f"cannot parse partition {text!r}")
    inner = text[1:-1]
    return Partition(tuple(int(x) for x in inner.split(",")) if inner else ())


def parse_label(text: str) -> Label:
    """Parse "([2,1],[1])", "{[2,1],[1]}" or "{[2,1],+}" (whitespace ignored)."""
    s = re.sub(r"\s+", "", text).replace("−", "-")
    if len(s) < 2 or (s[0], s[-1]) not in (("(", ")"), ("{", "}")):
        raise ValueError(f"cannot parse label {text!r}")
    body = s[1:-1]
    depth = 0
    split = None
    for i, ch in enumerate(body):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "," and depth == 0:
            if split is not None:
                raise ValueError(f"cannot parse label {text!r}")
            split = i
    if split is None:
        raise ValueError(f"cannot parse label {text!r}")
    left, right = body[:split], body[split + 1:]
    a = parse_partition(left)
    if s[0] == "(":
        return Bipartition(a, parse_partition(right))
    if right in ("+", "-"):
        return DLabel(a, a, right)
    b = parse_partition(right)
    if a == b:
        raise ValueError(f"{text!r}: equal halves need a sign, e.g. {{{left},+}}")
    return DLabel.pair(a, b)
