"""The rational group algebra of B_n / D_n and Lie closures inside it."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import weyl
from .linalg import SpanBasis, SparseVector, as_fraction, fmpq_matrix
from .weyl import SignedPermutation


@dataclass(frozen=True)
class AlgebraElement:
    n: int
    family: str
    terms: Mapping[SignedPermutation, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for g, c in self.terms.items():
            c = as_fraction(c)
            if not c:
                continue
            if g.n != self.n:
                raise ValueError("term rank differs from element rank")
            if not _in_family(g, self.family):
                raise ValueError(f"{g!r} is not in {self.family}")
            clean[g] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key())))

    @classmethod
    def of(cls, g: SignedPermutation, family: str = "type_b", coeff=1) -> "AlgebraElement":
        return cls(g.n, family, {g: as_fraction(coeff)})

    @classmethod
    def zero(cls, n: int, family: str = "type_b") -> "AlgebraElement":
        return cls(n, family, {})

    @classmethod
    def identity(cls, n: int, family: str = "type_b") -> "AlgebraElement":
        return cls.of(weyl.identity(n), family)

    def is_zero(self) -> bool:
        return not self.terms

    def _compatible(self, other: "AlgebraElement") -> None:
        if self.n != other.n or self.family != other.family:
            raise ValueError("algebra elements from different groups")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._compatible(other)
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out.get(g, 0) + c
        return AlgebraElement(self.n, self.family, out)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.n, self.family, {g: -c for g, c in self.terms.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, c) -> "AlgebraElement":
        c = as_fraction(c)
        return AlgebraElement(self.n, self.family, {g: c * x for g, x in self.terms.items()})

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return algebra_multiply(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (self.n, self.family, self.terms) == (other.n, other.family, other.terms)

    def __hash__(self) -> int:
        return hash((self.n, self.family, tuple(self.terms.items())))

    def to_vector(self, index: "GroupIndex") -> SparseVector:
        return {index.position[g]: c for g, c in self.terms.items()}

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{g!r}" for g, c in self.terms.items())


def _in_family(g: SignedPermutation, family: str) -> bool:
    if family == "type_b":
        return True
    if family == "type_d":
        return g.in_type_d()
    if family == "type_a":
        return g.in_type_a()
    raise ValueError(f"unknown family {family!r}")


def algebra_multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._compatible(b)
    out: dict[SignedPermutation, Fraction] = {}
    for g, x in a.terms.items():
        for h, y in b.terms.items():
            k = g * h
            out[k] = out.get(k, 0) + x * y
    return AlgebraElement(a.n, a.family, out)


def bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return algebra_multiply(a, b) - algebra_multiply(b, a)


def yjm_element(i: int, n: int, family: str = "type_b") -> AlgebraElement:
    """X_i = sum_{k<i} (k,i) + t_k t_i (k,i)."""
    if not 1 <= i <= n:
        raise ValueError(f"YJM index {i} out of range for n={n}")
    terms: dict[SignedPermutation, Fraction] = {}
    for k in range(1, i):
        terms[weyl.transposition(k, i, n)] = Fraction(1)
        terms[weyl.signed_transposition(k, i, n)] = Fraction(1)
    return AlgebraElement(n, family, terms)


def yjm_sum(n: int, family: str = "type_b") -> AlgebraElement:
    """The sum of all X_i (the sum of all reflections (i,j), t_i t_j (i,j))."""
    out = AlgebraElement.zero(n, family)
    for i in range(2, n + 1):
        out = out + yjm_element(i, n, family)
    return out


def t_sum(n: int) -> AlgebraElement:
    """t_1 + ... + t_n in the type-B group algebra."""
    return AlgebraElement(n, "type_b", {weyl.t(i, n): Fraction(1) for i in range(1, n + 1)})


def class_sums_of_reflections(n: int, family: str) -> list[AlgebraElement]:
    return [AlgebraElement(n, family, {g: Fraction(1) for g in cls}) for cls in weyl.reflection_classes(n, family)]


def element_of(gs: Iterable[SignedPermutation], family: str, n: int | None = None) -> AlgebraElement:
    gs = list(gs)
    n = gs[0].n if n is None else n
    out: dict[SignedPermutation, Fraction] = {}
    for g in gs:
        out[g] = out.get(g, 0) + 1
    return AlgebraElement(n, family, out)


# --- indexed group for vector arithmetic -------------------------------------------


class GroupIndex:
    """Enumerated group with canonical coordinates and permutation tables."""

    def __init__(self, n: int, family: str, budget: int = weyl.DEFAULT_GROUP_BUDGET):
        self.n = n
        self.family = family
        self.elements = weyl.enumerate_group(n, family, budget)
        self.position = {g: i for i, g in enumerate(self.elements)}
        self._left: dict[SignedPermutation, np.ndarray] = {}
        self._right: dict[SignedPermutation, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.elements)

    def left_table(self, g: SignedPermutation) -> np.ndarray:
        """L with L[i] = index of g * elements[i]."""
        tab = self._left.get(g)
        if tab is None:
            tab = np.array([self.position[g * h] for h in self.elements], dtype=np.int64)
            self._left[g] = tab
        return tab

    def right_table(self, g: SignedPermutation) -> np.ndarray:
        tab = self._right.get(g)
        if tab is None:
            tab = np.array([self.position[h * g] for h in self.elements], dtype=np.int64)
            self._right[g] = tab
        return tab

    def bracket_with_element(self, g: SignedPermutation, x: np.ndarray) -> np.ndarray:
        """Coordinates of g*x - x*g for coordinate arrays x (last axis indexes the group)."""
        left = np.empty_like(x)
        right = np.empty_like(x)
        left[..., self.left_table(g)] = x
        right[..., self.right_table(g)] = x
        return left - right

    def vector(self, a: AlgebraElement) -> np.ndarray:
        v = np.zeros(len(self), dtype=object)
        for g, c in a.terms.items():
            v[self.position[g]] = c
        return v

    def element(self, v: Mapping[int, Fraction] | Sequence) -> AlgebraElement:
        if isinstance(v, Mapping):
            items = v.items()
        else:
            items = ((i, x) for i, x in enumerate(v) if x)
        return AlgebraElement(self.n, self.family, {self.elements[i]: as_fraction(x) for i, x in items})


@lru_cache(maxsize=8)
def group_index(n: int, family: str) -> GroupIndex:
    return GroupIndex(n, family)


def center_projection(z: AlgebraElement, budget: int = weyl.DEFAULT_GROUP_BUDGET) -> AlgebraElement:
    """p(z) = |G|^-1 sum_g g z g^-1."""
    group = weyl.enumerate_group(z.n, z.family, budget)
    out: dict[SignedPermutation, Fraction] = {}
    for g in group:
        gi = g.inverse()
        for h, c in z.terms.items():
            k = g * h * gi
            out[k] = out.get(k, 0) + c
    size = len(group)
    return AlgebraElement(z.n, z.family, {k: c / size for k, c in out.items()})


def regular_representation_matrix(a: AlgebraElement, budget: int = weyl.DEFAULT_GROUP_BUDGET):
    """Matrix of left multiplication by a on the canonical group basis."""
    index = group_index(a.n, a.family) if budget >= weyl.DEFAULT_GROUP_BUDGET else GroupIndex(a.n, a.family, budget)
    size = len(index)
    rows = [[Fraction(0)] * size for _ in range(size)]
    for g, c in a.terms.items():
        tab = index.left_table(g)
        for j in range(size):
            rows[int(tab[j])][j] += c
    return fmpq_matrix(rows)


# --- Lie closure ---------------------------------------------------------------

from . import closure as _closure  # noqa: E402


def _integral(a: AlgebraElement) -> AlgebraElement:
    """Rescale to integer coefficients (spans and closures are unchanged)."""
    from math import lcm

    den = 1
    for c in a.terms.values():
        den = lcm(den, c.denominator)
    return a.scale(den) if den != 1 else a


class GroupAlgebraSystem(_closure.BracketSystem):
    """Brackets with fixed algebra elements acting on group-algebra coordinates."""

    def __init__(self, index: GroupIndex, gens: Sequence[AlgebraElement], seeds: Sequence[AlgebraElement]):
        self.index = index
        self.gens = [_integral(g) for g in gens]
        self.seeds = [_integral(s) for s in seeds]
        self.ambient = len(index)
        self.num_gens = len(self.gens)
        self.num_seeds = len(self.seeds)

    def _apply(self, g: int, x: np.ndarray) -> np.ndarray:
        out = None
        for h, c in self.gens[g].terms.items():
            term = self.index.bracket_with_element(h, x)
            if c != 1:
                term = term * (int(c) if x.dtype != np.float64 else float(c))
            out = term if out is None else out + term
        return out

    def seeds_mod(self, p: int) -> np.ndarray:
        out = np.zeros((self.num_seeds, self.ambient))
        for i, s in enumerate(self.seeds):
            for h, c in s.terms.items():
                out[i, self.index.position[h]] = int(c) % p
        return out

    def bracket_mod(self, g: int, x: np.ndarray, p: int) -> np.ndarray:
        out = None
        for h, c in self.gens[g].terms.items():
            term = self.index.bracket_with_element(h, x)
            if c != 1:
                term = term * float(int(c) % p)
            out = term if out is None else out + term
        return out

    def seed_exact(self, i: int) -> np.ndarray:
        v = np.zeros(self.ambient, dtype=object)
        for h, c in self.seeds[i].terms.items():
            v[self.index.position[h]] = int(c)
        return v

    def bracket_exact(self, g: int, x: np.ndarray) -> np.ndarray:
        return self._apply(g, x)

    def exact_matrix(self, vectors):
        k = len(vectors)
        if k == 0:
            return _closure.flint.fmpz_mat(0, self.ambient)
        flat = np.concatenate([np.asarray(v, dtype=object) for v in vectors]).tolist()
        return _closure.flint.fmpz_mat(k, self.ambient, [int(x) for x in flat])


@dataclass
class LieClosureResult:
    """Outcome of a Lie closure inside the group algebra.

    ``elements`` are actual bracket monomials spanning the closure (exact
    algebra elements); ``basis`` is their reduced echelon form, built on first
    access.
    """

    n: int
    family: str
    dim: int
    elements: list[AlgebraElement]
    generator_count: int
    bracket_evaluations: int
    method: str
    run: object = None
    _basis: SpanBasis | None = None

    @property
    def basis(self) -> SpanBasis:
        if self._basis is None:
            index = group_index(self.n, self.family)
            b = SpanBasis(len(index))
            for e in self.elements:
                b.insert(e.to_vector(index))
            if b.dim() != self.dim:
                raise AssertionError("echelon basis disagrees with certified dimension")
            self._basis = b
        return self._basis

    def dim_(self) -> int:
        return self.dim


def _family_of(elems: Sequence[AlgebraElement]) -> tuple[int, str]:
    if not elems:
        raise ValueError("need at least one generator")
    n, fam = elems[0].n, elems[0].family
    for e in elems:
        if (e.n, e.family) != (n, fam):
            raise ValueError("generators from different groups")
    return n, fam


def _as_elements(gens, family: str | None = None) -> list[AlgebraElement]:
    out = []
    for g in gens:
        if isinstance(g, AlgebraElement):
            out.append(g)
        else:
            fam = family or ("type_d" if g.in_type_d() else "type_b")
            out.append(AlgebraElement.of(g, fam))
    return out


def lie_closure(generators: Sequence, schedule: str = "generators", engine: str = "auto",
                family: str | None = None, deadline: float | None = None) -> LieClosureResult:
    """Smallest bracket-closed subspace containing the generators.

    ``engine='rational'`` runs the plain FIFO algorithm over Q with a SpanBasis
    (``schedule='all_pairs'`` brackets each new row with every accepted row,
    ``'generators'`` only with the generators).  ``engine='certified'`` uses
    the modular breadth-first closure with an exact certificate.  'auto'
    picks rational for ambient dimension <= 96.
    """
    gens = _as_elements(generators, family)
    n, fam = _family_of(gens)
    index = group_index(n, fam)
    if engine == "auto":
        engine = "rational" if len(index) <= 96 else "certified"
    if engine == "rational":
        return _rational_closure(gens, index, schedule)
    system = GroupAlgebraSystem(index, gens, gens)
    run = _closure.certified_closure(system, deadline=deadline)
    elements = [index.element(v) for v in _closure.replay_exact(system, run.words)]
    return LieClosureResult(n, fam, run.dim, elements, len(gens), run.candidates, run.method, run)


def _rational_closure(gens: list[AlgebraElement], index: GroupIndex, schedule: str,
                      seeds: list[AlgebraElement] | None = None) -> LieClosureResult:
    n, fam = gens[0].n, gens[0].family
    basis = SpanBasis(len(index))
    accepted: list[AlgebraElement] = []
    queue: list[AlgebraElement] = []
    evaluations = 0
    for g in (gens if seeds is None else seeds):
        if basis.insert(g.to_vector(index)):
            accepted.append(g)
            queue.append(g)
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        partners = list(accepted) if schedule == "all_pairs" else gens
        for y in partners:
            z = bracket(y, x)
            evaluations += 1
            if z.is_zero():
                continue
            if basis.insert(z.to_vector(index)):
                accepted.append(z)
                queue.append(z)
    res = LieClosureResult(n, fam, basis.dim(), accepted, len(gens), evaluations, f"rational-{schedule}")
    res._basis = basis
    return res


def derived_subalgebra(c: LieClosureResult, generators: Sequence | None = None, engine: str = "auto",
                       exhaustive: bool = False, deadline: float | None = None) -> LieClosureResult:
    """[g, g] for the closure g.

    By default the derived algebra is computed as the ad(generators)-closure of
    the brackets of pairs of generators.  ``exhaustive=True`` instead brackets
    all pairs of basis elements of c and re-closes (only sensible for small c).
    """
    index = group_index(c.n, c.family)
    if exhaustive:
        els = c.elements
        seeds = [bracket(a, b) for i, a in enumerate(els) for b in els[i + 1:]]
        seeds = [s for s in seeds if not s.is_zero()] or []
        if not seeds:
            return LieClosureResult(c.n, c.family, 0, [], len(els), 0, "exhaustive", None, SpanBasis(len(index)))
        return _rational_closure(els, index, "generators", seeds=seeds)
    gens = _as_elements(generators if generators is not None else _closure_generators(c), c.family)
    seeds = [bracket(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]]
    seeds = [s for s in seeds if not s.is_zero()]
    if not seeds:
        return LieClosureResult(c.n, c.family, 0, [], len(gens), 0, "trivial", None, SpanBasis(len(index)))
    if engine == "auto":
        engine = "rational" if len(index) <= 96 else "certified"
    if engine == "rational":
        return _rational_closure(gens, index, "generators", seeds=seeds)
    system = GroupAlgebraSystem(index, gens, seeds)
    run = _closure.certified_closure(system, deadline=deadline)
    elements = [index.element(v) for v in _closure.replay_exact(system, run.words)]
    return LieClosureResult(c.n, c.family, run.dim, elements, len(gens), run.candidates, run.method, run)


def _closure_generators(c: LieClosureResult) -> list[AlgebraElement]:
    return c.elements[: c.generator_count] if c.generator_count else c.elements
