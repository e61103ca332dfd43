"""Matrix models of the simple modules of B_n and D_n.

Two normalizations are available for the weight basis indexed by standard
bitableaux:

* ``exact_seminormal``: rational matrices.  When i and i+1 lie in the same
  tableau but neither in the same row nor column, with r = res(i+1) - res(i),
  s_i acts on the pair (T, s_i T) (T the one with i+1 north-east of i, so
  r > 0) by [[1/r, 1], [1 - 1/r^2, -1/r]].
* ``approx_orthogonal``: the orthonormal form with entries 1/r and
  sqrt(1 - 1/r^2), in 256-bit floating point.

The two are related by the diagonal change of basis v_T = a_T c_T where a_T^2
is ``StandardBitableau.seminormal_scale_sq``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import flint

from . import weyl
from .group_algebra import AlgebraElement, yjm_element
from .linalg import (
    ApproxContext,
    SpanBasis,
    as_fraction,
    format_rational,
    identity_matrix,
    solve_commutant,
    solve_intertwiners,
    unflatten_matrix,
)
from .tableaux import (
    Bipartition,
    DLabel,
    Label,
    Partition,
    StandardBitableau,
    arm_and_leg,
    bipartitions,
    dim_formula,
    predecessors,
    row_major,
    standard_bitableaux,
)
from .weyl import LinearCharacterKind, SignedPermutation, character_value

EXACT = "exact_seminormal"
APPROX = "approx_orthogonal"
MODES = (EXACT, APPROX)


class RelationFailure(AssertionError):
    """A constructed representation violates a defining relation."""


def _mode(mode: str) -> str:
    aliases = {"exact": EXACT, "approx": APPROX}
    mode = aliases.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return mode


# --- mode-agnostic matrix helpers ------------------------------------------------------


class MatrixOps:
    """Dense matrix arithmetic over Q (FLINT) or high-precision reals (mpmath)."""

    def __init__(self, mode: str, approx: ApproxContext | None = None):
        self.mode = _mode(mode)
        self.approx = approx or ApproxContext()
        self.mp = self.approx.ctx() if self.mode == APPROX else None

    def zeros(self, r: int, c: int | None = None):
        c = r if c is None else c
        if self.mp is None:
            return flint.fmpq_mat(r, c)
        return self.mp.matrix(r, c)

    def identity(self, d: int):
        if self.mp is None:
            return identity_matrix(d)
        return self.mp.eye(d)

    def scalar(self, x: Fraction):
        if self.mp is None:
            return flint.fmpq(x.numerator, x.denominator)
        return self.mp.mpf(x.numerator) / x.denominator

    def sqrt(self, x: Fraction):
        return self.mp.sqrt(self.scalar(x))

    def transpose(self, m):
        return m.transpose() if self.mp is None else m.T

    def close(self, a, b, tol=None) -> bool:
        if self.mp is None:
            return a == b
        return self.max_abs_diff(a, b) <= (tol if tol is not None else self.approx.tolerance)

    def scalar_close(self, a, b) -> bool:
        if self.mp is None:
            return a == b
        return abs(a - b) <= self.approx.tolerance

    def max_abs_diff(self, a, b):
        if self.mp is None:
            return 0 if a == b else math.inf
        worst = self.mp.mpf(0)
        for i in range(a.rows):
            for j in range(a.cols):
                worst = max(worst, abs(a[i, j] - b[i, j]))
        return worst

    def trace(self, m):
        d = m.nrows() if self.mp is None else m.rows
        out = self.scalar(Fraction(0))
        for i in range(d):
            out += m[i, i]
        return out

    def size(self, m) -> int:
        return m.nrows() if self.mp is None else m.rows


# --- representation container ------------------------------------------------------------------


@dataclass
class RepMatrixSet:
    label: Label
    family: str  # type_b | type_d
    basis_order: list
    scalar_mode: str
    gen_matrices: dict[str, object]
    gen_elements: dict[str, SignedPermutation]
    ops: MatrixOps = field(repr=False)
    parent: "RepMatrixSet | None" = field(default=None, repr=False)
    embedding: object = field(default=None, repr=False)  # columns span this piece inside parent

    @property
    def dim(self) -> int:
        return len(self.basis_order)

    @property
    def n(self) -> int:
        return self.label.n

    def generator_family(self) -> str:
        return "coxeter_b" if self.family == "type_b" else "coxeter_d"

    def coxeter_generators(self) -> list:
        n = self.n
        if self.family == "type_b":
            return [self.gen_matrices[f"s{i}"] for i in range(1, n)] + [self.gen_matrices[f"t{n}"]]
        return [self.gen_matrices[f"s{i}"] for i in range(1, n)] + [self.gen_matrices[f"s~{n}"]]

    def matrix_of(self, g: SignedPermutation):
        """Image of a group element, via a word in the Coxeter generators."""
        if self.family == "type_d" and not g.in_type_d():
            raise ValueError("element outside D_n")
        gens = self.coxeter_generators()
        m = self.ops.identity(self.dim)
        for w in weyl.word_in_generators(g, self.generator_family()):
            m = m * gens[w]
        return m

    def matrix_of_element(self, a: AlgebraElement):
        out = self.ops.zeros(self.dim)
        for g, c in a.terms.items():
            out += self.matrix_of(g) * self.ops.scalar(c)
        return out

    def yjm_matrix(self, i: int):
        return self.matrix_of_element(yjm_element(i, self.n, self.family))


def _rep_ops(mode: str) -> MatrixOps:
    return MatrixOps(mode)


# --- type B ------------------------------------------------------------------------------------


def _s_action(T: StandardBitableau, i: int) -> list[tuple[StandardBitableau, Fraction, str]]:
    """Column of s_i at T as (target, coefficient, kind) with kind in {'rat', 'root'}."""
    a, b = T.position(i), T.position(i + 1)
    if a[0] != b[0]:
        return [(T.apply_s(i), Fraction(1), "rat")]
    if a[1] == b[1]:
        return [(T, Fraction(1), "rat")]
    if a[2] == b[2]:
        return [(T, Fraction(-1), "rat")]
    r = T.residue(i + 1) - T.residue(i)
    S = T.apply_s(i)
    return [(T, Fraction(1, r), "rat"), (S, Fraction(1, r), "offdiag")]


def build_rep_b(shape: Bipartition, mode: str = EXACT, check: bool = True) -> RepMatrixSet:
    mode = _mode(mode)
    ops = _rep_ops(mode)
    basis = standard_bitableaux(shape)
    pos = {T: k for k, T in enumerate(basis)}
    d = len(basis)
    n = shape.n
    mats: dict[str, object] = {}
    elems: dict[str, SignedPermutation] = {}
    for i in range(1, n):
        m = ops.zeros(d)
        for j, T in enumerate(basis):
            for target, coeff, kind in _s_action(T, i):
                if kind == "rat":
                    m[pos[target], j] = ops.scalar(coeff)
                else:
                    r = 1 / coeff
                    q = 1 - Fraction(1, r * r)
                    if mode == APPROX:
                        m[pos[target], j] = ops.sqrt(q)
                    else:
                        m[pos[target], j] = ops.scalar(q if r > 0 else Fraction(1))
        mats[f"s{i}"] = m
        elems[f"s{i}"] = weyl.s(i, n)
    for i in range(1, n + 1):
        m = ops.zeros(d)
        for j, T in enumerate(basis):
            m[j, j] = ops.scalar(Fraction(T.rho(i)))
        mats[f"t{i}"] = m
        elems[f"t{i}"] = weyl.t(i, n)
    rep = RepMatrixSet(shape, "type_b", basis, mode, mats, elems, ops)
    if check:
        failures = relation_failures(rep)
        if failures:
            raise RelationFailure(f"{shape.label()}: relations fail: {failures[:3]}")
    return rep


# --- relations ------------------------------------------------------------------------------


def _word_product(ops: MatrixOps, gens: Sequence, word: Sequence[int], d: int):
    m = ops.identity(d)
    for w in word:
        m = m * gens[w]
    return m


def relation_failures(rep: RepMatrixSet, tol=None) -> list[str]:
    """Names of violated defining relations (empty when all hold)."""
    ops = rep.ops
    n, d = rep.n, rep.dim
    out = []
    gens = rep.coxeter_generators()
    fam = rep.generator_family()
    if n >= 2:
        ident = ops.identity(d)
        for word in weyl.coxeter_relation_words(n, fam):
            if not ops.close(_word_product(ops, gens, word, d), ident, tol):
                out.append("word" + "".join(str(w) for w in word))
    if rep.family == "type_b":
        for i in range(1, n):
            si, ti, tj = rep.gen_matrices[f"s{i}"], rep.gen_matrices[f"t{i}"], rep.gen_matrices[f"t{i + 1}"]
            if not ops.close(si * tj * si, ti, tol):
                out.append(f"t{i}=s{i}t{i + 1}s{i}")
    return out


def relation_error(rep: RepMatrixSet):
    """Largest entrywise deviation over all defining relations (0 in exact mode when they hold)."""
    ops = rep.ops
    n, d = rep.n, rep.dim
    gens = rep.coxeter_generators()
    worst = 0 if ops.mp is None else ops.mp.mpf(0)
    ident = ops.identity(d)
    for word in weyl.coxeter_relation_words(n, rep.generator_family()):
        worst = max(worst, ops.max_abs_diff(_word_product(ops, gens, word, d), ident))
    if rep.family == "type_b":
        for i in range(1, n):
            si, ti, tj = rep.gen_matrices[f"s{i}"], rep.gen_matrices[f"t{i}"], rep.gen_matrices[f"t{i + 1}"]
            worst = max(worst, ops.max_abs_diff(si * tj * si, ti))
    return worst


# --- type D --------------------------------------------------------------------------------------


def restrict_to_d(rep: RepMatrixSet, label: DLabel | None = None) -> RepMatrixSet:
    n = rep.n
    mats = {f"s{i}": rep.gen_matrices[f"s{i}"] for i in range(1, n)}
    elems = {f"s{i}": weyl.s(i, n) for i in range(1, n)}
    mats[f"s~{n}"] = rep.gen_matrices[f"t{n - 1}"] * rep.gen_matrices[f"t{n}"] * rep.gen_matrices[f"s{n - 1}"]
    elems[f"s~{n}"] = weyl.generators(n, "coxeter_d")[-1]
    lab = label if label is not None else DLabel.pair(rep.label.first, rep.label.second)
    return RepMatrixSet(lab, "type_d", list(rep.basis_order), rep.scalar_mode, mats, elems, rep.ops, parent=rep)


@dataclass(frozen=True)
class SplitBasisVector:
    """Basis vector v_T + sign * v_{T^natural} of a half of a self-paired module."""

    tableau: StandardBitableau
    sign: str

    def sort_key(self) -> tuple:
        return self.tableau.sort_key()

    def __str__(self) -> str:
        return f"{self.tableau}{self.sign}{self.tableau.swap()}"


def build_rep_d(label: DLabel, mode: str = EXACT, check: bool = True) -> RepMatrixSet:
    mode = _mode(mode)
    if not isinstance(label, DLabel):
        raise TypeError("type D labels are unordered pairs or signed labels")
    full = build_rep_b(label.bipartition(), mode, check=check)
    res = restrict_to_d(full, label.unsigned())
    if label.sign is None:
        if label.first == label.second:
            raise ValueError("equal halves need a sign")
        return res
    if mode == APPROX:
        piece = _approx_half(res, label.sign)
    else:
        pieces = split_module(res)
        piece = pieces[0] if label.sign == "+" else pieces[1]
    if check:
        failures = relation_failures(piece)
        if failures:
            raise RelationFailure(f"{label.label()}: relations fail: {failures[:3]}")
    return piece


def _approx_half(res: RepMatrixSet, sign: str) -> RepMatrixSet:
    """Half module on the vectors c_T +/- c_{T^natural}, T with 1 in the first tableau."""
    ops = res.ops
    basis = res.basis_order
    pos = {T: k for k, T in enumerate(basis)}
    chosen = [T for T in basis if T.rho(1) == 1]
    d, h = len(basis), len(chosen)
    sgn = 1 if sign == "+" else -1
    emb = ops.zeros(d, h)
    for j, T in enumerate(chosen):
        emb[pos[T], j] += 1
        emb[pos[T.swap()], j] += sgn
    rows = [pos[T] for T in chosen]
    mats = {}
    for name, m in res.gen_matrices.items():
        img = m * emb
        small = ops.zeros(h)
        for a, r in enumerate(rows):
            for b in range(h):
                small[a, b] = img[r, b]
        if not ops.close(img, emb * small):
            raise RelationFailure("half module is not invariant")
        mats[name] = small
    lab = DLabel(res.label.first, res.label.first, sign)
    return RepMatrixSet(lab, "type_d", [SplitBasisVector(T, sign) for T in chosen], res.scalar_mode, mats,
                        dict(res.gen_elements), ops, parent=res, embedding=emb)


def gz_diagonal_helpers(rep: RepMatrixSet) -> list:
    """Diagonal images of Jucys-Murphy elements and sign elements (cheap commutant pruning).

    On a tableau-indexed basis these are read off the weights; otherwise they
    are evaluated from group words.
    """
    n = rep.n
    ops = rep.ops
    if rep.basis_order and all(isinstance(T, StandardBitableau) for T in rep.basis_order):
        out = []
        cols = [T.weight() for T in rep.basis_order]
        rows = [[w.chi[i] for w in cols] for i in range(1, n)]
        if rep.family == "type_b":
            rows += [[w.rho[i] for w in cols] for i in range(n)]
        else:
            rows += [list(x) for x in zip(*(w.restricted_d()[0] for w in cols))]
        for row in rows:
            m = ops.zeros(rep.dim)
            for k, x in enumerate(row):
                m[k, k] = ops.scalar(Fraction(x))
            out.append(m)
        return out
    out = [rep.yjm_matrix(i) for i in range(2, n + 1)]
    if rep.family == "type_b":
        out += [rep.gen_matrices[f"t{i}"] for i in range(1, n + 1)]
    else:
        out += [rep.matrix_of(weyl.t(1, n) * weyl.t(j, n)) for j in range(2, n + 1)]
    return out


def commutant(rep: RepMatrixSet, use_helpers: bool = True) -> SpanBasis:
    if rep.scalar_mode != EXACT:
        raise ValueError("commutant needs exact mode")
    mats = list(rep.gen_matrices.values())
    if use_helpers:
        mats = gz_diagonal_helpers(rep) + mats
    return solve_commutant(mats)


def split_module(rep: RepMatrixSet) -> list[RepMatrixSet]:
    """Decompose a restricted module using idempotents of its commutant."""
    if rep.scalar_mode != EXACT:
        raise ValueError("split_module needs exact mode")
    d = rep.dim
    comm = commutant(rep)
    if comm.dim() == 1:
        return [rep]
    if comm.dim() != 2:
        raise ValueError(f"commutant of dimension {comm.dim()}: not covered by the splitting rule")
    ident = identity_matrix(d)
    c = None
    for row in comm.rows:
        m = unflatten_matrix(row, d)
        if not _is_scalar(m):
            c = m
            break
    if c is None:
        raise AssertionError("commutant basis has no non-scalar element")
    # c^2 = a c + b I
    a, b = _quadratic_relation(c, ident, d)
    disc = a * a + 4 * b
    root = _rational_sqrt(disc)
    if root is None or root == 0:
        raise ValueError("commutant element has no rational eigenvalue split")
    r1, r2 = (a + root) / 2, (a - root) / 2
    e1 = (c - ident * flint.fmpq(r2.numerator, r2.denominator)) * flint.fmpq((r1 - r2).denominator, (r1 - r2).numerator)
    e2 = ident - e1
    if not (e1 * e1 == e1 and e1 * e2 == flint.fmpq_mat(d, d)):
        raise AssertionError("idempotents fail")
    label = rep.label
    pieces = [_piece(rep, e) for e in (e1, e2)]
    # first piece: the one containing v_R + v_{R natural}
    basis = rep.basis_order
    pos = {T: k for k, T in enumerate(basis)}
    R = row_major(label.bipartition())
    vec = flint.fmpq_mat(d, 1)
    vec[pos[R], 0] += 1
    vec[pos[R.swap()], 0] += 1
    if not e1 * vec == vec:
        pieces.reverse()
    signs = ("+", "-")
    out = []
    for sign, (emb, mats, cols) in zip(signs, pieces):
        lab = DLabel(label.first, label.second, sign) if isinstance(label, DLabel) and label.first == label.second else label
        tags = [SplitBasisVector(basis[j], sign) for j in cols]
        out.append(RepMatrixSet(lab, rep.family, tags, EXACT, mats, dict(rep.gen_elements), rep.ops,
                                parent=rep, embedding=emb))
    return out


def _is_scalar(m) -> bool:
    d = m.nrows()
    for i in range(d):
        for j in range(d):
            if i != j and m[i, j] != 0:
                return False
            if i == j and m[i, i] != m[0, 0]:
                return False
    return True


def _quadratic_relation(c, ident, d: int) -> tuple[Fraction, Fraction]:
    """(a, b) with c^2 = a c + b I."""
    from .linalg import flatten_matrix

    b, a = _coords_in(flatten_matrix(ident), flatten_matrix(c), flatten_matrix(c * c))
    return a, b


def _coords_in(u: dict, v: dict, w: dict) -> tuple[Fraction, Fraction]:
    """Solve w = x u + y v (u, v independent)."""
    keys = sorted(set(u) | set(v) | set(w))
    for i in keys:
        for j in keys:
            if j <= i:
                continue
            det = u.get(i, 0) * v.get(j, 0) - u.get(j, 0) * v.get(i, 0)
            if det:
                x = (w.get(i, 0) * v.get(j, 0) - w.get(j, 0) * v.get(i, 0)) / det
                y = (u.get(i, 0) * w.get(j, 0) - u.get(j, 0) * w.get(i, 0)) / det
                return Fraction(x), Fraction(y)
    raise ValueError("dependent pair")


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    p, q = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if p * p == x.numerator and q * q == x.denominator:
        return Fraction(p, q)
    return None


def _piece(rep: RepMatrixSet, e) -> tuple:
    """Embedding, matrices and chosen columns of the image of an idempotent."""
    d = rep.dim
    cols: list[int] = []
    span = SpanBasis(d)
    for j in range(d):
        col = {i: as_fraction(e[i, j]) for i in range(d) if e[i, j] != 0}
        if col and span.insert(col):
            cols.append(j)
    h = len(cols)
    emb = flint.fmpq_mat(d, h)
    for k, j in enumerate(cols):
        scale = e[j, j]
        if scale == 0:
            raise AssertionError("idempotent column has zero diagonal entry")
        for i in range(d):
            emb[i, k] = e[i, j] / scale
    rows_sel = flint.fmpq_mat(h, h)
    for a, j in enumerate(cols):
        for b in range(h):
            rows_sel[a, b] = emb[j, b]
    inv = rows_sel.inv()
    mats = {}
    for name, m in rep.gen_matrices.items():
        img = m * emb
        sel = flint.fmpq_mat(h, h)
        for a, j in enumerate(cols):
            for b in range(h):
                sel[a, b] = img[j, b]
        small = inv * sel
        if emb * small != img:
            raise AssertionError("idempotent image is not invariant")
        mats[name] = small
    return emb, mats, cols


# --- intertwiners and forms ------------------------------------------------------------------


def _positions(basis: Sequence[StandardBitableau]) -> dict:
    return {T: k for k, T in enumerate(basis)}


def intertwiner(kind: str, shape: Bipartition, mode: str = EXACT):
    """Matrix of the map attached to tensoring with epsilon' or epsilon''.

    eps_prime: S^(lambda,mu) -> S^(mu,lambda), T -> T^natural (a permutation
    matrix in both normalizations).  eps_double_prime: S^(lambda,mu) ->
    S^(lambda*,mu*), T -> (-1)^l(T) T*; in exact mode the column of T also
    carries the factor a_T^2, which makes the map rational at the cost of an
    overall positive scalar.
    """
    mode = _mode(mode)
    ops = _rep_ops(mode)
    src = standard_bitableaux(shape)
    if kind == "eps_prime":
        dst = _positions(standard_bitableaux(shape.swap()))
        m = ops.zeros(len(src))
        for j, T in enumerate(src):
            m[dst[T.swap()], j] = ops.scalar(Fraction(1))
        return m
    if kind == "eps_double_prime":
        dst = _positions(standard_bitableaux(shape.conjugate()))
        m = ops.zeros(len(src))
        for j, T in enumerate(src):
            sign = Fraction(-1 if T.length() % 2 else 1)
            val = sign * (T.seminormal_scale_sq() if mode == EXACT else 1)
            m[dst[T.transpose()], j] = ops.scalar(val)
        return m
    raise ValueError(f"unknown intertwiner kind {kind!r}")


def intertwiner_failures(kind: str, shape: Bipartition, mode: str = EXACT) -> list[str]:
    """Generators g for which phi(g v) != chi(g) g phi(v)."""
    mode = _mode(mode)
    src = build_rep_b(shape, mode)
    target = shape.swap() if kind == "eps_prime" else shape.conjugate()
    dst = build_rep_b(target, mode)
    phi = intertwiner(kind, shape, mode)
    char = _CHARACTER_OF[kind]
    bad = []
    for name, m in src.gen_matrices.items():
        chi = character_value(char, src.gen_elements[name])
        lhs = phi * m
        rhs = dst.gen_matrices[name] * phi * src.ops.scalar(Fraction(chi))
        if not src.ops.close(lhs, rhs):
            bad.append(name)
    return bad


@dataclass
class BilinearFormMatrix:
    label: Label
    kind: str
    gram: object
    parity: str  # symmetric | antisymmetric | neither
    expected_parity: str
    nondegenerate: bool
    invariant: bool

    @property
    def ok(self) -> bool:
        return self.nondegenerate and self.invariant and self.parity == self.expected_parity


def _expected_parity(label: Label, kind: str) -> str:
    from .predicted import b_form_symmetric, d_form_symmetric, split_form_symmetric

    if isinstance(label, DLabel) and label.sign is not None:
        sym = split_form_symmetric(label.first)
    elif kind == "b_form":
        sym = b_form_symmetric(label.n)
    else:
        b = label.bipartition() if isinstance(label, DLabel) else label
        sym = d_form_symmetric(b)
    return "symmetric" if sym else "antisymmetric"


def _seminormal_gram_scale(basis: Sequence[StandardBitableau]):
    d = len(basis)
    m = flint.fmpq_mat(d, d)
    for k, T in enumerate(basis):
        a2 = T.seminormal_scale_sq()
        m[k, k] = flint.fmpq(a2.numerator, a2.denominator)
    return m


def bilinear_form(label: Label, kind: str, mode: str = EXACT) -> BilinearFormMatrix:
    """Gram matrix of the invariant form attached to a self-dual label.

    b_form needs (lambda,mu) = (mu*,lambda*) and pairs u with phi_eps(v);
    d_form needs (lambda,mu) = (lambda*,mu*) and pairs u with phi_eps''(v).
    Signed D-labels restrict the d_form of (lambda,lambda) to the half.
    """
    mode = _mode(mode)
    if isinstance(label, DLabel) and label.sign is not None:
        return _split_form(label, mode)
    b = label.bipartition() if isinstance(label, DLabel) else label
    if kind == "b_form":
        if b != b.dual():
            raise ValueError(f"{label.label()}: b_form needs (lambda,mu) = (mu*,lambda*)")
        phi = intertwiner("eps_double_prime", b.swap(), mode) * intertwiner("eps_prime", b, mode)
        char = LinearCharacterKind.EPSILON
    elif kind == "d_form":
        if b != b.conjugate():
            raise ValueError(f"{label.label()}: d_form needs (lambda,mu) = (lambda*,mu*)")
        phi = intertwiner("eps_double_prime", b, mode)
        char = LinearCharacterKind.EPSILON_DOUBLE_PRIME
    else:
        raise ValueError(f"unknown form kind {kind!r}")
    rep = build_rep_b(b, mode)
    ops = rep.ops
    gram = _seminormal_gram_scale(rep.basis_order) * phi if mode == EXACT else phi
    invariant = all(
        ops.close(ops.transpose(m) * gram * m, gram * ops.scalar(Fraction(character_value(char, rep.gen_elements[name]))))
        for name, m in rep.gen_matrices.items()
    )
    return BilinearFormMatrix(label, kind, gram, _parity(ops, gram), _expected_parity(label, kind),
                              _nondegenerate(ops, gram), invariant)


def _split_form(label: DLabel, mode: str) -> BilinearFormMatrix:
    lam = label.first
    if lam != lam.conjugate():
        raise ValueError(f"{label.label()}: needs a self-conjugate partition")
    if (label.n // 2) % 2:
        raise ValueError(f"{label.label()}: halves carry an invariant form only when n/2 is even")
    full = bilinear_form(Bipartition(lam, lam), "d_form", mode)
    piece = build_rep_d(label, mode)
    ops = piece.ops
    emb = piece.embedding
    gram = ops.transpose(emb) * full.gram * emb
    invariant = all(
        ops.close(ops.transpose(m) * gram * m,
                  gram * ops.scalar(Fraction(character_value(LinearCharacterKind.EPSILON_DOUBLE_PRIME, piece.gen_elements[name]))))
        for name, m in piece.gen_matrices.items()
    )
    return BilinearFormMatrix(label, "d_form", gram, _parity(ops, gram), _expected_parity(label, "d_form"),
                              _nondegenerate(ops, gram), invariant)


def _parity(ops: MatrixOps, gram) -> str:
    gt = ops.transpose(gram)
    if ops.close(gt, gram):
        return "symmetric"
    if ops.close(gt, gram * ops.scalar(Fraction(-1))):
        return "antisymmetric"
    return "neither"


def _nondegenerate(ops: MatrixOps, gram) -> bool:
    if ops.mp is None:
        return gram.rank() == gram.nrows()
    return abs(ops.mp.det(gram)) > ops.approx.tolerance


# --- serialization ----------------------------------------------------------------------------


def _entry_text(x, ops: MatrixOps) -> str:
    if ops.mp is None:
        return format_rational(x)
    return ops.mp.nstr(x, 40)


def rep_to_dict(rep: RepMatrixSet) -> dict:
    ops = rep.ops
    basis = []
    for b in rep.basis_order:
        if isinstance(b, SplitBasisVector):
            basis.append({"positions": [list(p) for p in b.tableau.positions], "sign": b.sign})
        else:
            basis.append({"positions": [list(p) for p in b.positions]})
    mats = {}
    for name, m in rep.gen_matrices.items():
        d = ops.size(m)
        mats[name] = [[_entry_text(m[i, j], ops) for j in range(d)] for i in range(d)]
    out = {
        "schema_version": 1,
        "label": rep.label.label(),
        "family": rep.family,
        "mode": rep.scalar_mode,
        "dim": rep.dim,
        "basis_order": basis,
        "generators": mats,
    }
    if ops.mp is not None:
        out["precision_bits"] = ops.approx.precision_bits
    return out


# --- twisting by linear characters ------------------------------------------------------------


def _sample_words(num_gens: int, max_len: int = 3) -> list[tuple[int, ...]]:
    words: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(max_len):
        frontier = [w + (g,) for w in frontier for g in range(num_gens)]
        words.extend(frontier)
    return words


_CHARACTER_OF = {
    "eps_prime": LinearCharacterKind.EPSILON_PRIME,
    "eps_double_prime": LinearCharacterKind.EPSILON_DOUBLE_PRIME,
    "epsilon": LinearCharacterKind.EPSILON,
}


def twist_trace_failures(shape: Bipartition, kind: str, mode: str = EXACT) -> list[tuple[int, ...]]:
    """Words g (length <= 3) with chi(g) tr_(lam,mu)(g) != tr_target(g)."""
    targets = {"eps_prime": shape.swap(), "eps_double_prime": shape.conjugate(), "epsilon": shape.dual()}
    src = build_rep_b(shape, mode)
    dst = build_rep_b(targets[kind], mode)
    ops = src.ops
    names = list(src.gen_matrices)
    bad = []
    for w in _sample_words(len(names)):
        g = weyl.identity(shape.n)
        a, b = ops.identity(src.dim), ops.identity(dst.dim)
        for k in w:
            g = g * src.gen_elements[names[k]]
            a = a * src.gen_matrices[names[k]]
            b = b * dst.gen_matrices[names[k]]
        if not ops.scalar_close(ops.trace(a) * character_value(_CHARACTER_OF[kind], g), ops.trace(b)):
            bad.append(w)
    return bad


def split_twist_sign(lam: Partition, sign: str) -> str:
    """The sign s' with S^{lam,sign} (x) eps'' isomorphic to S^{lam*,s'}, found by solving for intertwiners."""
    src = build_rep_d(DLabel(lam, lam, sign), EXACT)
    twisted = [m * flint.fmpq(character_value(LinearCharacterKind.EPSILON_DOUBLE_PRIME, src.gen_elements[k]))
               for k, m in src.gen_matrices.items()]
    conj = lam.conjugate()
    found = []
    for s2 in ("+", "-"):
        dst = build_rep_d(DLabel(conj, conj, s2), EXACT)
        sols = solve_intertwiners(twisted, list(dst.gen_matrices.values()))
        if sols.dim():
            found.append(s2)
    if len(found) != 1:
        raise AssertionError(f"twist of {lam.label()},{sign} matches {found}")
    return found[0]


# --- Artin-Wedderburn ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArtinWedderburnReport:
    n: int
    family: str
    sum_of_squares: int
    group_order: int

    @property
    def ok(self) -> bool:
        return self.sum_of_squares == self.group_order


def artin_wedderburn_check(n: int, family: str) -> ArtinWedderburnReport:
    fam = {"B": "type_b", "D": "type_d"}.get(family, family)
    flavor = "ordered" if fam == "type_b" else "unordered"
    total = sum(dim_formula(lab) ** 2 for lab in bipartitions(n, flavor))
    return ArtinWedderburnReport(n, fam, total, weyl.group_order(n, fam))


# --- branching ------------------------------------------------------------------------------


def basis_weights(rep: RepMatrixSet) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """(signs, chi) for each basis vector.

    signs are the t_i eigenvalues for type B and the t_1 t_i eigenvalues
    (with 1 in the first slot) for type D; chi are the Jucys-Murphy
    eigenvalues, chi_1 = 0.
    """
    n = rep.n
    if all(isinstance(T, StandardBitableau) for T in rep.basis_order):
        out = []
        for T in rep.basis_order:
            w = T.weight()
            signs = w.rho if rep.family == "type_b" else tuple(w.rho[0] * x for x in w.rho)
            out.append((tuple(signs), tuple(w.chi)))
        return out
    chis = [[0] * rep.dim] + [_diagonal_or_fail(rep.yjm_matrix(i)) for i in range(2, n + 1)]
    if rep.family == "type_b":
        sign_rows = [_diagonal_or_fail(rep.gen_matrices[f"t{i}"]) for i in range(1, n + 1)]
    else:
        sign_rows = [[1] * rep.dim] + [_diagonal_or_fail(rep.matrix_of(weyl.t(1, n) * weyl.t(j, n)))
                                       for j in range(2, n + 1)]
    return [(tuple(int(r[k]) for r in sign_rows), tuple(int(r[k]) for r in chis)) for k in range(rep.dim)]


def _diagonal_or_fail(m) -> list:
    d = m.nrows()
    for i in range(d):
        for j in range(d):
            if i != j and m[i, j] != 0:
                raise AssertionError("weight basis is not diagonal for a Gelfand-Tsetlin element")
    return [as_fraction(m[i, i]) for i in range(d)]


@dataclass
class BranchingBlock:
    key: tuple
    dim: int
    predicted: list[str]
    stable: bool
    weights_match: bool


@dataclass
class BranchingReport:
    label: Label
    flavor: str
    blocks: list[BranchingBlock]
    mismatches: list[str]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _b_weights(shape: Bipartition) -> list:
    return [(T.weight().rho, T.weight().chi) for T in standard_bitableaux(shape)]


def verify_branching(label: Label, flavor: str) -> BranchingReport:
    """Restrict to the rank n-1 subgroup and compare weight blocks with the predecessor rule.

    b_to_b: B_n -> B_{n-1}, blocks by (rho_n, chi_n).
    d_to_d: D_n -> D_{n-1}, blocks by chi_n.
    d_to_folding: D_n -> H_{n-1} = <s_1..s_{n-2}, t_{n-1} t_n>, a copy of
    B_{n-1} with t_i -> t_i t_n; blocks by chi_n.
    """
    n = label.n
    if n < 2:
        raise ValueError("branching needs n >= 2")
    if flavor == "b_to_b":
        rep = build_rep_b(label, EXACT)
        sub = [rep.gen_matrices[f"s{i}"] for i in range(1, n - 1)] + [rep.gen_matrices[f"t{i}"] for i in range(1, n)]
        expected: dict[tuple, list] = {}
        for nu, res in predecessors(label, "ordered"):
            side = 1 if nu.first != label.first else -1
            expected.setdefault((side, 2 * res), []).append(nu)

        def key(w):
            return (w[0][n - 1], w[1][n - 1])

        def restrict(w):
            return (w[0][: n - 1], w[1][: n - 1])

        def expected_weights(nu):
            return _b_weights(nu)
    elif flavor in ("d_to_d", "d_to_folding"):
        if not isinstance(label, DLabel):
            label = DLabel.pair(label.first, label.second)
        rep = build_rep_d(label, EXACT)
        expected = {}
        if flavor == "d_to_d":
            sub = [rep.gen_matrices[f"s{i}"] for i in range(1, n - 1)]
            if n - 1 >= 2:
                sub.append(rep.matrix_of(weyl.t(n - 2, n) * weyl.t(n - 1, n) * weyl.s(n - 2, n)))
            for nu, res in predecessors(label, "unordered"):
                expected.setdefault(2 * res, []).append(nu)

            def restrict(w):
                return (w[0][: n - 1], w[1][: n - 1])

            def expected_weights(nu):
                return [(tuple(r[0] * x for x in r), c) for r, c in _b_weights(nu.bipartition())]
        else:
            sub = [rep.gen_matrices[f"s{i}"] for i in range(1, n - 1)]
            sub.append(rep.matrix_of(weyl.t(n - 1, n) * weyl.t(n, n)))
            b = label.bipartition()
            halves = [(b.first, b.second)] if label.sign is not None else [(b.first, b.second), (b.second, b.first)]
            for own, other in halves:
                for r, c in own.removable():
                    expected.setdefault(2 * (c - r), []).append(Bipartition(own.remove(r), other))

            def restrict(w):
                signs, chi = w
                return (tuple(signs[i] * signs[n - 1] for i in range(n - 1)), chi[: n - 1])

            def expected_weights(nu):
                return _b_weights(nu)

        def key(w):
            return w[1][n - 1]
    else:
        raise ValueError(f"unknown branching flavor {flavor!r}")

    weights = basis_weights(rep)
    groups: dict = {}
    for k, w in enumerate(weights):
        groups.setdefault(key(w), []).append(k)
    blocks, mismatches = [], []
    for kk in sorted(set(groups) | set(expected), key=repr):
        idx = groups.get(kk, [])
        preds = expected.get(kk, [])
        inside = set(idx)
        stable = all(m[i, j] == 0 for m in sub for j in idx for i in range(rep.dim) if i not in inside)
        got = sorted(restrict(weights[k]) for k in idx)
        want = sorted(w for nu in preds for w in expected_weights(nu))
        match = got == want
        blocks.append(BranchingBlock(kk, len(idx), [p.label() for p in preds], stable, match))
        if not stable:
            mismatches.append(f"{label.label()}: block {kk} is not stable under the subgroup")
        if not match:
            mismatches.append(f"{label.label()}: block {kk} weights differ from {[p.label() for p in preds]}")
    return BranchingReport(label, flavor, blocks, mismatches)


# --- exterior powers ------------------------------------------------------------------------------


def exterior_derivation(m: Sequence[Sequence[int]], d: int) -> tuple[list[tuple[int, ...]], flint.fmpq_mat]:
    """Derivation action of an n x n matrix on the d-th exterior power (basis: sorted d-subsets)."""
    n = len(m)
    subsets = list(itertools.combinations(range(n), d))
    pos = {J: k for k, J in enumerate(subsets)}
    out = flint.fmpq_mat(len(subsets), len(subsets))
    for col, J in enumerate(subsets):
        for slot, j in enumerate(J):
            for i in range(n):
                x = m[i][j]
                if not x:
                    continue
                new = list(J)
                new[slot] = i
                if len(set(new)) < d:
                    continue
                order = sorted(range(d), key=lambda a: new[a])
                sign = weyl.permutation_sign([o + 1 for o in order])
                out[pos[tuple(sorted(new))], col] += sign * x
    return subsets, out


def exterior_group_action(m: Sequence[Sequence[int]], d: int) -> flint.fmpq_mat:
    """Lambda^d(m): the matrix of d x d minors."""
    n = len(m)
    subsets = list(itertools.combinations(range(n), d))
    out = flint.fmpq_mat(len(subsets), len(subsets))
    for a, I in enumerate(subsets):
        for b, J in enumerate(subsets):
            out[a, b] = flint.fmpq_mat(d, d, [m[i][j] for i in I for j in J]).det()
    return out


@dataclass
class ExteriorPowerReport:
    n: int
    d: int
    tag: str
    dim: int
    shift_identity: bool
    traces_match: bool
    intertwiner_dim: int
    invertible: bool

    @property
    def ok(self) -> bool:
        return self.shift_identity and self.traces_match and self.intertwiner_dim == 1 and self.invertible


def verify_exterior_power(n: int, d: int, tag: str) -> ExteriorPowerReport:
    """Compare the derivation action on Lambda^d of the natural module with S^{beta_d} or S^{gamma_d}.

    For a reflection s, the derivation action satisfies
    L(s) = Lambda^d(s) + (d-1) Id.  The natural module of gamma is twisted by
    eps', so there the shift becomes eps'(s) (d-1).  After removing the shift
    the generator images must be equivalent to the arm-and-leg module; an
    explicit intertwiner is solved for.
    """
    if not 0 < d < n:
        raise ValueError("need 0 < d < n")
    if tag not in ("beta", "gamma"):
        raise ValueError(f"unknown tag {tag!r}")
    target = build_rep_b(arm_and_leg(n, tag, d), EXACT)
    gens = weyl.small_generating_set(n, "type_b")
    shifted, images, shift_ok = [], [], True
    for s in gens:
        twist = character_value(LinearCharacterKind.EPSILON_PRIME, s) if tag == "gamma" else 1
        nat = [[twist * x for x in row] for row in s.matrix()]
        _, lie = exterior_derivation(nat, d)
        # Lambda^d of the untwisted reflection, shifted, then twisted
        grp = exterior_group_action(s.matrix(), d)
        shift = identity_matrix(lie.nrows()) * (twist * (d - 1))
        shift_ok = shift_ok and lie == (grp + identity_matrix(lie.nrows()) * (d - 1)) * twist
        shifted.append(lie - shift)
        images.append(target.matrix_of(s))
    dim = shifted[0].nrows()
    traces = True
    for w in _sample_words(len(gens)):
        a, b = identity_matrix(dim), identity_matrix(target.dim)
        for k in w:
            a, b = a * shifted[k], b * images[k]
        if a.nrows() != b.nrows() or sum((a[i, i] for i in range(dim)), flint.fmpq(0)) != sum(
                (b[i, i] for i in range(b.nrows())), flint.fmpq(0)):
            traces = False
            break
    sols = solve_intertwiners(shifted, images) if dim == target.dim else SpanBasis(dim * target.dim)
    invertible = False
    if sols.dim() == 1:
        x = unflatten_matrix(sols.rows[0], target.dim, dim)
        invertible = x.rank() == dim
    return ExteriorPowerReport(n, d, tag, dim, shift_ok, traces, sols.dim(), invertible)
