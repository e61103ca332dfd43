"""Exact rational linear algebra: sparse echelon spans and linear solvers.

Scalars are ``fractions.Fraction``.  Dense exact matrices are FLINT ``fmpq_mat``
objects; sparse vectors are ``dict[int, Fraction]`` with no stored zeros.
"""

from __future__ import annotations

import functools

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import flint
import mpmath

Rational = Fraction
SparseVector = dict  # index -> Fraction, zero entries never stored

APPROX_PRECISION_BITS = 256
APPROX_ZERO_BITS = 128


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, flint.fmpz):
        return Fraction(int(x))
    return Fraction(x)


def format_rational(x) -> str:
    f = as_fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def sparse(values: Iterable, start: int = 0) -> SparseVector:
    return {i: as_fraction(v) for i, v in enumerate(values, start) if v != 0}


def densify(v: Mapping[int, Fraction], length: int) -> list[Fraction]:
    out = [Fraction(0)] * length
    for i, x in v.items():
        out[i] = x
    return out


def axpy(y: SparseVector, a: Fraction, x: Mapping[int, Fraction]) -> None:
    """y += a*x in place, dropping zeros."""
    if not a:
        return
    for i, xi in x.items():
        v = y.get(i, 0) + a * xi
        if v:
            y[i] = v
        else:
            y.pop(i, None)


class DimensionMismatch(ValueError):
    pass


@dataclass
class SpanBasis:
    """Reduced row-echelon basis of a subspace of Q^ambient_dim.

    Each row has leading coefficient 1 at its pivot, and every other row is
    zero at that pivot, so reduction is a single pass over the pivots.
    """

    ambient_dim: int
    rows: list[SparseVector] = field(default_factory=list)
    pivot_index: dict[int, int] = field(default_factory=dict)

    def dim(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def _check(self, v: Mapping[int, Fraction]) -> None:
        if v and (min(v) < 0 or max(v) >= self.ambient_dim):
            raise DimensionMismatch(f"vector index outside ambient dimension {self.ambient_dim}")

    def decompose(self, v: Mapping[int, Fraction]) -> tuple[dict[int, Fraction], SparseVector]:
        """Return (coefficients by row index, residual) with v = sum c_r rows[r] + residual."""
        self._check(v)
        res = {i: as_fraction(x) for i, x in v.items() if x}
        coeffs: dict[int, Fraction] = {}
        for p in sorted(set(res) & self.pivot_index.keys()):
            c = res.get(p)
            if c:
                r = self.pivot_index[p]
                coeffs[r] = c
                axpy(res, -c, self.rows[r])
        return coeffs, res

    def reduce(self, v: Mapping[int, Fraction]) -> SparseVector:
        return self.decompose(v)[1]

    def contains(self, v: Mapping[int, Fraction]) -> bool:
        return not self.reduce(v)

    def insert(self, v: Mapping[int, Fraction]) -> bool:
        """Insert v; return True when the dimension grew."""
        res = self.reduce(v)
        if not res:
            return False
        p = min(res)
        lead = res[p]
        row = {i: x / lead for i, x in res.items()}
        for r in self.rows:
            c = r.get(p)
            if c:
                axpy(r, -c, row)
        self.pivot_index[p] = len(self.rows)
        self.rows.append(row)
        return True

    def copy(self) -> "SpanBasis":
        return SpanBasis(self.ambient_dim, [dict(r) for r in self.rows], dict(self.pivot_index))

    def pivots(self) -> list[int]:
        return sorted(self.pivot_index)

    def sorted_rows(self) -> list[SparseVector]:
        return [self.rows[self.pivot_index[p]] for p in self.pivots()]

    def same_span(self, other: "SpanBasis") -> bool:
        if self.dim() != other.dim():
            return False
        return all(self.contains(r) for r in other.rows)


def span_insert(basis: SpanBasis, v: Mapping[int, Fraction]) -> str:
    return "inserted" if basis.insert(v) else "dependent"


def span_of(vectors: Iterable[Mapping[int, Fraction]], ambient_dim: int) -> SpanBasis:
    b = SpanBasis(ambient_dim)
    for v in vectors:
        b.insert(v)
    return b


def nullspace(equations: Iterable[Mapping[int, Fraction]], num_unknowns: int) -> list[SparseVector]:
    """Basis of {x : e.x = 0 for every equation e}, one vector per free unknown."""
    rows = span_of(equations, num_unknowns)
    pivots = rows.pivot_index
    out = []
    for f in range(num_unknowns):
        if f in pivots:
            continue
        x = {f: Fraction(1)}
        for p, r in pivots.items():
            c = rows.rows[r].get(f)
            if c:
                x[p] = -c
        out.append(x)
    return out


# --- exact dense matrices -----------------------------------------------------


def fmpq_matrix(rows: Sequence[Sequence]) -> flint.fmpq_mat:
    r = len(rows)
    c = len(rows[0]) if r else 0
    flat = []
    for row in rows:
        for x in row:
            f = as_fraction(x)
            flat.append(flint.fmpq(f.numerator, f.denominator))
    return flint.fmpq_mat(r, c, flat)


def identity_matrix(d: int) -> flint.fmpq_mat:
    m = flint.fmpq_mat(d, d)
    for i in range(d):
        m[i, i] = 1
    return m


def matrix_entries(m) -> list[list[Fraction]]:
    return [[as_fraction(m[i, j]) for j in range(m.ncols())] for i in range(m.nrows())]


def sparse_matrix_rows(m) -> list[SparseVector]:
    """Per-row sparse dicts (column -> Fraction) of a dense matrix."""
    if isinstance(m, (list, tuple)):
        return [sparse(row) for row in m]
    out = []
    for i in range(m.nrows()):
        row = {}
        for j in range(m.ncols()):
            x = m[i, j]
            if x != 0:
                row[j] = as_fraction(x)
        out.append(row)
    return out


def flatten_matrix(m) -> SparseVector:
    """Row-major sparse coordinates of a square matrix (index a*d + b)."""
    d = m.ncols() if not isinstance(m, list) else len(m[0])
    out = {}
    for a, row in enumerate(sparse_matrix_rows(m)):
        for b, x in row.items():
            out[a * d + b] = x
    return out


def unflatten_matrix(v: Mapping[int, Fraction], rows: int, cols: int | None = None) -> flint.fmpq_mat:
    cols = rows if cols is None else cols
    m = flint.fmpq_mat(rows, cols)
    for k, x in v.items():
        m[k // cols, k % cols] = flint.fmpq(x.numerator, x.denominator)
    return m


def _size(m) -> int:
    return len(m) if isinstance(m, list) else m.nrows()


def diagonal_of(m) -> list[Fraction] | None:
    """Diagonal entries if m is diagonal, otherwise None."""
    rows = sparse_matrix_rows(m)
    diag = []
    for i, row in enumerate(rows):
        if any(j != i for j in row):
            return None
        diag.append(row.get(i, Fraction(0)))
    return diag


def _joint_classes(diagonals: list[list[Fraction]], d: int) -> list[tuple]:
    return [tuple(dg[i] for dg in diagonals) for i in range(d)]


def solve_sylvester(mats_a: Sequence, mats_b: Sequence, sign: int = -1,
                    transpose_b: bool = False, allowed=None) -> list[SparseVector]:
    """Solutions X (rows of B-size, cols of A-size) of B_k X + sign * X A_k = 0.

    With ``transpose_b`` the equation uses B_k^T.  ``allowed(i, j)`` restricts
    the unknown support (entries outside it are forced to zero).  Returns
    flattened row-major solutions.
    """
    rb = _size(mats_b[0]) if mats_b else _size(mats_a[0])
    ca = _size(mats_a[0]) if mats_a else rb
    unknown: dict[tuple[int, int], int] = {}
    for i in range(rb):
        for j in range(ca):
            if allowed is None or allowed(i, j):
                unknown[(i, j)] = len(unknown)
    equations = []
    for A, B in zip(mats_a, mats_b):
        a_rows = sparse_matrix_rows(A)
        a_cols: list[dict[int, Fraction]] = [dict() for _ in range(ca)]
        for k, row in enumerate(a_rows):
            for j, x in row.items():
                a_cols[j][k] = x
        b_rows = sparse_matrix_rows(B)
        if transpose_b:
            bt: list[dict[int, Fraction]] = [dict() for _ in range(rb)]
            for k, row in enumerate(b_rows):
                for j, x in row.items():
                    bt[j][k] = x
            b_rows = bt
        # entry (i, j): sum_k B[i,k] X[k,j] + sign * sum_k X[i,k] A[k,j]
        for i in range(rb):
            for j in range(ca):
                eq: dict[int, Fraction] = {}
                for k, x in b_rows[i].items():
                    u = unknown.get((k, j))
                    if u is not None:
                        eq[u] = eq.get(u, 0) + x
                for k, x in a_cols[j].items():
                    u = unknown.get((i, k))
                    if u is not None:
                        eq[u] = eq.get(u, 0) + sign * x
                eq = {u: c for u, c in eq.items() if c}
                if eq:
                    equations.append(eq)
    sols = nullspace(equations, len(unknown))
    index = {u: key for key, u in unknown.items()}
    out = []
    for s in sols:
        out.append({index[u][0] * ca + index[u][1]: c for u, c in s.items()})
    return out


def solve_commutant(mats: Sequence) -> SpanBasis:
    """Basis of {C : C M = M C for all M}, flattened row-major.

    Diagonal inputs are used first to restrict the support: C[a, b] must vanish
    whenever some diagonal M has M[a, a] != M[b, b].
    """
    if not mats:
        raise ValueError("need at least one matrix")
    d = _size(mats[0])
    diags = [dg for dg in (diagonal_of(m) for m in mats) if dg is not None]
    keys = _joint_classes(diags, d)
    sols = solve_sylvester(mats, mats, sign=-1, allowed=lambda i, j: keys[i] == keys[j])
    return span_of(sols, d * d)


def solve_invariant_form(mats: Sequence) -> SpanBasis:
    """Basis of {G : M^T G + G M = 0 for all M}, flattened row-major.

    Diagonal inputs restrict the support to pairs with M[a, a] + M[b, b] = 0.
    """
    if not mats:
        raise ValueError("need at least one matrix")
    d = _size(mats[0])
    diags = [dg for dg in (diagonal_of(m) for m in mats) if dg is not None]

    def allowed(i: int, j: int) -> bool:
        return all(dg[i] + dg[j] == 0 for dg in diags)

    sols = solve_sylvester(mats, mats, sign=1, transpose_b=True, allowed=allowed)
    return span_of(sols, d * d)


def solve_intertwiners(mats_a: Sequence, mats_b: Sequence) -> SpanBasis:
    """Basis of {X : X A_k = B_k X for all k} (X maps the A-space to the B-space)."""
    ra, rb = _size(mats_a[0]), _size(mats_b[0])
    pairs = [(diagonal_of(a), diagonal_of(b)) for a, b in zip(mats_a, mats_b)]
    pairs = [(da, db) for da, db in pairs if da is not None and db is not None]

    def allowed(i: int, j: int) -> bool:
        return all(db[i] == da[j] for da, db in pairs)

    sols = solve_sylvester(mats_a, mats_b, sign=-1, allowed=allowed)
    return span_of(sols, rb * ra)


def exact_rank(m) -> int:
    return m.rank()


# --- approximate scalars --------------------------------------------------------


@dataclass(frozen=True)
class ApproxContext:
    """Arbitrary-precision binary floating point with an explicit zero tolerance."""

    precision_bits: int = APPROX_PRECISION_BITS
    zero_bits: int = APPROX_ZERO_BITS

    def __post_init__(self) -> None:
        if self.precision_bits < 64:
            raise ValueError("approximate arithmetic needs at least 64 bits")

    def ctx(self) -> mpmath.ctx_mp.MPContext:
        return _shared_context(self.precision_bits)

    @property
    def tolerance(self):
        return mpmath.mpf(2) ** (-self.zero_bits)


@functools.lru_cache(maxsize=None)
def _shared_context(bits: int) -> mpmath.ctx_mp.MPContext:
    # one private context per precision so matrices built separately can be mixed
    c = mpmath.MPContext()
    c.prec = bits
    return c


def approx_is_zero(x, tol) -> bool:
    return abs(x) <= tol
