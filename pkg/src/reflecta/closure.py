"""Certified Lie-closure engine.

A closure is the smallest subspace containing some seed vectors and stable
under ``x -> [a, x]`` for a fixed list of generators ``a``.  The engine works
in two stages:

1. Breadth-first closure over GF(p), p < 2^20, using float64 BLAS products
   (every partial sum stays below 2^53, so the arithmetic is exact).  Each
   accepted vector is recorded as a word: a seed, or a bracket of a generator
   with an earlier accepted vector.  Linear independence mod p implies
   independence over Q, so the number of accepted vectors is a proven lower
   bound for the rational dimension.
2. Exact certificate: replay the words over the integers, solve for every
   bracket [a, b_j] in terms of the accepted vectors with FLINT, and check the
   identity exactly.  This proves the accepted vectors span a bracket-stable
   space, so the lower bound is the dimension.

When an independent upper bound is known (for instance the dimension of an
orthogonal or symplectic algebra containing the image), reaching it ends the
computation with an equally rigorous answer and stage 2 is skipped.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import flint
import numpy as np

PRIMES = (1048573, 1048571, 1048559, 1048549, 1048517, 1048507, 1048447, 1048433)
# inner dimension of one float64 product chunk: chunk * (p-1)^2 < 2^53
_CHUNK = 8000


class ClosureTimeout(RuntimeError):
    """The closure exceeded its wall-clock budget."""


def _mod(x: np.ndarray, p: float) -> np.ndarray:
    return np.mod(x, p, out=x)


def matmul_mod(a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    k = a.shape[1]
    if k <= _CHUNK:
        return _mod(a @ b, p)
    out = np.zeros((a.shape[0], b.shape[1]))
    for s in range(0, k, _CHUNK):
        out += _mod(a[:, s:s + _CHUNK] @ b[s:s + _CHUNK], p)
        _mod(out, p)
    return out


class ModularEchelon:
    """Reduced row-echelon form over GF(p) with batched insertion."""

    def __init__(self, ambient: int, p: int):
        self.ambient = ambient
        self.p = int(p)
        self.fp = float(p)
        self._rows = np.zeros((16, ambient))
        self.k = 0
        self.pivots: list[int] = []

    @property
    def rows(self) -> np.ndarray:
        return self._rows[: self.k]

    def reduce(self, c: np.ndarray) -> np.ndarray:
        if self.k == 0:
            return c
        a = c[:, self.pivots]
        return _mod(c - matmul_mod(a, self.rows, self.fp), self.fp)

    def add(self, c: np.ndarray) -> list[int]:
        """Insert the rows of c in order; return the indices of rows that were independent."""
        c = self.reduce(np.array(c, dtype=np.float64))
        p, fp = self.p, self.fp
        chosen: list[int] = []
        new_rows: list[np.ndarray] = []
        new_piv: list[int] = []
        block = None
        for j in range(c.shape[0]):
            v = c[j]
            if new_rows:
                v = _mod(v - _mod(v[new_piv] @ block, fp), fp)
            nz = np.flatnonzero(v)
            if nz.size == 0:
                continue
            piv = int(nz[0])
            inv = pow(int(v[piv]), p - 2, p)
            v = _mod(v * inv, fp)
            if new_rows:
                col = block[:, piv].copy()
                block = _mod(block - np.outer(col, v), fp)
                block = np.vstack([block, v])
            else:
                block = v[None, :].copy()
            new_rows.append(v)
            new_piv.append(piv)
            chosen.append(j)
        if not new_rows:
            return chosen
        if self.k:
            old = self.rows
            old[:] = _mod(old - matmul_mod(old[:, new_piv], block, fp), fp)
        need = self.k + len(new_rows)
        if need > self._rows.shape[0]:
            cap = max(need, 2 * self._rows.shape[0])
            grown = np.zeros((cap, self.ambient))
            grown[: self.k] = self._rows[: self.k]
            self._rows = grown
        self._rows[self.k: need] = block
        self.k = need
        self.pivots.extend(new_piv)
        return chosen


class BracketSystem:
    """Interface the engine needs: seeds and generator brackets, mod p and exactly."""

    ambient: int
    num_gens: int
    num_seeds: int

    def seeds_mod(self, p: int) -> np.ndarray:
        raise NotImplementedError

    def bracket_mod(self, g: int, x: np.ndarray, p: int) -> np.ndarray:
        raise NotImplementedError

    def seed_exact(self, i: int):
        raise NotImplementedError

    def bracket_exact(self, g: int, x):
        raise NotImplementedError

    def exact_matrix(self, vectors: Sequence) -> flint.fmpz_mat:
        """Stack exact (integer) vectors as the rows of an fmpz_mat."""
        raise NotImplementedError


@dataclass
class ClosureRun:
    dim: int
    prime: int
    words: list[tuple]  # ('seed', i) or ('br', g, parent)
    pivots: list[int]
    reached_bound: bool
    candidates: int
    certified: bool = False
    method: str = "lower-bound"
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)


def modular_closure(system: BracketSystem, prime: int = PRIMES[0], upper_bound: int | None = None,
                    batch_rows: int = 192, deadline: float | None = None) -> tuple[ClosureRun, np.ndarray]:
    """Breadth-first closure over GF(prime); returns the run and the accepted vectors mod p."""
    start = time.monotonic()
    fp = float(prime)
    ech = ModularEchelon(system.ambient, prime)
    words: list[tuple] = []
    store = np.zeros((16, system.ambient), dtype=np.float32)

    def keep(vecs: np.ndarray, labels: list[tuple]) -> list[int]:
        nonlocal store
        chosen = ech.add(vecs)
        base = len(words)
        need = base + len(chosen)
        if need > store.shape[0]:
            grown = np.zeros((max(need, 2 * store.shape[0]), system.ambient), dtype=np.float32)
            grown[:base] = store[:base]
            store = grown
        for off, j in enumerate(chosen):
            store[base + off] = vecs[j]
            words.append(labels[j])
        return list(range(base, need))

    seeds = _mod(np.array(system.seeds_mod(prime), dtype=np.float64), fp)
    queue = keep(seeds, [("seed", i) for i in range(seeds.shape[0])]) if seeds.size else []
    candidates = seeds.shape[0]
    reached = upper_bound is not None and ech.k >= upper_bound
    head = 0
    per_parent = max(1, system.num_gens)
    while head < len(queue) and not reached:
        if deadline is not None and time.monotonic() > deadline:
            raise ClosureTimeout(f"closure stopped at dimension {ech.k}")
        take = max(1, batch_rows // per_parent)
        parents = queue[head: head + take]
        head += len(parents)
        x = store[parents].astype(np.float64)
        labels = []
        for idx, parent in enumerate(parents):
            for g in range(system.num_gens):
                labels.append(("br", g, parent))
        br = np.stack([_mod(system.bracket_mod(g, x, prime), fp) for g in range(system.num_gens)], axis=1)
        cand = br.reshape(len(parents) * system.num_gens, system.ambient)
        candidates += cand.shape[0]
        queue.extend(keep(cand, labels))
        if upper_bound is not None and ech.k >= upper_bound:
            reached = True
    run = ClosureRun(dim=ech.k, prime=prime, words=words, pivots=list(ech.pivots), reached_bound=reached,
                     candidates=candidates, seconds=time.monotonic() - start)
    return run, store[: ech.k]


def replay_exact(system: BracketSystem, words: Sequence[tuple]) -> list:
    out = []
    for w in words:
        if w[0] == "seed":
            out.append(system.seed_exact(w[1]))
        else:
            out.append(system.bracket_exact(w[1], out[w[2]]))
    return out


def certify_closure(system: BracketSystem, run: ClosureRun, exact: list | None = None) -> bool:
    """Prove over Q that the accepted vectors span a bracket-stable space.

    For each generator g the brackets [g, b_j] are expressed through the
    accepted vectors on the pivot columns (an invertible minor mod p, hence
    over Q) and the resulting identity is checked on all columns.
    """
    if run.dim == 0:
        return True
    if exact is None:
        exact = replay_exact(system, run.words)
    basis = system.exact_matrix(exact)
    cols = run.pivots
    k = run.dim
    minor = flint.fmpz_mat(k, k, [basis[i, c] for i in range(k) for c in cols])
    minor_t = minor.transpose()
    basis_t = basis.transpose()
    for g in range(system.num_gens):
        cand = system.exact_matrix([system.bracket_exact(g, v) for v in exact])
        rhs = flint.fmpz_mat(k, k, [cand[i, c] for c in cols for i in range(k)])
        coeffs = minor_t.solve(rhs)  # column i: coefficients of candidate i
        num, den = _common_denominator(coeffs)
        if basis_t * num != cand.transpose() * den:
            return False
    return True


def _common_denominator(m: flint.fmpq_mat) -> tuple[flint.fmpz_mat, flint.fmpz]:
    num, den = m.numer_denom()
    return num, den


def certified_closure(system: BracketSystem, upper_bound: int | None = None, primes: Sequence[int] = PRIMES,
                      deadline: float | None = None, certify: bool = True) -> ClosureRun:
    """Closure dimension proven exactly, retrying with another prime if a certificate fails."""
    notes: list[str] = []
    for p in primes:
        run, _ = modular_closure(system, p, upper_bound=upper_bound, deadline=deadline)
        run.notes = notes
        if run.reached_bound:
            run.certified = True
            run.method = "reached-upper-bound"
            return run
        if not certify:
            return run
        t0 = time.monotonic()
        if certify_closure(system, run):
            run.certified = True
            run.method = "exact-certificate"
            run.seconds += time.monotonic() - t0
            return run
        notes.append(f"certificate failed modulo {p}; retrying")
    raise RuntimeError("closure could not be certified with the configured primes")
