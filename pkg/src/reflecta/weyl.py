"""Signed permutations: the hyperoctahedral group B_n and its subgroup D_n.

An element is stored as a pair ``(images, signs)`` of 1-based tuples.  It
acts on the standard basis of Q^n by ``e_i -> signs[i] * e_{images[i]}``, so
the attached matrix has entry ``signs[i]`` at ``(images[i], i)``.  Products
compose like matrices: ``(g * h)(v) = g(h(v))``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

DEFAULT_GROUP_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed the configured size budget."""


class LinearCharacterKind(str, Enum):
    EPSILON = "epsilon"
    EPSILON_PRIME = "epsilon_prime"
    EPSILON_DOUBLE_PRIME = "epsilon_double_prime"


FAMILIES = ("type_b", "type_d", "type_a")
GENERATOR_FAMILIES = ("coxeter_b", "coxeter_d", "b_with_t1")


@dataclass(frozen=True, order=True)
class SignedPermutation:
    n: int
    images: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.n or len(self.signs) != self.n:
            raise ValueError("images and signs must have length n")
        if sorted(self.images) != list(range(1, self.n + 1)):
            raise ValueError(f"images {self.images} is not a permutation of 1..{self.n}")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    def __mul__(self, other: "SignedPermutation") -> "SignedPermutation":
        return multiply(self, other)

    def sort_key(self) -> tuple:
        return (self.images, self.signs)

    def inverse(self) -> "SignedPermutation":
        images = [0] * self.n
        signs = [0] * self.n
        for i, (j, s) in enumerate(zip(self.images, self.signs)):
            images[j - 1] = i + 1
            signs[j - 1] = s
        return SignedPermutation(self.n, tuple(images), tuple(signs))

    def matrix(self) -> list[list[int]]:
        m = [[0] * self.n for _ in range(self.n)]
        for i, (j, s) in enumerate(zip(self.images, self.signs)):
            m[j - 1][i] = s
        return m

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.n + 1)) and all(s == 1 for s in self.signs)

    def negative_count(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    def in_type_d(self) -> bool:
        return self.negative_count() % 2 == 0

    def in_type_a(self) -> bool:
        return all(s == 1 for s in self.signs)

    def permutation_sign(self) -> int:
        return permutation_sign(self.images)

    def order(self) -> int:
        g, k = self, 1
        while not g.is_identity():
            g = g * self
            k += 1
        return k

    def __repr__(self) -> str:
        body = ",".join(f"{'-' if s < 0 else ''}{j}" for j, s in zip(self.images, self.signs))
        return f"SP[{body}]"


def multiply(g: SignedPermutation, h: SignedPermutation) -> SignedPermutation:
    if g.n != h.n:
        raise ValueError(f"rank mismatch: {g.n} vs {h.n}")
    images = tuple(g.images[j - 1] for j in h.images)
    signs = tuple(hs * g.signs[j - 1] for j, hs in zip(h.images, h.signs))
    return SignedPermutation(g.n, images, signs)


def permutation_sign(images: Sequence[int]) -> int:
    seen = [False] * len(images)
    sign = 1
    for start in range(len(images)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = images[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def identity(n: int) -> SignedPermutation:
    return SignedPermutation(n, tuple(range(1, n + 1)), (1,) * n)


def t(i: int, n: int) -> SignedPermutation:
    """The sign change at position i."""
    if not 1 <= i <= n:
        raise ValueError(f"t_{i} out of range for n={n}")
    signs = [1] * n
    signs[i - 1] = -1
    return SignedPermutation(n, tuple(range(1, n + 1)), tuple(signs))


def transposition(i: int, j: int, n: int) -> SignedPermutation:
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise ValueError(f"bad transposition ({i},{j}) for n={n}")
    images = list(range(1, n + 1))
    images[i - 1], images[j - 1] = j, i
    return SignedPermutation(n, tuple(images), (1,) * n)


def s(i: int, n: int) -> SignedPermutation:
    """The simple transposition (i, i+1)."""
    return transposition(i, i + 1, n)


def signed_transposition(i: int, j: int, n: int) -> SignedPermutation:
    """t_i t_j (i, j)."""
    return t(i, n) * t(j, n) * transposition(i, j, n)


def from_permutation(images: Sequence[int]) -> SignedPermutation:
    return SignedPermutation(len(images), tuple(images), (1,) * len(images))


def generators(n: int, family: str) -> tuple[SignedPermutation, ...]:
    if n < 2:
        raise ValueError("generators need n >= 2")
    simple = tuple(s(i, n) for i in range(1, n))
    if family == "coxeter_b":
        return simple + (t(n, n),)
    if family == "coxeter_d":
        return simple + (t(n - 1, n) * t(n, n) * s(n - 1, n),)
    if family == "b_with_t1":
        return simple + (t(1, n),)
    raise ValueError(f"unknown generator family {family!r}")


def generator_names(n: int, family: str) -> tuple[str, ...]:
    simple = tuple(f"s{i}" for i in range(1, n))
    if family == "coxeter_b":
        return simple + (f"t{n}",)
    if family == "coxeter_d":
        return simple + (f"s~{n}",)
    if family == "b_with_t1":
        return simple + ("t1",)
    raise ValueError(f"unknown generator family {family!r}")


def reflection_classes(n: int, family: str) -> list[list[SignedPermutation]]:
    """Reflections grouped into conjugacy classes.

    For type B the classes are {(i,j), t_i t_j (i,j)} and {t_i}.  For type D
    with n >= 3 everything is one class; D_2 is abelian so its two
    reflections sit in separate classes.  ``type_a`` gives the transpositions
    of the symmetric group.
    """
    if n < 2:
        raise ValueError("reflections need n >= 2")
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    plain = [transposition(i, j, n) for i, j in pairs]
    signed = [signed_transposition(i, j, n) for i, j in pairs]
    if family == "type_a":
        return [plain]
    if family == "type_b":
        return [plain + signed, [t(i, n) for i in range(1, n + 1)]]
    if family == "type_d":
        if n == 2:
            return [plain, signed]
        return [plain + signed]
    raise ValueError(f"unknown family {family!r}")


def reflections(n: int, family: str) -> list[SignedPermutation]:
    return [r for cls in reflection_classes(n, family) for r in cls]


def small_generating_set(n: int, family: str) -> tuple[SignedPermutation, ...]:
    """Reflections generating the same Lie algebra as all reflections.

    B: s_1..s_{n-1}, t_1.  D: s_1..s_{n-1} and t_{n-1} t_n s_{n-1}.
    A: s_1..s_{n-1}.
    """
    if family == "type_b":
        return generators(n, "b_with_t1")
    if family == "type_d":
        return generators(n, "coxeter_d")
    if family == "type_a":
        return tuple(s(i, n) for i in range(1, n))
    raise ValueError(f"unknown family {family!r}")


def character_value(kind: LinearCharacterKind | str, g: SignedPermutation) -> int:
    kind = LinearCharacterKind(kind)
    e1 = -1 if g.negative_count() % 2 else 1
    e2 = g.permutation_sign()
    if kind is LinearCharacterKind.EPSILON_PRIME:
        return e1
    if kind is LinearCharacterKind.EPSILON_DOUBLE_PRIME:
        return e2
    return e1 * e2


def group_order(n: int, family: str) -> int:
    if family == "type_b":
        return 2**n * math.factorial(n)
    if family == "type_d":
        return 2 ** (n - 1) * math.factorial(n) if n >= 1 else 1
    if family == "type_a":
        return math.factorial(n)
    raise ValueError(f"unknown family {family!r}")


def enumerate_group(n: int, family: str, budget: int = DEFAULT_GROUP_BUDGET) -> list[SignedPermutation]:
    """All elements of the group in canonical (images, signs) lexicographic order."""
    size = group_order(n, family)
    if size > budget:
        raise BudgetExceeded(f"group of order {size} exceeds enumeration budget {budget}")
    out = []
    sign_choices = [(1,)] * n if family == "type_a" else [(-1, 1)] * n
    for images in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product(*sign_choices):
            if family == "type_d" and signs.count(-1) % 2:
                continue
            out.append(SignedPermutation(n, images, signs))
    out.sort(key=SignedPermutation.sort_key)
    return out


def conjugation_closure(elements: Iterable[SignedPermutation], group_gens: Sequence[SignedPermutation]) -> list[SignedPermutation]:
    """Closure of a set under conjugation by the group generated by ``group_gens``."""
    found = set(elements)
    frontier = list(found)
    while frontier:
        nxt = []
        for x in frontier:
            for g in group_gens:
                y = g * x * g.inverse()
                if y not in found:
                    found.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(found, key=SignedPermutation.sort_key)


def coxeter_matrix(n: int, family: str) -> list[list[int]]:
    """Coxeter matrix in the order of ``generators(n, family)``."""
    k = n
    m = [[2] * k for _ in range(k)]
    for i in range(k):
        m[i][i] = 1
    for i in range(n - 2):
        m[i][i + 1] = m[i + 1][i] = 3
    if family in ("coxeter_b", "b_with_t1"):
        last = n - 2 if family == "coxeter_b" else 0
        m[last][k - 1] = m[k - 1][last] = 4
    elif family == "coxeter_d":
        if n >= 3:
            m[n - 3][k - 1] = m[k - 1][n - 3] = 3
    else:
        raise ValueError(f"unknown generator family {family!r}")
    return m


def coxeter_relation_words(n: int, family: str) -> list[list[int]]:
    """Words (generator indices) that must evaluate to the identity."""
    m = coxeter_matrix(n, family)
    words = []
    for i in range(n):
        for j in range(i, n):
            words.append([i, j] * m[i][j] if i != j else [i, i])
    return words


def _bubble_word(images: Sequence[int]) -> list[int]:
    """Indices i (0-based, meaning s_{i+1}) with s_{i_1} ... s_{i_k} = the permutation."""
    arr = list(images)
    word: list[int] = []
    # sort by adjacent swaps on positions; record in reverse
    changed = True
    while changed:
        changed = False
        for i in range(len(arr) - 1):
            if arr[i] > arr[i + 1]:
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                word.append(i)
                changed = True
    # images * s_{w1} * ... * s_{wk} = id, so images = s_{wk} ... s_{w1}
    return word[::-1]


def word_in_generators(g: SignedPermutation, family: str) -> list[int]:
    """A (not necessarily reduced) word for g in ``generators(n, family)``.

    Returned indices refer to positions in the generator tuple; evaluating the
    word left to right as a product recovers g.
    """
    n = g.n
    gens = generators(n, family)
    perm_word = _bubble_word(g.images)
    # g = D * sigma with D diagonal; D has sign signs[i] at images[i]
    neg_positions = sorted(j for j, sg in zip(g.images, g.signs) if sg < 0)
    diag_word: list[int] = []
    if family in ("coxeter_b", "b_with_t1"):
        anchor = n if family == "coxeter_b" else 1
        for p in neg_positions:
            conj = _moving_word(anchor, p, n)
            diag_word += conj + [n - 1] + conj[::-1]
    elif family == "coxeter_d":
        if len(neg_positions) % 2:
            raise ValueError("element is not in D_n")
        for a, b in zip(neg_positions[::2], neg_positions[1::2]):
            conj = _pair_moving_word(a, b, n)
            # t_{n-1} t_n = s~_n s_{n-1}
            diag_word += conj + [n - 1, n - 2] + conj[::-1]
    else:
        raise ValueError(f"unknown generator family {family!r}")
    word = diag_word + perm_word
    check = identity(n)
    for w in word:
        check = check * gens[w]
    if check != g:
        raise AssertionError("word decomposition failed")
    return word


def _moving_word(src: int, dst: int, n: int) -> list[int]:
    """Word for a permutation sending src to dst (as s-indices)."""
    if src == dst:
        return []
    return _bubble_word(transposition(src, dst, n).images)


def _pair_moving_word(a: int, b: int, n: int) -> list[int]:
    """Word for a permutation pi with pi(n-1) = a and pi(n) = b (a < b)."""
    target = [0] * n
    target[n - 2] = a
    target[n - 1] = b
    rest = [x for x in range(1, n + 1) if x not in (a, b)]
    for i, x in enumerate(rest):
        target[i] = x
    return _bubble_word(target)
