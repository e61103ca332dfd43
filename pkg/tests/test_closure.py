from __future__ import annotations

import time

import pytest

from reflecta import weyl
from reflecta.closure import (
    PRIMES,
    ClosureRun,
    ClosureTimeout,
    certified_closure,
    certify_closure,
    modular_closure,
)
from reflecta.group_algebra import AlgebraElement, GroupAlgebraSystem, group_index


def system(n, family):
    index = group_index(n, family)
    gens = [AlgebraElement.of(r, family) for r in weyl.reflections(n, family)]
    return GroupAlgebraSystem(index, gens, gens)


@pytest.mark.parametrize("prime", PRIMES[:3])
def test_dimension_is_prime_independent(prime):
    run, vecs = modular_closure(system(3, "type_b"), prime)
    assert run.dim == 21 == vecs.shape[0]
    assert len(run.words) == run.dim


def test_certificate_accepts_closed_span():
    sys_ = system(3, "type_d")
    run, _ = modular_closure(sys_)
    assert certify_closure(sys_, run)


def test_certificate_rejects_truncated_span():
    sys_ = system(3, "type_d")
    run, _ = modular_closure(sys_)
    cut = run.dim - 1
    bad = ClosureRun(dim=cut, prime=run.prime, words=run.words[:cut], pivots=run.pivots[:cut],
                     reached_bound=False, candidates=0)
    assert not certify_closure(sys_, bad)


def test_upper_bound_stops_early():
    run = certified_closure(system(3, "type_b"), upper_bound=10)
    assert run.reached_bound and run.method == "reached-upper-bound" and run.dim >= 10


def test_certified_method():
    run = certified_closure(system(2, "type_b"))
    assert run.certified and run.method == "exact-certificate" and run.dim == 5


def test_deadline():
    with pytest.raises(ClosureTimeout):
        modular_closure(system(4, "type_b"), deadline=time.monotonic() - 1)
