from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from chaos_census.canon import is_standard
from chaos_census.covering import (
    SetCollection,
    is_connected,
    is_double_covering,
    random_double_covering,
    random_even_covering,
)
from chaos_census.enumeration import Filter, Mode, enumerate_filtered, enumerate_unlabeled
from chaos_census.errors import NotDoubleCovering, NotEvenCovering, ParityViolation, Unextendable
from chaos_census.transforms import (
    even_to_double,
    extend_connected,
    find_chains,
    phi_standardize,
    psi_grow,
    tau,
)


def cycle(p: int) -> SetCollection:
    return SetCollection.of([[k, k % p + 1] for k in range(1, p + 1)])


@given(st.integers(0, 2**32))
def test_even_to_double_properties(seed):
    c = random_even_covering(random.Random(seed))
    d, members, m = even_to_double(c)
    assert is_double_covering(d)
    assert d.p == c.p
    assert SetCollection.of(members) == d
    assert [m.image(b) for b in members] == list(c.members)
    assert set(m.mapping.values()) == set(c.ground)
    assert m.is_identity_on(c.ground)


@given(st.integers(0, 2**32))
def test_even_to_double_fixes_double_coverings(seed):
    c = random_double_covering(random.Random(seed))
    d, members, m = even_to_double(c)
    assert d == c
    assert list(members) == list(c.members)


def test_even_to_double_worked():
    c = SetCollection.of([[1], [1], [1], [1]])
    d, members, m = even_to_double(c)
    assert members == [(2,), (2,), (1,), (1,)]
    assert m(2) == 1
    with pytest.raises(NotEvenCovering):
        even_to_double(SetCollection.of([[1, 2], [1]]))


def test_y_chains_in_cycle():
    c = cycle(5)
    counts = [len(find_chains(c, "Y", r, 2)) for r in range(1, 6)]
    assert counts == [5, 5, 5, 5, 1]


def test_x_chains_in_six_member_example(six_cycle_of_triples):
    c = six_cycle_of_triples
    assert [len(find_chains(c, "X", r)) for r in range(1, 7)] == [0, 3, 0, 3, 0, 1]
    assert [len(find_chains(c, "Y", r)) for r in (1, 2)] == [6, 0]
    chain = find_chains(c, "X", 2)[0]
    assert len(set(chain.members[0]) & set(chain.members[1])) == 2


def test_find_chains_validation():
    with pytest.raises(NotDoubleCovering):
        find_chains(SetCollection.of([[1, 2]]), "X", 2)
    with pytest.raises(ValueError):
        find_chains(cycle(3), "Z", 2)


@pytest.mark.parametrize("l,q,ps", [(2, 2, range(3, 8)), (2, 4, range(5, 8)), (3, 2, (4, 6, 8)), (3, 4, (6, 8)), (4, 2, (3, 4, 5))])
def test_extend_connected_postconditions(l, q, ps):
    for rep in enumerate_filtered(l, q, Mode.EXACT, Filter.CONNECTED):
        c = rep.collection
        for p in ps:
            out = extend_connected(c, p)
            assert out.p == p
            assert is_double_covering(out) and is_connected(out)
            assert set(out.sizes()) == {l}
            kept = set(c.members[:-1])
            assert kept <= set(out.members)


def test_extend_connected_respects_reserved():
    out = extend_connected(cycle(3), 5, reserved=frozenset({4, 5}))
    assert not {4, 5} & set(out.ground)


def test_extend_connected_parity_and_shape():
    k4 = enumerate_filtered(3, 4, Mode.EXACT, Filter.CONNECTED)[0].collection
    with pytest.raises(ParityViolation):
        extend_connected(k4, 5)
    with pytest.raises(ValueError):
        extend_connected(cycle(4), 3)


def test_phi_then_psi():
    two_triangles = SetCollection.of([[1, 2], [2, 3], [1, 3], [4, 5], [5, 6], [4, 6]])
    std = phi_standardize(two_triangles)
    assert std.p == 3 and is_standard(std)
    grown = tau(two_triangles)
    assert grown.p == 6 and is_standard(grown) and is_connected(grown)


def test_tau_on_all_small_coverings():
    outcomes = {"ok": 0, "unextendable": 0}
    for l, p in [(2, 6), (2, 7), (3, 6), (4, 4)]:
        for rep in enumerate_unlabeled(l, p):
            try:
                out = tau(rep.collection)
            except Unextendable:
                outcomes["unextendable"] += 1
                continue
            outcomes["ok"] += 1
            assert out.p == p and is_standard(out) and is_double_covering(out)
            assert set(out.sizes()) == {l}
    assert outcomes["ok"] > 0


def test_psi_grow_guards():
    with pytest.raises(ValueError):
        psi_grow(cycle(4), 3)
    with pytest.raises(ValueError):
        psi_grow(SetCollection.of([[1, 2], [1, 2], [3, 4], [3, 4]]), 6)
