from __future__ import annotations

import itertools
import random
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from chaos_census.canon import (
    CanonicalCode,
    are_isomorphic,
    canonical_code,
    canonical_form,
    collection_code,
    eclass_size,
    ground_rearrangement_count,
    is_standard,
    orbit,
    vertex_automorphism_count,
)
from chaos_census.covering import (
    Multigraph,
    SetCollection,
    random_double_covering,
    to_multigraph,
)
from chaos_census.errors import SizeLimitExceeded


def brute_key(g: Multigraph) -> tuple:
    """Oracle: lexicographically least upper triangle over all p! orderings."""
    p = g.p
    return min(
        tuple(g.mult[perm[i]][perm[j]] for i in range(p) for j in range(i + 1, p))
        for perm in itertools.permutations(range(p))
    )


def brute_vertex_aut(g: Multigraph) -> int:
    return sum(g.permuted(perm) == g for perm in itertools.permutations(range(g.p)))


def shuffled(c: SetCollection, rng: random.Random) -> SetCollection:
    labels = list(c.ground)
    image = labels[:]
    rng.shuffle(image)
    return c.relabel(dict(zip(labels, image)))


@settings(max_examples=60)
@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_code_agrees_with_brute_force_isomorphism(s1, s2):
    a = random_double_covering(random.Random(s1), max_members=5, max_labels=6)
    b = random_double_covering(random.Random(s2), max_members=5, max_labels=6)
    ga, gb = to_multigraph(a), to_multigraph(b)
    same = ga.p == gb.p and brute_key(ga) == brute_key(gb)
    assert (canonical_code(ga) == canonical_code(gb)) == same


@given(st.integers(0, 2**32))
def test_code_is_relabel_invariant(seed):
    rng = random.Random(seed)
    c = random_double_covering(rng)
    assert collection_code(shuffled(c, rng)) == collection_code(c)
    g = to_multigraph(c)
    perm = list(range(g.p))
    rng.shuffle(perm)
    assert canonical_code(g.permuted(perm)) == canonical_code(g)
    assert canonical_form(g.permuted(perm)) == canonical_form(g)


@given(st.integers(0, 2**32))
def test_vertex_aut_matches_brute_force(seed):
    g = to_multigraph(random_double_covering(random.Random(seed), max_members=6))
    assert vertex_automorphism_count(g) == brute_vertex_aut(g)


@settings(max_examples=40)
@given(st.integers(0, 2**32), st.integers(0, 2))
def test_formula_matches_brute_ground_count(seed, extra):
    c = random_double_covering(random.Random(seed), max_members=5, max_labels=6)
    n = len(c.ground) + extra
    if factorial(n) > 400_000:
        return
    brute = ground_rearrangement_count(c, n, method="brute")
    formula = ground_rearrangement_count(c, n, method="formula")
    assert brute == formula
    # orbit-stabilizer
    assert eclass_size(c, n, method="orbit") * brute.ground_aut == factorial(n)


def test_worked_six_member_symmetries(six_cycle_of_triples):
    # rotations by two steps and the three type-preserving reflections,
    # times a swap inside each of the three double edges
    aut = ground_rearrangement_count(six_cycle_of_triples)
    assert aut.vertex_aut == 6
    assert aut.ground_aut == 6 * 2**3
    assert eclass_size(six_cycle_of_triples) == factorial(9) // 48


def test_repeated_member_counts():
    c = SetCollection.of([[1, 2], [1, 2]])
    aut = ground_rearrangement_count(c, method="brute")
    assert aut.ground_aut == 2
    assert ground_rearrangement_count(c, method="formula").ground_aut == 2
    assert eclass_size(c, 3) == 3


def test_orbit_lists_distinct_images():
    triangle = SetCollection.of([[1, 2], [2, 3], [1, 3]])
    assert len(orbit(triangle, 3)) == 1
    path = SetCollection.of([[1], [1, 2], [2]])
    imgs = orbit(path, 3)
    assert len(imgs) == eclass_size(path, 3) == 3  # one per unordered pair
    assert len(set(imgs)) == len(imgs)


def test_generic_collections_compare():
    a = SetCollection.of([[1], [1], [1], [1]])
    b = SetCollection.of([[5], [5], [5], [5]])
    c = SetCollection.of([[1, 2], [1, 2], [1, 2], [1, 2]])
    assert are_isomorphic(a, b)
    assert not are_isomorphic(a, c)


def test_standardness():
    two_triangles = SetCollection.of([[1, 2], [2, 3], [1, 3], [4, 5], [5, 6], [4, 6]])
    triangle_and_square = SetCollection.of([[1, 2], [2, 3], [1, 3], [4, 5], [5, 6], [6, 7], [4, 7]])
    assert not is_standard(two_triangles)
    assert is_standard(triangle_and_square)


def test_code_hex_round_trip():
    code = collection_code(SetCollection.of([[1, 2], [2, 3], [1, 3]]))
    assert CanonicalCode.fromhex(code.hex()) == code
    assert str(code) == code.hex()


def test_brute_force_guard():
    big = SetCollection.of([[k, k + 1] for k in range(1, 12)] + [[1, 12]])
    with pytest.raises(SizeLimitExceeded):
        ground_rearrangement_count(big, method="brute")
    assert ground_rearrangement_count(big).ground_aut == 24
