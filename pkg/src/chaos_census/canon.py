"""Canonical codes, isomorphism, and ground-set symmetry counts.

The canonical code of a multigraph is the lexicographically smallest key
``(sorted degree sequence, upper-triangle columns)`` over all vertex
orderings.  Because the degree sequence leads the key, only orderings with
nondecreasing degrees can attain the minimum, which is what the search
explores; at each depth only the candidates producing the smallest new
column are expanded.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod

import numpy as np

from .covering import (
    Multigraph,
    SetCollection,
    connected_components,
    is_double_covering,
    to_multigraph,
)
from .errors import SizeLimitExceeded

DEFAULT_VERTEX_LIMIT = 12
# brute force over ground permutations when N! stays below this
BRUTE_FORCE_LIMIT = 400_000
# member-permutation search for collections that are not double-coverings
GENERIC_MEMBER_LIMIT = 8

_TAG_MULTIGRAPH = 1
_TAG_GENERIC = 2


@dataclass(frozen=True, order=True)
class CanonicalCode:
    """Byte key of an isomorphism class; big-endian, row-major, platform-stable."""

    code: bytes

    def hex(self) -> str:
        return self.code.hex()

    @classmethod
    def fromhex(cls, text: str) -> "CanonicalCode":
        return cls(bytes.fromhex(text))

    def __str__(self) -> str:
        return self.hex()


@dataclass(frozen=True)
class AutomorphismCount:
    vertex_aut: int
    ground_aut: int


def _encode(tag: int, values) -> bytes:
    out = bytearray([tag])
    for v in values:
        out += int(v).to_bytes(2, "big")
    return bytes(out)


def _twin_classes(mult, p: int) -> list[int]:
    """Representative id per vertex; swapping two twins is an automorphism."""
    rep = list(range(p))
    for u in range(p):
        if rep[u] != u:
            continue
        for v in range(u + 1, p):
            if rep[v] == v and all(
                mult[u][w] == mult[v][w] for w in range(p) if w != u and w != v
            ):
                rep[v] = u
    return rep


def canonical_order(g: Multigraph, limit: int = DEFAULT_VERTEX_LIMIT) -> tuple[list[int], list[int]]:
    """Return (vertex order, key entries) realizing the minimal key."""
    p = g.p
    if p > limit:
        raise SizeLimitExceeded(f"canonical form limited to {limit} vertices, got {p}")
    mult = g.mult
    degs = g.degrees()
    target = sorted(degs)
    twins = _twin_classes(mult, p)
    best: list[int] | None = None
    best_perm: list[int] = []
    perm: list[int] = []
    used = [False] * p
    cur: list[int] = []

    def rec(k: int) -> None:
        nonlocal best, best_perm
        if k == p:
            if best is None or cur < best:
                best = cur.copy()
                best_perm = perm.copy()
            return
        cols: dict[tuple[int, ...], list[int]] = {}
        seen_twin: set[tuple[tuple[int, ...], int]] = set()
        for v in range(p):
            if used[v] or degs[v] != target[k]:
                continue
            col = tuple(mult[perm[i]][v] for i in range(k))
            if (col, twins[v]) in seen_twin:
                continue
            seen_twin.add((col, twins[v]))
            cols.setdefault(col, []).append(v)
        mincol = min(cols)
        start = len(cur)
        cur.extend(mincol)
        if best is not None and cur > best[: len(cur)]:
            del cur[start:]
            return
        for v in cols[mincol]:
            used[v] = True
            perm.append(v)
            rec(k + 1)
            perm.pop()
            used[v] = False
        del cur[start:]

    rec(0)
    assert best is not None
    return best_perm, best


def canonical_code(g: Multigraph, limit: int = DEFAULT_VERTEX_LIMIT) -> CanonicalCode:
    _, key = canonical_order(g, limit)
    return CanonicalCode(_encode(_TAG_MULTIGRAPH, [g.p, *sorted(g.degrees()), *key]))


def canonical_form(g: Multigraph, limit: int = DEFAULT_VERTEX_LIMIT) -> Multigraph:
    perm, _ = canonical_order(g, limit)
    return g.permuted(perm)


def _generic_code(c: SetCollection) -> CanonicalCode:
    # An element is described by the set of member positions containing it;
    # the collection up to ground bijection is the multiset of those types.
    p = c.p
    if p > GENERIC_MEMBER_LIMIT:
        raise SizeLimitExceeded(
            f"isomorphism of non-double collections limited to {GENERIC_MEMBER_LIMIT} members"
        )
    owners: dict[int, list[int]] = {}
    for i, m in enumerate(c.members):
        for x in m:
            owners.setdefault(x, []).append(i)
    types = list(owners.values())
    best = None
    for perm in itertools.permutations(range(p)):
        pos = [0] * p
        for new, old in enumerate(perm):
            pos[old] = new
        key = sorted(sum(1 << pos[i] for i in t) for t in types)
        if best is None or key < best:
            best = key
    out = bytearray([_TAG_GENERIC])
    out += p.to_bytes(2, "big")
    for v in best or []:
        out += v.to_bytes(4, "big")
    return CanonicalCode(bytes(out))


def collection_code(c: SetCollection, limit: int = DEFAULT_VERTEX_LIMIT) -> CanonicalCode:
    """Canonical code of any collection; double-coverings go through the multigraph."""
    if is_double_covering(c):
        return canonical_code(to_multigraph(c), limit)
    return _generic_code(c)


def are_isomorphic(a: SetCollection, b: SetCollection) -> bool:
    if a.p != b.p or sorted(a.sizes()) != sorted(b.sizes()):
        return False
    if len(a.ground) != len(b.ground):
        return False
    return collection_code(a) == collection_code(b)


def is_standard(c: SetCollection) -> bool:
    codes = [collection_code(part) for part in connected_components(c)]
    return len(set(codes)) == len(codes)


def vertex_automorphism_count(g: Multigraph) -> int:
    """Number of vertex permutations preserving every multiplicity."""
    p = g.p
    mult = g.mult
    degs = g.degrees()
    image = [-1] * p
    used = [False] * p
    count = 0

    def rec(k: int) -> None:
        nonlocal count
        if k == p:
            count += 1
            return
        for v in range(p):
            if used[v] or degs[v] != degs[k]:
                continue
            if all(mult[k][j] == mult[v][image[j]] for j in range(k)):
                used[v] = True
                image[k] = v
                rec(k + 1)
                used[v] = False
        image[k] = -1

    rec(0)
    return count


@lru_cache(maxsize=12)
def _all_permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def _orbit_stats(c: SetCollection, n: int) -> tuple[int, int]:
    """(orbit size, stabilizer size) of c under all permutations of n labels."""
    dense = c.dense()
    perms = _all_permutations(n)
    images = np.empty((perms.shape[0], c.p), dtype=np.int64)
    for k, m in enumerate(dense.members):
        idx = np.array([x - 1 for x in m], dtype=np.int64)
        images[:, k] = (np.int64(1) << perms[:, idx]).sum(axis=1)
    images.sort(axis=1)
    original = np.array(sorted(sum(1 << (x - 1) for x in m) for m in dense.members), dtype=np.int64)
    stabilizer = int(np.all(images == original, axis=1).sum())
    orbit = int(np.unique(images, axis=0).shape[0])
    return orbit, stabilizer


def _ground_size(c: SetCollection, ground_size: int | None) -> int:
    used = len(c.ground)
    n = used if ground_size is None else ground_size
    if n < used:
        raise ValueError(f"ground size {n} smaller than the {used} labels in use")
    return n


def _formula_ground_aut(c: SetCollection, n: int) -> AutomorphismCount:
    g = to_multigraph(c)
    vaut = vertex_automorphism_count(g)
    bundles = prod(factorial(g.mult[i][j]) for i in range(g.p) for j in range(i + 1, g.p))
    # each pair of equal members lets two vertex maps induce the same ground map
    equal_pairs = sum(1 for i in range(c.p - 1) if c.members[i] == c.members[i + 1])
    ground = vaut * bundles // (2**equal_pairs)
    return AutomorphismCount(vaut, ground * factorial(n - len(c.ground)))


def ground_rearrangement_count(
    c: SetCollection, ground_size: int | None = None, method: str = "auto"
) -> AutomorphismCount:
    """Count ground permutations sigma with {sigma(A_k)} = {A_k}.

    ``ground_size`` defaults to the number of labels in use; labels beyond
    those are free and contribute a factorial factor.  ``method`` is
    ``"brute"``, ``"formula"`` or ``"auto"`` (brute force while N! is small).
    """
    n = _ground_size(c, ground_size)
    if method == "auto":
        method = "brute" if factorial(n) <= BRUTE_FORCE_LIMIT else "formula"
    if method == "brute":
        if factorial(n) > BRUTE_FORCE_LIMIT:
            raise SizeLimitExceeded(f"brute-force ground search limited to N! <= {BRUTE_FORCE_LIMIT}")
        _, stab = _orbit_stats(c, n)
        vaut = vertex_automorphism_count(to_multigraph(c)) if is_double_covering(c) else 0
        return AutomorphismCount(vaut, stab)
    if method == "formula":
        if not is_double_covering(c):
            raise SizeLimitExceeded("formula route needs a double-covering; ground too large for brute force")
        return _formula_ground_aut(c, n)
    raise ValueError(f"unknown method {method!r}")


def eclass_size(c: SetCollection, ground_size: int | None = None, method: str = "auto") -> int:
    """Number of collections on the ground 1..N isomorphic to c.

    ``method="orbit"`` enumerates the images directly; otherwise the size is
    N! divided by the ground automorphism count.
    """
    n = _ground_size(c, ground_size)
    if method == "orbit":
        if factorial(n) > BRUTE_FORCE_LIMIT:
            raise SizeLimitExceeded(f"orbit enumeration limited to N! <= {BRUTE_FORCE_LIMIT}")
        orbit, _ = _orbit_stats(c, n)
        return orbit
    aut = ground_rearrangement_count(c, n, method).ground_aut
    return factorial(n) // aut


def orbit(c: SetCollection, ground_size: int | None = None) -> list[SetCollection]:
    """All distinct collections on labels 1..N isomorphic to c (small N only)."""
    n = _ground_size(c, ground_size)
    if factorial(n) > BRUTE_FORCE_LIMIT:
        raise SizeLimitExceeded(f"orbit enumeration limited to N! <= {BRUTE_FORCE_LIMIT}")
    dense = c.dense()
    seen = set()
    out = []
    for perm in itertools.permutations(range(1, n + 1)):
        img = dense.relabel(lambda x: perm[x - 1])
        if img not in seen:
            seen.add(img)
            out.append(img)
    return sorted(out)
