"""Constructive covering transformations.

* ``even_to_double`` splits over-covered labels until every label lies in
  exactly two members, keeping a map back to the original labels.
* ``find_chains`` lists X- and Y-chains (runs of members with prescribed
  consecutive intersection sizes).
* ``extend_connected`` grows a connected exact-degree covering by splicing
  in a chain of new members.
* ``phi_standardize`` / ``psi_grow`` turn an arbitrary covering into a
  standard one of the same size.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .canon import collection_code
from .covering import (
    SetCollection,
    combine,
    component_indices,
    connected_components,
    is_connected,
    is_double_covering,
    is_even_covering,
)
from .errors import NotDoubleCovering, NotEvenCovering, ParityViolation, Unextendable


@dataclass(frozen=True)
class GroundMap:
    """Total map from the labels of a source collection onto a target's labels."""

    mapping: dict[int, int]

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def image(self, member) -> tuple[int, ...]:
        return tuple(sorted({self.mapping[x] for x in member}))

    def is_identity_on(self, labels) -> bool:
        return all(self.mapping.get(x) == x for x in labels)


def even_to_double(c: SetCollection) -> tuple[SetCollection, list[tuple[int, ...]], GroundMap]:
    """Reduce an even-covering to a double-covering with a covering map.

    Returns ``(d, members, m)`` where ``members`` lists the new members in
    the same order as ``c.members`` (so that ``m.image(members[k]) ==
    c.members[k]``), ``d`` is their normalized collection, and ``m`` sends
    each generated label back to the label it was split from.
    """
    if not is_even_covering(c):
        raise NotEvenCovering("even_to_double requires an even-covering")
    members = [list(m) for m in c.members]
    origin = {x: x for x in c.ground}
    next_label = max(c.ground, default=0) + 1
    for a in sorted(c.ground):
        while True:
            holders = [k for k, m in enumerate(members) if a in m]
            if len(holders) < 4:
                break
            b = next_label
            next_label += 1
            for k in holders[:2]:
                members[k].remove(a)
                members[k].append(b)
            origin[b] = a
    ordered = [tuple(sorted(m)) for m in members]
    return SetCollection.of(ordered), ordered, GroundMap(origin)


@dataclass(frozen=True)
class Chain:
    members: tuple[tuple[int, ...], ...]
    indices: tuple[int, ...]
    kind: Literal["X", "Y"]

    @property
    def length(self) -> int:
        return len(self.members)


def _pattern_ok(kind: str, l: int, k: int, size: int) -> bool:
    # k is the 1-based position of the pair (A_k, A_{k+1})
    if kind == "X":
        return size == (l - 1 if k % 2 == 1 else 1)
    return size == l // 2


def find_chains(c: SetCollection, kind: Literal["X", "Y"], r: int, l: int | None = None) -> list[Chain]:
    """All X-/Y-chains of length r, one per distinct set of member positions.

    A chain is a sub-collection; it is reported once with its smallest
    admissible ordering even though its reversal also qualifies.
    """
    if not is_double_covering(c):
        raise NotDoubleCovering("find_chains requires a double-covering")
    if kind not in ("X", "Y"):
        raise ValueError("kind must be 'X' or 'Y'")
    if r < 1:
        raise ValueError("chain length must be positive")
    l = c.l if l is None else l
    p = c.p
    if kind == "X" and r % 2:
        return []
    if kind == "Y" and l % 2:
        if r != 1:
            return []
        return [Chain((m,), (k,), "Y") for k, m in enumerate(c.members)]
    inter = [[len(set(a) & set(b)) for b in c.members] for a in c.members]
    found: dict[frozenset[int], tuple[int, ...]] = {}
    seq: list[int] = []

    def rec() -> None:
        if len(seq) == r:
            key = frozenset(seq)
            if key not in found:
                found[key] = tuple(seq)
            return
        for v in range(p):
            if v in seq:
                continue
            if seq and not _pattern_ok(kind, l, len(seq), inter[seq[-1]][v]):
                continue
            seq.append(v)
            rec()
            seq.pop()

    rec()
    return [
        Chain(tuple(c.members[i] for i in idx), idx, kind)
        for _, idx in sorted(found.items(), key=lambda kv: kv[1])
    ]


def _fresh_labels(taken: set[int], count: int) -> list[int]:
    out = []
    x = 1
    while len(out) < count:
        if x not in taken:
            out.append(x)
        x += 1
    return out


def extend_connected(c: SetCollection, p: int, reserved=frozenset()) -> SetCollection:
    """Grow a connected exact-degree covering from q to p members.

    For odd l one label ``a`` of the last member is swapped for a fresh
    label ``b`` and an X-chain joining ``a`` to ``b`` is spliced in; for even
    l half of the last member is swapped and a Y-chain is spliced in.
    Fresh labels are the smallest positive integers not used by ``c`` or
    listed in ``reserved``.
    """
    q = c.p
    sizes = set(c.sizes())
    if len(sizes) != 1:
        raise ValueError("extend_connected needs an exact-degree covering")
    (l,) = sizes
    if (p * l) % 2 or (q * l) % 2:
        raise ParityViolation(f"pl and ql must be even (l={l}, q={q}, p={p})")
    if not p > q >= 2:
        raise ValueError(f"need p > q >= 2, got q={q}, p={p}")
    if not is_double_covering(c) or not is_connected(c):
        raise ValueError("extend_connected needs a connected double-covering")

    taken = set(c.ground) | set(reserved)
    last = c.members[-1]
    r = p - q
    if l % 2:
        n_fresh = r * l // 2
        fresh = _fresh_labels(taken, n_fresh)
        b, fresh = fresh[0], fresh[1:]
        a = max(last)
        new_last = tuple(sorted((set(last) - {a}) | {b}))
        chain: list[set[int]] = []
        it = iter(fresh)
        carry = {a}
        for pair in range(r // 2):
            shared = {next(it) for _ in range(l - 1)}
            first = carry | shared
            if pair == r // 2 - 1:
                second = shared | {b}
            else:
                link = next(it)
                second = shared | {link}
                carry = {link}
            chain += [first, second]
    else:
        half = l // 2
        fresh = _fresh_labels(taken, r * half)
        big_a = set(sorted(last)[-half:])
        big_b = set(fresh[:half])
        new_last = tuple(sorted((set(last) - big_a) | big_b))
        links = [set(fresh[half + k * half : half + (k + 1) * half]) for k in range(r - 1)]
        chain = []
        left = big_a
        for k in range(r):
            right = links[k] if k < r - 1 else big_b
            chain.append(left | right)
            left = right
    out = SetCollection.of([*c.members[:-1], new_last, *chain])
    assert is_double_covering(out) and is_connected(out) and set(out.sizes()) == {l}
    return out


def phi_standardize(c: SetCollection) -> SetCollection:
    """Keep one component from every isomorphism class of components."""
    kept = []
    seen = set()
    for part in connected_components(c):
        code = collection_code(part)
        if code not in seen:
            seen.add(code)
            kept.append(part)
    return combine(kept)


def psi_grow(c: SetCollection, p: int) -> SetCollection:
    """Grow the largest component (ties: smallest code) so the total reaches p."""
    q = c.p
    if p == q:
        return c
    if p < q:
        raise ValueError("psi_grow cannot shrink a covering")
    parts = connected_components(c)
    codes = [collection_code(part) for part in parts]
    if len(set(codes)) != len(codes):
        raise ValueError("psi_grow needs a standard covering")
    target = min(range(len(parts)), key=lambda k: (-parts[k].p, codes[k]))
    others = [part for k, part in enumerate(parts) if k != target]
    reserved = frozenset(x for part in others for x in part.ground)
    grown = extend_connected(parts[target], parts[target].p + (p - q), reserved)
    grown_code = collection_code(grown)
    if any(grown_code == codes[k] for k in range(len(parts)) if k != target):
        raise Unextendable("grown component collides with an existing component class")
    return combine([grown, *others])


def tau(c: SetCollection) -> SetCollection:
    """psi_grow after phi_standardize, back to the original member count."""
    return psi_grow(phi_standardize(c), c.p)


__all__ = [
    "Chain",
    "GroundMap",
    "even_to_double",
    "extend_connected",
    "find_chains",
    "phi_standardize",
    "psi_grow",
    "tau",
    "component_indices",
]
