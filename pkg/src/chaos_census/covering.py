"""Set-collections, their multigraph view, and the structural predicates.

A set-collection is a finite multiset of nonempty finite sets of integer
labels.  A double-covering is a collection in which every label lies in
exactly two members (counted by index, so two equal members both count);
its multigraph has one vertex per member and one edge per label.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from math import factorial
from typing import Hashable, Iterable, Sequence

from .errors import NotDoubleCovering

Member = tuple[int, ...]


@dataclass(frozen=True, order=True)
class SetCollection:
    """Normalized collection: each member sorted, members sorted lexicographically.

    Structural equality of two instances is equality of collections in the
    sense of "same sets up to reordering".
    """

    members: tuple[Member, ...]

    def __post_init__(self) -> None:
        for m in self.members:
            if not m:
                raise ValueError("set-collection members must be nonempty")
            if any(m[i] >= m[i + 1] for i in range(len(m) - 1)):
                raise ValueError(f"member {m!r} is not a strictly increasing tuple")
            if m[0] < 0:
                raise ValueError("ground labels must be nonnegative integers")
        if any(self.members[i] > self.members[i + 1] for i in range(len(self.members) - 1)):
            raise ValueError("members are not in normalized order; use SetCollection.of")

    @classmethod
    def of(cls, sets: Iterable[Iterable[int]]) -> "SetCollection":
        members = []
        for s in sets:
            m = tuple(sorted(set(int(x) for x in s)))
            members.append(m)
        return cls(tuple(sorted(members)))

    @classmethod
    def from_labels(cls, sets: Iterable[Iterable[Hashable]]) -> tuple["SetCollection", dict]:
        """Ingest sets over arbitrary hashable labels.

        Labels are relabeled densely to 1..N in order of first appearance;
        the returned dict maps the original label to its integer.
        """
        label_map: dict = {}
        raw = []
        for s in sets:
            row = []
            for x in s:
                if x not in label_map:
                    label_map[x] = len(label_map) + 1
                row.append(label_map[x])
            raw.append(row)
        return cls.of(raw), label_map

    @classmethod
    def from_json(cls, text: str) -> "SetCollection":
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(s, list) for s in data):
            raise ValueError("expected a JSON list of integer lists")
        return cls.of(data)

    def to_json(self) -> str:
        return json.dumps([list(m) for m in self.members])

    @property
    def p(self) -> int:
        return len(self.members)

    @property
    def l(self) -> int:
        return max((len(m) for m in self.members), default=0)

    @property
    def ground(self) -> tuple[int, ...]:
        return tuple(sorted({x for m in self.members for x in m}))

    def occurrences(self) -> Counter:
        return Counter(x for m in self.members for x in m)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.members)

    def relabel(self, mapping) -> "SetCollection":
        """Apply a ground map (dict or callable) to every member."""
        f = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        return SetCollection.of([f(x) for x in m] for m in self.members)

    def dense(self) -> "SetCollection":
        """Relabel the ground set to 1..N preserving label order."""
        index = {x: i + 1 for i, x in enumerate(self.ground)}
        return self.relabel(index)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def is_double_covering(c: SetCollection) -> bool:
    return all(k == 2 for k in c.occurrences().values())


def is_even_covering(c: SetCollection) -> bool:
    return all(k % 2 == 0 for k in c.occurrences().values())


def component_indices(c: SetCollection) -> list[list[int]]:
    """Member indices of each connected component, ordered by smallest index."""
    parent = list(range(c.p))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    first_owner: dict[int, int] = {}
    for i, m in enumerate(c.members):
        for x in m:
            j = first_owner.setdefault(x, i)
            if j != i:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(c.p):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def connected_components(c: SetCollection) -> list[SetCollection]:
    return [SetCollection(tuple(c.members[i] for i in idx)) for idx in component_indices(c)]


def is_connected(c: SetCollection) -> bool:
    return c.p > 0 and len(component_indices(c)) == 1


def combine(parts: Iterable[SetCollection]) -> SetCollection:
    """Collection formed by all members of the given collections."""
    return SetCollection.of(m for part in parts for m in part.members)


@dataclass(frozen=True)
class Multigraph:
    """Loopless multigraph as a symmetric multiplicity matrix with zero diagonal."""

    mult: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        p = len(self.mult)
        for i, row in enumerate(self.mult):
            if len(row) != p:
                raise ValueError("multiplicity matrix must be square")
            if row[i] != 0:
                raise ValueError("multigraph must be loopless")
            for j in range(p):
                if row[j] < 0 or row[j] != self.mult[j][i]:
                    raise ValueError("multiplicity matrix must be symmetric and nonnegative")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Multigraph":
        return cls(tuple(tuple(int(v) for v in r) for r in rows))

    @classmethod
    def from_edges(cls, p: int, edges: Iterable[tuple[int, int]]) -> "Multigraph":
        """Build from an edge list (0-based endpoints; repeats are parallel edges)."""
        rows = [[0] * p for _ in range(p)]
        for i, j in edges:
            if i == j:
                raise ValueError("multigraph must be loopless")
            rows[i][j] += 1
            rows[j][i] += 1
        return cls.from_rows(rows)

    @property
    def p(self) -> int:
        return len(self.mult)

    def degree(self, i: int) -> int:
        return sum(self.mult[i])

    def degrees(self) -> tuple[int, ...]:
        return tuple(sum(r) for r in self.mult)

    @property
    def edge_count(self) -> int:
        return sum(self.degrees()) // 2

    def permuted(self, perm: Sequence[int]) -> "Multigraph":
        """Graph whose vertex k is the old vertex perm[k]."""
        m = self.mult
        return Multigraph(tuple(tuple(m[a][b] for b in perm) for a in perm))

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.p):
            for j in range(i + 1, self.p):
                out.extend([(i, j)] * self.mult[i][j])
        return out


def to_multigraph(c: SetCollection) -> Multigraph:
    """Vertices are members in normalized order; mult[i][j] = #(A_i & A_j)."""
    if not is_double_covering(c):
        raise NotDoubleCovering("to_multigraph requires a double-covering")
    owners: dict[int, list[int]] = {}
    for i, m in enumerate(c.members):
        for x in m:
            owners.setdefault(x, []).append(i)
    rows = [[0] * c.p for _ in range(c.p)]
    for i, j in owners.values():
        rows[i][j] += 1
        rows[j][i] += 1
    return Multigraph.from_rows(rows)


def from_multigraph(g: Multigraph) -> SetCollection:
    """Fresh labels 1..E are assigned to edges in upper-triangle row order."""
    sets: list[list[int]] = [[] for _ in range(g.p)]
    label = 0
    for i, j in g.edges():
        label += 1
        sets[i].append(label)
        sets[j].append(label)
    return SetCollection.of(sets)


def gamma(items: Sequence[Hashable]) -> int:
    """Multinomial coefficient p!/(p_1!...p_m!) of the repeat profile of items."""
    if len(items) < 1:
        raise ValueError("gamma needs at least one item")
    out = factorial(len(items))
    for k in Counter(items).values():
        out //= factorial(k)
    return out


def random_double_covering(rng, max_members: int = 7, max_labels: int = 8) -> SetCollection:
    """Each label is dropped into two distinct random members; empty members are removed."""
    while True:
        p = rng.randint(2, max_members)
        sets: list[list[int]] = [[] for _ in range(p)]
        for x in range(1, rng.randint(1, max_labels) + 1):
            for k in rng.sample(range(p), 2):
                sets[k].append(x)
        sets = [s for s in sets if s]
        if len(sets) >= 2:
            return SetCollection.of(sets)


def random_even_covering(rng, max_members: int = 7, max_labels: int = 7) -> SetCollection:
    """Like random_double_covering, but labels may lie in 2, 4 or 6 members."""
    while True:
        p = rng.randint(2, max_members)
        sets: list[list[int]] = [[] for _ in range(p)]
        for x in range(1, rng.randint(1, max_labels) + 1):
            mult = rng.choice([k for k in (2, 2, 4, 6) if k <= p])
            for k in rng.sample(range(p), mult):
                sets[k].append(x)
        sets = [s for s in sets if s]
        if len(sets) >= 2:
            return SetCollection.of(sets)
