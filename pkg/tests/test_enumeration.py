from __future__ import annotations

import itertools
import json

import pytest

from chaos_census.covering import is_connected, is_double_covering, to_multigraph
from chaos_census.enumeration import (
    Filter,
    Mode,
    MuTable,
    count_labeled,
    count_labeled_direct,
    degree_sequences,
    enumerate_unlabeled,
    labeled_growth_fit,
    mu,
    parse_dot,
    search_space_estimate,
    theorem_p0_report,
    to_dot,
)
from chaos_census.errors import SizeLimitExceeded
from chaos_census.partitions import nu, partitions_min2_bicolored


# --- naive oracle: every labeled matrix, brute-force canonical key ---------


def _labeled_matrices(l: int, p: int, atmost: bool):
    cells = [(i, j) for i in range(p) for j in range(i + 1, p)]
    rows = [[0] * p for _ in range(p)]
    deg = [0] * p

    def rec(k: int):
        if k == len(cells):
            if all((1 if atmost else l) <= d <= l for d in deg):
                yield tuple(tuple(r) for r in rows)
            return
        i, j = cells[k]
        # once row i has no cells left, its degree is final
        last_in_row = j == p - 1
        for v in range(0, l + 1):
            if deg[i] + v > l or deg[j] + v > l:
                break
            if last_in_row and not atmost and deg[i] + v != l:
                continue
            if last_in_row and atmost and deg[i] + v == 0:
                continue
            rows[i][j] = rows[j][i] = v
            deg[i] += v
            deg[j] += v
            yield from rec(k + 1)
            deg[i] -= v
            deg[j] -= v
        rows[i][j] = rows[j][i] = 0

    yield from rec(0)


def _key(m, verts) -> tuple:
    return min(
        tuple(m[a][b] for x, a in enumerate(perm) for b in perm[x + 1 :])
        for perm in itertools.permutations(verts)
    )


def _components(m) -> list[list[int]]:
    p = len(m)
    seen, out = set(), []
    for s in range(p):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in range(p):
                if m[u][v] and v not in seen:
                    seen.add(v)
                    stack.append(v)
        out.append(sorted(comp))
    return out


def naive_counts(l: int, p: int, atmost: bool) -> dict[str, int]:
    classes = {}
    for m in _labeled_matrices(l, p, atmost):
        classes.setdefault(_key(m, list(range(p))), m)
    conn = std = 0
    for m in classes.values():
        comps = _components(m)
        conn += len(comps) == 1
        keys = [(len(c), _key(m, c)) for c in comps]
        std += len(set(keys)) == len(keys)
    return {"full": len(classes), "connected": conn, "standard": std}


ORACLE_CELLS = [
    (2, p, a) for p in range(2, 7) for a in (False, True)
] + [(3, 2, False), (3, 4, False), (3, 2, True), (3, 3, True), (3, 4, True), (4, 2, False), (4, 3, False), (4, 3, True), (3, 6, False)]


@pytest.mark.parametrize("l,p,atmost", ORACLE_CELLS)
def test_enumeration_matches_naive_oracle(l, p, atmost):
    mode = Mode.ATMOST if atmost else Mode.EXACT
    want = naive_counts(l, p, atmost)
    for filt in Filter:
        assert mu(l, p, mode, filt) == want[filt.value], filt


# counts frozen from the naive oracle above and the partition identities
FROZEN = {
    (2, "exact", "full"): [1, 1, 2, 2, 4, 4, 7],
    (2, "atmost", "full"): [2, 2, 5, 6, 13, 16, 30],
    (2, "exact", "connected"): [1] * 7,
    (2, "atmost", "connected"): [2] * 7,
}


@pytest.mark.parametrize("key", list(FROZEN))
def test_frozen_l2_counts(key):
    l, mode, filt = key
    assert [mu(l, p, mode, filt) for p in range(2, 9)] == FROZEN[key]


def test_l2_counts_are_partition_counts():
    for p in range(2, 9):
        assert mu(2, p, "exact") == nu(p) - nu(p - 1)
        # every cycle or path component of size >= 2 carries one of two shapes
        assert mu(2, p, "atmost") == partitions_min2_bicolored(p)


def test_l3_frozen_values():
    assert mu(3, 4) == 3
    assert mu(3, 4, filt="connected") == 2
    assert mu(3, 6) == 9
    assert mu(3, 6, filt="standard") == 8
    assert mu(3, 6, filt="connected") == 6
    assert mu(3, 6, "atmost") == 124


def test_representatives_are_valid_and_distinct():
    reps = enumerate_unlabeled(3, 6)
    assert len({r.code for r in reps}) == len(reps)
    for r in reps:
        c = r.collection
        assert is_double_covering(c) and set(c.sizes()) == {3}
        assert to_multigraph(c).degrees() == r.graph.degrees()


def test_odd_total_degree_is_empty():
    assert mu(3, 3) == 0
    assert mu(3, 5) == 0
    assert degree_sequences(3, 5, "exact") == []


def test_thread_count_does_not_change_results():
    a = enumerate_unlabeled(3, 6, "atmost", workers=1)
    b = enumerate_unlabeled(3, 6, "atmost", workers=2)
    assert [r.code for r in a] == [r.code for r in b]


def test_work_limit():
    assert search_space_estimate(3, 40, "exact") > 10**9
    with pytest.raises(SizeLimitExceeded):
        mu(3, 40)
    with pytest.raises(ValueError):
        mu(1, 4)


@pytest.mark.parametrize("l,p,mode", [(2, 4, "exact"), (2, 5, "atmost"), (3, 4, "exact"), (3, 3, "atmost"), (4, 3, "exact")])
def test_labeled_counts_two_routes(l, p, mode):
    assert count_labeled(l, p, mode) == count_labeled_direct(l, p, mode)


def test_labeled_connected_cycles():
    # connected (2,p) coverings on p labels are the (p-1)!/2 labeled cycles
    from math import factorial

    for p in range(3, 8):
        assert count_labeled(2, p, "exact", "connected") == factorial(p - 1) // 2


def test_p0_report_and_fit():
    rep = theorem_p0_report(3, [2, 4, 6])
    assert rep["inner_inequality_holds"]
    assert [c["p"] for c in rep["cells"]] == [2, 4, 6]
    assert 0 < rep["a_fit"] <= rep["b_fit"] < float("inf")
    fit = labeled_growth_fit(2, [2, 3, 4])
    assert all(r["full_le_star"] for r in fit["cells"])


def test_cache_round_trip_and_checksum(tmp_path):
    path = tmp_path / "cache.json"
    table = MuTable(path)
    assert mu(2, 6, "exact", "full", table) == 4
    assert table.dirty
    table.save()
    loaded = MuTable.load(path)
    assert loaded.get(2, 6, "exact", "full") == 4
    assert not loaded.dirty
    data = json.loads(path.read_text())
    assert {"provenance", "entries", "checksum"} <= set(data)
    data["entries"][0]["value"] = "5"
    path.write_text(json.dumps(data))
    tampered = MuTable.load(path)
    assert tampered.get(2, 6, "exact", "full") is None
    assert tampered.dirty
    path.write_text("not json")
    assert MuTable.load(path).entries == {}


def test_dot_round_trip():
    for r in enumerate_unlabeled(3, 4, "atmost"):
        text = to_dot(r.graph, "g")
        assert text.startswith("graph g {")
        assert parse_dot(text) == r.graph
