"""Generation of unlabeled degree-constrained multigraphs and the mu counts.

Labeled upper-triangular multiplicity matrices are generated row by row for
each admissible degree sequence and deduplicated by canonical code.  The
search is partitioned by the first matrix row; partitions are independent
and their results merge by set union, so the output does not depend on the
number of workers.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from functools import lru_cache
from math import comb, prod
from pathlib import Path
from typing import Iterator

from . import __version__
from .canon import CanonicalCode, canonical_code, canonical_form, eclass_size, is_standard
from .covering import Multigraph, SetCollection, from_multigraph, is_connected
from .errors import SizeLimitExceeded

log = logging.getLogger(__name__)

DEFAULT_WORK_LIMIT = 10**9


class Mode(str, Enum):
    EXACT = "exact"  # every member has exactly l elements
    ATMOST = "atmost"  # 1 <= size <= l


class Filter(str, Enum):
    FULL = "full"
    STANDARD = "standard"
    CONNECTED = "connected"


@dataclass(frozen=True)
class Representative:
    code: CanonicalCode
    graph: Multigraph

    @property
    def collection(self) -> SetCollection:
        return from_multigraph(self.graph)


def degree_sequences(l: int, p: int, mode: Mode | str) -> list[tuple[int, ...]]:
    """Admissible nonincreasing degree sequences for the cell."""
    mode = Mode(mode)
    if mode is Mode.EXACT:
        return [(l,) * p] if (l * p) % 2 == 0 else []
    out = []

    def rec(prefix: list[int], hi: int) -> None:
        if len(prefix) == p:
            if sum(prefix) % 2 == 0:
                out.append(tuple(prefix))
            return
        for d in range(hi, 0, -1):
            prefix.append(d)
            rec(prefix, d)
            prefix.pop()

    rec([], l)
    return out


def _row_fills(rem: list[int], i: int, ties: list[bool] | None = None) -> Iterator[tuple[int, ...]]:
    """Ways to spend rem[i] on columns j > i, each bounded by rem[j].

    ``ties[j]`` marks columns j and j+1 as still interchangeable; such
    neighbours must receive nonincreasing entries.
    """
    p = len(rem)
    cols = list(range(i + 1, p))
    need = rem[i]
    suffix = [0] * (len(cols) + 1)
    for k in range(len(cols) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + rem[cols[k]]
    if suffix[0] < need:
        return
    row = [0] * len(cols)

    def rec(k: int, left: int) -> Iterator[tuple[int, ...]]:
        if k == len(cols):
            if left == 0:
                yield tuple(row)
            return
        if suffix[k] < left:
            return
        hi = min(left, rem[cols[k]])
        if ties is not None and k > 0 and ties[cols[k] - 1]:
            hi = min(hi, row[k - 1])
        for x in range(hi, -1, -1):
            row[k] = x
            yield from rec(k + 1, left - x)
        row[k] = 0

    yield from rec(0, need)


def _initial_ties(degs: tuple[int, ...]) -> list[bool]:
    return [degs[j] == degs[j + 1] for j in range(len(degs) - 1)] + [False]


def _fill_matrices(degs: tuple[int, ...], first_row: tuple[int, ...] | None = None) -> Iterator[Multigraph]:
    # Symmetry breaking: relabel any graph greedily (highest degree first,
    # then lexicographically largest column over the rows placed so far).
    # The result has nonincreasing entries across interchangeable
    # neighbouring columns in every row, so imposing that loses no class.
    p = len(degs)
    rows = [[0] * p for _ in range(p)]
    rem = list(degs)

    def rec(i: int, ties: list[bool]) -> Iterator[Multigraph]:
        if i == p - 1:
            if rem[i] == 0:
                yield Multigraph(tuple(tuple(r) for r in rows))
            return
        fills = [first_row] if (i == 0 and first_row is not None) else _row_fills(rem, i, ties)
        for fill in fills:
            for k, x in enumerate(fill):
                j = i + 1 + k
                rows[i][j] = rows[j][i] = x
                rem[j] -= x
            saved = rem[i]
            rem[i] = 0
            nxt = [t and (j + 1 >= p or rows[i][j] == rows[i][j + 1]) for j, t in enumerate(ties)]
            yield from rec(i + 1, nxt)
            rem[i] = saved
            for k, x in enumerate(fill):
                j = i + 1 + k
                rows[i][j] = rows[j][i] = 0
                rem[j] += x

    yield from rec(0, _initial_ties(degs))


def search_space_estimate(l: int, p: int, mode: Mode | str) -> int:
    """Upper estimate of generated matrices (bounded compositions per row)."""
    per_seq = prod(comb(l + p - i - 2, p - i - 2) for i in range(p - 1))
    return per_seq * max(1, len(degree_sequences(l, p, mode)))


def _partition_worker(args) -> dict[bytes, tuple[tuple[int, ...], ...]]:
    degs, first_row, limit = args
    found: dict[bytes, tuple[tuple[int, ...], ...]] = {}
    for g in _fill_matrices(degs, first_row):
        code = canonical_code(g, limit)
        if code.code not in found:
            found[code.code] = canonical_form(g, limit).mult
    return found


def _partitions(l: int, p: int, mode: Mode):
    for degs in degree_sequences(l, p, mode):
        rem = list(degs)
        for first in _row_fills(rem, 0, _initial_ties(degs)):
            yield degs, first


def _validate_cell(l: int, p: int, work_limit: int) -> None:
    if l < 2 or p < 2:
        raise ValueError(f"need l >= 2 and p >= 2, got l={l}, p={p}")


@lru_cache(maxsize=None)
def _enumerate_cached(l: int, p: int, mode: Mode, workers: int, work_limit: int, vertex_limit: int):
    est = search_space_estimate(l, p, mode)
    if est > work_limit:
        raise SizeLimitExceeded(
            f"cell (l={l}, p={p}, {mode.value}) estimated at {est} matrices, limit {work_limit}"
        )
    if p > vertex_limit:
        raise SizeLimitExceeded(f"p={p} exceeds canonical-form vertex limit {vertex_limit}")
    tasks = [(degs, first, vertex_limit) for degs, first in _partitions(l, p, mode)]
    merged: dict[bytes, tuple[tuple[int, ...], ...]] = {}
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_partition_worker, tasks))
    else:
        parts = [_partition_worker(t) for t in tasks]
    for part in parts:
        merged.update(part)
    return tuple(
        Representative(CanonicalCode(code), Multigraph(merged[code])) for code in sorted(merged)
    )


def enumerate_unlabeled(
    l: int,
    p: int,
    mode: Mode | str = Mode.EXACT,
    *,
    workers: int = 1,
    work_limit: int = DEFAULT_WORK_LIMIT,
    vertex_limit: int = 12,
) -> list[Representative]:
    """One canonical representative per isomorphism class, sorted by code."""
    _validate_cell(l, p, work_limit)
    return list(_enumerate_cached(l, p, Mode(mode), max(1, workers), work_limit, vertex_limit))


def passes(rep: Representative, filt: Filter | str) -> bool:
    filt = Filter(filt)
    if filt is Filter.FULL:
        return True
    c = rep.collection
    if filt is Filter.CONNECTED:
        return is_connected(c)
    return is_standard(c)


def enumerate_filtered(l: int, p: int, mode: Mode | str, filt: Filter | str, **kw) -> list[Representative]:
    return [r for r in enumerate_unlabeled(l, p, mode, **kw) if passes(r, filt)]


def mu(
    l: int,
    p: int,
    mode: Mode | str = Mode.EXACT,
    filt: Filter | str = Filter.FULL,
    table: "MuTable | None" = None,
    **kw,
) -> int:
    """Number of isomorphism classes of (l,p) coverings passing the filter."""
    mode, filt = Mode(mode), Filter(filt)
    if table is not None:
        hit = table.get(l, p, mode, filt)
        if hit is not None:
            return hit
    value = len(enumerate_filtered(l, p, mode, filt, **kw))
    if table is not None:
        table.put(l, p, mode, filt, value)
    return value


def labeled_ground_size(l: int, p: int) -> int:
    return (p * l) // 2


def count_labeled(l: int, p: int, mode: Mode | str = Mode.EXACT, filt: Filter | str = Filter.FULL, **kw) -> int:
    """Coverings on the ground 1..floor(pl/2), summed over class sizes."""
    mode = Mode(mode)
    if mode is Mode.EXACT and (l * p) % 2:
        return 0
    n = labeled_ground_size(l, p)
    return sum(
        eclass_size(r.collection, n, method="formula") for r in enumerate_filtered(l, p, mode, filt, **kw)
    )


def count_labeled_direct(l: int, p: int, mode: Mode | str = Mode.EXACT) -> int:
    """Independent count: assign each ground label to a pair of member slots."""
    mode = Mode(mode)
    if mode is Mode.EXACT and (l * p) % 2:
        return 0
    n = labeled_ground_size(l, p)
    slots: list[list[int]] = [[] for _ in range(p)]
    pairs = [(i, j) for i in range(p) for j in range(i + 1, p)]
    seen: set[SetCollection] = set()
    allow_unused = mode is Mode.ATMOST

    def rec(x: int) -> None:
        if x > n:
            if all(slots) and (mode is Mode.ATMOST or all(len(s) == l for s in slots)):
                seen.add(SetCollection.of(slots))
            return
        # remaining labels must still be able to fill every slot (exact mode)
        if mode is Mode.EXACT:
            deficit = sum(l - len(s) for s in slots)
            if deficit != 2 * (n - x + 1):
                return
        if allow_unused:
            rec(x + 1)
        for i, j in pairs:
            if len(slots[i]) < l and len(slots[j]) < l:
                slots[i].append(x)
                slots[j].append(x)
                rec(x + 1)
                slots[i].pop()
                slots[j].pop()

    rec(1)
    return len(seen)


def theorem_p0_report(l: int, p_range, table: "MuTable | None" = None, **kw) -> dict:
    """Check mu(standard) <= mu*(full) per cell and fit the growth constants.

    a(l) is the smallest and b(l) the largest of
    (count / p**(p*(l/2-1)))**(1/p) over the cells, using the standard
    Exact-mode count and the AtMost full count respectively.
    """
    rows = []
    ok = True
    for p in p_range:
        if (l * p) % 2:
            continue
        std = mu(l, p, Mode.EXACT, Filter.STANDARD, table, **kw)
        full = mu(l, p, Mode.EXACT, Filter.FULL, table, **kw)
        star = mu(l, p, Mode.ATMOST, Filter.FULL, table, **kw)
        scale = p ** (p * (l / 2 - 1))
        holds = std <= star
        ok = ok and holds
        rows.append(
            {
                "p": p,
                "mu_standard": std,
                "mu_full": full,
                "mu_star_full": star,
                "inequality_holds": holds,
                "a_ratio": (std / scale) ** (1 / p),
                "b_ratio": (star / scale) ** (1 / p),
            }
        )
    monotone = []
    for i, r in enumerate(rows):
        for s in rows[i + 1 :]:
            monotone.append(
                {"q": r["p"], "p": s["p"], "mu_full_q_le_mu_full_p": r["mu_full"] <= s["mu_full"]}
            )
    return {
        "l": l,
        "cells": rows,
        "inner_inequality_holds": ok,
        "a_fit": min((r["a_ratio"] for r in rows), default=None),
        "b_fit": max((r["b_ratio"] for r in rows), default=None),
        "monotonicity_observations": monotone,
        "note": "monotonicity rows are observations, not assertions",
    }


def labeled_growth_fit(l: int, p_range, **kw) -> dict:
    """Labeled counts against p**(p(l-1)); reports the fitted constant c(l)."""
    rows = []
    for p in p_range:
        if (l * p) % 2:
            continue
        full = count_labeled(l, p, Mode.EXACT, **kw)
        star = count_labeled(l, p, Mode.ATMOST, **kw)
        scale = p ** (p * (l - 1))
        rows.append(
            {
                "p": p,
                "labeled_full": full,
                "labeled_star_full": star,
                "lower_ratio": (full / scale) ** (1 / p),
                "upper_ratio": (star / scale) ** (1 / p),
                "full_le_star": full <= star,
            }
        )
    return {
        "l": l,
        "cells": rows,
        "c_upper_fit": max((r["upper_ratio"] for r in rows), default=None),
        "c_lower_fit": min((r["lower_ratio"] for r in rows), default=None),
    }


# --- persistence -----------------------------------------------------------

CACHE_ENV = "CHAOS_CENSUS_CACHE"


def default_cache_path() -> Path:
    return Path(os.environ.get(CACHE_ENV, "mu-cache.json"))


def _checksum(entries: list[dict]) -> str:
    blob = json.dumps(entries, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


class MuTable:
    """Cached mu values keyed by (l, p, mode, filter)."""

    def __init__(self, path: Path | str | None = None):
        self.path = Path(path) if path is not None else None
        self.entries: dict[tuple[int, int, str, str], int] = {}
        self.provenance: dict = {}
        self.dirty = False

    def get(self, l, p, mode, filt) -> int | None:
        return self.entries.get((l, p, Mode(mode).value, Filter(filt).value))

    def put(self, l, p, mode, filt, value: int) -> None:
        key = (l, p, Mode(mode).value, Filter(filt).value)
        if self.entries.get(key) != value:
            self.entries[key] = int(value)
            self.dirty = True

    def rows(self) -> list[dict]:
        return [
            {"l": l, "p": p, "mode": m, "filter": f, "value": str(v)}
            for (l, p, m, f), v in sorted(self.entries.items())
        ]

    @classmethod
    def load(cls, path: Path | str) -> "MuTable":
        """Load a cache file; a missing, unreadable, or tampered file yields an empty table."""
        table = cls(path)
        path = Path(path)
        if not path.exists():
            return table
        try:
            data = json.loads(path.read_text())
            entries = data["entries"]
            if data.get("checksum") != _checksum(entries):
                raise ValueError("checksum mismatch")
            for e in entries:
                table.entries[(int(e["l"]), int(e["p"]), Mode(e["mode"]).value, Filter(e["filter"]).value)] = int(
                    e["value"]
                )
            table.provenance = data.get("provenance", {})
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("ignoring corrupt mu cache %s: %s", path, exc)
            table.entries.clear()
            table.dirty = True
        return table

    def save(self, path: Path | str | None = None) -> None:
        path = Path(path) if path is not None else self.path
        if path is None:
            raise ValueError("no cache path")
        entries = self.rows()
        self.provenance = {
            "version": __version__,
            "written": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        payload = {"provenance": self.provenance, "entries": entries, "checksum": _checksum(entries)}
        path.write_text(json.dumps(payload, indent=1))
        self.dirty = False


# --- DOT export ------------------------------------------------------------


def to_dot(g: Multigraph, name: str = "G") -> str:
    """Undirected DOT with one line per parallel edge."""
    lines = [f"graph {name} {{"]
    lines += [f"  A{i + 1};" for i in range(g.p)]
    lines += [f"  A{i + 1} -- A{j + 1};" for i, j in g.edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"


_DOT_EDGE = re.compile(r"A(\d+)\s*--\s*A(\d+)")
_DOT_NODE = re.compile(r"^\s*A(\d+)\s*;", re.MULTILINE)


def parse_dot(text: str) -> Multigraph:
    nodes = {int(k) for k in _DOT_NODE.findall(text)}
    edges = [(int(a), int(b)) for a, b in _DOT_EDGE.findall(text)]
    for a, b in edges:
        nodes.update((a, b))
    p = max(nodes, default=0)
    return Multigraph.from_edges(p, [(a - 1, b - 1) for a, b in edges])
