"""Verification suites driven by ``chaos-census verify``.

Each suite returns a SuiteResult; a suite passes when it records no
failures.  Suites are deterministic given their seed.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from math import factorial

from .canon import (
    canonical_code,
    eclass_size,
    ground_rearrangement_count,
    is_standard,
)
from .chaos import (
    ChaosCoefficients,
    gen_cauchy_schwarz_check,
    khintchine_reference,
    moment_combinatorial,
    moment_direct,
    random_coefficients,
    random_variable_covering,
    t1_upper_holds,
    uniform_ratio,
    zlm_lower_chain,
)
from .covering import (
    SetCollection,
    is_connected,
    is_double_covering,
    random_even_covering,
    to_multigraph,
)
from .enumeration import (
    Filter,
    Mode,
    count_labeled,
    count_labeled_direct,
    enumerate_filtered,
    enumerate_unlabeled,
    labeled_ground_size,
    labeled_growth_fit,
    mu,
    theorem_p0_report,
)
from .partitions import nu, partitions_min2, partitions_min2_bicolored
from .transforms import even_to_double, extend_connected, find_chains

DEFAULT_SEED = 7


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, message: str) -> None:
        self.checked += 1
        if not ok:
            self.failures.append(message)

    def as_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "details": self.details,
        }


def suite_b1(seed: int = DEFAULT_SEED, **_) -> SuiteResult:
    res = SuiteResult("b1")
    rows = []
    for p in range(2, 8):
        got = mu(2, p, Mode.EXACT, Filter.FULL)
        want = nu(p) - nu(p - 1)
        rows.append({"p": p, "mu": got, "nu_diff": want, "min2": partitions_min2(p)})
        res.check(got == want == partitions_min2(p), f"mu_2,{p}={got} but nu(p)-nu(p-1)={want}")
    res.details["rows"] = rows
    return res


def suite_p1(seed: int = DEFAULT_SEED, **_) -> SuiteResult:
    """mu*_{2,p} = 2 mu_{2,p} and the connected counts, p = 3..7.

    The doubling identity is checked as stated; the rows also carry the
    two-colored partition count, which is what the enumeration matches.
    """
    res = SuiteResult("p1")
    rows = []
    for p in range(3, 8):
        full = mu(2, p, Mode.EXACT, Filter.FULL)
        star = mu(2, p, Mode.ATMOST, Filter.FULL)
        conn = mu(2, p, Mode.EXACT, Filter.CONNECTED)
        conn_star = mu(2, p, Mode.ATMOST, Filter.CONNECTED)
        rows.append(
            {
                "p": p,
                "mu_full": full,
                "mu_star_full": star,
                "twice_mu_full": 2 * full,
                "bicolored_partitions": partitions_min2_bicolored(p),
                "connected": conn,
                "connected_star": conn_star,
            }
        )
        res.check(star == 2 * full, f"mu*_2,{p}={star} != 2*mu_2,{p}={2 * full}")
        res.check(conn == 1, f"connected mu_2,{p}={conn} != 1")
        res.check(conn_star == 2, f"connected mu*_2,{p}={conn_star} != 2")
    res.details["rows"] = rows
    return res


P0_CELLS = {2: range(2, 8), 3: (2, 4, 6)}


def suite_p0_chain(seed: int = DEFAULT_SEED, **_) -> SuiteResult:
    res = SuiteResult("p0-chain")
    for l, ps in P0_CELLS.items():
        report = theorem_p0_report(l, ps)
        for row in report["cells"]:
            res.check(row["inequality_holds"], f"mu_std > mu*_full at l={l}, p={row['p']}")
        res.check(
            report["a_fit"] is not None and report["a_fit"] > 0 and report["b_fit"] < float("inf"),
            f"fitted constants not finite/positive at l={l}",
        )
        res.details[f"l={l}"] = report
    return res


def suite_l0_fit(seed: int = DEFAULT_SEED, **_) -> SuiteResult:
    res = SuiteResult("l0-fit")
    for l, p, mode in [(2, 2, "exact"), (2, 3, "exact"), (2, 4, "exact"), (2, 5, "exact"), (2, 6, "exact"),
                       (3, 2, "exact"), (3, 4, "exact"), (2, 3, "atmost"), (2, 4, "atmost"), (3, 2, "atmost"),
                       (3, 3, "atmost"), (3, 4, "atmost")]:
        a, b = count_labeled(l, p, mode), count_labeled_direct(l, p, mode)
        res.check(a == b, f"labeled count mismatch at ({l},{p},{mode}): classes give {a}, direct {b}")
    for l, ps in P0_CELLS.items():
        res.details[f"l={l}"] = labeled_growth_fit(l, ps)
    return res


def _enumerated(l: int, p: int, mode: str):
    return [r.collection for r in enumerate_unlabeled(l, p, mode)]


def suite_l4(seed: int = DEFAULT_SEED, **_) -> SuiteResult:
    res = SuiteResult("l4")
    l, p = 3, 4
    bound = (3 * factorial(l)) ** (p // 2)
    n = p * l // 2
    for c in _enumerated(l, p, "exact"):
        if not is_standard(c):
            continue
        aut = ground_rearrangement_count(c, n).ground_aut
        size = eclass_size(c, n, method="orbit")
        res.check(aut <= bound, f"ground_aut {aut} > {bound} for {c.members}")
        res.check(size * bound >= factorial(n), f"eclass {size} < {n}!/{bound} for {c.members}")
    checked_cells = []
    for l in (2, 3, 4):
        for p in range(2, 9):
            if p * l // 2 > 8:
                continue
            for mode in ("exact", "atmost"):
                n = labeled_ground_size(l, p)
                for c in _enumerated(l, p, mode):
                    aut = ground_rearrangement_count(c, n, method="formula").ground_aut
                    orbit = eclass_size(c, n, method="orbit")
                    res.check(orbit * aut == factorial(n), f"orbit-stabilizer fails for {c.members} on N={n}")
                checked_cells.append((l, p, mode))
    res.details["orbit_stabilizer_cells"] = checked_cells
    return res


def suite_l7(seed: int = DEFAULT_SEED, **_) -> SuiteResult:
    res = SuiteResult("l7")
    maxima = {}
    for l in (2, 3):
        for p in range(2, 7):
            for c in _enumerated(l, p, "exact"):
                for kind in ("X", "Y"):
                    for r in range(1, p + 1):
                        k = len(find_chains(c, kind, r, l))
                        maxima[(l, kind)] = max(maxima.get((l, kind), 0), k)
                        res.check(k <= p, f"{k} {kind}-chains of length {r} in {c.members}")
    res.details["max_chain_counts"] = {f"l={l},{kind}": v for (l, kind), v in maxima.items()}
    return res


def labeled_connected(l: int, q: int) -> list[SetCollection]:
    """All connected exact-degree coverings on the ground 1..ql/2."""
    from .canon import orbit

    n = labeled_ground_size(l, q)
    out = []
    for r in enumerate_filtered(l, q, Mode.EXACT, Filter.CONNECTED):
        out.extend(orbit(r.collection, n))
    return out


def extension_fibers(l: int, q: int, p: int) -> dict:
    """Preimage sizes of the extension map, per labeled target and per target class."""
    labeled: Counter = Counter()
    by_class: Counter = Counter()
    for src in labeled_connected(l, q):
        img = extend_connected(src, p)
        labeled[img] += 1
        by_class[canonical_code(to_multigraph(img))] += 1
    return {
        "sources": sum(labeled.values()),
        "max_labeled_fiber": max(labeled.values(), default=0),
        "max_class_fiber_sources": max(by_class.values(), default=0),
        "targets": len(labeled),
    }


def suite_l6_fiber(seed: int = DEFAULT_SEED, **_) -> SuiteResult:
    res = SuiteResult("l6-fiber")
    for l, q, p in [(2, 3, 5), (2, 3, 6), (2, 4, 5), (2, 4, 6), (3, 2, 4)]:
        info = extension_fibers(l, q, p)
        res.details[f"l={l},q={q},p={p}"] = info
        res.check(info["max_labeled_fiber"] <= p, f"labeled fiber {info['max_labeled_fiber']} > {p}")
        # class-level: distinct source classes reaching one target class
        classes: dict = {}
        for rep in enumerate_filtered(l, q, Mode.EXACT, Filter.CONNECTED):
            img = extend_connected(rep.collection, p)
            classes.setdefault(canonical_code(to_multigraph(img)), set()).add(rep.code)
        worst = max((len(v) for v in classes.values()), default=0)
        res.check(worst <= p, f"{worst} source classes extend to one target class at l={l},q={q},p={p}")
    return res


def suite_l1(seed: int = DEFAULT_SEED, trials: int = 500, **_) -> SuiteResult:
    res = SuiteResult("l1")
    rng = random.Random(seed)
    for _ in range(trials):
        c = random_even_covering(rng)
        d, members, m = even_to_double(c)
        res.check(is_double_covering(d), f"not a double-covering: {c.members}")
        res.check(d.p == c.p, "member count changed")
        res.check(set(m.mapping.values()) == set(c.ground), "map not onto")
        res.check(
            sorted(m.image(b) for b in members) == list(c.members)
            and all(m.image(b) == a for b, a in zip(members, c.members)),
            f"member images differ for {c.members}",
        )
        res.check(m.is_identity_on(c.ground), "original labels not fixed")
    res.details["seed"] = seed
    return res


def suite_l10(seed: int = DEFAULT_SEED, trials: int = 1000, **_) -> SuiteResult:
    res = SuiteResult("l10")
    rng = random.Random(seed)
    for t in range(trials):
        v = random_variable_covering(rng, even=(t % 4 == 3))
        res.check(gen_cauchy_schwarz_check(v), f"violation at trial {t}: sets={v.sets}")
    res.details["seed"] = seed
    return res


def random_moment_instance(rng: random.Random) -> tuple[ChaosCoefficients, int]:
    l = rng.choice([2, 3])
    p = rng.choice([2, 4, 6])
    return random_coefficients(rng, l, 5), p


def suite_moments_oracle(seed: int = DEFAULT_SEED, trials: int = 200, **_) -> SuiteResult:
    res = SuiteResult("moments-oracle")
    rng = random.Random(seed)
    b = ChaosCoefficients.uniform(2, 3)
    res.check(moment_combinatorial(b, 4) == moment_direct(b, 4) == 21, "worked value 21 not reproduced")
    for t in range(trials):
        b, p = random_moment_instance(rng)
        res.check(moment_combinatorial(b, p) == moment_direct(b, p), f"mismatch at trial {t} (l={b.l}, p={p})")
    res.details["seed"] = seed
    return res


def suite_t1_upper(seed: int = DEFAULT_SEED, trials: int = 100, **_) -> SuiteResult:
    res = SuiteResult("t1-upper")
    rng = random.Random(seed)
    for l, p in [(2, 4), (3, 4)]:
        mu_full = mu(l, p, Mode.EXACT, Filter.FULL)
        for t in range(trials):
            b = random_coefficients(rng, l, 6)
            res.check(t1_upper_holds(b, p, mu_full), f"upper bound fails (l={l}, p={p}, trial {t})")
    res.details["seed"] = seed
    return res


def suite_lower_chain(seed: int = DEFAULT_SEED, **_) -> SuiteResult:
    res = SuiteResult("x53-chain")
    for l, p, m in [(2, 2, 4), (2, 4, 6), (3, 2, 6)]:
        res.check(zlm_lower_chain(l, p, m), f"chain fails at l={l}, p={p}, m={m}")
    ratios = [uniform_ratio(2, 4, m) for m in range(4, 11)]
    res.details["uniform_ratios_l2_p4"] = ratios
    res.check(all(a <= b for a, b in zip(ratios, ratios[1:])), "uniform ratio decreases in m")
    return res


def suite_khintchine(seed: int = DEFAULT_SEED, **_) -> SuiteResult:
    from fractions import Fraction

    res = SuiteResult("khintchine")
    for n in range(1, 51):
        rep = khintchine_reference(4, n)
        res.check(rep["value"] == 3 - Fraction(2, n), f"p=4, n={n}: {rep['value']}")
        res.check(rep["within_sharp"] and rep["within_classical"], f"p=4, n={n} exceeds a bound")
    rep = khintchine_reference(6, 1000)
    res.check(rep["value"] <= 15 and rep["value"] >= Fraction(98, 100) * 15, "p=6, n=1000 not within 2% of 15")
    res.details["p6_n1000"] = float(rep["value"])
    return res


SUITES = {
    "b1": suite_b1,
    "p1": suite_p1,
    "p0-chain": suite_p0_chain,
    "l0-fit": suite_l0_fit,
    "l4": suite_l4,
    "l7": suite_l7,
    "l6-fiber": suite_l6_fiber,
    "l1": suite_l1,
    "l10": suite_l10,
    "moments-oracle": suite_moments_oracle,
    "t1-upper": suite_t1_upper,
    "x53-chain": suite_lower_chain,
    "khintchine": suite_khintchine,
}


def run_suites(names, seed: int = DEFAULT_SEED, trials: int | None = None) -> list[SuiteResult]:
    if "all" in names:
        names = list(SUITES)
    out = []
    for name in names:
        kw = {"seed": seed}
        if trials is not None:
            kw["trials"] = trials
        out.append(SUITES[name](**kw))
    return out


def connected_monotonicity(l: int, ps) -> list[dict]:
    """Labeled connected counts for consecutive admissible p; observations."""
    rows = []
    prev = None
    for p in ps:
        if (l * p) % 2:
            continue
        cnt = count_labeled(l, p, Mode.EXACT, Filter.CONNECTED)
        rows.append({"p": p, "labeled_connected": cnt, "ge_previous": prev is None or cnt >= prev})
        prev = cnt
    return rows


__all__ = ["SUITES", "SuiteResult", "run_suites", "DEFAULT_SEED", "is_connected"]
