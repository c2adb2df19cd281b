"""Exact L^p moments of Rademacher chaos sums and the inequalities around them.

Every Walsh product w_A with A inside {1..n} is constant on the dyadic
intervals of length 2^-n, so integrating over [0,1] is the same as
averaging over the 2^n sign vectors.  ``moment_direct`` does exactly that;
``moment_combinatorial`` instead sums gamma(A_1..A_p) b_{A_1}...b_{A_p} over
the multisets of support sets whose union is an even-covering.  The two
are independent and must agree.
"""
from __future__ import annotations

import itertools
import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, lcm, prod
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .covering import SetCollection, gamma, is_double_covering, is_even_covering
from .errors import MissingMuCell, NotEvenCovering, OddExponent, SizeLimitExceeded
from .partitions import log_int

DEFAULT_SIGN_LIMIT = 2**24
_CHUNK = 2**20


@dataclass(frozen=True)
class ChaosCoefficients:
    """Finitely supported b = {b_A}: sorted l-tuples of positive ints -> Fraction."""

    l: int
    terms: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.l < 1:
            raise ValueError("chaos order l must be positive")
        for key in self.terms:
            if len(key) != self.l or len(set(key)) != self.l:
                raise ValueError(f"index set {key!r} must have {self.l} distinct elements")
            if list(key) != sorted(key) or key[0] < 1:
                raise ValueError(f"index set {key!r} must be a sorted tuple of positive ints")

    @classmethod
    def of(cls, l: int, terms: Mapping[Iterable[int], object] | Iterable[tuple[Iterable[int], object]]) -> "ChaosCoefficients":
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict[tuple[int, ...], Fraction] = {}
        for key, val in items:
            k = tuple(sorted(int(x) for x in key))
            if len(set(k)) != len(k):
                raise ValueError(f"index set {k!r} has repeated elements")
            out[k] = out.get(k, Fraction(0)) + Fraction(val)
        return cls(l, {k: v for k, v in sorted(out.items()) if v != 0})

    @classmethod
    def uniform(cls, l: int, m: int, value=1) -> "ChaosCoefficients":
        """b_A = value for every l-subset A of {1..m}."""
        return cls.of(l, {A: value for A in itertools.combinations(range(1, m + 1), l)})

    @classmethod
    def from_json(cls, text: str, l: int | None = None) -> "ChaosCoefficients":
        data = json.loads(text)
        items = [(tuple(e["set"]), Fraction(str(e["coeff"]))) for e in data]
        if l is None:
            sizes = {len(k) for k, _ in items}
            if len(sizes) != 1:
                raise ValueError("cannot infer l from an empty or mixed coefficient file")
            (l,) = sizes
        return cls.of(l, items)

    def to_json(self) -> str:
        return json.dumps([{"set": list(k), "coeff": str(v)} for k, v in self.terms.items()])

    @property
    def n(self) -> int:
        return max((k[-1] for k in self.terms), default=0)

    @property
    def norm_sq(self) -> Fraction:
        return sum((v * v for v in self.terms.values()), Fraction(0))

    def scaled(self, lam) -> "ChaosCoefficients":
        lam = Fraction(lam)
        return ChaosCoefficients.of(self.l, {k: v * lam for k, v in self.terms.items()})

    def integerized(self) -> tuple[dict[tuple[int, ...], int], int]:
        """(integer coefficients, common denominator D) with b_A = c_A / D."""
        d = 1
        for v in self.terms.values():
            d = lcm(d, v.denominator)
        return {k: int(v * d) for k, v in self.terms.items()}, d


def random_coefficients(
    rng: random.Random, l: int, m: int, *, density: float = 0.6, span: int = 5, max_den: int = 3
) -> ChaosCoefficients:
    """Random nonzero small rationals on a random part of the l-subsets of {1..m}."""
    subsets = list(itertools.combinations(range(1, m + 1), l))
    chosen = [A for A in subsets if rng.random() < density] or [rng.choice(subsets)]
    terms = {}
    for A in chosen:
        num = rng.choice([x for x in range(-span, span + 1) if x])
        terms[A] = Fraction(num, rng.randint(1, max_den))
    return ChaosCoefficients.of(l, terms)


def _walsh_values(coeffs: dict[tuple[int, ...], int], n: int, start: int, stop: int) -> np.ndarray:
    x = np.arange(start, stop, dtype=np.int64)
    bound = sum(abs(c) for c in coeffs.values())
    dtype = np.int64 if bound < 2**62 else object
    f = np.zeros(stop - start, dtype=dtype)
    for A, c in coeffs.items():
        mask = sum(1 << (k - 1) for k in A)
        parity = (np.bitwise_count(x & mask) & 1).astype(np.int64)
        f = f + (1 - 2 * parity).astype(dtype) * c
    return f


def sign_vector_values(b: ChaosCoefficients, limit: int = DEFAULT_SIGN_LIMIT):
    """Yield (integer value of D*f, multiplicity) over all 2^n sign vectors; also returns D."""
    n = b.n
    if 2**n > limit:
        raise SizeLimitExceeded(f"2^{n} sign vectors exceeds limit {limit}")
    coeffs, d = b.integerized()
    tally: Counter = Counter()
    total = 2**n
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        vals, counts = np.unique(_walsh_values(coeffs, n, start, stop), return_counts=True)
        for v, k in zip(vals.tolist(), counts.tolist()):
            tally[int(v)] += int(k)
    return tally, d, n


def moment_direct(
    b: ChaosCoefficients, p: int, *, absolute: bool = False, limit: int = DEFAULT_SIGN_LIMIT
) -> Fraction:
    """2^-n * sum over sign vectors of (sum_A b_A prod_{k in A} eps_k)^p, exact."""
    if p < 1 or int(p) != p:
        raise ValueError("moment_direct needs a positive integer exponent")
    tally, d, n = sign_vector_values(b, limit)
    total = sum(k * (abs(v) if absolute else v) ** p for v, k in tally.items())
    return Fraction(total, 2**n * d**p)


def even_multisets(b: ChaosCoefficients, p: int):
    """Yield (multiset of support sets, gamma) whose union is an even-covering."""
    support = list(b.terms)
    for combo in itertools.combinations_with_replacement(range(len(support)), p):
        sets = [support[i] for i in combo]
        if is_even_covering(SetCollection.of(sets)):
            yield tuple(sets), gamma(combo)


def _moment_by_multisets(b: ChaosCoefficients, p: int) -> Fraction:
    total = Fraction(0)
    for sets, g in even_multisets(b, p):
        total += g * prod((b.terms[A] for A in sets), start=Fraction(1))
    return total


def _moment_by_parity_dp(b: ChaosCoefficients, p: int) -> Fraction:
    # state (items chosen, xor of index masks) -> sum of multinomial-weighted products
    coeffs, d = b.integerized()
    states: dict[tuple[int, int], int] = {(0, 0): 1}
    for A, c in coeffs.items():
        mask = sum(1 << (k - 1) for k in A)
        nxt: dict[tuple[int, int], int] = {}
        for (used, par), val in states.items():
            power = 1
            for k in range(0, p - used + 1):
                key = (used + k, par ^ mask if k % 2 else par)
                nxt[key] = nxt.get(key, 0) + val * power * comb(used + k, k)
                power *= c
        states = nxt
    return Fraction(states.get((p, 0), 0), d**p)


def moment_combinatorial(b: ChaosCoefficients, p: int, method: str = "dp") -> Fraction:
    """Sum of gamma(A_1..A_p) b_{A_1}...b_{A_p} over even-covering multisets.

    ``method="multisets"`` enumerates the multisets literally; ``"dp"``
    groups them by multiplicity vector while tracking the parity of the
    union, which is the same sum in far fewer steps.
    """
    if p < 2 or p % 2:
        raise OddExponent(f"combinatorial moment needs an even exponent >= 2, got {p}")
    if method == "multisets":
        return _moment_by_multisets(b, p)
    if method == "dp":
        return _moment_by_parity_dp(b, p)
    raise ValueError(f"unknown method {method!r}")


def _log_fraction(x: Fraction) -> float:
    return log_int(x.numerator) - log_int(x.denominator)


def root(x: Fraction, p: float) -> float:
    """x^(1/p) in floating point without overflow for huge rationals."""
    if x < 0:
        raise ValueError("root of a negative moment")
    if x == 0:
        return 0.0
    return math.exp(_log_fraction(x) / p)


def norm_p(b: ChaosCoefficients, p: float, limit: int = DEFAULT_SIGN_LIMIT) -> float:
    """||sum_A b_A w_A||_p."""
    if p <= 0:
        raise ValueError("p must be positive")
    if float(p).is_integer():
        p = int(p)
        if p % 2 == 0:
            return root(moment_combinatorial(b, p), p)
        return root(moment_direct(b, p, absolute=True, limit=limit), p)
    tally, d, n = sign_vector_values(b, limit)
    acc = sum(k * (abs(v) / d) ** p for v, k in tally.items())
    return (acc / 2**n) ** (1 / p)


def falling_factorial(m: int, k: int) -> int:
    """m (m-1) ... (m-k+1)."""
    return prod(range(m - k + 1, m + 1)) if k > 0 else 1


def _mu_or_missing(l: int, p: int, filt: str, table=None) -> int:
    from .enumeration import Mode, mu

    try:
        return mu(l, p, Mode.EXACT, filt, table)
    except SizeLimitExceeded as exc:
        raise MissingMuCell(f"mu_{l},{p}({filt}) not computable: {exc}") from exc


def t1_upper_holds(b: ChaosCoefficients, p: int, mu_full: int) -> bool:
    """Exact check of ||f||_p <= sqrt(l!) (p! mu_full)^(1/p) ||b||, raised to the p-th power."""
    if p % 2:
        raise OddExponent("upper bound check needs even p")
    lhs = moment_combinatorial(b, p)
    rhs = Fraction(factorial(b.l)) ** (p // 2) * factorial(p) * mu_full * b.norm_sq ** (p // 2)
    return lhs <= rhs


def uniform_ratio(l: int, p: int, m: int) -> float:
    """||sum over l-subsets of {1..m} of w_A||_p / C(m,l)^(1/2)."""
    moment = moment_combinatorial(ChaosCoefficients.uniform(l, m), p)
    return root(moment, p) / math.sqrt(comb(m, l))


def t1_sandwich(
    l: int,
    p: int,
    b: ChaosCoefficients,
    m_range: Sequence[int] = (),
    *,
    mu_full: int | None = None,
    mu_standard: int | None = None,
    table=None,
) -> dict:
    """Upper bound asserted for b; lower side reported through uniform probes."""
    if p % 2:
        raise OddExponent("the sandwich is stated for even p")
    if b.l != l:
        raise ValueError(f"coefficients have order {b.l}, expected {l}")
    mu_full = _mu_or_missing(l, p, "full", table) if mu_full is None else mu_full
    mu_standard = _mu_or_missing(l, p, "standard", table) if mu_standard is None else mu_standard
    upper_const = math.sqrt(factorial(l)) * (factorial(p) * mu_full) ** (1 / p)
    lower_const = (factorial(p) * mu_standard) ** (1 / p) / (2 * math.sqrt(3))
    norm_b = math.sqrt(b.norm_sq)
    ratio = norm_p(b, p) / norm_b if norm_b else 0.0
    probes = [{"m": m, "ratio": uniform_ratio(l, p, m)} for m in m_range]
    return {
        "l": l,
        "p": p,
        "mu_full": mu_full,
        "mu_standard": mu_standard,
        "upper_constant": upper_const,
        "lower_constant": lower_const,
        "ratio": ratio,
        "upper_holds": t1_upper_holds(b, p, mu_full),
        "uniform_probes": probes,
        "uniform_nondecreasing": all(
            probes[i]["ratio"] <= probes[i + 1]["ratio"] for i in range(len(probes) - 1)
        ),
    }


def zlm_chain_sides(l: int, p: int, m: int, mu_standard: int | None = None, table=None) -> tuple[Fraction, Fraction]:
    """(integral of (sum over Z_l(m) of w_A)^p, p! mu_std A_m^{pl/2} / (2^p (3 l!)^{p/2}))."""
    if p % 2:
        raise OddExponent("chain is stated for even p")
    if m < p * l // 2:
        raise ValueError(f"need m >= pl/2 = {p * l // 2}")
    if mu_standard is None:
        mu_standard = _mu_or_missing(l, p, "standard", table)
    lhs = moment_combinatorial(ChaosCoefficients.uniform(l, m), p)
    rhs = Fraction(
        factorial(p) * mu_standard * falling_factorial(m, p * l // 2),
        2**p * (3 * factorial(l)) ** (p // 2),
    )
    return lhs, rhs


def zlm_lower_chain(l: int, p: int, m: int, mu_standard: int | None = None, table=None) -> bool:
    lhs, rhs = zlm_chain_sides(l, p, m, mu_standard, table)
    return lhs >= rhs


# --- generalized Cauchy-Schwarz ------------------------------------------


@dataclass
class VariableCovering:
    """Variable sets I_1..I_p with a nonnegative sequence on each.

    ``sequences[k]`` maps a realization of ``sets[k]`` (values listed in the
    order of ``sets[k]``) to a nonnegative rational; missing entries are 0.
    ``ranges[v]`` is the number of values variable v takes (0..ranges[v]-1).
    """

    sets: list[tuple[Hashable, ...]]
    ranges: dict[Hashable, int]
    sequences: list[dict[tuple[int, ...], Fraction]]

    def __post_init__(self) -> None:
        if len(self.sets) != len(self.sequences):
            raise ValueError("one sequence per variable set")
        for s in self.sets:
            if len(set(s)) != len(s):
                raise ValueError("a variable set lists each variable once")
            for v in s:
                if v not in self.ranges:
                    raise ValueError(f"no range for variable {v!r}")
        for seq in self.sequences:
            if any(x < 0 for x in seq.values()):
                raise ValueError("sequences must be nonnegative")

    @property
    def variables(self) -> list[Hashable]:
        seen = []
        for s in self.sets:
            for v in s:
                if v not in seen:
                    seen.append(v)
        return seen

    def counts(self) -> Counter:
        return Counter(v for s in self.sets for v in s)


def _primed_sum(sets, ranges, sequences, variables) -> Fraction:
    total = Fraction(0)
    spans = [range(ranges[v]) for v in variables]
    position = {v: i for i, v in enumerate(variables)}
    lookups = [[position[v] for v in s] for s in sets]
    for values in itertools.product(*spans):
        term = Fraction(1)
        for seq, idx in zip(sequences, lookups):
            term *= seq.get(tuple(values[i] for i in idx), 0)
            if not term:
                break
        total += term
    return total


def _split_to_double(v: VariableCovering):
    # rename variables to ints, split with the label reduction, rename back
    from .transforms import even_to_double

    names = v.variables
    ids = {name: i + 1 for i, name in enumerate(names)}
    base = SetCollection.of([[ids[x] for x in s] for s in v.sets])
    # even_to_double works on the normalized order; track the original order
    order = sorted(range(len(v.sets)), key=lambda k: tuple(sorted(ids[x] for x in v.sets[k])))
    _, new_members, gmap = even_to_double(base)
    new_sets: list[tuple[int, ...]] = [()] * len(v.sets)
    new_seqs: list[dict] = [{}] * len(v.sets)
    for slot, k in enumerate(order):
        member = new_members[slot]
        by_orig = {gmap(x): x for x in member}
        # keep the original variable order so sequence keys stay valid
        new_sets[k] = tuple(by_orig[ids[name]] for name in v.sets[k])
        new_seqs[k] = v.sequences[k]
    ranges = {x: v.ranges[names[gmap(x) - 1]] for s in new_sets for x in s}
    return VariableCovering(new_sets, ranges, new_seqs)


def cauchy_schwarz_sides(v: VariableCovering) -> dict:
    """Left sum, its square, the product of squared sums, and the split sum if any."""
    counts = v.counts()
    if any(k % 2 for k in counts.values()):
        raise NotEvenCovering("variable sets must form an even-covering")
    lhs = _primed_sum(v.sets, v.ranges, v.sequences, v.variables)
    rhs_sq = Fraction(1)
    for s, seq in zip(v.sets, v.sequences):
        rhs_sq *= sum((seq.get(vals, 0) ** 2 for vals in itertools.product(*(range(v.ranges[x]) for x in s))), Fraction(0))
    out = {"lhs": lhs, "lhs_sq": lhs * lhs, "rhs_sq": rhs_sq, "split_lhs": None}
    if not all(k == 2 for k in counts.values()):
        d = _split_to_double(v)
        out["split_lhs"] = _primed_sum(d.sets, d.ranges, d.sequences, d.variables)
    return out


def gen_cauchy_schwarz_check(v: VariableCovering) -> bool:
    """Sum over all variables of prod_k a^(k) <= prod_k (sum a^(k)^2)^(1/2), compared squared.

    For an even-covering that is not a double-covering, the sum is also
    checked to be dominated by the sum after splitting shared variables.
    """
    s = cauchy_schwarz_sides(v)
    ok = s["lhs_sq"] <= s["rhs_sq"]
    if s["split_lhs"] is not None:
        ok = ok and s["lhs"] <= s["split_lhs"] and s["split_lhs"] ** 2 <= s["rhs_sq"]
    return ok


def random_variable_covering(
    rng: random.Random,
    *,
    max_sets: int = 5,
    max_vars: int = 4,
    max_range: int = 3,
    even: bool = False,
) -> VariableCovering:
    """Random double- (or even-) covering of variables with positive rationals."""
    while True:
        p = rng.randint(2, max_sets)
        g = rng.randint(1, max_vars)
        sets: list[list[int]] = [[] for _ in range(p)]
        for var in range(g):
            mult = 2 if not even or p < 4 else rng.choice([2, 2, 4])
            for k in rng.sample(range(p), mult):
                sets[k].append(var)
        if all(sets):
            break
    ranges = {var: rng.randint(1, max_range) for var in range(g)}
    seqs = []
    for s in sets:
        seq = {}
        for vals in itertools.product(*(range(ranges[x]) for x in s)):
            seq[vals] = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        seqs.append(seq)
    return VariableCovering([tuple(s) for s in sets], ranges, seqs)


# --- Khintchine reference -----------------------------------------------


def double_factorial(n: int) -> int:
    return prod(range(n, 0, -2)) if n > 0 else 1


def khintchine_reference(p: int, n: int) -> dict:
    """E[(r_1 + ... + r_n)^p] / n^(p/2) exactly, with the classical bounds."""
    if p % 2 or p < 2:
        raise OddExponent("reference moments need even p >= 2")
    if n < 1:
        raise ValueError("n must be positive")
    total = sum(comb(n, k) * (n - 2 * k) ** p for k in range(n + 1))
    value = Fraction(total, 2**n * n ** (p // 2))
    sharp = double_factorial(p - 1)
    classical = Fraction(p // 2 + 1) ** (p // 2)
    return {
        "p": p,
        "n": n,
        "value": value,
        "sharp_bound": sharp,
        "classical_bound": classical,
        "within_sharp": value <= sharp,
        "within_classical": value <= classical,
        "gap_to_sharp": float(1 - value / sharp),
    }


def dl_gl_estimates(mu_full: Mapping[int, Mapping[int, int]], probes: Iterable[tuple[int, int, ChaosCoefficients]]) -> dict:
    """Finite-range estimates of d(l) and g(l); observations only.

    ``mu_full[l][p]`` supplies mu_{l,p}(full); each probe is (l, p, b).
    """
    d_est = {}
    for l, row in mu_full.items():
        vals = [(v ** (1 / p)) / p ** (l / 2 - 1) for p, v in row.items() if v > 0]
        d_est[l] = max(vals) if vals else None
    g_est: dict[int, float] = {}
    details = []
    for l, p, b in probes:
        nb = math.sqrt(b.norm_sq)
        r = norm_p(b, p) / (p ** (l / 2) * nb)
        details.append({"l": l, "p": p, "support": len(b.terms), "ratio": r})
        g_est[l] = max(g_est.get(l, 0.0), r)
    return {"d_estimate": d_est, "g_estimate": g_est, "probes": details, "note": "observation, not assertion"}
