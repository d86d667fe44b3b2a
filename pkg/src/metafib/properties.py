"""Sequence-level checks run after generation.

Every checker returns a :class:`CheckResult` naming the first index where
the property fails.  Checks are vectorized over the term table, so they
stay cheap at 10^6 terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import (
    MAX_TERM,
    ArithmeticOverflow,
    Conolly,
    Conway,
    GeneralConolly,
    SequenceState,
    TermIndexError,
)

TermTable = Union[SequenceState, Sequence[int], np.ndarray]


@dataclass(frozen=True)
class CheckResult:
    property_name: str
    holds: bool
    first_violation: Optional[tuple[int, tuple[int, ...]]]
    checked_range: tuple[int, int]
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.holds != (self.first_violation is None):
            raise ValueError("holds must be true exactly when there is no violation")

    def render(self) -> str:
        lo, hi = self.checked_range
        head = f"{self.property_name} on [{lo}, {hi}]: "
        if self.holds:
            return head + "holds"
        n, observed = self.first_violation
        return head + f"FAILS at n={n} (observed {list(observed)})"


def _table(terms: TermTable) -> np.ndarray:
    """Index-aligned int64 array: ``arr[n]`` is term n, ``arr[0]`` is padding."""
    if isinstance(terms, SequenceState):
        return terms.array()
    arr = np.asarray(terms, dtype=np.int64)
    return np.concatenate(([0], arr))


def _range(arr: np.ndarray, rng, low_min: int) -> tuple[int, int]:
    length = len(arr) - 1
    lo, hi = (low_min, length) if rng is None else rng
    if lo < low_min or hi > length or lo > hi:
        raise TermIndexError(f"range [{lo}, {hi}] outside [{low_min}, {length}]")
    return lo, hi


def _result(name, bad_mask, lo, hi, observed) -> CheckResult:
    hits = np.flatnonzero(bad_mask)
    if hits.size == 0:
        return CheckResult(name, True, None, (lo, hi))
    n = lo + int(hits[0])
    return CheckResult(name, False, (n, tuple(int(v) for v in observed(n))), (lo, hi))


def check_slow_growth(terms: TermTable, rng: tuple[int, int] | None = None) -> CheckResult:
    """Every forward difference on ``rng`` (default ``[2, len]``) is 0 or 1."""
    t = _table(terms)
    lo, hi = _range(t, rng, 2)
    d = t[lo : hi + 1] - t[lo - 1 : hi]
    return _result("slow-growth", (d != 0) & (d != 1), lo, hi, lambda n: (t[n] - t[n - 1],))


def check_no_consecutive_increments(
    terms: TermTable, rng: tuple[int, int] | None = None
) -> CheckResult:
    """No n on ``rng`` (default ``[3, len]``) has delta(n) = delta(n-1) = 1."""
    t = _table(terms)
    lo, hi = _range(t, rng, 3)
    d = np.diff(t[lo - 2 : hi + 1])
    bad = (d[1:] == 1) & (d[:-1] == 1)
    return _result(
        "no-consecutive-increments",
        bad,
        lo,
        hi,
        lambda n: (t[n - 1] - t[n - 2], t[n] - t[n - 1]),
    )


def _require_conolly(state: SequenceState) -> Conolly:
    if not isinstance(state.spec, Conolly):
        raise TypeError("split components are defined for the two-term Conolly recursion")
    return state.spec


def split_components(state: SequenceState, n: int) -> tuple[int, int]:
    """``(C(n-s-C(n-1)), C(n-s-2-C(n-3)))`` for a recursively computed term."""
    s = _require_conolly(state).s
    if not state.ic_len < n <= len(state):
        raise TermIndexError(f"n={n} outside [{state.ic_len + 1}, {len(state)}]")
    return state[n - s - state[n - 1]], state[n - s - 2 - state[n - 3]]


def check_split_law(state: SequenceState, rng: tuple[int, int] | None = None) -> CheckResult:
    """Both summands differ by 0 or 1, with the larger first.

    Equivalently ``c1 = c2 = C(n)/2`` for even C(n) and
    ``c1 = c2 + 1 = (C(n)+1)/2`` for odd C(n).
    """
    s = _require_conolly(state).s
    t = state.array()
    lo, hi = _range(t, rng, state.ic_len + 1)
    n = np.arange(lo, hi + 1)
    c1 = t[n - s - t[n - 1]]
    c2 = t[n - s - 2 - t[n - 3]]
    c = t[lo : hi + 1]
    diff = c1 - c2
    bad = ((diff != 0) & (diff != 1)) | (diff != c % 2) | (c - c1 != c2)
    return _result(
        "split-law",
        bad,
        lo,
        hi,
        lambda m: (c1[m - lo], c2[m - lo], t[m]),
    )


def _pairs(state: SequenceState):
    if isinstance(state.spec, (Conolly, GeneralConolly)):
        return state.spec.terms
    raise TypeError("delta decomposition is defined for Conolly-type recursions")


def delta_decomposition(state: SequenceState, n: int) -> list[int]:
    """Per-summand contributions to delta(n); they sum to delta(n)."""
    pairs = _pairs(state)
    if not state.ic_len + 1 < n <= len(state):
        raise TermIndexError(f"n={n} outside [{state.ic_len + 2}, {len(state)}]")
    return [
        state[n - a - state[n - b]] - state[n - 1 - a - state[n - 1 - b]] for a, b in pairs
    ]


def check_delta_components(
    state: SequenceState, rng: tuple[int, int] | None = None
) -> CheckResult:
    """Each per-summand contribution lies in {0, 1} and they sum to delta(n)."""
    pairs = _pairs(state)
    t = state.array()
    lo, hi = _range(t, rng, state.ic_len + 2)
    n = np.arange(lo, hi + 1)
    parts = np.stack([t[n - a - t[n - b]] - t[n - 1 - a - t[n - 1 - b]] for a, b in pairs])
    bad = np.any((parts != 0) & (parts != 1), axis=0)
    bad |= parts.sum(axis=0) != t[lo : hi + 1] - t[lo - 1 : hi]
    return _result("delta-components", bad, lo, hi, lambda m: tuple(parts[:, m - lo]))


@dataclass(frozen=True)
class ESequence:
    """``E_n = E_{n-1} + E_{n-k}`` with ``E_1 = ... = E_k = 1`` (1-indexed)."""

    k: int
    values: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= len(self.values):
            raise TermIndexError(f"E index {n} outside [1, {len(self.values)}]")
        return self.values[n - 1]

    def __len__(self):
        return len(self.values)


def gen_E(k: int, count: int) -> ESequence:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if count < k:
        raise ValueError(f"count must be >= k={k}, got {count}")
    vals = [1] * k
    for n in range(k + 1, count + 1):
        v = vals[n - 2] + vals[n - 1 - k]
        if v > MAX_TERM:
            raise ArithmeticOverflow(n, v)
        vals.append(v)
    return ESequence(k, tuple(vals))


def E_upto(k: int, limit: int) -> ESequence:
    """All E_n not exceeding ``limit`` (at least the k leading ones)."""
    vals = [1] * k
    while True:
        v = vals[-1] + vals[-k]
        if v > limit:
            return ESequence(k, tuple(vals))
        vals.append(v)


@dataclass(frozen=True)
class ENRecord:
    n: int
    e_n: int
    a_of_e_n: int
    holds: bool
    hypothesis2_j: Optional[int] = None  # witnessing j, None if no j works
    hypothesis3: Optional[bool] = None  # None when n <= k (not an induction step)


def check_theorem_en(k: int, horizon: int) -> CheckResult:
    """Check ``A(E_n) = E_{n-1}`` for every ``2 <= n`` with ``E_n <= horizon``.

    A is the Conway recursion with parameters (k, 0, 1) and ``A(1) = A(2) = 1``.
    For each n > k the induction hypotheses are also recorded:
    hypothesis 2 (some j in [0, k-1] has ``A(E_{n-j} - 1) = E_{n-j-1}``) and
    hypothesis 3 (``A(E_n + 1) = E_{n-1} + 1``).  They end up in ``extras``.
    """
    E = E_upto(k, horizon)
    if len(E) <= k:
        raise ValueError(f"horizon {horizon} is below E_(k+1) = 2")
    state = SequenceState(Conway(k, 0, 1), [1, 1]).extend(horizon + 1)
    if not state.is_active:
        raise RuntimeError(f"generation halted: {state.diagnostic}")
    A = state._t

    records = []
    for n in range(2, len(E) + 1):
        e = E[n]
        rec = ENRecord(n, e, A[e], A[e] == E[n - 1])
        if n > k:
            j_found = None
            for j in range(k):
                idx = E[n - j] - 1
                if n - j - 1 >= 1 and idx >= 1 and A[idx] == E[n - j - 1]:
                    j_found = j
                    break
            rec = ENRecord(n, e, A[e], rec.holds, j_found, A[e + 1] == E[n - 1] + 1)
        records.append(rec)

    first = next((r for r in records if not r.holds), None)
    induction = [r for r in records if r.n > k]
    extras = {
        "records": records,
        "hypothesis2_holds": all(r.hypothesis2_j is not None for r in induction),
        "hypothesis3_holds": all(r.hypothesis3 for r in induction),
        "checked_n": [r.n for r in records],
    }
    return CheckResult(
        f"A(E_n)=E_(n-1) for k={k}",
        first is None,
        None if first is None else (first.e_n, (first.a_of_e_n, E[first.n - 1])),
        (2, len(E)),
        extras,
    )


def growth_report(state: TermTable, checkpoints: Sequence[int]) -> list[tuple[int, int]]:
    t = _table(state)
    out = []
    for c in checkpoints:
        if not 1 <= c < len(t):
            raise TermIndexError(f"checkpoint {c} outside [1, {len(t) - 1}]")
        out.append((int(c), int(t[c])))
    return out


def check_growth(samples: Sequence[tuple[int, int]]) -> CheckResult:
    """Values strictly increase across consecutive checkpoints.

    This is finite evidence of unboundedness only; the gap between
    checkpoints must leave room for an increase (for slow Conolly sequences
    at least two indices per unit of growth).
    """
    lo = samples[0][0] if samples else 0
    hi = samples[-1][0] if samples else 0
    for (i0, v0), (i1, v1) in zip(samples, samples[1:]):
        if v1 <= v0:
            return CheckResult("strict-growth", False, (i1, (v0, v1)), (lo, hi))
    return CheckResult("strict-growth", True, None, (lo, hi))
