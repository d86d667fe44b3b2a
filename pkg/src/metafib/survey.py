"""Batch classification of parameter / initial-condition grids.

Each grid point is generated independently to a horizon and classified by
the first notable event: the recursion halting, a forward difference
outside {0, 1}, or (Conolly only) two consecutive increments.  Points run
in a process pool; results come back in grid order regardless of which
worker finishes first.
"""

from __future__ import annotations

import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .core import (
    ArithmeticOverflow,
    Conolly,
    Conway,
    ConwayVariant,
    GeneralConolly,
    InitialConditionError,
    RecursionSpec,
    SequenceState,
    spec_from_dict,
)
from .validators import validate_conolly, validate_conway

DEFAULT_HORIZON = 10**4
CONFIRM_HORIZON = 10**6


class TheoremContradiction(AssertionError):
    """A validator-approved point did not stay slow-growing."""


@dataclass(frozen=True)
class ICPattern:
    """Initial conditions by name.

    ``kind`` is ``"ones"`` (1, 1, ..., 1), ``"staircase"`` (1, 1, 2, 2, 3, ...)
    or ``"explicit"``.  ``length`` may be relative to the recursion's minimum
    number of initial conditions when ``relative`` is set.
    """

    kind: str
    length: int = 0
    values: tuple[int, ...] = ()
    relative: bool = False

    def resolve_length(self, spec: RecursionSpec) -> int:
        if self.kind == "explicit":
            return len(self.values)
        return self.length + (spec.min_initial_conditions if self.relative else 0)

    def materialize(self, spec: RecursionSpec) -> list[int]:
        if self.kind == "explicit":
            return list(self.values)
        n = self.resolve_length(spec)
        if self.kind == "ones":
            return [1] * n
        if self.kind == "staircase":
            return [i // 2 + 1 for i in range(n)]
        raise ValueError(f"unknown pattern kind {self.kind!r}")

    def descriptor(self, spec: Optional[RecursionSpec] = None) -> str:
        if self.kind == "explicit":
            return ",".join(map(str, self.values))
        if spec is not None:
            return f"{self.kind}:{self.resolve_length(spec)}"
        return f"{self.kind}:{'+' if self.relative else ''}{self.length}"


def parse_int_range(text: str) -> list[int]:
    """``"3"`` -> [3]; ``"0..4"`` -> [0, 1, 2, 3, 4] (inclusive)."""
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?", text)
    if not m:
        raise ValueError(f"bad integer range {text!r}")
    lo = int(m.group(1))
    hi = lo if m.group(2) is None else int(m.group(2))
    if hi < lo:
        raise ValueError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def parse_patterns(text: str) -> list[ICPattern]:
    """Parse ``ones:3``, ``ones:3..8``, ``staircase:+0..+2`` or ``1,1,2``.

    A leading ``+`` makes lengths relative to the recursion's minimum.
    """
    text = text.strip()
    m = re.fullmatch(r"(ones|staircase):(\+?)(\d+)(?:\.\.\+?(\d+))?", text)
    if m:
        kind, plus, lo, hi = m.groups()
        lengths = range(int(lo), int(hi if hi is not None else lo) + 1)
        return [ICPattern(kind, n, relative=bool(plus)) for n in lengths]
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad initial-condition pattern {text!r}") from exc
    return [ICPattern("explicit", values=values)]


@dataclass(frozen=True)
class Outcome:
    """First event in generation order.

    ``kind`` is one of SlowToHorizon, HaltedAt, NonSlowAt,
    ConsecutiveIncrementsAt, OverflowAt, ConstructionError.
    """

    kind: str
    n: Optional[int] = None
    delta: Optional[int] = None
    diagnostic: Optional[dict] = None
    message: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "delta": self.delta,
            "diagnostic": self.diagnostic,
            "message": self.message,
        }


@dataclass(frozen=True)
class SurveyRecord:
    spec: RecursionSpec
    ics: str
    horizon: int
    outcome: Outcome
    validator_pass: Optional[bool]
    validator_failed: tuple[str, ...]
    length: int
    max_value: int
    final_ratio: float

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "ics": self.ics,
            "horizon": self.horizon,
            "outcome": self.outcome.to_dict(),
            "validator": None
            if self.validator_pass is None
            else {"overall": self.validator_pass, "failed": list(self.validator_failed)},
            "length": self.length,
            "max_value": self.max_value,
            "final_ratio": self.final_ratio,
        }

    @classmethod
    def from_dict(cls, d: dict) -> SurveyRecord:
        v = d["validator"]
        return cls(
            spec_from_dict(d["spec"]),
            d["ics"],
            d["horizon"],
            Outcome(**d["outcome"]),
            None if v is None else v["overall"],
            () if v is None else tuple(v["failed"]),
            d["length"],
            d["max_value"],
            d["final_ratio"],
        )

    def csv_row(self) -> list:
        p = self.spec.to_dict()
        return [
            p["family"],
            " ".join(f"{k}={v}" for k, v in p.items() if k != "family"),
            self.ics,
            self.horizon,
            self.outcome.kind,
            "" if self.outcome.n is None else self.outcome.n,
            "" if self.validator_pass is None else int(self.validator_pass),
            self.length,
            self.max_value,
            f"{self.final_ratio:.9f}",
        ]


CSV_HEADER = [
    "family", "params", "ics", "horizon", "outcome", "n", "validator_pass",
    "length", "max_value", "final_ratio",
]


def _first_event(state: SequenceState) -> Outcome:
    t = state.array()
    length = len(state)
    nonslow = None
    if length >= 2:
        d = np.diff(t[1:])
        hits = np.flatnonzero((d != 0) & (d != 1))
        if hits.size:
            n = int(hits[0]) + 2
            nonslow = (n, int(d[hits[0]]))
    consec = None
    if isinstance(state.spec, Conolly) and length >= 3:
        # pairs touching at least one generated term
        r = state.ic_len
        d = np.diff(t[1:])  # d[i] = delta(i + 2)
        both = (d[1:] == 1) & (d[:-1] == 1)  # both[i] -> n = i + 3
        start = max(r + 1, 3)
        hits = np.flatnonzero(both[start - 3 :])
        if hits.size:
            consec = int(hits[0]) + start
    halted = None if state.is_active else state.diagnostic.n

    events = []
    if nonslow:
        events.append((nonslow[0], Outcome("NonSlowAt", nonslow[0], delta=nonslow[1])))
    if consec:
        events.append((consec, Outcome("ConsecutiveIncrementsAt", consec)))
    if halted:
        events.append(
            (halted, Outcome("HaltedAt", halted, diagnostic=state.diagnostic.to_dict(),
                             message=str(state.diagnostic)))
        )
    if not events:
        return Outcome("SlowToHorizon")
    return min(events, key=lambda e: e[0])[1]


def run_point(spec: RecursionSpec, pattern: ICPattern, horizon: int) -> SurveyRecord:
    """Generate one grid point to ``horizon`` and classify it."""
    desc = pattern.descriptor(spec)
    try:
        ics = pattern.materialize(spec)
        state = SequenceState(spec, ics)
    except (InitialConditionError, ValueError) as exc:
        return SurveyRecord(spec, desc, horizon, Outcome("ConstructionError", message=str(exc)),
                            None, (), 0, 0, 0.0)

    verdict = None
    if isinstance(spec, Conway):
        verdict = validate_conway(spec, ics)
    elif isinstance(spec, Conolly):
        verdict = validate_conolly(spec, ics)

    outcome = None
    try:
        state.extend(horizon)
    except ArithmeticOverflow as exc:
        outcome = Outcome("OverflowAt", exc.n, message=str(exc))
    event = _first_event(state)
    if outcome is None or (event.n is not None and event.n < outcome.n):
        outcome = event
    length = len(state)
    return SurveyRecord(
        spec,
        desc,
        horizon,
        outcome,
        None if verdict is None else verdict.overall,
        () if verdict is None else tuple(verdict.failed),
        length,
        max(state.values()),
        state[length] / length,
    )


def _run_packed(args):
    spec_dict, pattern, horizon = args
    return run_point(spec_from_dict(spec_dict), pattern, horizon)


def iter_survey(
    points: Iterable[tuple[RecursionSpec, ICPattern]],
    horizon: int = DEFAULT_HORIZON,
    jobs: Optional[int] = 1,
) -> Iterator[SurveyRecord]:
    """Yield records in grid order; any prefix is a valid partial result.

    ``jobs`` > 1 (or None for all cores) uses a process pool.  A record
    whose validator passed but whose outcome is not SlowToHorizon raises
    :class:`TheoremContradiction`.
    """
    packed = [(spec.to_dict(), pattern, horizon) for spec, pattern in points]
    if jobs == 1 or len(packed) <= 1:
        results = map(_run_packed, packed)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=jobs)
        results = pool.map(_run_packed, packed, chunksize=max(1, len(packed) // 64))
    try:
        for rec in results:
            if rec.validator_pass and rec.outcome.kind != "SlowToHorizon":
                raise TheoremContradiction(
                    f"{rec.spec} with ics {rec.ics} passed validation but {rec.outcome.kind} "
                    f"at n={rec.outcome.n}"
                )
            yield rec
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def run_survey(points, horizon: int = DEFAULT_HORIZON, jobs: Optional[int] = 1) -> list[SurveyRecord]:
    return list(iter_survey(points, horizon, jobs))


def _patterns(ics) -> list[ICPattern]:
    if ics is None:
        return [ICPattern("ones", 0, relative=True)]
    out = []
    for p in ics:
        out.extend(parse_patterns(p) if isinstance(p, str) else [p])
    return out


def conway_points(k, a, b, ics=None, where: Optional[Callable] = None):
    pats = _patterns(ics)
    for kk, aa, bb in itertools.product(k, a, b):
        spec = Conway(kk, aa, bb)
        if where is None or where(spec):
            for p in pats:
                yield spec, p


def variant_points(k, a, b, c, ics=None, where: Optional[Callable] = None):
    pats = _patterns(ics)
    for kk, aa, bb, cc in itertools.product(k, a, b, c):
        spec = ConwayVariant(kk, aa, bb, cc)
        if where is None or where(spec):
            for p in pats:
                yield spec, p


def conolly_points(s, ics=None):
    pats = _patterns(ics)
    for ss in s:
        for p in pats:
            yield Conolly(ss), p


def general_points(term_lists: Sequence, ics=None):
    pats = _patterns(ics)
    for terms in term_lists:
        for p in pats:
            yield GeneralConolly(tuple(terms)), p


def survey_conway(k, a, b, ics=None, horizon=DEFAULT_HORIZON, jobs=1, where=None):
    """Sweep Conway(k, a, b) over the product of the given ranges.

    ``ics`` lists patterns (strings or :class:`ICPattern`); the default is
    all-ones of the minimum length b.
    """
    return run_survey(conway_points(k, a, b, ics, where), horizon, jobs)


def survey_variant(k, a, b, c, ics=None, horizon=DEFAULT_HORIZON, jobs=1, where=None):
    return run_survey(variant_points(k, a, b, c, ics, where), horizon, jobs)


def survey_conolly(s, ics=None, horizon=DEFAULT_HORIZON, jobs=1):
    return run_survey(conolly_points(s, ics), horizon, jobs)


def survey_general(term_lists, ics=None, horizon=DEFAULT_HORIZON, jobs=1):
    return run_survey(general_points(term_lists, ics), horizon, jobs)
