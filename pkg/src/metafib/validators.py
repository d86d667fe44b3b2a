"""Sufficient-condition checks on initial conditions.

``validate_conway`` checks the hypotheses that guarantee a Conway-type
sequence is defined for every n, slow-growing and unbounded;
``validate_conolly`` does the same for the two-term Conolly recursion
(defined, slow-growing, no two consecutive increments).  Each validator
computes at most one new term.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import Conolly, Conway, SequenceState, UndefinedTerm

CONWAY_GUARANTEE = (
    "A(n) is defined for all positive integers n, remains slow-growing, and is unbounded"
)
CONOLLY_GUARANTEE = (
    "C(n) is defined and slow-growing for all n >= 1, and there is no n >= 3 "
    "with delta(n) = delta(n-1) = 1"
)


@dataclass(frozen=True)
class Witness:
    index: int
    values: tuple[int, ...]
    detail: str = ""

    def to_dict(self) -> dict:
        return {"index": self.index, "values": list(self.values), "detail": self.detail}


@dataclass(frozen=True)
class Hypothesis:
    name: str
    satisfied: bool
    witness: Optional[Witness] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "satisfied": self.satisfied,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "note": self.note,
        }


@dataclass(frozen=True)
class ValidationReport:
    spec: object
    hypotheses: tuple[Hypothesis, ...]
    advisories: tuple[Hypothesis, ...] = field(default=())
    new_term: Optional[int] = None

    @property
    def overall(self) -> bool:
        return all(h.satisfied for h in self.hypotheses)

    @property
    def guarantees(self) -> Optional[str]:
        if not self.overall:
            return None
        return CONWAY_GUARANTEE if isinstance(self.spec, Conway) else CONOLLY_GUARANTEE

    def hypothesis(self, name: str) -> Hypothesis:
        for h in self.hypotheses + self.advisories:
            if h.name == name:
                return h
        raise KeyError(name)

    @property
    def failed(self) -> list[str]:
        return [h.name for h in self.hypotheses if not h.satisfied]

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "overall": self.overall,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "advisories": [h.to_dict() for h in self.advisories],
            "new_term": self.new_term,
            "guarantees": self.guarantees,
        }

    def render(self) -> str:
        lines = [f"validation of {self.spec}"]
        for h in self.hypotheses + self.advisories:
            mark = "ok  " if h.satisfied else "FAIL"
            tag = " (advisory)" if h in self.advisories else ""
            line = f"  [{mark}] {h.name}{tag}"
            if h.witness is not None:
                w = h.witness
                line += f"  witness n={w.index} values={list(w.values)}"
                if w.detail:
                    line += f" ({w.detail})"
            if h.note:
                line += f"  -- {h.note}"
            lines.append(line)
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        if self.guarantees:
            lines.append(f"guarantee: {self.guarantees}")
        return "\n".join(lines)


def _first_non_slow(values: Sequence[int]):
    for n in range(2, len(values) + 1):
        d = values[n - 1] - values[n - 2]
        if d not in (0, 1):
            return n, d
    return None


def _positive(ics) -> Hypothesis:
    for i, v in enumerate(ics, 1):
        if isinstance(v, bool) or not isinstance(v, numbers.Integral) or v < 1:
            return Hypothesis("I.a positive", False, Witness(i, (v,), "not a positive integer"))
    return Hypothesis("I.a positive", True)


def _one_step(state: SequenceState):
    """Try to compute the first recursive term; return (value, witness)."""
    n = len(state) + 1
    try:
        return state.step(), None
    except UndefinedTerm as exc:
        d = exc.diagnostic
        return None, Witness(n, (d.computed_value,), str(d))


def validate_conway(spec: Conway, ics: Sequence[int]) -> ValidationReport:
    ics = list(ics)
    hyps = [_positive(ics)]
    if not hyps[0].satisfied:
        skipped = Witness(len(ics) + 1, (), "not evaluated: initial conditions not positive")
        hyps += [
            Hypothesis("I.b slow-growing", False, skipped),
            Hypothesis("I.c A(1)=1", False, skipped),
            Hypothesis("II.a A(b+j+1) defined", False, skipped),
            Hypothesis("II.b A(b+j+1)-A(b+j) in {0,1}", False, skipped),
        ]
        return ValidationReport(spec, tuple(hyps))

    state = SequenceState(spec, ics)
    bad = _first_non_slow(ics)
    hyps.append(
        Hypothesis("I.b slow-growing", True)
        if bad is None
        else Hypothesis("I.b slow-growing", False, Witness(bad[0], (bad[1],), "delta not in {0,1}"))
    )
    hyps.append(
        Hypothesis("I.c A(1)=1", True)
        if ics[0] == 1
        else Hypothesis("I.c A(1)=1", False, Witness(1, (ics[0],)))
    )

    shortcut = spec.b > spec.a
    note = "b > a: definedness follows from hypothesis I" if shortcut else ""
    n = len(ics) + 1
    value, failure = _one_step(state)
    hyps.append(Hypothesis("II.a A(b+j+1) defined", failure is None, failure, note))
    if failure is not None:
        hyps.append(
            Hypothesis(
                "II.b A(b+j+1)-A(b+j) in {0,1}",
                False,
                Witness(n, (), "not evaluated: term undefined"),
            )
        )
    else:
        d = value - ics[-1]
        hyps.append(
            Hypothesis("II.b A(b+j+1)-A(b+j) in {0,1}", True)
            if d in (0, 1)
            else Hypothesis(
                "II.b A(b+j+1)-A(b+j) in {0,1}", False, Witness(n, (d,), f"A({n})={value}")
            )
        )
    return ValidationReport(spec, tuple(hyps), new_term=value)


def validate_conolly(spec: Conolly, ics: Sequence[int]) -> ValidationReport:
    ics = list(ics)
    state = SequenceState(spec, ics)
    r = len(ics)
    deltas = {n: ics[n - 1] - ics[n - 2] for n in range(2, r + 1)}

    value, failure = _one_step(state)
    hyps = [Hypothesis("I C(r+1) defined", failure is None, failure)]

    witness = None
    for n in range(3, r + 1):
        if deltas[n] == 1 and deltas[n - 1] == 1:
            witness = Witness(n, (1, 1), f"delta({n - 1}) = delta({n}) = 1")
            break
    hyps.append(Hypothesis("II no consecutive increments in 3..r", witness is None, witness))

    bad = _first_non_slow(ics)
    if bad is not None:
        slow = Hypothesis("III slow-growing to r+1", False, Witness(bad[0], (bad[1],), "delta not in {0,1}"))
    elif failure is not None:
        slow = Hypothesis(
            "III slow-growing to r+1", False, Witness(r + 1, (), "not evaluated: term undefined")
        )
    elif value - ics[-1] not in (0, 1):
        slow = Hypothesis(
            "III slow-growing to r+1",
            False,
            Witness(r + 1, (value - ics[-1],), f"C({r + 1})={value}"),
        )
    else:
        slow = Hypothesis("III slow-growing to r+1", True)
    hyps.append(slow)

    advisories = ()
    if value is not None and r >= 2:
        joint = deltas[r] == 1 and value - ics[-1] == 1
        advisories = (
            Hypothesis(
                "delta(r)=delta(r+1)=1 absent",
                not joint,
                Witness(r + 1, (1, 1), "consecutive increments at r+1") if joint else None,
            ),
        )
    return ValidationReport(spec, tuple(hyps), advisories, new_term=value)


@dataclass(frozen=True)
class ConditionN:
    holds: bool
    value: int
    bound: int


def check_condition_N(state: SequenceState, n: int) -> ConditionN:
    """Evaluate ``0 < A^k(n-b) < n-a`` for a Conway state.

    ``n`` may be any index past the initial conditions up to ``len + 1``.
    Raises :class:`UndefinedTerm` if the composition itself leaves the table.
    """
    spec = state.spec
    if not isinstance(spec, Conway):
        raise TypeError("condition N applies to Conway recursions only")
    if not state.ic_len < n <= len(state) + 1:
        raise IndexError(f"n={n} outside ({state.ic_len}, {len(state) + 1}]")
    value = state._chain(n - spec.b, spec.k, n - 1, n, "A^k(n-b)")[-1][2]
    bound = n - spec.a
    return ConditionN(0 < value < bound, value, bound)
