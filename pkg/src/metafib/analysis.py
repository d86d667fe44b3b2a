"""Ratio diagnostics for A(n)/n and C(n)/n.

Ratios are kept as exact fractions; floats appear only for display and for
locating maxima.  Nothing here claims a limit exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .core import Conolly, Conway, SequenceState, TermIndexError


def characteristic_poly(k: int, x: float) -> float:
    """``x^k - x^(k-1) - 1`` evaluated as ``x^(k-1) * (x - 1) - 1``."""
    return x ** (k - 1) * (x - 1.0) - 1.0


def phi_k(k: int, tolerance: float = 1e-12) -> float:
    """Largest positive root of ``x^k - x^(k-1) - 1`` by bisection on [1, 2].

    The polynomial is -1 at x=1, nonnegative at x=2 and increasing on the
    bracket, so bisection cannot miss.  Returns the midpoint of a bracket no
    wider than ``tolerance`` (or an exact zero when one is hit).
    """
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    lo, hi = 1.0, 2.0
    if characteristic_poly(k, hi) == 0.0:
        return hi
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        p = characteristic_poly(k, mid)
        if p == 0.0:
            return mid
        if p < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def geometric_schedule(length: int, base: int = 2) -> list[int]:
    """1, base, base^2, ... below ``length``, then ``length`` itself."""
    out, n = [], 1
    while n < length:
        out.append(n)
        n *= base
    out.append(length)
    return out


@dataclass(frozen=True)
class RatioSample:
    index: int
    ratio: Fraction

    @property
    def decimal(self) -> float:
        return float(self.ratio)


@dataclass(frozen=True)
class RatioReport:
    samples: tuple[RatioSample, ...]
    tail_window: tuple[int, int]
    tail_running_max: float
    tail_running_min: float
    reference: Optional[float]
    reference_name: Optional[str]
    deviation: Optional[float]
    descriptive_only: bool
    note: str

    def to_dict(self) -> dict:
        return {
            "samples": [
                {"n": s.index, "ratio": f"{s.ratio.numerator}/{s.ratio.denominator}",
                 "decimal": s.decimal}
                for s in self.samples
            ],
            "tail_window": list(self.tail_window),
            "tail_running_max": self.tail_running_max,
            "tail_running_min": self.tail_running_min,
            "reference": self.reference,
            "reference_name": self.reference_name,
            "deviation": self.deviation,
            "descriptive_only": self.descriptive_only,
            "note": self.note,
        }

    def render(self) -> str:
        lines = ["       n  ratio"]
        lines += [f"{s.index:>8}  {s.decimal:.9f}" for s in self.samples]
        lo, hi = self.tail_window
        lines.append(f"tail [{lo}, {hi}]: max {self.tail_running_max:.9f} min {self.tail_running_min:.9f}")
        if self.reference is not None:
            lines.append(
                f"reference {self.reference_name} = {self.reference:.12f}, "
                f"deviation at n={self.samples[-1].index}: {self.deviation:.3e}"
            )
        lines.append(("descriptive only: " if self.descriptive_only else "") + self.note)
        return "\n".join(lines)


def _is_mallows_case(state: SequenceState) -> bool:
    return state.spec == Conway(1, 0, 1) and state.initial_conditions == [1, 1]


def ratio_report(
    state: SequenceState,
    samples: Union[Sequence[int], str, None] = "geometric",
    reference: Optional[str] = None,
    k: Optional[int] = None,
    tail: Optional[tuple[int, int]] = None,
) -> RatioReport:
    """Sample ``terms[n] / n``.

    ``reference`` is ``"half"``, ``"phi"`` (1/phi_k, with k taken from the
    spec unless given) or None.  The tail window defaults to the upper half
    of the computed table.
    """
    length = len(state)
    if samples is None or samples == "geometric":
        points = geometric_schedule(length)
    else:
        points = list(samples)
    for n in points:
        if not 1 <= n <= length:
            raise TermIndexError(f"sample {n} outside [1, {length}]")
    sample_objs = tuple(RatioSample(n, Fraction(state[n], n)) for n in points)

    lo, hi = tail if tail is not None else (max(1, length // 2), length)
    if not 1 <= lo <= hi <= length:
        raise TermIndexError(f"tail window [{lo}, {hi}] outside [1, {length}]")
    t = state.array()[lo : hi + 1]
    ratios = t / np.arange(lo, hi + 1)
    tmax, tmin = float(ratios.max()), float(ratios.min())

    ref_value = ref_name = deviation = None
    if reference == "half":
        ref_value, ref_name = 0.5, "1/2"
    elif reference == "phi":
        if k is None:
            if not isinstance(state.spec, Conway):
                raise ValueError("phi reference needs k for non-Conway specs")
            k = state.spec.k
        ref_value, ref_name = 1.0 / phi_k(k, 1e-12), f"1/phi_{k}"
    elif reference is not None:
        raise ValueError(f"unknown reference {reference!r}")
    if ref_value is not None and sample_objs:
        deviation = abs(sample_objs[-1].decimal - ref_value)

    if _is_mallows_case(state):
        descriptive, note = False, "A(n)/n -> 1/2 is a theorem for this sequence (Mallows)"
    elif isinstance(state.spec, Conway) and state.spec.a == 0 and state.spec.b == 1:
        descriptive = True
        note = "whether A(n)/n converges is open for k >= 2; if it does, the limit is 1/phi_k"
    elif isinstance(state.spec, Conolly):
        descriptive = True
        note = "limsup C(n)/n <= 1/2 is known; convergence to 1/2 is not established"
    else:
        descriptive, note = True, "no limit result is known for this recursion"
    return RatioReport(
        sample_objs, (lo, hi), tmax, tmin, ref_value, ref_name, deviation, descriptive, note
    )


@dataclass(frozen=True)
class CorollaryCheck:
    window: tuple[int, int]
    max_index: int
    max_ratio: Fraction
    slack: Fraction
    satisfies_half_bound: bool

    @property
    def max_decimal(self) -> float:
        return float(self.max_ratio)


def corollary_bound_check(state: SequenceState, window: tuple[int, int]) -> CorollaryCheck:
    """Largest ``C(n)/n`` on ``window`` against ``1/2 + (C(1)+2)/low``.

    For a slow-growing sequence without consecutive increments,
    ``C(n) <= C(1) + floor((n-1)/2) + 1``, hence for ``n >= low``
    ``C(n)/n <= 1/2 + (C(1) + 1/2)/n <= 1/2 + (C(1)+2)/low``.
    """
    if not isinstance(state.spec, Conolly):
        raise TypeError("the half bound is stated for the two-term Conolly recursion")
    lo, hi = window
    if not 2 <= lo <= hi <= len(state):
        raise TermIndexError(f"window [{lo}, {hi}] outside [2, {len(state)}]")
    t = state.array()[lo : hi + 1]
    n = np.arange(lo, hi + 1)
    approx = t / n
    # float ranking can tie near the top; settle among candidates exactly
    candidates = np.flatnonzero(approx >= approx.max() - 1e-12)
    best_n, best = lo, Fraction(-1)
    for i in candidates:
        r = Fraction(int(t[i]), int(n[i]))
        if r > best:
            best_n, best = int(n[i]), r
    slack = Fraction(state[1] + 2, lo)
    return CorollaryCheck((lo, hi), best_n, best, slack, best <= Fraction(1, 2) + slack)
