"""Exact, memoized generation of meta-Fibonacci sequences.

Four recursion families are supported, all 1-indexed:

* ``Conway(k, a, b)``:          A(n) = A(n - a - A^k(n - b)) + A(A^k(n - b))
* ``ConwayVariant(k, a, b, c)``: A(n) = A(n - a - A^k(n - b)) + A(A^k(n - c))
* ``Conolly(s)``:               C(n) = C(n - s - C(n - 1)) + C(n - s - 2 - C(n - 3))
* ``GeneralConolly(terms)``:    C(n) = sum_i C(n - a_i - C(n - b_i))

A :class:`SequenceState` holds the term table.  Terms are produced strictly
forward; a term whose recursion arguments leave ``[1, n - 1]`` halts the
state with a :class:`Diagnostic` while keeping every term computed so far.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import ClassVar, Iterable, Union

import numpy as np

# Largest value a term may take (signed 64-bit range).
MAX_TERM = 2**63 - 1


class MetaFibError(Exception):
    """Base class for errors raised by this package."""


class SpecError(MetaFibError, ValueError):
    """A recursion parameter is out of range."""


class InitialConditionError(MetaFibError, ValueError):
    pass


class EmptyInitialConditions(InitialConditionError):
    def __init__(self):
        super().__init__("initial conditions must be nonempty")


class NonPositiveInitialCondition(InitialConditionError):
    def __init__(self, index: int, value):
        self.index = index
        self.value = value
        super().__init__(f"initial condition {index} must be a positive integer, got {value!r}")


class TooFewInitialConditions(InitialConditionError):
    def __init__(self, required: int, given: int):
        self.required = required
        self.given = given
        super().__init__(f"recursion needs at least {required} initial conditions, got {given}")


class ArithmeticOverflow(MetaFibError, OverflowError):
    def __init__(self, n: int, value: int):
        self.n = n
        self.value = value
        super().__init__(f"term {n} = {value} exceeds the 63-bit limit {MAX_TERM}")


class TermIndexError(MetaFibError, IndexError):
    """An index outside the range an operation accepts."""


class TraceOfInitialCondition(MetaFibError, ValueError):
    pass


class UndefinedTerm(MetaFibError):
    """Raised when a recursion argument escapes the computed table."""

    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


def _check_param(name: str, value, low: int) -> None:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise SpecError(f"{name} must be an integer, got {value!r}")
    if value < low:
        raise SpecError(f"{name} must be >= {low}, got {value}")


@dataclass(frozen=True)
class Conway:
    k: int
    a: int
    b: int

    family: ClassVar[str] = "conway"

    def __post_init__(self):
        _check_param("k", self.k, 1)
        _check_param("a", self.a, 0)
        _check_param("b", self.b, 1)

    @property
    def min_initial_conditions(self) -> int:
        return self.b

    def to_dict(self) -> dict:
        return {"family": self.family, "k": self.k, "a": self.a, "b": self.b}

    def __str__(self):
        return f"conway(k={self.k}, a={self.a}, b={self.b})"


@dataclass(frozen=True)
class ConwayVariant:
    k: int
    a: int
    b: int
    c: int

    family: ClassVar[str] = "variant"

    def __post_init__(self):
        _check_param("k", self.k, 1)
        _check_param("a", self.a, 0)
        _check_param("b", self.b, 1)
        _check_param("c", self.c, 1)

    @property
    def min_initial_conditions(self) -> int:
        return max(self.b, self.c)

    def to_dict(self) -> dict:
        return {"family": self.family, "k": self.k, "a": self.a, "b": self.b, "c": self.c}

    def __str__(self):
        return f"variant(k={self.k}, a={self.a}, b={self.b}, c={self.c})"


@dataclass(frozen=True)
class Conolly:
    s: int

    family: ClassVar[str] = "conolly"

    def __post_init__(self):
        _check_param("s", self.s, 0)

    @property
    def terms(self) -> tuple[tuple[int, int], ...]:
        """The (a_i, b_i) pairs of the equivalent general recursion."""
        return ((self.s, 1), (self.s + 2, 3))

    @property
    def min_initial_conditions(self) -> int:
        return 3

    def to_dict(self) -> dict:
        return {"family": self.family, "s": self.s}

    def __str__(self):
        return f"conolly(s={self.s})"


@dataclass(frozen=True)
class GeneralConolly:
    terms: tuple[tuple[int, int], ...]

    family: ClassVar[str] = "general"

    def __post_init__(self):
        pairs = tuple(tuple(p) for p in self.terms)
        if not pairs:
            raise SpecError("general Conolly recursion needs at least one summand")
        for i, pair in enumerate(pairs, 1):
            if len(pair) != 2:
                raise SpecError(f"summand {i} must be an (a, b) pair, got {pair!r}")
            _check_param(f"a_{i}", pair[0], 0)
            _check_param(f"b_{i}", pair[1], 1)
        object.__setattr__(self, "terms", tuple((int(a), int(b)) for a, b in pairs))

    @property
    def min_initial_conditions(self) -> int:
        return max(b for _, b in self.terms)

    def to_dict(self) -> dict:
        return {"family": self.family, "terms": [list(p) for p in self.terms]}

    def __str__(self):
        inner = ", ".join(f"({a},{b})" for a, b in self.terms)
        return f"general([{inner}])"


RecursionSpec = Union[Conway, ConwayVariant, Conolly, GeneralConolly]

_FAMILIES = {cls.family: cls for cls in (Conway, ConwayVariant, Conolly, GeneralConolly)}


def spec_from_dict(data: dict) -> RecursionSpec:
    """Inverse of ``spec.to_dict()``."""
    data = dict(data)
    try:
        cls = _FAMILIES[data.pop("family")]
    except KeyError as exc:
        raise SpecError(f"unknown or missing recursion family in {data!r}") from exc
    try:
        return cls(**data)
    except TypeError as exc:
        raise SpecError(str(exc)) from exc


@dataclass(frozen=True)
class InnerComposition:
    """The ``step``-th application of a k-fold composition had no valid argument."""

    step: int


@dataclass(frozen=True)
class OuterArgument:
    """Argument of summand ``term_index`` (1-based) was out of bounds."""

    term_index: int


@dataclass(frozen=True)
class Diagnostic:
    """Why term ``n`` could not be computed.

    ``required_interval`` is an open interval ``(low, high)``; the failure
    means ``computed_value`` does not satisfy ``low < computed_value < high``.
    For Conway recursions the checked quantity is ``A^k(n-b)`` against
    ``(0, n-a)``; elsewhere it is the offending argument itself against
    ``(0, n)``.
    """

    n: int
    role: Union[InnerComposition, OuterArgument]
    computed_value: int
    required_interval: tuple[int, int]
    expression: str = ""

    @property
    def interval_empty(self) -> bool:
        low, high = self.required_interval
        return high - low <= 1

    def to_dict(self) -> dict:
        if isinstance(self.role, InnerComposition):
            role = {"kind": "inner_composition", "step": self.role.step}
        else:
            role = {"kind": "outer_argument", "term_index": self.role.term_index}
        return {
            "n": self.n,
            "role": role,
            "computed_value": self.computed_value,
            "required_interval": list(self.required_interval),
            "expression": self.expression,
        }

    def __str__(self):
        low, high = self.required_interval
        what = self.expression or "argument"
        if isinstance(self.role, InnerComposition):
            where = f"composition step {self.role.step}"
        else:
            where = f"summand {self.role.term_index}"
        msg = f"term {self.n} undefined: {what} = {self.computed_value} ({where}) not in ({low}, {high})"
        if self.interval_empty:
            msg += " [interval empty]"
        return msg


@dataclass(frozen=True)
class EvalTrace:
    """Full evaluation of one recursively computed term.

    ``composition_chains`` holds one chain per inner lookup, each a tuple of
    ``(depth, argument, value)``; Conolly-type summands have depth-1 chains.
    """

    n: int
    composition_chains: tuple[tuple[tuple[int, int, int], ...], ...]
    summand_arguments: tuple[tuple[int, int], ...]
    result: int

    @property
    def composition_chain(self) -> tuple[tuple[int, int, int], ...]:
        return self.composition_chains[0]


# Fast kernels: append terms to ``t`` (index 0 is padding) until ``target``
# or until the next term fails; the slow path in ``_evaluate`` then explains.

def _run_conway(t, target, k, a, b):
    append = t.append
    inner = range(k - 1)
    try:
        for n in range(len(t), target + 1):
            v = t[n - b]
            for _ in inner:
                v = t[v]
            if v >= n - a:
                return
            value = t[n - a - v] + t[v]
            if value > MAX_TERM:
                return
            append(value)
    except IndexError:
        return


def _run_variant(t, target, k, a, b, c):
    append = t.append
    inner = range(k - 1)
    try:
        for n in range(len(t), target + 1):
            v = t[n - b]
            w = t[n - c]
            for _ in inner:
                v = t[v]
                w = t[w]
            x = n - a - v
            if x < 1 or w >= n:
                return
            value = t[x] + t[w]
            if value > MAX_TERM:
                return
            append(value)
    except IndexError:
        return


def _run_conolly(t, target, s):
    append = t.append
    for n in range(len(t), target + 1):
        x1 = n - s - t[n - 1]
        x2 = n - s - 2 - t[n - 3]
        if x1 < 1 or x2 < 1:
            return
        value = t[x1] + t[x2]
        if value > MAX_TERM:
            return
        append(value)


def _run_general(t, target, pairs):
    append = t.append
    for n in range(len(t), target + 1):
        value = 0
        for a, b in pairs:
            x = n - a - t[n - b]
            if x < 1:
                return
            value += t[x]
        if value > MAX_TERM:
            return
        append(value)


class SequenceState:
    """A recursion spec plus the exact term table computed so far.

    Indexing is 1-based: ``state[1]`` is the first initial condition.  The
    state is single-writer; once halted it never grows again.
    """

    def __init__(self, spec: RecursionSpec, initial_conditions: Iterable[int]):
        ics = list(initial_conditions)
        if not ics:
            raise EmptyInitialConditions()
        for i, v in enumerate(ics, 1):
            if isinstance(v, bool) or not isinstance(v, numbers.Integral) or v < 1:
                raise NonPositiveInitialCondition(i, v)
            if v > MAX_TERM:
                raise ArithmeticOverflow(i, int(v))
        need = spec.min_initial_conditions
        if len(ics) < need:
            raise TooFewInitialConditions(need, len(ics))
        self.spec = spec
        self.ic_len = len(ics)
        self.diagnostic: Diagnostic | None = None
        self._t = [0] + [int(v) for v in ics]

    def __len__(self):
        return len(self._t) - 1

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= len(self):
            raise TermIndexError(f"index {n} outside [1, {len(self)}]")
        return self._t[n]

    def __repr__(self):
        status = "active" if self.is_active else f"halted at {self.diagnostic.n}"
        return f"SequenceState({self.spec}, len={len(self)}, ic_len={self.ic_len}, {status})"

    @property
    def is_active(self) -> bool:
        return self.diagnostic is None

    @property
    def initial_conditions(self) -> list[int]:
        return self._t[1 : self.ic_len + 1]

    def values(self, low: int = 1, high: int | None = None) -> list[int]:
        """Terms ``low..high`` inclusive (default: all of them)."""
        high = len(self) if high is None else high
        if not 1 <= low <= high + 1 or high > len(self):
            raise TermIndexError(f"range [{low}, {high}] outside [1, {len(self)}]")
        return self._t[low : high + 1]

    def array(self) -> np.ndarray:
        """Terms as int64 with a zero pad at position 0, so ``arr[n]`` is term n."""
        return np.array(self._t, dtype=np.int64)

    def _chain(self, m: int, depth: int, limit: int, n: int, expr: str):
        t = self._t
        if not 1 <= m <= limit:
            raise UndefinedTerm(Diagnostic(n, InnerComposition(1), m, (0, limit + 1), expr))
        chain = []
        arg = m
        for step in range(1, depth + 1):
            value = t[arg]
            chain.append((step, arg, value))
            arg = value
            if step < depth and not 1 <= arg <= limit:
                raise UndefinedTerm(
                    Diagnostic(n, InnerComposition(step + 1), arg, (0, limit + 1), expr)
                )
        return tuple(chain)

    def _evaluate(self, n: int):
        """Evaluate the recursion at ``n`` using only terms ``1..n-1``."""
        spec, t, limit = self.spec, self._t, n - 1
        if isinstance(spec, Conway):
            chain = self._chain(n - spec.b, spec.k, limit, n, "A^k(n-b)")
            v = chain[-1][2]
            if not 0 < v < n - spec.a:
                raise UndefinedTerm(
                    Diagnostic(n, OuterArgument(1), v, (0, n - spec.a), "A^k(n-b)")
                )
            x = n - spec.a - v
            chains = (chain,)
            summands = ((x, t[x]), (v, t[v]))
        elif isinstance(spec, ConwayVariant):
            chain_b = self._chain(n - spec.b, spec.k, limit, n, "A^k(n-b)")
            chain_c = self._chain(n - spec.c, spec.k, limit, n, "A^k(n-c)")
            x = n - spec.a - chain_b[-1][2]
            w = chain_c[-1][2]
            if not 0 < x < n:
                raise UndefinedTerm(Diagnostic(n, OuterArgument(1), x, (0, n), "n-a-A^k(n-b)"))
            if not 0 < w < n:
                raise UndefinedTerm(Diagnostic(n, OuterArgument(2), w, (0, n), "A^k(n-c)"))
            chains = (chain_b, chain_c)
            summands = ((x, t[x]), (w, t[w]))
        else:
            chains, args = [], []
            for i, (a, b) in enumerate(spec.terms, 1):
                chain = self._chain(n - b, 1, limit, n, f"C(n-{b})")
                x = n - a - chain[-1][2]
                if not 0 < x < n:
                    raise UndefinedTerm(
                        Diagnostic(n, OuterArgument(i), x, (0, n), f"n-{a}-C(n-{b})")
                    )
                chains.append(chain)
                args.append((x, t[x]))
            chains, summands = tuple(chains), tuple(args)
        return sum(v for _, v in summands), chains, summands

    def step(self) -> int:
        """Compute and append term ``len + 1``.

        Raises :class:`UndefinedTerm` (and halts the state) when an argument
        escapes ``[1, n-1]``; calling again on a halted state re-raises the
        same diagnostic.
        """
        if self.diagnostic is not None:
            raise UndefinedTerm(self.diagnostic)
        n = len(self._t)
        try:
            value = self._evaluate(n)[0]
        except UndefinedTerm as exc:
            self.diagnostic = exc.diagnostic
            raise
        if value > MAX_TERM:
            raise ArithmeticOverflow(n, value)
        self._t.append(value)
        return value

    def extend(self, target_len: int) -> SequenceState:
        """Grow to ``target_len`` terms or until the recursion halts.

        Partial progress is kept on halt; :class:`ArithmeticOverflow` is the
        only exception that escapes.
        """
        spec, t = self.spec, self._t
        while self.diagnostic is None and len(self) < target_len:
            if isinstance(spec, Conway):
                _run_conway(t, target_len, spec.k, spec.a, spec.b)
            elif isinstance(spec, ConwayVariant):
                _run_variant(t, target_len, spec.k, spec.a, spec.b, spec.c)
            elif isinstance(spec, Conolly):
                _run_conolly(t, target_len, spec.s)
            else:
                _run_general(t, target_len, spec.terms)
            if len(self) < target_len:
                try:
                    self.step()
                except UndefinedTerm:
                    break
        return self

    def compose(self, depth: int, m: int) -> int:
        """``A^depth(m)``: apply the table as a function ``depth`` times."""
        if depth < 1:
            raise ValueError(f"depth must be >= 1, got {depth}")
        if not 1 <= m <= len(self):
            raise TermIndexError(f"index {m} outside [1, {len(self)}]")
        return self._chain(m, depth, len(self), len(self) + 1, f"A^{depth}({m})")[-1][2]

    def delta(self, n: int) -> int:
        """Forward difference ``terms[n] - terms[n-1]``."""
        if not 2 <= n <= len(self):
            raise TermIndexError(f"delta index {n} outside [2, {len(self)}]")
        return self._t[n] - self._t[n - 1]

    def trace(self, n: int) -> EvalTrace:
        if not 1 <= n <= len(self):
            raise TermIndexError(f"index {n} outside [1, {len(self)}]")
        if n <= self.ic_len:
            raise TraceOfInitialCondition(f"term {n} is an initial condition")
        value, chains, summands = self._evaluate(n)
        return EvalTrace(n, chains, summands, value)


def new_state(spec: RecursionSpec, initial_conditions: Iterable[int]) -> SequenceState:
    return SequenceState(spec, initial_conditions)


def iterate_composition(state: SequenceState, depth: int, m: int) -> int:
    return state.compose(depth, m)


def generate(spec: RecursionSpec, initial_conditions: Iterable[int], n: int) -> SequenceState:
    """Build a state and extend it to ``n`` terms (or until it halts)."""
    return SequenceState(spec, initial_conditions).extend(n)
