"""Acceptance gate: one test per criterion, each at its stated tolerance.

The theorem checks here are empirical.  They run finite horizons on a
desk-scale machine and stand in for results that hold for all n.  A
summary line per criterion is printed at the end of the pytest run.
"""

import random
import time
from fractions import Fraction

import pytest

from conftest import TABLE_1
from metafib import Conolly, Conway, ConwayVariant, GeneralConolly, generate, new_state
from metafib.analysis import corollary_bound_check, phi_k, ratio_report
from metafib.cli import run
from metafib.properties import (
    check_no_consecutive_increments,
    check_slow_growth,
    check_split_law,
    check_theorem_en,
    growth_report,
)
from metafib.validators import validate_conolly, validate_conway
from naive import naive_terms, spec_family_params

CONOLLY_HORIZON = 10**6
CONOLLY_CONFIGS = [(s, r) for s in range(5) for r in range(3, 9)]


def test_criterion_1():
    """Table 1 reproduced exactly in under a second."""
    t0 = time.perf_counter()
    values = generate(Conway(2, 0, 1), [1, 1], 22).values()
    elapsed = time.perf_counter() - t0
    assert values == TABLE_1
    assert elapsed < 1.0


def test_criterion_2():
    """A(E_n) = E_(n-1) for k = 1..6 and every E_n <= 10^6, with both induction hypotheses."""
    t0 = time.perf_counter()
    for k in range(1, 7):
        res = check_theorem_en(k, 10**6)
        assert res.holds, (k, res.first_violation)
        assert res.extras["hypothesis2_holds"], k
        assert res.extras["hypothesis3_holds"], k
        assert all(r.e_n <= 10**6 for r in res.extras["records"])
    assert time.perf_counter() - t0 < 30.0


def _conway_grid():
    for k in range(1, 5):
        for b in range(1, 5):
            for a in range(0, b):
                for length in range(b, b + 3):
                    yield Conway(k, a, b), [1] * length


def test_criterion_3():
    """Sufficient conditions with b > a: validator passes; slow and unbounded to 10^5."""
    failures = []
    for spec, ics in _conway_grid():
        report = validate_conway(spec, ics)
        state = generate(spec, ics, 10**5)
        checkpoints = growth_report(state, [10**3, 10**4, 10**5]) if len(state) == 10**5 else []
        values = [v for _, v in checkpoints]
        ok = (
            report.overall
            and state.is_active
            and check_slow_growth(state).holds
            and len(values) == 3
            and values[0] < values[1] < values[2]
        )
        if not ok:
            failures.append((str(spec), len(ics), report.failed, state.diagnostic))
    assert not failures, failures


@pytest.fixture(scope="module")
def conolly_runs():
    """Per-configuration results for the shifted Conolly grid, plus total runtime.

    States are discarded after measuring to keep memory flat.
    """
    t0 = time.perf_counter()
    out = {}
    for s, r in CONOLLY_CONFIGS:
        ics = [1] * r
        state = generate(Conolly(s), ics, CONOLLY_HORIZON)
        entry = {
            "validator": validate_conolly(Conolly(s), ics),
            "length": len(state),
            "diagnostic": state.diagnostic,
        }
        if len(state) >= 3:
            entry["slow"] = check_slow_growth(state)
            entry["noconsec"] = check_no_consecutive_increments(state)
        if len(state) > r:
            entry["split"] = check_split_law(state, (r + 1, len(state)))
        if len(state) == CONOLLY_HORIZON:
            entry["bound"] = corollary_bound_check(state, (10**3, CONOLLY_HORIZON))
            entry["final_ratio"] = Fraction(state[CONOLLY_HORIZON], CONOLLY_HORIZON)
        out[(s, r)] = entry
        del state
    return out, time.perf_counter() - t0


def test_criterion_4(conolly_runs):
    """Sufficient conditions for the shifted Conolly recursion, s = 0..4, all-ones r = 3..8, to 10^6.

    Checks the validator, slow growth, no consecutive increments and the
    split law at every n > r.  All-ones initial conditions shorter than
    s + 3 cannot produce C(r+1) (its first summand needs C(r - s - 2)), so
    those configurations halt at n = r + 1 and fail here by construction.
    """
    runs, elapsed = conolly_runs
    failures = []
    for (s, r), e in runs.items():
        problems = []
        if not e["validator"].overall:
            problems.append(f"validator failed {e['validator'].failed}")
        if e["length"] < CONOLLY_HORIZON:
            problems.append(f"halted at n={e['diagnostic'].n}")
        for key in ("slow", "noconsec", "split"):
            if key in e and not e[key].holds:
                problems.append(f"{key} violated at {e[key].first_violation}")
        if problems:
            failures.append(((s, r), problems))
    assert elapsed < 60.0, elapsed
    assert not failures, f"{len(failures)} of {len(runs)} configurations failed: {failures}"


def test_criterion_5_bound(conolly_runs):
    """max C(n)/n on [10^3, 10^6] is at most 1/2 + (C(1) + 2)/10^3 for every configuration of criterion 4."""
    runs, _ = conolly_runs
    failures = []
    for (s, r), e in runs.items():
        if "bound" not in e:
            failures.append(((s, r), f"no terms past n={e['length']}"))
            continue
        cb = e["bound"]
        assert cb.slack == Fraction(1 + 2, 10**3)
        if not cb.max_ratio <= Fraction(1, 2) + cb.slack:
            failures.append(((s, r), float(cb.max_ratio)))
    assert not failures, f"{len(failures)} of {len(runs)} configurations failed: {failures}"


def test_criterion_5_limit(conolly_runs):
    """|C(10^6)/10^6 - 1/2| < 10^-3 for s = 0 and all-ones length 3."""
    runs, _ = conolly_runs
    assert abs(runs[(0, 3)]["final_ratio"] - Fraction(1, 2)) < Fraction(1, 1000)


def test_criterion_6():
    """|A(2^20)/2^20 - 1/2| < 0.01 for the k = 1 Conway recursion.

    The limit itself is a theorem with no rate; a tolerance of 0.01 at
    n = 2^20 is a desk-scale surrogate for it.
    """
    n = 2**20
    state = generate(Conway(1, 0, 1), [1, 1], n)
    assert abs(state[n] / n - 0.5) < 0.01


def _fraction_bisect_golden(iterations=80):
    lo, hi = Fraction(1), Fraction(2)
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if mid * mid - mid - 1 > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def test_criterion_7():
    """Dominant characteristic roots for k = 1..10."""
    for k in range(1, 11):
        x = phi_k(k, 1e-12)
        assert abs(x**k - x ** (k - 1) - 1) < 1e-10, k
    assert phi_k(1, 1e-12) == 2.0
    assert abs(phi_k(2, 1e-12) - float(_fraction_bisect_golden())) < 1e-10


def _random_spec(rng, family):
    if family == "conway":
        return Conway(rng.randint(1, 4), rng.randint(0, 3), rng.randint(1, 4))
    if family == "variant":
        return ConwayVariant(rng.randint(1, 3), rng.randint(0, 3), rng.randint(1, 4), rng.randint(1, 4))
    if family == "conolly":
        return Conolly(rng.randint(0, 4))
    terms = tuple((rng.randint(0, 3), rng.randint(1, 4)) for _ in range(rng.randint(1, 3)))
    return GeneralConolly(terms)


def test_criterion_8():
    """Engine vs naive reference on 50 seeded random (spec, ics) pairs, n <= 60."""
    rng = random.Random(20260)
    families = ["conway", "variant", "conolly", "general"]
    mismatches = []
    undefined_seen = 0
    for i in range(50):
        spec = _random_spec(rng, families[i % 4])
        length = rng.randint(spec.min_initial_conditions, spec.min_initial_conditions + 4)
        ics = [rng.choice([1, 1, 1, 2, 3]) for _ in range(length)]
        state = generate(spec, ics, 60)
        family, params = spec_family_params(spec)
        expected, first_undefined = naive_terms(family, params, ics, 60)
        got_undefined = None if state.is_active else state.diagnostic.n
        undefined_seen += first_undefined is not None
        if state.values() != expected or got_undefined != first_undefined:
            mismatches.append((str(spec), ics))
    assert not mismatches, mismatches
    assert 0 < undefined_seen < 50


def test_criterion_9():
    """Negative paths and the CLI exit-code contract."""
    assert "I.c A(1)=1" in validate_conway(Conway(2, 0, 1), [2, 2]).failed
    conolly = validate_conolly(Conolly(2), [1, 2, 3])
    assert any(name.startswith("II ") for name in conolly.failed)
    state = new_state(Conway(1, 5, 1), [1]).extend(10)
    assert state.diagnostic.n == 2 and state.diagnostic.interval_empty

    table1 = ["conway", "-k", "2", "-a", "0", "-b", "1", "--ics", "1,1"]
    assert run(["gen", *table1, "-n", "22"])[0] == 0
    assert run(["gen", "conway", "-k", "0", "-a", "0", "-b", "1", "--ics", "1,1", "-n", "5"])[0] == 1
    assert run(["gen", "conway", "-k", "1", "-a", "5", "-b", "1", "--ics", "1", "-n", "5"])[0] == 2
    assert run(["check", "noconsec", *table1, "-n", "22"])[0] == 3
    assert run(["validate", "conolly", "-s", "2", "--ics", "1,2,3"])[0] == 3


def test_criterion_10():
    """Ratio reports for k >= 2 are marked descriptive only; no convergence is asserted."""
    for k in range(2, 6):
        rep = ratio_report(generate(Conway(k, 0, 1), [1, 1], 10**4), reference="phi")
        assert rep.descriptive_only, k
        assert rep.to_dict()["descriptive_only"] is True
