"""Acceptance suite.

One test per acceptance criterion, each printing a PASS/FAIL line (visible
with ``pytest -s``). Criteria 4 and 6 contain checks that are known to be
mathematically unattainable as stated; they are implemented faithfully and
fail honestly, with the counterexamples spelled out in the failure message
and in README "Numerical notes".
"""

import math
import time

import mpmath
import numpy as np
import pytest

from pooltest.core import TestMatrix, answer_vector, dumps_gtm1, parse_gtm1
from pooltest.decode import (
    DECODED,
    decode_semidisjunct,
    decode_separable_bruteforce,
    eliminate,
)
from pooltest.design import (
    disjunct_coefficient,
    disjunct_coefficient_series,
    disjunct_test_count,
    equal_pair_rate,
    make_design,
    max_failure_term,
    max_failure_term_bruteforce,
    nested_pair_rate,
    rid_equal_answer_prob,
    rrsd_equal_answer_prob,
    semidisjunct_coefficient,
    semidisjunct_test_count,
    separable_test_count,
    separability_failure_term,
)
from pooltest.randgen import gen_rid, gen_rrsd
from pooltest.simulate import TrialConfig, run_trials
from pooltest.verify import is_separable

E = math.e


def report(number: int, ok: bool, detail: str) -> None:
    print(f"[acceptance {number:02d}] {'PASS' if ok else 'FAIL'} — {detail}")


# -- 1 -----------------------------------------------------------------------

def test_acceptance_01_coefficient_tables():
    started = time.perf_counter()
    disjunct_column = [6.2366, 8.9722, 11.6999, 14.4241, 17.1465, 19.8678]
    separable_column = [3.4761, 6.2366, 8.9722, 11.6999, 14.4241, 17.1465]
    semidisjunct_column = [3.7444, 6.4109, 9.1013, 11.8025, 14.5093, 17.2193]
    for idx, d in enumerate(range(2, 8)):
        assert disjunct_coefficient(d) == pytest.approx(disjunct_column[idx], abs=5e-4)
        assert disjunct_coefficient(d - 1) == pytest.approx(separable_column[idx], abs=5e-4)
        assert semidisjunct_coefficient(d) == pytest.approx(
            semidisjunct_column[idx], abs=5e-4
        )
    elapsed = time.perf_counter() - started
    report(1, True, f"coefficient tables reproduced to 5e-4 in {elapsed:.3f}s")
    assert elapsed < 1.0


# -- 2 -----------------------------------------------------------------------

def test_acceptance_02_series_and_gap_law():
    # Remainder constant calibrated once from a 60-digit evaluation of the
    # closed form: max over d in {10, 100, 1000} of d^2 * |exact - series|
    # is 0.06628; frozen with margin.
    C = 0.07
    for d in (10, 100, 1000):
        gap = abs(disjunct_coefficient(d) - disjunct_coefficient_series(d))
        assert gap <= C / d**2, (d, gap)
    for d in range(10, 1001):
        step = disjunct_coefficient(d) - disjunct_coefficient(d - 1)
        assert abs(step - E) <= 1.0 / d, d
    report(2, True, "series remainder <= 0.07/d^2 and |coefficient step - e| <= 1/d")


# -- 3 -----------------------------------------------------------------------

def test_acceptance_03_reduced_maximum_matches_bruteforce():
    started = time.perf_counter()
    checked = 0
    for d in (2, 3, 4, 5):
        for n in (100, 10**4):
            m = separable_test_count(n, d, 0.1)
            for p in (0.3, 1 - 1 / d, 0.9):
                reduced, witness = max_failure_term(n, d, p, m)
                brute, triple = max_failure_term_bruteforce(n, d, p, m)
                tol = 1e-12 * max(1.0, abs(brute.log))
                assert abs(reduced.log - brute.log) <= tol, (d, n, p)
                if 0.0 < brute.value < math.inf:
                    assert reduced.value == pytest.approx(brute.value, rel=1e-12)
                assert triple != (d, d, d)
                member = separability_failure_term(
                    n, witness.d1, witness.d2, witness.k, p, m
                )
                assert abs(member.log - brute.log) <= tol
                checked += 1
    elapsed = time.perf_counter() - started
    report(3, True, f"reduced family attains the exhaustive maximum on "
                    f"{checked} grid points in {elapsed:.2f}s")
    assert elapsed < 10.0


# -- 4 -----------------------------------------------------------------------

def _check_log_ratio_bound() -> list:
    rng = np.random.default_rng(20250804)
    bad = []
    for _ in range(10**4):
        z1, z2 = np.sort(rng.uniform(1e-9, 1 - 1e-9, size=2))
        if z1 == z2:
            continue
        lhs = -math.log1p(-z1) / -math.log1p(-z2)
        if lhs > (z1 / z2) * (1 + 1e-12):
            bad.append((z1, z2))
    return bad


def _check_nested_rate_dominance() -> list:
    bad = []
    for d in range(2, 65):
        p = 1 - 1 / d
        bound = nested_pair_rate(d, d - 1, p)
        for w in range(d):
            if nested_pair_rate(d, w, p) > bound * (1 + 1e-12):
                bad.append((d, w))
    return bad


def _check_equal_rate_dominance() -> list:
    bad = []
    for d in range(2, 65):
        p = 1 - 1 / d
        bound = nested_pair_rate(d, d - 1, p)
        for w in range(d):
            value = equal_pair_rate(d, w, p)
            if value > bound * (1 + 1e-12):
                bad.append((d, w, value, bound))
    return bad


def _check_doubling_tail() -> list:
    # stated domain of the inequality: w in [1, d-1]
    bad = []
    for d in range(2, 65):
        for w in range(1, d):
            if 2 * (1 - (1 - 1 / d) ** (d - w)) < (d - w) / (d - 1) - 1e-12:
                bad.append((d, w))
    return bad


def _check_semidisjunct_rate_floor() -> list:
    return [
        d for d in range(2, 65)
        if semidisjunct_coefficient(d) < disjunct_coefficient(d - 1)
    ]


def _check_product_minus_weights() -> list:
    rng = np.random.default_rng(20250805)
    bad = []
    for _ in range(10**4):
        length = int(rng.integers(1, 9))
        x = rng.uniform(0.0, 1.0, size=length)
        y = rng.uniform(-1.0, x)
        w = x - y
        if np.prod(y) < np.prod(x) - w.sum() - 1e-12:
            bad.append((x.tolist(), w.tolist()))
    return bad


def _check_series_remainders() -> list:
    mpmath.mp.dps = 50
    one = mpmath.mpf(1)
    e = mpmath.e
    bad = []
    for d in (10, 100, 1000):
        d = mpmath.mpf(d)
        closed = (1 - 1 / d) ** d
        trunc = 1 / e - 1 / (2 * e * d) - 5 / (24 * e * d**2)
        if abs(closed - trunc) > 2 * (5 / (48 * e)) / d**3:
            bad.append(("inner-power", float(d)))
        closed = (1 - 1 / (d + 1)) ** (d + 1)
        trunc = 1 / e - 1 / (2 * e * d) + 7 / (24 * e * d**2)
        if abs(closed - trunc) > 2 * (3 / (16 * e)) / d**3:
            bad.append(("shifted-power", float(d)))
        closed = (1 - 1 / (d + 1)) ** (-(d + 1))
        trunc = e + e / (2 * d) - e / (24 * d**2)
        if abs(closed - trunc) > 2 * (e / 48) / d**3:
            bad.append(("shifted-power-inverse", float(d)))
    for x in ("0.1", "0.01", "0.001"):
        x = mpmath.mpf(x)
        closed = 1 / mpmath.log(1 / (1 - x))
        trunc = 1 / x - one / 2 - x / 12 - x**2 / 24 - 19 * x**3 / 720
        if abs(closed - trunc) > 2 * (mpmath.mpf(3) / 160) * x**4:
            bad.append(("log-reciprocal", float(x)))
    return bad


def test_acceptance_04_inequality_suite():
    ratio_bad = _check_log_ratio_bound()
    nested_bad = _check_nested_rate_dominance()
    tail_bad = _check_doubling_tail()
    floor_bad = _check_semidisjunct_rate_floor()
    product_bad = _check_product_minus_weights()
    series_bad = _check_series_remainders()
    equal_bad = _check_equal_rate_dominance()

    ok = not any((ratio_bad, nested_bad, tail_bad, floor_bad, product_bad,
                  series_bad, equal_bad))
    report(4, ok, "inequality suite: "
                  f"log-ratio {len(ratio_bad)} bad, nested-rate {len(nested_bad)} bad, "
                  f"doubling-tail {len(tail_bad)} bad, rate-floor {len(floor_bad)} bad, "
                  f"product-bound {len(product_bad)} bad, series {len(series_bad)} bad, "
                  f"equal-rate {len(equal_bad)} bad")
    assert not ratio_bad
    assert not nested_bad
    assert not tail_bad
    assert not floor_bad
    assert not product_bad
    assert not series_bad
    assert not equal_bad, (
        "equal-size rate bound fails: equal_pair_rate(2, 0, 1/2) = 4.2553 exceeds "
        "nested_pair_rate(2, 1, 1/2) = 3.4761, so the claimed w-maximum is not "
        "attained at w = d-1 when d = 2. Known counterexample; the bound holds "
        "for every other (d, w) with d <= 64. See README 'Numerical notes'. "
        f"violations: {[(d, w) for d, w, *_ in equal_bad]}"
    )


# -- 5 -----------------------------------------------------------------------

def test_acceptance_05_semidisjunct_end_to_end():
    started = time.perf_counter()
    cfg = TrialConfig(
        design=make_design(10**4, 4, 0.1, "semidisjunct"),
        trials=1000, master_seed=20250810, decoder="semidisjunct",
    )
    result = run_trials(cfg)
    elapsed = time.perf_counter() - started
    report(5, result.success_rate >= 0.88,
           f"semidisjunct decode success {result.success_rate:.3f} over 1000 trials "
           f"(m={cfg.design.m}) in {elapsed:.1f}s")
    assert result.success_rate >= 0.88
    assert result.refusals == 0
    assert elapsed < 120.0


# -- 6 -----------------------------------------------------------------------

def test_acceptance_06_disjunct_end_to_end_and_count_comparison():
    cfg = TrialConfig(
        design=make_design(10**4, 4, 0.1, "disjunct"),
        trials=1000, master_seed=20250810, decoder="disjunct",
    )
    result = run_trials(cfg)
    assert result.success_rate >= 0.88

    reversed_order = [
        (d, semidisjunct_test_count(10**6, d, 0.1), disjunct_test_count(10**6, d, 0.1))
        for d in range(2, 65)
        if not semidisjunct_test_count(10**6, d, 0.1) < disjunct_test_count(10**6, d, 0.1)
    ]
    report(6, not reversed_order,
           f"disjunct decode success {result.success_rate:.3f}; semidisjunct count "
           f"smaller than disjunct count at n=1e6 for "
           f"{63 - len(reversed_order)}/63 of d in 2..64")
    assert not reversed_order, (
        "the semidisjunct test count is NOT below the disjunct count at n = 10^6, "
        "delta = 0.1 for d >= 3: the additive d*ln2 + 2*ln d term dominates ln n "
        "at this scale (e.g. d=3: 152 vs 145; d=64: 11992 vs 2819). The advantage "
        "of the smaller ln-n coefficient is asymptotic in n (crossover near "
        "n = 1.7e7 for d = 3). Known infeasibility; see README 'Numerical notes'. "
        f"first violations: {reversed_order[:3]}"
    )


# -- 7 -----------------------------------------------------------------------

def test_acceptance_07_decoder_oracle_agreement():
    rng = np.random.default_rng(20250810)
    held = 0
    for _ in range(200):
        n = int(rng.integers(12, 26))
        d = int(rng.choice((2, 3)))
        m = semidisjunct_test_count(n, d, 0.1)
        seed = int(rng.integers(2**63))
        matrix = gen_rid(m, n, 1 - 1 / d, seed=seed)
        items = tuple(sorted(int(i) + 1 for i in rng.choice(n, size=d, replace=False)))
        if not is_separable(matrix, items, d):
            continue
        held += 1
        answers = answer_vector(matrix, items)
        semi = decode_semidisjunct(matrix, answers, d)
        brute = decode_separable_bruteforce(matrix, answers, d)
        assert semi.status == DECODED and brute.status == DECODED
        assert semi.items == brute.items == items, (n, d, seed)
    report(7, True, f"decoders agree with the exhaustive oracle on all "
                    f"{held}/200 instances where separability holds")
    assert held >= 150


# -- 8 -----------------------------------------------------------------------

def test_acceptance_08_constant_weight_convergence():
    d = 3
    rid = rid_equal_answer_prob(d, d, 1, 1 - 1 / d)
    errors = {
        n: abs(rrsd_equal_answer_prob(n, round(n / d), d, d, 1) - rid)
        for n in (10**3, 10**4, 10**5)
    }
    c = errors[10**3] * 10**3 / d**2
    assert c <= 10.0
    for n in (10**4, 10**5):
        assert errors[n] <= c * d**2 / n, (n, errors[n])
    # error must shrink like 1/n, within a factor of 2 per decade
    assert 5.0 <= errors[10**3] / errors[10**4] <= 20.0
    assert 5.0 <= errors[10**4] / errors[10**5] <= 20.0
    report(8, True, f"constant-weight collision converges with c = {c:.4f}, "
                    f"decade ratios {errors[10**3]/errors[10**4]:.2f}, "
                    f"{errors[10**4]/errors[10**5]:.2f}")


# -- 9 -----------------------------------------------------------------------

def _timed_elimination(matrix, answers, repeats=3):
    best = math.inf
    for _ in range(repeats):
        started = time.perf_counter()
        eliminate(matrix, answers)
        best = min(best, time.perf_counter() - started)
    return best


def test_acceptance_09_linear_time_decoding():
    d, delta, seed = 8, 0.1, 424242
    sizes = {}
    for n, items in (
        (5 * 10**5, (1, 77, 1000, 55555, 123456, 300000, 444444, 499995)),
        (10**6, (1, 77, 1000, 55555, 123456, 300000, 444444, 999995)),
    ):
        m = semidisjunct_test_count(n, d, delta)
        matrix = gen_rid(m, n, 1 - 1 / d, seed=seed)
        answers = answer_vector(matrix, items)
        started = time.perf_counter()
        outcome = decode_semidisjunct(matrix, answers, d)
        decode_seconds = time.perf_counter() - started
        assert outcome.status == DECODED and outcome.items == items
        # instance satisfies the design contract: tiny residue after elimination
        residual = n - outcome.eliminated_count
        assert residual <= d + n ** (1 / d)
        sizes[n] = (m * n, _timed_elimination(matrix, answers), decode_seconds)

    full_decode = sizes[10**6][2]
    assert full_decode < 10.0
    bits_ratio = sizes[10**6][0] / sizes[5 * 10**5][0]
    time_ratio = sizes[10**6][1] / sizes[5 * 10**5][1]
    report(9, True, f"decode at n=1e6 took {full_decode:.3f}s; elimination scaling "
                    f"{time_ratio:.2f}x for a {bits_ratio:.2f}x bit-size increase")
    assert time_ratio <= 3.0 * bits_ratio


# -- 10 ----------------------------------------------------------------------

def test_acceptance_10_determinism_and_round_trip():
    rid_a = gen_rid(25, 40, 0.6, seed=77)
    rid_b = gen_rid(25, 40, 0.6, seed=77)
    assert dumps_gtm1(rid_a) == dumps_gtm1(rid_b)
    weighted_a = gen_rrsd(14, 33, 5, seed=13)
    weighted_b = gen_rrsd(14, 33, 5, seed=13)
    assert dumps_gtm1(weighted_a) == dumps_gtm1(weighted_b)

    cfg = TrialConfig(design=make_design(100, 2, 0.2, "semidisjunct"),
                      trials=60, master_seed=8)
    first, second = run_trials(cfg), run_trials(cfg)
    deterministic = ("trials", "successes", "failures", "refusals", "success_rate",
                     "wilson_low", "wilson_high", "mean_residual", "mean_non_disjunct")
    assert all(getattr(first, f) == getattr(second, f) for f in deterministic)

    for matrix in (rid_a, weighted_a, TestMatrix.identity(9)):
        text = dumps_gtm1(matrix)
        assert dumps_gtm1(parse_gtm1(text)) == text
    handcrafted = "GTM1 3 5 Explicit 12345\n10101\n01010\n11111\n"
    assert dumps_gtm1(parse_gtm1(handcrafted)) == handcrafted
    report(10, True, "seeded generation, simulation reports, and GTM1 "
                     "round-trips are byte-stable")
