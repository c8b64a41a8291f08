"""End-to-end acceptance battery.

Each test evaluates one headline claim at its stated tolerance and files
one PASS/FAIL line into the terminal summary (see conftest), so a full
run doubles as a reproduction report.

Criterion 4's particle-loss half is an expected failure, kept visibly
red rather than weakened: at n=30 the Hardy inequality tolerates fewer
lost particles than MABK for several k (k=1: Hardy m*=5 vs MABK m*=8).
For k=1 this is forced, not a tuning artifact — losing m of n particles
from the one-excitation state leaves the excitation mixture with
p = m/n on n_f = n−m parties, and the MABK excitation threshold
(→ 0.2741) exceeds Hardy's (→ 0.1889) at every n_f here, so MABK
necessarily survives more lost particles.  The ordering claim holds for
mid-range k but not "for every k".
"""

import math
import time

import pytest

from dickebell.bell import InequalityKind
from dickebell.crosscheck import (DEFAULT_SEED, check_lhv_bounds, run_all)
from dickebell.reproduce import (TABLE1_ANCHORS, W_HARDY_ANCHOR,
                                 W_MABK_ANCHOR, records_to_csv, run_sweep,
                                 run_target)
from dickebell.states import excitation_loss, make_pure, particle_loss
from dickebell.thresholds import threshold_particle, w_threshold_optimized

HARDY = InequalityKind.HARDY
MABK = InequalityKind.MABK


@pytest.fixture
def report(request):
    def _report(line: str) -> None:
        print(line)
        request.config._acceptance_lines.append(line)
    return _report


def test_criterion_1_table1(report):
    t0 = time.monotonic()
    records, checks = run_target("table1", jobs=1)
    elapsed = time.monotonic() - t0
    by_k = {r.k: r.threshold for r in records}
    dev = max(abs(by_k[k] - TABLE1_ANCHORS[k]) for k in range(1, 7))
    ok = all(c.passed for c in checks) and elapsed < 600
    report(f"{'PASS' if ok else 'FAIL'}  criterion 1: Hardy n=10^4 k=1..6 "
           f"thresholds within 0.005 of the six anchors "
           f"(max deviation {dev:.2g}, {elapsed:.0f}s < 600s)")
    assert all(c.passed for c in checks)
    assert elapsed < 600


def test_criterion_2_w_asymptotes(report):
    t0 = time.monotonic()
    hardy = w_threshold_optimized(10_000, HARDY).threshold
    mabk = w_threshold_optimized(1_000, MABK).threshold
    elapsed = time.monotonic() - t0
    dev_h = abs(hardy - W_HARDY_ANCHOR)
    dev_m = abs(mabk - W_MABK_ANCHOR)
    ok = dev_h <= 3e-3 and dev_m <= 3e-3 and elapsed < 300
    report(f"{'PASS' if ok else 'FAIL'}  criterion 2: W-state asymptotes "
           f"hardy(10^4)={hardy:.4f} (anchor 0.1889), "
           f"mabk(10^3)={mabk:.4f} (anchor 0.2741), "
           f"both within 0.003 ({elapsed:.0f}s < 300s)")
    assert dev_h <= 3e-3
    assert dev_m <= 3e-3
    assert elapsed < 300


def test_criterion_3_optimal_k_at_n100(report):
    t0 = time.monotonic()
    records, checks = run_target("fig2", jobs=1)
    elapsed = time.monotonic() - t0
    by_k = {r.k: r.threshold for r in records}
    best_k = max(sorted(by_k), key=lambda k: (by_k[k], -k))
    ok = all(c.passed for c in checks) and elapsed < 900
    report(f"{'PASS' if ok else 'FAIL'}  criterion 3: Hardy n=100 sweep "
           f"peaks at k={best_k} (want 5), peak {by_k[5]:.4f} > "
           f"k=50 value {by_k[50]:.4f} ({elapsed:.0f}s < 900s)")
    assert all(c.passed for c in checks)
    assert elapsed < 900


def test_criterion_4_excitation_ordering(report):
    records, checks = run_target("fig4", jobs=1)
    hardy = {r.k: r.threshold for r in records if r.inequality == "hardy"}
    mabk = {r.k: (r.threshold, r.flags) for r in records
            if r.inequality == "mabk"}
    clean = {k: v for k, (v, f) in mabk.items() if not f}
    worst = min((clean[k] - hardy[k] for k in clean), default=0.0)
    ok = all(c.passed for c in checks)
    report(f"{'PASS' if ok else 'FAIL'}  criterion 4 (excitation): n=30 "
           f"MABK >= Hardy threshold on all {len(clean)} unflagged k "
           f"(min margin {worst:.2g})")
    assert ok


def test_criterion_4_particle_ordering(report):
    hardy_m = {}
    mabk_m = {}
    for k in range(1, 16):
        hardy_m[k] = threshold_particle(30, k, HARDY).m_star
        mabk_m[k] = threshold_particle(30, k, MABK).m_star
    failing = sorted(k for k in hardy_m if hardy_m[k] < mabk_m[k])
    ok = not failing
    report(f"{'PASS' if ok else 'FAIL'}  criterion 4 (particle): n=30 "
           f"Hardy m* >= MABK m* for every k -- "
           + (f"fails at k={failing} (k=1: Hardy {hardy_m[1]} vs "
              f"MABK {mabk_m[1]})" if failing else "holds for k=1..15"))
    if failing:
        pytest.xfail(
            "at n=30 MABK tolerates more lost particles than Hardy at "
            f"k={failing}; for k=1 this is forced by the reduction of "
            "particle loss on the one-excitation state to the p=m/n "
            "excitation mixture on n-m parties, where the MABK threshold "
            "(0.2741 asymptote) exceeds the Hardy one (0.1889)")


def test_criterion_5_oracle_equivalence(report):
    t0 = time.monotonic()
    outcomes = run_all(max_n=8, pairs=50, seed=DEFAULT_SEED)
    elapsed = time.monotonic() - t0
    failed = [c.name for c in outcomes if not c.passed]
    ok = not failed and elapsed < 300
    report(f"{'PASS' if ok else 'FAIL'}  criterion 5: closed forms vs dense "
           f"oracle, n<=8, all k, 50 angle pairs: "
           f"{len(outcomes)} checks{', failing: ' + ', '.join(failed) if failed else ' all pass'} "
           f"({elapsed:.0f}s < 300s)")
    assert not failed
    assert elapsed < 300


def test_criterion_6_lhv_soundness(report):
    outcome = check_lhv_bounds(4)
    report(f"{'PASS' if outcome.passed else 'FAIL'}  criterion 6: exhaustive "
           f"LHV strategies n<=4 satisfy Hardy <= 0 and |MABK| <= 2^n with "
           f"both bounds attained exactly ({outcome.cases} strategies)")
    assert outcome.passed


def test_criterion_7_symmetry_and_sanity(report):
    problems = []

    # particle-loss k <-> n-k threshold equality, exact
    for n, k in ((8, 3), (9, 2), (10, 4)):
        a = threshold_particle(n, k, HARDY)
        b = threshold_particle(n, n - k, HARDY)
        if (a.m_star, a.threshold) != (b.m_star, b.threshold):
            problems.append(f"particle symmetry n={n} k={k}")

    # every W threshold stays under 1/3
    for n in (2, 5, 10, 50, 100, 1000):
        for kind in (HARDY, MABK):
            if w_threshold_optimized(n, kind).threshold >= 1 / 3 + 1e-6:
                problems.append(f"W bound n={n} {kind.value}")

    # loss-channel composition laws
    for n, k in ((6, 2), (9, 4), (20, 7)):
        for p, q in ((0.15, 0.3), (0.4, 0.25)):
            once = excitation_loss(make_pure(n, k), p + q - p * q)
            twice = excitation_loss(excitation_loss(make_pure(n, k), p), q)
            dev = max(abs(once.weight(l) - twice.weight(l))
                      for l in range(k + 1))
            if dev > 1e-12:
                problems.append(f"excitation composition n={n} k={k}")
        once = particle_loss(make_pure(n, k), 3)
        twice = particle_loss(particle_loss(make_pure(n, k), 1), 2)
        dev = max(abs(once.weight(l) - twice.weight(l)) for l in range(k + 1))
        if dev > 1e-12:
            problems.append(f"particle composition n={n} k={k}")

    # deterministic outputs are byte-identical across reruns and job counts
    first = run_sweep("excitation", HARDY, [6, 7], [1, 2], jobs=1)
    second = run_sweep("excitation", HARDY, [6, 7], [1, 2], jobs=2)
    if records_to_csv(first) != records_to_csv(second):
        problems.append("rerun determinism")

    ok = not problems
    report(f"{'PASS' if ok else 'FAIL'}  criterion 7: particle k<->n-k "
           f"equality, W thresholds < 1/3, composition laws at 1e-12, "
           f"byte-identical reruns"
           + (f" -- failing: {', '.join(problems)}" if problems else ""))
    assert not problems
