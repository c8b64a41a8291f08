"""Sweep execution, record serialization, and headline-result regeneration.

The batch layer used by the command-line front end: it dispatches
threshold computations over a worker pool, gathers them in a fixed order
(ascending n, then k, then model, then inequality) so parallelism never
changes the output, serializes the rows as CSV/JSON, and regenerates the
package's headline data sets (the k = 1..6 threshold table and the five
standard figure sweeps) together with pass/fail comparisons against
their anchor values.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .bell import InequalityKind
from .errors import DomainError
from .numerics import get_precision_mode, set_precision_mode
from .thresholds import (Method, ThresholdResult, threshold_excitation,
                         threshold_particle, w_threshold_optimized)

CSV_FIELDS = ("n", "k", "model", "inequality", "threshold",
              "alpha0", "alpha1", "method", "flags", "seconds")

#: anchor thresholds for the n = 10^4 excitation-loss table, tolerance 0.005
TABLE1_ANCHORS = {1: 0.1889, 2: 0.2599, 3: 0.2837, 4: 0.2956,
                  5: 0.2994, 6: 0.3017}
TABLE1_TOL = 5e-3

W_HARDY_ANCHOR = 0.1889    # Hardy W-state bound at n = 10^4
W_MABK_ANCHOR = 0.2741     # MABK W-state bound at n = 10^3
W_ANCHOR_TOL = 3e-3


@dataclass(frozen=True)
class SweepRecord:
    """One threshold (or value) row of a sweep output file."""

    n: int
    k: int
    model: str
    inequality: str
    threshold: float
    alpha0: float
    alpha1: float
    method: str
    flags: str
    seconds: float

    def sort_key(self):
        return (self.n, self.k, self.model, self.inequality, self.method)


@dataclass(frozen=True)
class AnchorCheck:
    """Comparison of one reproduced quantity against its anchor."""

    label: str
    passed: bool
    observed: float
    expected: float
    tolerance: float


def record_from_threshold(res: ThresholdResult, seconds: float = 0.0) -> SweepRecord:
    return SweepRecord(
        n=res.n, k=res.k, model=res.model.value,
        inequality=res.kind.value, threshold=res.threshold,
        alpha0=res.angles.alpha0, alpha1=res.angles.alpha1,
        method=res.method.value, flags=";".join(res.flags),
        seconds=seconds)


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow([_fmt(getattr(r, f)) for f in CSV_FIELDS])
    return buf.getvalue()


def records_to_json(records) -> str:
    # full-precision floats so a re-parse reproduces the fields exactly
    return json.dumps([asdict(r) for r in records], indent=2) + "\n"


def records_from_json(text: str):
    return [SweepRecord(**row) for row in json.loads(text)]


def records_from_csv(text: str):
    out = []
    reader = csv.DictReader(io.StringIO(text))
    for row in reader:
        out.append(SweepRecord(
            n=int(row["n"]), k=int(row["k"]), model=row["model"],
            inequality=row["inequality"], threshold=float(row["threshold"]),
            alpha0=float(row["alpha0"]), alpha1=float(row["alpha1"]),
            method=row["method"], flags=row["flags"],
            seconds=float(row["seconds"])))
    return out


def write_records(records, path: str, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = records_to_csv(records)
    elif fmt == "json":
        text = records_to_json(records)
    else:
        raise DomainError(f"unknown output format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)


# ----------------------------------------------------------------------
# worker pool
# ----------------------------------------------------------------------

def _threshold_cell(task):
    """Worker body: one (model, inequality, n, k) threshold computation."""
    model, kind_name, n, k, mode, timing = task
    set_precision_mode(mode)
    kind = InequalityKind(kind_name)
    t0 = time.perf_counter()
    if model == "excitation":
        res = threshold_excitation(n, k, kind)
    elif model == "particle":
        res = threshold_particle(n, k, kind)
    else:
        raise DomainError(f"unknown loss model {model!r}")
    dt = time.perf_counter() - t0 if timing else 0.0
    return record_from_threshold(res, seconds=dt)


def _w_curve_cell(task):
    """Worker body: one W/vacuum-ratio excitation threshold point."""
    kind_name, n, refine, mode, timing = task
    set_precision_mode(mode)
    t0 = time.perf_counter()
    res = w_threshold_optimized(n, InequalityKind(kind_name), refine=refine)
    dt = time.perf_counter() - t0 if timing else 0.0
    return record_from_threshold(res, seconds=dt)


def default_jobs() -> int:
    return max(os.cpu_count() or 1, 1)


def _run_tasks(worker, tasks, jobs: int):
    """Map worker over tasks, preserving task order regardless of jobs."""
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(worker, tasks, chunksize=1))


def run_sweep(model: str, kind: InequalityKind, n_values, k_values,
              jobs: int = 1, timing: bool = False):
    """Threshold sweep over the (n, k) grid, rows in ascending (n, k)."""
    mode = get_precision_mode()
    tasks = [(model, kind.value, n, k, mode, timing)
             for n in sorted(n_values) for k in sorted(k_values)
             if 1 <= k <= n - 1]
    if not tasks:
        raise DomainError("empty sweep: no valid (n, k) pairs in range")
    return _run_tasks(_threshold_cell, tasks, jobs)


# ----------------------------------------------------------------------
# reproduction targets
# ----------------------------------------------------------------------

def _log_spaced_n(n_max: int, points: int = 24):
    grid = np.logspace(math.log10(2.0), math.log10(float(n_max)), points)
    return sorted(set(int(round(v)) for v in grid) | {2, n_max})


def target_table1(jobs: int = 1, timing: bool = False):
    """k = 1..6 excitation-loss Hardy thresholds at n = 10^4."""
    records = run_sweep("excitation", InequalityKind.HARDY,
                        [10_000], range(1, 7), jobs=jobs, timing=timing)
    checks = []
    for rec in records:
        anchor = TABLE1_ANCHORS[rec.k]
        checks.append(AnchorCheck(
            label=f"table1 k={rec.k} hardy threshold",
            passed=abs(rec.threshold - anchor) <= TABLE1_TOL,
            observed=rec.threshold, expected=anchor, tolerance=TABLE1_TOL))
    return records, checks


def target_fig1(jobs: int = 1, timing: bool = False):
    """W-state threshold-vs-n curves: Hardy to n = 10^4, MABK to n = 10^3.

    Each point is emitted twice, once from the ansatz angles alone and
    once after local refinement, so both reading conventions of the
    large-n curves are available.
    """
    mode = get_precision_mode()
    tasks = []
    for kind, n_max in ((InequalityKind.HARDY, 10_000),
                        (InequalityKind.MABK, 1_000)):
        for n in _log_spaced_n(n_max):
            for refine in (False, True):
                tasks.append((kind.value, n, refine, mode, timing))
    tasks.sort(key=lambda t: (t[1], t[0], t[2]))
    records = _run_tasks(_w_curve_cell, tasks, jobs)

    def refined(kind: InequalityKind, n: int) -> SweepRecord:
        return next(r for r in records
                    if r.inequality == kind.value and r.n == n
                    and r.method == Method.GRID_THEN_LOCAL.value)

    hardy_tail = refined(InequalityKind.HARDY, 10_000)
    mabk_tail = refined(InequalityKind.MABK, 1_000)
    checks = [
        AnchorCheck("fig1 hardy W threshold at n=10^4",
                    abs(hardy_tail.threshold - W_HARDY_ANCHOR) <= W_ANCHOR_TOL,
                    hardy_tail.threshold, W_HARDY_ANCHOR, W_ANCHOR_TOL),
        AnchorCheck("fig1 mabk W threshold at n=10^3",
                    abs(mabk_tail.threshold - W_MABK_ANCHOR) <= W_ANCHOR_TOL,
                    mabk_tail.threshold, W_MABK_ANCHOR, W_ANCHOR_TOL),
    ]
    return records, checks


def target_fig2(jobs: int = 1, timing: bool = False):
    """Excitation-loss Hardy threshold vs k at n = 100 (k = 2..98)."""
    records = run_sweep("excitation", InequalityKind.HARDY,
                        [100], range(2, 99), jobs=jobs, timing=timing)
    by_k = {r.k: r.threshold for r in records}
    argmax = max(by_k, key=by_k.get)
    checks = [
        AnchorCheck("fig2 argmax_k of n=100 hardy curve", argmax == 5,
                    float(argmax), 5.0, 0.0),
        AnchorCheck("fig2 peak strictly above k=50 value",
                    by_k[5] > by_k[50], by_k[5] - by_k[50], 0.0, 0.0),
    ]
    return records, checks


#: k grids of the larger fig3/fig5 series; past these, per-point cost grows
#: while the curves are already flat (thresholds plateau in k)
FIG3_GRID = {
    100: list(range(1, 51)),
    200: list(range(1, 11)) + list(range(15, 101, 5)),
    500: list(range(1, 11)) + list(range(25, 251, 25)),
}
FIG5_N200_K = [1, 2, 3, 5, 8, 12, 20, 30, 50, 80, 100]


def target_fig3(jobs: int = 1, timing: bool = False):
    """Excitation-loss Hardy threshold vs k for n = 100, 200, 500."""
    records = []
    for n in sorted(FIG3_GRID):
        records.extend(run_sweep("excitation", InequalityKind.HARDY,
                                 [n], FIG3_GRID[n], jobs=jobs, timing=timing))
    by_k100 = {r.k: r.threshold for r in records if r.n == 100}
    argmax = max(by_k100, key=by_k100.get)
    checks = [AnchorCheck("fig3 argmax_k of n=100 hardy curve", argmax == 5,
                          float(argmax), 5.0, 0.0)]
    return records, checks


def target_fig4(jobs: int = 1, timing: bool = False):
    """Excitation loss at n = 30: Hardy vs MABK thresholds, k = 1..15."""
    records = []
    for kind in (InequalityKind.HARDY, InequalityKind.MABK):
        records.extend(run_sweep("excitation", kind, [30], range(1, 16),
                                 jobs=jobs, timing=timing))
    records.sort(key=SweepRecord.sort_key)
    hardy = {r.k: r for r in records if r.inequality == "hardy"}
    mabk = {r.k: r for r in records if r.inequality == "mabk"}
    checks = []
    for k in sorted(hardy):
        if mabk[k].flags:
            continue  # unconverged/unstable points carry no comparison
        checks.append(AnchorCheck(
            f"fig4 k={k} mabk >= hardy threshold",
            mabk[k].threshold >= hardy[k].threshold - 1e-9,
            mabk[k].threshold, hardy[k].threshold, 0.0))
    return records, checks


def target_fig5(jobs: int = 1, timing: bool = False):
    """Particle loss: Hardy at n = 30 and 200, MABK at n = 30.

    The threshold column holds the lost fraction m*/n.  The n = 200
    series uses a thinned k grid (per-point cost is ~1 min there).
    """
    records = []
    for kind in (InequalityKind.HARDY, InequalityKind.MABK):
        records.extend(run_sweep("particle", kind, [30], range(1, 16),
                                 jobs=jobs, timing=timing))
    records.sort(key=SweepRecord.sort_key)
    records.extend(run_sweep("particle", InequalityKind.HARDY,
                             [200], FIG5_N200_K, jobs=jobs, timing=timing))

    def m_star(n, k, ineq):
        rec = next(r for r in records
                   if (r.n, r.k, r.inequality) == (n, k, ineq))
        return int(round(rec.threshold * rec.n))

    # k = 1 anchors follow from the excitation-threshold reduction:
    # m* is the largest m with m/n below the W threshold at n - m parties
    checks = [
        AnchorCheck("fig5 hardy n=30 k=1 tolerated losses", True,
                    float(m_star(30, 1, "hardy")), 5.0, 0.0),
        AnchorCheck("fig5 mabk n=30 k=1 tolerated losses", True,
                    float(m_star(30, 1, "mabk")), 8.0, 0.0),
    ]
    checks = [AnchorCheck(c.label, c.observed == c.expected,
                          c.observed, c.expected, c.tolerance)
              for c in checks]
    return records, checks


TARGETS = {
    "table1": target_table1,
    "fig1": target_fig1,
    "fig2": target_fig2,
    "fig3": target_fig3,
    "fig4": target_fig4,
    "fig5": target_fig5,
}


def run_target(name: str, jobs: int = 1, timing: bool = False):
    """Regenerate one headline target; returns (records, anchor checks)."""
    if name not in TARGETS:
        raise DomainError(f"unknown reproduction target {name!r}; "
                          f"choose from {', '.join(sorted(TARGETS))}")
    return TARGETS[name](jobs=jobs, timing=timing)


# ----------------------------------------------------------------------
# plotting
# ----------------------------------------------------------------------

def plot_records(records, path: str, title: str = "") -> None:
    """Write a static SVG line chart (threshold vs n or k) for the rows.

    Rows are grouped into one line per (model, inequality, n) — or per
    (model, inequality) with n on the x axis when the rows span several
    n at fixed k.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = {r.n for r in records}
    ks = {r.k for r in records}
    x_is_n = len(ns) > len(ks)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    groups = {}
    for r in records:
        key = ((r.model, r.inequality, r.method) if x_is_n
               else (r.model, r.inequality, r.n))
        groups.setdefault(key, []).append(r)
    for key in sorted(groups):
        rows = sorted(groups[key], key=SweepRecord.sort_key)
        xs = [r.n if x_is_n else r.k for r in rows]
        ys = [r.threshold for r in rows]
        label = " ".join(str(p) for p in key)
        ax.plot(xs, ys, marker=".", label=label)
    if x_is_n:
        ax.set_xscale("log")
    ax.set_xlabel("n" if x_is_n else "k")
    ax.set_ylabel("threshold")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    # strip the timestamp and salt the ids so reruns are byte-identical
    plt.rcParams["svg.hashsalt"] = "dickebell"
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
