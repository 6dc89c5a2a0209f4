"""Per-amplitude outcome classification and critical-threshold bracketing.

For the concave initial family y = sigma * phi(x) the flow has exactly
three long-time fates: escape above the upper equilibrium (large sigma),
convergence to the lower equilibrium (small or negative sigma), and -- at
a single critical amplitude -- convergence to the upper equilibrium
itself.  The escape and lower-convergence amplitude sets are open
half-lines, so the critical amplitude is found by bisection between any
certified member of each.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

from .analysis import intersection_audit
from .evolvers import (
    ClassifierTolerances,
    EventKind,
    StepControl,
    Trajectory,
    evolve,
)
from .solutions import InitialFamily

__all__ = [
    "Category",
    "Bracket",
    "BisectStep",
    "SweepRow",
    "MonotonicityError",
    "classify",
    "sweep",
    "bisect_sigma_star",
    "critical_run",
    "closest_upper_approach",
    "upper_dwell_time",
    "worker_count",
]

THREADS_ENV = "EXTREMALFLOW_THREADS"


class Category(Enum):
    ESCAPE = "Escape"
    CONVERGE_UPPER = "ConvergeUpper"
    CONVERGE_LOWER = "ConvergeLower"
    UNDETERMINED = "Undetermined"


class MonotonicityError(RuntimeError):
    """A sweep found lower-convergence above an escape: ordering violated."""


_EVENT_TO_CATEGORY = {
    EventKind.ESCAPED: Category.ESCAPE,
    EventKind.CONVERGED_LOWER: Category.CONVERGE_LOWER,
    EventKind.CONVERGED_UPPER: Category.CONVERGE_UPPER,
    EventKind.HORIZON_REACHED: Category.UNDETERMINED,
    EventKind.BLOWUP: Category.UNDETERMINED,
}


def classify(
    fam: InitialFamily, ctl: StepControl, tols: ClassifierTolerances
) -> tuple[Category, Trajectory]:
    """Run one amplitude to its termination event and name its fate.

    A run losing the polar chart while its sign word already reads '+'
    is counted as an escape: past the upper equilibrium the curve may
    genuinely become singular in finite time.  Blowups and exhausted
    horizons are Undetermined (the event on the trajectory keeps the
    distinction).
    """
    traj = evolve(fam, ctl, tols)
    kind = traj.event.kind
    if kind is EventKind.CHART_LOSS:
        last_word = traj.diagnostics[-1].sgn_upper
        cat = Category.ESCAPE if last_word == "+" else Category.UNDETERMINED
    else:
        cat = _EVENT_TO_CATEGORY[kind]
    return cat, traj


@dataclass(frozen=True)
class SweepRow:
    sigma: float
    category: Category
    t_event: float
    final_sgn: str | None


def worker_count() -> int:
    """Worker cap for concurrent sweeps (EXTREMALFLOW_THREADS, default 2)."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        n = min(2, os.cpu_count() or 1)
    return n


def sweep(
    template: InitialFamily,
    sigmas,
    ctl: StepControl,
    tols: ClassifierTolerances,
) -> list[SweepRow]:
    """Classify each amplitude independently and audit the ordering.

    Runs are embarrassingly parallel; results are keyed by amplitude so
    the table is independent of scheduling.  Any lower-convergence above
    an escape contradicts the comparison principle and raises
    ``MonotonicityError``.
    """
    sigmas = list(sigmas)
    if not sigmas:
        return []

    def one(s: float) -> SweepRow:
        cat, traj = classify(template.with_sigma(s), ctl, tols)
        return SweepRow(
            sigma=s,
            category=cat,
            t_event=traj.event.t,
            final_sgn=traj.diagnostics[-1].sgn_upper,
        )

    if len(sigmas) > 1:
        with ThreadPoolExecutor(max_workers=worker_count()) as pool:
            rows = list(pool.map(one, sigmas))
    else:
        rows = [one(sigmas[0])]

    escapes = [r.sigma for r in rows if r.category is Category.ESCAPE]
    lowers = [r.sigma for r in rows if r.category is Category.CONVERGE_LOWER]
    if escapes and lowers and max(lowers) > min(escapes):
        raise MonotonicityError(
            f"lower convergence at sigma={max(lowers)} above escape at "
            f"sigma={min(escapes)}"
        )
    return rows


@dataclass(frozen=True)
class BisectStep:
    """One midpoint evaluation: what it classified as and which side moved."""

    sigma: float
    category: Category
    t_event: float
    final_sgn: str | None
    side: str
    max_energy_rise: float
    word_chain_ok: bool


@dataclass(frozen=True)
class Bracket:
    """Certified enclosure of the critical amplitude.

    ``lo`` classified ConvergeLower and ``hi`` Escape; the critical
    amplitude lies in between.  ``iterations`` logs every midpoint
    evaluation, including its energy-monotonicity and word-chain audits.
    """

    lo: float
    hi: float
    lo_category: Category
    hi_category: Category
    grid_n: int
    iterations: tuple

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("bracket requires lo < hi")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "width": self.width,
            "midpoint": self.midpoint,
            "lo_category": self.lo_category.value,
            "hi_category": self.hi_category.value,
            "grid_n": self.grid_n,
            "iterations": [
                {
                    "sigma": it.sigma,
                    "category": it.category.value,
                    "t_event": it.t_event,
                    "final_sgn": it.final_sgn,
                    "side": it.side,
                    "max_energy_rise": it.max_energy_rise,
                    "word_chain_ok": it.word_chain_ok,
                }
                for it in self.iterations
            ],
        }


def _undetermined_side(final_word: str | None) -> str:
    """Secondary vote for midpoints the horizon could not decide.

    A final word still containing '+' marks an orbit on the escape side
    of the separatrix; a pure '-' word has fallen below it.
    """
    if final_word and "+" in final_word:
        return "hi"
    return "lo"


def bisect_sigma_star(
    template: InitialFamily,
    lo0: float,
    hi0: float,
    width_tol: float,
    ctl: StepControl,
    tols: ClassifierTolerances,
) -> Bracket:
    """Bisect between a lower-converging and an escaping amplitude.

    The endpoints are verified first; each midpoint then replaces the
    side its category dictates.  Undetermined midpoints are assigned by
    the secondary vote on their final sign word and logged as such.
    """
    if not lo0 < hi0:
        raise ValueError("need lo0 < hi0")
    if width_tol <= 0:
        raise ValueError("width_tol must be positive")
    cat_lo, _ = classify(template.with_sigma(lo0), ctl, tols)
    if cat_lo is not Category.CONVERGE_LOWER:
        raise ValueError(f"lo0={lo0} classifies as {cat_lo.value}, not ConvergeLower")
    cat_hi, _ = classify(template.with_sigma(hi0), ctl, tols)
    if cat_hi is not Category.ESCAPE:
        raise ValueError(f"hi0={hi0} classifies as {cat_hi.value}, not Escape")

    lo, hi = lo0, hi0
    log = []
    while hi - lo > width_tol:
        mid = 0.5 * (lo + hi)
        cat, traj = classify(template.with_sigma(mid), ctl, tols)
        word = traj.diagnostics[-1].sgn_upper
        if cat is Category.ESCAPE:
            side = "hi"
        elif cat is Category.CONVERGE_LOWER:
            side = "lo"
        elif cat is Category.CONVERGE_UPPER:
            # the midpoint sits on the separatrix itself; shrink from above
            side = "hi"
        else:
            side = _undetermined_side(word)
        if side == "hi":
            hi, cat_hi = mid, cat
        else:
            lo, cat_lo = mid, cat
        log.append(
            BisectStep(
                sigma=mid,
                category=cat,
                t_event=traj.event.t,
                final_sgn=word,
                side=side,
                max_energy_rise=traj.max_step_energy_increase,
                word_chain_ok=intersection_audit(
                    d.sgn_upper for d in traj.diagnostics
                ),
            )
        )

    return Bracket(
        lo=lo,
        hi=hi,
        lo_category=cat_lo,
        hi_category=cat_hi,
        grid_n=template.params.grid_n,
        iterations=tuple(log),
    )


def critical_run(
    fam: InitialFamily, ctl: StepControl, tols: ClassifierTolerances
) -> Trajectory:
    """Evolve a near-critical amplitude with an extended horizon.

    Intended for the midpoint of a tight bracket: the orbit shadows the
    upper equilibrium before committing, and the trajectory diagnostics
    expose the closest approach and the dwell time near it.
    """
    ctl_long = replace(ctl, t_max=1.5 * ctl.t_max)
    tols_long = replace(tols, t_max=1.5 * tols.t_max)
    _, traj = classify(fam, ctl_long, tols_long)
    return traj


def closest_upper_approach(traj: Trajectory) -> float:
    """Minimum sampled sup-distance to the upper equilibrium along a run."""
    import math

    dists = [d.dist_upper for d in traj.diagnostics if not math.isnan(d.dist_upper)]
    return min(dists) if dists else float("inf")


def upper_dwell_time(traj: Trajectory, within: float) -> float:
    """Total sampled time spent within ``within`` of the upper equilibrium."""
    import math

    total = 0.0
    recs = traj.diagnostics
    for prev, cur in zip(recs, recs[1:]):
        if not math.isnan(cur.dist_upper) and cur.dist_upper < within:
            total += cur.t - prev.t
    return total