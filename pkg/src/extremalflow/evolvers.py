"""Time integration of the driven flow in graph and polar charts.

The flow V = -kappa + A is integrated as a method-of-lines system in
whichever chart currently represents the curve:

* graph chart:  u_t = u_xx / (1 + u_x^2) + A sqrt(1 + u_x^2),  u(+-a) = 0
* polar chart:  rho_t = rho_tt / W^2 - (2 rho_t^2 + rho^2) / (rho W^2)
                + (A / rho) sqrt(W^2),   W^2 = rho^2 + rho_t^2, rho(0,pi) = a

Both schemes share the same central-difference stencils, so the discrete
equilibria coincide.  The default stepping is explicit Euler under a CFL
cap; a semi-implicit variant (diffusion treated implicitly with frozen
coefficients) is available for long runs where the explicit parabolic
step restriction is the bottleneck.

``evolve`` drives a full run from a family curve: it switches charts when
the graph representation steepens past a threshold (and back when the
curve flattens), records diagnostics on a fixed sampling cadence, and
terminates on the first classification event.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .analysis import (
    Unresolvable,
    dissipation_estimate,
    endpoint_curvature_deviation,
    endpoint_tangents,
    lyapunov_graph,
    word_from_gap,
)
from .geometry import (
    AXIS_TOL,
    GraphProfile,
    PolarProfile,
    ProblemParams,
    SampledCurve,
    graph_to_sampled,
    is_graph_representable,
    polar_to_sampled,
)
from .solutions import (
    InitialFamily,
    gamma_lower,
    gamma_lower_polar,
    gamma_upper,
    initial_curve,
)

__all__ = [
    "BlowupError",
    "StepControl",
    "ClassifierTolerances",
    "EventKind",
    "TerminationEvent",
    "DiagnosticRecord",
    "Trajectory",
    "graph_flow_rhs",
    "polar_flow_rhs",
    "step_graph",
    "step_polar",
    "advance_graph",
    "advance_polar",
    "switch_chart",
    "evolve",
]

BLOWUP_LIMIT = 1e6
ORIGIN_LIMIT = 1e-9
# Relative single-step displacement cap; guards accuracy through stiff
# transients without throttling smooth evolution.
STEP_FRACTION = 0.05


def _slope_force(ctl: StepControl, A: float) -> float:
    """Steepness at which the graph chart is handed off unconditionally.

    Near the pins the discrete forcing A*sqrt(1 + u_x^2) outruns the
    stabilizing diffusion once the wall slope reaches about
    sqrt(2 / (A dx)), after which the first interior node spikes past its
    neighbour and the state folds.  The handoff fires well before that.
    """
    return max(2.0 * ctl.slope_switch, 0.5 * np.sqrt(2.0 / (A * ctl.dx)))


class BlowupError(RuntimeError):
    """The discrete state left the representable range."""


@dataclass(frozen=True)
class StepControl:
    """Stepping parameters for one chart grid.

    ``dt`` is the nominal step; the actual step never exceeds it and is
    further clipped by the explicit stability bound (cfl * dx^2 scaled by
    the metric) and a displacement cap.  ``scheme`` selects 'explicit'
    Euler or the 'semi_implicit' linearized-diffusion variant.
    """

    dx: float
    dt: float
    cfl: float = 0.2
    t_max: float = 50.0
    scheme: str = "explicit"
    sample_interval: float = 0.1
    slope_switch: float = 10.0

    def __post_init__(self):
        if self.scheme not in ("explicit", "semi_implicit"):
            raise ValueError(f"unknown scheme '{self.scheme}'")
        if self.scheme == "explicit":
            if not 0 < self.cfl <= 0.25:
                raise ValueError("explicit scheme requires 0 < cfl <= 0.25")
            if self.dt > self.cfl * self.dx**2 * (1.0 + 1e-12):
                raise ValueError("explicit scheme requires dt <= cfl * dx^2")
        if self.dt <= 0 or self.t_max <= 0 or self.sample_interval <= 0:
            raise ValueError("dt, t_max and sample_interval must be positive")

    @classmethod
    def for_params(
        cls,
        params: ProblemParams,
        cfl: float = 0.2,
        t_max: float = 50.0,
        scheme: str = "explicit",
        dt: float | None = None,
        sample_interval: float = 0.1,
        slope_switch: float = 10.0,
    ) -> "StepControl":
        dx = params.dx
        if dt is None:
            dt = cfl * dx**2 if scheme == "explicit" else 0.1 * dx
        return cls(
            dx=dx,
            dt=dt,
            cfl=cfl,
            t_max=t_max,
            scheme=scheme,
            sample_interval=sample_interval,
            slope_switch=slope_switch,
        )


@dataclass(frozen=True)
class ClassifierTolerances:
    """Finite-time proxies for the asymptotic statements of the theory.

    ``converge``: sup-distance at which an orbit is declared locked onto
    an equilibrium (together with the dissipation floor).  ``escape_gap``:
    minimum interior radial clearance above the upper equilibrium that
    certifies escape.  ``t_max``: classification horizon.
    """

    converge: float = 1e-3
    escape_gap: float = 1e-3
    dissipation: float = 1e-4
    t_max: float = 50.0

    def __post_init__(self):
        if min(self.converge, self.escape_gap, self.dissipation, self.t_max) <= 0:
            raise ValueError("all tolerances must be positive")


class EventKind(Enum):
    ESCAPED = "Escaped"
    CONVERGED_LOWER = "ConvergedLower"
    CONVERGED_UPPER = "ConvergedUpper"
    CHART_LOSS = "ChartLoss"
    HORIZON_REACHED = "HorizonReached"
    BLOWUP = "Blowup"


@dataclass(frozen=True)
class TerminationEvent:
    kind: EventKind
    t: float
    detail: str = ""


@dataclass
class DiagnosticRecord:
    """Per-sample diagnostics along a run."""

    t: float
    chart: str
    L: float
    S: float
    E: float
    lyapunov: float
    dissipation: float
    z_upper: int | None
    sgn_upper: str | None
    kappa_dev_P: float
    kappa_dev_Q: float
    tangent_y_P: float
    tangent_y_Q: float
    dist_lower: float
    dist_upper: float
    min_height: float


@dataclass
class Trajectory:
    """Time series of curves and diagnostics ending in a termination event."""

    params: ProblemParams
    sigma: float
    snapshots: list
    diagnostics: list
    event: TerminationEvent
    max_step_energy_increase: float = float("-inf")

    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.snapshots])

    def final_curve(self) -> SampledCurve:
        return self.snapshots[-1][1]

    def summary_dict(self) -> dict:
        def clean(v):
            # strict JSON has no NaN/Infinity
            if isinstance(v, float) and not np.isfinite(v):
                return None
            return v

        last = self.diagnostics[-1]
        return {
            "sigma": self.sigma,
            "A": self.params.A,
            "a": self.params.a,
            "grid_n": self.params.grid_n,
            "event": self.event.kind.value,
            "event_time": self.event.t,
            "event_detail": self.event.detail,
            "final_dist_lower": clean(last.dist_lower),
            "final_dist_upper": clean(last.dist_upper),
            "final_sgn": last.sgn_upper,
            "final_chart": last.chart,
            "max_step_energy_increase": clean(self.max_step_energy_increase),
        }

    def write_outputs(self, outdir) -> None:
        """Write snapshot CSVs, the diagnostics CSV and the summary JSON."""
        import glob
        import os

        os.makedirs(outdir, exist_ok=True)
        for stale in glob.glob(os.path.join(outdir, "snapshot_*.csv")):
            os.remove(stale)
        for k, (_t, curve) in enumerate(self.snapshots):
            curve.to_csv(os.path.join(outdir, f"snapshot_{k:04d}.csv"))
        with open(os.path.join(outdir, "diagnostics.csv"), "w", encoding="utf-8") as fh:
            fh.write("t,L,S,lyapunov,Z,sgn_word,kappa_dev_P,tangent_y_P\n")
            for r in self.diagnostics:
                z = "" if r.z_upper is None else str(r.z_upper)
                w = "" if r.sgn_upper is None else r.sgn_upper
                fh.write(
                    f"{r.t:.17g},{r.L:.17g},{r.S:.17g},{r.lyapunov:.17g},"
                    f"{z},{w},{r.kappa_dev_P:.17g},{r.tangent_y_P:.17g}\n"
                )
        with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(self.summary_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


# ---------------------------------------------------------------------------
# spatial operators
# ---------------------------------------------------------------------------


def graph_flow_rhs(u: np.ndarray, dx: float, A: float) -> np.ndarray:
    """Interior right-hand side of the graph-chart flow (central differences)."""
    ux = (u[2:] - u[:-2]) / (2.0 * dx)
    uxx = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dx**2
    one = 1.0 + ux**2
    return uxx / one + A * np.sqrt(one)


def polar_flow_rhs(rho: np.ndarray, dtheta: float, A: float) -> np.ndarray:
    """Interior right-hand side of the polar-chart flow (central differences)."""
    rt = (rho[2:] - rho[:-2]) / (2.0 * dtheta)
    rtt = (rho[2:] - 2.0 * rho[1:-1] + rho[:-2]) / dtheta**2
    ri = rho[1:-1]
    w2 = ri**2 + rt**2
    return rtt / w2 - (2.0 * rt**2 + ri**2) / (ri * w2) + A * np.sqrt(w2) / ri


# ---------------------------------------------------------------------------
# single explicit steps (public operations)
# ---------------------------------------------------------------------------


def step_graph(g: GraphProfile, ctl: StepControl) -> GraphProfile:
    """One explicit Euler step of the graph-chart flow; endpoints stay pinned."""
    u = g.u
    ux_max = np.max(np.abs(u[2:] - u[:-2])) / (2.0 * ctl.dx)
    if np.max(np.abs(u)) > BLOWUP_LIMIT or ux_max > BLOWUP_LIMIT:
        raise BlowupError("graph profile out of range")
    dt = min(ctl.dt, ctl.cfl * ctl.dx**2)
    un = u.copy()
    un[1:-1] += dt * graph_flow_rhs(u, g.params.dx, g.params.A)
    return GraphProfile(g.params, un)


def step_polar(p: PolarProfile, ctl: StepControl) -> PolarProfile:
    """One explicit Euler step of the polar-chart flow; boundary radii stay a.

    The step is clipped by the metric-weighted parabolic bound
    dt <= cfl * dtheta^2 * min(rho^2 + rho_theta^2).
    """
    r = p.rho
    if np.min(r) <= ORIGIN_LIMIT:
        raise BlowupError("polar profile collapsed toward the origin")
    if np.max(r) >= BLOWUP_LIMIT:
        raise BlowupError("polar profile out of range")
    dth = p.params.dtheta
    rt = (r[2:] - r[:-2]) / (2.0 * dth)
    w2min = float(np.min(r[1:-1] ** 2 + rt**2))
    dt = min(ctl.dt, ctl.cfl * dth**2 * w2min)
    rn = r.copy()
    rn[1:-1] += dt * polar_flow_rhs(r, dth, p.params.A)
    return PolarProfile(p.params, rn)


# ---------------------------------------------------------------------------
# chunked advancement
# ---------------------------------------------------------------------------


class _EnergyTracker:
    """Tracks E = L - A*S per step and its largest single-step increase.

    Only states confined to {y >= -1e-9} participate; a chart switch or an
    excursion below the axis re-baselines the tracker.
    """

    __slots__ = ("A", "prev", "max_rise")

    def __init__(self, A: float):
        self.A = A
        self.prev = None
        self.max_rise = float("-inf")

    def reset(self):
        self.prev = None

    def push(self, E: float | None):
        if E is None:
            self.prev = None
            return
        if self.prev is not None:
            rise = E - self.prev
            if rise > self.max_rise:
                self.max_rise = rise
        self.prev = E


def _graph_energy(u, dx, A):
    if np.min(u) < -AXIS_TOL:
        return None
    L = float(np.sum(np.sqrt(dx**2 + np.diff(u) ** 2)))
    S = float(dx * np.sum(u[1:-1]))
    return L - A * S


def _polar_energy(xs, ys, A):
    d = np.diff(np.column_stack([xs, ys]), axis=0)
    L = float(np.sum(np.hypot(d[:, 0], d[:, 1])))
    S = float(abs(0.5 * np.sum(xs[1:] * ys[:-1] - xs[:-1] * ys[1:])))
    return L - A * S


def _advance_graph(u, dx, A, t, t_end, ctl, tracker=None, abort_slope=None):
    """Advance the graph state in place until t_end.

    Returns (t, status) with status one of 'ok', 'blown', or 'steep'
    (the profile exceeded ``abort_slope`` and the caller should hand off
    to the polar chart).  The explicit scheme steps at the parabolic
    bound cfl * dx^2 (the graph diffusion coefficient never exceeds 1);
    the semi-implicit scheme steps at the nominal ctl.dt.  Both respect
    a displacement cap through stiff transients.
    """
    inv2dx = 1.0 / (2.0 * dx)
    invdx2 = 1.0 / dx**2
    explicit = ctl.scheme == "explicit"
    dt_base = min(ctl.dt, ctl.cfl * dx**2) if explicit else ctl.dt
    m = len(u) - 2
    ux = np.empty(m)
    one = np.empty(m)
    rhs = np.empty(m)
    root = np.empty(m)
    umax = float(np.max(np.abs(u)))
    k = 0
    while t < t_end - 1e-14:
        np.subtract(u[2:], u[:-2], out=ux)
        ux *= inv2dx
        np.multiply(ux, ux, out=one)
        one += 1.0
        np.subtract(u[2:], u[1:-1], out=rhs)
        rhs -= u[1:-1]
        rhs += u[:-2]
        rhs *= invdx2  # rhs = u_xx
        rhs /= one
        np.sqrt(one, out=root)
        root *= A
        rhs += root
        if abort_slope is not None:
            # the foot steepening is exponential in time, so the handoff
            # threshold must be watched every step
            if float(np.max(np.abs(ux))) > abort_slope:
                return t, "steep"
            # precursor of the boundary spike: a steep positive foot node
            # catching up with its inward neighbour
            s_min = ctl.slope_switch * dx
            if (u[1] > s_min and u[1] > 0.9 * u[2]) or (
                u[-2] > s_min and u[-2] > 0.9 * u[-3]
            ):
                return t, "steep"
        if k % 32 == 0:
            umax = float(np.max(np.abs(u)))
            if umax > BLOWUP_LIMIT or float(np.max(np.abs(ux))) > BLOWUP_LIMIT:
                return t, "blown"
        k += 1
        rmax = float(np.max(np.abs(rhs))) + 1e-300
        dt = min(dt_base, STEP_FRACTION * (1.0 + umax) / rmax, t_end - t)
        if explicit:
            rhs *= dt
            u[1:-1] += rhs
        else:
            r = (dt * invdx2) / one
            ab = np.zeros((3, m))
            ab[0, 1:] = -r[:-1]  # row i, column i+1
            ab[1, :] = 1.0 + 2.0 * r
            ab[2, :-1] = -r[1:]  # row i, column i-1
            root *= dt  # dt * A * sqrt(1 + u_x^2)
            root += u[1:-1]
            u[1:-1] = solve_banded((1, 1), ab, root)
        t += dt
        if tracker is not None:
            tracker.push(_graph_energy(u, dx, A))
    return t, "ok"


def _advance_polar(rho, dth, A, a, t, t_end, ctl, tracker=None, cos_th=None, sin_th=None):
    """Advance the polar state in place until t_end. Returns (t, status).

    The explicit step obeys the metric-weighted parabolic bound
    cfl * dtheta^2 * min(rho^2 + rho_theta^2); the polar grid spacing is
    dtheta, so the nominal ctl.dt (sized for the graph chart) only caps
    the semi-implicit scheme.
    """
    inv2dth = 1.0 / (2.0 * dth)
    invdth2 = 1.0 / dth**2
    explicit = ctl.scheme == "explicit"
    dt_stab = ctl.cfl * dth**2
    while t < t_end - 1e-14:
        if float(np.min(rho)) <= ORIGIN_LIMIT or float(np.max(rho)) >= BLOWUP_LIMIT:
            return t, "blown"
        rt = (rho[2:] - rho[:-2]) * inv2dth
        ri = rho[1:-1]
        w2 = ri * ri + rt * rt
        root = np.sqrt(w2)
        expl = -(2.0 * rt * rt + ri * ri) / (ri * w2) + A * root / ri
        diff = (rho[2:] - 2.0 * ri + rho[:-2]) * invdth2 / w2
        rhs = diff + expl
        # per-node displacement cap: steep radial walls move fast in rho
        # without the curve itself moving fast
        ratio = float(np.min(ri / (np.abs(rhs) + 1e-300)))
        dt = min(STEP_FRACTION * ratio, t_end - t)
        if explicit:
            dt = min(dt, dt_stab * float(np.min(w2)))
            rho[1:-1] = ri + dt * rhs
        else:
            dt = min(dt, ctl.dt)
            r = (dt * invdth2) / w2
            ab = np.zeros((3, len(r)))
            ab[0, 1:] = -r[:-1]  # row i, column i+1
            ab[1, :] = 1.0 + 2.0 * r
            ab[2, :-1] = -r[1:]  # row i, column i-1
            b = ri + dt * expl
            b[0] += r[0] * a
            b[-1] += r[-1] * a
            rho[1:-1] = solve_banded((1, 1), ab, b)
        t += dt
        if tracker is not None and cos_th is not None:
            tracker.push(_polar_energy(rho * cos_th, rho * sin_th, A))
    return t, "ok"


def advance_graph(g: GraphProfile, ctl: StepControl, t_end: float) -> GraphProfile:
    """Run the graph-chart flow from t = 0 to t_end and return the profile."""
    u = g.u.copy()
    _, status = _advance_graph(u, g.params.dx, g.params.A, 0.0, t_end, ctl)
    if status == "blown":
        raise BlowupError("graph advance blew up")
    return GraphProfile(g.params, u)


def advance_polar(p: PolarProfile, ctl: StepControl, t_end: float) -> PolarProfile:
    """Run the polar-chart flow from t = 0 to t_end and return the profile."""
    rho = p.rho.copy()
    _, status = _advance_polar(rho, p.params.dtheta, p.params.A, p.params.a, 0.0, t_end, ctl)
    if status == "blown":
        raise BlowupError("polar advance blew up")
    return PolarProfile(p.params, rho)


# ---------------------------------------------------------------------------
# chart switching
# ---------------------------------------------------------------------------


def _ray_radii(points: np.ndarray, th_vertex: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Exact radial distance of a star-shaped polyline along given rays.

    ``points`` ordered with ``th_vertex`` ascending.  Intersects each ray
    with the covering segment, so sparse vertex coverage in angle (steep
    profiles sweep large angular ranges within one segment) stays exact.
    """
    idx = np.clip(np.searchsorted(th_vertex, thetas) - 1, 0, len(points) - 2)
    pv = points[idx]
    e = points[idx + 1] - pv
    d = np.column_stack([np.cos(thetas), np.sin(thetas)])
    denom = e[:, 0] * d[:, 1] - e[:, 1] * d[:, 0]
    s = -(pv[:, 0] * d[:, 1] - pv[:, 1] * d[:, 0]) / denom
    z = pv + s[:, None] * e
    return z[:, 0] * d[:, 0] + z[:, 1] * d[:, 1]


def switch_chart(c: SampledCurve, target: str, params: ProblemParams):
    """Resample a polyline onto the uniform grid of the target chart.

    Smooth states (vertex parameters dense relative to the target grid)
    are resampled with a cubic spline through the vertices; states with
    sparse angular or horizontal vertex coverage fall back to exact
    polyline evaluation, which cannot overshoot.  Endpoints are pinned
    exactly.  Raises ``ValueError`` when the curve is not representable
    in the target chart (multivalued over x, or not star-shaped).
    """
    if target == "graph":
        xs = c.x
        if not np.all(np.diff(xs) > 0.0):
            raise ValueError("curve is multivalued over x; graph chart unavailable")
        x_t = params.x_nodes()
        if float(np.max(np.diff(xs))) <= 3.0 * params.dx:
            u = CubicSpline(xs, c.y)(x_t)
        else:
            u = np.interp(x_t, xs, c.y)
        u[0] = 0.0
        u[-1] = 0.0
        return GraphProfile(params, u)
    if target == "polar":
        if np.any(c.y < -1e-12):
            raise ValueError("curve dips below the axis; polar chart unavailable")
        th = np.arctan2(np.maximum(c.y, 0.0), c.x)
        if not np.all(np.diff(th) < 0.0):
            raise ValueError("curve is not star-shaped; polar chart unavailable")
        th_t = params.theta_nodes()
        th_asc = th[::-1].copy()
        th_asc[0] = 0.0
        th_asc[-1] = np.pi
        if float(np.max(np.diff(th_asc))) <= 3.0 * params.dtheta:
            rho = CubicSpline(th_asc, np.hypot(c.x, c.y)[::-1])(th_t)
        else:
            rho = _ray_radii(c.points[::-1], th_asc, th_t)
        rho[0] = params.a
        rho[-1] = params.a
        return PolarProfile(params, rho)
    raise ValueError(f"unknown chart '{target}'")


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------


def _upper_branch_heights(params: ProblemParams, x: np.ndarray) -> np.ndarray:
    c = params.center_offset
    return c + np.sqrt(params.radius**2 - x**2)


def evolve(fam: InitialFamily, ctl: StepControl, tols: ClassifierTolerances | None = None) -> Trajectory:
    """Evolve a family curve until a classification event fires.

    Starts in the graph chart.  When the profile steepens past
    ``ctl.slope_switch`` and the curve has a faithful star-shaped
    resampling, evolution hands off to the polar chart; it hands back
    once the curve is again a mildly sloped graph.  Diagnostics are
    recorded every ``ctl.sample_interval`` time units and events are
    evaluated on that cadence:

    * ``Escaped``           -- sign word '+' against the upper equilibrium
                               with interior radial clearance above
                               ``tols.escape_gap`` (polar chart),
    * ``ConvergedLower/Upper`` -- sup-distance to the equilibrium below
                               ``tols.converge`` with dissipation below
                               ``tols.dissipation``,
    * ``ChartLoss``         -- endpoint tangent turning outward-horizontal
                               in the polar chart before escape,
    * ``HorizonReached``    -- the time horizon min(ctl.t_max, tols.t_max),
    * ``Blowup``            -- state out of representable range.
    """
    if tols is None:
        tols = ClassifierTolerances(t_max=ctl.t_max)
    params = fam.params
    A, a = params.A, params.a
    dx, dth = params.dx, params.dtheta
    x_nodes = params.x_nodes()
    th_nodes = params.theta_nodes()
    cos_th, sin_th = np.cos(th_nodes), np.sin(th_nodes)
    u_lower = gamma_lower(params).u
    rho_lower = gamma_lower_polar(params).rho
    rho_upper = gamma_upper(params).rho
    # Graph-chart words against the upper equilibrium are sampled on a
    # finer fill grid: a steep profile crosses the equilibrium inside a
    # single cell near the pins and node sampling alone would miss it.
    # The density needed scales with the wall slope (the sliver depth is
    # set by the equilibrium scale), so the fill adapts to the state.
    # Polar-chart words use the nodes themselves (exact radii; fill
    # interpolation would introduce a chord bias near tangency).
    depth_scale = max(params.center_offset, 0.05 * a)
    fill_cache = {}

    def graph_fill(slope: float):
        factor = int(np.clip(np.ceil(2.0 * slope * dx / depth_scale), 16, 256))
        if factor not in fill_cache:
            xs = np.linspace(-a, a, factor * (params.grid_n - 1) + 1)[1:-1]
            fill_cache[factor] = (xs, _upper_branch_heights(params, xs))
        return fill_cache[factor]

    horizon = min(ctl.t_max, tols.t_max)

    chart = "graph"
    u = initial_curve(fam).u.copy()
    rho = None
    t = 0.0
    tracker = _EnergyTracker(A)
    snapshots, diagnostics = [], []
    event = None
    abort_enabled = True

    def current_curve() -> SampledCurve:
        if chart == "graph":
            return graph_to_sampled(GraphProfile(params, u))
        return polar_to_sampled(PolarProfile(params, rho))

    while event is None:
        curve = current_curve()

        # --- diagnostics at the sample time -------------------------------
        seg = np.hypot(*np.diff(curve.points, axis=0).T)
        L = float(np.sum(seg))
        min_h = float(np.min(curve.y))
        if min_h >= -AXIS_TOL:
            S = float(0.5 * np.sum(curve.x[1:] * curve.y[:-1] - curve.x[:-1] * curve.y[1:]))
            E = L - A * S
        else:
            S = float("nan")
            E = float("nan")
        lyap = lyapunov_graph(GraphProfile(params, u)) if chart == "graph" else float("nan")
        dissip = dissipation_estimate(curve, A)
        tangents = endpoint_tangents(curve)
        kdev_P, kdev_Q = endpoint_curvature_deviation(curve, A)
        if chart == "graph":
            slope_now = float(np.max(np.abs(np.diff(u)))) / dx
            x_fill, upper_h_fill = graph_fill(slope_now)
            gap_up = np.interp(x_fill, x_nodes, u) - upper_h_fill
            word_param = x_fill
            dist_lower = float(np.max(np.abs(u - u_lower)))
            dist_upper = float("nan")
            min_gap_up = float("-inf")
        else:
            gap_up = rho[1:-1] - rho_upper[1:-1]
            word_param = th_nodes[1:-1]
            dist_lower = float(np.max(np.abs(rho - rho_lower)))
            dist_upper = float(np.max(np.abs(rho - rho_upper)))
            min_gap_up = float(np.min(gap_up))
        try:
            word = word_from_gap(word_param, gap_up)
            letters, z = word.letters, word.z
        except Unresolvable:
            letters, z = None, None

        diagnostics.append(
            DiagnosticRecord(
                t=t,
                chart=chart,
                L=L,
                S=S,
                E=E,
                lyapunov=lyap,
                dissipation=dissip,
                z_upper=z,
                sgn_upper=letters,
                kappa_dev_P=kdev_P,
                kappa_dev_Q=kdev_Q,
                tangent_y_P=float(tangents.at_P[1]),
                tangent_y_Q=float(tangents.at_Q[1]),
                dist_lower=dist_lower,
                dist_upper=dist_upper,
                min_height=min_h,
            )
        )
        snapshots.append((t, curve))

        # --- events --------------------------------------------------------
        if chart == "polar" and letters == "+" and min_gap_up > tols.escape_gap:
            event = TerminationEvent(EventKind.ESCAPED, t, f"clearance {min_gap_up:.3e}")
            break
        if dist_lower < tols.converge and dissip < tols.dissipation:
            event = TerminationEvent(
                EventKind.CONVERGED_LOWER, t, f"sup-distance {dist_lower:.3e}"
            )
            break
        if (
            chart == "polar"
            and dist_upper < tols.converge
            and dissip < tols.dissipation
        ):
            event = TerminationEvent(
                EventKind.CONVERGED_UPPER, t, f"sup-distance {dist_upper:.3e}"
            )
            break
        if chart == "polar" and (tangents.at_P[1] <= 0.0 or tangents.at_Q[1] >= 0.0):
            event = TerminationEvent(
                EventKind.CHART_LOSS, t, f"last word {letters or '?'}"
            )
            break
        if t >= horizon - 1e-12:
            event = TerminationEvent(EventKind.HORIZON_REACHED, t, "")
            break

        # --- chart management ----------------------------------------------
        if chart == "graph":
            slope = float(np.max(np.abs(np.diff(u)))) / dx
            if slope > ctl.slope_switch:
                cand = _try_polar_switch(curve, params, u, x_nodes)
                if cand is not None:
                    rho = cand
                    chart = "polar"
                    tracker.reset()
        else:
            if is_graph_representable(curve):
                d = np.diff(curve.points, axis=0)
                slope = float(np.max(np.abs(d[:, 1] / d[:, 0])))
                if slope < 0.5 * ctl.slope_switch:
                    u = switch_chart(curve, "graph", params).u.copy()
                    chart = "graph"
                    tracker.reset()

        # --- advance to the next sample ------------------------------------
        t_next = min(t + ctl.sample_interval, horizon)
        while t < t_next - 1e-12 and event is None:
            if chart == "graph":
                abort = _slope_force(ctl, A) if abort_enabled else None
                t, status = _advance_graph(u, dx, A, t, t_next, ctl, tracker, abort)
                if status == "steep":
                    # hand off to the polar chart mid-interval: the graph
                    # representation fails shortly after this steepness
                    cand = _try_polar_switch(
                        current_curve(), params, u, x_nodes, force=True
                    )
                    if cand is not None:
                        rho = cand
                        chart = "polar"
                        tracker.reset()
                    else:
                        abort_enabled = False
            else:
                t, status = _advance_polar(
                    rho, dth, A, a, t, t_next, ctl, tracker, cos_th, sin_th
                )
            if status == "blown":
                event = TerminationEvent(EventKind.BLOWUP, t, f"in {chart} chart")

    return Trajectory(
        params=params,
        sigma=fam.sigma,
        snapshots=snapshots,
        diagnostics=diagnostics,
        event=event,
        max_step_energy_increase=tracker.max_rise,
    )


def _try_polar_switch(curve, params, u, x_nodes, force=False):
    """Polar resampling of a steep graph, accepted only when faithful.

    A very tall narrow profile is star-shaped yet badly under-resolved on
    the angular grid; switching early would corrupt the state, so the
    round-trip reconstruction must reproduce the heights to within a
    small fraction of the profile scale.  With ``force`` the fidelity
    check is waived: the graph chart is about to fail and any valid
    star-shaped resampling beats none.
    """
    try:
        cand = switch_chart(curve, "polar", params)
    except ValueError:
        return None
    if not force:
        back = polar_to_sampled(cand)
        if not is_graph_representable(back):
            return None
        h = np.interp(x_nodes, back.x, back.y)
        err = float(np.max(np.abs(h - u)))
        if err > 0.01 * (1.0 + float(np.max(np.abs(u)))):
            return None
    return cand.rho.copy()
