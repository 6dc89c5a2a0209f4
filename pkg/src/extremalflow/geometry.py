"""Curve representations and differential geometry for pinned planar curves.

Every curve handled by this package joins two fixed endpoints
P = (-a, 0) and Q = (a, 0).  Three representations are used:

* ``GraphProfile``  -- heights u(x) on a uniform grid over [-a, a],
* ``PolarProfile``  -- radii rho(theta) about the origin on [0, pi],
* ``SampledCurve``  -- a chart-free polyline ordered from P to Q.

The curvature sign is fixed so that a concave-down graph has positive
curvature.  With the flow law V = -kappa + A this makes the circular-arc
equilibria (where kappa = A everywhere) stationary in both charts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProblemParams",
    "GraphProfile",
    "PolarProfile",
    "SampledCurve",
    "EndpointTangents",
    "graph_to_sampled",
    "polar_to_sampled",
    "curvature_graph",
    "curvature_polar",
    "length",
    "enclosed_area",
    "endpoint_tangents",
    "polyline_curvature",
    "is_graph_representable",
    "is_star_shaped",
]

# Curves are treated as confined to {y >= 0} when no point dips below this.
AXIS_TOL = 1e-9


@dataclass(frozen=True)
class ProblemParams:
    """Problem constants: driving force ``A`` and endpoint half-span ``a``.

    Requires A > 0 and 0 < a <= 1/A.  ``grid_n`` is the node count used by
    each chart; it must be odd (so the symmetry axis x = 0 / theta = pi/2
    is a node) and at least 17.
    """

    A: float
    a: float
    grid_n: int = 201

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError(f"driving force A must be positive, got {self.A}")
        if not 0 < self.a <= 1.0 / self.A:
            raise ValueError(
                f"half-span must satisfy 0 < a <= 1/A, got a={self.a}, 1/A={1.0 / self.A}"
            )
        if self.a == 1.0 / self.A:
            warnings.warn(
                "a == 1/A: the lower and upper equilibria coincide (degenerate "
                "semicircle); the convergence categories collapse.",
                stacklevel=2,
            )
        if self.grid_n < 17 or self.grid_n % 2 == 0:
            raise ValueError(f"grid_n must be odd and >= 17, got {self.grid_n}")

    @property
    def dx(self) -> float:
        return 2.0 * self.a / (self.grid_n - 1)

    @property
    def dtheta(self) -> float:
        return np.pi / (self.grid_n - 1)

    @property
    def radius(self) -> float:
        """Radius 1/A of the equilibrium circular arcs."""
        return 1.0 / self.A

    @property
    def center_offset(self) -> float:
        """Vertical offset sqrt(1/A^2 - a^2) of the equilibrium circle centers."""
        return float(np.sqrt(max(self.radius**2 - self.a**2, 0.0)))

    def x_nodes(self) -> np.ndarray:
        return np.linspace(-self.a, self.a, self.grid_n)

    def theta_nodes(self) -> np.ndarray:
        return np.linspace(0.0, np.pi, self.grid_n)


def _finite(arr) -> bool:
    return bool(np.all(np.isfinite(arr)))


@dataclass(frozen=True)
class GraphProfile:
    """Heights u at the uniform x-nodes of ``params``, pinned to 0 at both ends."""

    params: ProblemParams
    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        if u.shape != (self.params.grid_n,):
            raise ValueError(f"u must have {self.params.grid_n} entries, got {u.shape}")
        if not _finite(u):
            raise ValueError("graph profile contains non-finite heights")
        if u[0] != 0.0 or u[-1] != 0.0:
            raise ValueError("graph profile must be pinned to exactly 0 at both endpoints")


@dataclass(frozen=True)
class PolarProfile:
    """Radii rho at the uniform theta-nodes of ``params``.

    theta = 0 maps to Q = (a, 0) and theta = pi to P = (-a, 0), so both
    boundary radii are pinned to exactly ``a``.
    """

    params: ProblemParams
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        if rho.shape != (self.params.grid_n,):
            raise ValueError(f"rho must have {self.params.grid_n} entries, got {rho.shape}")
        if not _finite(rho):
            raise ValueError("polar profile contains non-finite radii")
        if rho[0] != self.params.a or rho[-1] != self.params.a:
            raise ValueError("polar profile must be pinned to exactly a at both endpoints")
        if np.any(rho <= 0.0):
            raise ValueError("polar radii must be strictly positive")


@dataclass(frozen=True)
class SampledCurve:
    """Chart-free polyline from P = (-a, 0) to Q = (a, 0).

    ``points`` is an (n, 2) array ordered from P to Q.  Consecutive points
    must be distinct; simplicity (absence of self-intersections) is not
    enforced on construction but can be checked with :meth:`is_simple`.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("points must be an (n, 2) array with n >= 2")
        if not _finite(pts):
            raise ValueError("curve contains non-finite coordinates")
        if pts[0, 1] != 0.0 or pts[-1, 1] != 0.0:
            raise ValueError("endpoints must lie exactly on the axis y = 0")
        if not (pts[-1, 0] > 0.0 and pts[0, 0] == -pts[-1, 0]):
            raise ValueError("endpoints must be (-a, 0) and (a, 0) with a > 0")
        if np.any(np.all(np.diff(pts, axis=0) == 0.0, axis=1)):
            raise ValueError("consecutive points must be distinct")

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def half_span(self) -> float:
        return float(self.points[-1, 0])

    def is_simple(self) -> bool:
        """Check for self-intersections by brute-force segment pair tests."""
        p = self.points
        n = len(p) - 1  # segment count
        a0, a1 = p[:-1], p[1:]

        def orient(pa, pb, pc):
            return (pb[..., 0] - pa[..., 0]) * (pc[..., 1] - pa[..., 1]) - (
                pb[..., 1] - pa[..., 1]
            ) * (pc[..., 0] - pa[..., 0])

        # Broadcast all segment pairs (i, j); adjacency and self-pairs excluded.
        i = np.arange(n)
        sep = np.abs(i[:, None] - i[None, :]) > 1
        d1 = orient(a0[:, None], a1[:, None], a0[None, :])
        d2 = orient(a0[:, None], a1[:, None], a1[None, :])
        d3 = orient(a0[None, :], a1[None, :], a0[:, None])
        d4 = orient(a0[None, :], a1[None, :], a1[:, None])
        crossing = (d1 * d2 < 0) & (d3 * d4 < 0)
        return not bool(np.any(crossing & sep))

    def to_csv(self, path) -> None:
        """Write the polyline as CSV with header ``x,y`` (17 significant digits)."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("x,y\n")
            for px, py in self.points:
                fh.write(f"{px:.17g},{py:.17g}\n")


@dataclass(frozen=True)
class EndpointTangents:
    """Unit tangent vectors at P and Q, both taken along the P -> Q direction."""

    at_P: np.ndarray
    at_Q: np.ndarray

    def __post_init__(self):
        for name in ("at_P", "at_Q"):
            v = np.array(getattr(self, name), dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, name, v)
            if v.shape != (2,):
                raise ValueError(f"{name} must be a 2-vector")
            if abs(np.hypot(v[0], v[1]) - 1.0) > 1e-12:
                raise ValueError(f"{name} must have unit norm")


# ---------------------------------------------------------------------------
# chart conversions
# ---------------------------------------------------------------------------


def graph_to_sampled(g: GraphProfile) -> SampledCurve:
    """Sample a graph profile as a polyline, one point per grid node."""
    pts = np.column_stack([g.params.x_nodes(), g.u])
    return SampledCurve(pts)


def polar_to_sampled(p: PolarProfile) -> SampledCurve:
    """Sample a polar profile as a polyline ordered from P to Q.

    theta = 0 corresponds to Q, so the node order is reversed.  Endpoints
    are pinned exactly (sin(pi) is not exactly zero in floating point).
    """
    th = p.params.theta_nodes()
    pts = np.column_stack([p.rho * np.cos(th), p.rho * np.sin(th)])[::-1]
    pts[0] = (-p.params.a, 0.0)
    pts[-1] = (p.params.a, 0.0)
    return SampledCurve(pts)


def is_graph_representable(c: SampledCurve) -> bool:
    """True when the polyline is single-valued over x (strictly increasing x)."""
    return bool(np.all(np.diff(c.x) > 0.0))


def is_star_shaped(c: SampledCurve, axis_tol: float = 1e-12) -> bool:
    """True when the polyline is star-shaped about the origin with y >= 0.

    Equivalent to the polar angle decreasing strictly from pi to 0 along
    the P -> Q order, which makes rho(theta) single-valued.
    """
    if np.any(c.y < -axis_tol):
        return False
    th = np.arctan2(np.maximum(c.y, 0.0), c.x)
    return bool(np.all(np.diff(th) < 0.0))


# ---------------------------------------------------------------------------
# differential quantities
# ---------------------------------------------------------------------------


def curvature_graph(g: GraphProfile) -> np.ndarray:
    """Signed curvature at the interior nodes of a graph profile.

    Second-order central differences; concave-down profiles get kappa > 0,
    so the circular-cap equilibrium carries kappa = +A.
    """
    if g.params.grid_n < 5:
        raise ValueError("need at least 5 nodes for interior curvature")
    dx = g.params.dx
    u = g.u
    ux = (u[2:] - u[:-2]) / (2.0 * dx)
    uxx = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dx**2
    return -uxx / (1.0 + ux**2) ** 1.5


def curvature_polar(p: PolarProfile) -> np.ndarray:
    """Signed curvature at the interior nodes of a polar profile.

    Standard polar formula (rho^2 + 2 rho_t^2 - rho rho_tt) / W^3 with
    W^2 = rho^2 + rho_t^2; positive for arcs bending around the origin,
    matching the graph-chart sign convention on shared curves.
    """
    if p.params.grid_n < 5:
        raise ValueError("need at least 5 nodes for interior curvature")
    dth = p.params.dtheta
    r = p.rho
    rt = (r[2:] - r[:-2]) / (2.0 * dth)
    rtt = (r[2:] - 2.0 * r[1:-1] + r[:-2]) / dth**2
    ri = r[1:-1]
    w2 = ri**2 + rt**2
    return (ri**2 + 2.0 * rt**2 - ri * rtt) / w2**1.5


def length(c: SampledCurve) -> float:
    """Polyline length (sum of chord lengths)."""
    d = np.diff(c.points, axis=0)
    return float(np.sum(np.hypot(d[:, 0], d[:, 1])))


def enclosed_area(c: SampledCurve) -> float:
    """Area enclosed between the curve and the axis segment from Q back to P.

    Shoelace formula over the polygon closed along y = 0; positive for
    curves above the axis.  Curves dipping below y = -1e-9 are rejected
    because the enclosed region is then ill-defined.
    """
    if np.min(c.y) < -AXIS_TOL:
        raise ValueError("enclosed area undefined: curve dips below the axis")
    x, y = c.x, c.y
    # Closing segment Q -> P lies on y = 0 and contributes nothing.
    s = np.sum(x[1:] * y[:-1] - x[:-1] * y[1:])
    return float(0.5 * s)


def _lagrange_derivative_at_zero(s1: float, s2: float, p0, p1, p2):
    """Derivative at parameter 0 of the quadratic through (0,p0),(s1,p1),(s2,p2)."""
    c0 = -(s1 + s2) / (s1 * s2)
    c1 = s2 / (s1 * (s2 - s1))
    c2 = -s1 / (s2 * (s2 - s1))
    return c0 * p0 + c1 * p1 + c2 * p2


def endpoint_tangents(c: SampledCurve) -> EndpointTangents:
    """Unit tangents at P and Q from one-sided 3-point stencils.

    Both tangents point in the P -> Q direction: ``at_P`` leaves P along
    the curve, ``at_Q`` arrives at Q.  The y-component of ``at_P`` is the
    chart-regularity indicator used by the evolvers.
    """
    pts = c.points
    if len(pts) < 3:
        raise ValueError("need at least 3 points for endpoint tangents")
    seg = np.hypot(*np.diff(pts, axis=0).T)
    s1, s2 = seg[0], seg[0] + seg[1]
    vP = _lagrange_derivative_at_zero(s1, s2, pts[0], pts[1], pts[2])
    s1b, s2b = seg[-1], seg[-1] + seg[-2]
    vQ = -_lagrange_derivative_at_zero(s1b, s2b, pts[-1], pts[-2], pts[-3])
    vP = vP / np.hypot(vP[0], vP[1])
    vQ = vQ / np.hypot(vQ[0], vQ[1])
    return EndpointTangents(at_P=vP, at_Q=vQ)


def polyline_curvature(c: SampledCurve) -> np.ndarray:
    """Signed curvature at every node of a polyline, chart-free.

    Interior nodes use the circle through three consecutive points; the
    endpoints reuse the circles of their adjacent interior nodes (one-sided
    estimates).  Signs follow the package convention: arcs bending downward
    toward the enclosed region (concave-down graphs) are positive.
    """
    pts = c.points
    n = len(pts)
    if n < 5:
        raise ValueError("need at least 5 points for curvature estimates")
    p0, p1, p2 = pts[:-2], pts[1:-1], pts[2:]
    e1 = p1 - p0
    e2 = p2 - p1
    e3 = p2 - p0
    cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    l1 = np.hypot(e1[:, 0], e1[:, 1])
    l2 = np.hypot(e2[:, 0], e2[:, 1])
    l3 = np.hypot(e3[:, 0], e3[:, 1])
    interior = -2.0 * cross / (l1 * l2 * l3)
    kappa = np.empty(n)
    kappa[1:-1] = interior
    kappa[0] = interior[0]
    kappa[-1] = interior[-1]
    return kappa
