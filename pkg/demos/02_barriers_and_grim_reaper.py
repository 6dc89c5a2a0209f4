"""
Comparison barriers: the grim reaper and expanding circles
==========================================================

Two moving barriers control the flow from below.  The grim reaper
G(x, t) = C - t/b + b ln cos(x/b) solves the unforced graph flow exactly
and translates downward at speed 1/b; capped at the axis it is a
sub-solution of the driven problem whenever b < 2a/pi.  A circle evolving
by V = -kappa + A grows by R'(t) = A - 1/R once R > 1/A, and a pair of
circles tangent to the upper equilibrium at P turns that growth into an
escape certificate: any initial graph dominating a suitably tall reaper
must cross the upper equilibrium in finite time.
"""

import numpy as np
from scipy.optimize import brentq

from extremalflow import (
    ProblemParams,
    barrier_geometry,
    circle_crossing_time,
    circle_radius,
    grim_reaper_dominating_sigma,
    grim_reaper_subsolution,
    grim_reaper_value,
)

params = ProblemParams(A=1.0, a=0.5, grid_n=201)

# --- the traveling wave ----------------------------------------------------
b, C = 0.25, 3.0
print(f"grim reaper with width b={b}, offset C={C}")
print(f"  center height at t=0: {grim_reaper_value(b, C, 0.0, 0.0)}")
drop = grim_reaper_value(b, C, 0.1, 1.0 + b) - grim_reaper_value(b, C, 0.1, 1.0)
print(f"  drop over one period b: {drop:.12f}  (wave speed 1/b)")

# exact derivatives show the wave solves the unforced flow identically
x = 0.3
gt, gx = -1.0 / b, -np.tan(x / b)
gxx = -1.0 / (b * np.cos(x / b) ** 2)
print(f"  analytic residual G_t - G_xx/(1+G_x^2) = {gt - gxx / (1 + gx**2):.2e}")

sub = grim_reaper_subsolution(params, b, C, t=0.2)
print(f"  capped sub-solution at t=0.2: apex {np.max(sub.y):.4f}, "
      f"{np.sum(sub.y == 0.0)} nodes on the axis")

# --- the expanding circle ----------------------------------------------------
print("\nexpanding circle R' = A - 1/R from R0 = 2:")
for t in (0.5, 1.0, 2.0):
    r_num = circle_radius(2.0, 1.0, t)
    r_exact = brentq(lambda r: circle_crossing_time(2.0, 1.0, r) - t, 2.0, 10.0)
    print(f"  t={t}: R={r_num:.10f}  (implicit form {r_exact:.10f})")

# --- barrier circles and the escape amplitude ---------------------------------
geom = barrier_geometry(params, R=2.0)
print("\nbarrier geometry at R=2:")
print(f"  inner radius {geom.inner.radius}, outer radius {geom.outer.radius}")
print(f"  outer circle distance to P: {geom.outer.distance_to((-0.5, 0.0)):.12f} (tangent)")
print(f"  apex height K = {geom.apex_height:.6f}, crossing time t* = {geom.crossing_time:.6f}")

sigma = grim_reaper_dominating_sigma(params)
print(f"\nany family amplitude above {sigma:.2f} dominates the reaper and must escape")
