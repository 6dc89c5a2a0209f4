"""
Intersection words and the curve semi-order
===========================================

Two pinned curves are compared through the sign of their gap between
consecutive intersections, read as an ordered word over {+, -}.  The
word algebra (subword = ordered subsequence) is what classifies the flow:
along any pair of evolving curves the intersection count is
non-increasing and the word can only simplify.
"""

import numpy as np

from extremalflow import (
    InitialFamily,
    ProblemParams,
    SampledCurve,
    SgnWord,
    gamma_lower,
    gamma_upper,
    graph_to_sampled,
    initial_curve,
    intersection_count,
    polar_to_sampled,
    semi_order,
    sgn_word,
    subword,
)

params = ProblemParams(A=1.0, a=0.5, grid_n=201)
upper = polar_to_sampled(gamma_upper(params))
lower = graph_to_sampled(gamma_lower(params))
x = params.x_nodes()


def pinned(y):
    y = np.asarray(y, float).copy()
    y[0] = 0.0
    y[-1] = 0.0
    return SampledCurve(np.column_stack([x, y]))


# --- words against the upper equilibrium ------------------------------------
for sigma in (0.1, 5.0, -1.0):
    curve = graph_to_sampled(initial_curve(InitialFamily(params, sigma=sigma)))
    w = sgn_word(curve, upper)
    print(f"sigma={sigma:+.1f} vs upper arc: word [{w}]  Z={w.z}")

# --- a handmade six-intersection configuration --------------------------------
base = pinned(0.3 * np.cos(np.pi * x))
ripple = pinned(base.y + 0.05 * np.sin(5 * np.pi * (x + params.a)))
w = sgn_word(base, ripple)
print(f"\nbase vs rippled copy: word [{w}]  Z={intersection_count(base, ripple)}")
print(f"swapped arguments:    word [{sgn_word(ripple, base)}]")

# --- subword algebra -------------------------------------------------------------
print("\nsubword (ordered subsequence) examples:")
for big, small in (("+-", "+"), ("+-", "-"), ("+-", "-+"), ("-+-", "+"), ("-+-", "--")):
    ok = subword(SgnWord(big), SgnWord(small))
    print(f"  [{big}] > [{small}] : {ok}")

# --- semi-order -----------------------------------------------------------------
print("\nsemi-order:")
print(f"  upper arc vs lower cap : {semi_order(upper, lower)}")
print(f"  lower cap vs upper arc : {semi_order(lower, upper)}")
c5 = graph_to_sampled(initial_curve(InitialFamily(params, sigma=5.0)))
print(f"  sigma=5 family vs upper: {semi_order(c5, upper)}")
print(f"  a curve against itself : {semi_order(c5, c5)}")
