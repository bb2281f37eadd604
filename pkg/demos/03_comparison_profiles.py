"""Check the comparison profiles behind the sign tests.

A lower solution must give a nonnegative residual in both equations, an
upper solution a nonpositive one.  The lower profile for example 1 passes.
The upper profile for example 2 does not: near the junction where
Phi = max(s0, sigma) leaves its floor, the convolution of the flat part lifts
the residual well above zero.
"""

import numpy as np

from lvwave import build_lower_th1, build_upper_th2, example1, example2, residuals

m1 = example1()
lower = build_lower_th1(m1, c_small=1e-3)
rep = residuals(m1, lower)
w = rep.worst
print(f"lower profile, k1 = {lower.k:.5f}, c = {lower.c}")
print(f"  min R1 = {w['R1']['value']:.3e}, min R2 = {w['R2']['value']:.3e}, passes: {rep.passes}")

m2 = example2()
upper = build_upper_th2(m2, s0=0.81, c_small=-1e-3)
rep = residuals(m2, upper)
w = rep.worst
print(f"upper profile, k4 = {upper.k:.5f}, s0 = {upper.s0}, c = {upper.c}")
print(f"  max R1 = {w['R1']['value']:.3e} at z = {w['R1']['z']:.2f}, t = {w['R1']['t']:.3f}")
print(f"  max R2 = {w['R2']['value']:.3e} at z = {w['R2']['z']:.2f}, passes: {rep.passes}")

# where the positive part sits relative to the junctions
j = int(np.argmin(np.abs(rep.t - w["R1"]["t"])))
z1, z2 = float(upper.z1(rep.t[j])), float(upper.z2(rep.t[j]))
bad = rep.z[(rep.R1[:, j] > 1e-6) & rep.mask[:, j]]
print(f"  junctions z1 = {z1:.2f}, z2 = {z2:.2f}; R1 > 0 on z in [{bad.min():.2f}, {bad.max():.2f}]")
