"""Explicit tests for the sign of the bistable wave speed.

The positive test needs a constant k1 between two ratio curves for every t.
The negative test needs k4 in a similar band, for some s0 in (0, 1).
"""

import numpy as np

from lvwave import ModelParams, classify, example1, example2, th1_check, th2_check, th2_search

m1, m2 = example1(), example2()

c1 = th1_check(m1)
print(f"example 1: {c1.verdict}, mu1(0) = {c1.mu1_at_0:.6f}")
print(f"  k1 must lie in ({c1.k_interval[0]:.5f}, {c1.k_interval[1]:.5f}), worst margin {c1.worst_margin:.4f}")

c2 = th2_check(m2, 0.81)
print(f"example 2 at s0 = 0.81: {c2.verdict}, k4 band ({c2.k_interval[0]:.5f}, {c2.k_interval[1]:.5f})")

best = th2_search(m2)
print(f"best s0 on the grid: {best.s0} with margin {best.worst_margin:.4f}")

# margin profile over s0, to see how wide the certifying window is
for s0 in (0.3, 0.6, 0.72, 0.81, 0.9):
    print(f"  s0={s0:.2f}: {th2_check(m2, s0).worst_margin:+.4f}")

# two identical species: the true speed is zero and neither test may fire
toy = ModelParams.constant(1.0, d1=1, r1=1, a1=1, b1=2, d2=1, r2=1, a2=2, b2=1)
print("symmetric toy:", classify(toy, t_samples=128).verdict)

for name, m in (("example 1", m1), ("example 2", m2)):
    cert = classify(m)
    lo, hi = cert.interval
    print(f"{name}: {cert.verdict}, speed in [{lo:.3f}, {hi:.3f}]")
    d = cert.to_dict()
    print("  per-t worst margins:", {k: round(v, 4) for k, v in d["per_t_worst_margins"].items()})
