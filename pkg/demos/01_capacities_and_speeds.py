"""Carrying capacities, the bistability checks and the a priori speed interval.

Run: python demos/01_capacities_and_speeds.py
"""

from lvwave import check_A2, check_strong, example1, example2, solve_root, speed_interval
from lvwave.spectral import gamma1, spreading_speed_minus, spreading_speed_plus

for name, model in (("example 1", example1()), ("example 2", example2())):
    p, q = model.p, model.q
    print(f"--- {name}")
    print(f"p(0) = {p.samples[0]:.7f}   range [{p.min():.4f}, {p.max():.4f}]")
    print(f"q(0) = {q.samples[0]:.7f}   range [{q.min():.4f}, {q.max():.4f}]")

    # the logistic orbits reproduce the mean growth rates
    pr = model.products
    print(f"mean(a1 p) - mean(r1) = {pr['a1p'].mean() - model.r1.mean:.1e}")

    a2 = check_A2(model)
    print(f"bistability integrals {a2.integral1:.4f}, {a2.integral2:.4f} -> {a2.holds}")
    print(f"strong condition holds: {check_strong(model).holds}")

    minus, plus = spreading_speed_minus(model), spreading_speed_plus(model)
    lo, hi = speed_interval(model)
    print(f"c*- = {minus.speed:.6f} (mu = {minus.mu:.5f}), c*+ = {plus.speed:.6f} (mu = {plus.mu:.5f})")
    print(f"any bistable wave speed lies in [{lo:.4f}, {hi:.4f}]")

    roots = {eq: solve_root(model, eq).mu for eq in ("I1", "h1", "I2", "h2")}
    print("decay rates at c = 0:", {k: round(v, 6) for k, v in roots.items()})

    # the speed is the slope of the tangent from the origin to gamma1
    h = 1e-6
    slope = (gamma1(model, minus.mu + h) - gamma1(model, minus.mu - h)) / (2 * h)
    print(f"gamma1'(mu*) = {slope:.6f}, matching c*-")
