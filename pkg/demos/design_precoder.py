"""Design a precoder under a condition-number bound and print the scan.

Run with ``python3 demos/design_precoder.py [alpha0]``.
"""

import sys

from jspofdm import DesignSpec, build_grid, design_under_constraint

alpha0 = float(sys.argv[1]) if len(sys.argv) > 1 else 10.0

# 300 data carriers, two reserved carriers per band edge
grid = build_grid(300, 2, "double", [(-151, -1), (1, 151)])
spec = DesignSpec(alpha0=alpha0, omega_a0=(-4000.0, 4000.0), omega_b0=(-151.5, 151.5))
result = design_under_constraint(spec, grid)

pre = result.precoder
print(f"alpha0 = {alpha0:g}: {result.iterations} iterations, truncated={result.truncated}")
print(f"omega_a = {pre.omega_a.tolist()}, omega_b = {pre.omega_b.tolist()}")
print(f"Con(P) = {pre.alpha:.4f}, P is {pre.M} x {pre.N}")
for step in result.trace[:: max(1, len(result.trace) // 8)]:
    print(f"  step {step.iteration:4d}: omega_b = {step.omega_b}, alpha = {step.alpha:.4f}")
