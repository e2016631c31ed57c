"""Normal lower tail: leading term, full approximant, expansion and a rational baseline.

The same table is what `tailquant compare` writes as CSV.
"""
import numpy as np

from tailquant.analysis import VOUTIER, compare, default_grid
from tailquant.distributions import Normal
from tailquant.gg_tail import ApproxMethod

methods = [ApproxMethod.parse(m) for m in ("leading", "full", "expansion4", "voutier")]
curves = compare(Normal(), "lower", methods, default_grid(points=10, start=1e-3))

print(f"{'u':>8}" + "".join(f"{name:>14}" for name in curves))
for i, row in enumerate(curves["full"].rows):
    print(f"{row.u:8.0e}" + "".join(f"{c.rows[i].rel_err:14.3e}" for c in curves.values()))

# the rational fit is a minimax approximation: its error oscillates in sign
u = np.geomspace(1e-3, 1e-12, 9)
from tailquant.oracle import tail_quantile
print([f"{VOUTIER(v) - tail_quantile(Normal(), v).x:+.2e}" for v in u])

# outside its validity range it refuses rather than extrapolates
try:
    VOUTIER(0.1)
except ValueError as exc:
    print("refused:", exc)
