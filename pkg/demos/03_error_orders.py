"""Measured relative error against the predicted order, per family.

ratio = rel_err / predicted_order should settle to a constant; a log-log
fit of rel_err on the predicted order should have slope near 1.
"""
from tailquant.analysis import build_error_curve, default_grid, expansion_ladder, fit_order
from tailquant.distributions import Gamma, Normal, SkewNormal, SkewSlash, VarianceGamma
from tailquant.gg_tail import FULL

grid = default_grid()  # 41 tail masses 1e-2 .. 1e-12

for dist, side in [(Normal(), "lower"), (Gamma(2.0), "upper"), (SkewNormal(1.0), "lower"),
                   (VarianceGamma(0.5, 0.5), "lower"), (SkewSlash(1.0, 1.0), "lower")]:
    curve = build_error_curve(dist, side, FULL, grid)
    ratio = curve.column("ratio")
    fit = fit_order(curve)
    print(f"{dist.label():30s} ratio {ratio.min():.3f}..{ratio.max():.3f}  "
          f"slope {fit.slope:.3f}  r2 {fit.r_squared:.3f}")

# closer to the bulk the ratio is still moving; push the grid down to 1e-100
deep = default_grid(points=21, extended=True)
for dist in (SkewNormal(1.0), SkewSlash(1.0, 1.0)):
    curve = build_error_curve(dist, "lower", FULL, deep)
    print(dist.label(), " ".join(f"{r:.3f}" for r in curve.column("ratio")[::4]))

# each extra expansion term should leave a residual of the size of the next term
for col in expansion_ladder(Normal(), "lower", grid):
    print(f"k={col.k}: max |h - expansion_k| / |next term| = {col.max_ratio:.3f}")
