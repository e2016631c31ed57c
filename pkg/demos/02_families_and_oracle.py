"""Tail constants of each family, and how good the bare tail model is."""
import numpy as np

from tailquant.distributions import (
    Gamma, Normal, SkewNormal, SkewSlash, VarianceGamma, tail_cdf_model,
)
from tailquant.oracle import cdf, log_tail_mass, sf, tail_quantile

families = [
    (Normal(), "lower"),
    (SkewNormal(1.0), "lower"),
    (SkewNormal(-1.0), "lower"),
    (Gamma(2.0, 1.0), "upper"),
    (VarianceGamma(0.5, 0.5), "lower"),
    (SkewSlash(1.0, 1.0), "lower"),
]

for dist, side in families:
    p = dist.tail_params(side)
    print(f"{dist.label():32s} {side:5s} a={p.a:.6g} b={p.b:g} c={p.c:g} d={p.d:g} e={p.e:g}")

# the oracle agrees with closed forms where they exist
print(cdf(Normal(), -1.959963984540054))       # 0.025
print(sf(Gamma(1.0, 1.0), 2.995732273553991))  # 0.05

# true tail mass over the tail model a|x|^b exp(-c|x|^d): the gap shrinks like |x|^-e
xs = np.array([5.0, 10.0, 20.0])
for dist, side in families:
    sign = -1 if side == "lower" else 1
    ratios = [np.exp(log_tail_mass(dist, sign * x, side)) / tail_cdf_model(dist, side, sign * x) for x in xs]
    print(f"{dist.label():32s}", " ".join(f"{r:.6f}" for r in ratios))

# quantiles for every family at one tail mass
for dist, side in families:
    res = tail_quantile(dist, 1e-9, side)
    print(f"{dist.label():32s} h = {res.x:+.12f}  residual {res.achieved_residual:.1e}")
