"""Closed-form tail quantiles for the standard Normal, next to the exact values."""
import numpy as np

from tailquant.distributions import Normal
from tailquant.gg_tail import gg_lower_approx, gg_lower_expansion, leading_term
from tailquant.oracle import tail_quantile

normal = Normal()
params = normal.tail_params("lower")  # a = 1/sqrt(2 pi), b = -1, c = 1/2, d = e = 2
print(params)

u = np.array([1e-2, 1e-4, 1e-8, 1e-16, 1e-64])

# the oracle inverts the cdf by quadrature + bracketed root finding
exact = np.array([tail_quantile(normal, v).x for v in u])

# leading term: just -sqrt(-2 log u)
y_star = leading_term(params, u)
# full approximant, one log-log correction inside the bracket
y = gg_lower_approx(params, u)
# four-term expansion of the same thing
y4 = gg_lower_expansion(params, u, 4)

print(f"{'u':>8} {'exact':>12} {'leading':>12} {'full':>12} {'expansion4':>12}")
for row in zip(u, exact, y_star, y, y4):
    print("{:8.0e} {:12.6f} {:12.6f} {:12.6f} {:12.6f}".format(*row))

# relative errors shrink at very different speeds
print("leading rel err:", np.abs(y_star / exact - 1))
print("full rel err:   ", np.abs(y / exact - 1))

# far below double range: work with log u directly
from tailquant.gg_tail import approximant_log
from tailquant.oracle import log_tail_quantile
h = log_tail_quantile(normal, -1e4).x
print("log u = -1e4:", h, approximant_log(params, -1e4))
