import pytest

from tailquant.distributions import Gamma, Normal, SkewNormal, SkewSlash, VarianceGamma
from tailquant.gg_tail import Tail

# every supported (distribution, side) pair at the parameters used throughout the suite
PAIRS = [
    (Normal(), Tail.LOWER),
    (Normal(), Tail.UPPER),
    (SkewNormal(1.0), Tail.LOWER),
    (SkewNormal(-1.0), Tail.LOWER),
    (Gamma(2.0, 1.0), Tail.UPPER),
    (VarianceGamma(0.5, 0.5), Tail.LOWER),
    (SkewSlash(1.0, 1.0), Tail.LOWER),
]


def pair_id(pair):
    dist, side = pair
    return f"{dist.label()}-{side}"


@pytest.fixture(params=PAIRS, ids=pair_id)
def pair(request):
    return request.param
