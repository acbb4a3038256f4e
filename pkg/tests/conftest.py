import pytest

from finslerc.dsl import MetricSpec, builtin_family, parse_metric
from finslerc.report import sample_points

# A curved, non-Riemannian test metric: constant-curvature conformal factor
# with a Randers drift.  The built-in randers family has constant
# coefficients and is therefore locally Minkowski (flat h-sector); this one
# has non-zero h-curvature, non-zero Cartan tensor and generically no
# recurrence structure.
CURVED_RANDERS_DSL = "sqrt(y1^2+y2^2+y3^2)/(1+0.25*(x1^2+x2^2+x3^2))+0.1*y1"

# x-dependent drift makes the horizontal Ricci tensor visibly asymmetric
TWISTED_DSL = ("sqrt(y1^2+y2^2+y3^2)*exp(0.2*x1+0.1*x2^2)"
               "+0.1*(1+0.3*x2)*y1+0.05*x1*y3")


@pytest.fixture(scope="session")
def euclidean():
    return builtin_family("euclidean", 3)


@pytest.fixture(scope="session")
def const_curv():
    return builtin_family("riemannian_constant_curvature", 3, K=1.0)


@pytest.fixture(scope="session")
def randers():
    return builtin_family("randers", 3)


@pytest.fixture(scope="session")
def quartic():
    return builtin_family("locally_minkowski_quartic", 3)


@pytest.fixture(scope="session")
def curved_randers():
    return MetricSpec(expr=parse_metric(CURVED_RANDERS_DSL, 3), dim=3,
                      name="curved_randers")


@pytest.fixture(scope="session")
def twisted():
    return MetricSpec(expr=parse_metric(TWISTED_DSL, 3), dim=3, name="twisted")


def admissible_points(spec, count, seed=0):
    return sample_points(spec, seed, count)
