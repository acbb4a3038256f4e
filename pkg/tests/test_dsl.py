import numpy as np
import pytest

from finslerc.dsl import (MetricSpec, builtin_family, check_homogeneity,
                          eval_expr, metric_from_json, parse_metric)
from finslerc.errors import (DimensionError, DomainError,
                             HomogeneityViolation, MetricSyntaxError,
                             UnknownSymbol)
from finslerc.jets import constant_jet, jet_space

from conftest import admissible_points


# ----------------------------------------------------------------------
# parsing


def test_parse_euclidean_norm():
    e = parse_metric("sqrt((y1^2+y2^2+y3^2))", 3)
    assert e.dim == 3
    assert e.evaluate([0, 0, 0], [3.0, 4.0, 0.0]) == pytest.approx(5.0)


def test_parse_randers_type():
    e = parse_metric("sqrt(y1^2+y2^2+y3^2) + 0.3*y1", 3)
    assert e.evaluate([0, 0, 0], [1.0, 0.0, 0.0]) == pytest.approx(1.3)


def test_out_of_range_symbol():
    with pytest.raises(UnknownSymbol) as exc:
        parse_metric("sqrt(y1^2+y4^2)", 3)
    assert "y4" in str(exc.value)


def test_unknown_function():
    with pytest.raises(UnknownSymbol):
        parse_metric("tanh(y1)", 3)


def test_dimension_error():
    with pytest.raises(DimensionError):
        parse_metric("sqrt(y1^2+y2^2)", 2)


def test_syntax_error_carries_position():
    with pytest.raises(MetricSyntaxError) as exc:
        parse_metric("y1 +\n* y2", 3)
    assert exc.value.line == 2
    assert exc.value.column == 1


@pytest.mark.parametrize("text,value", [
    ("1+2*3^2", 19.0),          # ^ above *, * above +
    ("2^3^2", 512.0),           # right associative
    ("6/3/2", 1.0),             # left associative
    ("-y1^2", -9.0),            # ^ binds tighter than unary minus
    ("2^-2", 0.25),             # unary minus allowed in the exponent
    ("(1+2)*3", 9.0),
])
def test_precedence(text, value):
    e = parse_metric(text, 3)
    assert e.evaluate([0, 0, 0], [3.0, 1.0, 1.0]) == pytest.approx(value)


def test_pretty_roundtrip_on_samples():
    sources = [
        "sqrt(y1^2+y2^2+y3^2)",
        "sqrt(y1^2+y2^2+y3^2)+0.3*y1",
        "(y1^4+y2^4+y3^4)^(1/4)",
        "-y1^2+y2*(y3-y1)/2",
        "sin(x1)*cos(x2)+exp(log(1+x3^2))",
        "1/(1+0.25*(x1^2+x2^2+x3^2))",
        "2^-2*y1-(-y2)",
    ]
    for src in sources:
        printed = parse_metric(src, 3).pretty()
        again = parse_metric(printed, 3).pretty()
        assert again == printed


def test_pretty_roundtrip_random_trees():
    # generate random expression sources, print, re-parse, re-print
    rng = np.random.default_rng(4)

    def gen(depth):
        r = rng.integers(0, 7 if depth < 4 else 2)
        if r == 0:
            return f"{rng.integers(1, 9)}"
        if r == 1:
            return f"{'xy'[rng.integers(0, 2)]}{rng.integers(1, 4)}"
        if r == 2:
            return f"({gen(depth + 1)}+{gen(depth + 1)})"
        if r == 3:
            return f"({gen(depth + 1)}*{gen(depth + 1)})"
        if r == 4:
            return f"(-{gen(depth + 1)})"
        if r == 5:
            return f"({gen(depth + 1)}-{gen(depth + 1)})"
        return f"({gen(depth + 1)}/{rng.integers(1, 9)})"

    for _ in range(40):
        printed = parse_metric(gen(0), 3).pretty()
        assert parse_metric(printed, 3).pretty() == printed


# ----------------------------------------------------------------------
# evaluation


def test_quartic_value(quartic):
    assert quartic.F([0, 0, 0], [1.0, 1.0, 1.0]) == pytest.approx(3 ** 0.25)


def test_slit_bundle_exclusion(euclidean):
    with pytest.raises(DomainError):
        euclidean.F([0, 0, 0], [0.0, 0.0, 0.0])


def test_division_by_zero_raises():
    e = parse_metric("y1/x1", 3)
    with pytest.raises(DomainError):
        e.evaluate([0.0, 1, 1], [2.0, 1, 1])


def test_jets_with_zero_derivative_parts_match_floats(euclidean, randers,
                                                      const_curv, quartic):
    space = jet_space(6, 4)
    rng = np.random.default_rng(8)
    for spec in (euclidean, randers, const_curv, quartic):
        for _ in range(5):
            x = rng.uniform(-0.4, 0.4, 3)
            y = rng.uniform(0.3, 1.5, 3)
            plain = spec.F(list(x), list(y))
            lifted = spec.F([constant_jet(space, v) for v in x],
                            [constant_jet(space, v) for v in y])
            assert lifted.value == plain  # bit-identical


def test_eval_expr_coordinate_count_mismatch(euclidean):
    with pytest.raises(ValueError):
        eval_expr(euclidean.expr, [0, 0], [1, 1])


# ----------------------------------------------------------------------
# built-in families and the metric JSON shape


def test_families_construct_and_describe():
    for kind in ("euclidean", "riemannian_constant_curvature", "randers",
                 "locally_minkowski_quartic"):
        params = {"K": -0.5} if kind == "riemannian_constant_curvature" else {}
        spec = builtin_family(kind, 3, **params)
        assert spec.dim == 3
        assert spec.describe()["family"] == kind


def test_randers_convexity_guard():
    with pytest.raises(ValueError):
        builtin_family("randers", 3, b=np.array([1.1, 0.0, 0.0]))


def test_metric_from_json_dsl_and_family():
    spec = metric_from_json({"dim": 3, "metric": {"dsl": "sqrt(y1^2+y2^2+y3^2)"}})
    assert spec.F([0, 0, 0], [3.0, 4.0, 0.0]) == pytest.approx(5.0)
    spec2 = metric_from_json({"dim": 4, "metric": {
        "family": "randers", "params": {"b": [0.2, 0, 0, 0]}}})
    assert spec2.dim == 4
    with pytest.raises(UnknownSymbol):
        metric_from_json({"dim": 3, "metric": {"family": "nope"}})


# ----------------------------------------------------------------------
# homogeneity


@pytest.mark.parametrize("kind,params", [
    ("euclidean", {}),
    ("riemannian_constant_curvature", {"K": 1.0}),
    ("randers", {}),
    ("locally_minkowski_quartic", {}),
])
def test_builtin_family_homogeneity(kind, params):
    spec = builtin_family(kind, 3, **params)
    samples = admissible_points(spec, 100, seed=5)
    rep = check_homogeneity(spec, samples, [0.5, 3.0], tol=1e-12)
    assert rep.passed
    assert rep.checked == 200


def test_homogeneity_violation_for_squared_metric():
    spec = MetricSpec(expr=parse_metric("y1^2+y2^2+y3^2", 3), dim=3)
    samples = admissible_points(spec, 5, seed=6)
    with pytest.raises(HomogeneityViolation):
        check_homogeneity(spec, samples, [2.0])


def test_homogeneity_exact_doubling(euclidean):
    base = euclidean.F([0, 0, 0], [1.0, 0.0, 0.0])
    assert euclidean.F([0, 0, 0], [2.0, 0.0, 0.0]) == 2.0 * base
