import numpy as np
import pytest

from finslerc.cartan import (connection_at, fundamental_tensor, h_curvature,
                             h_covariant_derivative, hv_and_v_curvature,
                             v_covariant_derivative)
from finslerc.errors import (NotPositiveDefinite, OrderExceeded,
                             SingularMetric)
from finslerc.special import ricci_and_scalar

from conftest import admissible_points


def conformal_factor_christoffels(x, K):
    """Closed-form Christoffel symbols of a_ij = delta_ij/(1+(K/4)|x|^2)^2."""
    n = len(x)
    phi = -(K / 2.0) * x / (1.0 + (K / 4.0) * float(x @ x))
    gam = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                gam[i, j, k] = ((i == j) * phi[k] + (i == k) * phi[j]
                                - (j == k) * phi[i])
    return gam


# ----------------------------------------------------------------------
# fundamental tensor


def test_euclidean_metric_is_identity(euclidean):
    g, g_inv = fundamental_tensor(euclidean, (np.zeros(3), np.array([0.3, 1.0, -2.0])))
    assert np.allclose(g.data, np.eye(3), atol=1e-14)
    assert np.allclose(g_inv.data, np.eye(3), atol=1e-14)


def test_randers_g11_value(randers):
    # F = 1.3 at this point and the y-Hessian correction vanishes, so
    # g_11 = (dF/dy1)^2 = 1.69
    g, _ = fundamental_tensor(randers, (np.zeros(3), np.array([1.0, 0.0, 0.0])))
    assert g.data[0, 0] == pytest.approx(1.69, abs=1e-12)


def test_quartic_degenerates_on_axes(quartic):
    with pytest.raises((SingularMetric, NotPositiveDefinite)):
        fundamental_tensor(quartic, (np.zeros(3), np.array([1.0, 1.0, 0.0])))


def test_g_inverse_consistency(curved_randers):
    for (x, y) in admissible_points(curved_randers, 5, seed=1):
        conn = connection_at(curved_randers, (x, y))
        prod = conn.g.value @ conn.g_inv.value
        assert np.max(np.abs(prod - np.eye(3))) < 1e-10


# ----------------------------------------------------------------------
# spray and connection coefficients


def test_euclidean_connection_is_flat(euclidean):
    conn = connection_at(euclidean, (np.zeros(3), np.array([1.0, 0.4, -0.3])))
    assert np.max(np.abs(conn.spray.value)) == 0.0
    assert np.max(np.abs(conn.N.value)) == 0.0
    assert np.max(np.abs(conn.gamma.value)) == 0.0
    assert np.max(np.abs(conn.cartan.value)) < 1e-15


def test_constant_curvature_coefficients_match_christoffels(const_curv):
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.4, 0.4, 3)
    gam_exact = conformal_factor_christoffels(x, K=1.0)
    for y in (rng.standard_normal(3), rng.standard_normal(3)):
        conn = connection_at(const_curv, (x, y))
        assert np.max(np.abs(conn.cartan.value)) < 1e-12
        # y-independent and equal to the conformal-factor Christoffels
        assert np.max(np.abs(conn.gamma.value - gam_exact)) < 1e-11


def test_randers_has_nonzero_cartan_tensor(randers):
    conn = connection_at(randers, (np.zeros(3), np.array([1.0, 0.7, -0.2])))
    assert np.max(np.abs(conn.cartan.value)) > 1e-3


@pytest.mark.parametrize("fixture_name", ["euclidean", "const_curv", "randers",
                                          "quartic", "curved_randers"])
def test_connection_axioms(fixture_name, request):
    spec = request.getfixturevalue(fixture_name)
    for (x, y) in admissible_points(spec, 4, seed=11):
        res = connection_at(spec, (x, y)).axiom_residuals()
        assert res["g_symmetry"] < 1e-12
        assert res["hh_torsion"] < 1e-12
        assert res["cartan_total_symmetry"] < 1e-10
        assert res["cartan_annihilates_eta"] < 1e-10
        assert res["deflection"] < 1e-10
        assert res["h_metricity"] < 1e-10
        assert res["v_metricity"] < 1e-10
        assert res["euler_g"] < 1e-9
        assert res["euler_N"] < 1e-9
        assert res["euler_spray"] < 1e-9


# ----------------------------------------------------------------------
# h-curvature


def test_euclidean_curvature_vanishes(euclidean):
    conn = connection_at(euclidean, (np.zeros(3), np.array([1.0, 0.4, -0.3])))
    hc = h_curvature(conn)
    assert np.max(np.abs(hc.R.value)) == 0.0
    assert np.max(np.abs(hc.Rhat.value)) == 0.0


def test_constant_curvature_riemann_closed_form(const_curv):
    rng = np.random.default_rng(5)
    for _ in range(3):
        x = rng.uniform(-0.4, 0.4, 3)
        y = rng.standard_normal(3)
        conn = connection_at(const_curv, (x, y))
        hc = h_curvature(conn)
        a = conn.g.value
        R_low = np.einsum("im,mjkl->ijkl", a, hc.R.value)
        expected = (np.einsum("ik,jl->ijkl", a, a)
                    - np.einsum("il,jk->ijkl", a, a))
        assert np.max(np.abs(R_low - expected)) < 1e-8


def test_curvature_structure_invariants(curved_randers):
    for (x, y) in admissible_points(curved_randers, 5, seed=13):
        conn = connection_at(curved_randers, (x, y))
        hc = h_curvature(conn)
        R = hc.R.value
        scale = max(1.0, np.max(np.abs(R)))
        # antisymmetry in the plane pair
        assert np.max(np.abs(R + np.swapaxes(R, 2, 3))) < 1e-10 * scale
        # contraction with y reproduces the (v)h-torsion
        assert np.max(np.abs(np.einsum("ijkl,j->ikl", R, y)
                             - hc.Rhat.value)) < 1e-9 * scale
        # metric skew-adjointness of the curvature operator
        R_low = np.einsum("im,mjkl->ijkl", conn.g.value, R)
        assert np.max(np.abs(R_low + np.swapaxes(R_low, 0, 1))) < 1e-10 * scale


# ----------------------------------------------------------------------
# hv- and v-curvature


def test_riemannian_input_has_zero_v_curvature(const_curv):
    conn = connection_at(const_curv, (np.array([0.2, -0.1, 0.3]),
                                      np.array([1.0, -0.5, 0.8])))
    hvv = hv_and_v_curvature(conn)
    assert np.max(np.abs(hvv.S.value)) < 1e-12
    assert np.max(np.abs(hvv.P.value)) < 1e-10


def test_euclidean_hv_curvature_vanishes(euclidean):
    conn = connection_at(euclidean, (np.zeros(3), np.array([1.0, 0.4, -0.3])))
    hvv = hv_and_v_curvature(conn)
    assert np.max(np.abs(hvv.P.value)) == 0.0


def test_phat_two_ways(curved_randers):
    for (x, y) in admissible_points(curved_randers, 4, seed=17):
        conn = connection_at(curved_randers, (x, y))
        hvv = hv_and_v_curvature(conn)
        direct = conn.spray_hessian.value - conn.gamma.value
        scale = max(1.0, np.max(np.abs(direct)))
        assert np.max(np.abs(hvv.Phat.value - direct)) < 1e-8 * scale


def test_v_curvature_structure(curved_randers):
    (x, y) = admissible_points(curved_randers, 1, seed=19)[0]
    conn = connection_at(curved_randers, (x, y))
    hvv = hv_and_v_curvature(conn)
    S = hvv.S.value
    g = conn.g.value
    S_low = np.einsum("im,mjkl->ijkl", g, S)
    scale = max(1.0, np.max(np.abs(S_low)))
    assert np.max(np.abs(S_low + np.swapaxes(S_low, 2, 3))) < 1e-10 * scale
    assert np.max(np.abs(S_low + np.swapaxes(S_low, 0, 1))) < 1e-10 * scale
    # S annihilates the fundamental field structurally
    assert np.max(np.abs(np.einsum("ijkl,j->ikl", S, y))) < 1e-14
    assert np.max(np.abs(hvv.Shat.value)) < 1e-14


# ----------------------------------------------------------------------
# covariant derivatives


def test_h_metricity_on_randers(randers):
    for (x, y) in admissible_points(randers, 5, seed=23):
        conn = connection_at(randers, (x, y))
        nabla_g = h_covariant_derivative(conn, conn.g, "ll")
        assert np.max(np.abs(nabla_g.value)) < 1e-10


def test_v_metricity_and_riemannian_exactness(const_curv, curved_randers):
    conn = connection_at(const_curv, (np.array([0.1, 0.2, -0.3]),
                                      np.array([0.4, -1.0, 0.6])))
    nabla_v_g = v_covariant_derivative(conn, conn.g, "ll")
    # g is y-independent for a Riemannian input, corrections cancel exactly
    assert np.max(np.abs(nabla_v_g.value)) < 1e-14
    conn2 = connection_at(curved_randers, admissible_points(curved_randers, 1, seed=29)[0])
    assert np.max(np.abs(v_covariant_derivative(conn2, conn2.g, "ll").value)) < 1e-10


def test_locally_symmetric_constant_curvature(const_curv):
    # nabla^h R = 0 on a space form
    rng = np.random.default_rng(31)
    x = rng.uniform(-0.4, 0.4, 3)
    y = rng.standard_normal(3)
    conn = connection_at(const_curv, (x, y), order=5)
    hc = h_curvature(conn)
    nabla_R = h_covariant_derivative(conn, hc.R, "ulll")
    assert np.max(np.abs(nabla_R.value)) < 1e-8


def test_scalar_rule_matches_frame_derivative(curved_randers):
    (x, y) = admissible_points(curved_randers, 1, seed=37)[0]
    conn = connection_at(curved_randers, (x, y), order=5)
    hc = h_curvature(conn)
    _, _, r = ricci_and_scalar(hc.R, conn.g, conn.g_inv)
    nabla_r = h_covariant_derivative(conn, r, "")
    direct = conn.delta_stack(r)
    assert np.max(np.abs(nabla_r.value - direct.value)) < 1e-14


def test_deflection_of_fundamental_field(curved_randers):
    # nabla^h eta = 0: the fundamental field as a jet tensor
    (x, y) = admissible_points(curved_randers, 1, seed=41)[0]
    conn = connection_at(curved_randers, (x, y))
    from finslerc.jets import Jet
    import numpy as _np
    eta = Jet(conn.space, _np.stack([j.coeffs for j in conn.y_jets]))
    nabla_eta = h_covariant_derivative(conn, eta, "u")
    assert np.max(np.abs(nabla_eta.value)) < 1e-10
    # vertical derivative of eta is the identity (regularity of the splitting)
    v_eta = v_covariant_derivative(conn, eta, "u")
    assert np.max(np.abs(v_eta.value - np.eye(3))) < 1e-12


def test_vertical_eta_derivative_of_homogeneous_tensor(curved_randers):
    # gamma-eta derivative of any 0-homogeneous tensor vanishes (Euler)
    (x, y) = admissible_points(curved_randers, 1, seed=43)[0]
    conn = connection_at(curved_randers, (x, y), order=5)
    hc = h_curvature(conn)
    vR = v_covariant_derivative(conn, hc.R, "ulll").value
    contracted = np.einsum("ijklm,m->ijkl", vR, y)
    assert np.max(np.abs(contracted)) < 1e-9 * max(1.0, np.max(np.abs(hc.R.value)))


def test_order_budget_is_enforced(euclidean):
    conn = connection_at(euclidean, (np.zeros(3), np.array([1.0, 0.0, 0.5])),
                         order=4)
    hc = h_curvature(conn)
    with pytest.raises(OrderExceeded):
        h_covariant_derivative(conn, hc.R, "ulll")


def test_inadmissible_point_is_rejected(quartic):
    with pytest.raises(SingularMetric):
        connection_at(quartic, (np.zeros(3), np.array([1.0, 1.0, 0.0])))


def test_covariant_value_path_matches_jet_path(curved_randers):
    from finslerc.cartan import h_covariant_values, v_covariant_values
    (x, y) = admissible_points(curved_randers, 1, seed=47)[0]
    conn = connection_at(curved_randers, (x, y), order=5)
    hc = h_curvature(conn)
    assert np.array_equal(h_covariant_derivative(conn, hc.R, "ulll").value,
                          h_covariant_values(conn, hc.R, "ulll"))
    assert np.array_equal(v_covariant_derivative(conn, hc.R, "ulll").value,
                          v_covariant_values(conn, hc.R, "ulll"))
    assert np.array_equal(h_covariant_derivative(conn, conn.g, "ll").value,
                          h_covariant_values(conn, conn.g, "ll"))


def test_four_dimensional_space_form():
    # dimension-generic sanity: Ric = (n-1)K g and r = n(n-1)K at n = 4
    from finslerc.dsl import builtin_family
    from finslerc.special import special_tensors
    spec = builtin_family("riemannian_constant_curvature", 4, K=0.5)
    rng = np.random.default_rng(53)
    x = rng.uniform(-0.3, 0.3, 4)
    y = rng.standard_normal(4)
    conn = connection_at(spec, (x, y))
    st = special_tensors(conn)
    assert np.max(np.abs(st.ric.value - 1.5 * conn.g.value)) < 1e-9
    assert float(st.r.value) == pytest.approx(6.0, abs=1e-8)
    assert np.max(np.abs(st.C.value)) < 1e-9
