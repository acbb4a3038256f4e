"""Cartan connection and its curvatures in local coordinates.

Everything is produced from jets of F^2 at one point of the slit tangent
bundle.  The quantities are kept jet-valued (not just numeric), deep enough
to take further derivatives, so horizontal covariant derivatives of
curvature are exact rather than re-approximated.  Per-point computations are
independent; ConnectionData is immutable after construction and safe to use
from several threads.

Coordinate conventions (pinned by the constant-curvature oracle, recorded in
report metadata):

* jet variables 0..n-1 are x, n..2n-1 are y;
* ``delta_k = d/dx^k - N^m_k d/dy^m`` is the horizontal frame;
* ``R^i_jkl = delta_k F^i_jl - delta_l F^i_jk + F^m_jl F^i_mk - F^m_jk F^i_ml
  + T^i_jm Rhat^m_kl``, which reduces on a Riemannian space form to
  ``R^i_jkl = K (delta^i_k a_jl - delta^i_l a_jk)``;
* h-Ricci trace ``Ric_jl = R^i_jil`` (positive for spheres);
* curvature-like arrays act as ``[B(X, Y)Z]^i = B^i_jkl Z^j Y^k X^l``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite, OrderExceeded, SingularMetric
from .jets import Jet, constant_jet, jet_space, seed_jets
from .tensors import ComponentTensor, TangentPoint

__all__ = [
    "ConnectionData", "connection_at", "fundamental_tensor",
    "h_curvature", "hv_and_v_curvature", "h_covariant_derivative",
    "v_covariant_derivative", "h_covariant_values", "v_covariant_values",
    "HCurvature", "HVVCurvature",
]

DEFAULT_ORDER = 4

_POSDEF_FLOOR = 1e-10
_SINGULAR_FLOOR = 1e-12


def _stack(jets):
    valid = min(j.valid for j in jets)
    return Jet(jets[0].space, np.stack([j.coeffs for j in jets]), valid)


def _check_metric_values(g):
    """Positive definiteness / singularity guards on the numeric metric."""
    scale = float(np.trace(g)) / g.shape[0]
    scale = scale if scale > 0 else 1.0
    det = float(np.linalg.det(g))
    if abs(det) < _SINGULAR_FLOOR * scale ** g.shape[0]:
        raise SingularMetric(f"det g = {det:.3e} below the singularity floor")
    eig = np.linalg.eigvalsh(0.5 * (g + g.T))
    if float(eig[0]) <= _POSDEF_FLOOR * scale:
        raise NotPositiveDefinite(
            f"fundamental tensor not positive definite (eigenvalues {eig})",
            eigenvalues=eig)


def _inv_matrix_jet(gjet, n):
    """Inverse of an (n, n) matrix of jets via the nilpotent Neumann series.

    With A = A0 + E (E carrying no value part), A^-1 =
    sum_k (-A0^-1 E)^k A0^-1 exactly, since E^(order+1) truncates to zero.
    """
    space = gjet.space
    A0 = np.ascontiguousarray(gjet.coeffs[..., 0])
    _check_metric_values(A0)
    A0inv = np.linalg.inv(A0)
    E = Jet(space, gjet.coeffs.copy(), gjet.valid)
    E.coeffs[..., 0] = 0.0
    B = Jet(space, -np.einsum("im,mjc->ijc", A0inv, E.coeffs), gjet.valid)
    acc = constant_jet(space, A0inv)
    acc.valid = gjet.valid
    out = acc
    for _ in range(space.order):
        rows = []
        for i in range(n):
            s = None
            for m in range(n):
                t = B[i, m] * acc[m]
                s = t if s is None else s + t
            rows.append(s)
        acc = _stack(rows)
        out = out + acc
    return out


@dataclass
class HCurvature:
    """h-curvature R^i_jkl and the (v)h-torsion Rhat^i_kl (jets)."""

    R: Jet
    Rhat: Jet


@dataclass
class HVVCurvature:
    """hv-curvature P, v-curvature S, and their eta-contractions (jets)."""

    P: Jet
    S: Jet
    Phat: Jet
    Shat: Jet


class ConnectionData:
    """All Cartan-connection data at one point, stored as jets.

    Attributes (jet-valued; ``.value`` gives the numeric components)
    ----------------------------------------------------------------
    F2      : scalar jet of F^2
    g       : (n, n) fundamental tensor  g_ij = 1/2 d^2 F^2 / dy^i dy^j
    g_inv   : (n, n) inverse
    spray   : (n,)  geodesic coefficients G^i
    N       : (n, n) nonlinear connection N^i_j = dG^i/dy^j
    gamma   : (n, n, n) horizontal coefficients F^i_jk
    cartan  : (n, n, n) (h)hv-torsion T^i_jk = 1/2 g^il dg_jl/dy^k
    spray_hessian : (n, n, n) G^i_kl = d^2 G^i / dy^k dy^l (used by hv-curvature)
    """

    def __init__(self, spec, point, order=DEFAULT_ORDER, check_domain=True):
        pt = point if isinstance(point, TangentPoint) else TangentPoint(*point)
        n = spec.dim
        if pt.dim != n:
            raise ValueError("point dimension does not match the metric")
        if check_domain and not spec.admissible(pt.x, pt.y):
            raise SingularMetric(
                f"point outside the admissible region ({spec.guard_description})")
        self.spec = spec
        self.point = pt
        self.dim = n
        self.order = order
        self.space = jet_space(2 * n, order)

        coords = seed_jets(self.space, pt.coords())
        self.x_jets = coords[:n]
        self.y_jets = coords[n:]

        F = spec.F(self.x_jets, self.y_jets)
        self.F2 = F * F
        self._build_metric()
        # spray, N, gamma, cartan, spray_hessian are built lazily so that shallow
        # jet orders (g-only probes, FD callbacks) stay usable
        self._spray = None
        self._N = None
        self._gamma = None
        self._cartan = None
        self._spray_hessian = None
        self._curv_h = None
        self._curv_hvv = None

    @property
    def spray(self):
        if self._spray is None:
            self._build_spray()
        return self._spray

    @property
    def N(self):
        if self._N is None:
            n = self.dim
            s = self.spray
            self._N = _stack([_stack([s[i].d(n + j) for j in range(n)])
                              for i in range(n)])
        return self._N

    @property
    def spray_hessian(self):
        if self._spray_hessian is None:
            n = self.dim
            N = self.N
            self._spray_hessian = _stack([_stack([_stack(
                [N[i, k].d(n + l) for l in range(n)]) for k in range(n)])
                for i in range(n)])
        return self._spray_hessian

    @property
    def gamma(self):
        if self._gamma is None:
            self._build_coefficients()
        return self._gamma

    @property
    def cartan(self):
        if self._cartan is None:
            self._build_coefficients()
        return self._cartan

    # -- derivative helpers -------------------------------------------

    def dy_stack(self, T):
        """Stack of vertical derivatives d/dy^m T; leading axis is m."""
        if T.valid < 1:
            raise OrderExceeded("no derivative orders left for a vertical "
                                "derivative; rebuild the connection deeper")
        n = self.dim
        c = np.stack([self.space.diff_coeffs(T.coeffs, n + m) for m in range(n)])
        return Jet(self.space, c, T.valid - 1)

    def delta_stack(self, T):
        """Stack of horizontal derivatives delta_k T; leading axis is k."""
        if T.valid < 1:
            raise OrderExceeded("no derivative orders left for a horizontal "
                                "derivative; rebuild the connection deeper")
        n = self.dim
        dx = np.stack([self.space.diff_coeffs(T.coeffs, k) for k in range(n)])
        dy = np.stack([self.space.diff_coeffs(T.coeffs, n + m) for m in range(n)])
        pad = (None,) * len(T.batch_shape)
        corr = 0.0
        for m in range(n):
            Nm = self.N.coeffs[(m, slice(None)) + pad + (slice(None),)]  # (k,*1s,C)
            corr = corr + self.space.mul_coeffs(Nm, dy[m][None])
        return Jet(self.space, dx - corr, min(T.valid - 1, self.N.valid))

    # -- construction steps -------------------------------------------

    def _build_metric(self):
        n = self.dim
        rows = []
        for i in range(n):
            di = self.F2.d(n + i)
            rows.append(_stack([di.d(n + j) * 0.5 for j in range(n)]))
        self.g = _stack(rows)
        self.g_inv = _inv_matrix_jet(self.g, n)

    def _build_spray(self):
        n = self.dim
        inner = []
        for l in range(n):
            dl = self.F2.d(n + l)
            s = -self.F2.d(l)
            for k in range(n):
                s = s + self.y_jets[k] * dl.d(k)
            inner.append(s)
        rows = []
        for i in range(n):
            s = None
            for l in range(n):
                t = self.g_inv[i, l] * inner[l]
                s = t if s is None else s + t
            rows.append(s * 0.25)
        self._spray = _stack(rows)

    def _build_coefficients(self):
        Dg = self.delta_stack(self.g)          # Dg[k, i, j] = delta_k g_ij
        dyg = self.dy_stack(self.g)            # dyg[k, i, j]
        # M[l, j, k] = delta_j g_lk + delta_k g_jl - delta_l g_jk
        M = (np.einsum("jlkc->ljkc", Dg.coeffs)
             + np.einsum("kjlc->ljkc", Dg.coeffs)
             - Dg.coeffs)
        A = self.g_inv.coeffs[:, :, None, None, :]       # (i, l, 1, 1)
        gam = 0.5 * self.space.mul_coeffs(A, M[None]).sum(axis=1)
        self._gamma = Jet(self.space, gam,
                          min(self.g_inv.valid, Dg.valid))   # F^i_jk
        V = np.einsum("kjlc->ljkc", dyg.coeffs)          # dyg[k, j, l] at [l,j,k]
        cart = 0.5 * self.space.mul_coeffs(A, V[None]).sum(axis=1)
        self._cartan = Jet(self.space, cart,
                           min(self.g_inv.valid, dyg.valid))  # T^i_jk

    # -- numeric views and structural residuals -------------------------

    def axiom_residuals(self):
        """Numeric residuals of the connection axioms and structure identities."""
        out = {}
        gv = self.g.value
        scale_g = max(1.0, float(np.max(np.abs(gv))))
        out["g_symmetry"] = float(np.max(np.abs(gv - gv.T))) / scale_g
        gam = self.gamma.value
        out["hh_torsion"] = float(np.max(np.abs(gam - np.swapaxes(gam, 1, 2)))) / \
            max(1.0, float(np.max(np.abs(gam))))
        lowered_T = np.einsum("il,ljk->ijk", gv, self.cartan.value)
        tscale = max(1.0, float(np.max(np.abs(lowered_T))))
        res = 0.0
        for perm in ((0, 2, 1), (1, 0, 2), (2, 1, 0)):
            res = max(res, float(np.max(np.abs(lowered_T - np.transpose(lowered_T, perm)))))
        out["cartan_total_symmetry"] = res / tscale
        y = self.point.y
        out["cartan_annihilates_eta"] = float(
            np.max(np.abs(np.einsum("ijk,j->ik", self.cartan.value, y)))) / tscale
        out["deflection"] = float(np.max(np.abs(
            np.einsum("imk,m->ik", gam, y) - self.N.value))) / \
            max(1.0, float(np.max(np.abs(self.N.value))))
        out["h_metricity"] = float(np.max(np.abs(
            h_covariant_derivative(self, self.g, "ll").value))) / scale_g
        out["v_metricity"] = float(np.max(np.abs(
            v_covariant_derivative(self, self.g, "ll").value))) / scale_g
        # Euler identities: g is 0-, N 1-, G 2-homogeneous in y
        out["euler_g"] = self._euler_residual(self.g, 0) / scale_g
        out["euler_N"] = self._euler_residual(self.N, 1) / \
            max(1.0, float(np.max(np.abs(self.N.value))))
        out["euler_spray"] = self._euler_residual(self.spray, 2) / \
            max(1.0, float(np.max(np.abs(self.spray.value))))
        return out

    def _euler_residual(self, T, degree):
        dy = self.dy_stack(T)
        acc = np.zeros(T.batch_shape)
        for m in range(self.dim):
            acc = acc + self.point.y[m] * dy[m].value
        return float(np.max(np.abs(acc - degree * T.value)))


def connection_at(spec, point, order=DEFAULT_ORDER, check_domain=True):
    """Compute Cartan :class:`ConnectionData` for a metric at a point.

    ``check_domain=False`` skips the admissibility guard (used by
    finite-difference stencils probing around an admissible center, where
    genuine evaluation failures still raise DomainError).
    """
    return ConnectionData(spec, point, order=order, check_domain=check_domain)


def fundamental_tensor(spec, point, order=2):
    """Fundamental tensor and its inverse as numeric ComponentTensors.

    Raises :class:`SingularMetric` / :class:`NotPositiveDefinite` at
    degenerate points.
    """
    pt = point if isinstance(point, TangentPoint) else TangentPoint(*point)
    n = spec.dim
    space = jet_space(2 * n, max(order, 2))
    coords = seed_jets(space, pt.coords())
    F = spec.F(coords[:n], coords[n:])
    F2 = F * F
    g = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            kappa = [0] * (2 * n)
            kappa[n + i] += 1
            kappa[n + j] += 1
            g[i, j] = F2.extract(kappa) * 0.5
    _check_metric_values(g)
    g_inv = np.linalg.inv(g)
    return (ComponentTensor(g, "ll", symmetries=(("sym", 0, 1),)),
            ComponentTensor(g_inv, "uu", symmetries=(("sym", 0, 1),)))


# ----------------------------------------------------------------------
# Curvatures


def h_curvature(conn):
    """h-curvature R (1,3) and (v)h-torsion Rhat (1,2), cached on ``conn``.

    ``Rhat^m_kl = delta_k N^m_l - delta_l N^m_k``; contracting R with y in
    the j slot reproduces Rhat (checked by the invariant suite).
    """
    if conn._curv_h is not None:
        return conn._curv_h
    n = conn.dim
    mul = conn.space.mul_coeffs
    DN = conn.delta_stack(conn.N)          # DN[k, m, l] = delta_k N^m_l
    rhat_c = (np.einsum("kmlc->mklc", DN.coeffs)
              - np.einsum("lmkc->mklc", DN.coeffs))
    Rhat = Jet(conn.space, rhat_c, DN.valid)               # Rhat^m_kl

    DG = conn.delta_stack(conn.gamma)      # DG[k, i, j, l] = delta_k F^i_jl
    R_c = (np.einsum("kijlc->ijklc", DG.coeffs)
           - np.einsum("lijkc->ijklc", DG.coeffs))
    gc = conn.gamma.coeffs
    tc = conn.cartan.coeffs
    for m in range(n):
        # F^m_jl F^i_mk - F^m_jk F^i_ml + T^i_jm Rhat^m_kl
        R_c = R_c + mul(gc[:, m][:, None, :, None, :], gc[m][None, :, None, :, :]) \
                  - mul(gc[:, m][:, None, None, :, :], gc[m][None, :, :, None, :]) \
                  + mul(tc[:, :, m][:, :, None, None, :], rhat_c[m][None, None, :, :, :])
    valid = min(DG.valid, conn.gamma.valid, Rhat.valid)
    conn._curv_h = HCurvature(R=Jet(conn.space, R_c, valid), Rhat=Rhat)
    return conn._curv_h


def hv_and_v_curvature(conn):
    """hv-curvature P, v-curvature S, and eta-contractions, cached.

    P is realized through the frame commutator of the horizontal and
    vertical derivations rather than a transcribed classical component
    formula: ``P^i_jkl = dy_k F^i_jl - delta_l T^i_jk + F^m_jl T^i_mk
    - T^m_jk F^i_ml + G^m_kl T^i_jm`` with G the vertical Hessian of the
    spray.  The array follows the same slot dictionary as R, the vertical
    argument sitting at slot k; ``Shat`` vanishes identically because the
    Cartan tensor annihilates the fundamental field.
    """
    if conn._curv_hvv is not None:
        return conn._curv_hvv
    n = conn.dim
    mul = conn.space.mul_coeffs
    DT = conn.delta_stack(conn.cartan)     # DT[l, i, j, k] = delta_l T^i_jk
    dyG = conn.dy_stack(conn.gamma)        # dyG[k, i, j, l] = dy_k F^i_jl
    gc = conn.gamma.coeffs
    tc = conn.cartan.coeffs
    hc = conn.spray_hessian.coeffs
    P_c = (np.einsum("kijlc->ijklc", dyG.coeffs)
           - np.einsum("lijkc->ijklc", DT.coeffs))
    S_c = 0.0
    for m in range(n):
        # P: F^m_jl T^i_mk - T^m_jk F^i_ml + G^m_kl T^i_jm
        P_c = P_c + mul(tc[:, m][:, None, :, None, :], gc[m][None, :, None, :, :]) \
                  - mul(gc[:, m][:, None, None, :, :], tc[m][None, :, :, None, :]) \
                  + mul(tc[:, :, m][:, :, None, None, :], hc[m][None, None, :, :, :])
        # S: T^m_jl T^i_mk - T^m_jk T^i_ml
        S_c = S_c + mul(tc[:, m][:, None, :, None, :], tc[m][None, :, None, :, :]) \
                  - mul(tc[:, m][:, None, None, :, :], tc[m][None, :, :, None, :])
    valid_P = min(dyG.valid, DT.valid, conn.spray_hessian.valid)
    P = Jet(conn.space, P_c, valid_P)
    S = Jet(conn.space, S_c, conn.cartan.valid)

    y = conn.point.y
    conn._curv_hvv = HVVCurvature(P=P, S=S,
                                  Phat=contract_eta(P, y), Shat=contract_eta(S, y))
    return conn._curv_hvv


def contract_eta(B, y):
    """y^j B^i_jkl -> (i, k, l) jet (evaluation on the fundamental field)."""
    return Jet(B.space, np.einsum("ijklc,j->iklc", B.coeffs, np.asarray(y, float)),
               B.valid)


# ----------------------------------------------------------------------
# Covariant derivatives of jet-valued tensor fields


def _corrected_derivative(conn, T, variance, deriv_stack, coeff):
    """Frame derivative plus per-slot connection corrections.

    ``deriv_stack`` supplies frame derivatives (leading axis = direction);
    ``coeff`` is the (1,2) coefficient array (gamma or cartan).  The
    derivative index is appended as a trailing lower slot.
    """
    n = conn.dim
    rank = len(variance)
    if len(T.batch_shape) != rank:
        raise ValueError("variance does not match the tensor rank")
    D = deriv_stack(T)                                    # (k, *batch)
    out_c = np.moveaxis(D.coeffs, 0, rank)                # (*batch, k)
    out_valid = D.valid
    space = conn.space
    ins = (None,) * (rank - 1)
    for s, v in enumerate(variance):
        Tm = np.moveaxis(T.coeffs, s, 0)                  # (m, *rest, C)
        corr = 0.0
        for m in range(n):
            if v == "u":
                c = coeff.coeffs[:, m, :, :]              # (a, k, C)
            else:
                c = coeff.coeffs[m, :, :, :]              # (j, k, C)
            cc = c[(slice(None),) + ins + (slice(None), slice(None))]
            tt = Tm[m][None, ..., None, :]
            corr = corr + space.mul_coeffs(cc, tt)
        if v == "l":
            corr = -corr
        out_c = out_c + np.moveaxis(corr, 0, s)
        out_valid = min(out_valid, coeff.valid, T.valid)
    return Jet(space, out_c, out_valid)


def h_covariant_derivative(conn, field, variance):
    """Horizontal covariant derivative of a jet-valued tensor field.

    ``field`` is either a jet tensor (batch shape ``(n,)*rank``) or a
    callable evaluated at the connection's jet coordinates.  The derivative
    index is appended as a trailing lower slot: ``(nabla^h T)^..._...;k``.
    Metricity makes ``nabla^h g = 0`` and the deflection identity
    ``nabla^h eta = 0`` hold to round-off.
    """
    if callable(field):
        field = field(conn.x_jets, conn.y_jets)
    return _corrected_derivative(conn, field, variance, conn.delta_stack, conn.gamma)


def v_covariant_derivative(conn, field, variance):
    """Vertical covariant derivative; Cartan-tensor corrections per slot."""
    if callable(field):
        field = field(conn.x_jets, conn.y_jets)
    return _corrected_derivative(conn, field, variance, conn.dy_stack, conn.cartan)


def _covariant_values(conn, T, variance, horizontal):
    """Numeric components of a covariant derivative, skipping the jet
    algebra entirely.

    The value of the frame derivative is the first-order coefficient of the
    jet, so when only components are consumed (classification, identity
    residuals) the full truncated convolution is unnecessary.  Agrees with
    the jet path exactly.
    """
    if T.valid < 1:
        raise OrderExceeded("no derivative orders left in this field")
    n = conn.dim
    rank = len(variance)
    if len(T.batch_shape) != rank:
        raise ValueError("variance does not match the tensor rank")
    dall = T.coeffs[..., conn.space.unit_indices]       # (*batch, 2n)
    if horizontal:
        D = dall[..., :n] - np.einsum("mk,...m->...k", conn.N.value, dall[..., n:])
        coeff = conn.gamma.value
    else:
        D = dall[..., n:]
        coeff = conn.cartan.value
    out = D
    values = np.asarray(T.value)
    for s, v in enumerate(variance):
        Tm = np.moveaxis(values, s, 0)
        if v == "u":
            corr = np.einsum("amk,m...->a...k", coeff, Tm)
        else:
            corr = -np.einsum("mjk,m...->j...k", coeff, Tm)
        out = out + np.moveaxis(corr, 0, s)
    return out


def h_covariant_values(conn, field, variance):
    """Numeric components of the horizontal covariant derivative."""
    if callable(field):
        field = field(conn.x_jets, conn.y_jets)
    return _covariant_values(conn, field, variance, horizontal=True)


def v_covariant_values(conn, field, variance):
    """Numeric components of the vertical covariant derivative."""
    if callable(field):
        field = field(conn.x_jets, conn.y_jets)
    return _covariant_values(conn, field, variance, horizontal=False)
