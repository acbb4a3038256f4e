"""Derived curvature tensors and their structural identities.

Builds, from the connection and its h-curvature: the horizontal Ricci tensor
and scalar, the Ricci operator, the metric 2-plane tensor G, the concircular,
projective and m-projective tensors, and the residual of the semi-isotropic
factorization.  Everything stays jet-valued so one horizontal derivative of
any of these is still exact.

Array conventions follow :mod:`finslerc.cartan`: operator arrays act as
``[B(X,Y)Z]^i = B^i_jkl Z^j Y^k X^l``; the scalar 4-argument form is
``B(X,Y,Z,W) = B_ijkl W^i Z^j Y^k X^l`` with the first index lowered; the
Ricci array contracts as ``Ric(X,Y) = Ric_jl Y^j X^l``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cartan import (h_covariant_values, h_curvature, hv_and_v_curvature,
                     v_covariant_values)
from .jets import Jet
from .tensors import check_symmetric

__all__ = [
    "SpecialTensors", "special_tensors", "ricci_and_scalar",
    "g_curvature_like", "concircular", "projective", "m_projective",
    "semi_isotropic_residual", "lower_first", "property_suite_residuals",
]


def _kron_jet(eye_pattern, jet2):
    """Place a (n,n) jet into a (n,n,n,n) array against an identity pattern.

    ``eye_pattern`` is an einsum signature like "ik,jlc->ijklc".
    """
    n = jet2.coeffs.shape[0]
    c = np.einsum(eye_pattern, np.eye(n), jet2.coeffs)
    return Jet(jet2.space, c, jet2.valid)


def ricci_and_scalar(R, g, g_inv):
    """Horizontal Ricci tensor, Ricci operator, and scalar curvature (jets).

    ``Ric_jl = R^i_jil``; ``Ric_o = g^-1 Ric`` (the (1,1) operator with
    ``g(Ric_o X, Y) = Ric(X, Y)``); ``r = g^jl Ric_jl``.
    """
    ric_c = np.einsum("ijilc->jlc", R.coeffs)
    ric = Jet(R.space, ric_c, R.valid)
    valid = min(g_inv.valid, ric.valid)
    rico_c = R.space.mul_coeffs(g_inv.coeffs[:, :, None, :],
                                ric_c[None, :, :, :]).sum(axis=1)
    rico = Jet(R.space, rico_c, valid)
    r_c = R.space.mul_coeffs(g_inv.coeffs, ric_c).sum(axis=(0, 1))
    r = Jet(R.space, r_c, valid)
    return ric, rico, r


def g_curvature_like(g):
    """The 2-plane tensor G^i_jkl = delta^i_k g_jl - delta^i_l g_jk (jet).

    Realizes g(X,Z)Y - g(Y,Z)X in the array dictionary; on a space form of
    curvature K the h-curvature equals K times this tensor.
    """
    return _kron_jet("ik,jlc->ijklc", g) - _kron_jet("il,jkc->ijklc", g)


def concircular(R, G, r, n):
    """Concircular tensor C = R - r/(n(n-1)) G (jet)."""
    return R - (r * (1.0 / (n * (n - 1)))) * G


def projective(R, ric, n):
    """Projective tensor: R minus the Ricci 2-plane correction (jet)."""
    corr = _kron_jet("ik,jlc->ijklc", ric) - _kron_jet("il,jkc->ijklc", ric)
    return R - corr * (1.0 / (n - 1))


def m_projective(R, ric, ric_o, g, n):
    """m-projective tensor: R minus the half Ricci + half operator correction."""
    corr = _kron_jet("ik,jlc->ijklc", ric) - _kron_jet("il,jkc->ijklc", ric)
    space = R.space
    go = Jet(space, space.mul_coeffs(g.coeffs[None, :, None, :, :],
                                     ric_o.coeffs[:, None, :, None, :]),
             min(g.valid, ric_o.valid))           # g_jl Rico^i_k
    go2 = Jet(space, space.mul_coeffs(g.coeffs[None, :, :, None, :],
                                      ric_o.coeffs[:, None, None, :, :]),
              min(g.valid, ric_o.valid))          # g_jk Rico^i_l
    return R - (corr + go - go2) * (1.0 / (2 * (n - 1)))


def lower_first(B, g):
    """Lower the operator slot: B_ijkl = g_im B^m_jkl (numeric arrays)."""
    return np.einsum("im,mjkl->ijkl", g, B)


def semi_isotropic_residual(R_lowered, A, sym_tol=1e-8):
    """Max-norm defect of R_ijkl = A_ik A_jl - A_il A_jk.

    ``A`` must be symmetric (checked to ``sym_tol``); raises AsymmetricA
    otherwise.  A zero residual with A = Ric feeds the alpha = r - 1
    conclusion of the classifier suite.
    """
    A = check_symmetric(A, sym_tol)
    model = np.einsum("ik,jl->ijkl", A, A) - np.einsum("il,jk->ijkl", A, A)
    return float(np.max(np.abs(R_lowered - model)))


@dataclass
class SpecialTensors:
    """Jet-valued derived tensors at one point, with numeric views."""

    conn: object
    R: Jet
    Rhat: Jet
    ric: Jet
    ric_o: Jet
    r: Jet
    G: Jet
    C: Jet
    P_proj: Jet
    H_mproj: Jet

    @property
    def n(self):
        return self.conn.dim

    def numeric(self, name):
        return getattr(self, name).value

    def r_value(self):
        return float(self.r.value)


def special_tensors(conn):
    """Assemble all derived tensors from a connection (h-curvature included)."""
    hc = h_curvature(conn)
    n = conn.dim
    ric, ric_o, r = ricci_and_scalar(hc.R, conn.g, conn.g_inv)
    G = g_curvature_like(conn.g)
    C = concircular(hc.R, G, r, n)
    P = projective(hc.R, ric, n)
    H = m_projective(hc.R, ric, ric_o, conn.g, n)
    return SpecialTensors(conn=conn, R=hc.R, Rhat=hc.Rhat, ric=ric, ric_o=ric_o,
                          r=r, G=G, C=C, P_proj=P, H_mproj=H)


# ----------------------------------------------------------------------
# Property suite for the m-projective tensor


def _cyclic3(arr, axes):
    """Sum of an array over cyclic permutations of three given axes."""
    a, b, c = axes
    perm1 = list(range(arr.ndim))
    perm1[a], perm1[b], perm1[c] = perm1[c], perm1[a], perm1[b]
    perm2 = list(range(arr.ndim))
    perm2[a], perm2[b], perm2[c] = perm2[b], perm2[c], perm2[a]
    return arr + np.transpose(arr, perm1) + np.transpose(arr, perm2)


def property_suite_residuals(st, tol_scale=True):
    """Residuals of the m-projective structural identities at one point.

    Returns a dict with, all as max-abs residuals over full index ranges:

    * ``antisym_first_pair``  -- H(X,Y,.,.) + H(Y,X,.,.)
    * ``antisym_second_pair`` -- H(.,.,Z,W) + H(.,.,W,Z) (lowered form)
    * ``first_bianchi``       -- cyclic sum of H(X,Y)Z against the torsion
      term T(Rhat(X,Y),Z) minus the cyclic Ricci correction
    * ``second_bianchi``      -- cyclic sum of (nabla_X H)(Y,Z,W) against
      the hv-curvature and nabla-Ricci right side
    * ``vertical_eta``        -- (nabla_{gamma eta} H)(X,Y,Z)
    """
    conn = st.conn
    n = st.n
    gv = conn.g.value
    Hv = st.H_mproj.value
    Hlow = lower_first(Hv, gv)
    scale = max(1.0, float(np.max(np.abs(Hlow))))

    out = {}
    out["antisym_first_pair"] = float(np.max(np.abs(
        Hlow + np.swapaxes(Hlow, 2, 3)))) / scale
    out["antisym_second_pair"] = float(np.max(np.abs(
        Hlow + np.swapaxes(Hlow, 0, 1)))) / scale

    # first Bianchi with torsion: arrays indexed [i, a, b, c] for the value of
    # the identity on (X, Y, Z) = (e_a, e_b, e_c)
    ric = st.ric.value
    rico = st.ric_o.value
    rhat = st.Rhat.value
    cart = conn.cartan.value
    lhs = np.einsum("icba->iabc", Hv)
    torsion = np.einsum("imc,mba->iabc", cart, rhat)
    corr = (np.einsum("ca,ib->iabc", ric, np.eye(n))
            - np.einsum("cb,ia->iabc", ric, np.eye(n))
            + np.einsum("ca,ib->iabc", gv, rico)
            - np.einsum("cb,ia->iabc", gv, rico)) / (2.0 * (n - 1))
    defect = _cyclic3(lhs - torsion + corr, axes=(1, 2, 3))
    out["first_bianchi"] = float(np.max(np.abs(defect))) / scale

    # vertical eta-derivative of H
    vH = v_covariant_values(conn, st.H_mproj, "ulll")
    eta = np.einsum("ijklm,m->ijkl", vH, conn.point.y)
    out["vertical_eta"] = float(np.max(np.abs(eta))) / scale

    # second Bianchi: needs one more derivative order on the curvature
    nH = h_covariant_values(conn, st.H_mproj, "ulll")
    nRic = h_covariant_values(conn, st.ric, "ll")
    nRico = h_covariant_values(conn, st.ric_o, "ul")
    P = hv_and_v_curvature(conn).P.value
    lhs2 = np.einsum("iwcba->iabcw", nH)
    pterm = np.einsum("iwva,vcb->iabcw", P, rhat)
    corr2 = (np.einsum("wba,ic->iabcw", nRic, np.eye(n))
             - np.einsum("wca,ib->iabcw", nRic, np.eye(n))
             + np.einsum("bw,ica->iabcw", gv, nRico)
             - np.einsum("cw,iba->iabcw", gv, nRico)) / (2.0 * (n - 1))
    defect2 = _cyclic3(lhs2 + pterm + corr2, axes=(1, 2, 3))
    dscale = max(scale, float(np.max(np.abs(np.einsum("iwcba->iabcw", nH)))), 1.0)
    out["second_bianchi"] = float(np.max(np.abs(defect2))) / dscale
    return out
