"""Independent finite-difference differentiation path.

Validates every jet-computed derivative through central differences with
Richardson extrapolation.  Each check differentiates the one-order-lower
quantity (plain F^2 values for g, jet-computed spray for N, jet-computed
coefficients for curvature), so the derivative step itself never shares code
with the jet algebra.  Test-only: nothing here feeds the classification path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cartan import connection_at

__all__ = ["FDConfig", "FDResult", "fd_partial", "fd_tensor_x", "fd_tensor_y",
           "oracle_connection", "fd_covariant_commutator"]


@dataclass(frozen=True)
class FDConfig:
    """Central-difference settings: base step and Richardson depth."""

    step: float = 1e-3
    richardson_levels: int = 1

    def __post_init__(self):
        if not 0.0 < self.step <= 1e-2:
            raise ValueError("step must lie in (0, 1e-2]")
        if self.richardson_levels < 0:
            raise ValueError("richardson_levels must be >= 0")


@dataclass
class FDResult:
    value: float
    error: float


def _romberg(samples):
    """Richardson table for estimates at steps h, h/2, h/4, ...; the scheme
    is second order, so successive columns cancel h^2 powers."""
    table = [list(samples)]
    m = 1
    while len(table[-1]) > 1:
        prev = table[-1]
        fac = 4.0 ** m
        table.append([(fac * prev[j + 1] - prev[j]) / (fac - 1.0)
                      for j in range(len(prev) - 1)])
        m += 1
    return table


def _nested_central(f, coords, multi, h):
    """Nested first-order central differences for one mixed partial."""
    pending = [v for v, m in enumerate(multi) for _ in range(m)]

    def rec(pt, vars_left):
        if not vars_left:
            return f(pt)
        v = vars_left[0]
        rest = vars_left[1:]
        up = pt.copy()
        up[v] += h
        dn = pt.copy()
        dn[v] -= h
        return (rec(up, rest) - rec(dn, rest)) / (2.0 * h)

    return rec(np.asarray(coords, float).copy(), pending)


def fd_partial(f, point, multi_index, cfg=FDConfig()):
    """Central-difference mixed partial of a scalar field of (x, y).

    ``f`` is called as ``f(coords)`` with the 2n concatenated coordinates;
    ``point`` may be a TangentPoint or a coordinate array.  Returns an
    :class:`FDResult` with the Richardson-extrapolated value and an error
    estimate (difference of the last two extrapolants); raises
    :class:`DomainError` from inadmissible stencil points.
    """
    coords = point.coords() if hasattr(point, "coords") else np.asarray(point, float)
    multi = tuple(multi_index)
    if sum(multi) > 4:
        raise ValueError("fd_partial supports orders up to 4")
    if sum(multi) == 0:
        return FDResult(value=float(f(coords)), error=0.0)
    samples = [_nested_central(f, coords, multi, cfg.step / 2.0 ** j)
               for j in range(cfg.richardson_levels + 1)]
    table = _romberg(samples)
    best = table[-1][0]
    if len(table) > 1:
        err = abs(best - table[-2][-1])
    else:
        err = abs(best) * 1e-2
    return FDResult(value=float(best), error=float(err))


def _fd_directional(fun, coords, var, cfg):
    """Richardson-extrapolated first derivative of an array-valued callable."""
    samples = []
    for j in range(cfg.richardson_levels + 1):
        h = cfg.step / 2.0 ** j
        up = coords.copy()
        up[var] += h
        dn = coords.copy()
        dn[var] -= h
        samples.append((np.asarray(fun(up)) - np.asarray(fun(dn))) / (2.0 * h))
    table = _romberg(samples)
    return table[-1][0]


def fd_tensor_x(fun, point, k, cfg=FDConfig()):
    """d/dx^k of an array-valued function of a tangent point."""
    coords = point.coords() if hasattr(point, "coords") else np.asarray(point, float)
    return _fd_directional(fun, coords.copy(), k, cfg)


def fd_tensor_y(fun, point, k, cfg=FDConfig()):
    """d/dy^k of an array-valued function of a tangent point."""
    coords = point.coords() if hasattr(point, "coords") else np.asarray(point, float)
    n = coords.size // 2
    return _fd_directional(fun, coords.copy(), n + k, cfg)


def _plain_F2(spec):
    def f(coords):
        n = spec.dim
        return float(spec.F(list(coords[:n]), list(coords[n:]))) ** 2
    return f


def oracle_connection(spec, point, cfg=FDConfig()):
    """FD estimates of g, spray, N, and the horizontal coefficients.

    g and the spray come from pure finite differences of plain F^2
    evaluations; N differentiates the jet-computed spray; the coefficients
    differentiate the jet-computed metric through the FD horizontal frame.
    """
    n = spec.dim
    coords = point.coords() if hasattr(point, "coords") else np.asarray(point, float)
    f2 = _plain_F2(spec)
    y = coords[n:]

    g = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            multi = [0] * (2 * n)
            multi[n + i] += 1
            multi[n + j] += 1
            g[i, j] = 0.5 * fd_partial(f2, coords, multi, cfg).value
    g_inv = np.linalg.inv(g)

    spray = np.zeros(n)
    for l in range(n):
        acc = 0.0
        for k in range(n):
            multi = [0] * (2 * n)
            multi[n + l] += 1
            multi[k] += 1
            acc += y[k] * fd_partial(f2, coords, multi, cfg).value
        multi = [0] * (2 * n)
        multi[l] += 1
        acc -= fd_partial(f2, coords, multi, cfg).value
        spray[l] = acc
    spray = 0.25 * (g_inv @ spray)

    def spray_jet(c):
        conn = connection_at(spec, (c[:n], c[n:]), order=2, check_domain=False)
        return conn.spray.value

    N = np.stack([fd_tensor_y(spray_jet, coords, j, cfg) for j in range(n)], axis=1)

    def g_jet(c):
        conn = connection_at(spec, (c[:n], c[n:]), order=2, check_domain=False)
        return conn.g.value

    conn0 = connection_at(spec, point, order=3)
    N0 = conn0.N.value
    dgx = np.stack([fd_tensor_x(g_jet, coords, k, cfg) for k in range(n)])
    dgy = np.stack([fd_tensor_y(g_jet, coords, m, cfg) for m in range(n)])
    Dg = dgx - np.einsum("mk,mij->kij", N0, dgy)   # Dg[k, i, j] = delta_k g_ij
    # gamma^i_jk = 1/2 g^il (Dg[j,l,k] + Dg[k,j,l] - Dg[l,j,k])
    gamma = 0.5 * (np.einsum("il,jlk->ijk", g_inv, Dg)
                   + np.einsum("il,kjl->ijk", g_inv, Dg)
                   - np.einsum("il,ljk->ijk", g_inv, Dg))
    return {"g": g, "g_inv": g_inv, "spray": spray, "N": N, "gamma": gamma}


def fd_covariant_commutator(spec, point, cfg=FDConfig()):
    """FD estimates of the h- and hv-curvature through frame commutators.

    Applies finite-difference horizontal/vertical derivatives to the
    jet-computed connection coefficients and assembles the commutator
    algebra; cross-check only.
    """
    n = spec.dim
    coords = point.coords() if hasattr(point, "coords") else np.asarray(point, float)
    conn0 = connection_at(spec, point, order=4)
    N0 = conn0.N.value
    gam0 = conn0.gamma.value
    cart0 = conn0.cartan.value
    Gb0 = conn0.spray_hessian.value

    def N_jet(c):
        return connection_at(spec, (c[:n], c[n:]), order=3,
                             check_domain=False).N.value

    def gamma_jet(c):
        return connection_at(spec, (c[:n], c[n:]), order=3,
                             check_domain=False).gamma.value

    def cart_jet(c):
        return connection_at(spec, (c[:n], c[n:]), order=3,
                             check_domain=False).cartan.value

    def delta_fd(fun, base_shape):
        dx = np.stack([fd_tensor_x(fun, coords, k, cfg) for k in range(n)])
        dy = np.stack([fd_tensor_y(fun, coords, m, cfg) for m in range(n)])
        return dx - np.einsum("mk,m...->k...", N0, dy), dy

    DN, _ = delta_fd(N_jet, (n, n))
    rhat = np.einsum("kml->mkl", DN) - np.einsum("lmk->mkl", DN)

    DG, dyG = delta_fd(gamma_jet, (n, n, n))
    R = (np.einsum("kijl->ijkl", DG) - np.einsum("lijk->ijkl", DG)
         + np.einsum("mjl,imk->ijkl", gam0, gam0)
         - np.einsum("mjk,iml->ijkl", gam0, gam0)
         + np.einsum("ijm,mkl->ijkl", cart0, rhat))

    DT, _ = delta_fd(cart_jet, (n, n, n))
    P = (np.einsum("kijl->ijkl", dyG) - np.einsum("lijk->ijkl", DT)
         + np.einsum("mjl,imk->ijkl", gam0, cart0)
         - np.einsum("mjk,iml->ijkl", cart0, gam0)
         + np.einsum("mkl,ijm->ijkl", Gb0, cart0))

    return {"R": R, "Rhat": rhat, "P": P}
