"""Truncated multivariate Taylor arithmetic (forward-mode jets).

A jet holds every mixed partial derivative of a scalar quantity with respect
to the 2n coordinates (x, y) up to a fixed total order.  Arithmetic is exact
truncation: operating on jets of smooth functions yields the jet of the
composite, so every derivative the curvature engine consumes is exact to
round-off, never approximated.

Coefficients are stored densely, indexed by a precomputed graded table of
multi-indices; storage is Taylor-normalized (coefficient = partial / kappa!),
so multiplication is a plain truncated convolution.  The last axis of
``Jet.coeffs`` is the coefficient axis; any leading axes are broadcast batch
axes, which lets whole tensors of jets ride through numpy in one call.

Jets are immutable values and all operations are pure, so they are safe to
share between threads.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .errors import DomainError, OrderExceeded

__all__ = ["JetSpace", "Jet", "jet_space", "seed_jets", "constant_jet"]


def _monomials(nvars, order):
    """All exponent tuples with total degree <= order, graded then lex."""
    out = [(0,) * nvars]
    for deg in range(1, order + 1):
        block = []
        for combo in combinations_with_replacement(range(nvars), deg):
            kappa = [0] * nvars
            for v in combo:
                kappa[v] += 1
            block.append(tuple(kappa))
        out.extend(sorted(block))
    return out


class JetSpace:
    """Shared tables for all jets with a given variable count and order.

    Build via :func:`jet_space`, which caches one instance per
    ``(nvars, order)`` pair.
    """

    def __init__(self, nvars, order):
        if nvars < 1 or order < 1:
            raise ValueError("need nvars >= 1 and order >= 1")
        self.nvars = nvars
        self.order = order
        self.monomials = _monomials(nvars, order)
        self.ncoef = len(self.monomials)
        self.index = {kappa: i for i, kappa in enumerate(self.monomials)}
        self.degrees = np.array([sum(k) for k in self.monomials])
        # positions of the unit multi-indices (first-derivative slots)
        self.unit_indices = np.array(
            [self.index[tuple(1 if v == u else 0 for v in range(nvars))]
             for u in range(nvars)])
        self._build_mul_table()
        self._build_diff_tables()

    def _build_mul_table(self):
        # every (mu, nu) with |mu|+|nu| <= order contributes a_mu*b_nu to
        # slot mu+nu; sorted by output slot so reduceat can segment-sum
        pairs = []
        for i, mu in enumerate(self.monomials):
            di = sum(mu)
            for j, nu in enumerate(self.monomials):
                if di + sum(nu) > self.order:
                    continue
                k = self.index[tuple(m + n for m, n in zip(mu, nu))]
                pairs.append((k, i, j))
        pairs.sort()
        out = np.array([p[0] for p in pairs])
        self._mul_a = np.array([p[1] for p in pairs])
        self._mul_b = np.array([p[2] for p in pairs])
        # segment starts: first occurrence of each output slot (all present:
        # slot k always receives the (k, 0) pair)
        self._mul_seg = np.searchsorted(out, np.arange(self.ncoef))

    def _build_diff_tables(self):
        # d/dv_i in Taylor storage: (df)_kappa = (kappa_i + 1) * f_(kappa + e_i)
        self._diff_dst = []
        self._diff_src = []
        self._diff_fac = []
        for v in range(self.nvars):
            dst, src, fac = [], [], []
            for i, kappa in enumerate(self.monomials):
                if sum(kappa) + 1 > self.order:
                    continue
                up = list(kappa)
                up[v] += 1
                dst.append(i)
                src.append(self.index[tuple(up)])
                fac.append(kappa[v] + 1)
            self._diff_dst.append(np.array(dst))
            self._diff_src.append(np.array(src))
            self._diff_fac.append(np.array(fac, dtype=float))

    def mul_coeffs(self, a, b):
        """Truncated convolution of coefficient arrays (broadcast on the left)."""
        prod = a[..., self._mul_a] * b[..., self._mul_b]
        return np.add.reduceat(prod, self._mul_seg, axis=-1)

    def diff_coeffs(self, c, var):
        out = np.zeros_like(c)
        out[..., self._diff_dst[var]] = self._diff_fac[var] * c[..., self._diff_src[var]]
        return out

    def factorial(self, kappa):
        f = 1
        for k in kappa:
            f *= math.factorial(k)
        return f


@lru_cache(maxsize=None)
def jet_space(nvars, order):
    """Cached :class:`JetSpace` for ``(nvars, order)``."""
    return JetSpace(nvars, order)


def _as_value_array(x):
    return x.astype(float) if isinstance(x, np.ndarray) else float(x)


class Jet:
    """A batch of truncated Taylor expansions over one :class:`JetSpace`.

    Parameters
    ----------
    space : JetSpace
        Coefficient tables (fixes variable count and truncation order).
    coeffs : ndarray
        Shape ``(*batch, space.ncoef)``; Taylor-normalized coefficients.
    valid : int
        Highest total degree whose coefficients are meaningful.  Taking a
        derivative lowers it by one; arithmetic propagates the minimum.
    """

    __slots__ = ("space", "coeffs", "valid")

    def __init__(self, space, coeffs, valid=None):
        self.space = space
        self.coeffs = coeffs
        self.valid = space.order if valid is None else valid

    # -- construction -------------------------------------------------

    @property
    def value(self):
        """Order-zero coefficient: the underlying plain value(s)."""
        v = self.coeffs[..., 0]
        return v if v.ndim else float(v)

    @property
    def batch_shape(self):
        return self.coeffs.shape[:-1]

    def __getitem__(self, key):
        return Jet(self.space, self.coeffs[key], self.valid)

    # -- ring operations ----------------------------------------------

    def _lift(self, other):
        """Return coefficient array of `other` as a constant jet."""
        val = _as_value_array(other)
        c = np.zeros(np.shape(val) + (self.space.ncoef,))
        c[..., 0] = val
        return c

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.space, self.coeffs + other.coeffs,
                       min(self.valid, other.valid))
        c = self.coeffs.copy() + 0.0
        c = np.broadcast_to(c, np.broadcast_shapes(np.shape(other) + (1,), c.shape)).copy()
        c[..., 0] += other
        return Jet(self.space, c, self.valid)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.coeffs, self.valid)

    def __sub__(self, other):
        return self.__add__(-other if isinstance(other, Jet) else np.negative(other))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(self.space, self.space.mul_coeffs(self.coeffs, other.coeffs),
                       min(self.valid, other.valid))
        return Jet(self.space, self.coeffs * np.asarray(other)[..., None]
                   if isinstance(other, np.ndarray) else self.coeffs * other,
                   self.valid)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            b0 = other.coeffs[..., 0]
            if np.any(b0 == 0.0):
                raise DomainError("division by a jet with zero value")
            out = self * other._reciprocal()
            # exact value slot, independent of the series path
            out.coeffs[..., 0] = self.coeffs[..., 0] / b0
            return out
        return Jet(self.space, self.coeffs / (np.asarray(other)[..., None]
                   if isinstance(other, np.ndarray) else other), self.valid)

    def __rtruediv__(self, other):
        b0 = self.coeffs[..., 0]
        if np.any(b0 == 0.0):
            raise DomainError("division by a jet with zero value")
        out = self._reciprocal() * other
        out.coeffs[..., 0] = np.asarray(other) / b0 if isinstance(other, np.ndarray) \
            else other / b0
        return out

    def __pow__(self, p):
        if isinstance(p, int) or (isinstance(p, float) and p.is_integer()):
            return integer_power(self, int(p))
        return self.powf(p)

    # -- analytic functions -------------------------------------------

    def _compose(self, derivs):
        """Sum_k derivs[k]/k! * (self - value)^k, exact in the truncation.

        ``derivs[k]`` is the k-th derivative of the outer function at the
        value slot, shaped like the batch.
        """
        m = self.space.order
        h = Jet(self.space, self.coeffs.copy(), self.valid)
        h.coeffs[..., 0] = 0.0
        inv_fact = 1.0
        acc = Jet(self.space, self._lift(derivs[m] / math.factorial(m)), self.valid)
        for k in range(m - 1, -1, -1):
            acc = acc * h
            acc = acc + derivs[k] / math.factorial(k)
        acc.coeffs[..., 0] = derivs[0]
        return Jet(self.space, acc.coeffs, self.valid)

    def _reciprocal(self):
        u0 = self.coeffs[..., 0]
        derivs = [1.0 / u0]
        for k in range(1, self.space.order + 1):
            derivs.append(derivs[-1] * (-k) / u0)
        return self._compose(derivs)

    def sqrt(self):
        u0 = self.coeffs[..., 0]
        if np.any(u0 <= 0.0):
            raise DomainError("sqrt of a non-positive value")
        derivs = [np.sqrt(u0)]
        for k in range(1, self.space.order + 1):
            derivs.append(derivs[-1] * (0.5 - (k - 1)) / u0)
        return self._compose(derivs)

    def exp(self):
        e = np.exp(self.coeffs[..., 0])
        return self._compose([e] * (self.space.order + 1))

    def log(self):
        u0 = self.coeffs[..., 0]
        if np.any(u0 <= 0.0):
            raise DomainError("log of a non-positive value")
        derivs = [np.log(u0), 1.0 / u0]
        for k in range(2, self.space.order + 1):
            derivs.append(derivs[-1] * (-(k - 1)) / u0)
        return self._compose(derivs)

    def sin(self):
        u0 = self.coeffs[..., 0]
        s, c = np.sin(u0), np.cos(u0)
        cycle = [s, c, -s, -c]
        return self._compose([cycle[k % 4] for k in range(self.space.order + 1)])

    def cos(self):
        u0 = self.coeffs[..., 0]
        s, c = np.sin(u0), np.cos(u0)
        cycle = [c, -s, -c, s]
        return self._compose([cycle[k % 4] for k in range(self.space.order + 1)])

    def powf(self, p):
        """Real power; requires a positive value slot."""
        u0 = self.coeffs[..., 0]
        if np.any(u0 <= 0.0):
            raise DomainError("non-integer power of a non-positive value")
        derivs = [np.power(u0, p)]
        for k in range(1, self.space.order + 1):
            derivs.append(derivs[-1] * (p - (k - 1)) / u0)
        return self._compose(derivs)

    # -- derivative access --------------------------------------------

    def d(self, var):
        """Jet of the partial derivative with respect to variable ``var``.

        One order of validity is consumed.
        """
        if self.valid < 1:
            raise OrderExceeded("no derivative orders left in this jet")
        return Jet(self.space, self.space.diff_coeffs(self.coeffs, var), self.valid - 1)

    def extract(self, kappa):
        """True partial derivative for multi-index ``kappa`` (factorials applied)."""
        kappa = tuple(kappa)
        if len(kappa) != self.space.nvars:
            raise ValueError("multi-index length does not match variable count")
        if sum(kappa) > self.space.order:
            raise OrderExceeded(
                f"order {sum(kappa)} exceeds truncation order {self.space.order}")
        if sum(kappa) > self.valid:
            raise OrderExceeded(
                f"order {sum(kappa)} exceeds remaining valid order {self.valid}")
        v = self.coeffs[..., self.space.index[kappa]] * self.space.factorial(kappa)
        return v if v.ndim else float(v)


def integer_power(x, k):
    """x**k by repeated multiplication; works on jets and plain scalars alike.

    Shared by the jet and plain-number evaluation paths so both perform the
    identical sequence of float multiplications.
    """
    if k == 0:
        return x * 0 + 1.0 if isinstance(x, Jet) else 1.0
    if k < 0:
        return 1.0 / integer_power(x, -k)
    acc = x
    for _ in range(k - 1):
        acc = acc * x
    return acc


def constant_jet(space, value):
    """Lift a plain value (or batch of values) into the jet algebra."""
    val = _as_value_array(value)
    c = np.zeros(np.shape(val) + (space.ncoef,))
    c[..., 0] = val
    return Jet(space, c)


def seed_jets(space, values):
    """Seed the coordinate variables: jet i has the i-th value and a unit
    first-derivative coefficient in slot i."""
    values = np.asarray(values, dtype=float)
    if values.shape != (space.nvars,):
        raise ValueError(f"expected {space.nvars} seed values")
    jets = []
    for i in range(space.nvars):
        c = np.zeros(space.ncoef)
        c[0] = values[i]
        e_i = tuple(1 if v == i else 0 for v in range(space.nvars))
        c[space.index[e_i]] = 1.0
        jets.append(Jet(space, c))
    return jets
