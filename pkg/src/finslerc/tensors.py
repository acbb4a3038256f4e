"""Point-tensor containers and algebra.

Dense tensors at a single point of the slit tangent bundle: contraction,
index raising/lowering with the fundamental tensor, eigenvalues of
metric-self-adjoint operators, and the rank-1 fit that decides recurrence.

Inner products and norms used for fitting are taken in a g-orthonormal
frame, which makes every residual invariant under coordinate changes; raw
component Frobenius products are not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (AsymmetricA, NotSelfAdjoint, SingularMetric,
                     VarianceMismatch, ZeroTensor)

__all__ = [
    "TangentPoint", "ComponentTensor", "contract", "raise_lower",
    "sym_eigenvalues", "rank1_fit", "Rank1Fit", "orthonormal_components",
    "frame_inner", "frame_norm",
]


@dataclass(frozen=True)
class TangentPoint:
    """A point (x, y) of the slit tangent bundle; y must be non-zero."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, float))
        object.__setattr__(self, "y", np.asarray(self.y, float))
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if float(np.linalg.norm(self.y)) == 0.0:
            raise ValueError("y = 0 is outside the slit tangent bundle")

    @property
    def dim(self):
        return self.x.shape[0]

    def coords(self):
        return np.concatenate([self.x, self.y])


@dataclass
class ComponentTensor:
    """Dense point tensor with an index variance signature.

    ``variance`` is a string of 'u'/'l' per slot, e.g. "ulll" for a
    (1,3)-tensor with the upper slot first.  Optional ``symmetries`` declare
    ("sym"|"antisym", slot_a, slot_b) pairs validated on construction.
    """

    data: np.ndarray
    variance: str
    symmetries: tuple = field(default_factory=tuple)
    check_tol: float = 1e-9

    def __post_init__(self):
        self.data = np.asarray(self.data, float)
        if self.data.ndim != len(self.variance):
            raise VarianceMismatch(
                f"rank {self.data.ndim} tensor with variance {self.variance!r}")
        if any(s != self.data.shape[0] for s in self.data.shape):
            raise ValueError("all axes must have the point dimension")
        scale = max(1.0, float(np.max(np.abs(self.data))) if self.data.size else 0.0)
        for kind, a, b in self.symmetries:
            swapped = np.swapaxes(self.data, a, b)
            res = self.data - swapped if kind == "sym" else self.data + swapped
            if float(np.max(np.abs(res))) > self.check_tol * scale:
                raise ValueError(f"declared {kind} in slots ({a},{b}) violated")

    @property
    def dim(self):
        return self.data.shape[0] if self.data.ndim else 0

    @property
    def rank(self):
        return self.data.ndim


def contract(t, slot_a, slot_b):
    """Einstein contraction of one upper against one lower slot."""
    va, vb = t.variance[slot_a], t.variance[slot_b]
    if va == vb:
        raise VarianceMismatch(
            f"cannot contract two {'upper' if va == 'u' else 'lower'} slots; "
            "raise or lower one first")
    data = np.trace(t.data, axis1=slot_a, axis2=slot_b)
    keep = [v for i, v in enumerate(t.variance) if i not in (slot_a, slot_b)]
    if not keep:
        return float(data)
    return ComponentTensor(data, "".join(keep))


def raise_lower(t, slot, g, g_inv):
    """Flip the variance of one slot by contracting with g or its inverse."""
    mat = g_inv if t.variance[slot] == "l" else g
    data = np.tensordot(t.data, mat, axes=([slot], [0]))
    # tensordot moves the contracted slot to the end; restore its position
    data = np.moveaxis(data, -1, slot)
    variance = list(t.variance)
    variance[slot] = "u" if variance[slot] == "l" else "l"
    return ComponentTensor(data, "".join(variance))


def _cholesky(g):
    try:
        return np.linalg.cholesky(np.asarray(g, float))
    except np.linalg.LinAlgError as exc:
        raise SingularMetric("metric not positive definite at this point") from exc


def orthonormal_components(data, variance, g):
    """Components of a tensor in a g-orthonormal frame.

    With g = L L^T (Cholesky), upper slots transform by L^T and lower slots
    by L^{-1}; the plain Frobenius product of the results is the g-invariant
    inner product.
    """
    L = _cholesky(g)
    Linv = np.linalg.inv(L)
    out = np.asarray(data, float)
    for slot, v in enumerate(variance):
        mat = L.T if v == "u" else Linv
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [slot])), 0, slot)
    return out


def frame_inner(a, b, variance, g):
    """g-invariant Frobenius inner product of two same-variance tensors."""
    fa = orthonormal_components(a, variance, g)
    fb = orthonormal_components(b, variance, g)
    return float(np.sum(fa * fb))


def frame_norm(a, variance, g):
    fa = orthonormal_components(a, variance, g)
    return float(np.sqrt(np.sum(fa * fa)))


def sym_eigenvalues(op, g, tol=1e-8):
    """Eigenvalues of a g-self-adjoint (1,1) operator, ascending.

    Computed on the symmetrized form in a g-orthonormal frame; raises
    :class:`NotSelfAdjoint` when the lowered form is not symmetric to
    ``tol`` (relative).
    """
    if isinstance(op, ComponentTensor):
        if op.variance not in ("ul", "lu"):
            raise VarianceMismatch("sym_eigenvalues expects a (1,1) operator")
        mat = op.data if op.variance == "ul" else op.data.T
    else:
        mat = np.asarray(op, float)
    lowered = np.asarray(g, float) @ mat
    scale = max(1.0, float(np.max(np.abs(lowered))))
    if float(np.max(np.abs(lowered - lowered.T))) > tol * scale:
        raise NotSelfAdjoint("operator is not self-adjoint with respect to g")
    L = _cholesky(g)
    frame_op = L.T @ mat @ np.linalg.inv(L.T)
    return np.linalg.eigvalsh(0.5 * (frame_op + frame_op.T))


@dataclass
class Rank1Fit:
    """Outcome of fitting a derivative stack as A_k (x) base tensor."""

    form: Optional[np.ndarray]   # the recurrence 1-form, or None on NoFit
    residual: float              # worst ||D_k - A_k T|| over k (frame norm)
    base_norm: float

    @property
    def fits(self):
        return self.form is not None


def rank1_fit(derivatives, base, g, tol=1e-7):
    """Fit D_k = A_k * T for a stack of derivative tensors.

    A_k := <D_k, T> / <T, T> with the g-orthonormal Frobenius product; the
    fit is accepted when max_k ||D_k - A_k T|| <= tol * (1 + ||T|| * max|A_k|).
    Raises :class:`ZeroTensor` when ||T|| <= tol (recurrence inapplicable).
    """
    base_t = np.asarray(getattr(base, "data", base), float)
    variance = getattr(base, "variance", "l" * base_t.ndim)
    fb = orthonormal_components(base_t, variance, g)
    tnorm = float(np.sqrt(np.sum(fb * fb)))
    if tnorm <= tol:
        raise ZeroTensor("base tensor vanishes; recurrence classification inapplicable")
    form = np.empty(len(derivatives))
    residual = 0.0
    for k, d in enumerate(derivatives):
        d_t = np.asarray(getattr(d, "data", d), float)
        fd = orthonormal_components(d_t, variance, g)
        form[k] = float(np.sum(fd * fb)) / (tnorm * tnorm)
        residual = max(residual, float(np.sqrt(np.sum((fd - form[k] * fb) ** 2))))
    bound = tol * (1.0 + tnorm * float(np.max(np.abs(form))))
    if residual <= bound:
        return Rank1Fit(form=form, residual=residual, base_norm=tnorm)
    return Rank1Fit(form=None, residual=residual, base_norm=tnorm)


def check_symmetric(a, tol=1e-8):
    """Validate that a (0,2) tensor is symmetric; used by the semi-isotropic
    residual, whose associated tensor must be symmetric."""
    a = np.asarray(a, float)
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > tol * scale:
        raise AsymmetricA("associated tensor is not symmetric")
    return a
