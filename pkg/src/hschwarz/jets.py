"""Complex 3-jets and finite-difference Wirtinger derivatives.

A :class:`Jet3` carries ``(f, f', f'', f''')`` at a point. It may also be
*batched*: each component is then a 1-D array and the jet describes the same
function at many points at once, which is how grid sweeps are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .errors import DivisionByZeroJet, NonFiniteJet, StencilOutsideDomain

#: |b.v| floor below which :func:`jet_div` refuses to divide.
DIV_FLOOR = 1e-14


class Jet3:
    """Value and first three complex derivatives of an analytic function.

    >>> Jet3(1, 2, 2, 0).d1
    (2+0j)
    """

    __slots__ = ("_c", "_scalar")

    def __init__(self, v, d1=0.0, d2=0.0, d3=0.0):
        parts = np.broadcast_arrays(
            *(np.asarray(x, dtype=np.complex128) for x in (v, d1, d2, d3))
        )
        scalar = parts[0].ndim == 0
        c = np.stack([np.atleast_1d(p) for p in parts])
        if c.ndim != 2:
            raise ValueError("jet components must be scalars or 1-D arrays")
        self._set(c, scalar)

    def _set(self, c, scalar):
        if not np.isfinite(c).all():
            raise NonFiniteJet("jet has non-finite components")
        c.setflags(write=False)
        self._c = c
        self._scalar = scalar

    @classmethod
    def from_array(cls, c: np.ndarray, scalar: bool = False) -> "Jet3":
        """Wrap a packed ``(4, n)`` array without copying."""
        obj = cls.__new__(cls)
        obj._set(np.ascontiguousarray(c, dtype=np.complex128), scalar)
        return obj

    @classmethod
    def constant(cls, value, like: "Jet3") -> "Jet3":
        c = np.zeros_like(like._c)
        c[0] = value
        return cls.from_array(c, like._scalar)

    @classmethod
    def variable(cls, z) -> "Jet3":
        """Jet of the identity map at ``z``."""
        return cls(z, 1.0)

    @property
    def array(self) -> np.ndarray:
        return self._c

    @property
    def scalar(self) -> bool:
        return self._scalar

    def _get(self, k):
        x = self._c[k]
        return complex(x[0]) if self._scalar else x

    v = property(lambda self: self._get(0))
    d1 = property(lambda self: self._get(1))
    d2 = property(lambda self: self._get(2))
    d3 = property(lambda self: self._get(3))

    def __len__(self):
        return self._c.shape[1]

    def __iter__(self):
        return iter((self.v, self.d1, self.d2, self.d3))

    def __repr__(self):
        if self._scalar:
            return "Jet3({}, {}, {}, {})".format(*(complex(x) for x in self._c[:, 0]))
        return f"Jet3(<batched n={len(self)}>)"

    def __eq__(self, other):
        if not isinstance(other, Jet3):
            return NotImplemented
        return self._scalar == other._scalar and np.array_equal(self._c, other._c)

    __hash__ = None

    def _wrap(self, c, other=None):
        scalar = self._scalar and (other is None or other._scalar)
        return Jet3.from_array(c, scalar)

    def _coerce(self, other):
        if isinstance(other, Jet3):
            return other
        return Jet3.constant(other, self)

    def __add__(self, other):
        return jet_add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self._c)

    def __sub__(self, other):
        return jet_add(self, -self._coerce(other))

    def __rsub__(self, other):
        return jet_add(-self, self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, Jet3):
            return jet_mul(self, other)
        return self._wrap(self._c * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet3):
            return jet_div(self, other)
        return self._wrap(self._c / complex(other))

    def __rtruediv__(self, other):
        return jet_div(self._coerce(other), self)

    def shift(self) -> "Jet3":
        """Jet of the derivative with an unknown (zeroed) fourth slot.

        Only the first three components of the result are meaningful.
        """
        c = np.zeros_like(self._c)
        c[:3] = self._c[1:]
        return self._wrap(c)

    def allclose(self, other: "Jet3", rtol=1e-12, atol=0.0) -> bool:
        return np.allclose(self._c, other._c, rtol=rtol, atol=atol)


def _pair(a: Jet3, b: Jet3):
    ca, cb = a.array, b.array
    if ca.shape != cb.shape:
        ca, cb = np.broadcast_arrays(ca, cb)
        ca, cb = np.ascontiguousarray(ca), np.ascontiguousarray(cb)
    return ca, cb


def jet_add(a: Jet3, b: Jet3) -> Jet3:
    ca, cb = _pair(a, b)
    return a._wrap(ca + cb, b)


def jet_mul(a: Jet3, b: Jet3) -> Jet3:
    """Leibniz rule truncated at order three."""
    ca, cb = _pair(a, b)
    return a._wrap(_kernels.backend.mul(ca, cb), b)


def jet_div(a: Jet3, b: Jet3, floor: float = DIV_FLOOR) -> Jet3:
    ca, cb = _pair(a, b)
    small = np.abs(cb[0]) < floor
    if small.any():
        raise DivisionByZeroJet(
            f"jet division by |value| < {floor:g} (critical point or pole)"
        )
    return a._wrap(_kernels.backend.div(ca, cb), b)


def jet_compose(outer: Jet3, inner: Jet3) -> Jet3:
    """Faà di Bruno to order three.

    ``outer`` must already be the jet of the outer function at ``inner.v``;
    only its derivatives are combined with those of ``inner``.
    """
    co, ci = _pair(outer, inner)
    return outer._wrap(_kernels.backend.compose(co, ci), inner)


@dataclass(frozen=True)
class WirtingerStencil:
    step: float = 1e-3
    scheme: str = "central4"

    def __post_init__(self):
        if not (0.0 < self.step < 1e-2):
            raise ValueError(f"stencil step must lie in (0, 1e-2), got {self.step!r}")
        if self.scheme not in ("central4", "central2"):
            raise ValueError(f"unknown stencil scheme {self.scheme!r}")

    @property
    def offsets_and_weights(self):
        if self.scheme == "central2":
            return (1.0, -1.0), (0.5, -0.5)
        return (2.0, 1.0, -1.0, -2.0), (-1 / 12, 8 / 12, -8 / 12, 1 / 12)


def wirtinger_dz(field: Callable, z, stencil: WirtingerStencil | None = None):
    """Approximate d/dz = (d/dx - i d/dy)/2 of a plane field at ``z``.

    ``field`` must accept an array of complex points and return an array of
    the same shape. ``z`` may be a scalar or an array of points.
    """
    stencil = stencil or WirtingerStencil()
    z_arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    h = stencil.step
    offsets, weights = stencil.offsets_and_weights
    shifts = np.array([k * h for k in offsets] + [1j * k * h for k in offsets])
    pts = z_arr[None, :] + shifts[:, None]
    if (np.abs(pts) >= 1.0).any():
        bad = pts[np.abs(pts) >= 1.0].ravel()[0]
        raise StencilOutsideDomain(
            f"stencil point {bad:.6g} leaves the unit disk (z={z_arr[0]:.6g}, step={h:g})"
        )
    vals = np.asarray(field(pts.ravel()), dtype=np.complex128).reshape(pts.shape)
    m = len(offsets)
    w = np.asarray(weights)[:, None]
    dx = (w * vals[:m]).sum(axis=0) / h
    dy = (w * vals[m:]).sum(axis=0) / h
    out = 0.5 * (dx - 1j * dy)
    return complex(out[0]) if np.ndim(z) == 0 else out
