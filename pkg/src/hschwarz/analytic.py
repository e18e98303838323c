"""Closed-form analytic functions on the unit disk, the classical Schwarzian
calculus, and Möbius transformations.

Expressions are small immutable trees evaluated to exact 3-jets. Every node
except a bare :class:`MobiusLeaf` is checked at construction on the default
grid plus the origin: it must evaluate to a finite jet there. A bare Möbius
leaf is exempt because it is often used only as the outer function of a
composition, where its pole may well lie inside the disk.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import (
    CriticalPoint,
    DivisionByZeroJet,
    HSchwarzError,
    InvalidExpression,
    NotEquivalent,
    PointOutsideDisk,
    PoleHit,
)
from .grid import DEFAULT_GRID, GridSpec, scan_order
from .jets import Jet3, jet_compose, jet_div, jet_mul

#: |f'| floor for the (pre-)Schwarzian.
CRITICAL_FLOOR = 1e-12
#: |ad - bc| floor for Möbius transformations.
DET_FLOOR = 1e-12
#: |cw + d| floor for applying a Möbius transformation.
POLE_FLOOR = 1e-14
_EPS = np.finfo(float).eps


def _validation_points() -> np.ndarray:
    return np.concatenate([[0j], DEFAULT_GRID.points()])


def _as_points(z) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()


# ---------------------------------------------------------------------------
# Möbius transformations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mobius:
    """``z -> (a z + b) / (c z + d)``, stored with ``ad - bc = 1``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        if not all(cmath.isfinite(x) for x in (a, b, c, d)):
            raise ValueError("Möbius coefficients must be finite")
        det = a * d - b * c
        if abs(det) < DET_FLOOR:
            raise ValueError(f"degenerate Möbius transformation: |ad - bc| = {abs(det):.3g}")
        # Rescale to ad - bc = 1 unless that already holds to rounding, so
        # normalising twice (e.g. a document round trip) changes nothing.
        if abs(det - 1.0) > 64 * _EPS * (abs(a * d) + abs(b * c)):
            s = cmath.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        for name, val in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, val)

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def pole(self) -> Optional[complex]:
        return None if self.c == 0 else -self.d / self.c

    def __call__(self, w):
        return mobius_apply(self, w)

    def compose(self, other: "Mobius") -> "Mobius":
        """``self ∘ other``."""
        return mobius_compose(self, other)

    def inverse(self) -> "Mobius":
        return mobius_invert(self)

    def is_close(self, other: "Mobius", tol: float = 1e-10) -> bool:
        """Equality as maps, i.e. of coefficient vectors up to complex scale."""
        u = np.array([self.a, self.b, self.c, self.d])
        v = np.array([other.a, other.b, other.c, other.d])
        u = u / np.linalg.norm(u)
        v = v / np.linalg.norm(v)
        return float(np.abs(np.outer(u, v) - np.outer(v, u)).max()) <= tol

    def expr(self) -> "MobiusLeaf":
        return MobiusLeaf(self)


def mobius_apply(T: Mobius, w):
    w_arr = np.asarray(w, dtype=np.complex128)
    den = T.c * w_arr + T.d
    if (np.abs(den) < POLE_FLOOR).any():
        raise PoleHit(f"Möbius transformation evaluated at its pole {T.pole}")
    out = (T.a * w_arr + T.b) / den
    return complex(out) if out.ndim == 0 else out


def mobius_compose(T: Mobius, U: Mobius) -> Mobius:
    m = T.matrix @ U.matrix
    return Mobius(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def mobius_invert(T: Mobius) -> Mobius:
    return Mobius(T.d, -T.b, -T.c, T.a)


@dataclass(frozen=True)
class DiskAutomorphism:
    """``phi_w(z) = (w + z) / (1 + conj(w) z)``; maps the disk onto itself."""

    w: complex

    def __post_init__(self):
        w = complex(self.w)
        if not abs(w) < 1.0:
            raise ValueError(f"automorphism parameter must satisfy |w| < 1, got {w}")
        object.__setattr__(self, "w", w)

    def as_mobius(self) -> Mobius:
        return automorphism_as_mobius(self)

    def expr(self) -> "MobiusLeaf":
        return MobiusLeaf(self.as_mobius())

    def __call__(self, z):
        return mobius_apply(self.as_mobius(), z)

    def derivative(self, z):
        z = np.asarray(z, dtype=np.complex128)
        out = (1.0 - abs(self.w) ** 2) / (1.0 + self.w.conjugate() * z) ** 2
        return complex(out) if out.ndim == 0 else out


def automorphism_as_mobius(A: DiskAutomorphism) -> Mobius:
    return Mobius(1, A.w, A.w.conjugate(), 1)


# ---------------------------------------------------------------------------
# Expression tree
# ---------------------------------------------------------------------------


class AnalyticExpr:
    """Base class of expression nodes; subclasses implement :meth:`_jet`."""

    #: composite nodes are evaluated on the validation grid when built
    _check_on_grid = False

    def __post_init__(self):
        if self._check_on_grid:
            self._validate()

    def _jet(self, z: np.ndarray) -> Jet3:  # pragma: no cover - abstract
        raise NotImplementedError

    def _validate(self):
        try:
            self._jet(_validation_points())
        except (HSchwarzError, FloatingPointError, ZeroDivisionError) as exc:
            raise InvalidExpression(
                f"{type(self).__name__} is not finite on the sample grid: {exc}"
            ) from exc

    def jet(self, z) -> Jet3:
        return eval_jet(self, z)

    def __call__(self, z):
        """Value of the function at ``z`` (scalar or array)."""
        return eval_jet(self, z).v

    # operator sugar -------------------------------------------------------
    def __add__(self, other):
        return Add((self, as_expr(other)))

    def __radd__(self, other):
        return Add((as_expr(other), self))

    def __sub__(self, other):
        return Add((self, Scale(-1, as_expr(other))))

    def __rsub__(self, other):
        return Add((as_expr(other), Scale(-1, self)))

    def __neg__(self):
        return Scale(-1, self)

    def __mul__(self, other):
        if isinstance(other, AnalyticExpr):
            return Mul(self, other)
        return Scale(other, self)

    def __rmul__(self, other):
        return Scale(other, self)

    def __truediv__(self, other):
        if isinstance(other, AnalyticExpr):
            return Div(self, other)
        return Scale(1.0 / complex(other), self)

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def compose(self, inner: "AnalyticExpr") -> "Compose":
        """``self ∘ inner``."""
        return Compose(self, inner)


def as_expr(x) -> AnalyticExpr:
    if isinstance(x, AnalyticExpr):
        return x
    if isinstance(x, Mobius):
        return MobiusLeaf(x)
    return Constant(x)


@dataclass(frozen=True, eq=True)
class Identity(AnalyticExpr):
    def _jet(self, z):
        c = np.zeros((4, z.shape[0]), dtype=np.complex128)
        c[0] = z
        c[1] = 1.0
        return Jet3.from_array(c)


@dataclass(frozen=True, eq=True)
class Constant(AnalyticExpr):
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not cmath.isfinite(v):
            raise InvalidExpression("constant must be finite")
        object.__setattr__(self, "value", v)

    def _jet(self, z):
        c = np.zeros((4, z.shape[0]), dtype=np.complex128)
        c[0] = self.value
        return Jet3.from_array(c)


@dataclass(frozen=True, eq=True)
class Exp(AnalyticExpr):
    def _jet(self, z):
        e = np.exp(z)
        return Jet3.from_array(np.stack([e, e, e, e]))


@dataclass(frozen=True, eq=True)
class Polynomial(AnalyticExpr):
    """Coefficients in ascending powers: ``c0 + c1 z + c2 z^2 + ...``."""

    coefficients: tuple

    def __post_init__(self):
        cs = tuple(complex(c) for c in self.coefficients)
        if not cs:
            cs = (0j,)
        if not all(cmath.isfinite(c) for c in cs):
            raise InvalidExpression("polynomial coefficients must be finite")
        object.__setattr__(self, "coefficients", cs)

    def _jet(self, z):
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        return Jet3.from_array(_kernels.backend.poly(coeffs, np.ascontiguousarray(z)))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def derivative(self) -> "Polynomial":
        cs = self.coefficients
        return Polynomial(tuple(k * cs[k] for k in range(1, len(cs))) or (0j,))

    def antiderivative(self) -> "Polynomial":
        """Antiderivative vanishing at the origin."""
        return Polynomial((0j,) + tuple(c / (k + 1) for k, c in enumerate(self.coefficients)))

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(tuple(np.convolve(self.coefficients, other.coefficients)))
        return super().__mul__(other)


@dataclass(frozen=True, eq=True)
class MobiusLeaf(AnalyticExpr):
    transform: Mobius

    def _jet(self, z):
        T = self.transform
        den = T.c * z + T.d
        if (np.abs(den) < POLE_FLOOR).any():
            raise DivisionByZeroJet(f"Möbius leaf evaluated at its pole {T.pole}")
        r = 1.0 / den
        det = T.det
        c = np.empty((4, z.shape[0]), dtype=np.complex128)
        c[0] = (T.a * z + T.b) * r
        c[1] = det * r * r
        c[2] = -2.0 * det * T.c * r ** 3
        c[3] = 6.0 * det * T.c * T.c * r ** 4
        return Jet3.from_array(c)


@dataclass(frozen=True, eq=True)
class Scale(AnalyticExpr):
    _check_on_grid = True

    factor: complex
    expr: AnalyticExpr

    def __post_init__(self):
        object.__setattr__(self, "factor", complex(self.factor))
        super().__post_init__()

    def _jet(self, z):
        return self.expr._jet(z) * self.factor


@dataclass(frozen=True, eq=True)
class Add(AnalyticExpr):
    _check_on_grid = True

    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise InvalidExpression("add needs at least one term")
        object.__setattr__(self, "terms", terms)
        super().__post_init__()

    def _jet(self, z):
        c = self.terms[0]._jet(z).array.copy()
        for t in self.terms[1:]:
            c += t._jet(z).array
        return Jet3.from_array(c)


@dataclass(frozen=True, eq=True)
class Mul(AnalyticExpr):
    _check_on_grid = True

    left: AnalyticExpr
    right: AnalyticExpr

    def _jet(self, z):
        return jet_mul(self.left._jet(z), self.right._jet(z))


@dataclass(frozen=True, eq=True)
class Div(AnalyticExpr):
    _check_on_grid = True

    numerator: AnalyticExpr
    denominator: AnalyticExpr

    def _jet(self, z):
        return jet_div(self.numerator._jet(z), self.denominator._jet(z))


@dataclass(frozen=True, eq=True)
class Compose(AnalyticExpr):
    _check_on_grid = True

    """``outer ∘ inner``; inner must map the disk into outer's domain."""

    outer: AnalyticExpr
    inner: AnalyticExpr

    def _jet(self, z):
        inner = self.inner._jet(z)
        outer = self.outer._jet(inner.array[0].copy())
        return jet_compose(outer, inner)


def eval_jet(f: AnalyticExpr, z) -> Jet3:
    """3-jet of ``f`` at ``z`` (scalar, or array of points for a batched jet)."""
    pts = _as_points(z)
    if (np.abs(pts) >= 1.0).any():
        raise PointOutsideDisk(f"point(s) outside the open unit disk: {pts[np.abs(pts) >= 1.0][0]}")
    j = f._jet(pts)
    if np.ndim(z) == 0:
        return Jet3.from_array(j.array, scalar=True)
    return j


# ---------------------------------------------------------------------------
# Classical Schwarzian calculus
# ---------------------------------------------------------------------------


def _check_critical(d1, what="f'"):
    small = np.abs(np.atleast_1d(d1)) < CRITICAL_FLOOR
    if small.any():
        raise CriticalPoint(f"|{what}| < {CRITICAL_FLOOR:g}: not locally univalent there")


def _shape_like(z, out):
    return complex(out[0]) if np.ndim(z) == 0 else out


def pre_schwarzian(f: AnalyticExpr, z):
    """P(f) = f''/f'."""
    j = eval_jet(f, _as_points(z)).array
    _check_critical(j[1])
    return _shape_like(z, j[2] / j[1])


def schwarzian(f: AnalyticExpr, z):
    """S(f) = f'''/f' - (3/2)(f''/f')^2."""
    j = eval_jet(f, _as_points(z)).array
    _check_critical(j[1])
    return _shape_like(z, _kernels.backend.schwarzian(j))


def schwarzian_of_jet(j: Jet3):
    c = j.array
    _check_critical(c[1])
    out = _kernels.backend.schwarzian(c)
    return complex(out[0]) if j.scalar else out


def mobius_from_jet(z0: complex, value: complex, d1: complex, d2: complex) -> Mobius:
    """The unique Möbius map with the prescribed 2-jet at ``z0`` (``d1 != 0``).

    ``T(w) = A + B u / (1 - k u)``, ``u = w - z0``, ``k = d2 / (2 d1)``.
    """
    if abs(d1) < CRITICAL_FLOOR:
        raise CriticalPoint("Möbius map needs a non-zero first derivative")
    k = d2 / (2.0 * d1)
    return Mobius(d1 - value * k, value * (1.0 + k * z0) - d1 * z0, -k, 1.0 + k * z0)


def recover_mobius(
    phi1: AnalyticExpr,
    phi2: AnalyticExpr,
    z0: Optional[complex] = None,
    grid: GridSpec = DEFAULT_GRID,
    tol_field: float = 1e-8,
    tol_residual: float = 1e-8,
) -> Mobius:
    """Find ``T`` with ``phi1 = T ∘ phi2`` from 3-jets at a base point.

    Raises :class:`NotEquivalent` if the Schwarzian fields differ on the grid
    by more than ``tol_field`` or if the recovered map misses the grid
    residual ``tol_residual``.
    """
    pts = grid.points()
    j1 = eval_jet(phi1, pts)
    j2 = eval_jet(phi2, pts)
    s1, s2 = schwarzian_of_jet(j1), schwarzian_of_jet(j2)
    dev = np.abs(s1 - s2)
    if dev.max() > tol_field:
        k = int(dev.argmax())
        raise NotEquivalent(
            f"Schwarzian fields differ by {dev[k]:.3g} at z={pts[k]:.6g}"
        )

    if z0 is None:
        candidates = np.concatenate([[0j], pts[scan_order(pts)]])
    else:
        candidates = np.array([z0], dtype=np.complex128)
    base = None
    for cand in candidates:
        a, b = eval_jet(phi1, cand), eval_jet(phi2, cand)
        if abs(a.d1) >= 1e-6 and abs(b.d1) >= 1e-6:
            base = (a, b)
            break
    if base is None:
        raise CriticalPoint("no base point with |phi1'|, |phi2'| >= 1e-6")
    a, b = base
    t1 = a.d1 / b.d1
    t2 = (a.d2 - t1 * b.d2) / b.d1 ** 2
    T = mobius_from_jet(b.v, a.v, t1, t2)

    den = T.c * j2.array[0] + T.d
    if (np.abs(den) < POLE_FLOOR).any():
        raise NotEquivalent("recovered Möbius map has its pole on phi2(grid)")
    resid = np.abs(j1.array[0] - (T.a * j2.array[0] + T.b) / den).max()
    if not resid <= tol_residual:
        raise NotEquivalent(f"Möbius recovery residual {resid:.3g} exceeds {tol_residual:g}")
    return T


__all__ = [
    "AnalyticExpr",
    "Add",
    "Compose",
    "Constant",
    "DiskAutomorphism",
    "Div",
    "Exp",
    "Identity",
    "Mobius",
    "MobiusLeaf",
    "Mul",
    "Polynomial",
    "Scale",
    "as_expr",
    "automorphism_as_mobius",
    "eval_jet",
    "mobius_apply",
    "mobius_compose",
    "mobius_from_jet",
    "mobius_invert",
    "pre_schwarzian",
    "recover_mobius",
    "schwarzian",
    "schwarzian_of_jet",
]
