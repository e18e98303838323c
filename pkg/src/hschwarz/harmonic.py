"""Harmonic mappings ``f = conj(g) + h`` on the unit disk.

The pair ``(g, h)`` is stored un-conjugated: both parts are analytic
expressions and ``f_zbar = conj(g')``, ``f_z = h'``. Operations that act on
the values of ``f`` (affine post-maps, anti-analytic rotations, complex
conjugation) are expressed as actions on this pair; see
:class:`PairLinearMap` for the general form.

The harmonic Schwarzian ``S_H`` is available by three routes:

* :func:`schwarzian_h_closed` -- the closed form in ``h`` and ``omega = g'/h'``;
* :func:`schwarzian_h_pointwise` -- the classical Schwarzian of the frozen
  combination ``h - conj(omega(z0)) g`` evaluated at ``z0``;
* :func:`schwarzian_h_definition` -- ``d/dz P_H - P_H^2 / 2`` with ``d/dz``
  taken by finite differences.

Orientation-reversing maps are handled by conjugation (``S_H(conj f) =
S_H(f)``), applied pointwise wherever ``|g'| > |h'|``.

Note on naming: :func:`post_affine` builds ``A ∘ f`` (the affine map acts on
the *values* of ``f``). The literature calls this a "pre-composition with an
affine harmonic mapping"; the operation is the same.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .analytic import (
    AnalyticExpr,
    Add,
    Compose,
    Constant,
    DiskAutomorphism,
    Polynomial,
    Scale,
    eval_jet,
    schwarzian_of_jet,
)
from .errors import (
    CriticalPoint,
    DegenerateBasePoint,
    DegenerateJacobian,
    InvalidExpression,
    NotFactorable,
    RangeViolation,
)
from .grid import DEFAULT_GRID
from .jets import WirtingerStencil, wirtinger_dz

#: grid invariant: |J_f| at every validation point
UNIVALENCE_FLOOR = 1e-10
#: pointwise evaluation floor for |J_f|
JACOBIAN_FLOOR = 1e-14
#: |h'| floor for the dilatation and the closed Schwarzian
H_PRIME_FLOOR = 1e-12
#: decision threshold for "constant dilatation"
CONSTANT_DILATATION_TOL = 1e-9


def _points(z):
    return np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()


def _out(z, arr):
    return complex(arr[0]) if np.ndim(z) == 0 else arr


def _validation_points():
    return np.concatenate([[0j], DEFAULT_GRID.points()])


@dataclass(frozen=True)
class HarmonicMap:
    """``f = conj(g) + h`` with ``g`` (co-analytic part) and ``h`` analytic.

    Construction checks local univalence on the default grid and the origin
    (``|J_f| >= 1e-10`` with one sign throughout).
    """

    g: AnalyticExpr
    h: AnalyticExpr

    def __post_init__(self):
        pts = _validation_points()
        gj, hj = self.jets(pts)
        jac = np.abs(hj[1]) ** 2 - np.abs(gj[1]) ** 2
        bad = np.abs(jac) < UNIVALENCE_FLOOR
        if bad.any():
            k = int(np.argmax(bad))
            raise DegenerateJacobian(
                f"Jacobian {jac[k]:.3g} below {UNIVALENCE_FLOOR:g} at z={pts[k]:.6g}: "
                "map is not locally univalent on the grid"
            )
        if (jac > 0).any() and (jac < 0).any():
            k = int(np.argmin(jac * np.sign(jac[0])))
            raise DegenerateJacobian(f"Jacobian changes sign (e.g. at z={pts[k]:.6g})")
        object.__setattr__(self, "_orientation", 1 if jac[0] > 0 else -1)

    @classmethod
    def analytic(cls, h: AnalyticExpr) -> "HarmonicMap":
        return cls(Constant(0), h)

    @classmethod
    def from_dilatation(cls, h: AnalyticExpr, omega: AnalyticExpr) -> "HarmonicMap":
        """Map with analytic part ``h`` and dilatation ``omega``; ``g(0) = 0``.

        Only polynomial ``h`` and ``omega`` are accepted, so that ``g`` is the
        exact polynomial antiderivative of ``omega * h'``.
        """
        if not (isinstance(h, Polynomial) and isinstance(omega, Polynomial)):
            raise InvalidExpression("omega-form maps need polynomial h and omega")
        g = (omega * h.derivative()).antiderivative()
        return cls(g, h)

    @property
    def orientation(self) -> int:
        """+1 if orientation-preserving (J > 0), -1 if reversing."""
        return self._orientation

    def jets(self, z):
        """Packed ``(4, n)`` jet arrays of ``g`` and ``h`` at the points ``z``."""
        pts = _points(z)
        return eval_jet(self.g, pts).array, eval_jet(self.h, pts).array

    def __call__(self, z):
        gj, hj = self.jets(z)
        return _out(z, np.conj(gj[0]) + hj[0])

    def conjugate(self) -> "HarmonicMap":
        """``conj(f)``: the pair ``(g, h)`` becomes ``(h, g)``."""
        return HarmonicMap(self.h, self.g)

    def oriented(self) -> "HarmonicMap":
        return self if self.orientation > 0 else self.conjugate()


class DilatationJet(NamedTuple):
    w: complex
    w1: complex
    w2: complex


# ---------------------------------------------------------------------------
# pointwise quantities
# ---------------------------------------------------------------------------


def _require_h_prime(hj, pts):
    small = np.abs(hj[1]) < H_PRIME_FLOOR
    if small.any():
        k = int(np.argmax(small))
        raise CriticalPoint(f"|h'| < {H_PRIME_FLOOR:g} at z={pts[k]:.6g}")


def _require_jacobian(gj, hj, pts):
    jac = np.abs(hj[1]) ** 2 - np.abs(gj[1]) ** 2
    small = np.abs(jac) < JACOBIAN_FLOOR
    if small.any():
        k = int(np.argmax(small))
        raise DegenerateJacobian(f"Jacobian vanishes at z={pts[k]:.6g}")


def _oriented_jets(f: HarmonicMap, pts):
    gj, hj = f.jets(pts)
    _require_jacobian(gj, hj, pts)
    swap = np.abs(gj[1]) > np.abs(hj[1])
    ho = np.where(swap, gj, hj)
    _require_h_prime(ho, pts)
    return gj, hj


def dilatation(f: HarmonicMap, z) -> DilatationJet:
    """``omega = g'/h'`` and its first two derivatives."""
    pts = _points(z)
    gj, hj = f.jets(pts)
    _require_h_prime(hj, pts)
    w = gj[1] / hj[1]
    w1 = (gj[2] - w * hj[2]) / hj[1]
    w2 = (gj[3] - 2.0 * w1 * hj[2] - w * hj[3]) / hj[1]
    return DilatationJet(_out(z, w), _out(z, w1), _out(z, w2))


def jacobian(f: HarmonicMap, z):
    """``J_f = |h'|^2 - |g'|^2``."""
    gj, hj = f.jets(z)
    jac = np.abs(hj[1]) ** 2 - np.abs(gj[1]) ** 2
    return float(jac[0]) if np.ndim(z) == 0 else jac


def pre_schwarzian_h(f: HarmonicMap, z):
    """``P_H = d/dz log J_f = h''/h' - conj(omega) omega' / (1 - |omega|^2)``."""
    pts = _points(z)
    gj, hj = _oriented_jets(f, pts)
    return _out(z, _kernels.backend.pre_schwarzian_h(hj, gj))


def pre_schwarzian_h_quotient(f: HarmonicMap, z):
    """``P_H`` as ``(h'' conj(h') - g'' conj(g')) / J_f``; algebraic cross-check."""
    pts = _points(z)
    gj, hj = f.jets(pts)
    _require_jacobian(gj, hj, pts)
    jac = np.abs(hj[1]) ** 2 - np.abs(gj[1]) ** 2
    return _out(z, (hj[2] * np.conj(hj[1]) - gj[2] * np.conj(gj[1])) / jac)


def schwarzian_h_closed(f: HarmonicMap, z):
    """Closed form of ``S_H`` in terms of ``h``, ``omega``, ``omega'``, ``omega''``."""
    pts = _points(z)
    gj, hj = _oriented_jets(f, pts)
    return _out(z, _kernels.backend.schwarzian_h(hj, gj))


schwarzian_h = schwarzian_h_closed


def schwarzian_h_pointwise(f: HarmonicMap, z):
    """``S_H(f)(z0) = S(h - conj(omega(z0)) g)(z0)`` at each point."""
    pts = _points(z)
    gj, hj = _oriented_jets(f, pts)
    return _out(z, _kernels.backend.schwarzian_h_pointwise(hj, gj))


def schwarzian_h_definition(f: HarmonicMap, z, stencil: WirtingerStencil | None = None):
    """``d/dz P_H - P_H^2 / 2`` with a finite-difference Wirtinger derivative."""
    stencil = stencil or WirtingerStencil()
    p = pre_schwarzian_h(f, z)
    dp = wirtinger_dz(lambda pts: pre_schwarzian_h(f, pts), z, stencil)
    return dp - 0.5 * p * p


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineMap:
    """``w -> a conj(w) + b w + c`` with ``|a| != |b|``."""

    a: complex = 0j
    b: complex = 1 + 0j
    c: complex = 0j

    def __post_init__(self):
        for name in "abc":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(abs(self.a) - abs(self.b)) < 1e-10:
            raise ValueError("affine harmonic map needs |a| != |b|")

    def __call__(self, w):
        w = np.asarray(w, dtype=np.complex128)
        out = self.a * np.conj(w) + self.b * w + self.c
        return complex(out) if out.ndim == 0 else out

    def pair_map(self) -> "PairLinearMap":
        return PairLinearMap(
            self.b.conjugate(), self.a.conjugate(), self.a, self.b, 0j, self.c
        )


@dataclass(frozen=True)
class RotationMu:
    """Anti-analytic rotation ``conj(g) + h -> mu conj(g) + h``, ``|mu| = 1``."""

    mu: complex = 1 + 0j

    def __post_init__(self):
        mu = complex(self.mu)
        if abs(mu) == 0 or not np.isfinite(mu):
            raise ValueError("rotation needs a finite non-zero mu")
        object.__setattr__(self, "mu", mu / abs(mu))

    def pair_map(self) -> "PairLinearMap":
        return PairLinearMap(self.mu.conjugate(), 0j, 0j, 1 + 0j, 0j, 0j)


@dataclass(frozen=True)
class PairLinearMap:
    """``(g, h) -> (m11 g + m12 h + t1, m21 g + m22 h + t2)``."""

    m11: complex = 1 + 0j
    m12: complex = 0j
    m21: complex = 0j
    m22: complex = 1 + 0j
    t1: complex = 0j
    t2: complex = 0j

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22", "t1", "t2"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.det) < 1e-12:
            raise ValueError("pair-linear map is not invertible")

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @classmethod
    def identity(cls) -> "PairLinearMap":
        return cls()

    @classmethod
    def swap(cls) -> "PairLinearMap":
        """The action of complex conjugation ``f -> conj(f)``."""
        return cls(0j, 1 + 0j, 1 + 0j, 0j)

    def then(self, other: "PairLinearMap") -> "PairLinearMap":
        """Apply ``self`` first, then ``other``."""
        return other.compose(self)

    def compose(self, inner: "PairLinearMap") -> "PairLinearMap":
        """``self ∘ inner``."""
        m = self.matrix @ inner.matrix
        t = self.matrix @ np.array([inner.t1, inner.t2]) + np.array([self.t1, self.t2])
        return PairLinearMap(m[0, 0], m[0, 1], m[1, 0], m[1, 1], t[0], t[1])

    def inverse(self) -> "PairLinearMap":
        mi = np.linalg.inv(self.matrix)
        t = -mi @ np.array([self.t1, self.t2])
        return PairLinearMap(mi[0, 0], mi[0, 1], mi[1, 0], mi[1, 1], t[0], t[1])

    def canonical(self) -> "PairLinearMap":
        """Fold the constant of the ``g`` slot into the ``h`` slot.

        ``conj(g + t1) + h + t2 = conj(g) + h + (conj(t1) + t2)``, so both
        forms describe the same action on values of ``f``.
        """
        return PairLinearMap(
            self.m11, self.m12, self.m21, self.m22, 0j, self.t2 + self.t1.conjugate()
        )

    def apply_values(self, g, h):
        g = np.asarray(g)
        h = np.asarray(h)
        return self.m11 * g + self.m12 * h + self.t1, self.m21 * g + self.m22 * h + self.t2

    def is_close(self, other: "PairLinearMap", tol: float = 1e-12) -> bool:
        a, b = self.canonical(), other.canonical()
        fa = np.array([a.m11, a.m12, a.m21, a.m22, a.t2])
        fb = np.array([b.m11, b.m12, b.m21, b.m22, b.t2])
        return bool(np.abs(fa - fb).max() <= tol)


def _lincomb(coeffs_exprs, const) -> AnalyticExpr:
    terms = []
    for k, e in coeffs_exprs:
        if k == 0:
            continue
        terms.append(e if k == 1 else Scale(k, e))
    if const != 0 or not terms:
        terms.append(Constant(const))
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def apply_pair_linear(M: PairLinearMap, f: HarmonicMap) -> HarmonicMap:
    g = _lincomb([(M.m11, f.g), (M.m12, f.h)], M.t1)
    h = _lincomb([(M.m21, f.g), (M.m22, f.h)], M.t2)
    return HarmonicMap(g, h)


def post_affine(A: AffineMap, f: HarmonicMap) -> HarmonicMap:
    """``A ∘ f``: new pair ``(conj(a) h + conj(b) g, a g + b h + c)``."""
    a, b = A.a, A.b
    g = _lincomb([(b.conjugate(), f.g), (a.conjugate(), f.h)], 0j)
    h = _lincomb([(a, f.g), (b, f.h)], A.c)
    return HarmonicMap(g, h)


def rotate_antianalytic(mu, f: HarmonicMap) -> HarmonicMap:
    """``R_mu(f) = mu conj(g) + h``; stored as ``(conj(mu) g, h)``."""
    mu = mu if isinstance(mu, RotationMu) else RotationMu(mu)
    return HarmonicMap(_lincomb([(mu.mu.conjugate(), f.g)], 0j), f.h)


def precompose(f: HarmonicMap, phi: AnalyticExpr) -> HarmonicMap:
    """``f ∘ phi`` for an analytic self-map ``phi`` of the disk."""
    pts = _validation_points()
    pj = eval_jet(phi, pts).array
    out = np.abs(pj[0]) >= 1.0
    if out.any():
        k = int(np.argmax(out))
        raise RangeViolation(f"phi maps z={pts[k]:.6g} outside the unit disk")
    flat = np.abs(pj[1]) < H_PRIME_FLOOR
    if flat.any():
        k = int(np.argmax(flat))
        raise RangeViolation(f"phi is not locally univalent at z={pts[k]:.6g}")
    return HarmonicMap(Compose(f.g, phi), Compose(f.h, phi))


def factor_pair_linear(M: PairLinearMap, tol: float = 1e-9):
    """Write ``M`` as the action of ``A ∘ R_mu``; returns ``(A, RotationMu)``.

    The composite action is ``(conj(b) conj(mu) g + conj(a) h,
    a conj(mu) g + b h + c)``. ``mu`` is read from ``m21 / conj(m12)`` (or
    from ``m11 / conj(m22)`` when ``|a| < |b|``). Raises
    :class:`~hschwarz.errors.NotFactorable` if the residual exceeds ``tol``.
    """
    if M.t1 != 0:
        raise ValueError("factor_pair_linear expects t1 == 0; use PairLinearMap.canonical()")
    a = M.m12.conjugate()
    b = M.m22
    if abs(a) >= abs(b):
        cmu = M.m21 / a if a != 0 else 1 + 0j
    else:
        cmu = M.m11 / b.conjugate()
    if abs(abs(cmu) - 1.0) > tol:
        raise NotFactorable(f"rotation factor has modulus {abs(cmu):.12g}, not 1")
    mu = cmu.conjugate() / abs(cmu)
    resid = max(
        abs(M.m11 - b.conjugate() * mu.conjugate()),
        abs(M.m21 - a * mu.conjugate()),
    )
    if resid > tol * max(1.0, abs(a), abs(b)):
        raise NotFactorable(f"pair-linear map is not an affine-rotation action (residual {resid:.3g})")
    try:
        A = AffineMap(a, b, M.t2)
    except ValueError as exc:
        raise NotFactorable(str(exc)) from exc
    return A, RotationMu(mu)


# ---------------------------------------------------------------------------
# normalisation
# ---------------------------------------------------------------------------


class Normalization(NamedTuple):
    map: HarmonicMap
    pair_map: PairLinearMap
    automorphism: DiskAutomorphism


def normalization_defects(f: HarmonicMap) -> dict:
    """Residuals of h(0)=g(0)=0, h'(0)=1, omega(0)=0, Im omega'(0)=0 and
    the value of Re omega'(0) (which must be positive)."""
    gj, hj = f.jets(0j)
    w, w1, _ = dilatation(f, 0j)
    return {
        "h(0)": float(abs(hj[0, 0])),
        "g(0)": float(abs(gj[0, 0])),
        "h'(0)-1": float(abs(hj[1, 0] - 1.0)),
        "omega(0)": float(abs(w)),
        "Im omega'(0)": float(abs(w1.imag)),
        "Re omega'(0)": float(w1.real),
    }


def is_normalized(f: HarmonicMap, tol: float = 1e-10) -> bool:
    d = normalization_defects(f)
    return d.pop("Re omega'(0)") > 0 and all(v <= tol for v in d.values())


def is_constant_dilatation(f: HarmonicMap, tol: float = CONSTANT_DILATATION_TOL, points=None):
    """(flag, omega(0)) -- constant iff max |omega(z) - omega(0)| < tol on the grid."""
    pts = DEFAULT_GRID.points() if points is None else points
    w0 = dilatation(f, 0j).w
    w = dilatation(f, pts).w
    return bool(np.abs(w - w0).max() < tol), w0


def normalize_at(f: HarmonicMap, w: complex = 0j) -> Normalization:
    """Recenter ``f`` at ``w`` and bring it to the canonical gauge.

    Returns ``(f_w, M, phi_w)`` with ``pair(f_w) = M . pair(f ∘ phi_w)`` and
    ``f_w`` satisfying ``h(0) = g(0) = 0``, ``h'(0) = 1``, ``omega(0) = 0``
    and ``omega'(0) > 0``. Steps: precompose with ``phi_w`` and remove
    ``g(w)``, ``h(w)`` and the scale ``h'(w)(1 - |w|^2)``; rotate so that
    ``h'`` is real; apply the affine map killing ``omega(0)``; rotate so
    that ``omega'(0) > 0``.
    """
    w = complex(w)
    if f.orientation < 0:
        raise ValueError("normalize_at expects an orientation-preserving map; conjugate first")
    phi = DiskAutomorphism(w)
    gw, hw = f.jets(w)
    if abs(hw[1, 0]) < 1e-10:
        raise DegenerateBasePoint(f"|h'(w)| < 1e-10 at w={w:.6g}")
    s = hw[1, 0] * (1.0 - abs(w) ** 2)

    M1 = PairLinearMap(1.0 / s.conjugate(), 0j, 0j, 1.0 / s, -gw[0, 0] / s.conjugate(), -hw[0, 0] / s)
    F = apply_pair_linear(M1, precompose(f, phi.expr()))

    R1 = RotationMu(hw[1, 0] / hw[1, 0].conjugate())
    F = rotate_antianalytic(R1, F)

    alpha0 = dilatation(F, 0j).w
    k = 1.0 / (1.0 - abs(alpha0) ** 2)
    A = AffineMap(-alpha0.conjugate() * k, k, 0j)
    F = post_affine(A, F)

    w1 = dilatation(F, 0j).w1
    if abs(w1) < 1e-10:
        raise DegenerateBasePoint(
            f"omega' vanishes at the recentred origin (w={w:.6g}); pick another base point"
        )
    # conj(mu) multiplies omega, so mu = w1/|w1| turns omega'(0) into |w1|
    R2 = RotationMu(w1 / abs(w1))
    F = rotate_antianalytic(R2, F)

    M = M1.then(R1.pair_map()).then(A.pair_map()).then(R2.pair_map())
    return Normalization(F, M, phi)
