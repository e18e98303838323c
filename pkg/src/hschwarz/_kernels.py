"""Hot numeric kernels: batched 3-jet arithmetic and the closed-form
harmonic Schwarzian over arrays of points.

Every kernel exists twice, as a numba ``@njit`` loop and as a vectorised
numpy expression. Jets are packed as complex128 arrays of shape ``(4, n)``
holding value, first, second and third derivative for ``n`` points.

The active backend is numba unless ``HSCHWARZ_DISABLE_JIT`` is set to a
truthy value or numba cannot be imported. Both backends stay importable as
:data:`numpy_backend` and :data:`numba_backend` (the latter is ``None``
without numba) so the benchmark can compare them in one process.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _np_mul(a, b):
    out = np.empty_like(a)
    out[0] = a[0] * b[0]
    out[1] = a[1] * b[0] + a[0] * b[1]
    out[2] = a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2]
    out[3] = a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3]
    return out


def _np_div(a, b):
    out = np.empty_like(a)
    q0 = a[0] / b[0]
    q1 = (a[1] - q0 * b[1]) / b[0]
    q2 = (a[2] - 2.0 * q1 * b[1] - q0 * b[2]) / b[0]
    q3 = (a[3] - 3.0 * q2 * b[1] - 3.0 * q1 * b[2] - q0 * b[3]) / b[0]
    out[0], out[1], out[2], out[3] = q0, q1, q2, q3
    return out


def _np_compose(outer, inner):
    out = np.empty_like(outer)
    g1, g2, g3 = inner[1], inner[2], inner[3]
    out[0] = outer[0]
    out[1] = outer[1] * g1
    out[2] = outer[2] * g1 * g1 + outer[1] * g2
    out[3] = outer[3] * g1 * g1 * g1 + 3.0 * outer[2] * g1 * g2 + outer[1] * g3
    return out


def _np_poly(coeffs, z):
    # Horner on p, p', p'', p''' simultaneously
    n = coeffs.shape[0]
    out = np.zeros((4, z.shape[0]), dtype=np.complex128)
    for k in range(n - 1, -1, -1):
        c = coeffs[k]
        out[3] = out[3] * z + 3.0 * out[2]
        out[2] = out[2] * z + 2.0 * out[1]
        out[1] = out[1] * z + out[0]
        out[0] = out[0] * z + c
    return out


def _np_schwarzian(j):
    p = j[2] / j[1]
    return j[3] / j[1] - 1.5 * p * p


def _np_orient(hj, gj):
    swap = np.abs(gj[1]) > np.abs(hj[1])
    h = np.where(swap, gj, hj)
    g = np.where(swap, hj, gj)
    return h, g


def _np_dilatation(hj, gj):
    w = gj[1] / hj[1]
    w1 = (gj[2] - w * hj[2]) / hj[1]
    w2 = (gj[3] - 2.0 * w1 * hj[2] - w * hj[3]) / hj[1]
    return w, w1, w2


def _np_pre_schwarzian_h(hj, gj):
    h, g = _np_orient(hj, gj)
    w, w1, _ = _np_dilatation(h, g)
    return h[2] / h[1] - np.conj(w) * w1 / (1.0 - (w * np.conj(w)).real)


def _np_schwarzian_h(hj, gj):
    h, g = _np_orient(hj, gj)
    w, w1, w2 = _np_dilatation(h, g)
    p = h[2] / h[1]
    cw = np.conj(w)
    d = 1.0 - (w * cw).real
    t = w1 * cw / d
    return h[3] / h[1] - 1.5 * p * p + cw / d * (p * w1 - w2) - 1.5 * t * t


def _np_schwarzian_h_pointwise(hj, gj):
    h, g = _np_orient(hj, gj)
    c = np.conj(g[1] / h[1])
    f1 = h[1] - c * g[1]
    f2 = h[2] - c * g[2]
    f3 = h[3] - c * g[3]
    p = f2 / f1
    return f3 / f1 - 1.5 * p * p


numpy_backend = SimpleNamespace(
    name="numpy",
    mul=_np_mul,
    div=_np_div,
    compose=_np_compose,
    poly=_np_poly,
    schwarzian=_np_schwarzian,
    pre_schwarzian_h=_np_pre_schwarzian_h,
    schwarzian_h=_np_schwarzian_h,
    schwarzian_h_pointwise=_np_schwarzian_h_pointwise,
)

# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


def _build_numba_backend():
    from numba import njit

    @njit(cache=True, nogil=True)
    def mul(a, b):
        n = a.shape[1]
        out = np.empty((4, n), dtype=np.complex128)
        for i in range(n):
            a0, a1, a2, a3 = a[0, i], a[1, i], a[2, i], a[3, i]
            b0, b1, b2, b3 = b[0, i], b[1, i], b[2, i], b[3, i]
            out[0, i] = a0 * b0
            out[1, i] = a1 * b0 + a0 * b1
            out[2, i] = a2 * b0 + 2.0 * a1 * b1 + a0 * b2
            out[3, i] = a3 * b0 + 3.0 * a2 * b1 + 3.0 * a1 * b2 + a0 * b3
        return out

    @njit(cache=True, nogil=True)
    def div(a, b):
        n = a.shape[1]
        out = np.empty((4, n), dtype=np.complex128)
        for i in range(n):
            b0, b1, b2, b3 = b[0, i], b[1, i], b[2, i], b[3, i]
            q0 = a[0, i] / b0
            q1 = (a[1, i] - q0 * b1) / b0
            q2 = (a[2, i] - 2.0 * q1 * b1 - q0 * b2) / b0
            q3 = (a[3, i] - 3.0 * q2 * b1 - 3.0 * q1 * b2 - q0 * b3) / b0
            out[0, i] = q0
            out[1, i] = q1
            out[2, i] = q2
            out[3, i] = q3
        return out

    @njit(cache=True, nogil=True)
    def compose(outer, inner):
        n = outer.shape[1]
        out = np.empty((4, n), dtype=np.complex128)
        for i in range(n):
            g1, g2, g3 = inner[1, i], inner[2, i], inner[3, i]
            f1, f2, f3 = outer[1, i], outer[2, i], outer[3, i]
            out[0, i] = outer[0, i]
            out[1, i] = f1 * g1
            out[2, i] = f2 * g1 * g1 + f1 * g2
            out[3, i] = f3 * g1 * g1 * g1 + 3.0 * f2 * g1 * g2 + f1 * g3
        return out

    @njit(cache=True, nogil=True)
    def poly(coeffs, z):
        m = coeffs.shape[0]
        n = z.shape[0]
        out = np.empty((4, n), dtype=np.complex128)
        for i in range(n):
            zi = z[i]
            p0 = 0j
            p1 = 0j
            p2 = 0j
            p3 = 0j
            for k in range(m - 1, -1, -1):
                p3 = p3 * zi + 3.0 * p2
                p2 = p2 * zi + 2.0 * p1
                p1 = p1 * zi + p0
                p0 = p0 * zi + coeffs[k]
            out[0, i] = p0
            out[1, i] = p1
            out[2, i] = p2
            out[3, i] = p3
        return out

    @njit(cache=True, nogil=True)
    def schwarzian(j):
        n = j.shape[1]
        out = np.empty(n, dtype=np.complex128)
        for i in range(n):
            p = j[2, i] / j[1, i]
            out[i] = j[3, i] / j[1, i] - 1.5 * p * p
        return out

    @njit(cache=True, nogil=True)
    def _oriented(hj, gj, i):
        if abs(gj[1, i]) > abs(hj[1, i]):
            return gj[1, i], gj[2, i], gj[3, i], hj[1, i], hj[2, i], hj[3, i]
        return hj[1, i], hj[2, i], hj[3, i], gj[1, i], gj[2, i], gj[3, i]

    @njit(cache=True, nogil=True)
    def pre_schwarzian_h(hj, gj):
        n = hj.shape[1]
        out = np.empty(n, dtype=np.complex128)
        for i in range(n):
            h1, h2, h3, g1, g2, g3 = _oriented(hj, gj, i)
            w = g1 / h1
            w1 = (g2 - w * h2) / h1
            cw = w.conjugate()
            out[i] = h2 / h1 - cw * w1 / (1.0 - (w * cw).real)
        return out

    @njit(cache=True, nogil=True)
    def schwarzian_h(hj, gj):
        n = hj.shape[1]
        out = np.empty(n, dtype=np.complex128)
        for i in range(n):
            h1, h2, h3, g1, g2, g3 = _oriented(hj, gj, i)
            w = g1 / h1
            w1 = (g2 - w * h2) / h1
            w2 = (g3 - 2.0 * w1 * h2 - w * h3) / h1
            p = h2 / h1
            cw = w.conjugate()
            d = 1.0 - (w * cw).real
            t = w1 * cw / d
            out[i] = h3 / h1 - 1.5 * p * p + cw / d * (p * w1 - w2) - 1.5 * t * t
        return out

    @njit(cache=True, nogil=True)
    def schwarzian_h_pointwise(hj, gj):
        n = hj.shape[1]
        out = np.empty(n, dtype=np.complex128)
        for i in range(n):
            h1, h2, h3, g1, g2, g3 = _oriented(hj, gj, i)
            c = (g1 / h1).conjugate()
            f1 = h1 - c * g1
            f2 = h2 - c * g2
            f3 = h3 - c * g3
            p = f2 / f1
            out[i] = f3 / f1 - 1.5 * p * p
        return out

    return SimpleNamespace(
        name="numba",
        mul=mul,
        div=div,
        compose=compose,
        poly=poly,
        schwarzian=schwarzian,
        pre_schwarzian_h=pre_schwarzian_h,
        schwarzian_h=schwarzian_h,
        schwarzian_h_pointwise=schwarzian_h_pointwise,
    )


def _jit_disabled() -> bool:
    return os.environ.get("HSCHWARZ_DISABLE_JIT", "").strip().lower() in {"1", "true", "yes", "on"}


try:
    numba_backend = _build_numba_backend()
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None

backend = numpy_backend if (_jit_disabled() or numba_backend is None) else numba_backend
