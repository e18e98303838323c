"""Deciding ``S_H(f1) = S_H(f2)`` and rebuilding the connecting transformation.

Two harmonic maps have the same harmonic Schwarzian exactly when

* both dilatations are non-constant and ``f2 = A ∘ R_mu(f1)`` for an affine
  harmonic map ``A`` and an anti-analytic rotation ``R_mu``; or
* both dilatations are constant, ``f_i = alpha_i conj(h_i) + h_i + gamma_i``,
  and ``h2 = T ∘ h1`` for a Möbius map ``T``.

:func:`check_equal_schwarzian` decides which case applies and returns the
witness. The ``verify_*`` functions evaluate, on a grid, the intermediate
identities that hold for S_H-equal pairs in the canonical gauge (see
:func:`hschwarz.harmonic.normalize_at`); each returns an
:class:`IdentityReport`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .analytic import DiskAutomorphism, Mobius, recover_mobius, schwarzian, schwarzian_of_jet
from .errors import (
    ConstantDilatation,
    DegenerateBasePoint,
    HSchwarzError,
    NotEquivalent,
    NotFactorable,
    NotNormalized,
)
from .grid import DEFAULT_GRID, GridSpec, scan_order
from .harmonic import (
    AffineMap,
    HarmonicMap,
    RotationMu,
    dilatation,
    factor_pair_linear,
    is_constant_dilatation,
    normalization_defects,
    normalize_at,
    post_affine,
    precompose,
    rotate_antianalytic,
    schwarzian_h_closed,
)
from .jets import Jet3

TOL_FIELD = 1e-7
TOL_WITNESS = 1e-8
TOL_IDENTITY = 1e-8
TOL_PHI = 1e-7
TOL_INVARIANCE = 1e-10
TOL_CHAIN = 1e-9
#: admissibility floor for |omega_i'(w)| when choosing the base point
BASE_POINT_FLOOR = 1e-8
NORMALIZED_TOL = 1e-9
#: Richardson ladder for the phi_1 limit. Smaller radii lose more to
#: cancellation (phi_1 ~ r^3 is a difference of O(r^2) terms) than they gain.
LIMIT_RADII = (4e-2, 2e-2, 1e-2, 5e-3)


class Verdict(enum.Enum):
    NOT_EQUAL = "NotEqual"
    EQUAL_NONCONSTANT = "EqualNonConstant"
    EQUAL_CONSTANT_FAMILY = "EqualConstantFamily"


@dataclass(frozen=True)
class DilatationClass:
    constant: bool
    omega0: Optional[complex] = None

    def __str__(self):
        return f"Constant({self.omega0})" if self.constant else "NonConstant"


@dataclass
class ConnectionResult:
    verdict: Verdict
    residual: float = float("nan")
    affine: Optional[AffineMap] = None
    rotation: Optional[RotationMu] = None
    mobius: Optional[Mobius] = None
    alpha1: Optional[complex] = None
    alpha2: Optional[complex] = None
    gamma1: Optional[complex] = None
    gamma2: Optional[complex] = None
    #: whether f1 / f2 were conjugated to make them orientation-preserving
    conjugated: tuple = (False, False)
    diagnostics: dict = field(default_factory=dict)

    @property
    def equal(self) -> bool:
        return self.verdict is not Verdict.NOT_EQUAL

    def reconstruct(self, f1: HarmonicMap) -> HarmonicMap:
        """Apply the non-constant witness to ``f1``; should reproduce ``f2``."""
        if self.verdict is not Verdict.EQUAL_NONCONSTANT:
            raise ValueError("only EqualNonConstant verdicts carry an affine-rotation witness")
        base = f1.conjugate() if self.conjugated[0] else f1
        out = post_affine(self.affine, rotate_antianalytic(self.rotation, base))
        return out.conjugate() if self.conjugated[1] else out

    def predict(self, f1: HarmonicMap, z):
        """Values the witness predicts for ``f2`` at ``z``."""
        z = np.asarray(z, dtype=np.complex128)
        if self.verdict is Verdict.EQUAL_NONCONSTANT:
            return self.reconstruct(f1)(z)
        if self.verdict is Verdict.EQUAL_CONSTANT_FAMILY:
            base = f1.conjugate() if self.conjugated[0] else f1
            t = self.mobius(base.h(z))
            vals = self.alpha2 * np.conj(t) + t + self.gamma2
            return np.conj(vals) if self.conjugated[1] else vals
        raise ValueError("NotEqual verdicts carry no witness")


@dataclass(frozen=True)
class IdentityReport:
    name: str
    max_residual: float
    worst_point: complex
    passed: bool
    tolerance: float
    subreports: tuple = ()

    @classmethod
    def from_residuals(cls, name, residual, points, tolerance, subreports=()):
        residual = np.abs(np.asarray(residual))
        k = int(np.argmax(residual))
        worst = float(residual[k])
        overall = max([worst] + [r.max_residual for r in subreports])
        wp = complex(points[k]) if np.ndim(points) else complex(points)
        return cls(name, overall, wp, bool(overall <= tolerance), tolerance, tuple(subreports))


# ---------------------------------------------------------------------------
# classification and the decision procedure
# ---------------------------------------------------------------------------


def classify_dilatation(f: HarmonicMap, grid: GridSpec = DEFAULT_GRID) -> DilatationClass:
    f = f.oriented()
    const, w0 = is_constant_dilatation(f, points=grid.points())
    return DilatationClass(True, w0) if const else DilatationClass(False)


def _field_deviation(f1, f2, pts):
    s1 = schwarzian_h_closed(f1, pts)
    s2 = schwarzian_h_closed(f2, pts)
    dev = np.abs(s1 - s2)
    k = int(np.argmax(dev))
    return float(dev[k]), complex(pts[k]), dev


def _admissible_base_points(f1, f2, pts):
    cand = np.concatenate([[0j], pts[scan_order(pts)]])
    for w in cand:
        try:
            d1 = dilatation(f1, w).w1
            d2 = dilatation(f2, w).w1
        except HSchwarzError:
            continue
        if abs(d1) >= BASE_POINT_FLOOR and abs(d2) >= BASE_POINT_FLOOR:
            yield complex(w)


def check_equal_schwarzian(
    f1: HarmonicMap,
    f2: HarmonicMap,
    grid: GridSpec = DEFAULT_GRID,
    tol_field: float = TOL_FIELD,
    tol_witness: float = TOL_WITNESS,
    base_point: Optional[complex] = None,
) -> ConnectionResult:
    """Decide whether ``S_H(f1) = S_H(f2)`` and reconstruct the witness.

    Base point policy for non-constant dilatations: the origin, then grid
    points by increasing modulus and angle; the first ``w`` with
    ``|omega_1'(w)|, |omega_2'(w)| >= 1e-8`` is used unless ``base_point``
    is given.
    """
    pts = grid.points()
    conj = (f1.orientation < 0, f2.orientation < 0)
    g1, g2 = f1.oriented(), f2.oriented()

    dev, worst, devs = _field_deviation(g1, g2, pts)
    diag = {
        "max_field_deviation": dev,
        "worst_point": worst,
        "mean_field_deviation": float(devs.mean()),
        "grid_points": int(len(pts)),
    }
    if dev > tol_field:
        diag["reason"] = "harmonic Schwarzian fields differ"
        return ConnectionResult(Verdict.NOT_EQUAL, conjugated=conj, diagnostics=diag)

    c1, c2 = classify_dilatation(g1, grid), classify_dilatation(g2, grid)
    diag["dilatation_classes"] = (str(c1), str(c2))
    if c1.constant != c2.constant:
        diag["reason"] = "one dilatation is constant and the other is not"
        return ConnectionResult(Verdict.NOT_EQUAL, conjugated=conj, diagnostics=diag)

    if c1.constant:
        return _connect_constant(f1, f2, g1, g2, c1, c2, grid, tol_witness, conj, diag)
    return _connect_nonconstant(f1, f2, g1, g2, grid, tol_witness, base_point, conj, diag)


def _connect_constant(f1, f2, g1, g2, c1, c2, grid, tol_witness, conj, diag):
    pts = grid.points()
    try:
        T = recover_mobius(g2.h, g1.h, grid=grid)
    except NotEquivalent as exc:
        diag["reason"] = f"analytic parts are not Möbius-related: {exc}"
        return ConnectionResult(Verdict.NOT_EQUAL, conjugated=conj, diagnostics=diag)
    # f = conj(g) + h with g = omega0 h + k  =>  f = conj(omega0) conj(h) + h + conj(k)
    alphas, gammas = [], []
    for fi, ci in ((g1, c1), (g2, c2)):
        gj, hj = fi.jets(0j)
        alphas.append(ci.omega0.conjugate())
        gammas.append(complex(gj[0, 0] - ci.omega0 * hj[0, 0]).conjugate())
    result = ConnectionResult(
        Verdict.EQUAL_CONSTANT_FAMILY,
        mobius=T,
        alpha1=alphas[0],
        alpha2=alphas[1],
        gamma1=gammas[0],
        gamma2=gammas[1],
        conjugated=conj,
        diagnostics=diag,
    )
    result.residual = float(np.abs(f2(pts) - result.predict(f1, pts)).max())
    if not result.residual <= tol_witness:
        diag["reason"] = f"constant-family witness residual {result.residual:.3g}"
        return ConnectionResult(Verdict.NOT_EQUAL, conjugated=conj, diagnostics=diag)
    return result


def _connect_nonconstant(f1, f2, g1, g2, grid, tol_witness, base_point, conj, diag):
    pts = grid.points()
    if base_point is None:
        w = next(_admissible_base_points(g1, g2, pts), None)
        if w is None:
            raise DegenerateBasePoint("no admissible base point on the grid")
    else:
        w = complex(base_point)
    n1 = normalize_at(g1, w)
    n2 = normalize_at(g2, w)
    diag["base_point"] = w
    w1p = dilatation(n1.map, 0j).w1
    w2p = dilatation(n2.map, 0j).w1
    diag["omega_prime_0"] = (w1p, w2p)
    diag["omega_prime_gap"] = abs(w1p - w2p)

    gj1, hj1 = n1.map.jets(pts)
    gj2, hj2 = n2.map.jets(pts)
    gap = max(np.abs(gj1[0] - gj2[0]).max(), np.abs(hj1[0] - hj2[0]).max())
    diag["normalized_gap"] = float(gap)
    if gap > tol_witness:
        diag["reason"] = "normalized maps differ"
        return ConnectionResult(Verdict.NOT_EQUAL, conjugated=conj, diagnostics=diag)

    # pair(f2) = M2^-1 M1 pair(f1)
    M = n2.pair_map.inverse().compose(n1.pair_map).canonical()
    try:
        A, mu = factor_pair_linear(M)
    except NotFactorable as exc:
        diag["reason"] = f"connecting map is not affine-rotation: {exc}"
        return ConnectionResult(Verdict.NOT_EQUAL, conjugated=conj, diagnostics=diag)
    result = ConnectionResult(
        Verdict.EQUAL_NONCONSTANT, affine=A, rotation=mu, conjugated=conj, diagnostics=diag
    )
    result.residual = float(np.abs(f2(pts) - result.predict(f1, pts)).max())
    if not result.residual <= tol_witness:
        diag["reason"] = f"witness residual {result.residual:.3g}"
        return ConnectionResult(Verdict.NOT_EQUAL, conjugated=conj, diagnostics=diag)
    return result


# ---------------------------------------------------------------------------
# invariances of S_H
# ---------------------------------------------------------------------------


def random_affine(rng: np.random.Generator, gap: float = 0.1) -> AffineMap:
    """Random affine map with ``||a| - |b|| >= gap``, both orientations."""
    while True:
        a, b, c = (complex(*rng.uniform(-1.5, 1.5, 2)) for _ in range(3))
        if abs(abs(a) - abs(b)) >= gap:
            return AffineMap(a, b, c)


def random_rotation(rng: np.random.Generator) -> RotationMu:
    return RotationMu(np.exp(1j * rng.uniform(0, 2 * np.pi)))


def random_disk_point(rng: np.random.Generator, max_radius: float = 0.5) -> complex:
    r = max_radius * np.sqrt(rng.uniform())
    return complex(r * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def _worst(records, name, tol):
    """Reduce ``(residual array, points)`` pairs to one report."""
    best = (-1.0, 0j)
    for res, pts in records:
        res = np.abs(res)
        k = int(np.argmax(res))
        if res[k] > best[0]:
            best = (float(res[k]), complex(pts[k]))
    return IdentityReport(name, best[0], best[1], best[0] <= tol, tol)


def verify_invariance(
    f: HarmonicMap,
    grid: GridSpec = DEFAULT_GRID,
    n_affine: int = 20,
    n_rotation: int = 8,
    n_automorphism: int = 5,
    seed: int = 0,
    tol: float = TOL_INVARIANCE,
    tol_chain: float = TOL_CHAIN,
):
    """S_H is unchanged by affine post-maps, anti-analytic rotations and
    conjugation, and obeys the chain rule under disk automorphisms."""
    rng = np.random.default_rng(seed)
    pts = grid.points()
    base = schwarzian_h_closed(f, pts)
    affine = [
        (schwarzian_h_closed(post_affine(random_affine(rng), f), pts) - base, pts)
        for _ in range(n_affine)
    ]
    rotation = [
        (schwarzian_h_closed(rotate_antianalytic(random_rotation(rng), f), pts) - base, pts)
        for _ in range(n_rotation)
    ]
    conj = [(schwarzian_h_closed(f.conjugate(), pts) - base, pts)]
    chain = []
    for _ in range(n_automorphism):
        phi = DiskAutomorphism(random_disk_point(rng))
        lhs = schwarzian_h_closed(precompose(f, phi.expr()), pts)
        rhs = schwarzian_h_closed(f, phi(pts)) * phi.derivative(pts) ** 2 + schwarzian(phi.expr(), pts)
        chain.append((lhs - rhs, pts))
    return [
        _worst(affine, "invariance.affine", tol),
        _worst(rotation, "invariance.rotation", tol),
        _worst(conj, "invariance.conjugation", tol),
        _worst(chain, "invariance.chain_rule", tol_chain),
    ]


# ---------------------------------------------------------------------------
# identity suites for normalized S_H-equal pairs
# ---------------------------------------------------------------------------


def require_normalized(f: HarmonicMap, tol: float = NORMALIZED_TOL):
    if f.orientation < 0:
        raise NotNormalized("map is orientation-reversing")
    d = normalization_defects(f)
    if not d.pop("Re omega'(0)") > 0:
        raise NotNormalized("omega'(0) is not a positive real number")
    bad = {k: v for k, v in d.items() if v > tol}
    if bad:
        raise NotNormalized("normalization violated: " + ", ".join(f"|{k}|={v:.3g}" for k, v in bad.items()))


@dataclass(frozen=True)
class NormalizedPairContext:
    """Constants shared by the identities for a normalized pair."""

    a0: complex
    omega1_p0: complex
    omega2_p0: complex
    Phi1_0: complex
    Phi2_0: complex

    @classmethod
    def of(cls, f1: HarmonicMap, f2: HarmonicMap, strict: bool = True) -> "NormalizedPairContext":
        if strict:
            require_normalized(f1)
            require_normalized(f2)
        _, h1 = f1.jets(0j)
        _, h2 = f2.jets(0j)
        d1, d2 = dilatation(f1, 0j), dilatation(f2, 0j)
        return cls(
            a0=complex(h2[2, 0] - h1[2, 0]) / 2.0,
            omega1_p0=d1.w1,
            omega2_p0=d2.w1,
            Phi1_0=complex(h1[2, 0] / h1[1, 0]) * d1.w1 - d1.w2,
            Phi2_0=complex(h2[2, 0] / h2[1, 0]) * d2.w1 - d2.w2,
        )

    def delta(self, omega1, omega2):
        """``(omega1'(0)/2) conj(omega1) - (omega2'(0)/2) conj(omega2)``."""
        return 0.5 * self.omega1_p0 * np.conj(omega1) - 0.5 * self.omega2_p0 * np.conj(omega2)


def _Phi(f, pts):
    _, hj = f.jets(pts)
    d = dilatation(f, pts)
    return hj[2] / hj[1] * d.w1 - d.w2


def verify_prop31(f1, f2, grid: GridSpec = DEFAULT_GRID, tol: float = TOL_IDENTITY, strict=True):
    """Three reports: S(h1) = S(h2); omega1'(0) Phi1 = omega2'(0) Phi2;
    conj(Phi1(0)) omega1 - 3/2 omega1'(0)^2 omega1^2 = (same for f2)."""
    ctx = NormalizedPairContext.of(f1, f2, strict)
    pts = grid.points()
    _, h1 = f1.jets(pts)
    _, h2 = f2.jets(pts)
    s1 = schwarzian_of_jet(Jet3.from_array(h1))
    s2 = schwarzian_of_jet(Jet3.from_array(h2))
    w1 = dilatation(f1, pts).w
    w2 = dilatation(f2, pts).w
    r_ii = ctx.omega1_p0 * _Phi(f1, pts) - ctx.omega2_p0 * _Phi(f2, pts)
    r_iii = (
        np.conj(ctx.Phi1_0) * w1 - 1.5 * ctx.omega1_p0 ** 2 * w1 ** 2
        - (np.conj(ctx.Phi2_0) * w2 - 1.5 * ctx.omega2_p0 ** 2 * w2 ** 2)
    )
    return [
        IdentityReport.from_residuals("prop31.i S(h1)=S(h2)", s1 - s2, pts, tol),
        IdentityReport.from_residuals("prop31.ii omega'(0) Phi", r_ii, pts, tol),
        IdentityReport.from_residuals("prop31.iii Phi(0) omega", r_iii, pts, tol),
    ]


def _frozen_combination_schwarzian(f, c, pts):
    """S(h - c g) on ``pts`` for a fixed complex ``c``."""
    gj, hj = f.jets(pts)
    return schwarzian_of_jet(Jet3.from_array(hj - c * gj))


def verify_thm33(
    f1, f2, w_samples: Sequence[complex], grid: GridSpec = DEFAULT_GRID, tol: float = TOL_IDENTITY, strict=True
):
    """max over w and grid of |S(h1 - conj(omega1(w)) g1) - S(h2 - conj(omega2(w)) g2)|."""
    NormalizedPairContext.of(f1, f2, strict)
    pts = grid.points()
    worst, worst_pt = -1.0, 0j
    for w in w_samples:
        c1 = np.conj(dilatation(f1, w).w)
        c2 = np.conj(dilatation(f2, w).w)
        r = np.abs(_frozen_combination_schwarzian(f1, c1, pts) - _frozen_combination_schwarzian(f2, c2, pts))
        k = int(np.argmax(r))
        if r[k] > worst:
            worst, worst_pt = float(r[k]), complex(pts[k])
    return IdentityReport("thm33 frozen Schwarzians", worst, worst_pt, worst <= tol, tol)


def verify_corollary(f1, f2, grid: GridSpec = DEFAULT_GRID, tol: float = TOL_IDENTITY, strict=True):
    """h1 - conj(w1) g1 = u2 / (1 + (a0 + delta) u2) with u2 = h2 - conj(w2) g2;
    sub-report: h1 = h2 / (1 + a0 h2)."""
    ctx = NormalizedPairContext.of(f1, f2, strict)
    pts = grid.points()
    g1, h1 = (x[0] for x in f1.jets(pts))
    g2, h2 = (x[0] for x in f2.jets(pts))
    w1 = dilatation(f1, pts).w
    w2 = dilatation(f2, pts).w
    u1 = h1 - np.conj(w1) * g1
    u2 = h2 - np.conj(w2) * g2
    r = u1 - u2 / (1.0 + (ctx.a0 + ctx.delta(w1, w2)) * u2)
    sub = IdentityReport.from_residuals("corollary.mobius h1=h2/(1+a0 h2)", h1 - h2 / (1.0 + ctx.a0 * h2), pts, tol)
    return IdentityReport.from_residuals("corollary", r, pts, tol, (sub,))


def phi_terms(f1, f2, pts, ctx: NormalizedPairContext):
    """The seven ``phi_i`` and seven ``B_i`` evaluated at ``pts``."""
    g1, h1 = (x[0] for x in f1.jets(pts))
    g2, h2 = (x[0] for x in f2.jets(pts))
    w1 = dilatation(f1, pts).w
    w2 = dilatation(f2, pts).w
    a0, c1, c2 = ctx.a0, ctx.omega1_p0, ctx.omega2_p0
    phis = [
        g2 - a0 * h1 * g2 - 0.5 * c2 * h1 * h2,
        0.5 * c2 * h1 * g2,
        0.5 * c1 * g1 * g2,
        -0.5 * c2 * g1 * g2,
        a0 * g1 * g2 - 0.5 * c1 * h1 * g2 + 0.5 * c2 * g1 * h2,
        -0.5 * c1 * g1 * h2,
        0.5 * c1 * h1 * h2 - a0 * g1 * h2 - g1,
    ]
    bs = [w2, w2 ** 2, w1 ** 2 * w2, w1 * w2 ** 2, w1 * w2, w1 ** 2, w1]
    return phis, bs


def verify_phi_identity(f1, f2, grid: GridSpec = DEFAULT_GRID, tol: float = TOL_PHI, strict=True):
    """0 = sum_i phi_i conj(B_i) on the grid."""
    for f in (f1, f2):
        if is_constant_dilatation(f.oriented())[0]:
            raise ConstantDilatation("phi identity needs non-constant dilatations")
    ctx = NormalizedPairContext.of(f1, f2, strict)
    pts = grid.points()
    phis, bs = phi_terms(f1, f2, pts, ctx)
    total = sum(p * np.conj(b) for p, b in zip(phis, bs))
    return IdentityReport.from_residuals("phi/B identity", total, pts, tol)


def richardson_limit(fn, radii=LIMIT_RADII):
    """Extrapolate ``lim_{r->0} fn(r)`` from samples at ``r, r/2, r/4, ...``.

    Assumes ``fn(r) = L + c1 r + c2 r^2 + ...``; each pass removes one power.
    """
    vals = [complex(fn(r)) for r in radii]
    ratio = radii[0] / radii[1]
    for k in range(1, len(vals)):
        fac = ratio ** k
        vals = [(fac * vals[i + 1] - vals[i]) / (fac - 1.0) for i in range(len(vals) - 1)]
    return vals[0]


def verify_phi_lemma_limits(f, partner, tol: float = TOL_PHI, radii=LIMIT_RADII, strict=True):
    """g'''(0) = omega''(0) + 2 omega'(0) h''(0) for both maps, and
    lim_{r->0} phi_1(r)/r^3 = -Phi_2(0)/6 by Richardson extrapolation.

    ``phi_1`` is built with ``f`` in the first slot and ``partner`` second.
    """
    ctx = NormalizedPairContext.of(f, partner, strict)
    subs = []
    for label, m in (("f", f), ("partner", partner)):
        gj, hj = m.jets(0j)
        d = dilatation(m, 0j)
        r = gj[3, 0] - (d.w2 * hj[1, 0] + 2.0 * d.w1 * hj[2, 0])
        subs.append(IdentityReport(f"g''' relation ({label})", float(abs(r)), 0j, bool(abs(r) <= tol), tol))

    def phi1_over_r3(r):
        phis, _ = phi_terms(f, partner, np.array([r], dtype=np.complex128), ctx)
        return phis[0][0] / r ** 3

    lim = richardson_limit(phi1_over_r3, radii)
    r = abs(lim + ctx.Phi2_0 / 6.0)
    subs.append(IdentityReport("lim phi1/z^3 = -Phi2(0)/6", float(r), 0j, bool(r <= tol), tol))
    worst = max(s.max_residual for s in subs)
    return IdentityReport("lemma limits", worst, 0j, worst <= tol, tol, tuple(subs))
