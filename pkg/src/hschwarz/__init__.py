"""Harmonic Schwarzian derivatives of planar harmonic mappings.

A harmonic map on the unit disk is written ``f = conj(g) + h`` with ``g`` and
``h`` analytic. This package evaluates its harmonic Schwarzian ``S_H`` by
three independent routes, implements the transformations that leave ``S_H``
unchanged, normalizes maps to a canonical gauge, and decides whether two maps
share the same ``S_H`` (returning the connecting transformation).

Set ``HSCHWARZ_DISABLE_JIT=1`` before import to use the pure-numpy kernels
instead of the numba ones.
"""

from ._kernels import backend as _backend
from .analytic import (
    Add,
    AnalyticExpr,
    Compose,
    Constant,
    DiskAutomorphism,
    Div,
    Exp,
    Identity,
    Mobius,
    MobiusLeaf,
    Mul,
    Polynomial,
    Scale,
    eval_jet,
    mobius_apply,
    mobius_compose,
    mobius_invert,
    pre_schwarzian,
    recover_mobius,
    schwarzian,
)
from .documents import MapDocument, MapSpec, emit_document, parse_text
from .equivalence import (
    ConnectionResult,
    IdentityReport,
    NormalizedPairContext,
    Verdict,
    check_equal_schwarzian,
    classify_dilatation,
    verify_corollary,
    verify_invariance,
    verify_phi_identity,
    verify_phi_lemma_limits,
    verify_prop31,
    verify_thm33,
)
from .errors import *  # noqa: F401,F403
from .grid import DEFAULT_GRID, FINE_GRID, GridSpec
from .harmonic import (
    AffineMap,
    HarmonicMap,
    PairLinearMap,
    RotationMu,
    apply_pair_linear,
    dilatation,
    factor_pair_linear,
    is_normalized,
    jacobian,
    normalize_at,
    post_affine,
    pre_schwarzian_h,
    precompose,
    rotate_antianalytic,
    schwarzian_h,
    schwarzian_h_closed,
    schwarzian_h_definition,
    schwarzian_h_pointwise,
)
from .jets import Jet3, WirtingerStencil, jet_compose, jet_div, jet_mul, wirtinger_dz

__version__ = "0.1.0"
BACKEND = _backend.name
