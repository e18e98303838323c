import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from hschwarz.errors import DivisionByZeroJet, NonFiniteJet, StencilOutsideDomain
from hschwarz.jets import Jet3, WirtingerStencil, jet_add, jet_compose, jet_div, jet_mul, wirtinger_dz

Z = sp.Symbol("z")


def sym_jet(expr, z0):
    """Oracle: differentiate symbolically and evaluate."""
    out = []
    e = expr
    for _ in range(4):
        out.append(complex(sp.N(e.subs(Z, z0), 30)))
        e = sp.diff(e, Z)
    return np.array(out)


def poly_jet(coeffs, z0):
    p = sum(sp.nsimplify(c) * Z ** k for k, c in enumerate(coeffs))
    return p, Jet3(*sym_jet(p, z0))


def close(j, ref, rtol=1e-12):
    ref = np.asarray(ref, dtype=complex)
    got = j.array[:, 0]
    assert np.allclose(got, ref, rtol=rtol, atol=rtol * max(1.0, np.abs(ref).max())), (got, ref)


finite = st.floats(-3, 3, allow_nan=False)
cplx = st.builds(complex, finite, finite)
jets = st.builds(Jet3, cplx, cplx, cplx, cplx)


def test_add_examples():
    assert jet_add(Jet3(1), Jet3(0, 1)) == Jet3(1, 1, 0, 0)
    a = Jet3(1 + 2j, 3, -1j, 0.5)
    assert jet_add(a, Jet3(0)) == a


def test_mul_examples():
    z = Jet3.variable(1.0)
    close(z * z, [1, 2, 2, 0])
    a = Jet3(1 + 2j, 3, -1j, 0.5)
    assert jet_mul(a, Jet3(1)).allclose(a)
    _, ref = poly_jet([1, -0, -1], 0.3)  # 1 - z^2
    close(Jet3(1.3, 1) * Jet3(0.7, -1), ref.array[:, 0])


def test_div_examples():
    a = Jet3(2 - 1j, 0.3, 4, -2)
    close(a / a, [1, 0, 0, 0])
    close(Jet3(1) / Jet3(1, -1), [1, 1, 2, 6])


def test_div_by_small_value_raises():
    with pytest.raises(DivisionByZeroJet):
        jet_div(Jet3(1), Jet3(1e-15, 1))
    # the floor is configurable
    jet_div(Jet3(1), Jet3(1e-15, 1), floor=1e-16)


def test_compose_examples():
    outer = Jet3(1, 1, 1, 1)  # exp at 0
    close(jet_compose(outer, Jet3(0, 2)), [1, 2, 4, 8])
    # z^2 after z^3 at 0.5; the outer jet is taken at inner.v = 0.125
    o = Jet3(0.125 ** 2, 2 * 0.125, 2, 0)
    inner = Jet3(0.125, 3 * 0.25, 6 * 0.5, 6)
    close(jet_compose(o, inner), sym_jet(Z ** 6, sp.Rational(1, 2)))
    a = Jet3(1 + 2j, 3, -1j, 0.5)
    assert jet_compose(a, Jet3(0.2, 1)).allclose(a)


def test_nonfinite_rejected():
    with pytest.raises(NonFiniteJet):
        Jet3(np.nan)
    with pytest.raises(NonFiniteJet):
        Jet3(0, np.inf)


def test_batched_and_scalar_shapes():
    j = Jet3(np.array([0.1, 0.2]), 1)
    assert not j.scalar and len(j) == 2
    assert Jet3(0.1, 1).scalar
    assert isinstance(Jet3(0.1, 1).d1, complex)
    assert (j * 2).d1.shape == (2,)


@pytest.mark.parametrize("seed", range(6))
def test_polynomial_rules_match_symbolic_oracle(seed):
    rng = np.random.default_rng(seed)
    deg_a, deg_b = rng.integers(1, 4, size=2)
    ca = np.round(rng.normal(size=deg_a + 1), 3)
    cb = np.round(rng.normal(size=deg_b + 1), 3)
    cb[0] += 3.0  # keep b away from zero
    z0 = sp.Rational(int(rng.integers(-40, 40)), 100)
    pa, ja = poly_jet(ca, z0)
    pb, jb = poly_jet(cb, z0)
    close(ja + jb, sym_jet(pa + pb, z0))
    close(ja * jb, sym_jet(pa * pb, z0))
    close(ja / jb, sym_jet(pa / pb, z0), rtol=1e-11)
    # composition: pa(pb(z)), outer evaluated at pb(z0)
    _, outer = poly_jet(ca, sp.nsimplify(complex(jb.v).real))
    close(jet_compose(outer, jb), sym_jet(pa.subs(Z, pb), z0), rtol=1e-11)


@given(jets, jets)
def test_mul_commutative(a, b):
    assert (a * b).allclose(b * a, rtol=1e-13, atol=1e-12)


@given(jets, jets, jets)
def test_mul_associative(a, b, c):
    lhs, rhs = (a * b) * c, a * (b * c)
    scale = max(1.0, np.abs(lhs.array).max())
    assert np.abs(lhs.array - rhs.array).max() <= 1e-13 * scale * 10


@given(jets, jets.filter(lambda j: abs(j.v) >= 1e-6))
def test_div_inverts_mul(a, b):
    q = jet_div(jet_mul(a, b), b)
    scale = max(1.0, np.abs(a.array).max()) * max(1.0, 1 / abs(b.v)) ** 4 * max(1.0, np.abs(b.array).max()) ** 4
    assert np.abs(q.array - a.array).max() <= 1e-10 * scale


def test_wirtinger_examples():
    assert abs(wirtinger_dz(lambda z: z, 0.3 - 0.2j) - 1) < 1e-12
    assert abs(wirtinger_dz(np.conj, 0.1 + 0.5j)) < 1e-10
    for z in (0.3 + 0.1j, -0.5j, 0.7):
        assert abs(wirtinger_dz(lambda u: u * np.conj(u), z) - np.conj(z)) < 1e-9


def test_wirtinger_vectorised_and_central2():
    pts = np.array([0.1, 0.2j, -0.3 + 0.3j])
    got = wirtinger_dz(lambda u: u ** 2, pts, WirtingerStencil(scheme="central2"))
    assert np.allclose(got, 2 * pts, atol=1e-6)


def test_wirtinger_order_four():
    f = lambda u: np.exp(u) * np.conj(u) ** 2 + u ** 3 * np.conj(u)  # noqa: E731
    z = 0.3 + 0.2j
    exact = np.exp(z) * np.conj(z) ** 2 + 3 * z ** 2 * np.conj(z)
    e1 = abs(wirtinger_dz(f, z, WirtingerStencil(1e-3)) - exact)
    e2 = abs(wirtinger_dz(f, z, WirtingerStencil(5e-4)) - exact)
    assert 10 < e1 / e2 < 22


def test_stencil_validation():
    with pytest.raises(ValueError):
        WirtingerStencil(step=1e-2)
    with pytest.raises(ValueError):
        WirtingerStencil(step=0)
    with pytest.raises(ValueError):
        WirtingerStencil(scheme="forward")
    with pytest.raises(StencilOutsideDomain):
        wirtinger_dz(lambda u: u, 0.9995)


def test_wirtinger_of_analytic_matches_jet(corpus):
    from hschwarz.analytic import eval_jet
    from hschwarz.grid import DEFAULT_GRID

    pts = DEFAULT_GRID.points()
    for f in corpus.values():
        for part in (f.g, f.h):
            d = wirtinger_dz(lambda u: eval_jet(part, u).v, pts)
            assert np.abs(d - eval_jet(part, pts).d1).max() <= 1e-8
