import os
import subprocess
import sys

import numpy as np
import pytest

from hschwarz import _kernels

pytestmark = pytest.mark.skipif(_kernels.numba_backend is None, reason="numba unavailable")

NAMES = ("mul", "div", "compose", "schwarzian", "pre_schwarzian_h", "schwarzian_h", "schwarzian_h_pointwise")


def jets(rng, n, shift=3.0, scale=1.0):
    c = rng.normal(size=(4, n)) + 1j * rng.normal(size=(4, n))
    c[0] += shift
    c[1] += shift
    return np.ascontiguousarray(c * scale)


@pytest.mark.parametrize("name", NAMES)
def test_backends_agree(name, rng):
    a, b = jets(rng, 500), jets(rng, 500)
    if name.endswith("_h") or name.endswith("pointwise"):
        args = (a, jets(rng, 500, scale=0.2))
    elif name == "schwarzian":
        args = (a,)
    else:
        args = (a, b)
    ref = getattr(_kernels.numpy_backend, name)(*args)
    got = getattr(_kernels.numba_backend, name)(*args)
    assert np.allclose(ref, got, rtol=1e-12, atol=1e-12)


def test_poly_backends_agree(rng):
    coeffs = rng.normal(size=7) + 1j * rng.normal(size=7)
    z = 0.8 * (rng.uniform(-1, 1, 300) + 1j * rng.uniform(-1, 1, 300)) / np.sqrt(2)
    assert np.allclose(_kernels.numpy_backend.poly(coeffs, z), _kernels.numba_backend.poly(coeffs, z), rtol=1e-13)


def test_orientation_reversed_points_agree(rng):
    h = jets(rng, 200)
    g = jets(rng, 200)
    g[1] *= 3  # |g'| > |h'| at many points
    for name in ("schwarzian_h", "schwarzian_h_pointwise", "pre_schwarzian_h"):
        ref = getattr(_kernels.numpy_backend, name)(h, g)
        got = getattr(_kernels.numba_backend, name)(h, g)
        assert np.allclose(ref, got, rtol=1e-11, atol=1e-11)


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, HSCHWARZ_DISABLE_JIT=flag)
    out = subprocess.run(
        [sys.executable, "-c", "import hschwarz; print(hschwarz.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == expected
