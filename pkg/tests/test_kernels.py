import numpy as np
import pytest
import scipy.linalg

from gpvortex._kernels import (BACKEND, _fallback, plaquette_winding,
                               solve_tridiag_many, wrap_angle)

try:
    from gpvortex._kernels import _native
except ImportError:
    _native = None

needs_native = pytest.mark.skipif(_native is None,
                                  reason="compiled kernels unavailable")


def random_systems(rng, M, n, complex_rhs):
    dl = rng.uniform(-1, 0, (M, n))
    du = rng.uniform(-1, 0, (M, n))
    dl[:, 0] = du[:, -1] = 0.0
    d = 2.5 + np.abs(dl) + np.abs(du) + rng.uniform(0, 1, (M, n))
    if complex_rhs:
        b = rng.normal(size=(M, n)) + 1j * rng.normal(size=(M, n))
    else:
        b = rng.normal(size=(M, n))
    return dl, d, du, b


@pytest.mark.parametrize("complex_rhs", [False, True])
def test_tridiag_matches_scipy(complex_rhs):
    rng = np.random.default_rng(0)
    dl, d, du, b = random_systems(rng, 7, 40, complex_rhs)
    x = solve_tridiag_many(dl, d, du, b)
    for k in range(7):
        ab = np.zeros((3, 40))
        ab[0, 1:] = du[k, :-1]
        ab[1] = d[k]
        ab[2, :-1] = dl[k, 1:]
        ref = scipy.linalg.solve_banded((1, 1), ab, b[k])
        assert np.allclose(x[k], ref, rtol=1e-12, atol=1e-12)


@needs_native
@pytest.mark.parametrize("complex_rhs", [False, True])
def test_tridiag_backend_parity(complex_rhs):
    rng = np.random.default_rng(1)
    dl, d, du, b = random_systems(rng, 5, 33, complex_rhs)
    xn = _native.solve_tridiag_many(dl, d, du, b)
    xf = _fallback.solve_tridiag_many(dl, d, du, b)
    assert np.allclose(xn, xf, rtol=1e-13, atol=1e-13)


def test_wrap_angle_range():
    a = np.array([0.0, np.pi - 1e-9, -np.pi + 1e-9, 3 * np.pi / 2, 7.0, -7.0])
    w = wrap_angle(a)
    assert np.all(w >= -np.pi) and np.all(w < np.pi)
    assert np.allclose(np.exp(1j * w), np.exp(1j * a), atol=1e-12)


def test_plaquette_winding_single_vortex():
    # phase of a unit vortex at the center of a small cartesian-like patch
    n = 32
    x = np.linspace(-1, 1, n)[:, None] + 0 * np.linspace(-1, 1, n)[None, :]
    y = np.linspace(-1, 1, n)[None, :] + 0 * x
    phase = np.arctan2(y - 0.013, x - 0.017)
    w = plaquette_winding(phase)
    # axis 1 wraps periodically; the seam columns cancel the interior count
    interior = w[:, :-1]
    assert int(np.abs(interior).sum()) == 1


@needs_native
def test_winding_backend_parity():
    rng = np.random.default_rng(2)
    phase = rng.uniform(-np.pi, np.pi, (40, 64))
    assert np.array_equal(_native.plaquette_winding(phase),
                          _fallback.plaquette_winding(phase))


def test_backend_name():
    assert BACKEND in ("native", "python")
