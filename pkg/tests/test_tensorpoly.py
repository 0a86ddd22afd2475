import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hermite_maxwell.tensorpoly import (TensorPoly, poly_axpy, poly_diff, poly_eval,
                                        poly_eval_grid, poly_extract_dofs, poly_from_dofs,
                                        scaled_taylor_1d)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def polys(dim, max_deg=6):
    return st.integers(0, max_deg).flatmap(
        lambda n: arrays(float, (n + 1,) * dim, elements=finite).map(lambda c: TensorPoly(c, dim)))


def naive_eval(p, xi):
    total = 0.0
    for beta in np.ndindex(p.coeffs.shape):
        total += p.coeffs[beta] * np.prod([x**b for x, b in zip(xi, beta)])
    return total


def test_diff_of_square():
    p = TensorPoly(np.array([0.0, 0.0, 1.0]), 1)
    np.testing.assert_array_equal(poly_diff(p, 0, 0.5).coeffs, [0.0, 4.0, 0.0])


def test_diff_of_constant_is_zero():
    p = TensorPoly(np.full((3, 3), 2.5), 2)
    q = TensorPoly(np.zeros((3, 3)), 2)
    q.coeffs[:, 0] = 2.5
    assert not poly_diff(q, 1, 0.1).coeffs.any()
    assert poly_diff(p, 0, 1.0).coeffs[-1].sum() == 0.0


def test_diff_matches_finite_differences(rng):
    c = rng.normal(size=8)
    p = TensorPoly(c, 1)
    dx = 0.3
    dp = poly_diff(p, 0, dx)
    h = 1e-3
    for xi in np.linspace(-0.4, 0.4, 5):
        # five-point stencil in physical units
        f = [float(poly_eval(p, [xi + j * h / dx])) for j in (-2, -1, 1, 2)]
        fd = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
        exact = float(poly_eval(dp, [xi]))
        assert abs(fd - exact) <= 1e-8 * max(1.0, abs(exact))


def test_diff_rejects_bad_axis_and_dx():
    p = TensorPoly(np.zeros((3, 3)), 2)
    with pytest.raises(IndexError):
        poly_diff(p, 2, 1.0)
    with pytest.raises(ValueError):
        poly_diff(p, 0, 0.0)


@given(polys(2))
def test_repeated_diff_annihilates(p):
    q = p
    for _ in range(p.degree + 1):
        q = poly_diff(q, 1, 0.7)
    assert not q.coeffs.any()


@given(polys(3, max_deg=4))
def test_diff_commutes(p):
    a = poly_diff(poly_diff(p, 0, 0.3), 2, 0.9)
    b = poly_diff(poly_diff(p, 2, 0.9), 0, 0.3)
    np.testing.assert_allclose(a.coeffs, b.coeffs, rtol=1e-13, atol=1e-12)


def test_axpy_examples():
    q = TensorPoly(np.arange(4.0).reshape(2, 2), 2)
    np.testing.assert_array_equal(poly_axpy(0.0, q, q).coeffs, q.coeffs)
    zero = TensorPoly(np.zeros((2, 2)), 2)
    np.testing.assert_array_equal(poly_axpy(1.0, q, zero).coeffs, q.coeffs)
    np.testing.assert_array_equal(poly_axpy(2.0, q, q).coeffs, 3 * q.coeffs)
    with pytest.raises(ValueError):
        poly_axpy(1.0, q, TensorPoly(np.zeros((3, 3)), 2))


@given(st.integers(1, 3).flatmap(lambda d: st.tuples(polys(d, 4), polys(d, 4))),
       finite, st.data())
def test_eval_is_linear(pq, alpha, data):
    p, q = pq
    if p.coeffs.shape != q.coeffs.shape:
        q = TensorPoly(np.resize(q.coeffs, p.coeffs.shape), p.dim)
    xi = data.draw(arrays(float, (p.dim,), elements=st.floats(-0.5, 0.5)))
    lhs = float(poly_eval(poly_axpy(alpha, p, q), xi))
    rhs = alpha * float(poly_eval(p, xi)) + float(poly_eval(q, xi))
    scale = abs(alpha) * np.abs(p.coeffs).sum() + np.abs(q.coeffs).sum() + 1e-300
    assert abs(lhs - rhs) <= 1e-13 * scale


def test_eval_examples():
    assert float(poly_eval(TensorPoly(np.array([1.0, 1.0]), 1), [0.5])) == 1.5
    c = np.zeros((2, 2))
    c[1, 1] = 1.0
    assert float(poly_eval(TensorPoly(c, 2), [0.5, 0.5])) == 0.25


@given(polys(2, 5), st.data())
def test_eval_matches_naive_sum(p, data):
    xi = data.draw(arrays(float, (2,), elements=st.floats(-0.5, 0.5)))
    ref = naive_eval(p, xi)
    scale = np.abs(p.coeffs).sum() + 1e-300
    assert abs(float(poly_eval(p, xi)) - ref) <= 1e-13 * scale


def test_eval_grid_matches_pointwise(rng):
    p = TensorPoly(rng.normal(size=(4, 4)), 2)
    pts = np.array([-0.5, -0.1, 0.3])
    grid = poly_eval_grid(p, pts)
    for i, a in enumerate(pts):
        for j, b in enumerate(pts):
            assert grid[i, j] == pytest.approx(float(poly_eval(p, [a, b])), rel=1e-13)


def test_extract_examples():
    p = TensorPoly(np.array([1.0, 2.0, 3.0, 4.0]), 1)
    np.testing.assert_array_equal(poly_extract_dofs(p, 1), [1.0, 2.0])
    np.testing.assert_array_equal(poly_extract_dofs(p, 3), p.coeffs)
    with pytest.raises(ValueError):
        poly_extract_dofs(p, 4)


def test_extract_matches_scaled_derivatives_of_exp():
    # f = exp(x) about xc: D^k f = exp(xc); the block equals dx^k/k! exp(xc)
    xc, dx, m = 0.4, 0.25, 5
    derivs = [np.exp(xc)] * 12
    p = TensorPoly(scaled_taylor_1d(derivs, dx), 1)
    block = poly_extract_dofs(p, m)
    expected = [np.exp(xc) * dx**k / np.prod(range(1, k + 1)) for k in range(m + 1)]
    np.testing.assert_allclose(block, expected, rtol=1e-12)


@given(polys(2))
def test_extract_then_rebuild_roundtrip(p):
    q = poly_from_dofs(poly_extract_dofs(p, p.degree), 2, p.degree)
    np.testing.assert_array_equal(q.coeffs, p.coeffs)


def test_batch_axes_are_carried():
    c = np.zeros((3, 5, 4, 4))
    c[..., 2, 0] = 1.0
    p = TensorPoly(c, 2)
    assert p.batch_shape == (3, 5)
    d = poly_diff(p, 0, 2.0)
    assert np.all(d.coeffs[..., 1, 0] == 1.0)
