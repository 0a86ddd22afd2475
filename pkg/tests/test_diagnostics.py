import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hermite_maxwell import diagnostics as dg
from hermite_maxwell.grid import Grid, HermiteField
from hermite_maxwell.tensorpoly import TensorPoly

import oracles


def test_seminorm_closed_form_1d():
    m, dx = 2, 0.3
    c = np.zeros((1, 2 * m + 2))
    c[0, m + 1] = 1.0
    got = dg.hb_inner(TensorPoly(c, 1), TensorPoly(c, 1), m, dx)
    assert got == pytest.approx(math.factorial(m + 1) ** 2 * dx ** (1 - 2 * (m + 1)), rel=1e-13)


def test_low_degree_terms_are_invisible():
    m = 3
    c = np.zeros((2, 5, 5, 8, 8))
    c[..., : m + 1, :] = 1.0
    assert dg.hb_inner(TensorPoly(c, 2), TensorPoly(c, 2), m, 0.1) == 0.0
    assert not dg.poly_samples(TensorPoly(np.ones((1, 3, 3)), 2), 3, 0.1).any()


@pytest.mark.parametrize("dim,m", [(1, 3), (2, 2)])
def test_inner_product_matches_dense_quadrature(dim, m, rng):
    n, dx = 4, 0.7
    a = rng.normal(size=(n,) * dim + (2 * m + 2,) * dim)
    b = rng.normal(size=a.shape)
    xq, wq = np.polynomial.legendre.leggauss(2 * m + 6)
    xi, w = 0.5 * xq, 0.5 * dx * wq
    da = oracles.cell_poly_mixed_derivative(a, dim, m + 1, dx, xi)
    db = oracles.cell_poly_mixed_derivative(b, dim, m + 1, dx, xi)
    ref = oracles.seminorm_inner_dense(da, db, w, dim)
    got = dg.hb_inner(TensorPoly(a[None], dim), TensorPoly(b[None], dim), m, dx)
    assert got == pytest.approx(ref, rel=1e-11)


@given(st.integers(0, 2**32 - 1))
def test_inner_product_is_symmetric_bilinear(seed):
    rng = np.random.default_rng(seed)
    m, dx = 2, 0.4
    f, g, h = (TensorPoly(rng.normal(size=(1, 3, 3, 6, 6)), 2) for _ in range(3))
    a = rng.normal()
    ip = lambda x, y: dg.hb_inner(x, y, m, dx)
    assert ip(f, g) == pytest.approx(ip(g, f), rel=1e-12)
    lhs = ip(TensorPoly(f.coeffs + a * h.coeffs, 2), g)
    assert lhs == pytest.approx(ip(f, g) + a * ip(h, g), rel=1e-9, abs=1e-9 * abs(ip(f, f)))
    assert ip(f, f) >= 0


def test_field_inner_validates_inputs():
    g = Grid(4, 2)
    f = HermiteField.zeros(g, 2, 1)
    with pytest.raises(ValueError):
        dg.hb_inner(f, HermiteField.zeros(g.staggered(), 2, 1))
    with pytest.raises(ValueError):
        dg.hb_inner(f, HermiteField.zeros(g, 2, 2))
    with pytest.raises(ValueError):
        dg.hb_inner(TensorPoly(np.zeros((1, 4)), 1), TensorPoly(np.zeros((1, 4)), 1))
    assert dg.hb_seminorm(f) == 0.0


@pytest.mark.parametrize("dim,m", [(1, 2), (1, 4), (2, 2), (2, 3), (2, 4)])
def test_pythagoras_and_orthogonality(dim, m, rng):
    for _ in range(2):
        orth, pyth = oracles.projection_identities(rng, dim, m, 8)
        assert orth <= 1e-9 and pyth <= 1e-9


def test_energy_functionals_arithmetic():
    a, b, c = np.array([1.0, 2.0]), np.array([0.5, 0.0]), np.array([0.0, 1.0])
    # |a|^2 + |b+c|^2/4 - |b-c|^2/4 = |a|^2 + b.c
    assert dg.egenn(a, b, c) == pytest.approx(5.0)
    assert dg.egenh(a, b, c) == pytest.approx(5.0)
    assert dg.egenn(a, b, b) == pytest.approx(5.0 + 0.25)


def test_conserved_quantities_check_time_levels():
    g = Grid(4, 1)
    v = HermiteField.zeros(g, 1, 1, 1.0)
    wp = HermiteField.zeros(g.staggered(), 1, 1, 0.9)
    wn = HermiteField.zeros(g.staggered(), 1, 1, 1.1)
    vp = HermiteField.zeros(g, 1, 1, 0.8)
    assert dg.conserved_quantities(v, wp, wn, vp) == (0.0, 0.0)
    with pytest.raises(ValueError):
        dg.conserved_quantities(v, wp, wn, v)


def test_submesh_points():
    np.testing.assert_allclose(dg.submesh_points(2), [-0.375, -0.125, 0.125, 0.375])
    np.testing.assert_allclose(dg.submesh_points(0), [0.0])


def test_l2_weights():
    err = np.ones((3, 3, 4, 4))
    assert dg.l2_sq(err, 0.5, 2, 2, "unit") == 144.0
    assert dg.l2_sq(err, 0.5, 2, 2) == pytest.approx(144.0 * (0.5 / 4) ** 2)
    with pytest.raises(ValueError):
        dg.l2_sq(err, 0.5, 2, 2, "volume")


def test_edef_arithmetic():
    # sqrt(sum / (4 sqrt(N)))
    assert dg.edef(16.0, 4) == pytest.approx(math.sqrt(16.0 / 8.0))
    assert dg.edef(0.0, 0) == 0.0


def test_hz_error_of_exact_data_is_interpolation_error():
    from hermite_maxwell.exact import exact_solution
    from hermite_maxwell.media import assemble_system, dielectric
    sol = exact_solution("dielectric", 2.0)
    system = assemble_system(dielectric(), 2, "tm2d")
    errs = []
    for n in (16, 32):
        w = sol.state_dofs(system, Grid(n, 2, dual=True), 2, 0.3, "W")
        e = dg.hz_error_samples(w, sol, system)
        errs.append(math.sqrt(dg.l2_sq(e, w.grid.dx, 2, 2)))
    assert errs[0] < 1e-4
    assert math.log2(errs[0] / errs[1]) >= 5.5


def test_fit_rate_recovers_power_law():
    pts = [(d, 3.0 * d**-7.0) for d in (10.0, 15.0, 20.0, 30.0)]
    assert dg.fit_rate(pts) == pytest.approx(7.0, abs=1e-10)


@pytest.mark.parametrize("pts", [[(1, 1), (2, 0.5)], [(1, 1), (1, 0.5), (1, 0.2)],
                                 [(1, 1), (2, 0), (3, 0.1)], [(1, 1), (2, float("nan")), (3, 0.1)]])
def test_fit_rate_rejects_bad_input(pts):
    with pytest.raises(ValueError):
        dg.fit_rate(pts)


def test_report_bookkeeping():
    r = dg.RunReport()
    r.append(step=0, time=0.0, rel_l2_error=0.1, edef_accumulated=0.0, egenn=2.0)
    r.append(step=1, time=0.5, rel_l2_error=None, edef_accumulated=None, egenn=None)
    r.append(step=2, time=1.0, rel_l2_error=0.3, edef_accumulated=0.2, egenn=2.002)
    assert len(r) == 3
    assert r.max_rel_error() == 0.3 and r.final_edef() == 0.2
    assert r.relative_drift("egenn") == pytest.approx(1e-3)
    assert list(r.rows())[1] == (1, 0.5, None, None, None, None, None, None)
    with pytest.raises(KeyError):
        r.append(step=3, time=2.0, energy=1.0)
    with pytest.raises(ValueError):
        r.append(step=3, time=0.1)
    with pytest.raises(ValueError):
        r.append(step=3, time=2.0, egenn=float("inf"))


def test_constant_offset_formula():
    # E^2 = N_T * N_samples * delta^2 / (4 sqrt(N_T)) with unit weights
    n_t, delta = 9, 0.01
    err = np.full((4, 4, 6, 6), delta)
    total = sum(dg.l2_sq(err, 0.3, 3, 2, "unit") for _ in range(n_t))
    assert dg.edef(total, n_t) ** 2 == pytest.approx(n_t * err.size * delta**2 / (4 * math.sqrt(n_t)))


@given(st.floats(1e-6, 1e6))
def test_fit_rate_ignores_error_scale(scale):
    pts = [(10.0, 1e-2), (14.0, 3e-3), (20.0, 2e-4), (25.0, 6e-5)]
    ref = dg.fit_rate(pts)
    assert dg.fit_rate([(d, scale * e) for d, e in pts]) == pytest.approx(ref, abs=1e-9)
