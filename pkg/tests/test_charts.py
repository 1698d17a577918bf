import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slantgeo.charts import Box, ChartedManifold, RankDeficient, gram_schmidt
from slantgeo.exprlang import parse


def sphere(radius=1.0):
    r2 = radius * radius
    return ChartedManifold(
        coords=("th", "ph"),
        metric=[[parse(str(r2)), parse("0")], [parse("0"), parse(f"{r2}*sin(th)^2")]],
        domain=Box(((0.3, 2.8), (0.0, 6.0))),
    )


def poincare_half_plane():
    return ChartedManifold(
        coords=("x", "y"),
        metric=[[parse("1/y^2"), parse("0")], [parse("0"), parse("1/y^2")]],
        domain=Box(((-2.0, 2.0), (0.5, 3.0))),
    )


def hyperbolic_warped():
    # product line x exponentially warped flat 4-space, constant curvature -1
    coords = ("y1", "y2", "y3", "y4", "t")
    metric = [[parse("0")] * 5 for _ in range(5)]
    for i in range(4):
        metric[i][i] = parse("exp(2*t)")
    metric[4][4] = parse("1")
    return ChartedManifold(coords=coords, metric=metric, domain=Box(((-2, 2),) * 4 + ((-1, 1),)))


def flat(dim=3):
    metric = [[parse("1") if i == j else parse("0") for j in range(dim)] for i in range(dim)]
    coords = tuple(f"z{i}" for i in range(dim))
    return ChartedManifold(coords=coords, metric=metric, domain=Box(((-1, 1),) * dim))


def test_sphere_christoffel_frozen_values():
    chart = sphere()
    gamma = chart.christoffel_at([1.0, 0.4])
    s, c = math.sin(1.0), math.cos(1.0)
    assert gamma[0, 1, 1] == pytest.approx(-s * c, abs=1e-12)
    assert gamma[1, 0, 1] == pytest.approx(c / s, abs=1e-12)
    assert gamma[1, 1, 0] == pytest.approx(c / s, abs=1e-12)
    assert gamma[0, 0, 0] == pytest.approx(0.0, abs=1e-12)


def test_christoffel_symmetry_and_metric_compatibility():
    rng = np.random.default_rng(7)
    for chart in (sphere(1.7), poincare_half_plane(), hyperbolic_warped()):
        for _ in range(5):
            u = chart.domain.sample(1, rng)[0]
            gamma = chart.christoffel_at(u)
            assert np.allclose(gamma, np.swapaxes(gamma, 1, 2), atol=1e-12)
            g = chart.metric_at(u)
            dg = chart.metric_derivative_at(u)
            # covariant constancy of the metric
            nabla_g = (
                dg
                - np.einsum("lki,lj->kij", gamma, g)
                - np.einsum("lkj,il->kij", gamma, g)
            )
            assert np.max(np.abs(nabla_g)) < 1e-11


def test_christoffel_derivative_matches_finite_difference():
    h = 1e-6
    for chart, u0 in (
        (sphere(), np.array([1.1, 0.7])),
        (poincare_half_plane(), np.array([0.3, 1.4])),
        (hyperbolic_warped(), np.array([0.2, -0.4, 1.0, 0.5, 0.3])),
    ):
        dgamma = chart.christoffel_derivative_at(u0)
        for i in range(chart.dim):
            hi, lo = u0.copy(), u0.copy()
            hi[i] += h
            lo[i] -= h
            fd = (chart.christoffel_at(hi) - chart.christoffel_at(lo)) / (2 * h)
            assert np.max(np.abs(dgamma[i] - fd)) < 1e-6


def test_flat_chart_has_zero_riemann():
    chart = flat()
    u = np.array([0.2, -0.5, 0.8])
    assert np.max(np.abs(chart.riemann_at(u))) < 1e-14


def test_riemann_antisymmetry_and_first_bianchi():
    chart = sphere(1.3)
    riem = chart.riemann_at([0.9, 2.0])
    assert np.allclose(riem, -np.swapaxes(riem, 1, 2), atol=1e-12)
    bianchi = riem + np.transpose(riem, (0, 2, 3, 1)) + np.transpose(riem, (0, 3, 1, 2))
    assert np.max(np.abs(bianchi)) < 1e-11


def test_sectional_curvature_constant_spaces():
    rng = np.random.default_rng(11)
    cases = [
        (sphere(1.0), 1.0),
        (sphere(2.0), 0.25),
        (poincare_half_plane(), -1.0),
        (hyperbolic_warped(), -1.0),
    ]
    for chart, want in cases:
        for _ in range(6):
            u = chart.domain.sample(1, rng)[0]
            x = rng.normal(size=chart.dim)
            y = rng.normal(size=chart.dim)
            k = chart.sectional_curvature(u, x, y)
            assert k == pytest.approx(want, abs=1e-9)


def test_sphere_laplacian_eigenfunction():
    # div grad cos(th) on the unit sphere equals -2 cos(th)
    chart = sphere()
    f = parse("cos(th)")
    for th in (0.6, 1.2, 2.1):
        got = chart.laplacian_at(np.array([th, 0.8]), f)
        assert got == pytest.approx(-2.0 * math.cos(th), abs=1e-10)


def test_laplacian_matches_divergence_form():
    # (1/sqrt(det g)) d_a(sqrt(det g) g^{ab} d_b f), finite-differenced
    chart = poincare_half_plane()
    f = parse("x^2 + log(y)")
    u0 = np.array([0.7, 1.6])
    h = 1e-5

    def flux(u):
        g = chart.metric_at(u)
        ginv = chart.inverse_metric_at(u)
        sqrtdet = math.sqrt(np.linalg.det(g))
        df = chart.gradient_at(u, f, raise_index=False)
        return sqrtdet * ginv @ df

    div = 0.0
    for a in range(2):
        hi, lo = u0.copy(), u0.copy()
        hi[a] += h
        lo[a] -= h
        div += (flux(hi)[a] - flux(lo)[a]) / (2 * h)
    div /= math.sqrt(np.linalg.det(chart.metric_at(u0)))
    assert chart.laplacian_at(u0, f) == pytest.approx(div, abs=1e-8)


def test_gradient_and_hessian_definitions():
    chart = sphere(1.5)
    f = parse("th^2*sin(ph)")
    u = np.array([1.0, 0.5])
    grad = chart.gradient_at(u, f)
    df = chart.gradient_at(u, f, raise_index=False)
    assert np.allclose(chart.metric_at(u) @ grad, df, atol=1e-12)
    hess = chart.hessian_at(u, f)
    assert np.allclose(hess, hess.T, atol=1e-12)
    # trace against the laplacian
    assert np.einsum(
        "ab,ab->", chart.inverse_metric_at(u), hess
    ) == pytest.approx(chart.laplacian_at(u, f), abs=1e-12)


def test_box_grid_and_center():
    box = Box(((0.0, 1.0), (2.0, 4.0)))
    pts = box.grid(3)
    assert pts.shape == (9, 2)
    assert np.allclose(pts[0], [0.0, 2.0])
    assert np.allclose(pts[-1], [1.0, 4.0])
    inset = box.grid(3, inset=0.1)
    assert np.allclose(inset[0], [0.1, 2.2])
    assert np.allclose(box.center(), [0.5, 3.0])
    assert box.contains([0.5, 2.5])
    assert not box.contains([1.5, 2.5])


def test_gram_schmidt_known_frame():
    gram = np.diag([1.0, 4.0, 1.0])
    vectors = [np.array([1.0, 0.0, 0.0]), np.array([1.0, 1.0, 0.0])]
    frame, coeffs = gram_schmidt(vectors, gram)
    assert frame.shape == (3, 2)
    assert np.allclose(frame[:, 0], [1.0, 0.0, 0.0])
    assert np.allclose(frame[:, 1], [0.0, 0.5, 0.0])
    v = np.column_stack(vectors)
    assert np.allclose(v @ coeffs, frame, atol=1e-12)


def test_gram_schmidt_rank_deficiency():
    gram = np.eye(3)
    vectors = [np.array([1.0, 0.0, 0.0]), np.array([2.0, 0.0, 0.0])]
    with pytest.raises(RankDeficient):
        gram_schmidt(vectors, gram)
    frame, coeffs = gram_schmidt(vectors, gram, on_dependent="skip")
    assert frame.shape == (3, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6))
def test_gram_schmidt_orthonormality(dim, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim))
    gram = a.T @ a + dim * np.eye(dim)
    m = rng.integers(1, dim + 1)
    vectors = [rng.normal(size=dim) for _ in range(m)]
    frame, coeffs = gram_schmidt(vectors, gram)
    assert np.allclose(frame.T @ gram @ frame, np.eye(m), atol=1e-9)
    assert np.allclose(np.column_stack(vectors) @ coeffs, frame, atol=1e-9)
