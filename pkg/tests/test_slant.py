import math

import numpy as np
import pytest

from slantgeo.charts import Box, RankDeficient
from slantgeo.exprlang import parse
from slantgeo.slant import (
    declared_angle_residual,
    domega_fd_residual,
    domega_residual,
    pfaffian,
    shape_relation_residual,
    slant_identity_residuals,
    slant_point,
    slant_scan,
    volume_top_form,
)
from slantgeo.structures import (
    conformal_rescale,
    euclidean_cosymplectic,
    kenmotsu_warped,
    rotation_family,
)
from slantgeo.submanifold import ImmersedSubmanifold


def tube_tangent_reeb():
    # three-dimensional, Reeb field tangent, angle x2
    return ImmersedSubmanifold(
        ambient=euclidean_cosymplectic(2),
        params=("x1", "x2", "x3"),
        immersion=["x1", "sin(x2)", "0", "cos(x2)", "x3"],
        domain=Box(((-1.0, 1.0), (0.2, 1.4), (-1.0, 1.0))),
    )


def curve_normal_reeb():
    # two-dimensional, Reeb field normal, angle x1
    return ImmersedSubmanifold(
        ambient=euclidean_cosymplectic(2),
        params=("x1", "x2"),
        immersion=["0", "cos(x1)", "x2", "sin(x1)", "0"],
        domain=Box(((0.2, 1.3), (-1.0, 1.0))),
    )


def kenmotsu_slice_curve():
    return ImmersedSubmanifold(
        ambient=kenmotsu_warped(2),
        params=("x1", "x2"),
        immersion=["x2", "sin(x1)", "1972", "cos(x1)", "0"],
        domain=Box(((0.25, 1.25), (-1.0, 1.0))),
    )


def invariant_plane():
    return ImmersedSubmanifold(
        ambient=euclidean_cosymplectic(2),
        params=("x1", "x2"),
        immersion=["x1", "x2", "0", "0", "0"],
        domain=Box(((-1.0, 1.0), (-1.0, 1.0))),
    )


def anti_invariant_plane():
    return ImmersedSubmanifold(
        ambient=euclidean_cosymplectic(2),
        params=("x1", "x2"),
        immersion=["x1", "0", "x2", "0", "0"],
        domain=Box(((-1.0, 1.0), (-1.0, 1.0))),
    )


def non_slant_space():
    return ImmersedSubmanifold(
        ambient=euclidean_cosymplectic(2),
        params=("x1", "x2", "x3"),
        immersion=["x1", "x2", "x3", "0", "0"],
        domain=Box(((-1.0, 1.0),) * 3),
    )


def test_tangent_reeb_tube_scan():
    sub = tube_tangent_reeb()
    pts = sub.domain.grid(4)
    scan = slant_scan(sub, pts)
    assert scan.all_slant
    assert scan.xi_position == "tangent"
    assert not scan.constant
    assert scan.proper
    assert scan.kernel_dim == 2
    assert declared_angle_residual(sub, pts, parse("x2")) < 1e-9


def test_normal_reeb_curve_scan():
    sub = curve_normal_reeb()
    pts = sub.domain.grid(5)
    scan = slant_scan(sub, pts)
    assert scan.all_slant
    assert scan.xi_position == "normal"
    assert scan.kernel_dim == 2
    assert declared_angle_residual(sub, pts, parse("x1")) < 1e-9


def test_kenmotsu_slice_curve_scan():
    sub = kenmotsu_slice_curve()
    pts = sub.domain.grid(5)
    scan = slant_scan(sub, pts)
    assert scan.all_slant
    assert scan.xi_position == "normal"
    assert declared_angle_residual(sub, pts, parse("x1")) < 1e-9


def test_invariant_and_anti_invariant_limits():
    pts_inv = invariant_plane().domain.grid(3)
    scan = slant_scan(invariant_plane(), pts_inv)
    assert scan.all_slant and scan.constant and not scan.proper
    assert scan.angle_range[1] < 1e-9
    scan = slant_scan(anti_invariant_plane(), pts_inv)
    assert scan.all_slant and scan.constant and not scan.proper
    assert scan.angle_range[0] > math.pi / 2 - 1e-9


def test_non_slant_detection():
    sub = non_slant_space()
    data = slant_point(sub, np.array([0.1, -0.2, 0.4]))
    assert not data.is_slant
    assert data.spread > 0.9
    scan = slant_scan(sub, sub.domain.grid(3))
    assert not scan.all_slant


def test_eigenvalues_stay_in_unit_interval():
    for sub in (tube_tangent_reeb(), curve_normal_reeb(), non_slant_space()):
        for u in sub.domain.sample(10, np.random.default_rng(3)):
            data = slant_point(sub, u)
            assert np.all(data.eigenvalues >= -1e-10)
            assert np.all(data.eigenvalues <= 1 + 1e-10)


def test_slant_orthogonality_identities():
    # g(TX, TY) = cos^2(theta) g(X, Y) and g(FX, FY) = sin^2(theta) g(X, Y)
    for sub in (tube_tangent_reeb(), curve_normal_reeb(), kenmotsu_slice_curve()):
        for u in sub.domain.sample(6, np.random.default_rng(5)):
            data = slant_point(sub, u)
            res = slant_identity_residuals(sub.frame_at(u), data)
            assert max(res.values()) < 1e-10, (sub.name, res)


def test_two_dimensional_patches_are_always_pointwise_slant():
    # any surface avoiding the Reeb direction is pointwise slant
    rng = np.random.default_rng(7)
    expr_pool = ["x1", "x2", "sin(x1)", "cos(x2)", "x1*x2", "exp(0.3*x1)", "x1^2 - x2"]
    for trial in range(12):
        comps = [str(expr_pool[rng.integers(len(expr_pool))]) for _ in range(4)] + ["0"]
        sub = ImmersedSubmanifold(
            ambient=euclidean_cosymplectic(2),
            params=("x1", "x2"),
            immersion=comps,
            domain=Box(((0.3, 1.0), (0.3, 1.0))),
        )
        for u in sub.domain.sample(4, rng):
            try:
                data = slant_point(sub, u)
            except RankDeficient:
                continue  # degenerate draws are legitimate skips
            assert data.is_slant


def test_conformal_change_preserves_the_angle():
    base = tube_tangent_reeb()
    rescaled_ambient = conformal_rescale(euclidean_cosymplectic(2), parse("0.3*y1 - 0.1*y4"))
    pts = base.domain.sample(8, np.random.default_rng(11))
    assert max(rescaled_ambient.axiom_residuals(
        rescaled_ambient.chart.domain.sample(20, np.random.default_rng(1))
    ).values()) < 1e-10
    sub = ImmersedSubmanifold(
        ambient=rescaled_ambient,
        params=base.params,
        immersion=list(base.immersion),
        domain=base.domain,
    )
    for u in pts:
        a0 = slant_point(base, u).angle
        a1 = slant_point(sub, u).angle
        assert a1 == pytest.approx(a0, abs=1e-9)


def test_shape_relation_on_constant_angle_instances():
    # A_{FX} TX = A_{F TX} X needs a constant angle; holds across X draws
    ambient = rotation_family(parse("0.7"))
    sub = ImmersedSubmanifold(
        ambient=ambient,
        params=("x1", "x2"),
        immersion=["x1", "x2", "0", "0", "0.5"],
        domain=Box(((-1.0, 1.0), (-1.0, 1.0))),
    )
    rng = np.random.default_rng(13)
    for u in sub.domain.sample(4, rng):
        data = slant_point(sub, u)
        assert data.is_slant and abs(data.angle - 0.7) < 1e-12
        for _ in range(3):
            x = rng.normal(size=data.kernel_basis.shape[1])
            assert shape_relation_residual(sub, sub.frame_at(u), data, x) < 1e-10


def test_omega_differential_vanishes_for_closed_cases():
    # flat-plane image of a constant-angle immersion: T is parallel, so the
    # associated two-form is closed; the curved tube is closed too since
    # omega = -cos(x2) dx1 ^ dx2 ... d(omega) picks a dx2 factor twice
    sub = tube_tangent_reeb()
    pts = sub.domain.sample(10, np.random.default_rng(17))
    assert domega_residual(sub, pts) < 1e-12
    assert domega_fd_residual(sub, pts[:4]) < 1e-7


def test_omega_differential_nonzero_when_expected():
    # the hyperkaehler-style rotation ambient twists T enough that the
    # two-form of a graph over a four-dimensional block is not closed
    ambient = rotation_family(parse("0.2 + (y1 + y3)/5"), k=1)
    sub = ImmersedSubmanifold(
        ambient=ambient,
        params=("x1", "x2", "x3", "x4"),
        immersion=["x1", "x2", "x3", "x4", "0.3"],
        domain=Box(((-1.0, 1.0),) * 4),
    )
    pts = sub.domain.sample(10, np.random.default_rng(19))
    r_sym = domega_residual(sub, pts)
    assert r_sym > 1e-3
    # the finite-difference route agrees with the symbolic one
    assert domega_fd_residual(sub, pts[:4]) < 1e-6


def test_pfaffian_small_cases():
    b = np.array([[0.0, 3.0], [-3.0, 0.0]])
    assert pfaffian(b) == pytest.approx(3.0)
    c = np.zeros((4, 4))
    c[0, 1], c[1, 0] = 1.0, -1.0
    c[2, 3], c[3, 2] = 2.0, -2.0
    c[0, 2], c[2, 0] = 5.0, -5.0
    c[1, 3], c[3, 1] = 7.0, -7.0
    c[0, 3], c[3, 0] = -1.0, 1.0
    c[1, 2], c[2, 1] = 4.0, -4.0
    # pf = b12 b34 - b13 b24 + b14 b23
    assert pfaffian(c) == pytest.approx(1.0 * 2.0 - 5.0 * 7.0 + (-1.0) * 4.0)
    rng = np.random.default_rng(23)
    a = rng.normal(size=(6, 6))
    skew = a - a.T
    assert pfaffian(skew) ** 2 == pytest.approx(np.linalg.det(skew), rel=1e-9)


def test_volume_top_form_tracks_the_angle():
    sub = tube_tangent_reeb()
    for u in ((0.2, 0.5, -0.1), (0.7, 1.1, 0.9)):
        fd = sub.frame_at(np.array(u))
        coeff = volume_top_form(fd)
        assert abs(coeff) == pytest.approx(math.cos(u[1]), abs=1e-12)
