"""Warped-product splittings of immersed submanifolds.

A parameter split (base | fiber) is warped when the induced metric is
g_B + f^2 g_F with f a function of the base alone.  `WarpedInstance`
extracts f^2 symbolically: the first fiber diagonal entry, with the
fiber coordinates pinned to an anchor, is proportional to f^2, and the
anchor value normalizes f to 1 there.  Everything downstream (the
warp gradient, the connection identity nabla_X Z = (X ln f) Z, the
Laplacian-to-curvature identity) differentiates that expression tree
exactly; the block structure itself is checked numerically on sampled
points.

The residual suites then cover the interaction of the warp with the
second fundamental form for invariant-base times slant-fiber
immersions, in the three ambient model classes, plus the mirrored
orientation (invariant fiber over a slant base) where the same chains
force the warp gradient to vanish; `nonexistence_scan` measures exactly
that forcing.  `inequality_report` evaluates the curvature-free lower
bound for the squared second fundamental form and its equality
indicator.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .charts import Box, ChartedManifold, gram_schmidt
from .exprlang import Call, Expr, compile_exprs, const, differentiate, div, evaluate, mul, parse, subst
from .semislant import SemiSlantPointData, semi_slant_point
from .submanifold import FrameData, ImmersedSubmanifold

__all__ = [
    "WarpedInstance",
    "shape_warp_residuals",
    "second_form_warp_residuals",
    "nonexistence_scan",
    "inequality_report",
]


class WarpedInstance:
    """One submanifold with a declared (base | fiber) parameter split."""

    def __init__(self, sub: ImmersedSubmanifold, base, fiber, anchor):
        self.sub = sub
        self.base = tuple(base)
        self.fiber = tuple(fiber)
        self.anchor = np.asarray(anchor, dtype=float)
        if sorted(self.base + self.fiber) != list(range(sub.param_dim)):
            raise ValueError("base and fiber must partition the parameters")
        params = sub.params
        met = sub.induced_chart.metric
        fiber_pin = {params[i]: const(self.anchor[i]) for i in self.fiber}
        base_pin = {params[a]: const(self.anchor[a]) for a in self.base}
        anchor_env = dict(zip(params, self.anchor))
        i0 = self.fiber[0]
        scale = float(evaluate(met[i0][i0], anchor_env))
        if abs(scale) < 1e-12:
            raise ValueError("fiber metric degenerates at the anchor")
        # f^2 as a function of the base, equal to 1 at the anchor
        self.warp_sq: Expr = div(subst(met[i0][i0], fiber_pin), const(scale))
        self.ln_warp: Expr = mul(const(0.5), Call("log", self.warp_sq))
        self._fiber_pin = fiber_pin
        self._base_pin = base_pin

    @cached_property
    def _dln_fn(self):
        params = self.sub.params
        return compile_exprs([differentiate(self.ln_warp, c) for c in params], params)

    def dln(self, point) -> np.ndarray:
        """Gradient covector of ln f in parameter coordinates."""
        return np.asarray(self._dln_fn(np.asarray(point, dtype=float)[None]))[:, 0]

    def block_residuals(self, points) -> dict[str, float]:
        """How far the induced metric is from g_B + f^2 g_F on the points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        chart = self.sub.induced_chart
        g = chart.metric_many(pts)
        warp = compile_exprs([self.warp_sq], self.sub.params)(pts)[0]
        base_pts = pts.copy()
        base_pts[:, list(self.base)] = self.anchor[list(self.base)]
        ghat = chart.metric_many(base_pts)
        fiber_pts = pts.copy()
        fiber_pts[:, list(self.fiber)] = self.anchor[list(self.fiber)]
        gbase = chart.metric_many(fiber_pts)
        bi, fi = list(self.base), list(self.fiber)
        cross = np.abs(g[:, bi][:, :, fi])
        fib = np.abs(
            g[:, fi][:, :, fi] - warp[:, None, None] * ghat[:, fi][:, :, fi]
        )
        bas = np.abs(g[:, bi][:, :, bi] - gbase[:, bi][:, :, bi])
        return {
            "cross_block": float(cross.max()) if cross.size else 0.0,
            "fiber_block": float(fib.max()),
            "base_block": float(bas.max()) if bas.size else 0.0,
        }

    def declared_residual(self, f_expr, points) -> float:
        """Gap to a declared warp, after normalizing both at the anchor."""
        f_expr = parse(f_expr, names=self.sub.params) if isinstance(f_expr, str) else f_expr
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        declared = compile_exprs([f_expr], self.sub.params)(pts)[0]
        declared = declared / evaluate(f_expr, dict(zip(self.sub.params, self.anchor)))
        extracted = np.sqrt(compile_exprs([self.warp_sq], self.sub.params)(pts)[0])
        return float(np.max(np.abs(declared - extracted)))

    def connection_residual(self, point) -> float:
        """nabla_X Z = (X ln f) Z for X along the base, Z along the fiber."""
        u = np.asarray(point, dtype=float)
        gamma = self.sub.induced_chart.christoffel_many(u[None])[0]
        dln = self.dln(u)
        worst = 0.0
        for a in self.base:
            for i in self.fiber:
                target = np.zeros(self.sub.param_dim)
                target[i] = dln[a]
                worst = max(worst, float(np.max(np.abs(gamma[:, a, i] - target))))
        return worst

    @cached_property
    def base_chart(self) -> ChartedManifold:
        params = self.sub.params
        met = self.sub.induced_chart.metric
        bi = list(self.base)
        entries = [[subst(met[a][b], self._fiber_pin) for b in bi] for a in bi]
        bounds = tuple(self.sub.domain.bounds[a] for a in bi)
        return ChartedManifold([params[a] for a in bi], entries, Box(bounds))

    def curvature_sum_residual(self, point) -> float:
        """Mixed sectional curvatures against the base Laplacian of f.

        For each unit fiber direction V the sum of K(e_i, V) over an
        orthonormal base frame equals (Lap f)/f with the sign convention
        that makes Lap the negated metric trace of the Hessian.
        """
        u = np.asarray(point, dtype=float)
        chart = self.sub.induced_chart
        g = chart.metric_many(u[None])[0]
        m = self.sub.param_dim
        base_vecs = []
        for a in self.base:
            v = np.zeros(m)
            v[a] = 1.0
            base_vecs.append(v)
        frame, _ = gram_schmidt(base_vecs, g)
        u_base = u[list(self.base)]
        lap = -self.base_chart.laplacian_at(u_base, Call("sqrt", self.warp_sq))
        f_val = math.sqrt(float(evaluate(self.warp_sq, dict(zip(self.sub.params, u)))))
        target = lap / f_val
        worst = 0.0
        for i in self.fiber:
            v = np.zeros(m)
            v[i] = 1.0
            total = sum(
                chart.sectional_curvature(u, frame[:, col], v)
                for col in range(frame.shape[1])
            )
            worst = max(worst, abs(total - target))
        return worst

    def gradient_data(self, point, fd: FrameData) -> dict[str, float]:
        """Norms of grad(ln f) and phi(grad(ln f)) in the ambient metric."""
        u = np.asarray(point, dtype=float)
        grad = self.sub.induced_chart.gradient_at(u, self.ln_warp)
        amb = fd.jacobian @ grad
        phi = self.sub.ambient.phi_many(fd.ambient_point[None])[0]
        phi_amb = phi @ amb
        return {
            "grad_sq": float(amb @ fd.ambient_metric @ amb),
            "phi_grad_sq": float(phi_amb @ fd.ambient_metric @ phi_amb),
        }


# identity suites ---------------------------------------------------------------


def _frame_comps(fd: FrameData, vec: np.ndarray) -> np.ndarray:
    return np.linalg.solve(fd.tangent_coeffs, vec)


def _directions(sub: ImmersedSubmanifold, fd: FrameData, indices) -> list[tuple[np.ndarray, np.ndarray]]:
    out = []
    for idx in indices:
        x = np.zeros(sub.param_dim)
        x[idx] = 1.0
        out.append((x, _frame_comps(fd, x)))
    return out


def _proper_data(sub, point, cluster_tol) -> tuple[FrameData, SemiSlantPointData]:
    fd = sub.frame_at(np.asarray(point, dtype=float))
    data = semi_slant_point(sub, point, frame=fd, cluster_tol=cluster_tol)
    if data.verdict not in ("proper", "anti_invariant"):
        raise ValueError(f"warp identities need a slant fiber, got {data.verdict}")
    return fd, data


def shape_warp_residuals(
    sub: ImmersedSubmanifold,
    wi: WarpedInstance,
    point,
    ambient_class: str,
    cluster_tol: float = 1e-6,
) -> dict[str, float]:
    """Shape-operator identities for an invariant base over a slant fiber.

    `mixed_symmetry` is class-independent; `shape` pairs A_{F T Z} W with
    the warp derivatives along X; `phi_shape` pairs A_{F Z} W with phi X.
    The plain keys state each identity with the slant angle taken
    base-constant (T parallel along the base).  The `_general` companions
    keep the base-variation term 2 (X - eta(X) xi)(ln f) g(W, TZ) that the
    product rule produces; they agree with the plain forms exactly when
    that term vanishes.  `_gap` keys record its size, which is the exact
    pointwise difference between the two forms.
    """
    fd, data = _proper_data(sub, point, cluster_tol)
    u = np.asarray(point, dtype=float)
    dln = wi.dln(u)
    cos2 = math.cos(data.angle) ** 2
    xi_param = fd.tangent_coeffs @ fd.eta_tan
    a_op = lambda n: sub.shape_operator(fd, n)
    out = {"mixed_symmetry": 0.0, "mixed_symmetry_general": 0.0, "mixed_symmetry_gap": 0.0,
           "shape": 0.0, "shape_general": 0.0, "shape_gap": 0.0,
           "phi_shape": 0.0, "phi_shape_general": 0.0, "phi_shape_gap": 0.0}
    for x, xf in _directions(sub, fd, wi.base):
        eta_x = float(fd.eta_tan @ xf)
        x_lnf = float(x @ dln)
        phix_lnf = float((fd.tangent_coeffs @ (fd.T @ xf)) @ dln)
        x_eta_lnf = float((x - eta_x * xi_param) @ dln)
        for z, zf in _directions(sub, fd, wi.fiber):
            tz = fd.T @ zf
            fz = fd.F @ zf
            ftz = fd.F @ tz
            eta_z = float(fd.eta_tan @ zf)
            for w, wf in _directions(sub, fd, wi.fiber):
                eta_w = float(fd.eta_tan @ wf)
                g_wz = float(wf @ zf)
                g_wtz = float(wf @ tz)
                fw = fd.F @ wf
                diff = float((a_op(fz) @ wf - a_op(fw) @ zf) @ xf)
                corr = -2.0 * x_eta_lnf * g_wtz
                out["mixed_symmetry"] = max(out["mixed_symmetry"], abs(diff))
                out["mixed_symmetry_general"] = max(out["mixed_symmetry_general"],
                                                    abs(diff - corr))
                out["mixed_symmetry_gap"] = max(out["mixed_symmetry_gap"], abs(corr))
                lhs = float((a_op(ftz) @ wf) @ xf)
                rhs = -phix_lnf * g_wtz - cos2 * x_lnf * g_wz
                rhs_gen = -phix_lnf * g_wtz + cos2 * x_eta_lnf * g_wz
                if ambient_class == "sasakian":
                    rhs -= eta_x * g_wtz
                    rhs_gen -= eta_x * float(fw @ ftz)
                elif ambient_class == "kenmotsu":
                    rhs += cos2 * eta_x * (g_wz - eta_z * eta_w)
                out["shape"] = max(out["shape"], abs(lhs - rhs))
                out["shape_general"] = max(out["shape_general"], abs(lhs - rhs_gen))
                out["shape_gap"] = max(out["shape_gap"], abs(rhs_gen - rhs))
                lhs2 = float((a_op(fz) @ wf) @ (fd.T @ xf))
                rhs2 = x_eta_lnf * g_wz - phix_lnf * float((fd.T @ wf) @ zf)
                rhs2_gen = x_eta_lnf * g_wz - phix_lnf * g_wtz
                out["phi_shape"] = max(out["phi_shape"], abs(lhs2 - rhs2))
                out["phi_shape_general"] = max(out["phi_shape_general"], abs(lhs2 - rhs2_gen))
                out["phi_shape_gap"] = max(out["phi_shape_gap"], abs(rhs2_gen - rhs2))
    return out


def second_form_warp_residuals(
    sub: ImmersedSubmanifold,
    wi: WarpedInstance,
    point,
    ambient_class: str,
    cluster_tol: float = 1e-6,
) -> dict[str, float]:
    """Second-fundamental-form pairings with F of the slant fiber.

    `tangent_pair` couples h of two base directions with F Z;
    `mixed_pair` couples h of a base and a fiber direction with F Z.
    `tangent_pair` is exact as stated; `mixed_pair` takes the slant angle
    base-constant, `mixed_pair_general` keeps the base-variation term
    2 (X - eta(X) xi)(ln f) g(W, TZ), and `mixed_pair_gap` records the
    size of that term (the exact difference between the two forms).
    """
    fd, data = _proper_data(sub, point, cluster_tol)
    u = np.asarray(point, dtype=float)
    dln = wi.dln(u)
    xi_param = fd.tangent_coeffs @ fd.eta_tan
    out = {"tangent_pair": 0.0, "mixed_pair": 0.0,
           "mixed_pair_general": 0.0, "mixed_pair_gap": 0.0}
    base_dirs = _directions(sub, fd, wi.base)
    fiber_dirs = _directions(sub, fd, wi.fiber)
    for x, xf in base_dirs:
        eta_x = float(fd.eta_tan @ xf)
        phix_lnf = float((fd.tangent_coeffs @ (fd.T @ xf)) @ dln)
        x_eta_lnf = float((x - eta_x * xi_param) @ dln)
        for z, zf in fiber_dirs:
            fz = fd.F @ zf
            tz = fd.T @ zf
            eta_z = float(fd.eta_tan @ zf)
            eta_fz = float(fd.eta_nor @ fz)
            for y, yf in base_dirs:
                hxy_fz = float(np.einsum("abz,a,b->z", fd.h_param, x, y) @ fz)
                if ambient_class == "sasakian":
                    target = eta_z * float(xf @ yf)
                elif ambient_class == "kenmotsu":
                    target = eta_z * float((fd.T @ xf) @ yf)
                else:
                    target = 0.0
                out["tangent_pair"] = max(out["tangent_pair"], abs(hxy_fz - target))
            for w, wf in fiber_dirs:
                hxw_fz = float(np.einsum("abz,a,b->z", fd.h_param, x, w) @ fz)
                g_wz = float(wf @ zf)
                g_wtz = float(wf @ tz)
                target = -phix_lnf * g_wz + x_eta_lnf * g_wtz
                target_gen = -phix_lnf * g_wz - x_eta_lnf * g_wtz
                if ambient_class == "sasakian":
                    fw_fz = float((fd.F @ wf) @ fz)
                    target -= eta_x * fw_fz
                    target_gen -= eta_x * fw_fz
                elif ambient_class == "kenmotsu":
                    ken = eta_x * float(fd.eta_tan @ wf) * eta_fz
                    target -= ken
                    target_gen -= ken
                out["mixed_pair"] = max(out["mixed_pair"], abs(hxw_fz - target))
                out["mixed_pair_general"] = max(out["mixed_pair_general"],
                                                abs(hxw_fz - target_gen))
                out["mixed_pair_gap"] = max(out["mixed_pair_gap"],
                                            abs(target_gen - target))
    return out


def nonexistence_scan(
    sub: ImmersedSubmanifold,
    wi: WarpedInstance,
    points,
    cluster_tol: float = 1e-6,
) -> dict[str, float]:
    """Residuals for the mirrored orientation: invariant fiber, slant base.

    The chain identities relate h-pairings to base derivatives of ln f;
    together they force `warp_gradient` to zero, which is the number the
    nonexistence statements predict.  All four values should be small on
    a genuine candidate.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    grad = np.asarray(wi._dln_fn(pts))[list(wi.base)]
    out = {
        "warp_gradient": float(np.max(np.abs(grad))) if grad.size else 0.0,
        "chain_pair": 0.0,
        "chain_symmetry": 0.0,
        "chain_side": 0.0,
    }
    for u in pts:
        fd, data = _proper_data(sub, u, cluster_tol)
        sin2 = math.sin(data.angle) ** 2
        dln = wi.dln(u)
        fiber_dirs = _directions(sub, fd, wi.fiber)  # invariant part
        base_dirs = _directions(sub, fd, wi.base)    # slant part
        for z, zf in base_dirs:
            z_lnf = float(z @ dln)
            tz_lnf = float((fd.tangent_coeffs @ (fd.T @ zf)) @ dln)
            fz = fd.F @ zf
            ftz = fd.F @ (fd.T @ zf)
            for x, xf in fiber_dirs:
                # eta terms survive only when xi is tangent (it then sits
                # in the invariant fiber), so no case split is needed
                eta_x = float(fd.eta_tan @ xf)
                for y, yf in fiber_dirs:
                    eta_y = float(fd.eta_tan @ yf)
                    phiy = fd.tangent_coeffs @ (fd.T @ yf)
                    phix = fd.tangent_coeffs @ (fd.T @ xf)
                    h_xy = np.einsum("abz,a,b->z", fd.h_param, x, y)
                    h_xpy = np.einsum("abz,a,b->z", fd.h_param, x, phiy)
                    h_ypx = np.einsum("abz,a,b->z", fd.h_param, y, phix)
                    lhs = sin2 * z_lnf * float(xf @ yf)
                    rhs = float(h_xy @ ftz) - float(h_xpy @ fz) + z_lnf * eta_x * eta_y
                    out["chain_pair"] = max(out["chain_pair"], abs(lhs - rhs))
                    out["chain_symmetry"] = max(
                        out["chain_symmetry"], abs(float((h_xpy - h_ypx) @ fz))
                    )
                    side = (
                        -z_lnf * float(xf @ yf)
                        + z_lnf * eta_x * eta_y
                        + tz_lnf * float(xf @ (fd.T @ yf))
                    )
                    out["chain_side"] = max(out["chain_side"], abs(float(h_xpy @ fz) - side))
    return out


def inequality_report(
    sub: ImmersedSubmanifold,
    wi: WarpedInstance,
    point,
    ambient_class: str,
    cluster_tol: float = 1e-6,
) -> dict[str, float]:
    """Lower bound for |h|^2 on an invariant base over a slant fiber.

    The bound multiplies the warp gradient by csc^2 + cot^2 of the slant
    angle; the Reeb position decides which gradient enters and whether a
    dimension term is added.  `slack` is lhs - rhs and must be
    nonnegative; `equality_indicator` is the mu-part of h on the fiber,
    which vanishes exactly in the equality case.
    """
    fd, data = _proper_data(sub, point, cluster_tol)
    if data.verdict != "proper":
        raise ValueError("the bound needs a proper slant angle")
    theta = data.angle
    m1 = data.invariant_dim // 2
    m2 = data.slant_dim // 2
    csc2 = 1.0 / math.sin(theta) ** 2
    cot2 = csc2 - 1.0
    grads = wi.gradient_data(point, fd)
    if data.xi_position == "tangent":
        grad_term = grads["phi_grad_sq"]
        extra = 4.0 * m2 * math.sin(theta) ** 2 if ambient_class == "sasakian" else 0.0
    else:
        grad_term = grads["grad_sq"]
        extra = 2.0 * m1 if ambient_class == "kenmotsu" else 0.0
    rhs = 4.0 * m2 * (csc2 + cot2) * grad_term + extra
    lhs = fd.h_norm_sq
    equality = 0.0
    mu = data.mu_basis
    if mu.shape[1]:
        d2 = data.d2_basis
        for i in range(d2.shape[1]):
            for j in range(d2.shape[1]):
                hzw = np.einsum("cdz,c,d->z", fd.h_frame, d2[:, i], d2[:, j])
                equality = max(equality, float(np.max(np.abs(mu.T @ hzw))))
    return {
        "lhs": lhs,
        "rhs": rhs,
        "slack": lhs - rhs,
        "m1": float(m1),
        "m2": float(m2),
        "theta": theta,
        "grad_sq": grads["grad_sq"],
        "phi_grad_sq": grads["phi_grad_sq"],
        "equality_indicator": equality,
    }
