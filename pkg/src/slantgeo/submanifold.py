"""Isometrically immersed submanifolds of almost contact metric ambients.

An `ImmersedSubmanifold` is an expression-valued immersion from a
parameter box into the ambient chart.  `frame_at` assembles, per point:

* an orthonormal tangent frame (modified Gram-Schmidt over the Jacobian
  columns, in parameter order) with its coefficient matrix back to the
  coordinate fields,
* an orthonormal normal frame grown from the ambient coordinate basis
  vectors in coordinate order, skipping dependent candidates,
* the second fundamental form, exactly: the parameter Hessian of the
  immersion is symbolic and the ambient Christoffel term is evaluated
  from the exact metric derivatives (no finite differences),
* the induced-frame blocks of the ambient structure tensor: tangential
  part T, normal-valued part F, and their counterparts t, f on the
  normal bundle, plus the tangent/normal components of eta.

Finite differencing is used only where a genuinely independent route is
wanted (the Weingarten map and the normal connection differentiate the
constructed frame fields); those serve as cross-checks of the exact
second-fundamental-form route, never as its replacement.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

from .charts import Box, ChartedManifold, gram_schmidt
from .exprlang import Expr, add, compile_exprs, const, differentiate, mul, parse, subst
from .structures import AlmostContactStructure

__all__ = ["FrameData", "ImmersedSubmanifold"]

_d = lru_cache(maxsize=None)(differentiate)


@dataclass
class FrameData:
    """Everything frame-dependent at one parameter point."""

    params: np.ndarray
    ambient_point: np.ndarray
    jacobian: np.ndarray          # (d, m) columns are coordinate fields
    ambient_metric: np.ndarray    # (d, d)
    induced_metric: np.ndarray    # (m, m)
    tangent: np.ndarray           # (d, m) orthonormal columns
    tangent_coeffs: np.ndarray    # (m, m): tangent = jacobian @ tangent_coeffs
    normal: np.ndarray            # (d, p) orthonormal columns
    second_fundamental: np.ndarray  # (m, m, d) ambient components of nabla-bar on coordinate fields
    h_param: np.ndarray           # (m, m, p) normal-frame components, coordinate fields
    h_frame: np.ndarray           # (m, m, p) normal-frame components, orthonormal frame
    T: np.ndarray                 # (m, m) tangential part of phi on the frame
    F: np.ndarray                 # (p, m) normal part of phi on the frame
    t: np.ndarray                 # (m, p) tangential part of phi on normals
    f: np.ndarray                 # (p, p) normal part of phi on normals
    eta_tan: np.ndarray           # (m,) eta of the tangent frame
    eta_nor: np.ndarray           # (p,) eta of the normal frame

    @property
    def mean_curvature(self) -> np.ndarray:
        m = self.h_frame.shape[0]
        return np.einsum("cca->a", self.h_frame) / m

    @property
    def h_norm_sq(self) -> float:
        return float(np.sum(self.h_frame**2))

    @property
    def tangent_dim(self) -> int:
        return self.tangent.shape[1]

    @property
    def normal_dim(self) -> int:
        return self.normal.shape[1]


@dataclass
class ImmersedSubmanifold:
    ambient: AlmostContactStructure
    params: tuple[str, ...]
    immersion: list
    domain: Box
    name: str = ""

    def __post_init__(self):
        self.params = tuple(self.params)
        self.immersion = [
            parse(e, names=self.params) if isinstance(e, str) else e
            for e in self.immersion
        ]
        self._frame_cache: dict[bytes, FrameData] = {}
        if len(self.immersion) != self.ambient.dim:
            raise ValueError(
                f"immersion has {len(self.immersion)} components, "
                f"ambient dimension is {self.ambient.dim}"
            )

    @property
    def param_dim(self) -> int:
        return len(self.params)

    @property
    def ambient_dim(self) -> int:
        return self.ambient.dim

    # compiled immersion data --------------------------------------------------

    @cached_property
    def _jac_sym(self):
        return [[_d(e, x) for x in self.params] for e in self.immersion]

    @cached_property
    def _imm_fn(self):
        return compile_exprs(self.immersion, self.params)

    @cached_property
    def _jac_fn(self):
        return compile_exprs([e for row in self._jac_sym for e in row], self.params)

    @cached_property
    def _hess_fn(self):
        flat = [
            _d(self._jac_sym[k][a], x)
            for k in range(self.ambient_dim)
            for a in range(self.param_dim)
            for x in self.params
        ]
        return compile_exprs(flat, self.params)

    def ambient_points(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self._imm_fn(pts).T

    def jacobian_many(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d, m = self.ambient_dim, self.param_dim
        return self._jac_fn(pts).reshape(d, m, -1).transpose(2, 0, 1)

    def hessian_many(self, points) -> np.ndarray:
        """hess[n,k,a,b] = d^2 immersion^k / dx_a dx_b."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d, m = self.ambient_dim, self.param_dim
        return self._hess_fn(pts).reshape(d, m, m, -1).transpose(3, 0, 1, 2)

    @cached_property
    def induced_chart(self) -> ChartedManifold:
        """First fundamental form as an exact symbolic metric in the parameters."""
        composed = {c: e for c, e in zip(self.ambient.chart.coords, self.immersion)}
        m, dim = self.param_dim, self.ambient_dim
        gsub = [
            [subst(self.ambient.chart.metric[k][l], composed) for l in range(dim)]
            for k in range(dim)
        ]
        entries = []
        for a in range(m):
            row = []
            for b in range(m):
                acc: Expr = const(0.0)
                for k in range(dim):
                    for l in range(dim):
                        acc = add(acc, mul(gsub[k][l], mul(self._jac_sym[k][a], self._jac_sym[l][b])))
                row.append(acc)
            entries.append(row)
        return ChartedManifold(self.params, entries, self.domain)

    # frames --------------------------------------------------------------------

    def second_fundamental_coords(self, point) -> np.ndarray:
        """S[a,b,:] = ambient components of nabla-bar_{d_a} d_b along the immersion."""
        u = np.asarray(point, dtype=float)
        p = self.ambient_points(u[None])[0]
        jac = self.jacobian_many(u[None])[0]
        hess = self.hessian_many(u[None])[0]
        gamma = self.ambient.chart.christoffel_many(p[None])[0]
        return np.einsum("kab->abk", hess) + np.einsum(
            "kpq,pa,qb->abk", gamma, jac, jac
        )

    def frame_at(self, point) -> FrameData:
        u = np.asarray(point, dtype=float)
        key = u.tobytes()
        cached = self._frame_cache.get(key)
        if cached is not None:
            return cached
        fd = self._frame_at(u)
        if len(self._frame_cache) >= 16384:
            self._frame_cache.clear()
        self._frame_cache[key] = fd
        return fd

    def _frame_at(self, u: np.ndarray) -> FrameData:
        p = self.ambient_points(u[None])[0]
        jac = self.jacobian_many(u[None])[0]
        g = self.ambient.chart.metric_many(p[None])[0]
        tangent, coeffs = gram_schmidt(list(jac.T), g)  # raises RankDeficient
        m, d = self.param_dim, self.ambient_dim
        candidates = list(tangent.T) + [np.eye(d)[k] for k in range(d)]
        full, _ = gram_schmidt(candidates, g, on_dependent="skip")
        normal = full[:, m:]
        s = self.second_fundamental_coords(u)
        h_param = np.einsum("abk,kl,lz->abz", s, g, normal)
        h_frame = np.einsum("ac,bd,abz->cdz", coeffs, coeffs, h_param)
        phi = self.ambient.phi_many(p[None])[0]
        gphi = g @ phi
        eta = self.ambient.eta_many(p[None])[0]
        return FrameData(
            params=u,
            ambient_point=p,
            jacobian=jac,
            ambient_metric=g,
            induced_metric=jac.T @ g @ jac,
            tangent=tangent,
            tangent_coeffs=coeffs,
            normal=normal,
            second_fundamental=s,
            h_param=h_param,
            h_frame=h_frame,
            T=tangent.T @ gphi @ tangent,
            F=normal.T @ gphi @ tangent,
            t=tangent.T @ gphi @ normal,
            f=normal.T @ gphi @ normal,
            eta_tan=eta @ tangent,
            eta_nor=eta @ normal,
        )

    # operators -------------------------------------------------------------------

    def shape_operator(self, fd: FrameData, z_coeffs: np.ndarray) -> np.ndarray:
        """A_Z on the orthonormal frame via g(A_Z X, Y) = g(h(X,Y), Z)."""
        return np.einsum("cdz,z->cd", fd.h_frame, np.asarray(z_coeffs, dtype=float))

    def block_identity_residuals(self, fd: FrameData) -> dict[str, float]:
        """Residuals of the phi^2 = -I + eta (x) xi split across T, F, t, f."""
        m, p = fd.tangent_dim, fd.normal_dim
        mx = lambda a: float(np.max(np.abs(a))) if a.size else 0.0
        return {
            "tangent_split": mx(
                fd.T @ fd.T + fd.t @ fd.F + np.eye(m) - np.outer(fd.eta_tan, fd.eta_tan)
            ),
            "mixed_tangent": mx(
                fd.F @ fd.T + fd.f @ fd.F - np.outer(fd.eta_nor, fd.eta_tan)
            ),
            "mixed_normal": mx(
                fd.T @ fd.t + fd.t @ fd.f - np.outer(fd.eta_tan, fd.eta_nor)
            ),
            "normal_split": mx(
                fd.F @ fd.t + fd.f @ fd.f + np.eye(p) - np.outer(fd.eta_nor, fd.eta_nor)
            ),
            "T_skew": mx(fd.T + fd.T.T),
            "f_skew": mx(fd.f + fd.f.T),
            "t_adjoint": mx(fd.t + fd.F.T),
        }

    # fields and finite-difference routes -------------------------------------------

    def tangent_field(self, param_field: Callable) -> Callable:
        """Lift a parameter-components field to ambient components."""

        def field(v: np.ndarray) -> np.ndarray:
            return self.jacobian_many(v[None])[0] @ np.asarray(param_field(v), dtype=float)

        return field

    def ambient_derivative(
        self, point, direction_field: Callable, vector_field: Callable, step: float = 1e-5
    ) -> np.ndarray:
        """nabla-bar_X V at `point`, X tangent (parameter components).

        The positional derivative of V is central-differenced along the
        parameter line through `point`; the connection term uses the
        exact ambient Christoffel symbols.
        """
        u = np.asarray(point, dtype=float)
        x = np.asarray(direction_field(u), dtype=float)
        vp = np.asarray(vector_field(u + step * x), dtype=float)
        vm = np.asarray(vector_field(u - step * x), dtype=float)
        dv = (vp - vm) / (2 * step)
        p = self.ambient_points(u[None])[0]
        gamma = self.ambient.chart.christoffel_many(p[None])[0]
        x_amb = self.jacobian_many(u[None])[0] @ x
        return dv + np.einsum("kpq,p,q->k", gamma, x_amb, np.asarray(vector_field(u), dtype=float))

    def weingarten_operator(self, point, z_coeffs: np.ndarray, step: float = 1e-5) -> np.ndarray:
        """A_Z via -tan(nabla-bar_X Z), differentiating the normal frame field.

        Independent of the duality route through h; used as a cross-check.
        """
        u = np.asarray(point, dtype=float)
        fd = self.frame_at(u)
        z = np.asarray(z_coeffs, dtype=float)

        def zfield(v: np.ndarray) -> np.ndarray:
            return self.frame_at(v).normal @ z

        out = np.empty((fd.tangent_dim, fd.tangent_dim))
        for col in range(fd.tangent_dim):
            xp = fd.tangent_coeffs[:, col]
            nb = self.ambient_derivative(u, lambda _v: xp, zfield, step=step)
            out[:, col] = -fd.tangent.T @ fd.ambient_metric @ nb
        return out

    def normal_connection(self, point, z_coeffs: np.ndarray, direction: int, step: float = 1e-5) -> np.ndarray:
        """D_X Z components on the normal frame, X the `direction`-th frame vector."""
        u = np.asarray(point, dtype=float)
        fd = self.frame_at(u)
        z = np.asarray(z_coeffs, dtype=float)

        def zfield(v: np.ndarray) -> np.ndarray:
            return self.frame_at(v).normal @ z

        xp = fd.tangent_coeffs[:, direction]
        nb = self.ambient_derivative(u, lambda _v: xp, zfield, step=step)
        return fd.normal.T @ fd.ambient_metric @ nb

    def _field_jacobian(self, u: np.ndarray, field: Callable, step: float) -> np.ndarray:
        m = self.param_dim
        out = np.empty((m, m))
        for b in range(m):
            e = np.zeros(m)
            e[b] = step
            out[:, b] = (
                np.asarray(field(u + e), dtype=float) - np.asarray(field(u - e), dtype=float)
            ) / (2 * step)
        return out

    def bracket_at(self, point, field_x: Callable, field_y: Callable, step: float = 1e-5) -> np.ndarray:
        """[X, Y] in parameter components for parameter-components fields."""
        u = np.asarray(point, dtype=float)
        x = np.asarray(field_x(u), dtype=float)
        y = np.asarray(field_y(u), dtype=float)
        return self._field_jacobian(u, field_y, step) @ x - self._field_jacobian(u, field_x, step) @ y

    def connection_at(self, point, field_x: Callable, field_y: Callable, step: float = 1e-5) -> np.ndarray:
        """nabla_X Y of the induced metric, in parameter components."""
        u = np.asarray(point, dtype=float)
        x = np.asarray(field_x(u), dtype=float)
        y = np.asarray(field_y(u), dtype=float)
        gamma = self.induced_chart.christoffel_many(u[None])[0]
        return self._field_jacobian(u, field_y, step) @ x + np.einsum("ljk,j,k->l", gamma, x, y)

    def phi_transfer_residuals(self, point, step: float = 1e-5) -> dict[str, float]:
        """How far the blocks (T, F, t, f) are from being parallel.

        Pushing nabla-bar phi = 0 through the tangent/normal split gives
        four coupled identities:

            (nabla_X T)Y = A_{FY} X + t h(X, Y)
            (D_X F)Y     = -h(X, TY) + f h(X, Y)
            -T A_Z X + t D_X Z = nabla_X (tZ) - A_{fZ} X
            -F A_Z X + f D_X Z = h(X, tZ) + D_X (fZ)

        for tangent X, Y and normal Z.  The returned residuals measure
        each identity over all coordinate directions X, Y and all normal
        frame directions Z; they vanish exactly when the ambient phi is
        parallel, and quantify the obstruction otherwise.
        """
        u = np.asarray(point, dtype=float)
        fd = self.frame_at(u)
        m, p = fd.tangent_dim, fd.normal_dim
        gm = fd.ambient_metric

        def frame_comps(v_param: np.ndarray) -> np.ndarray:
            return np.linalg.solve(fd.tangent_coeffs, v_param)

        def t_image_field(b: int) -> Callable:
            def field(v: np.ndarray) -> np.ndarray:
                fdv = self.frame_at(v)
                yf = np.linalg.solve(fdv.tangent_coeffs, np.eye(m)[b])
                return fdv.tangent_coeffs @ (fdv.T @ yf)
            return field

        def f_image_field(b: int) -> Callable:
            def field(v: np.ndarray) -> np.ndarray:
                fdv = self.frame_at(v)
                yf = np.linalg.solve(fdv.tangent_coeffs, np.eye(m)[b])
                return fdv.normal @ (fdv.F @ yf)
            return field

        def normal_field(r: int) -> Callable:
            return lambda v: self.frame_at(v).normal @ np.eye(p)[r]

        def t_normal_field(r: int) -> Callable:
            def field(v: np.ndarray) -> np.ndarray:
                fdv = self.frame_at(v)
                return fdv.tangent_coeffs @ (fdv.t @ np.eye(p)[r])
            return field

        def f_normal_field(r: int) -> Callable:
            def field(v: np.ndarray) -> np.ndarray:
                fdv = self.frame_at(v)
                return fdv.normal @ (fdv.f @ np.eye(p)[r])
            return field

        out = {
            "tangent_tangent": 0.0,
            "tangent_normal": 0.0,
            "normal_tangent": 0.0,
            "normal_normal": 0.0,
        }
        basis = np.eye(m)
        for a in range(m):
            x_dir = lambda _v, _e=basis[a]: _e
            xf = frame_comps(basis[a])
            for b in range(m):
                yf = frame_comps(basis[b])
                nab_xy = frame_comps(
                    self.connection_at(u, x_dir, lambda _v, _e=basis[b]: _e, step=step)
                )
                h_ab = fd.h_param[a, b]

                nab_ty = frame_comps(self.connection_at(u, x_dir, t_image_field(b), step=step))
                lhs = nab_ty - fd.T @ nab_xy
                rhs = self.shape_operator(fd, fd.F @ yf) @ xf + fd.t @ h_ab
                out["tangent_tangent"] = max(out["tangent_tangent"], float(np.max(np.abs(lhs - rhs))))

                d_fy = fd.normal.T @ gm @ self.ambient_derivative(u, x_dir, f_image_field(b), step=step)
                lhs = d_fy - fd.F @ nab_xy
                ty_param = fd.tangent_coeffs @ (fd.T @ yf)
                rhs = -np.einsum("jp,j->p", fd.h_param[a], ty_param) + fd.f @ h_ab
                out["tangent_normal"] = max(out["tangent_normal"], float(np.max(np.abs(lhs - rhs))))

            for r in range(p):
                zc = np.eye(p)[r]
                a_z_x = self.shape_operator(fd, zc) @ xf
                d_xz = fd.normal.T @ gm @ self.ambient_derivative(u, x_dir, normal_field(r), step=step)

                lhs = -fd.T @ a_z_x + fd.t @ d_xz
                nab_tz = frame_comps(self.connection_at(u, x_dir, t_normal_field(r), step=step))
                rhs = nab_tz - self.shape_operator(fd, fd.f @ zc) @ xf
                out["normal_tangent"] = max(out["normal_tangent"], float(np.max(np.abs(lhs - rhs))))

                lhs = -fd.F @ a_z_x + fd.f @ d_xz
                tz_param = fd.tangent_coeffs @ (fd.t @ zc)
                d_fz = fd.normal.T @ gm @ self.ambient_derivative(u, x_dir, f_normal_field(r), step=step)
                rhs = np.einsum("jp,j->p", fd.h_param[a], tz_param) + d_fz
                out["normal_normal"] = max(out["normal_normal"], float(np.max(np.abs(lhs - rhs))))
        return out
