"""Pointwise semi-slant splittings and their structure identities.

A tangent space splits as D1 + D2 (+ the Reeb direction when it is
tangent), with D1 invariant under phi and D2 slant at a single pointwise
angle.  The splitting is read off the spectrum of A^T A, where A is the
restriction of phi to the eta-kernel as in the slant module: the
eigenvalue-1 space is the invariant part, a single interior eigenvalue
cluster is the slant part, and eigenvalue 0 marks an anti-invariant
part.  Any other spectral layout is not semi-slant.

The second half of the module turns the structural lemmas about such
splittings into pointwise residuals: integrability and total geodesy of
the two distributions, the mixed-geodesy criterion behind product
splittings, and the behaviour of a totally umbilic immersion.  Vector
fields inside a distribution are built by composing coordinate frame
fields with the spectral projector, so brackets and induced covariant
derivatives are honest derivatives of the distribution, not of a frozen
basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .charts import gram_schmidt
from .exprlang import Expr, compile_exprs, parse
from .submanifold import FrameData, ImmersedSubmanifold

__all__ = [
    "SemiSlantPointData",
    "SemiSlantScan",
    "semi_slant_point",
    "semi_slant_scan",
    "declared_semi_slant_residual",
    "distribution_field",
    "frame_residuals",
    "mu_invariance_residual",
    "integrability_d1_residual",
    "integrability_d2_residual",
    "foliation_d1_residual",
    "foliation_d2_residual",
    "product_criterion_residual",
    "umbilicity_residuals",
]


@dataclass(frozen=True)
class SemiSlantPointData:
    params: np.ndarray
    xi_position: str
    verdict: str                # proper / invariant / anti_invariant / not_semi_slant / indeterminate
    angle: float
    eigenvalues: np.ndarray
    cluster_means: tuple
    d1_basis: np.ndarray        # (m, k1) frame coefficients; Reeb column first when tangent
    invariant_dim: int          # k1 without the Reeb column
    d2_basis: np.ndarray        # (m, k2)
    fd2_basis: np.ndarray       # (p, k2) normal frame coefficients of F D2
    mu_basis: np.ndarray        # (p, p - k2)

    @property
    def slant_dim(self) -> int:
        return self.d2_basis.shape[1]

    @property
    def mu_dim(self) -> int:
        return self.mu_basis.shape[1]


@dataclass(frozen=True)
class SemiSlantScan:
    points: np.ndarray
    verdict: str                # "mixed" if it varies
    angles: np.ndarray
    xi_position: str
    invariant_dim: int
    slant_dim: int
    mu_dim: int
    constant: bool
    proper: bool

    @property
    def angle_range(self) -> tuple[float, float]:
        return float(self.angles.min()), float(self.angles.max())


def _cluster(values: np.ndarray, tol: float) -> list[tuple[float, list[int]]]:
    """Group an ascending array by gaps larger than tol."""
    groups: list[list[int]] = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] > tol:
            groups.append([i])
        else:
            groups[-1].append(i)
    return [(float(values[idx].mean()), idx) for idx in groups]


def semi_slant_point(
    sub: ImmersedSubmanifold,
    point,
    frame: FrameData | None = None,
    cluster_tol: float = 1e-6,
    xi_tol: float = 1e-10,
) -> SemiSlantPointData:
    """Spectral splitting of one tangent space."""
    fd = frame if frame is not None else sub.frame_at(np.asarray(point, dtype=float))
    m = fd.tangent_dim
    p = fd.normal_dim
    norm_tan = float(np.linalg.norm(fd.eta_tan))
    norm_nor = float(np.linalg.norm(fd.eta_nor))
    if norm_nor < xi_tol:
        position = "tangent"
    elif norm_tan < xi_tol:
        position = "normal"
    else:
        position = "oblique"
    if norm_tan < xi_tol:
        kernel = np.eye(m)
    else:
        ortho, _ = gram_schmidt([fd.eta_tan / norm_tan] + list(np.eye(m)), np.eye(m), on_dependent="skip")
        kernel = ortho[:, 1:]
    a = kernel.T @ fd.T @ kernel
    lam, vec = np.linalg.eigh(a.T @ a)
    clusters = _cluster(lam, cluster_tol) if lam.size else []
    means = [c[0] for c in clusters]

    def pick(indices: list[int]) -> np.ndarray:
        return kernel @ vec[:, indices]

    near = 10 * cluster_tol
    ambiguous = any(
        m2 - m1 < near for m1, m2 in zip(sorted(means), sorted(means)[1:])
    )
    ones = [idx for mean, idx in clusters if abs(mean - 1.0) <= near]
    zeros = [idx for mean, idx in clusters if abs(mean) <= near]
    mids = [(mean, idx) for mean, idx in clusters if near < mean < 1.0 - near]

    d1_cols = [pick(idx) for idx in ones]
    if norm_tan >= xi_tol:
        d1_cols.insert(0, (fd.eta_tan / norm_tan)[:, None])
    d1 = np.hstack(d1_cols) if d1_cols else np.zeros((m, 0))
    invariant_dim = sum(len(idx) for idx in ones)

    angle = float("nan")
    d2 = np.zeros((m, 0))
    if ambiguous:
        verdict = "indeterminate"
    elif len(mids) >= 2 or (len(mids) == 1 and zeros):
        verdict = "not_semi_slant"
    elif len(mids) == 1:
        verdict = "proper"
        angle = math.acos(math.sqrt(min(max(mids[0][0], 0.0), 1.0)))
        d2 = pick(mids[0][1])
    elif zeros:
        verdict = "anti_invariant"
        angle = math.pi / 2
        d2 = pick([i for idx in zeros for i in idx])
    else:
        verdict = "invariant"
        angle = 0.0

    if d2.shape[1] and not math.isnan(angle) and math.sin(angle) > 0:
        fw = fd.F @ d2
        fd2 = fw / np.linalg.norm(fw, axis=0, keepdims=True)
    else:
        fd2 = np.zeros((p, 0))
    if fd2.shape[1]:
        ortho, _ = gram_schmidt(list(fd2.T) + list(np.eye(p)), np.eye(p), on_dependent="skip")
        mu = ortho[:, fd2.shape[1]:]
    else:
        mu = np.eye(p)
    return SemiSlantPointData(
        params=fd.params,
        xi_position=position,
        verdict=verdict,
        angle=angle,
        eigenvalues=lam,
        cluster_means=tuple(means),
        d1_basis=d1,
        invariant_dim=invariant_dim,
        d2_basis=d2,
        fd2_basis=fd2,
        mu_basis=mu,
    )


def semi_slant_scan(
    sub: ImmersedSubmanifold,
    points,
    cluster_tol: float = 1e-6,
    const_tol: float = 1e-8,
    proper_margin: float = 1e-6,
) -> SemiSlantScan:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    samples = [semi_slant_point(sub, u, cluster_tol=cluster_tol) for u in points]
    verdicts = {s.verdict for s in samples}
    positions = {s.xi_position for s in samples}
    angles = np.array([s.angle for s in samples])
    uniform = len(verdicts) == 1
    all_proper = uniform and verdicts == {"proper"}
    lo = float(np.nanmin(angles)) if not np.isnan(angles).all() else float("nan")
    hi = float(np.nanmax(angles)) if not np.isnan(angles).all() else float("nan")
    return SemiSlantScan(
        points=points,
        verdict=verdicts.pop() if uniform else "mixed",
        angles=angles,
        xi_position=positions.pop() if len(positions) == 1 else "mixed",
        invariant_dim=samples[0].invariant_dim,
        slant_dim=samples[0].slant_dim,
        mu_dim=samples[0].mu_dim,
        constant=all_proper and hi - lo <= const_tol,
        proper=all_proper and lo > proper_margin and hi < math.pi / 2 - proper_margin,
    )


def declared_semi_slant_residual(sub: ImmersedSubmanifold, points, angle_expr) -> float:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(angle_expr, str):
        angle_expr = parse(angle_expr, names=sub.params)
    declared = compile_exprs([angle_expr], list(sub.params))(points)[0]
    measured = np.array([semi_slant_point(sub, u).angle for u in points])
    return float(np.max(np.abs(measured - declared)))


# frames and invariance ---------------------------------------------------------


def frame_residuals(fd: FrameData, data: SemiSlantPointData) -> dict[str, float]:
    """Structural residuals of the splitting at one point."""
    mx = lambda arr: float(np.max(np.abs(arr))) if arr.size else 0.0
    d1, d2, fd2 = data.d1_basis, data.d2_basis, data.fd2_basis
    out = {
        "d1_orthonormal": mx(d1.T @ d1 - np.eye(d1.shape[1])),
        "d2_orthonormal": mx(d2.T @ d2 - np.eye(d2.shape[1])),
        "d1_d2_orthogonal": mx(d1.T @ d2),
        "fd2_orthonormal": mx(fd2.T @ fd2 - np.eye(fd2.shape[1])),
        "d1_no_normal_part": mx(fd.F @ d1),
        "d1_closed_under_T": mx(fd.T @ d1 - d1 @ (d1.T @ fd.T @ d1)),
    }
    if d2.shape[1] and data.verdict == "proper":
        sin2 = math.sin(data.angle) ** 2
        fb = fd.F @ d2
        out["d2_normal_part_scale"] = mx(fb.T @ fb - sin2 * np.eye(d2.shape[1]))
        tb = fd.T @ d2
        out["d2_tangent_part_scale"] = mx(tb.T @ tb - (1 - sin2) * np.eye(d2.shape[1]))
    return out


def mu_invariance_residual(fd: FrameData, data: SemiSlantPointData) -> float:
    """phi(mu) stays inside mu: no tangential part, no F D2 part."""
    mu = data.mu_basis
    if mu.shape[1] == 0:
        return 0.0
    tangential = fd.t @ mu
    into_fd2 = data.fd2_basis.T @ (fd.f @ mu)
    worst = float(np.max(np.abs(tangential))) if tangential.size else 0.0
    if into_fd2.size:
        worst = max(worst, float(np.max(np.abs(into_fd2))))
    return worst


# distribution fields ------------------------------------------------------------


def distribution_field(
    sub: ImmersedSubmanifold,
    which: str,
    seed,
    cluster_tol: float = 1e-6,
) -> Callable:
    """A parameter-components field lying in D1 or D2.

    The seed is a fixed vector in orthonormal-frame components; the
    field projects it onto the distribution at every point, so it is
    smooth wherever the spectral clusters stay separated.
    """
    seed = np.asarray(seed, dtype=float)

    def field(u: np.ndarray) -> np.ndarray:
        fd = sub.frame_at(np.asarray(u, dtype=float))
        data = semi_slant_point(sub, u, frame=fd, cluster_tol=cluster_tol)
        basis = data.d1_basis if which == "d1" else data.d2_basis
        frame_comps = basis @ (basis.T @ seed)
        return fd.tangent_coeffs @ frame_comps

    return field


def _frame_comps(fd: FrameData, param_vec: np.ndarray) -> np.ndarray:
    return np.linalg.solve(fd.tangent_coeffs, np.asarray(param_vec, dtype=float))


# structure identities -----------------------------------------------------------


def _prep(sub, point, fields, step, cluster_tol):
    u = np.asarray(point, dtype=float)
    fd = sub.frame_at(u)
    data = semi_slant_point(sub, u, frame=fd, cluster_tol=cluster_tol)
    if data.verdict != "proper":
        raise ValueError(f"identities need a proper splitting, got {data.verdict}")
    vals = [np.asarray(f(u), dtype=float) for f in fields]
    frames = [_frame_comps(fd, v) for v in vals]
    return u, fd, data, vals, frames


def integrability_d1_residual(
    sub: ImmersedSubmanifold, point, x_field, y_field, z_field,
    step: float = 1e-5, cluster_tol: float = 1e-6,
) -> float:
    """sin^2(theta) g([X,Y], Z) = g(h(X, phi Y) - h(Y, phi X), F Z)."""
    u, fd, data, (x, y, z), (xf, yf, zf) = _prep(sub, point, (x_field, y_field, z_field), step, cluster_tol)
    sin2 = math.sin(data.angle) ** 2
    br = sub.bracket_at(u, x_field, y_field, step=step)
    lhs = sin2 * float(br @ fd.induced_metric @ z)
    phi_y = fd.tangent_coeffs @ (fd.T @ yf)
    phi_x = fd.tangent_coeffs @ (fd.T @ xf)
    h_xy = np.einsum("abz,a,b->z", fd.h_param, x, phi_y)
    h_yx = np.einsum("abz,a,b->z", fd.h_param, y, phi_x)
    rhs = float((h_xy - h_yx) @ (fd.F @ zf))
    return abs(lhs - rhs)


def integrability_d2_residual(
    sub: ImmersedSubmanifold, point, z_field, w_field, x_field,
    step: float = 1e-5, cluster_tol: float = 1e-6,
) -> float:
    """sin^2(theta) g([Z,W], X) against the four shape-operator terms."""
    u, fd, data, (z, w, x), (zf, wf, xf) = _prep(sub, point, (z_field, w_field, x_field), step, cluster_tol)
    sin2 = math.sin(data.angle) ** 2
    br = sub.bracket_at(u, z_field, w_field, step=step)
    lhs = sin2 * float(br @ fd.induced_metric @ x)
    a = lambda n: sub.shape_operator(fd, n)
    rhs = float(
        (a(fd.F @ (fd.T @ wf)) @ zf - a(fd.F @ (fd.T @ zf)) @ wf) @ xf
        + (a(fd.F @ zf) @ wf - a(fd.F @ wf) @ zf) @ (fd.T @ xf)
    )
    return abs(lhs - rhs)


def foliation_d1_residual(
    sub: ImmersedSubmanifold, point, x_field, y_field, z_field,
    step: float = 1e-5, cluster_tol: float = 1e-6,
) -> float:
    """sin^2(theta) g(nabla_Y X, Z) = g(A_{FZ} phi X - A_{F T Z} X, Y)."""
    u, fd, data, (x, y, z), (xf, yf, zf) = _prep(sub, point, (x_field, y_field, z_field), step, cluster_tol)
    sin2 = math.sin(data.angle) ** 2
    nab = sub.connection_at(u, y_field, x_field, step=step)
    lhs = sin2 * float(nab @ fd.induced_metric @ z)
    a = lambda n: sub.shape_operator(fd, n)
    rhs = float((a(fd.F @ zf) @ (fd.T @ xf) - a(fd.F @ (fd.T @ zf)) @ xf) @ yf)
    return abs(lhs - rhs)


def foliation_d2_residual(
    sub: ImmersedSubmanifold, point, z_field, w_field, x_field,
    ambient_class: str = "cosymplectic",
    step: float = 1e-5, cluster_tol: float = 1e-6,
) -> float:
    """sin^2(theta) g(nabla_W Z, X) = g(A_{F T Z} X - A_{F Z} phi X, W), with
    a Reeb correction in the Kenmotsu case."""
    u, fd, data, (z, w, x), (zf, wf, xf) = _prep(sub, point, (z_field, w_field, x_field), step, cluster_tol)
    sin2 = math.sin(data.angle) ** 2
    nab = sub.connection_at(u, w_field, z_field, step=step)
    lhs = sin2 * float(nab @ fd.induced_metric @ x)
    a = lambda n: sub.shape_operator(fd, n)
    rhs = float((a(fd.F @ (fd.T @ zf)) @ xf - a(fd.F @ zf) @ (fd.T @ xf)) @ wf)
    if ambient_class == "kenmotsu":
        rhs -= sin2 * float(fd.eta_tan @ xf) * float(wf @ zf)
    return abs(lhs - rhs)


def product_criterion_residual(
    sub: ImmersedSubmanifold, fd: FrameData, data: SemiSlantPointData,
    x_coeffs, z_coeffs,
) -> float:
    """A_{F Z} phi X = A_{F T Z} X characterizes local product splittings."""
    xf = data.d1_basis @ np.asarray(x_coeffs, dtype=float)
    zf = data.d2_basis @ np.asarray(z_coeffs, dtype=float)
    lhs = sub.shape_operator(fd, fd.F @ zf) @ (fd.T @ xf)
    rhs = sub.shape_operator(fd, fd.F @ (fd.T @ zf)) @ xf
    return float(np.max(np.abs(lhs - rhs)))


def umbilicity_residuals(fd: FrameData, data: SemiSlantPointData) -> dict[str, float]:
    """Deviation from a totally umbilic shape, and the mu-part of H.

    For a totally umbilic proper pointwise semi-slant immersion the mean
    curvature has to live in F D2, so the second number must vanish
    whenever the first one does.
    """
    m = fd.tangent_dim
    h_mean = fd.mean_curvature
    deviation = fd.h_frame - np.einsum("cd,z->cdz", np.eye(m), h_mean)
    mu_part = data.mu_basis.T @ h_mean
    return {
        "umbilic_deviation": float(np.max(np.abs(deviation))),
        "mean_curvature_mu_part": float(np.max(np.abs(mu_part))) if mu_part.size else 0.0,
    }
