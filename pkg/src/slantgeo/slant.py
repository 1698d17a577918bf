"""Pointwise slant analysis of immersed submanifolds.

The wedge angle between phi(X) and the tangent space is read off the
restriction of phi to the eta-kernel of each tangent space: with an
orthonormal basis (w_a) of that kernel, the matrix A_ab = g(w_a, phi w_b)
is skew and A^T A is positive semidefinite with spectrum inside [0, 1].
The point is (pointwise) slant exactly when that spectrum is a single
eigenvalue lambda, and the slant function is arccos(sqrt(lambda)).

The module also carries the associated two-form Omega(X, Y) = g(X, T Y)
on coordinate fields.  On a submanifold the composition with the
immersion is an exact expression tree, so d Omega is computed by
symbolic differentiation; a finite-difference route exists purely as a
cross-check.  The top-degree form eta wedge Omega^m is evaluated on the
orthonormal frame through a Pfaffian expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from itertools import combinations

import numpy as np

from .charts import gram_schmidt
from .exprlang import Expr, add, compile_exprs, differentiate, mul, neg, parse, subst
from .submanifold import FrameData, ImmersedSubmanifold

__all__ = [
    "SlantPointData",
    "SlantScan",
    "slant_point",
    "slant_scan",
    "declared_angle_residual",
    "slant_identity_residuals",
    "shape_relation_residual",
    "omega_matrix_many",
    "domega_residual",
    "domega_fd_residual",
    "pfaffian",
    "volume_top_form",
]


@dataclass(frozen=True)
class SlantPointData:
    params: np.ndarray
    xi_position: str            # "tangent", "normal" or "oblique"
    kernel_basis: np.ndarray    # (m, m') frame coefficients spanning ker eta
    eigenvalues: np.ndarray     # spectrum of A^T A, ascending, unclipped
    angle: float
    spread: float
    is_slant: bool

    @property
    def kernel_dim(self) -> int:
        return self.kernel_basis.shape[1]


@dataclass(frozen=True)
class SlantScan:
    points: np.ndarray
    angles: np.ndarray
    spreads: np.ndarray
    eigen_low: float
    eigen_high: float
    xi_position: str            # "mixed" if it varies across the grid
    kernel_dim: int
    all_slant: bool
    constant: bool
    proper: bool

    @property
    def angle_range(self) -> tuple[float, float]:
        return float(self.angles.min()), float(self.angles.max())


def slant_point(
    sub: ImmersedSubmanifold,
    point,
    frame: FrameData | None = None,
    eigen_tol: float = 1e-9,
    xi_tol: float = 1e-10,
) -> SlantPointData:
    """Slant data of one tangent space."""
    fd = frame if frame is not None else sub.frame_at(np.asarray(point, dtype=float))
    m = fd.tangent_dim
    norm_tan = float(np.linalg.norm(fd.eta_tan))
    norm_nor = float(np.linalg.norm(fd.eta_nor))
    if norm_nor < xi_tol:
        position = "tangent"
    elif norm_tan < xi_tol:
        position = "normal"
    else:
        position = "oblique"
    if norm_tan < xi_tol:
        basis = np.eye(m)
    else:
        candidates = [fd.eta_tan / norm_tan] + list(np.eye(m))
        ortho, _ = gram_schmidt(candidates, np.eye(m), on_dependent="skip")
        basis = ortho[:, 1:]
    if basis.shape[1] == 0:
        raise ValueError("the eta-kernel of the tangent space is zero-dimensional")
    a = basis.T @ fd.T @ basis
    lam = np.linalg.eigvalsh(a.T @ a)
    spread = float(lam[-1] - lam[0])
    mean = min(max(float(lam.mean()), 0.0), 1.0)
    return SlantPointData(
        params=fd.params,
        xi_position=position,
        kernel_basis=basis,
        eigenvalues=lam,
        angle=math.acos(math.sqrt(mean)),
        spread=spread,
        is_slant=spread <= eigen_tol,
    )


def slant_scan(
    sub: ImmersedSubmanifold,
    points,
    eigen_tol: float = 1e-9,
    const_tol: float = 1e-8,
    proper_margin: float = 1e-6,
) -> SlantScan:
    """Slant data over a batch of parameter points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    samples = [slant_point(sub, u, eigen_tol=eigen_tol) for u in points]
    angles = np.array([s.angle for s in samples])
    spreads = np.array([s.spread for s in samples])
    positions = {s.xi_position for s in samples}
    all_slant = bool(all(s.is_slant for s in samples))
    lo, hi = float(angles.min()), float(angles.max())
    return SlantScan(
        points=points,
        angles=angles,
        spreads=spreads,
        eigen_low=float(min(s.eigenvalues[0] for s in samples)),
        eigen_high=float(max(s.eigenvalues[-1] for s in samples)),
        xi_position=positions.pop() if len(positions) == 1 else "mixed",
        kernel_dim=samples[0].kernel_dim,
        all_slant=all_slant,
        constant=all_slant and hi - lo <= const_tol,
        proper=all_slant and lo > proper_margin and hi < math.pi / 2 - proper_margin,
    )


def declared_angle_residual(sub: ImmersedSubmanifold, points, angle_expr) -> float:
    """Largest gap between the measured angle and a declared angle expression."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(angle_expr, str):
        angle_expr = parse(angle_expr, names=sub.params)
    declared = compile_exprs([angle_expr], list(sub.params))(points)[0]
    measured = np.array([slant_point(sub, u).angle for u in points])
    return float(np.max(np.abs(measured - declared)))


def slant_identity_residuals(fd: FrameData, data: SlantPointData) -> dict[str, float]:
    """g(TX, TY) = cos^2(theta) g(X, Y) and g(FX, FY) = sin^2(theta) g(X, Y)."""
    basis = data.kernel_basis
    tb = fd.T @ basis
    fb = fd.F @ basis
    eye = np.eye(basis.shape[1])
    cos2 = math.cos(data.angle) ** 2
    return {
        "tangent_part": float(np.max(np.abs(tb.T @ tb - cos2 * eye))),
        "normal_part": float(np.max(np.abs(fb.T @ fb - (1.0 - cos2) * eye))),
    }


def shape_relation_residual(
    sub: ImmersedSubmanifold, fd: FrameData, data: SlantPointData, coeffs
) -> float:
    """A_{FX} TX = A_{F TX} X, valid for constant-angle slant submanifolds."""
    x = data.kernel_basis @ np.asarray(coeffs, dtype=float)
    tx = fd.T @ x
    lhs = sub.shape_operator(fd, fd.F @ x) @ tx
    rhs = sub.shape_operator(fd, fd.F @ tx) @ x
    return float(np.max(np.abs(lhs - rhs)))


# associated two-form ----------------------------------------------------------


def _omega_cache(sub: ImmersedSubmanifold) -> dict:
    cache = getattr(sub, "_omega_forms", None)
    if cache is not None:
        return cache
    m = sub.param_dim
    d = sub.ambient_dim
    composed = dict(zip(sub.ambient.chart.coords, sub.immersion))
    comp = lambda e: subst(e, composed)
    total = lambda terms: reduce(add, terms)
    metric = [[comp(sub.ambient.chart.metric[k][l]) for l in range(d)] for k in range(d)]
    phi = [[comp(sub.ambient.phi[k][l]) for l in range(d)] for k in range(d)]
    jac = sub._jac_sym
    # phi applied to coordinate fields, then lowered and contracted
    phi_j = [[total(mul(phi[l][k], jac[k][b]) for k in range(d)) for b in range(m)]
             for l in range(d)]
    low = [[total(mul(metric[k][l], phi_j[l][b]) for l in range(d)) for b in range(m)]
           for k in range(d)]
    pairs = list(combinations(range(m), 2))
    omega = {}
    for a, b in pairs:
        omega[(a, b)] = total(mul(jac[k][a], low[k][b]) for k in range(d))
    triples = list(combinations(range(m), 3))
    domega = []
    for a, b, c in triples:
        domega.append(
            add(
                add(
                    differentiate(omega[(b, c)], sub.params[a]),
                    neg(differentiate(omega[(a, c)], sub.params[b])),
                ),
                differentiate(omega[(a, b)], sub.params[c]),
            )
        )
    cache = {
        "pairs": pairs,
        "triples": triples,
        "omega_fn": compile_exprs([omega[p] for p in pairs], list(sub.params)),
        "domega_fn": compile_exprs(domega, list(sub.params)) if triples else None,
    }
    sub._omega_forms = cache
    return cache


def omega_matrix_many(sub: ImmersedSubmanifold, points) -> np.ndarray:
    """Omega(d_a, d_b) on coordinate fields, one skew matrix per point."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    cache = _omega_cache(sub)
    vals = cache["omega_fn"](points)
    m = sub.param_dim
    out = np.zeros((points.shape[0], m, m))
    for (a, b), row in zip(cache["pairs"], vals):
        out[:, a, b] = row
        out[:, b, a] = -row
    return out


def domega_residual(sub: ImmersedSubmanifold, points) -> float:
    """Largest component of d Omega over the points, by exact differentiation."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    cache = _omega_cache(sub)
    if cache["domega_fn"] is None:
        return 0.0
    return float(np.max(np.abs(cache["domega_fn"](points))))


def domega_fd_residual(sub: ImmersedSubmanifold, points, step: float = 1e-5) -> float:
    """Gap between the finite-difference and symbolic routes to d Omega."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    cache = _omega_cache(sub)
    if cache["domega_fn"] is None:
        return 0.0
    symbolic = np.asarray(cache["domega_fn"](points))
    m = sub.param_dim
    index = {pair: i for i, pair in enumerate(cache["pairs"])}

    def omega_entry(pts, a, b):
        vals = cache["omega_fn"](pts)
        return vals[index[(a, b)]]

    worst = 0.0
    for t, (a, b, c) in enumerate(cache["triples"]):
        fd_val = np.zeros(points.shape[0])
        for sign, direction, pair in ((1, a, (b, c)), (-1, b, (a, c)), (1, c, (a, b))):
            shift = np.zeros(m)
            shift[direction] = step
            diff = omega_entry(points + shift, *pair) - omega_entry(points - shift, *pair)
            fd_val += sign * diff / (2 * step)
        worst = max(worst, float(np.max(np.abs(fd_val - symbolic[t]))))
    return worst


# top-degree form --------------------------------------------------------------


def pfaffian(b: np.ndarray) -> float:
    """Pfaffian of a skew matrix by expansion along the first row."""
    n = b.shape[0]
    if n % 2 == 1:
        return 0.0
    if n == 0:
        return 1.0
    total = 0.0
    for j in range(1, n):
        minor = np.delete(np.delete(b, (0, j), axis=0), (0, j), axis=1)
        sign = 1.0 if j % 2 == 1 else -1.0
        total += sign * float(b[0, j]) * pfaffian(minor)
    return total


def volume_top_form(fd: FrameData) -> float:
    """(eta wedge Omega^m) evaluated on the orthonormal tangent frame.

    Here 2m + 1 is the tangent dimension.  On a slant space with tangent
    Reeb field the coefficient equals cos(theta)^m up to sign, so its
    nonvanishing certifies a proper angle.
    """
    m = fd.tangent_dim
    if m % 2 == 0:
        raise ValueError("the top form lives in odd dimensions")
    half = (m - 1) // 2
    total = 0.0
    for i in range(m):
        keep = [j for j in range(m) if j != i]
        minor = fd.T[np.ix_(keep, keep)]
        total += (-1.0) ** i * fd.eta_tan[i] * pfaffian(minor)
    return math.factorial(half) * total
