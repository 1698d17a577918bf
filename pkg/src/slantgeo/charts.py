"""Coordinate charts with symbolic metrics and their curvature operators.

A `ChartedManifold` is a single chart: coordinate names, a symmetric
matrix of metric entries (expression trees over those coordinates) and a
domain box.  All metric derivatives are taken symbolically, so
Christoffel symbols, their derivatives, and the curvature tensor are
exact up to the final floating-point evaluation; no finite differencing
enters here.  Index conventions are documented per method.

`gram_schmidt` orthonormalizes vectors against an arbitrary inner
product matrix and reports the coefficients of the frame in the input
vectors, which downstream code needs to convert tensors between frames.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .exprlang import Expr, compile_exprs, differentiate, parse

__all__ = ["Box", "ChartedManifold", "RankDeficient", "gram_schmidt"]

# derivative trees are reused heavily (metric entries, scalar fields), and
# expression nodes are frozen dataclasses, hence hashable
_d = lru_cache(maxsize=None)(differentiate)


class RankDeficient(ValueError):
    """Vectors handed to gram_schmidt were linearly dependent."""


@dataclass(frozen=True)
class Box:
    """Axis-aligned parameter domain."""

    bounds: tuple[tuple[float, float], ...]

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def center(self) -> np.ndarray:
        return np.array([(lo + hi) / 2 for lo, hi in self.bounds])

    def contains(self, point) -> bool:
        return all(lo <= p <= hi for p, (lo, hi) in zip(point, self.bounds))

    def grid(self, per_axis: int | Sequence[int], inset: float = 0.0) -> np.ndarray:
        """Regular grid, `per_axis` points per coordinate, C-ordered.

        `per_axis` is a single count for every axis or one count per
        axis; a count of 1 samples the axis midpoint.  `inset` shrinks
        each axis by that fraction of its width on both ends, keeping
        samples away from domain boundaries.
        """
        counts = (
            [per_axis] * self.dim
            if isinstance(per_axis, (int, np.integer))
            else list(per_axis)
        )
        if len(counts) != self.dim:
            raise ValueError(f"expected {self.dim} axis counts, got {len(counts)}")
        axes = []
        for (lo, hi), count in zip(self.bounds, counts):
            margin = inset * (hi - lo)
            if count == 1:
                axes.append(np.array([(lo + hi) / 2]))
                continue
            axes.append(np.linspace(lo + margin, hi - margin, count))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        u = rng.uniform(size=(count, self.dim))
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return lo + u * (hi - lo)


def _as_expr(entry) -> Expr:
    return parse(entry) if isinstance(entry, str) else entry


def gram_schmidt(
    vectors: Sequence[np.ndarray],
    gram: np.ndarray,
    tol: float = 1e-10,
    on_dependent: str = "error",
):
    """Orthonormalize `vectors` under the inner product <u,v> = u' gram v.

    Returns `(frame, coeffs)` where the frame columns are orthonormal and
    frame = column_stack(vectors) @ coeffs.  A vector whose residual after
    projection falls below `tol` (relative to its own norm) either raises
    `RankDeficient` or is skipped, per `on_dependent`.
    """
    if on_dependent not in ("error", "skip"):
        raise ValueError("on_dependent must be 'error' or 'skip'")
    m = len(vectors)
    frame_cols: list[np.ndarray] = []
    coeff_cols: list[np.ndarray] = []
    for a, v in enumerate(vectors):
        w = np.asarray(v, dtype=float).copy()
        c = np.zeros(m)
        c[a] = 1.0
        scale = float(np.sqrt(max(w @ gram @ w, 0.0)))
        # modified Gram-Schmidt with one reorthogonalization pass
        for _ in range(2):
            for e, ce in zip(frame_cols, coeff_cols):
                proj = float(w @ gram @ e)
                w = w - proj * e
                c = c - proj * ce
        nrm = float(np.sqrt(max(w @ gram @ w, 0.0)))
        if nrm <= tol * max(scale, 1.0):
            if on_dependent == "error":
                raise RankDeficient(
                    f"vector {a} is linearly dependent on the preceding ones "
                    f"(residual {nrm:.3e})"
                )
            continue
        frame_cols.append(w / nrm)
        coeff_cols.append(c / nrm)
    if not frame_cols:
        dim = len(np.asarray(vectors[0])) if m else 0
        return np.zeros((dim, 0)), np.zeros((m, 0))
    return np.column_stack(frame_cols), np.column_stack(coeff_cols)


class ChartedManifold:
    """One chart of a Riemannian manifold with an exact symbolic metric."""

    def __init__(self, coords: Iterable[str], metric, domain: Box):
        self.coords = tuple(coords)
        d = len(self.coords)
        self.metric = [[_as_expr(metric[i][j]) for j in range(d)] for i in range(d)]
        self.domain = domain
        # dg[k][i][j] = d g_ij / d coord_k
        self._dg = [
            [[_d(self.metric[i][j], c) for j in range(d)] for i in range(d)]
            for c in self.coords
        ]

    @property
    def dim(self) -> int:
        return len(self.coords)

    # batched evaluation ----------------------------------------------------

    @cached_property
    def _metric_fn(self):
        return compile_exprs([e for row in self.metric for e in row], self.coords)

    @cached_property
    def _dg_fn(self):
        flat = [e for layer in self._dg for row in layer for e in row]
        return compile_exprs(flat, self.coords)

    @cached_property
    def _d2g_fn(self):
        # [i][k][a][b] = d_i d_k g_ab, symmetric in (i, k)
        d = self.dim
        table: list[list] = [[None] * d for _ in range(d)]
        for i in range(d):
            for k in range(i, d):
                entry = [
                    [_d(self._dg[k][a][b], self.coords[i]) for b in range(d)]
                    for a in range(d)
                ]
                table[i][k] = entry
                table[k][i] = entry
        flat = [
            table[i][k][a][b]
            for i in range(d)
            for k in range(d)
            for a in range(d)
            for b in range(d)
        ]
        return compile_exprs(flat, self.coords)

    def metric_many(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = self.dim
        return self._metric_fn(pts).reshape(d, d, -1).transpose(2, 0, 1)

    def metric_derivative_many(self, points: np.ndarray) -> np.ndarray:
        """dg[n,k,i,j] = (d_k g_ij) at points[n]."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = self.dim
        return self._dg_fn(pts).reshape(d, d, d, -1).transpose(3, 0, 1, 2)

    def christoffel_many(self, points: np.ndarray) -> np.ndarray:
        """gamma[n,l,j,k] = Gamma^l_jk at points[n]."""
        g = self.metric_many(points)
        ginv = np.linalg.inv(g)
        dg = self.metric_derivative_many(points)
        a = np.einsum("njkm->nmjk", dg) + np.einsum("nkjm->nmjk", dg) - dg
        return 0.5 * np.einsum("nlm,nmjk->nljk", ginv, a)

    # single-point evaluation -------------------------------------------------

    def _point(self, point) -> np.ndarray:
        return np.asarray(point, dtype=float)[None, :]

    def metric_at(self, point) -> np.ndarray:
        return self.metric_many(self._point(point))[0]

    def inverse_metric_at(self, point) -> np.ndarray:
        return np.linalg.inv(self.metric_at(point))

    def metric_derivative_at(self, point) -> np.ndarray:
        return self.metric_derivative_many(self._point(point))[0]

    def christoffel_at(self, point) -> np.ndarray:
        return self.christoffel_many(self._point(point))[0]

    def christoffel_derivative_at(self, point) -> np.ndarray:
        """dgamma[i,l,j,k] = d_i Gamma^l_jk, every derivative symbolic."""
        d = self.dim
        pts = self._point(point)
        g = self.metric_many(pts)[0]
        ginv = np.linalg.inv(g)
        dg = self.metric_derivative_many(pts)[0]
        d2g = self._d2g_fn(pts).reshape(d, d, d, d)
        a = np.einsum("jkm->mjk", dg) + np.einsum("kjm->mjk", dg) - dg
        da = (
            np.einsum("ijkm->imjk", d2g)
            + np.einsum("ikjm->imjk", d2g)
            - d2g
        )
        dginv = -np.einsum("lp,ipq,qm->ilm", ginv, dg, ginv)
        return 0.5 * np.einsum("ilm,mjk->iljk", dginv, a) + 0.5 * np.einsum(
            "lm,imjk->iljk", ginv, da
        )

    def riemann_at(self, point) -> np.ndarray:
        """riem[l,i,j,k]: R(e_i, e_j) e_k = riem[l,i,j,k] e_l."""
        gamma = self.christoffel_at(point)
        dgamma = self.christoffel_derivative_at(point)
        return (
            np.einsum("iljk->lijk", dgamma)
            - np.einsum("jlik->lijk", dgamma)
            + np.einsum("lim,mjk->lijk", gamma, gamma)
            - np.einsum("ljm,mik->lijk", gamma, gamma)
        )

    def sectional_curvature(self, point, x, y) -> float:
        """K of the plane spanned by x, y (chart components)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        g = self.metric_at(point)
        riem = self.riemann_at(point)
        rxyy = np.einsum("lijk,i,j,k->l", riem, x, y, y)
        num = float(rxyy @ g @ x)
        xx, yy, xy = float(x @ g @ x), float(y @ g @ y), float(x @ g @ y)
        den = xx * yy - xy * xy
        if abs(den) <= 1e-14 * max(1.0, abs(xx * yy)):
            raise ValueError("sectional curvature of a degenerate plane")
        return num / den

    # scalar field calculus ----------------------------------------------------

    def _env(self, point) -> dict[str, float]:
        return dict(zip(self.coords, np.asarray(point, dtype=float)))

    def gradient_at(self, point, f: Expr, raise_index: bool = True) -> np.ndarray:
        """Gradient g^{ab} d_b f, or the plain differential d_a f."""
        from .exprlang import evaluate

        env = self._env(point)
        df = np.array([evaluate(_d(f, c), env) for c in self.coords])
        if not raise_index:
            return df
        return self.inverse_metric_at(point) @ df

    def hessian_at(self, point, f: Expr) -> np.ndarray:
        """Hess_ab = d_a d_b f - Gamma^c_ab d_c f."""
        from .exprlang import evaluate

        env = self._env(point)
        d = self.dim
        df = np.array([evaluate(_d(f, c), env) for c in self.coords])
        d2f = np.array(
            [
                [evaluate(_d(_d(f, self.coords[a]), self.coords[b]), env) for b in range(d)]
                for a in range(d)
            ]
        )
        gamma = self.christoffel_at(point)
        return d2f - np.einsum("cab,c->ab", gamma, df)

    def laplacian_at(self, point, f: Expr) -> float:
        """div grad f (analyst sign: negative on sphere eigenfunctions)."""
        return float(
            np.einsum("ab,ab->", np.linalg.inv(self.metric_at(point)), self.hessian_at(point, f))
        )
