"""Almost contact metric structures and their classification.

A structure is a chart plus the tensor triple (phi, xi, eta): an
endomorphism field phi[k][j] (phi(d_j) = phi^k_j d_k), a Reeb vector
field and its dual one-form, all as expression trees over the chart
coordinates.  The class computes, on batches of points:

* the defining axioms (phi^2 = -I + eta (x) xi, compatibility with g),
* the fundamental two-form Phi(X, Y) = g(X, phi Y) and d eta,
* the Nijenhuis torsion and the normality residual,
* the covariant derivatives of phi and xi,
* residuals against the cosymplectic / Sasakian / Kenmotsu model
  equations, which is what `classify` reports.

d eta carries a convention choice: "half" means
d eta(X,Y) = (X eta(Y) - Y eta(X)) / 2, "full" drops the half.  The
half convention is the one under which the standard Sasakian structure
satisfies Phi = d eta, and is the default everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .charts import Box, ChartedManifold
from .exprlang import Call, Expr, add, compile_exprs, const, differentiate, mul, neg, parse

__all__ = [
    "AlmostContactStructure",
    "ClassificationResult",
    "euclidean_cosymplectic",
    "kenmotsu_warped",
    "sasakian_standard",
    "rotation_family",
    "conformal_rescale",
    "CLASS_NAMES",
]

CLASS_NAMES = ("cosymplectic", "sasakian", "kenmotsu")

_d = lru_cache(maxsize=None)(differentiate)


@dataclass(frozen=True)
class ClassificationResult:
    verdict: str
    residuals: dict[str, float]
    tol: float


@dataclass
class AlmostContactStructure:
    chart: ChartedManifold
    phi: list  # phi[k][j] = component k of phi(d_j)
    xi: list
    eta: list
    name: str = ""

    def __post_init__(self):
        d = self.chart.dim
        norm = lambda e: parse(e) if isinstance(e, str) else e
        self.phi = [[norm(self.phi[k][j]) for j in range(d)] for k in range(d)]
        self.xi = [norm(e) for e in self.xi]
        self.eta = [norm(e) for e in self.eta]

    @property
    def dim(self) -> int:
        return self.chart.dim

    # compiled field evaluators ----------------------------------------------

    @cached_property
    def _phi_fn(self):
        return compile_exprs([e for row in self.phi for e in row], self.chart.coords)

    @cached_property
    def _xi_fn(self):
        return compile_exprs(self.xi, self.chart.coords)

    @cached_property
    def _eta_fn(self):
        return compile_exprs(self.eta, self.chart.coords)

    @cached_property
    def _dphi_fn(self):
        d = self.dim
        flat = [
            _d(self.phi[k][j], c)
            for c in self.chart.coords
            for k in range(d)
            for j in range(d)
        ]
        return compile_exprs(flat, self.chart.coords)

    @cached_property
    def _deta_fn(self):
        flat = [_d(e, c) for c in self.chart.coords for e in self.eta]
        return compile_exprs(flat, self.chart.coords)

    @cached_property
    def _dxi_fn(self):
        flat = [_d(e, c) for c in self.chart.coords for e in self.xi]
        return compile_exprs(flat, self.chart.coords)

    @cached_property
    def _phi_form_sym(self):
        # Phi_ij = g(d_i, phi d_j) = sum_k g_ik phi^k_j, symbolically
        d = self.dim
        g = self.chart.metric
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                acc: Expr = const(0.0)
                for k in range(d):
                    acc = add(acc, mul(g[i][k], self.phi[k][j]))
                row.append(acc)
            out.append(row)
        return out

    @cached_property
    def _dphi_form_fn(self):
        d = self.dim
        form = self._phi_form_sym
        flat = [
            _d(form[i][j], c) for c in self.chart.coords for i in range(d) for j in range(d)
        ]
        return compile_exprs(flat, self.chart.coords)

    # batched field values ------------------------------------------------------

    def _pts(self, points) -> np.ndarray:
        return np.atleast_2d(np.asarray(points, dtype=float))

    def phi_many(self, points) -> np.ndarray:
        pts = self._pts(points)
        d = self.dim
        return self._phi_fn(pts).reshape(d, d, -1).transpose(2, 0, 1)

    def xi_many(self, points) -> np.ndarray:
        return self._xi_fn(self._pts(points)).T

    def eta_many(self, points) -> np.ndarray:
        return self._eta_fn(self._pts(points)).T

    def dphi_many(self, points) -> np.ndarray:
        """dphi[n,i,k,j] = d_i phi^k_j."""
        pts = self._pts(points)
        d = self.dim
        return self._dphi_fn(pts).reshape(d, d, d, -1).transpose(3, 0, 1, 2)

    def deta_many(self, points) -> np.ndarray:
        """deta[n,i,j] = d_i eta_j (no antisymmetrization)."""
        pts = self._pts(points)
        d = self.dim
        return self._deta_fn(pts).reshape(d, d, -1).transpose(2, 0, 1)

    def dxi_many(self, points) -> np.ndarray:
        pts = self._pts(points)
        d = self.dim
        return self._dxi_fn(pts).reshape(d, d, -1).transpose(2, 0, 1)

    # structural residuals -------------------------------------------------------

    def axiom_residuals(self, points) -> dict[str, float]:
        pts = self._pts(points)
        d = self.dim
        g = self.chart.metric_many(pts)
        phi = self.phi_many(pts)
        xi = self.xi_many(pts)
        eta = self.eta_many(pts)
        eye = np.eye(d)
        phi2 = np.einsum("nkm,nmj->nkj", phi, phi)
        mx = lambda a: float(np.max(np.abs(a)))
        return {
            "phi_squared": mx(phi2 + eye - np.einsum("nk,nj->nkj", xi, eta)),
            "phi_xi": mx(np.einsum("nkj,nj->nk", phi, xi)),
            "eta_phi": mx(np.einsum("nk,nkj->nj", eta, phi)),
            "eta_xi": mx(np.einsum("nk,nk->n", eta, xi) - 1.0),
            "metric_compat": mx(
                np.einsum("nki,nkl,nlj->nij", phi, g, phi)
                - g
                + np.einsum("ni,nj->nij", eta, eta)
            ),
            "eta_is_g_xi": mx(eta - np.einsum("nij,nj->ni", g, xi)),
        }

    def fundamental_form_many(self, points) -> np.ndarray:
        pts = self._pts(points)
        g = self.chart.metric_many(pts)
        return np.einsum("nik,nkj->nij", g, self.phi_many(pts))

    def exterior_deta_many(self, points, convention: str = "half") -> np.ndarray:
        if convention not in ("half", "full"):
            raise ValueError("convention must be 'half' or 'full'")
        deta = self.deta_many(points)
        anti = deta - np.swapaxes(deta, 1, 2)
        return 0.5 * anti if convention == "half" else anti

    def contact_metric_residual(self, points, convention: str = "half") -> float:
        res = self.fundamental_form_many(points) - self.exterior_deta_many(
            points, convention
        )
        return float(np.max(np.abs(res)))

    def closedness_residuals(self, points) -> dict[str, float]:
        """Exterior derivatives of Phi and eta (zero iff closed)."""
        pts = self._pts(points)
        d = self.dim
        dform = self._dphi_form_fn(pts).reshape(d, d, d, -1).transpose(3, 0, 1, 2)
        dphi3 = (
            dform
            - np.einsum("nilj->nlij", dform)
            + np.einsum("njli->nlij", dform)
        )
        deta = self.deta_many(pts)
        return {
            "dphi": float(np.max(np.abs(dphi3))),
            "deta": float(np.max(np.abs(deta - np.swapaxes(deta, 1, 2)))),
        }

    def nijenhuis_many(self, points) -> np.ndarray:
        """N[n,k,i,j]: torsion of phi on coordinate fields."""
        phi = self.phi_many(points)
        dphi = self.dphi_many(points)
        t1 = np.einsum("nmi,nmkj->nkij", phi, dphi)
        t3 = np.einsum("nkm,njmi->nkij", phi, dphi)
        return t1 - np.swapaxes(t1, 2, 3) + t3 - np.swapaxes(t3, 2, 3)

    def normality_residual(self, points) -> float:
        """max |N + 2 d eta (x) xi| (half convention built in)."""
        n = self.nijenhuis_many(points)
        deta = self.deta_many(points)
        anti = deta - np.swapaxes(deta, 1, 2)
        res = n + np.einsum("nij,nk->nkij", anti, self.xi_many(points))
        return float(np.max(np.abs(res)))

    # covariant derivatives -------------------------------------------------------

    def nabla_phi_many(self, points) -> np.ndarray:
        """np[n,i,k,j] = component k of (nabla_{d_i} phi)(d_j)."""
        pts = self._pts(points)
        gamma = self.chart.christoffel_many(pts)
        phi = self.phi_many(pts)
        return (
            self.dphi_many(pts)
            + np.einsum("nkim,nmj->nikj", gamma, phi)
            - np.einsum("nmij,nkm->nikj", gamma, phi)
        )

    def nabla_xi_many(self, points) -> np.ndarray:
        """nx[n,i,k] = component k of nabla_{d_i} xi."""
        pts = self._pts(points)
        gamma = self.chart.christoffel_many(pts)
        return self.dxi_many(pts) + np.einsum("nkim,nm->nik", gamma, self.xi_many(pts))

    # classification ---------------------------------------------------------------

    def class_residuals(self, points) -> dict[str, float]:
        pts = self._pts(points)
        d = self.dim
        g = self.chart.metric_many(pts)
        phi = self.phi_many(pts)
        xi = self.xi_many(pts)
        eta = self.eta_many(pts)
        napw = self.nabla_phi_many(pts)
        naxi = self.nabla_xi_many(pts)
        eye = np.eye(d)
        mx = lambda a: float(np.max(np.abs(a)))

        sas_target = np.einsum("nij,nk->nikj", g, xi) - np.einsum(
            "nj,ki->nikj", eta, eye
        )
        gphi = np.einsum("nmi,nmj->nij", phi, g)  # g(phi d_i, d_j)
        ken_target = np.einsum("nij,nk->nikj", gphi, xi) - np.einsum(
            "nj,nki->nikj", eta, phi
        )
        return {
            "cosymplectic": mx(napw),
            "cosymplectic_xi": mx(naxi),
            "sasakian": mx(napw - sas_target),
            "sasakian_xi": mx(naxi + np.einsum("nki->nik", phi)),
            "kenmotsu": mx(napw - ken_target),
            "kenmotsu_xi": mx(naxi - eye + np.einsum("ni,nk->nik", eta, xi)),
        }

    def classify(self, points, tol: float = 1e-8) -> ClassificationResult:
        res = self.class_residuals(points)
        hits = [
            cls for cls in CLASS_NAMES if max(res[cls], res[cls + "_xi"]) < tol
        ]
        if len(hits) == 1:
            verdict = hits[0]
        elif not hits:
            verdict = "none"
        else:
            verdict = "ambiguous"
        return ClassificationResult(verdict=verdict, residuals=res, tol=tol)


# built-in model structures ---------------------------------------------------


def _ambient_coords(n: int) -> tuple[str, ...]:
    return tuple(f"y{i}" for i in range(1, 2 * n + 1)) + ("t",)


def _ambient_box(n: int, extent: float, t_extent: float) -> Box:
    return Box(((-extent, extent),) * (2 * n) + ((-t_extent, t_extent),))


def _pairing_phi(n: int) -> list[list[str]]:
    """phi(d_{2a}) = d_{2a+1}, phi(d_{2a+1}) = -d_{2a} on y-pairs, phi(d_t)=0."""
    d = 2 * n + 1
    phi = [["0"] * d for _ in range(d)]
    for a in range(n):
        phi[2 * a + 1][2 * a] = "1"
        phi[2 * a][2 * a + 1] = "-1"
    return phi


def euclidean_cosymplectic(n: int, extent: float = 2.0, t_extent: float = 1.0) -> AlmostContactStructure:
    """Flat product structure on R^(2n+1): identity metric, Reeb field d_t."""
    d = 2 * n + 1
    metric = [["1" if i == j else "0" for j in range(d)] for i in range(d)]
    chart = ChartedManifold(_ambient_coords(n), metric, _ambient_box(n, extent, t_extent))
    xi = ["0"] * (d - 1) + ["1"]
    eta = ["0"] * (d - 1) + ["1"]
    return AlmostContactStructure(
        chart, _pairing_phi(n), xi, eta, name=f"euclidean_cosymplectic({n})"
    )


def kenmotsu_warped(n: int, extent: float = 2.0, t_extent: float = 1.0) -> AlmostContactStructure:
    """Line exponentially warping flat C^n: the model Kenmotsu structure."""
    d = 2 * n + 1
    metric = [["0"] * d for _ in range(d)]
    for i in range(2 * n):
        metric[i][i] = "exp(2*t)"
    metric[d - 1][d - 1] = "1"
    chart = ChartedManifold(_ambient_coords(n), metric, _ambient_box(n, extent, t_extent))
    xi = ["0"] * (d - 1) + ["1"]
    eta = ["0"] * (d - 1) + ["1"]
    return AlmostContactStructure(
        chart, _pairing_phi(n), xi, eta, name=f"kenmotsu_warped({n})"
    )


def sasakian_standard(n: int, extent: float = 2.0, t_extent: float = 1.0) -> AlmostContactStructure:
    """The standard Sasakian structure on R^(2n+1).

    eta = (dt - sum_a y_{2a+2} dy_{2a+1})/2, xi = 2 d_t,
    g = eta (x) eta + (sum_i dy_i^2)/4.
    """
    d = 2 * n + 1
    t = d - 1
    metric = [["0"] * d for _ in range(d)]
    phi = [["0"] * d for _ in range(d)]
    xi = ["0"] * d
    eta = ["0"] * d
    xi[t] = "2"
    eta[t] = "1/2"
    metric[t][t] = "1/4"
    for a in range(n):
        io, ie = 2 * a, 2 * a + 1  # odd/even coordinate of pair a (0-based)
        ye = f"y{2 * a + 2}"
        eta[io] = f"-{ye}/2"
        metric[io][t] = metric[t][io] = f"-{ye}/4"
        metric[ie][ie] = "1/4"
        phi[ie][io] = "-1"
        phi[io][ie] = "1"
        phi[t][ie] = ye
        for b in range(n):
            je = f"y{2 * b + 2}"
            entry = f"{ye}*{je}/4"
            if a == b:
                entry += " + 1/4"
            metric[io][2 * b] = entry
    chart = ChartedManifold(_ambient_coords(n), metric, _ambient_box(n, extent, t_extent))
    return AlmostContactStructure(chart, phi, xi, eta, name=f"sasakian_standard({n})")


# two anticommuting orthogonal complex structures on R^4
_J1 = (
    (0, -1, 0, 0),
    (1, 0, 0, 0),
    (0, 0, 0, -1),
    (0, 0, 1, 0),
)
_J2 = (
    (0, 0, -1, 0),
    (0, 0, 0, 1),
    (1, 0, 0, 0),
    (0, -1, 0, 0),
)


def rotation_family(f, k: int = 1, extent: float = 2.0, t_extent: float = 1.0) -> AlmostContactStructure:
    """Euclidean R^(4k+1) with phi = cos(f) J1 - sin(f) J2 on each 4-block.

    J1 and J2 anticommute and are orthogonal, so phi is an almost contact
    metric structure for any angle field f; a nonconstant f leaves every
    named class (the structure is not even normal).
    """
    f = parse(f) if isinstance(f, str) else f
    d = 4 * k + 1
    coords = tuple(f"y{i}" for i in range(1, 4 * k + 1)) + ("t",)
    metric = [["1" if i == j else "0" for j in range(d)] for i in range(d)]
    chart = ChartedManifold(coords, metric, Box(((-extent, extent),) * (4 * k) + ((-t_extent, t_extent),)))
    phi: list[list[Expr]] = [[const(0.0)] * d for _ in range(d)]
    for b in range(k):
        o = 4 * b
        for r in range(4):
            for c in range(4):
                entry = add(
                    mul(Call("cos", f), const(_J1[r][c])),
                    neg(mul(Call("sin", f), const(_J2[r][c]))),
                )
                phi[o + r][o + c] = entry
    xi = ["0"] * (d - 1) + ["1"]
    eta = ["0"] * (d - 1) + ["1"]
    return AlmostContactStructure(chart, phi, xi, eta, name=f"rotation_family(k={k})")


def conformal_rescale(structure: AlmostContactStructure, f) -> AlmostContactStructure:
    """Deform (phi, xi, eta, g) into (phi, e^-f xi, e^f eta, e^2f g).

    The deformed tuple satisfies the same axioms for any smooth f, and
    leaves slant angles of immersed submanifolds unchanged.
    """
    f = parse(f, names=structure.chart.coords) if isinstance(f, str) else f
    ef = Call("exp", f)
    emf = Call("exp", neg(f))
    e2f = Call("exp", mul(const(2.0), f))
    chart = structure.chart
    metric = [[mul(e2f, chart.metric[i][j]) for j in range(chart.dim)] for i in range(chart.dim)]
    rescaled = ChartedManifold(chart.coords, metric, chart.domain)
    return AlmostContactStructure(
        rescaled,
        [row[:] for row in structure.phi],
        [mul(emf, c) for c in structure.xi],
        [mul(ef, c) for c in structure.eta],
        name=f"{structure.name}|conformal" if structure.name else "conformal",
    )
