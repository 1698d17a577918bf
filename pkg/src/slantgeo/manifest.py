"""Run manifests: the JSON input contract of the command line tools.

A manifest names an ambient structure (either a built-in model by name
or a fully custom tensor triple given as expression text), optionally an
immersed submanifold, an optional warped splitting of its parameters,
and sampling/tolerance settings.  `normalize_manifest` validates the
document and fills defaults; the `build_*` helpers turn the normalized
document into live objects.  Validation failures raise `ManifestError`,
which the command line maps to its invalid-input exit code.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .charts import Box, ChartedManifold
from .exprlang import ExprError, parse, variables
from .structures import (
    AlmostContactStructure,
    euclidean_cosymplectic,
    kenmotsu_warped,
    rotation_family,
    sasakian_standard,
)
from .submanifold import ImmersedSubmanifold
from .warped import WarpedInstance

__all__ = [
    "MANIFEST_VERSION",
    "ManifestError",
    "load_manifest",
    "normalize_manifest",
    "build_ambient",
    "build_submanifold",
    "build_warped",
    "sample_grid",
]

MANIFEST_VERSION = 1

DEFAULT_TOLERANCES = {
    "residual": 1e-6,
    "eigen_cluster": 1e-6,
    "degenerate_rank": 0.01,
}
DEFAULT_GRID = 6
DEFAULT_SEED = 0

_BUILTINS = {
    "euclidean_cosymplectic": euclidean_cosymplectic,
    "kenmotsu_warped": kenmotsu_warped,
    "sasakian_standard": sasakian_standard,
    "rotation_family": rotation_family,
}

_XI_POSITIONS = ("tangent", "normal")


class ManifestError(ValueError):
    """The manifest document is malformed or inconsistent."""


def load_manifest(source) -> dict:
    """Read and normalize a manifest from a path, JSON text, or dict."""
    if isinstance(source, dict):
        return normalize_manifest(source)
    try:
        is_file = Path(str(source)).exists()
    except (OSError, ValueError):
        is_file = False
    text = Path(source).read_text(encoding="utf-8") if is_file else str(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
    return normalize_manifest(doc)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ManifestError(message)


def _parse_all(entries, names, where: str) -> list:
    out = []
    for i, entry in enumerate(entries):
        try:
            expr = parse(entry, names=names) if isinstance(entry, str) else entry
        except ExprError as exc:
            raise ManifestError(f"{where}[{i}]: {exc}") from exc
        extra = variables(expr) - set(names)
        _require(not extra, f"{where}[{i}] uses unknown names {sorted(extra)}")
        out.append(entry)
    return out


def _check_bounds(bounds, count: int, where: str) -> list[list[float]]:
    _require(isinstance(bounds, (list, tuple)), f"{where} must be a list of [lo, hi] pairs")
    _require(len(bounds) == count, f"{where} must have {count} pairs, got {len(bounds)}")
    out = []
    for i, pair in enumerate(bounds):
        _require(
            isinstance(pair, (list, tuple)) and len(pair) == 2,
            f"{where}[{i}] must be a [lo, hi] pair",
        )
        lo, hi = float(pair[0]), float(pair[1])
        _require(lo < hi, f"{where}[{i}]: lower bound must be below upper bound")
        out.append([lo, hi])
    return out


def _normalize_ambient(spec) -> dict:
    _require(isinstance(spec, dict), "ambient must be an object")
    has_builtin = "builtin" in spec
    has_custom = "custom" in spec
    _require(
        has_builtin != has_custom,
        "ambient must carry exactly one of 'builtin' or 'custom'",
    )
    if has_builtin:
        name = spec["builtin"]
        _require(name in _BUILTINS, f"unknown builtin ambient {name!r}")
        out = {"builtin": name}
        if name == "rotation_family":
            _require("f" in spec, "rotation_family requires an angle field 'f'")
            k = int(spec.get("k", 1))
            _require(k >= 1, "rotation_family needs k >= 1")
            coords = tuple(f"y{i}" for i in range(1, 4 * k + 1)) + ("t",)
            _parse_all([spec["f"]], coords, "ambient.f")
            out["f"] = spec["f"]
            out["k"] = k
        else:
            _require("n" in spec, f"builtin ambient {name!r} requires 'n'")
            n = int(spec["n"])
            _require(n >= 1, "ambient needs n >= 1")
            out["n"] = n
        for key in ("extent", "t_extent"):
            if key in spec:
                value = float(spec[key])
                _require(value > 0, f"ambient.{key} must be positive")
                out[key] = value
        return out

    custom = spec["custom"]
    _require(isinstance(custom, dict), "ambient.custom must be an object")
    coords = custom.get("coords")
    _require(
        isinstance(coords, (list, tuple)) and coords and all(isinstance(c, str) for c in coords),
        "ambient.custom.coords must be a list of names",
    )
    dim = len(coords)
    _require(dim % 2 == 1 and dim >= 3, f"ambient dimension must be odd and >= 3, got {dim}")
    _require(len(set(coords)) == dim, "ambient coordinate names must be distinct")
    metric = custom.get("metric")
    phi = custom.get("phi")
    _require(
        isinstance(metric, (list, tuple)) and len(metric) == dim
        and all(isinstance(row, (list, tuple)) and len(row) == dim for row in metric),
        f"ambient.custom.metric must be a {dim}x{dim} matrix",
    )
    _require(
        isinstance(phi, (list, tuple)) and len(phi) == dim
        and all(isinstance(row, (list, tuple)) and len(row) == dim for row in phi),
        f"ambient.custom.phi must be a {dim}x{dim} matrix",
    )
    xi = custom.get("xi")
    eta = custom.get("eta")
    _require(
        isinstance(xi, (list, tuple)) and len(xi) == dim,
        f"ambient.custom.xi must have {dim} components",
    )
    _require(
        isinstance(eta, (list, tuple)) and len(eta) == dim,
        f"ambient.custom.eta must have {dim} components",
    )
    for i, row in enumerate(metric):
        _parse_all(row, coords, f"ambient.custom.metric[{i}]")
    for i, row in enumerate(phi):
        _parse_all(row, coords, f"ambient.custom.phi[{i}]")
    _parse_all(xi, coords, "ambient.custom.xi")
    _parse_all(eta, coords, "ambient.custom.eta")
    domain = custom.get("domain", [[-2.0, 2.0]] * dim)
    out_custom = {
        "coords": list(coords),
        "metric": [list(row) for row in metric],
        "phi": [list(row) for row in phi],
        "xi": list(xi),
        "eta": list(eta),
        "domain": _check_bounds(domain, dim, "ambient.custom.domain"),
    }
    if "name" in custom:
        out_custom["name"] = str(custom["name"])
    return {"custom": out_custom}


def _ambient_dim(ambient: dict) -> int:
    if "custom" in ambient:
        return len(ambient["custom"]["coords"])
    if ambient["builtin"] == "rotation_family":
        return 4 * ambient["k"] + 1
    return 2 * ambient["n"] + 1


def _normalize_submanifold(spec, ambient_dim: int, ambient_coords) -> dict:
    _require(isinstance(spec, dict), "submanifold must be an object")
    params = spec.get("params")
    _require(
        isinstance(params, (list, tuple)) and params and all(isinstance(p, str) for p in params),
        "submanifold.params must be a list of names",
    )
    _require(len(set(params)) == len(params), "submanifold parameter names must be distinct")
    clash = set(params) & set(ambient_coords)
    _require(not clash, f"submanifold parameters shadow ambient coordinates {sorted(clash)}")
    immersion = spec.get("map")
    _require(
        isinstance(immersion, (list, tuple)) and len(immersion) == ambient_dim,
        f"submanifold.map must have {ambient_dim} components",
    )
    _parse_all(immersion, params, "submanifold.map")
    domain = _check_bounds(spec.get("domain"), len(params), "submanifold.domain")
    return {"params": list(params), "map": list(immersion), "domain": domain}


def _normalize_warped(spec, params: list[str]) -> dict:
    _require(isinstance(spec, dict), "warped must be an object")
    base = spec.get("base_params")
    fiber = spec.get("fiber_params")
    for key, block in (("base_params", base), ("fiber_params", fiber)):
        _require(
            isinstance(block, (list, tuple)) and block and all(p in params for p in block),
            f"warped.{key} must name submanifold parameters",
        )
    _require(not set(base) & set(fiber), "warped base and fiber parameters must be disjoint")
    _require(
        set(base) | set(fiber) == set(params),
        "warped base and fiber parameters must cover all parameters",
    )
    out = {"base_params": list(base), "fiber_params": list(fiber)}
    if "declared_f" in spec and spec["declared_f"] is not None:
        _parse_all([spec["declared_f"]], base, "warped.declared_f")
        out["declared_f"] = spec["declared_f"]
    if "anchor" in spec and spec["anchor"] is not None:
        anchor = spec["anchor"]
        _require(
            isinstance(anchor, (list, tuple)) and len(anchor) == len(params),
            "warped.anchor must list one value per parameter",
        )
        out["anchor"] = [float(v) for v in anchor]
    return out


def _normalize_sampling(spec, param_count: int | None) -> dict:
    spec = spec or {}
    _require(isinstance(spec, dict), "sampling must be an object")
    grid = spec.get("grid", DEFAULT_GRID)
    if isinstance(grid, (list, tuple)):
        _require(
            param_count is not None and len(grid) == param_count,
            "sampling.grid must have one count per submanifold parameter",
        )
        grid = [int(g) for g in grid]
        _require(all(g >= 1 for g in grid), "sampling.grid counts must be >= 1")
    else:
        grid = int(grid)
        _require(grid >= 1, "sampling.grid must be >= 1")
    seed = int(spec.get("seed", DEFAULT_SEED))
    _require(seed >= 0, "sampling.seed must be nonnegative")
    return {"grid": grid, "seed": seed}


def _normalize_tolerances(spec) -> dict:
    spec = spec or {}
    _require(isinstance(spec, dict), "tolerances must be an object")
    out = dict(DEFAULT_TOLERANCES)
    for key in spec:
        _require(key in DEFAULT_TOLERANCES, f"unknown tolerance {key!r}")
        value = float(spec[key])
        _require(value > 0, f"tolerances.{key} must be positive")
        out[key] = value
    return out


def _normalize_expect(spec, params) -> dict:
    spec = spec or {}
    _require(isinstance(spec, dict), "expect must be an object")
    out = {}
    if "theta" in spec and spec["theta"] is not None:
        _require(params is not None, "expect.theta needs a submanifold")
        _parse_all([spec["theta"]], params, "expect.theta")
        out["theta"] = spec["theta"]
    if "xi_position" in spec and spec["xi_position"] is not None:
        _require(
            spec["xi_position"] in _XI_POSITIONS,
            f"expect.xi_position must be one of {_XI_POSITIONS}",
        )
        out["xi_position"] = spec["xi_position"]
    for key in ("class", "verdict"):
        if key in spec and spec[key] is not None:
            _require(isinstance(spec[key], str), f"expect.{key} must be a string")
            out[key] = spec[key]
    return out


def normalize_manifest(doc) -> dict:
    """Validate a manifest document and return it with defaults filled."""
    _require(isinstance(doc, dict), "manifest must be a JSON object")
    version = doc.get("manifest_version")
    _require(
        version == MANIFEST_VERSION,
        f"manifest_version must be {MANIFEST_VERSION}, got {version!r}",
    )
    known = {
        "manifest_version", "ambient", "submanifold", "warped",
        "sampling", "tolerances", "expect",
    }
    unknown = set(doc) - known
    _require(not unknown, f"unknown manifest fields {sorted(unknown)}")
    _require("ambient" in doc, "manifest requires an ambient")

    out = {"manifest_version": MANIFEST_VERSION}
    out["ambient"] = _normalize_ambient(doc["ambient"])
    dim = _ambient_dim(out["ambient"])
    coords = (
        out["ambient"]["custom"]["coords"]
        if "custom" in out["ambient"]
        else tuple(f"y{i}" for i in range(1, dim)) + ("t",)
    )

    params = None
    if "submanifold" in doc and doc["submanifold"] is not None:
        out["submanifold"] = _normalize_submanifold(doc["submanifold"], dim, coords)
        params = out["submanifold"]["params"]

    if "warped" in doc and doc["warped"] is not None:
        _require(params is not None, "warped requires a submanifold")
        out["warped"] = _normalize_warped(doc["warped"], params)

    out["sampling"] = _normalize_sampling(doc.get("sampling"), params and len(params))
    out["tolerances"] = _normalize_tolerances(doc.get("tolerances"))
    expect = _normalize_expect(doc.get("expect"), params)
    if expect:
        out["expect"] = expect
    return out


def build_ambient(ambient: dict) -> AlmostContactStructure:
    """Instantiate the ambient structure named by a normalized manifest."""
    if "builtin" in ambient:
        kwargs = {k: ambient[k] for k in ("extent", "t_extent") if k in ambient}
        if ambient["builtin"] == "rotation_family":
            return rotation_family(ambient["f"], k=ambient["k"], **kwargs)
        return _BUILTINS[ambient["builtin"]](ambient["n"], **kwargs)
    custom = ambient["custom"]
    chart = ChartedManifold(
        tuple(custom["coords"]),
        custom["metric"],
        Box(tuple((lo, hi) for lo, hi in custom["domain"])),
    )
    return AlmostContactStructure(
        chart, custom["phi"], custom["xi"], custom["eta"],
        name=custom.get("name", "custom"),
    )


def build_submanifold(
    manifest: dict,
    structure: AlmostContactStructure | None = None,
    name: str = "",
) -> ImmersedSubmanifold:
    """Instantiate the immersion described by a normalized manifest."""
    if "submanifold" not in manifest:
        raise ManifestError("manifest has no submanifold")
    structure = structure or build_ambient(manifest["ambient"])
    spec = manifest["submanifold"]
    return ImmersedSubmanifold(
        structure,
        spec["params"],
        spec["map"],
        Box(tuple((lo, hi) for lo, hi in spec["domain"])),
        name=name,
    )


def build_warped(manifest: dict, sub: ImmersedSubmanifold) -> WarpedInstance | None:
    """Instantiate the warped splitting, if the manifest declares one."""
    if "warped" not in manifest:
        return None
    spec = manifest["warped"]
    params = manifest["submanifold"]["params"]
    base = tuple(params.index(p) for p in spec["base_params"])
    fiber = tuple(params.index(p) for p in spec["fiber_params"])
    anchor = spec.get("anchor")
    if anchor is None:
        anchor = sub.domain.center()
    return WarpedInstance(sub, base=base, fiber=fiber, anchor=tuple(anchor))


def sample_grid(manifest: dict, sub: ImmersedSubmanifold, grid=None) -> np.ndarray:
    """Parameter-grid sample points for a normalized manifest."""
    counts = grid if grid is not None else manifest["sampling"]["grid"]
    return sub.domain.grid(counts, inset=1e-3)
