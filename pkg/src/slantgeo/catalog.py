"""Built-in example configurations with known expected behavior.

Each entry packages an ambient structure, an immersion, a sampling
domain and the values the analysis pipeline is expected to reproduce:
the slant or semi-slant angle as a closed-form expression in the
parameters, the position of the Reeb field, the ambient classification,
distribution dimensions, and (where applicable) a warped splitting of
the parameters with its declared warp function.

The collection covers: proper pointwise slant immersions in the flat,
Kenmotsu and rotation-field ambients; constant-angle and invariant
planes; proper pointwise semi-slant immersions with the Reeb field on
either side; warped and trivial products in each classifiable ambient;
a Sasakian product with an anti-invariant factor; and a family of
products in the mirrored orientation (invariant fiber over a slant
base), for which the warp function is provably forced constant.

Domains are open boxes shrunk by a small margin so every grid point is
interior and the angle stays strictly inside (0, pi/2) where the entry
is declared proper.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .manifest import build_ambient, build_submanifold, build_warped, normalize_manifest
from .structures import AlmostContactStructure
from .submanifold import ImmersedSubmanifold
from .warped import WarpedInstance

__all__ = ["CatalogEntry", "BuiltEntry", "list_entries", "get_entry", "build"]

_MARGIN = 1e-3
_HALF_PI_IN = 1.5707963267948966 - _MARGIN


@dataclass(frozen=True)
class CatalogEntry:
    """One named configuration and everything it is expected to satisfy."""

    id: str
    description: str
    ambient: dict
    submanifold: dict
    grid: tuple[int, ...] | int = 6
    seed: int = 0
    expected_theta: str | None = None
    expected_xi: str | None = None          # "tangent" | "normal"
    expected_class: str | None = None       # None: classification reported only
    expected_verdict: str | None = None     # semi-slant scans
    expected_dims: tuple[int, int] | None = None  # (invariant_dim, slant_dim)
    warped: dict | None = None
    orientation: str | None = None          # "allowed" | "mirrored"
    umbilic: bool = False
    notes: str = ""

    def manifest(self) -> dict:
        """The entry as a normalized run manifest."""
        expect = {}
        if self.expected_theta is not None:
            expect["theta"] = self.expected_theta
        if self.expected_xi is not None:
            expect["xi_position"] = self.expected_xi
        if self.expected_class is not None:
            expect["class"] = self.expected_class
        if self.expected_verdict is not None:
            expect["verdict"] = self.expected_verdict
        doc = {
            "manifest_version": 1,
            "ambient": self.ambient,
            "submanifold": self.submanifold,
            "sampling": {"grid": list(self.grid) if isinstance(self.grid, tuple) else self.grid,
                         "seed": self.seed},
        }
        if self.warped is not None:
            doc["warped"] = self.warped
        if expect:
            doc["expect"] = expect
        return normalize_manifest(doc)


@dataclass(frozen=True)
class BuiltEntry:
    entry: CatalogEntry
    structure: AlmostContactStructure
    sub: ImmersedSubmanifold
    warped: WarpedInstance | None = None


def _product_rotation_ambient() -> dict:
    """R^7 whose phi rotates between two anticommuting complex structures.

    On the first 4-block phi = cos(f) J1 - sin(f) J2 with an angle field
    f depending only on that block; the (y5, y6) pair carries the
    standard pairing and the Reeb field is d_t.  A plane inside the
    first block is pointwise slant with angle f, while (y5, y6) stays
    invariant, so graphs over both blocks are semi-slant without the
    ambient belonging to any of the named classes.
    """
    f = "0.3 + 0.25*sin(y1)*cos(y2)"
    j1 = ((0, -1, 0, 0), (1, 0, 0, 0), (0, 0, 0, -1), (0, 0, 1, 0))
    j2 = ((0, 0, -1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, -1, 0, 0))
    phi = [["0"] * 7 for _ in range(7)]
    for r in range(4):
        for c in range(4):
            if j1[r][c]:
                phi[r][c] = f"cos({f})" if j1[r][c] > 0 else f"-cos({f})"
            elif j2[r][c]:
                # the minus sign of the second term flips the J2 entry
                phi[r][c] = f"-sin({f})" if j2[r][c] > 0 else f"sin({f})"
    phi[5][4] = "1"
    phi[4][5] = "-1"
    coords = ["y1", "y2", "y3", "y4", "y5", "y6", "t"]
    metric = [["1" if i == j else "0" for j in range(7)] for i in range(7)]
    return {
        "custom": {
            "name": "product_rotation",
            "coords": coords,
            "metric": metric,
            "phi": phi,
            "xi": ["0"] * 6 + ["1"],
            "eta": ["0"] * 6 + ["1"],
            "domain": [[-2.0, 2.0]] * 6 + [[-1.0, 1.0]],
        }
    }


def _entries() -> tuple[CatalogEntry, ...]:
    flat2 = {"builtin": "euclidean_cosymplectic", "n": 2}
    flat3 = {"builtin": "euclidean_cosymplectic", "n": 3}
    flat4 = {"builtin": "euclidean_cosymplectic", "n": 4}
    flat5 = {"builtin": "euclidean_cosymplectic", "n": 5}
    ken2 = {"builtin": "kenmotsu_warped", "n": 2}
    ken3 = {"builtin": "kenmotsu_warped", "n": 3}
    ken5 = {"builtin": "kenmotsu_warped", "n": 5}
    sas3 = {"builtin": "sasakian_standard", "n": 3}

    # the angle-closing immersion of semislant-r11; its induced metric is the
    # warped product 2(dx1^2 + dx2^2) + (1 + x1^2 + x2^2)(dx3^2 + dx4^2)
    r11_map = [
        "x2*sin(x3)", "x1*sin(x3)",
        "x2*sin(x4)", "x1*sin(x4)",
        "x2*cos(x3)", "x1*cos(x3)",
        "x2*cos(x4)", "x1*cos(x4)",
        "x3", "x4",
    ]
    r11_domain = [[0.4, 1.1], [0.4, 1.1], [0.2, 1.0], [0.2, 1.0]]
    r11_f = "sqrt(1 + x1^2 + x2^2)"
    r11_theta = "acos(1/(x1^2 + x2^2 + 1))"

    rotation_map = ["e", "-pi", "x2", "x1", "sqrt(2)"]
    mirror_map = ["x3", "x4", "0", "cos(x1)", "x2", "sin(x1)", "0"]
    mirror_domain = [[0.2, 1.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]
    sasakian_map = ["x1", "x2", "x4", "0.3", "x5", "-0.2", "x3 + 0.3*x4 - 0.2*x5"]
    sasakian_domain = [[-1.0, 1.0]] * 5

    return (
        CatalogEntry(
            id="slant-r5-tangent",
            description="graph over a rotating circle in flat R^5, Reeb direction tangent",
            ambient=flat2,
            submanifold={
                "params": ["x1", "x2", "x3"],
                "map": ["x1", "sin(x2)", "0", "cos(x2)", "x3"],
                "domain": [[-1.0, 1.0], [_MARGIN, _HALF_PI_IN], [-0.9, 0.9]],
            },
            grid=(4, 10, 3),
            expected_theta="x2",
            expected_xi="tangent",
            # ambient classification is reported, not asserted, for this entry
            expected_class=None,
            notes="slant function equals the second parameter",
        ),
        CatalogEntry(
            id="slant-r5-normal",
            description="cylinder-like slant surface in flat R^5, Reeb direction normal",
            ambient=flat2,
            submanifold={
                "params": ["x1", "x2"],
                "map": ["0", "cos(x1)", "x2", "sin(x1)", "0"],
                "domain": [[_MARGIN, _HALF_PI_IN], [-1.0, 1.0]],
            },
            grid=(10, 10),
            expected_theta="x1",
            expected_xi="normal",
            expected_class="cosymplectic",
            notes="slant function equals the first parameter",
        ),
        CatalogEntry(
            id="slant-kenmotsu",
            description="slant surface inside the t = 0 slice of the Kenmotsu model",
            ambient=ken2,
            submanifold={
                "params": ["x1", "x2"],
                "map": ["x2", "sin(x1)", "1", "cos(x1)", "0"],
                "domain": [[_MARGIN, _HALF_PI_IN], [-1.0, 1.0]],
            },
            grid=(10, 10),
            expected_theta="x1",
            expected_xi="normal",
            expected_class="kenmotsu",
        ),
        CatalogEntry(
            id="slant-hyperkahler-complex",
            description="plane invariant under the first complex structure of a rotation field",
            ambient={"builtin": "rotation_family", "f": "0.2 + (y1 + y2)/10", "k": 1},
            submanifold={
                "params": ["x1", "x2"],
                "map": ["x1", "x2", "0", "0", "0.5"],
                "domain": [[-0.9, 0.9], [-0.9, 0.9]],
            },
            grid=(10, 10),
            expected_theta="0.2 + (x1 + x2)/10",
            expected_xi="normal",
            expected_class="none",
            notes="complex with respect to J1, slant angle = ambient rotation angle",
        ),
        CatalogEntry(
            id="slant-rotation-linear",
            description="affine plane under a linear rotation angle field",
            ambient={"builtin": "rotation_family", "f": "(y3 - y4 + 3)/6", "k": 1},
            submanifold={
                "params": ["x1", "x2"],
                "map": rotation_map,
                "domain": [[-1.0, 1.0], [-1.0, 1.0]],
            },
            grid=(10, 10),
            expected_theta="(x2 - x1 + 3)/6",
            expected_xi="normal",
            expected_class="none",
        ),
        CatalogEntry(
            id="slant-rotation-arctan",
            description="affine plane under an arctan rotation angle field",
            ambient={"builtin": "rotation_family", "f": "atan(abs(y1 + y2 + y3 + y4))", "k": 1},
            submanifold={
                "params": ["x1", "x2"],
                "map": rotation_map,
                "domain": [[0.3, 1.3], [0.3, 1.3]],
            },
            grid=(10, 10),
            expected_theta="atan(abs(e - pi + x1 + x2))",
            expected_xi="normal",
            expected_class="none",
            notes="domain keeps the absolute value away from its kink",
        ),
        CatalogEntry(
            id="slant-constant-r9",
            description="four-parameter proper slant plane at constant angle 0.4",
            ambient=flat4,
            submanifold={
                "params": ["x1", "x2", "x3", "x4"],
                "map": [
                    "x1", "cos(0.4)*x2", "sin(0.4)*x2", "0",
                    "x3", "cos(0.4)*x4", "sin(0.4)*x4", "0", "0",
                ],
                "domain": [[-1.0, 1.0]] * 4,
            },
            grid=(4, 4, 4, 4),
            expected_theta="0.4",
            expected_xi="normal",
            expected_class="cosymplectic",
            umbilic=True,
            notes="totally geodesic, so trivially totally umbilic",
        ),
        CatalogEntry(
            id="invariant-plane-r5",
            description="invariant plane in flat R^5",
            ambient=flat2,
            submanifold={
                "params": ["x1", "x2"],
                "map": ["x1", "x2", "0", "0", "0"],
                "domain": [[-1.0, 1.0], [-1.0, 1.0]],
            },
            grid=(8, 8),
            expected_theta="0",
            expected_xi="normal",
            expected_class="cosymplectic",
            expected_verdict="invariant",
            expected_dims=(2, 0),
            umbilic=True,
            notes="zero slant angle with vanishing second fundamental form",
        ),
        CatalogEntry(
            id="semislant-r11",
            description="semi-slant immersion in flat R^11 with angle closing to arccos form",
            ambient=flat5,
            submanifold={
                "params": ["x1", "x2", "x3", "x4"],
                "map": r11_map + ["0"],
                "domain": r11_domain,
            },
            grid=(4, 4, 3, 3),
            expected_theta=r11_theta,
            expected_xi="normal",
            expected_class="cosymplectic",
            expected_verdict="proper",
            expected_dims=(2, 2),
        ),
        CatalogEntry(
            id="semislant-r7",
            description="semi-slant immersion in flat R^7 with the Reeb direction tangent",
            ambient=flat3,
            submanifold={
                "params": ["x1", "x2", "x3", "x4", "x5"],
                "map": ["x3", "x1", "x5", "sin(x4)", "0", "cos(x4)", "x2"],
                "domain": [
                    [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0], [0.3, 1.2], [-1.0, 1.0],
                ],
            },
            grid=(2, 2, 2, 8, 2),
            expected_theta="x4",
            expected_xi="tangent",
            expected_class="cosymplectic",
            expected_verdict="proper",
            expected_dims=(2, 2),
            notes="invariant distribution spans two dimensions plus the Reeb direction",
        ),
        CatalogEntry(
            id="semislant-product-r7",
            description="graph over both blocks of the rotation-product ambient",
            ambient=_product_rotation_ambient(),
            submanifold={
                "params": ["x1", "x2", "x3", "x4", "x5"],
                "map": ["x1", "x2", "0", "0", "x3", "x4", "x5"],
                "domain": [
                    [-1.4, 1.4], [-1.4, 1.4], [-1.0, 1.0], [-1.0, 1.0], [-0.9, 0.9],
                ],
            },
            grid=(4, 4, 2, 2, 2),
            expected_theta="0.3 + 0.25*sin(x1)*cos(x2)",
            expected_xi="tangent",
            expected_class="none",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x3", "x4", "x5"],
                "fiber_params": ["x1", "x2"],
                "declared_f": "1",
                "anchor": [0.0, 0.0, 0.0, 0.0, 0.0],
            },
            orientation="allowed",
            notes="metric product; the ambient lies outside the named classes",
        ),
        CatalogEntry(
            id="warped-kenmotsu-tangent",
            description="invariant base with Reeb direction warped over a slant torus",
            ambient=ken3,
            submanifold={
                "params": ["x1", "x2", "x3", "x4", "x5"],
                "map": ["cos(x4)", "cos(x5)", "sin(x4)", "sin(x5)", "x2", "x3", "x1"],
                "domain": [
                    [-0.8, 0.8], [-1.0, 1.0], [-1.0, 1.0], [0.1, 0.6], [0.7, 1.2],
                ],
            },
            grid=(3, 2, 2, 4, 4),
            expected_theta="x5 - x4",
            expected_xi="tangent",
            expected_class="kenmotsu",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2", "x3"],
                "fiber_params": ["x4", "x5"],
                "declared_f": "exp(x1)",
                "anchor": [0.0, 0.0, 0.0, 0.35, 0.95],
            },
            orientation="allowed",
            notes="nontrivial warp exp(x1); induced metric is hyperbolic",
        ),
        CatalogEntry(
            id="warped-cosymplectic-tangent",
            description="angle-closing fiber warped over an invariant base plus the Reeb line",
            ambient=flat5,
            submanifold={
                "params": ["x1", "x2", "x3", "x4", "x5"],
                "map": r11_map + ["x5"],
                "domain": r11_domain + [[-0.8, 0.8]],
            },
            grid=(3, 3, 3, 3, 2),
            expected_theta=r11_theta,
            expected_xi="tangent",
            expected_class="cosymplectic",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2", "x5"],
                "fiber_params": ["x3", "x4"],
                "declared_f": r11_f,
                "anchor": [0.75, 0.75, 0.6, 0.6, 0.0],
            },
            orientation="allowed",
            notes="nontrivial warp; the slant angle varies along the base "
                  "as the closedness of the fundamental two-form forces",
        ),
        CatalogEntry(
            id="product-cosymplectic-tangent",
            description="trivial product of an invariant base and a slant torus, flat ambient",
            ambient=flat3,
            submanifold={
                "params": ["x1", "x2", "x3", "x4", "x5"],
                "map": ["x1", "x2", "cos(x4)", "cos(x5)", "sin(x4)", "sin(x5)", "x3"],
                "domain": [
                    [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0], [0.1, 0.6], [0.7, 1.2],
                ],
            },
            grid=(2, 2, 2, 4, 4),
            expected_theta="x5 - x4",
            expected_xi="tangent",
            expected_class="cosymplectic",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2", "x3"],
                "fiber_params": ["x4", "x5"],
                "declared_f": "1",
                "anchor": [0.0, 0.0, 0.0, 0.35, 0.95],
            },
            orientation="allowed",
            notes="constant warp; identity suite runs with zero warp gradient",
        ),
        CatalogEntry(
            id="warped-cosymplectic-normal",
            description="angle-closing fiber warped over an invariant base, Reeb normal",
            ambient=flat5,
            submanifold={
                "params": ["x1", "x2", "x3", "x4"],
                "map": r11_map + ["0"],
                "domain": r11_domain,
            },
            grid=(3, 3, 4, 4),
            expected_theta=r11_theta,
            expected_xi="normal",
            expected_class="cosymplectic",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2"],
                "fiber_params": ["x3", "x4"],
                "declared_f": r11_f,
                "anchor": [0.75, 0.75, 0.6, 0.6],
            },
            orientation="allowed",
            notes="same immersion as semislant-r11, declared as a warped product",
        ),
        CatalogEntry(
            id="warped-kenmotsu-normal",
            description="angle-closing warped fiber in the t = 0 slice of the Kenmotsu model",
            ambient=ken5,
            submanifold={
                "params": ["x1", "x2", "x3", "x4"],
                "map": r11_map + ["0"],
                "domain": r11_domain,
            },
            grid=(3, 3, 4, 4),
            expected_theta=r11_theta,
            expected_xi="normal",
            expected_class="kenmotsu",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2"],
                "fiber_params": ["x3", "x4"],
                "declared_f": r11_f,
                "anchor": [0.75, 0.75, 0.6, 0.6],
            },
            orientation="allowed",
            notes="second fundamental form picks up the Reeb direction of the slice",
        ),
        CatalogEntry(
            id="sasakian-product",
            description="invariant Heisenberg block times an anti-invariant horizontal plane",
            ambient=sas3,
            submanifold={
                "params": ["x1", "x2", "x3", "x4", "x5"],
                "map": sasakian_map,
                "domain": sasakian_domain,
            },
            grid=(2, 2, 2, 3, 3),
            expected_theta="pi/2",
            expected_xi="tangent",
            expected_class="sasakian",
            expected_verdict="anti_invariant",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2", "x3"],
                "fiber_params": ["x4", "x5"],
                "declared_f": "1",
                "anchor": [0.1, -0.2, 0.3, 0.2, -0.1],
            },
            orientation="allowed",
            notes="product metric; no proper Sasakian warped instance exists",
        ),
        CatalogEntry(
            id="mirror-flat-normal",
            description="invariant fiber over a slant base in flat R^7 (forbidden orientation)",
            ambient=flat3,
            submanifold={
                "params": ["x1", "x2", "x3", "x4"],
                "map": mirror_map,
                "domain": mirror_domain,
            },
            grid=(4, 2, 2, 2),
            expected_theta="x1",
            expected_xi="normal",
            expected_class="cosymplectic",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2"],
                "fiber_params": ["x3", "x4"],
                "anchor": [0.6, 0.0, 0.0, 0.0],
            },
            orientation="mirrored",
        ),
        CatalogEntry(
            id="mirror-flat-scaled",
            description="rescaled invariant fiber over a slant base (forbidden orientation)",
            ambient=flat3,
            submanifold={
                "params": ["x1", "x2", "x3", "x4"],
                "map": ["2*x3", "2*x4", "0", "cos(x1)", "x2", "sin(x1)", "0"],
                "domain": mirror_domain,
            },
            grid=(4, 2, 2, 2),
            expected_theta="x1",
            expected_xi="normal",
            expected_class="cosymplectic",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2"],
                "fiber_params": ["x3", "x4"],
                "anchor": [0.6, 0.0, 0.0, 0.0],
            },
            orientation="mirrored",
            notes="fiber block sits at a constant scale, so the warp is still trivial",
        ),
        CatalogEntry(
            id="mirror-kenmotsu-slice",
            description="forbidden orientation inside the t = 0 Kenmotsu slice",
            ambient=ken3,
            submanifold={
                "params": ["x1", "x2", "x3", "x4"],
                "map": mirror_map,
                "domain": mirror_domain,
            },
            grid=(4, 2, 2, 2),
            expected_theta="x1",
            expected_xi="normal",
            expected_class="kenmotsu",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2"],
                "fiber_params": ["x3", "x4"],
                "anchor": [0.6, 0.0, 0.0, 0.0],
            },
            orientation="mirrored",
        ),
        CatalogEntry(
            id="mirror-flat-tangent",
            description="invariant fiber holding the Reeb direction over a slant base",
            ambient=flat3,
            submanifold={
                "params": ["x1", "x2", "x3", "x4", "x5"],
                "map": ["x3", "x4", "0", "cos(x1)", "x2", "sin(x1)", "x5"],
                "domain": mirror_domain + [[-0.9, 0.9]],
            },
            grid=(4, 2, 2, 2, 2),
            expected_theta="x1",
            expected_xi="tangent",
            expected_class="cosymplectic",
            expected_verdict="proper",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x1", "x2"],
                "fiber_params": ["x3", "x4", "x5"],
                "anchor": [0.6, 0.0, 0.0, 0.0, 0.0],
            },
            orientation="mirrored",
        ),
        CatalogEntry(
            id="mirror-sasakian",
            description="the Sasakian product read in the forbidden orientation",
            ambient=sas3,
            submanifold={
                "params": ["x1", "x2", "x3", "x4", "x5"],
                "map": sasakian_map,
                "domain": sasakian_domain,
            },
            grid=(2, 2, 2, 3, 3),
            expected_theta="pi/2",
            expected_xi="tangent",
            expected_class="sasakian",
            expected_verdict="anti_invariant",
            expected_dims=(2, 2),
            warped={
                "base_params": ["x4", "x5"],
                "fiber_params": ["x1", "x2", "x3"],
                "anchor": [0.1, -0.2, 0.3, 0.2, -0.1],
            },
            orientation="mirrored",
            notes="anti-invariant base over the invariant Heisenberg fiber",
        ),
    )


@lru_cache(maxsize=1)
def _by_id() -> dict[str, CatalogEntry]:
    entries = _entries()
    out = {e.id: e for e in entries}
    if len(out) != len(entries):
        raise RuntimeError("duplicate catalog ids")
    return out


def list_entries() -> tuple[str, ...]:
    """All entry ids, in catalog order."""
    return tuple(_by_id())


def get_entry(entry_id: str) -> CatalogEntry:
    try:
        return _by_id()[entry_id]
    except KeyError:
        raise KeyError(
            f"unknown catalog entry {entry_id!r}; known ids: {', '.join(_by_id())}"
        ) from None


def build(entry_id: str) -> BuiltEntry:
    """Instantiate the structure, immersion and warp data of an entry."""
    entry = get_entry(entry_id)
    manifest = entry.manifest()
    structure = build_ambient(manifest["ambient"])
    sub = build_submanifold(manifest, structure, name=entry.id)
    warped = build_warped(manifest, sub)
    return BuiltEntry(entry=entry, structure=structure, sub=sub, warped=warped)


def entry_config(entry_id: str):
    """Verifier configuration for an entry, with its umbilic flag applied."""
    from .verify import config_from_manifest

    entry = get_entry(entry_id)
    config = config_from_manifest(entry.manifest())
    config.umbilic = entry.umbilic
    return config
