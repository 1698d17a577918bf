"""Manifest-driven command line front end.

Subcommands take a manifest (a JSON file path or inline JSON) and emit
one deterministic report on stdout: classification of the ambient
structure, the slant or semi-slant pipeline over the sampled grid, or a
named verification suite.  `example` runs any of those on a catalog
entry by id.

Exit codes: 0 success (or all checks passed / skipped as vacuous),
1 a check or declared expectation failed, 2 the manifest or arguments
are invalid, 3 too many grid points were numerically degenerate.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile

import numpy as np

from .catalog import get_entry, list_entries
from .charts import RankDeficient
from .manifest import ManifestError, build_ambient, build_submanifold, load_manifest, sample_grid
from .report import build_report, canonical_json, manifest_digest, render_text
from .semislant import declared_semi_slant_residual, semi_slant_point
from .slant import declared_angle_residual, slant_point
from .verify import SUITES, config_from_manifest, run_suite

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_DEGENERATE = 3


def _degrees(value: float) -> float:
    return math.degrees(value) if not math.isnan(value) else float("nan")


def _parse_grid(text: str) -> int | list[int]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        counts = [int(p) for p in parts]
    except ValueError as exc:
        raise ManifestError(f"--grid expects an integer or a comma list: {text!r}") from exc
    if not counts or any(c < 1 for c in counts):
        raise ManifestError(f"--grid counts must be positive: {text!r}")
    return counts[0] if len(counts) == 1 else counts


def _apply_overrides(manifest: dict, args) -> dict:
    if args.grid is not None:
        manifest["sampling"]["grid"] = _parse_grid(args.grid)
    if args.seed is not None:
        manifest["sampling"]["seed"] = int(args.seed)
    if args.tol is not None:
        manifest["tolerances"]["residual"] = float(args.tol)
    return load_manifest(manifest)


def _emit(report: dict, args) -> None:
    text = canonical_json(report) if args.format == "json" else render_text(report)
    data = text.encode("utf-8")
    if args.out:
        directory = os.path.dirname(os.path.abspath(args.out))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp, args.out)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _ambient_summary(manifest: dict) -> dict:
    ambient = manifest["ambient"]
    if "builtin" in ambient:
        spec = {k: v for k, v in ambient.items() if k != "builtin"}
        spec["kind"] = "builtin"
        spec["name"] = ambient["builtin"]
        return spec
    custom = ambient["custom"]
    return {"kind": "custom", "name": custom.get("name", "custom"),
            "dim": len(custom["coords"])}


# command payloads --------------------------------------------------------------

def _cmd_classify(manifest: dict) -> tuple[dict, int]:
    structure = build_ambient(manifest["ambient"])
    rng = np.random.default_rng(int(manifest["sampling"]["seed"]))
    points = structure.chart.domain.sample(200, rng)
    axioms = structure.axiom_residuals(points)
    result = structure.classify(points)
    payload = {
        "ambient": _ambient_summary(manifest),
        "axiom_residuals": axioms,
        "class": result.verdict,
        "class_residuals": result.residuals,
        "sample_count": int(points.shape[0]),
        "tolerance": result.tol,
    }
    code = EXIT_PASS
    expected = (manifest.get("expect") or {}).get("class")
    if expected is not None:
        payload["expected_class"] = expected
        payload["class_matches"] = result.verdict == expected
        if not payload["class_matches"]:
            code = EXIT_FAIL
    return payload, code


def _scan_points(manifest: dict, sub, analyze) -> tuple[list, list, int]:
    """Run one per-point analyzer over the grid, tolerating rank drops."""
    points = sample_grid(manifest, sub)
    samples, kept = [], []
    degenerate = 0
    for u in points:
        try:
            samples.append(analyze(u))
            kept.append(u)
        except RankDeficient:
            degenerate += 1
    return samples, kept, degenerate


def _degeneracy_code(manifest: dict, degenerate: int, total: int) -> int | None:
    fraction = degenerate / total if total else 1.0
    if fraction > float(manifest["tolerances"]["degenerate_rank"]):
        return EXIT_DEGENERATE
    return None


def _cmd_slant(manifest: dict) -> tuple[dict, int]:
    structure = build_ambient(manifest["ambient"])
    sub = build_submanifold(manifest, structure)
    samples, kept, degenerate = _scan_points(
        manifest, sub, lambda u: slant_point(sub, u))
    total = len(samples) + degenerate
    field = [
        {
            "params": list(map(float, s.params)),
            "angle": s.angle,
            "angle_degrees": _degrees(s.angle),
            "spread": s.spread,
            "xi_position": s.xi_position,
            "is_slant": bool(s.is_slant),
        }
        for s in samples
    ]
    angles = np.array([s.angle for s in samples])
    finite = angles[~np.isnan(angles)] if angles.size else angles
    lo = float(finite.min()) if finite.size else float("nan")
    hi = float(finite.max()) if finite.size else float("nan")
    positions = sorted({s.xi_position for s in samples})
    all_slant = bool(samples) and all(s.is_slant for s in samples)
    payload = {
        "ambient": _ambient_summary(manifest),
        "samples": field,
        "summary": {
            "verdict": "pointwise-slant" if all_slant else "not-pointwise-slant",
            "angle_min": lo,
            "angle_max": hi,
            "angle_min_degrees": _degrees(lo),
            "angle_max_degrees": _degrees(hi),
            "xi_position": positions[0] if len(positions) == 1 else "mixed",
            "grid_points": total,
            "degenerate_points": degenerate,
        },
    }
    code = EXIT_PASS if all_slant else EXIT_FAIL
    expect = manifest.get("expect") or {}
    if expect.get("theta") is not None and samples:
        deviation = declared_angle_residual(sub, np.array(kept), expect["theta"])
        payload["summary"]["expected_theta_deviation"] = deviation
        if deviation > float(manifest["tolerances"]["residual"]):
            code = EXIT_FAIL
    if expect.get("xi_position") is not None:
        matches = payload["summary"]["xi_position"] == expect["xi_position"]
        payload["summary"]["xi_position_matches"] = matches
        if not matches:
            code = EXIT_FAIL
    return payload, _degeneracy_code(manifest, degenerate, total) or code


def _cmd_semislant(manifest: dict) -> tuple[dict, int]:
    structure = build_ambient(manifest["ambient"])
    sub = build_submanifold(manifest, structure)
    cluster_tol = float(manifest["tolerances"]["eigen_cluster"])
    samples, kept, degenerate = _scan_points(
        manifest, sub, lambda u: semi_slant_point(sub, u, cluster_tol=cluster_tol))
    total = len(samples) + degenerate
    field = [
        {
            "params": list(map(float, s.params)),
            "verdict": s.verdict,
            "angle": s.angle,
            "angle_degrees": _degrees(s.angle),
            "invariant_dim": int(s.invariant_dim),
            "slant_dim": int(s.slant_dim),
            "mu_dim": int(s.mu_dim),
            "xi_position": s.xi_position,
        }
        for s in samples
    ]
    verdicts = sorted({s.verdict for s in samples})
    positions = sorted({s.xi_position for s in samples})
    angles = np.array([s.angle for s in samples])
    finite = angles[~np.isnan(angles)] if angles.size else angles
    payload = {
        "ambient": _ambient_summary(manifest),
        "samples": field,
        "summary": {
            "verdict": verdicts[0] if len(verdicts) == 1 else "mixed",
            "invariant_dim": int(samples[0].invariant_dim) if samples else 0,
            "slant_dim": int(samples[0].slant_dim) if samples else 0,
            "mu_dim": int(samples[0].mu_dim) if samples else 0,
            "angle_min": float(finite.min()) if finite.size else float("nan"),
            "angle_max": float(finite.max()) if finite.size else float("nan"),
            "angle_min_degrees": _degrees(float(finite.min()) if finite.size else float("nan")),
            "angle_max_degrees": _degrees(float(finite.max()) if finite.size else float("nan")),
            "xi_position": positions[0] if len(positions) == 1 else "mixed",
            "grid_points": total,
            "degenerate_points": degenerate,
        },
    }
    code = EXIT_PASS
    expect = manifest.get("expect") or {}
    if expect.get("verdict") is not None:
        matches = payload["summary"]["verdict"] == expect["verdict"]
        payload["summary"]["verdict_matches"] = matches
        if not matches:
            code = EXIT_FAIL
    if expect.get("theta") is not None and samples:
        deviation = declared_semi_slant_residual(sub, np.array(kept), expect["theta"])
        payload["summary"]["expected_theta_deviation"] = deviation
        if deviation > float(manifest["tolerances"]["residual"]):
            code = EXIT_FAIL
    if expect.get("xi_position") is not None:
        matches = payload["summary"]["xi_position"] == expect["xi_position"]
        payload["summary"]["xi_position_matches"] = matches
        if not matches:
            code = EXIT_FAIL
    return payload, _degeneracy_code(manifest, degenerate, total) or code


def _cmd_verify(manifest: dict, suite: str) -> tuple[dict, int]:
    config = config_from_manifest(manifest)
    checks = run_suite(suite, config)
    counts = {"pass": 0, "fail": 0, "skipped": 0, "vacuous": 0}
    for check in checks:
        counts[check.verdict] += 1
    payload = {
        "ambient": _ambient_summary(manifest),
        "ambient_class": config.ambient_class,
        "suite": suite,
        "seed": config.seed,
        "checks": [check.as_dict() for check in checks],
        "summary": dict(counts),
    }
    if counts["fail"]:
        return payload, EXIT_FAIL
    if counts["pass"] == 0:
        payload["summary"]["note"] = "all checks skipped or vacuous"
    return payload, EXIT_PASS


def _entry_row(entry_id: str) -> dict:
    entry = get_entry(entry_id)
    row = {"id": entry.id, "description": entry.description}
    if entry.expected_theta is not None:
        row["expected_theta"] = entry.expected_theta
    if entry.expected_xi is not None:
        row["xi_position"] = entry.expected_xi
    if entry.expected_class is not None:
        row["ambient_class"] = entry.expected_class
    if entry.expected_verdict is not None:
        row["verdict"] = entry.expected_verdict
    if entry.expected_dims is not None:
        row["dims"] = list(entry.expected_dims)
    if entry.orientation is not None:
        row["orientation"] = entry.orientation
    return row


# argument parsing --------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", default=None,
                        help="per-axis sample counts: an integer or a comma list")
    parser.add_argument("--seed", type=int, default=None, help="sampling seed override")
    parser.add_argument("--tol", type=float, default=None,
                        help="residual tolerance override")
    parser.add_argument("--format", choices=("json", "text"), default="json",
                        help="report format (default json)")
    parser.add_argument("--out", default=None,
                        help="write the report to this path instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slantgeo",
        description="verify slant and semi-slant submanifold identities on sampled grids")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("classify", help="classify the ambient structure")
    p.add_argument("manifest", help="manifest file path or inline JSON")
    _add_common(p)

    p = commands.add_parser("slant", help="slant angle field over the grid")
    p.add_argument("manifest", help="manifest file path or inline JSON")
    _add_common(p)

    p = commands.add_parser("semislant", help="invariant/slant splitting over the grid")
    p.add_argument("manifest", help="manifest file path or inline JSON")
    _add_common(p)

    p = commands.add_parser("verify", help="run one named check suite")
    p.add_argument("suite", help="suite name; one of: " + ", ".join(sorted(SUITES)))
    p.add_argument("manifest", help="manifest file path or inline JSON")
    _add_common(p)

    p = commands.add_parser("example", help="run a command on a catalog entry")
    p.add_argument("id", nargs="?", default=None, help="catalog entry id")
    p.add_argument("subcommand", nargs="?", default=None,
                   choices=(None, "classify", "slant", "semislant", "verify"),
                   help="command to run on the entry")
    p.add_argument("suite", nargs="?", default=None,
                   help="suite name when the command is verify")
    p.add_argument("--list", action="store_true", dest="list_entries",
                   help="list catalog entries and exit")
    _add_common(p)
    return parser


def _dispatch(args) -> tuple[str, dict, dict, int]:
    """Returns (command label, manifest, payload, exit code)."""
    if args.command == "example":
        if args.list_entries:
            payload = {"entries": [_entry_row(eid) for eid in list_entries()]}
            return "example --list", {}, payload, EXIT_PASS
        if args.id is None or args.subcommand is None:
            raise ManifestError("example needs an entry id and a command, or --list")
        try:
            entry = get_entry(args.id)
        except KeyError as exc:
            raise ManifestError(exc.args[0]) from exc
        manifest = _apply_overrides(entry.manifest(), args)
        label = f"example {args.id} {args.subcommand}"
        if args.subcommand == "classify":
            payload, code = _cmd_classify(manifest)
        elif args.subcommand == "slant":
            payload, code = _cmd_slant(manifest)
        elif args.subcommand == "semislant":
            payload, code = _cmd_semislant(manifest)
        else:
            if args.suite is None:
                raise ManifestError("example ... verify needs a suite name")
            label += f" {args.suite}"
            payload, code = _cmd_verify(manifest, args.suite)
        return label, manifest, payload, code

    manifest = _apply_overrides(load_manifest(args.manifest), args)
    if args.command == "classify":
        payload, code = _cmd_classify(manifest)
        return "classify", manifest, payload, code
    if args.command == "slant":
        payload, code = _cmd_slant(manifest)
        return "slant", manifest, payload, code
    if args.command == "semislant":
        payload, code = _cmd_semislant(manifest)
        return "semislant", manifest, payload, code
    payload, code = _cmd_verify(manifest, args.suite)
    return f"verify {args.suite}", manifest, payload, code


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        label, manifest, payload, code = _dispatch(args)
    except (ManifestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    digest = manifest_digest(manifest) if manifest else ""
    report = build_report(label, digest, payload, code)
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
