"""Deterministic report serialization.

Reports are plain dicts rendered to a canonical JSON form: UTF-8,
sorted keys, floats printed with 17 significant digits, LF line
endings, trailing newline.  Two runs with the same manifest and seed
produce byte-identical output.  The text format is a readable
rendering of the same payload, not a separate data source.
"""
from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .manifest import normalize_manifest

ENGINE_VERSION = "0.1.0"
REPORT_VERSION = 1

# Sign and scaling choices that affect reported numbers.  A reader
# comparing against a source using d(eta)(X, Y) = X eta(Y) - Y eta(X)
# (no 1/2) must scale the two-form residuals accordingly.
CONVENTIONS = {
    "exterior_derivative": "half: d(eta)(X, Y) = (X eta(Y) - Y eta(X) - eta([X, Y])) / 2",
    "angles": "radians; *_degrees fields are display copies",
    "shape_operator": "g(A_Z X, Y) = g(h(X, Y), Z)",
    "laplacian": "analyst sign: trace of the Hessian",
}


def _canon_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def _canon(obj) -> str:
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"non-string report key {key!r}")
            items.append(json.dumps(key, ensure_ascii=True) + ": " + _canon(obj[key]))
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_canon(v) for v in obj) + "]"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _canon_float(float(obj))
    if isinstance(obj, np.ndarray):
        return _canon(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__} in a report")


def canonical_json(obj) -> str:
    """Canonical single-document JSON text, with trailing newline."""
    return _canon(obj) + "\n"


def manifest_digest(doc) -> str:
    """sha256 of the canonical form of the normalized manifest."""
    manifest = normalize_manifest(doc)
    return hashlib.sha256(canonical_json(manifest).encode("utf-8")).hexdigest()


def build_report(command: str, digest: str, payload: dict, exit_code: int) -> dict:
    return {
        "command": command,
        "conventions": dict(CONVENTIONS),
        "engine_version": ENGINE_VERSION,
        "exit_code": exit_code,
        "manifest_digest": digest,
        "payload": payload,
        "report_version": REPORT_VERSION,
    }


# text rendering ----------------------------------------------------------------

def _fmt_value(v) -> str:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if v != 0.0 and (abs(v) < 1e-4 or abs(v) >= 1e6):
            return format(v, ".6e")
        return format(v, ".10g")
    if isinstance(v, np.ndarray):
        return _fmt_value(v.tolist())
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    return str(v)


def _render_check_line(check: dict) -> str:
    marks = {"pass": "PASS", "fail": "FAIL", "skipped": "SKIP", "vacuous": "VAC "}
    mark = marks.get(check.get("verdict", ""), "????")
    line = (f"  [{mark}] {check['suite']}/{check['check']}: "
            f"max residual {_fmt_value(check['max_residual'])}"
            f" (tol {_fmt_value(check['tolerance'])},"
            f" {check['samples_total']} samples)")
    if check.get("note"):
        line += f" -- {check['note']}"
    return line


def _render_block(value, indent: int, lines: list[str]) -> None:
    pad = " " * indent
    if isinstance(value, dict):
        if set(value) >= {"suite", "check", "verdict", "max_residual"}:
            lines.append(_render_check_line(value))
            return
        for key in sorted(value):
            inner = value[key]
            if isinstance(inner, (dict, list, tuple)) and inner:
                lines.append(f"{pad}{key}:")
                _render_block(inner, indent + 2, lines)
            else:
                lines.append(f"{pad}{key}: {_fmt_value(inner)}")
    elif isinstance(value, (list, tuple)):
        if value and all(isinstance(v, dict) for v in value):
            for v in value:
                _render_block(v, indent, lines)
                if not (set(v) >= {"suite", "check", "verdict", "max_residual"}):
                    lines.append("")
        else:
            lines.append(f"{pad}{_fmt_value(value)}")
    else:
        lines.append(f"{pad}{_fmt_value(value)}")


def render_text(report: dict) -> str:
    lines = [
        f"command: {report['command']}",
        f"engine: {report['engine_version']} (report v{report['report_version']})",
        f"manifest digest: {report['manifest_digest']}",
        f"exit code: {report['exit_code']}",
        "",
    ]
    _render_block(report["payload"], 0, lines)
    lines.append("")
    lines.append("conventions:")
    for key in sorted(report["conventions"]):
        lines.append(f"  {key}: {report['conventions'][key]}")
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines) + "\n"
