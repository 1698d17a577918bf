"""Canonical serialization: parseable, sorted, stable, digest-faithful."""

import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from slantgeo.report import (
    CONVENTIONS,
    ENGINE_VERSION,
    build_report,
    canonical_json,
    manifest_digest,
    render_text,
)

scalars = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(min_value=-(2**53), max_value=2**53),
    st.floats(allow_nan=False, allow_infinity=False),
    st.text(max_size=20),
)
trees = st.recursive(
    scalars,
    lambda inner: st.one_of(
        st.lists(inner, max_size=4),
        st.dictionaries(st.text(max_size=8), inner, max_size=4),
    ),
    max_leaves=12,
)


@given(trees)
def test_canonical_json_is_valid_json(tree):
    text = canonical_json(tree)
    assert text.endswith("\n") and "\r" not in text
    parsed = json.loads(text)
    assert canonical_json(parsed) == text


@given(st.dictionaries(st.text(min_size=1, max_size=8), scalars, min_size=2, max_size=6))
def test_key_order_does_not_matter(mapping):
    items = list(mapping.items())
    shuffled = dict(reversed(items))
    assert canonical_json(mapping) == canonical_json(shuffled)


def test_floats_carry_17_significant_digits():
    value = 0.1 + 0.2
    text = canonical_json({"v": value})
    assert json.loads(text)["v"] == value
    assert format(value, ".17g") in text


def test_non_finite_floats_become_strings():
    text = canonical_json({"a": float("nan"), "b": float("inf"), "c": float("-inf")})
    assert json.loads(text) == {"a": "nan", "b": "inf", "c": "-inf"}


def test_numpy_values_serialize_like_python_ones():
    plain = canonical_json({"x": [1.5, 2], "n": 3})
    mixed = canonical_json({"x": np.array([1.5, 2.0]), "n": np.int64(3)})
    assert json.loads(plain)["x"] == json.loads(mixed)["x"]
    assert json.loads(mixed)["n"] == 3


def test_manifest_digest_stable_under_defaults():
    doc = {
        "manifest_version": 1,
        "ambient": {"builtin": "euclidean_cosymplectic", "n": 1},
        "submanifold": {
            "params": ["x1"],
            "domain": [[0.1, 1.0]],
            "map": ["x1", "0", "0"],
        },
    }
    explicit = dict(doc)
    explicit["sampling"] = {"grid": 6, "seed": 0}
    assert manifest_digest(doc) == manifest_digest(explicit)
    assert len(manifest_digest(doc)) == 64

    changed = json.loads(json.dumps(doc))
    changed["sampling"] = {"grid": 6, "seed": 1}
    assert manifest_digest(changed) != manifest_digest(doc)


def test_report_shape_and_text_rendering():
    payload = {
        "summary": {"angle_min": 0.25, "angle_min_degrees": math.degrees(0.25)},
        "checks": [
            {
                "suite": "slant-basic",
                "check": "pointwise-slant",
                "statement": "spread within cluster tolerance",
                "samples_total": 4,
                "samples_degenerate": 0,
                "samples_skipped": 0,
                "max_residual": 0.0,
                "tolerance": 1e-6,
                "verdict": "pass",
                "note": "",
            }
        ],
    }
    report = build_report("slant", "f" * 64, payload, 0)
    assert report["engine_version"] == ENGINE_VERSION
    assert report["conventions"] == CONVENTIONS
    text = render_text(report)
    assert "[PASS] slant-basic/pointwise-slant" in text
    assert "exit code: 0" in text
    assert text.endswith("\n")
