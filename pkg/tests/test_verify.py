"""Suite dispatch, verdict semantics, hypothesis gating, discrimination."""

import dataclasses

import numpy as np
import pytest

from slantgeo.catalog import entry_config
from slantgeo.manifest import load_manifest
from slantgeo.verify import RunConfig, config_from_manifest, run_suite

pytestmark = pytest.mark.filterwarnings("ignore::RuntimeWarning")


def two_angle_manifest() -> dict:
    # two slant planes at different constant angles: not semi-slant
    return load_manifest({
        "manifest_version": 1,
        "ambient": {"builtin": "euclidean_cosymplectic", "n": 4},
        "submanifold": {
            "params": ["x1", "x2", "x3", "x4"],
            "domain": [[0.1, 1.0]] * 4,
            "map": ["x1", "cos(0.3)*x2", "sin(0.3)*x2", "0",
                    "x3", "cos(0.9)*x4", "sin(0.9)*x4", "0", "0"],
        },
        "sampling": {"grid": 2, "seed": 0},
    })


def map_checks(checks):
    return {c.check: c for c in checks}


def assert_verdict_semantics(checks):
    for c in checks:
        if c.verdict == "pass":
            assert c.max_residual <= c.tolerance, c
        elif c.verdict == "fail":
            assert c.max_residual > c.tolerance, c
        else:
            assert c.verdict in ("skipped", "vacuous"), c
            assert c.note, f"skip without a reason: {c}"


def test_unknown_suite_lists_known_ones():
    config = entry_config("slant-r5-normal")
    with pytest.raises(ValueError, match="parallel-tensors"):
        run_suite("definitely-not-a-suite", config)


def test_acm_axioms_pass_and_classify():
    checks = run_suite("acm-axioms", entry_config("slant-kenmotsu"))
    by = map_checks(checks)
    assert all(c.verdict == "pass" for c in checks)
    assert "kenmotsu" in by["classification"].note
    assert_verdict_semantics(checks)


def test_parallel_tensors_pass_on_flat_ambients():
    for entry_id in ("slant-r5-normal", "slant-constant-r9"):
        checks = run_suite("parallel-tensors", entry_config(entry_id))
        by = map_checks(checks)
        for name in ("transfer-tangent-tangent", "transfer-tangent-normal",
                     "transfer-normal-tangent", "transfer-normal-normal",
                     "two-form-closed", "two-form-routes"):
            assert by[name].verdict == "pass", (entry_id, by[name])
        assert_verdict_semantics(checks)


def test_parallel_tensors_skip_names_the_hypothesis():
    checks = run_suite("parallel-tensors", entry_config("slant-kenmotsu"))
    assert all(c.verdict == "skipped" for c in checks)
    assert all("cosymplectic" in c.note for c in checks)


def test_integrability_alias_skips_on_non_semi_slant():
    config = config_from_manifest(two_angle_manifest())
    checks = run_suite("integrability", config)
    assert checks, "alias produced no checks"
    assert all(c.verdict == "skipped" for c in checks)
    assert all("not_semi_slant" in c.note or "semi-slant" in c.note for c in checks)


def test_integrability_and_foliation_pass_on_split_example():
    config = entry_config("semislant-r11")
    for suite in ("integrability-D1", "integrability-D2",
                  "foliation-D1", "foliation-D2"):
        checks = run_suite(suite, config)
        assert any(c.verdict == "pass" for c in checks), suite
        assert not any(c.verdict == "fail" for c in checks), (suite, checks)
        assert_verdict_semantics(checks)


def test_every_identity_check_is_preceded_by_route_agreement():
    # shape operator identities are only trusted when the duality and
    # finite-difference Weingarten routes agree on the same samples
    for suite, entry_id in (("foliation-D1", "semislant-r11"),
                            ("warp-identities", "warped-kenmotsu-tangent"),
                            ("nonexistence", "mirror-flat-normal"),
                            ("inequality", "warped-kenmotsu-tangent")):
        by = map_checks(run_suite(suite, entry_config(entry_id)))
        assert "shape-operator-routes" in by, suite
        assert by["shape-operator-routes"].verdict == "pass", suite
        assert by["shape-operator-routes"].tolerance <= 1e-6


def test_warp_identities_discriminate_ambient_class():
    config = entry_config("warped-kenmotsu-tangent")
    good = map_checks(run_suite("warp-identities", config))
    assert good["shape"].verdict == "pass"
    assert good["nontrivial-warp"].verdict == "pass"

    wrong = dataclasses.replace(config, ambient_class="cosymplectic")
    bad = map_checks(run_suite("warp-identities", wrong))
    assert bad["shape"].verdict == "fail"
    assert bad["shape"].max_residual > 1e-2


def test_umbilic_suite_on_totally_umbilic_entries():
    for entry_id in ("slant-constant-r9", "invariant-plane-r5"):
        checks = run_suite("umbilic", entry_config(entry_id))
        by = map_checks(checks)
        assert by["umbilic-deviation"].verdict == "pass"
        assert by["mean-curvature-position"].verdict == "pass"
        assert_verdict_semantics(checks)


def test_inequality_pass_with_logged_slack():
    by = map_checks(run_suite("inequality", entry_config("warped-kenmotsu-tangent")))
    assert by["second-form-bound"].verdict == "pass"
    assert "slack" in by["second-form-bound"].note
    assert by["bound-monotone-in-angle"].verdict == "pass"


def test_inequality_is_vacuous_on_the_sasakian_product():
    checks = run_suite("inequality", entry_config("sasakian-product"))
    assert all(c.verdict == "vacuous" for c in checks)
    assert all("Sasakian" in c.note for c in checks)


def test_nonexistence_forces_constant_warp_on_mirrored_entries():
    for entry_id in ("mirror-flat-normal", "mirror-flat-scaled", "mirror-kenmotsu-slice",
                     "mirror-flat-tangent", "mirror-sasakian"):
        by = map_checks(run_suite("nonexistence", entry_config(entry_id)))
        for name in ("chain-pair", "chain-symmetry", "chain-side", "forced-constant-warp"):
            assert by[name].verdict == "pass", (entry_id, name, by[name])


def test_nonexistence_skips_on_allowed_orientation():
    checks = run_suite("nonexistence", entry_config("warped-kenmotsu-tangent"))
    assert all(c.verdict == "skipped" for c in checks)
    assert all("orientation" in c.note for c in checks)


def test_trivial_warp_is_flagged_vacuous_not_pass():
    by = map_checks(run_suite("warp-identities", entry_config("product-cosymplectic-tangent")))
    assert by["nontrivial-warp"].verdict == "vacuous"
    assert by["metric-split"].verdict == "pass"
    assert by["shape"].verdict == "pass"


def test_base_constant_angle_identities_fail_honestly_on_varying_angle():
    # on a warped instance whose slant angle varies along the base, the
    # base-constant forms miss by exactly the base-variation term; the
    # general forms absorb it
    for entry_id in ("warped-cosymplectic-tangent", "warped-cosymplectic-normal",
                     "warped-kenmotsu-normal"):
        by = map_checks(run_suite("warp-identities", entry_config(entry_id)))
        assert by["nontrivial-warp"].verdict == "pass", entry_id
        for name in ("mixed-symmetry", "shape", "phi-shape", "mixed-pair"):
            assert by[name].verdict == "fail", (entry_id, name)
            assert by[name].max_residual > 1e-1, (entry_id, name)
            assert "base-variation term" in by[name].note, (entry_id, name)
            general = by[name + "-general"]
            assert general.verdict == "pass", (entry_id, name)
            assert general.max_residual < 1e-9, (entry_id, name)
        assert by["tangent-pair"].verdict == "pass", entry_id


def test_general_forms_coincide_with_base_constant_ones_when_angle_is():
    # f = exp(t) with the Reeb field tangent kills the correction term,
    # so both forms hold on the hyperbolic instance
    by = map_checks(run_suite("warp-identities", entry_config("warped-kenmotsu-tangent")))
    for name in ("mixed-symmetry", "shape", "phi-shape", "mixed-pair"):
        assert by[name].verdict == "pass", name
        assert by[name + "-general"].verdict == "pass", name


def test_inequality_bound_holds_beyond_the_minimal_normal_frame():
    # extra normal components only raise |h|^2, so the bound is still
    # checked when mu is larger than the stated frame; the hypothesis
    # status is reported instead of gating the slack
    for entry_id in ("warped-cosymplectic-tangent", "warped-cosymplectic-normal",
                     "warped-kenmotsu-normal"):
        by = map_checks(run_suite("inequality", entry_config(entry_id)))
        assert by["dimension-hypothesis"].verdict == "skipped", entry_id
        assert "mu dimension" in by["dimension-hypothesis"].note, entry_id
        assert by["second-form-bound"].verdict == "pass", entry_id
        assert "slack" in by["second-form-bound"].note, entry_id


def test_runs_are_deterministic():
    config = entry_config("semislant-r7")
    first = run_suite("parallel-tensors", config)
    second = run_suite("parallel-tensors", entry_config("semislant-r7"))
    assert first == second


def test_direction_seed_is_recorded():
    checks = run_suite("integrability-D1", entry_config("semislant-r11"))
    assert any("seed" in c.note for c in checks)


def test_config_classifies_ambient_when_not_told():
    config = entry_config("warped-kenmotsu-tangent")
    assert config.ambient_class == "kenmotsu"
    assert config.ambient_residual < 1e-8


def test_suites_tolerate_rank_drops():
    # the map loses rank along x2 = 0 inside the domain
    manifest = load_manifest({
        "manifest_version": 1,
        "ambient": {"builtin": "euclidean_cosymplectic", "n": 2},
        "submanifold": {
            "params": ["x1", "x2"],
            "domain": [[-0.5, 1.0], [-0.5, 1.0]],
            "map": ["x1", "sin(x2)*x2", "0", "cos(x2)*x2", "0"],
        },
        "sampling": {"grid": 3, "seed": 0},
    })
    checks = run_suite("slant-basic", config_from_manifest(manifest))
    assert any(c.samples_degenerate >= 0 for c in checks)
    assert_verdict_semantics(checks)
