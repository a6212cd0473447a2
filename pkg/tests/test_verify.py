import json
import math

import numpy as np
import pytest

from rmt_lab import verify
from rmt_lab.errors import ConfigError, DomainError
from rmt_lab.params import EllipseSpec
from rmt_lab.verify import (
    EXTENDED_SUITES,
    SUITES,
    Criterion,
    CriterionResult,
    Measurement,
    VerifyContext,
    VerifyReport,
    criteria_for,
    run_suites,
    select_suites,
)


def _failed(i):
    return CriterionResult(f"c{i}", "params", 1.0, 0.0, False, 0.0, {})


def test_all_excludes_extended_suites():
    chosen = select_suites("all")
    assert "weak-universality" not in chosen
    assert len(chosen) == len(SUITES) - len(EXTENDED_SUITES)
    assert select_suites("all", extended=True) == list(SUITES)


def test_selection_keeps_registry_order():
    assert select_suites("weak-kernel,specfun, params") == ["specfun", "params", "weak-kernel"]
    assert select_suites(["params", "params"]) == ["params"]


@pytest.mark.parametrize("selection", ["", ",", None, []])
def test_empty_selection(selection):
    assert select_suites(selection) == []


def test_unknown_suite():
    with pytest.raises(ConfigError, match="Unknown suite 'spectral'"):
        select_suites("params,spectral")


def test_every_suite_has_criteria():
    for suite in SUITES:
        assert criteria_for(suite), suite


def test_register_into_unknown_suite():
    with pytest.raises(ConfigError):
        verify.criterion("nowhere", "x")(lambda context: None)


def test_measurement_relations():
    assert Measurement(0.5, 1.0).passed
    assert not Measurement(1.5, 1.0).passed
    assert Measurement(1.5, 1.0, relation=">=").passed
    assert not Measurement(math.nan, 1.0).passed
    assert not Measurement(math.inf, 1.0, relation=">=").passed


def test_exit_code_is_capped():
    assert VerifyReport().exit_code == 0
    assert VerifyReport(results=[_failed(i) for i in range(3)]).exit_code == 3
    assert VerifyReport(results=[_failed(i) for i in range(200)]).exit_code == 125


def test_seed_for_is_stable_and_name_dependent():
    context = VerifyContext(seed=11)
    assert context.seed_for("trace-identity") == VerifyContext(seed=11).seed_for("trace-identity")
    assert context.seed_for("trace-identity") != context.seed_for("companion-roots")
    assert context.seed_for("trace-identity") != VerifyContext(seed=12).seed_for("trace-identity")
    assert 0 <= context.seed_for("x") < 2 ** 64


def test_report_json(tmp_path):
    report = VerifyReport(results=[
        CriterionResult("a", "params", 1e-14, 1e-12, True, 0.01, {"relation": "<="}),
        CriterionResult("b", "params", math.nan, math.nan, False, 0.0, {"error": "boom"}),
    ])
    path = report.write(tmp_path / "nested" / "report.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["tool"] == "rmt-lab"
    assert data["passed"] is False
    assert data["failures"] == 1
    assert data["results"][1]["measured"] == "nan"
    assert data["results"][1]["detail"]["error"] == "boom"


def test_params_suite_passes():
    report = run_suites(["params"])
    assert report.passed, [(r.name, r.measured, r.tolerance) for r in report.results if not r.passed]
    assert {r.name for r in report.results} >= {"c-weak-example", "unit-kp", "elliptic-axes"}


def test_dict_outcomes_are_split(monkeypatch):
    def check(context):
        return {"low": Measurement(0.1, 1.0), "high": Measurement(2.0, 1.0)}

    monkeypatch.setitem(verify._REGISTRY, "params", [Criterion("pair", "params", check)])
    report = run_suites(["params"])
    names = {r.name: r.passed for r in report.results}
    assert names == {"pair.low": True, "pair.high": False}
    assert report.exit_code == 1


def test_raising_criterion_is_recorded_as_failure(monkeypatch):
    def check(context):
        raise DomainError("out of range")

    monkeypatch.setitem(verify._REGISTRY, "eigen", [Criterion("broken", "eigen", check)])
    report = run_suites(["eigen"])
    (result,) = report.results
    assert not result.passed
    assert math.isnan(result.measured)
    assert result.detail["error"] == "out of range"


def test_context_reaches_checks(monkeypatch):
    seen = []

    def check(context):
        seen.append(context.seed)
        return Measurement(0.0, 1.0)

    monkeypatch.setitem(verify._REGISTRY, "params", [Criterion("seed-echo", "params", check)])
    run_suites(["params"], VerifyContext(seed=42))
    assert seen == [42]


def test_companion_matrix_roots():
    roots = np.array([1.0, -2.0, 0.5j])
    m = verify.companion_matrix(np.poly(roots))
    found = np.sort_complex(np.linalg.eigvals(m))
    np.testing.assert_allclose(found, np.sort_complex(roots), atol=1e-10)


def test_temme_bound_and_rate():
    outcome = verify.check_temme(VerifyContext())
    assert outcome["bound"].passed, outcome["bound"]
    assert outcome["rate"].passed, outcome["rate"]
    assert 0.4 < max(outcome["rate"].detail["ratios"]) <= verify.TEMME_RATIO


def test_edge_inflation_follows_the_edge_layer():
    disc = EllipseSpec(q_re=1.0, q_im=1.0, bound=1.0, scale_c=1.0)
    assert verify.edge_inflation(disc, 256) == pytest.approx(1.0625)
    assert verify.edge_inflation(disc, 1_000_000) == pytest.approx(verify.SUPPORT_INFLATION)
    squeezed = disc._replace(q_im=4.0)
    assert verify.edge_inflation(squeezed, 256) == pytest.approx(1.125)


@pytest.mark.slow
@pytest.mark.parametrize("suite", [s for s in SUITES if s not in EXTENDED_SUITES])
def test_suite_passes(suite):
    report = run_suites([suite], VerifyContext(seed=0))
    assert report.passed, [(r.name, r.measured, r.tolerance) for r in report.results if not r.passed]
