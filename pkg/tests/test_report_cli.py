from __future__ import annotations

import json

import pytest
from click.testing import CliRunner
from hypothesis import given
from hypothesis import strategies as st

from stratalab import suites
from stratalab.cli import main
from stratalab.report import CheckResult, Report, compare, emit_report, no_failures
from stratalab.suites import EnvelopeError, SuiteConfig, run_suite


def test_empty_report_totals():
    r = Report("empty")
    assert r.totals == {"pass": 0, "fail": 0, "skipped": 0, "total": 0}
    assert r.ok
    assert json.loads(emit_report(r))["checks"] == []


def test_failing_check_needs_witness():
    with pytest.raises(ValueError):
        CheckResult("x", "fail", 1, 2)
    with pytest.raises(ValueError):
        CheckResult("x", "bogus")
    bad = compare("x", 1, 2)
    assert bad.status == "fail" and bad.witness == {"expected": 1, "actual": 2}
    assert no_failures("y", [], 7).witness == {"cases": 7}
    assert no_failures("y", [1, 2], 7).actual == 2


json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.text(max_size=5),
    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(st.text(max_size=3), inner, max_size=3),
    max_leaves=8,
)


@given(json_values, json_values)
def test_report_roundtrip(expected, witness):
    r = Report("s", {"p": 3})
    r.add(CheckResult("a", "pass", expected, expected))
    r.add(CheckResult("b", "fail", expected, None, witness if witness is not None else "w"))
    data = emit_report(r)
    back = Report.from_dict(json.loads(data))
    assert emit_report(back) == data
    assert back.checks[1].witness == r.checks[1].witness
    assert back.totals == {"pass": 1, "fail": 1, "skipped": 0, "total": 2}


def test_json_is_byte_identical_across_runs():
    cfg = SuiteConfig("weyl-eo")
    assert emit_report(run_suite(cfg)) == emit_report(run_suite(cfg))


def test_timings_only_when_requested():
    r = run_suite(SuiteConfig("weyl-eo"))
    assert all(c.elapsed_ms is None for c in r.checks)
    r = run_suite(SuiteConfig("weyl-eo", timings=True))
    assert all(c.elapsed_ms is not None for c in r.checks)


@pytest.mark.parametrize(
    "kwargs",
    [{"p": 7}, {"d": 3}, {"radius": 3}, {"radius": 2, "precision": 7}, {"fmt": "xml"}],
)
def test_envelope(kwargs):
    with pytest.raises(EnvelopeError):
        SuiteConfig("weyl-eo", **kwargs).validate()


def test_default_precision():
    assert SuiteConfig("weyl-eo", radius=2).m == 8
    assert SuiteConfig("weyl-eo", precision=12).m == 12


def test_dl_partition_level_one():
    r = run_suite(SuiteConfig("dl-partition", p=3, d=1))
    assert r.ok
    assert dict((row[0], row[1]) for row in r.tables["strata"])["XP1"] == 40


def test_cli_json_and_text(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["weyl-eo"])
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert data["suite"] == "weyl-eo" and data["totals"]["fail"] == 0
    res2 = runner.invoke(main, ["weyl-eo"])
    assert res2.output == res.output
    res = runner.invoke(main, ["weyl-eo", "--format", "text"])
    assert res.exit_code == 0
    assert res.output.startswith("suite: weyl-eo") and "totals:" in res.output
    out = tmp_path / "r.json"
    res = runner.invoke(main, ["weyl-eo", "--out", str(out)])
    assert res.exit_code == 0 and res.output == ""
    assert json.loads(out.read_text())["totals"] == data["totals"]


@pytest.mark.parametrize("args", [["weyl-eo", "--p", "7"], ["weyl-eo", "--deg", "3"], ["weyl-eo", "--radius", "3"],
                                  ["weyl-eo", "--radius", "1", "--precision", "5"], ["nope"]])
def test_cli_usage_errors(args):
    res = CliRunner().invoke(main, args)
    assert res.exit_code == 2


def test_cli_exit_status_on_failure(monkeypatch):
    def broken(cfg):
        r = Report("weyl-eo", cfg.params())
        r.add(compare("always-wrong", 0, 1))
        return r

    monkeypatch.setitem(suites.RUNNERS, "weyl-eo", broken)
    res = CliRunner().invoke(main, ["weyl-eo"])
    assert res.exit_code == 1
    assert json.loads(res.output)["checks"][0]["witness"] == {"expected": 0, "actual": 1}
