import json

import pytest
from pydantic import ValidationError

from report import CheckRecord, Report


def _check(id, status="exact-pass", **kwargs):
    return CheckRecord(id=id, paper_ref="SubInt", anchor="a", status=status, **kwargs)


def test_checks_are_sorted_by_id():
    report = Report(suite="all", q=1.1, seed=0, window=6, checks=[_check("b"), _check("a")])
    assert [c.id for c in report.checks] == ["a", "b"]


def test_duplicate_ids_are_rejected():
    with pytest.raises(ValidationError):
        Report(suite="all", q=1.1, seed=0, window=6, checks=[_check("a"), _check("a")])


def test_unknown_status_is_rejected():
    with pytest.raises(ValidationError):
        _check("a", status="passed")


def test_failures_and_counts():
    report = Report(
        suite="lattice",
        q=1.1,
        seed=0,
        window=6,
        checks=[_check("a"), _check("b", "finding", witness="1e-3"), _check("c", "numeric-pass", tolerance=1e-12)],
    )
    assert not report.failed
    assert report.counts() == {"exact-pass": 1, "finding": 1, "numeric-pass": 1}
    report.checks.append(_check("d", "fail"))
    assert report.failed


def test_json_layout():
    report = Report(suite="grassmann", q=1.5, seed=7, window=3, checks=[_check("x", "numeric-pass", tolerance=0.5)])
    data = json.loads(report.to_json())
    assert list(data) == ["suite", "q", "seed", "window", "checks"]
    assert data["checks"] == [{"id": "x", "paper_ref": "SubInt", "anchor": "a", "status": "numeric-pass", "tolerance": 0.5}]
    assert Report.model_validate(data) == report
