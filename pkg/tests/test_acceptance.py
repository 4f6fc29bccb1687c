"""Acceptance checks, one test per criterion, each printing a PASS/FAIL line.

The verdict lines are repeated in the terminal summary; ``-s`` also shows the
detail of each check.
"""

import io
import json
import time

import pytest

from conftest import ACCEPTANCE_LINES
from sturmjsr.acceptance import CRITERIA
from sturmjsr.cli import run


def _report(res):
    status = "PASS" if res.passed else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {res.id:2d} {status}  {res.name}  ({res.seconds:.2f}s)")
    print(f"\ncriterion {res.id:2d} {status}  {res.name}  ({res.seconds:.2f}s)  {json.dumps(res.detail)}")


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid):
    t0 = time.perf_counter()
    res = CRITERIA[cid]()
    res.seconds = time.perf_counter() - t0
    _report(res)
    assert res.passed, res.detail


def test_criterion_11_quick_suite_is_deterministic():
    outputs = []
    for _ in range(2):
        buf = io.StringIO()
        code = run(["verify", "--suite", "quick", "--no-envelope"], stdout=buf)
        assert code == 0
        outputs.append(buf.getvalue())
    same = outputs[0] == outputs[1]
    ACCEPTANCE_LINES.append(f"criterion 11 {'PASS' if same else 'FAIL'}  quick suite is byte-identical across runs")
    print(f"\ncriterion 11 {'PASS' if same else 'FAIL'}  quick suite is byte-identical across runs")
    assert same
