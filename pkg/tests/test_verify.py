import dataclasses
import time

import pytest

from bipartite_qst.schedule import stage1_schedule
from bipartite_qst.verify import (format_table, run_verification, suite_backend_equivalence,
                                  suite_stage1, suite_stage2)


def test_fast_level_passes_quickly():
    t0 = time.perf_counter()
    results = run_verification("fast")
    elapsed = time.perf_counter() - t0
    assert elapsed < 30
    bad = [r.name for r in results if not r.passed]
    assert not bad, format_table(results)


def test_flipped_angle_sign_caught():
    def tampered(h, eps):
        s = stage1_schedule(h, eps)
        betas = list(s.betas)
        k = max(s.constrained_betas)
        betas[k - 1] = -betas[k - 1]
        return dataclasses.replace(s, betas=tuple(betas))

    assert suite_stage1().passed
    assert not suite_stage1(tampered).passed


def test_box_pairing_reported():
    res = suite_stage2()
    assert res.passed and "box pairing" in res.detail


@pytest.mark.slow
def test_full_backend_scan():
    res = suite_backend_equivalence(8)
    assert res.passed and "8" in res.detail


def test_table_format():
    table = format_table(run_verification("fast")[:2])
    assert table.splitlines()[0].startswith("suite")
    assert len(table.splitlines()) == 3


def test_unknown_level():
    with pytest.raises(ValueError):
        run_verification("medium")
