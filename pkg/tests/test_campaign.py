import json

import pytest

from metricmag import campaign
from metricmag.campaign import Tally
from metricmag.core import SimilaritySpace
from metricmag.verify import THEOREMS, circle_examples, run_theorem


def _task(chunk, count, seed, flag_every=0):
    t = Tally(samples=count)
    for i in range(count):
        idx = chunk * campaign.CHUNK + i
        t.histogram[f"r{idx % 3}"] += 1
        if flag_every and idx % flag_every == 0:
            t.violation("demo", idx, SimilaritySpace([[1, 0.5], [0.5, 1]]), value=idx)
    return t


def test_tally_merge():
    a, b = _task(0, 10, 0, flag_every=4), _task(1, 5, 0, flag_every=4)
    total = a + b
    assert total.samples == 15
    assert total.violation_count == a.violation_count + b.violation_count
    assert total.histogram == a.histogram + b.histogram
    assert [v["sample"] for v in total.violations] == sorted(v["sample"] for v in total.violations)


def test_recorded_violations_capped():
    report = campaign.run("demo", _task, 2500, 0, flag_every=1)
    assert report.violation_count == 2500
    assert len(report.violations) == campaign.MAX_RECORDED
    assert report.violations[0]["matrix"] == [[1.0, 0.5], [0.5, 1.0]]
    assert not report.ok


def test_report_json_shape():
    doc = json.loads(campaign.run("demo", _task, 30, 4).to_json())
    assert set(doc) == {"theorem", "samples", "seed", "violations", "violation_count",
                        "case_histogram", "stats"}
    assert doc["samples"] == 30 and doc["seed"] == 4


def test_worker_count_does_not_change_result():
    one = run_theorem("micro-formulas", 2100, seed=5, workers=1).to_dict()
    three = run_theorem("micro-formulas", 2100, seed=5, workers=3).to_dict()
    assert one == three


def test_seed_changes_samples():
    a = run_theorem("proof-identities", 50, seed=1).to_dict()
    b = run_theorem("proof-identities", 50, seed=2).to_dict()
    assert a["violation_count"] == b["violation_count"] == 0
    assert a["case_histogram"] != b["case_histogram"] or a["stats"] != b["stats"]


@pytest.mark.parametrize("theorem", sorted(set(THEOREMS) - {"circle-examples"}))
def test_small_campaigns_clean(theorem):
    report = run_theorem(theorem, 20, seed=11)
    assert report.ok, report.violations[:3]
    assert report.samples > 0


def test_circle_examples_clean():
    report = circle_examples()
    assert report.ok and report.samples == 2


def test_unknown_theorem():
    with pytest.raises(ValueError, match="unknown theorem"):
        run_theorem("nope", 1, 0)
