import json
import math

import numpy as np
import pytest

from sphere_chords.stats.reports import VerificationReport


def _report(**overrides):
    fields = dict(
        name="crofton_hit",
        params={"d": 3, "body": {"kind": "cap", "radius": np.float64(0.5)}},
        stats={"difference": 0.001, "hit_rate": 0.4},
        thresholds={"difference": 0.002},
        n={"planes": 1000},
        seed=7,
    )
    fields.update(overrides)
    return VerificationReport(**fields)


def test_within_threshold_passes():
    assert _report().passed


def test_threshold_bounds_absolute_value():
    assert not _report(stats={"difference": -0.003, "hit_rate": 0.4}).passed


def test_nan_statistic_fails():
    assert not _report(stats={"difference": math.nan, "hit_rate": 0.4}).passed


def test_threshold_needs_a_statistic():
    with pytest.raises(KeyError):
        _report(thresholds={"ks": 0.1})


def test_unbounded_statistics_do_not_matter():
    assert _report(stats={"difference": 0.0, "hit_rate": math.inf}).passed


def test_json_shape():
    payload = json.loads(_report().to_json())
    assert list(payload) == ["name", "params", "stats", "thresholds", "pass", "n", "seed", "ms"]
    assert payload["pass"] is True
    assert payload["ms"] is None
    assert payload["params"]["body"]["radius"] == 0.5


def test_timing_is_rounded():
    assert _report(ms=12.34567).to_dict()["ms"] == 12.346


def test_non_finite_statistics_are_written_as_null():
    report = _report(stats={"difference": math.nan, "hit_rate": np.float64(math.inf)})
    text = report.to_json()
    assert "NaN" not in text and "Infinity" not in text
    payload = json.loads(text)
    assert payload["stats"] == {"difference": None, "hit_rate": None}
    assert payload["pass"] is False
