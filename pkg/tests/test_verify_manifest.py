import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ggbm import manifest, verify


# --- divided differences -----------------------------------------------------

@given(c=st.lists(st.floats(-5, 5), min_size=4, max_size=4), k=st.integers(1, 3))
def test_divided_differences_of_cubic(c, k):
    # k-th divided difference of a cubic is its k-th derivative / k! at some point
    x = np.sort(np.random.default_rng(0).uniform(0, 2, 12)) + np.arange(12) * 0.1
    v = np.polyval(c, x)
    d, err = verify.divided_differences(x, v, k)
    if k == 3:
        assert np.allclose(d, c[0], atol=1e-6 * (1 + np.abs(c).sum()))
    assert d.size == x.size - k and np.all(err >= 0)


def test_divided_differences_alternate_on_geometric_grid():
    x = np.geomspace(0.1, 100, 40)
    for k in (1, 2, 3):
        d, _ = verify.divided_differences(x, np.exp(-x / 10), k)
        assert np.all((-1) ** k * d > 0)


# --- suites ------------------------------------------------------------------

def test_unknown_suite():
    with pytest.raises(ValueError):
        verify.run("nope")


def test_full_report_passes_with_reference_seed():
    rep = verify.run("all", 42)
    failed = [c for c in rep["checks"] if not c["passed"]]
    assert rep["passed"], failed
    assert {c["suite"] for c in rep["checks"]} == set(verify.SUITES)
    assert all(set(c) >= {"suite", "name", "achieved", "required", "passed", "kind"} for c in rep["checks"])


def test_report_is_deterministic():
    a = manifest.dumps(verify.run("sampler", 42))
    b = manifest.dumps(verify.run("sampler", 42))
    assert a == b


def test_check_kinds():
    assert verify._le("s", "n", 1e-3, 1e-2).passed
    assert not verify._le("s", "n", math.nan, 1e-2).passed
    assert verify._ge("s", "n", 0.5, 0.01).passed
    assert not verify._ge("s", "n", 0.001, 0.01).passed


# --- manifest and writers ----------------------------------------------------

@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_round_trip(values):
    text = manifest.csv_text(["a", "b"], [values, values[::-1]])
    rows = [line.split(",") for line in text.splitlines()[1:]]
    assert [float(r[0]) for r in rows] == values


def test_csv_rejects_ragged():
    with pytest.raises(ValueError):
        manifest.csv_text(["a", "b"], [[1, 2], [1]])


def test_dumps_handles_numpy_and_non_finite():
    d = json.loads(manifest.dumps({"a": np.arange(3), "b": np.float64(0.1), "c": math.inf}))
    assert d == {"a": [0, 1, 2], "b": 0.1, "c": "inf"}


def test_timestamp_honours_source_date_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    assert manifest.utc_timestamp() == "1970-01-01T00:00:00Z"
    monkeypatch.delenv("SOURCE_DATE_EPOCH")
    assert manifest.utc_timestamp().endswith("Z")


def test_manifest_fields(tmp_path):
    m = manifest.RunManifest("mlf", None, {"beta": 0.5}, 3, outputs=["x.csv"])
    p = tmp_path / "m.json"
    m.write(p)
    d = json.loads(p.read_text())
    assert d["command"] == "mlf" and d["master_seed"] == 3 and d["tool_version"] == "0.1.0"
    assert manifest.sidecar_path(tmp_path / "x.csv").name == "x.csv.manifest.json"


def test_fresh_seed_range():
    seeds = {manifest.fresh_seed() for _ in range(20)}
    assert len(seeds) > 1 and all(0 <= s < 2**64 for s in seeds)
