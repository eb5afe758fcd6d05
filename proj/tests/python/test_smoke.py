import math

import numpy as np
import pytest

import qrcert


def test_catalog_and_bounds():
    chsh = qrcert.catalog("chsh")
    assert chsh.scenario == qrcert.Scenario(2, 2)
    assert qrcert.classical_bound(chsh) == 2.0
    assert abs(qrcert.quantum_max(chsh, "Q1") - 2 * math.sqrt(2)) < 1e-6
    assert "i2" in qrcert.catalog_names()


def test_operator_from_numpy():
    op = qrcert.BellOperator(np.array([[1.0, 1.0], [1.0, -1.0]]))
    assert op == qrcert.catalog("chsh")
    copy = qrcert.BellOperator.from_json(op.to_json())
    assert np.array_equal(copy.joint, op.joint)
    with pytest.raises(ValueError):
        op.joint = np.zeros((3, 3))


def test_singlet_correlators():
    cor = qrcert.singlet_correlators([0.0, math.pi / 2], [math.pi / 4, -math.pi / 4])
    value = float(np.sum(qrcert.catalog("chsh").joint * cor))
    assert abs(abs(value) - 2 * math.sqrt(2)) < 1e-12


def test_entropy():
    r = qrcert.entropy("chsh", 0.95)
    assert r["certified"]
    assert abs(r["min_entropy"] - 0.58411) < 1e-4
    local = qrcert.entropy("chsh", 0.95, local="alice")
    assert abs(local["min_entropy"] - 0.47234) < 1e-4
    e = qrcert.entropy("e0e1", 0.95, param=0.6179)
    assert abs(e["min_entropy"] - 0.6484) < 1e-3


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        qrcert.entropy("nope", 0.9)
    with pytest.raises(ValueError):
        qrcert.entropy("chsh", 0.0)
    with pytest.raises(ValueError):
        qrcert.entropy("e0e1", 0.9)


def test_sweep_and_tune():
    rows = qrcert.sweep("chsh", [0.9, 0.95])
    assert rows[0]["min_entropy"] < rows[1]["min_entropy"]
    t = qrcert.tune("e0e1", 0.9, grid=9, refine=10)
    assert abs(t["best_param"] - 0.6948) < 0.02
    assert len(t["grid"]) == 9


def test_canonical_form():
    bc3 = qrcert.catalog("bc3")
    flipped = qrcert.BellOperator(bc3.scenario)
    flipped.joint = bc3.joint[[1, 0, 2], :] * np.array([1.0, -1.0, 1.0])
    assert qrcert.isomorphic(bc3, flipped)
    assert qrcert.canonical_form(flipped) == qrcert.canonical_form(bc3)


def test_small_search_and_table():
    report = qrcert.search(n=4, seed=1)
    assert report["sample_count"] == 4
    assert sum(b["count"] for b in report["histogram"]) == report["evaluated"]
    assert len(report["entropies"]) == 4
    table = qrcert.generate_table("table2")
    assert table["columns"] == ["global", "local"]
    for got, want in zip(table["values"], table["published"]):
        assert all(abs(g - w) < 5e-3 for g, w in zip(got, want))
