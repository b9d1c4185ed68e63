"""Service endpoints via FastAPI TestClient (no server needed)."""

import math

import pytest
from fastapi.testclient import TestClient

from main import app
from schemas import PulseSequence

client = TestClient(app)


def test_health():
    resp = client.get("/api/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "healthy"


def test_get_geodesic_sequence():
    resp = client.get("/api/sequences/geodesic", params={"kappa": 1})
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["events"]) == 4
    assert "meta" not in body
    shaped = body["events"][1]
    assert shaped["type"] == "shaped"
    assert shaped["duration"] == pytest.approx(math.sqrt(3) / 2)


def test_get_sequence_round_trips_through_wire_schema():
    resp = client.get("/api/sequences/swap13", params={"J": 2})
    seq = PulseSequence.model_validate(resp.json())
    assert seq.duration == pytest.approx(3 * math.sqrt(3) / 4)


@pytest.mark.parametrize(
    "path, params",
    [
        ("/api/sequences/geodesic", {"theta": 20}),
        ("/api/sequences/grape", {}),
        ("/api/sequences/trilinear", {"axes": "xq"}),
        ("/api/sequences/geodesic", {"theta": 1, "kappa": 0.5}),
    ],
)
def test_get_sequence_rejects_bad_parameters(path, params):
    resp = client.get(path, params=params)
    assert resp.status_code == 422
    assert "detail" in resp.json()


def test_evolve_empty_sequence():
    resp = client.post("/api/sequences/evolve", json={"sequence": {"n": 3, "label": "empty", "events": []}})
    assert resp.status_code == 200
    body = resp.json()
    assert body["duration_s"] == 0.0
    assert body["label"] == "empty"
    matrix = body["matrix"]
    assert len(matrix) == 8
    for i, row in enumerate(matrix):
        for j, (re, im) in enumerate(row):
            assert re == pytest.approx(1.0 if i == j else 0.0)
            assert im == pytest.approx(0.0)


def test_verify_builtin():
    resp = client.post("/api/verify", json={"builtin": "geodesic", "target": "trilinear", "kappa": 1})
    assert resp.status_code == 200
    body = resp.json()
    assert body["passed"] is True
    assert "tolerances" not in body
    assert body["achieved"] >= 1 - 1e-9


def test_verify_uploaded_identity_fails():
    identity = {"n": 3, "label": "identity", "events": []}
    resp = client.post("/api/verify", json={"sequence": identity, "target": "swap13"})
    assert resp.status_code == 200
    assert resp.json()["passed"] is False


def test_verify_requires_exactly_one_source():
    resp = client.post(
        "/api/verify",
        json={"builtin": "vf", "sequence": {"n": 3, "events": []}, "target": "vf"},
    )
    assert resp.status_code == 422


def test_verify_dimension_mismatch():
    resp = client.post("/api/verify", json={"sequence": {"n": 2, "events": []}, "target": "swap13"})
    assert resp.status_code == 422
    assert "detail" in resp.json()


def test_table1():
    resp = client.get("/api/analysis/table1")
    assert resp.status_code == 200
    rows = resp.json()
    assert len(rows) == 4
    swap = next(r for r in rows if r["label"] == "Swap(1,3)")
    assert swap["tau_conventional_s"] == pytest.approx(4.5)
    assert swap["ratio"] == pytest.approx(1 / math.sqrt(3))


def test_sweep_csv():
    resp = client.get("/api/analysis/sweep", params={"n_points": 11})
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/csv")
    lines = resp.text.splitlines()
    assert lines[0] == "kappa,t_conventional,t_improved,t_optimal"
    assert len(lines) == 12


def test_sweep_bad_range():
    resp = client.get("/api/analysis/sweep", params={"kappa_min": 1.5, "kappa_max": 1.0})
    assert resp.status_code == 422


def test_selftest_endpoint():
    resp = client.get("/api/verify/selftest", params={"seed": 7})
    assert resp.status_code == 200
    reports = resp.json()
    assert all(r["passed"] for r in reports)
    assert reports[0]["label"] == "pauli_relations"


def test_evolve_rejects_oversized_spin_count():
    resp = client.post("/api/sequences/evolve", json={"sequence": {"n": 40, "events": []}})
    assert resp.status_code == 422


def test_verify_against_term():
    resp = client.post(
        "/api/verify",
        json={"builtin": "geodesic", "kappa": 1, "term": "0.25 I1z I2z I3z"},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["passed"] is True
    assert body["notes"][-1] == "target exp(-i theta (0.25 I1z I2z I3z))"


def test_verify_requires_exactly_one_target():
    both = {"builtin": "vf", "target": "vf", "term": "0.25 I1z I2z I3z"}
    assert client.post("/api/verify", json=both).status_code == 422
    assert client.post("/api/verify", json={"builtin": "vf"}).status_code == 422


def test_verify_malformed_term():
    resp = client.post("/api/verify", json={"builtin": "geodesic", "term": "I1q"})
    assert resp.status_code == 400
    assert "detail" in resp.json()
