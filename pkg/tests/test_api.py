from __future__ import annotations

import logging

from fastapi.testclient import TestClient

from app.main import app

client = TestClient(app)


def test_health():
    r = client.get("/api/health")
    assert r.status_code == 200
    assert r.json() == {"ok": True, "schema": 1}


def test_catalogue_lists_fixtures():
    body = client.get("/api/catalogue").json()
    assert "standard" in body["fixtures"] and "kropina" in body["families"]


def test_tensors_endpoint():
    r = client.post("/api/tensors", json={"phi": {"family": "randers"}, "s": 0.3})
    assert r.status_code == 200
    body = r.json()
    assert abs(body["geometry"]["s"] - 0.3) < 1e-12
    assert set(body["tensors"]) == {"g", "g_inv", "C", "T", "T_raised"}


def test_classify_with_inline_fixture():
    fixture = {"dim": 3, "a": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "b": [1, 0, 0], "b0": 1}
    r = client.post(
        "/api/classify",
        json={"fixture": fixture, "phi": {"family": "shen_berwald", "params": {"c": 2, "b_sq": 1}}},
    )
    assert r.status_code == 200
    assert r.json()["kind"] == "TCondition"


def test_verify_endpoint():
    r = client.post("/api/verify", json={"phi": {"family": "randers"}, "samples": 3, "seed": 1})
    assert r.status_code == 200
    assert r.json()["passed"]


def test_ode_check_endpoint():
    r = client.post("/api/ode-check", json={"check": "special", "params": {"c1": 1, "b_sq": 0.36}, "grid_size": 9})
    assert r.status_code == 200
    assert r.json()["passed"]


def test_domain_error_maps_to_422():
    r = client.post("/api/tensors", json={"phi": {"family": "sqrt_linear", "params": {"c1": 1, "c2": 1, "b_sq": 0.36}}})
    assert r.status_code == 422
    body = r.json()
    assert body["error"] == "DegenerateMetric" and body["exit_code"] == 3


def test_unsupported_range_maps_to_422():
    r = client.post(
        "/api/classify", json={"fixture": "berwald", "phi": {"family": "shen_berwald", "params": {"c": 1, "b_sq": 1}}}
    )
    assert r.status_code == 422
    assert r.json()["error"] == "UnsupportedParameterRange"


def test_bad_tolerance_is_a_validation_error():
    r = client.post("/api/classify?tol=-1", json={"phi": {"family": "randers"}})
    assert r.status_code == 422
    assert "error" not in r.json()


def test_path_like_fixture_is_refused():
    r = client.post("/api/classify", json={"fixture": "../secrets.json", "phi": {"family": "randers"}})
    assert r.status_code == 422
    assert r.json()["error"] == "ConfigError"


def test_tensors_along_b_keep_metric_and_cartan():
    r = client.post("/api/tensors", json={"phi": {"family": "randers"}, "y": [1.0, 0.0, 0.0]})
    assert r.status_code == 200
    body = r.json()
    assert set(body["tensors"]) == {"g", "g_inv", "C"}
    assert set(body["unavailable"]) == {"coefficients", "T", "T_raised"}
    assert "m^2" in body["unavailable"]["T"]
    assert body["coefficients"] is None


def test_classify_logs_the_verdict(caplog):
    with caplog.at_level(logging.INFO, logger="app.routers.analysis"):
        r = client.post("/api/classify", json={"phi": {"family": "randers"}, "grid_size": 5})
    assert r.status_code == 200
    assert any(r.json()["kind"] in rec.getMessage() for rec in caplog.records)
