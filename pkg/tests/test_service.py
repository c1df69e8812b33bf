"""HTTP service endpoints: payload shapes, decimal-string encoding, error kinds."""

import json
import math

import pytest
from fastapi.testclient import TestClient

from modlat.service import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


def all_numbers_are_strings(obj):
    if isinstance(obj, bool):
        return True
    if isinstance(obj, float):
        return False
    if isinstance(obj, dict):
        return all(all_numbers_are_strings(v) for k, v in obj.items()
                   if k != "config" or True)
    if isinstance(obj, list):
        return all(all_numbers_are_strings(v) for v in obj)
    return True


def test_zeta_endpoint(client):
    resp = client.post("/zeta", json={"m": 1, "s": 2.0, "tol": 1e-10})
    assert resp.status_code == 200
    body = resp.json()
    assert float(body["lower"]) <= math.pi ** 2 / 6 <= float(body["upper"])
    assert body["meta"]["version"]
    assert body["meta"]["config"]["m"] == 1
    assert isinstance(body["lower"], str) and isinstance(body["upper"], str)


def test_zeta_precision_failure(client):
    resp = client.post("/zeta", json={"m": 4, "s": 2.0, "tol": 1e-12})
    assert resp.status_code == 422
    assert resp.json()["error_kind"] == "precision_failure"


def test_bound_endpoint_asymptotic(client):
    resp = client.post("/bound", json={"m": 16, "t": 20, "mode": "asymptotic"})
    assert resp.status_code == 200
    body = resp.json()
    assert float(body["eta_upper"]) > 0
    assert body["mode"] == "asymptotic"
    assert all_numbers_are_strings(body["breakdown"])


def test_bound_endpoint_explicit_default_cutoff(client):
    resp = client.post("/bound", json={"m": 8, "t": 20})
    assert resp.status_code == 200
    body = resp.json()
    assert body["mode"] == "explicit"
    assert float(body["breakdown"]["h0"]) == pytest.approx(math.log(100) / 4)
    assert float(body["breakdown"]["element_sum"]) == pytest.approx(
        float(body["breakdown"]["explicit_sum"]) * 8, rel=1e-9)


def test_bound_rank_below_threshold(client):
    resp = client.post("/bound", json={"m": 16, "t": 5, "mode": "asymptotic"})
    assert resp.status_code == 409
    assert resp.json()["error_kind"] == "rank_below_threshold"


def test_enumerate_endpoint_and_unavailable(client):
    resp = client.post("/enumerate", json={"m": 4, "X": 0.7})
    assert resp.status_code == 200
    body = resp.json()
    assert body["n_orbits"] == len(body["orbits"]) > 0
    first = body["orbits"][0]
    assert {"coeffs", "h_inf", "h_weil", "D", "norm"} <= set(first)
    bad = client.post("/enumerate", json={"m": 23, "X": 0.5})
    assert bad.status_code == 422
    assert bad.json()["error_kind"] == "enumeration_unavailable"


def test_enumerate_validates_range(client):
    resp = client.post("/enumerate", json={"m": 4, "X": 3.0})
    assert resp.status_code == 422  # schema bound: X <= 2


def test_extra_fields_rejected(client):
    resp = client.post("/zeta", json={"m": 1, "s": 2.0, "bogus": 1})
    assert resp.status_code == 422


def test_svbound_endpoint(client):
    resp = client.post("/svbound", json={"m": 16, "t": 16})
    assert resp.status_code == 200
    body = resp.json()
    bracket = body["bracket"]
    assert float(bracket["lambda_low"]) < float(bracket["lambda_high"])
    assert float(bracket["epsilon"]) == pytest.approx(1 / math.log(128), rel=1e-9)
    assert 0 <= float(bracket["probability_floor"]) <= 1
    assert body["module_prediction"]["log_base"] == "natural"


def test_simulate_endpoint_deterministic(client):
    payload = {"m": 4, "t": 4, "p": 5, "s": 2, "V": 6.0, "N": 4, "seed": 9}
    r1 = client.post("/simulate", json=payload)
    r2 = client.post("/simulate", json=payload)
    assert r1.status_code == 200
    assert json.dumps(r1.json(), sort_keys=True) == \
        json.dumps(r2.json(), sort_keys=True)
    rep = r1.json()["report"]
    assert rep["n_samples"] == 4
    assert all(int(r) % 4 == 0 for r in rep["rho_values"])
    assert all_numbers_are_strings(rep["predictions"])


def test_figure_endpoint_csv(client):
    resp = client.post("/figure", json={"conductors": [8], "t_min": 20,
                                        "t_max": 22})
    assert resp.status_code == 200
    body = resp.json()
    lines = body["csv"].strip().split("\n")
    assert lines[0] == "m,t,ln_eta_upper"
    assert len(body["rows"]) == 3
    vals = [float(r["ln_eta_upper"]) for r in body["rows"]]
    assert vals[0] > vals[1] > vals[2]
