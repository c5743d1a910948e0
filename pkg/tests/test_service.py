import numpy as np
import pytest
from fastapi.testclient import TestClient

from sparsebo.service import create_app

BODY = {
    "bounds": [[0.0, 1.0], [0.0, 1.0]],
    "sense": "max",
    "strategy": "StandardBO",
    "seed": 0,
}


@pytest.fixture
def client(tmp_path):
    return TestClient(create_app(str(tmp_path)))


def _create(client, **overrides):
    r = client.post("/campaigns", json={**BODY, **overrides})
    assert r.status_code == 201
    return r.json()


def test_create_and_get(client):
    doc = _create(client)
    assert doc["n_observations"] == 0 and doc["pending"] is None
    got = client.get(f"/campaigns/{doc['id']}")
    assert got.status_code == 200
    assert got.json()["strategy"] == "StandardBO"


def test_create_validation_errors(client):
    bad = client.post("/campaigns", json={**BODY, "bounds": [[1.0, 0.0]]})
    assert bad.status_code == 422
    assert bad.json()["code"] == "Invalid"
    bad = client.post("/campaigns", json={**BODY, "strategy": "nope"})
    assert bad.status_code == 422


def test_get_missing_campaign(client):
    r = client.get("/campaigns/deadbeef")
    assert r.status_code == 404
    assert r.json()["code"] == "NotFound"


def test_ask_tell_cycle(client):
    cid = _create(client)["id"]
    r = client.post(f"/campaigns/{cid}/ask")
    assert r.status_code == 200
    x = r.json()["x"]
    assert len(x) == 2 and all(0.0 <= v <= 1.0 for v in x)
    r = client.post(f"/campaigns/{cid}/tell", json={"x": x, "y": 0.5})
    assert r.status_code == 200
    doc = r.json()
    assert doc["n_observations"] == 1 and doc["pending"] is None
    assert doc["incumbent"]["y"] == 0.5


def test_double_ask_conflicts(client):
    cid = _create(client)["id"]
    assert client.post(f"/campaigns/{cid}/ask").status_code == 200
    r = client.post(f"/campaigns/{cid}/ask")
    assert r.status_code == 409
    assert r.json()["code"] == "Conflict"


def test_tell_without_pending_conflicts(client):
    cid = _create(client)["id"]
    r = client.post(f"/campaigns/{cid}/tell", json={"x": [0.5, 0.5], "y": 1.0})
    assert r.status_code == 409


def test_tell_mismatched_point_invalid(client):
    cid = _create(client)["id"]
    client.post(f"/campaigns/{cid}/ask")
    r = client.post(f"/campaigns/{cid}/tell", json={"x": [0.123, 0.456], "y": 1.0})
    assert r.status_code == 422


def test_out_of_band_tell(client):
    cid = _create(client)["id"]
    r = client.post(
        f"/campaigns/{cid}/tell",
        json={"x": [0.9, 0.9], "y": 2.0, "out_of_band": True},
    )
    assert r.status_code == 200
    assert r.json()["n_observations"] == 1


def test_state_survives_restart(tmp_path):
    app = create_app(str(tmp_path))
    with TestClient(app) as client:
        cid = _create(client)["id"]
        x = client.post(f"/campaigns/{cid}/ask").json()["x"]
    # a fresh app over the same state dir sees the pending suggestion
    with TestClient(create_app(str(tmp_path))) as client2:
        doc = client2.get(f"/campaigns/{cid}").json()
        assert doc["pending"] == x
        assert client2.post(f"/campaigns/{cid}/ask").status_code == 409
        r = client2.post(f"/campaigns/{cid}/tell", json={"x": x, "y": 1.0})
        assert r.status_code == 200


def test_trace_endpoint(client):
    cid = _create(client, sense="min")["id"]
    for y in (3.0, 1.0, 2.0):
        x = client.post(f"/campaigns/{cid}/ask").json()["x"]
        client.post(f"/campaigns/{cid}/tell", json={"x": x, "y": y})
    rows = client.get(f"/campaigns/{cid}/trace").json()["rows"]
    assert [r["incumbent"] for r in rows] == [3.0, 1.0, 1.0]


def _observe_a_few(client, cid, n=4):
    for _ in range(n):
        x = client.post(f"/campaigns/{cid}/ask").json()["x"]
        y = -float(np.sum((np.array(x) - 0.4) ** 2))
        client.post(f"/campaigns/{cid}/tell", json={"x": x, "y": y})


def test_posterior_and_acquisition_endpoints(client):
    cid = _create(client)["id"]
    empty = client.get(f"/campaigns/{cid}/posterior")
    assert empty.status_code == 409
    _observe_a_few(client, cid)
    r = client.get(f"/campaigns/{cid}/posterior", params={"axis": 1, "grid": 33})
    assert r.status_code == 200
    doc = r.json()
    assert len(doc["grid"]) == len(doc["mean"]) == 33
    assert len(doc["observations"]) == 4
    a = client.get(f"/campaigns/{cid}/acquisition", params={"axis": 0, "grid": 17})
    assert a.status_code == 200 and len(a.json()["values"]) == 17
    bad = client.get(f"/campaigns/{cid}/posterior", params={"axis": 7})
    assert bad.status_code == 422


def test_delete(client):
    cid = _create(client)["id"]
    assert client.delete(f"/campaigns/{cid}").status_code == 204
    assert client.get(f"/campaigns/{cid}").status_code == 404
    assert client.delete(f"/campaigns/{cid}").status_code == 404


def test_heavy_ask_uses_poll_token(client):
    doc = _create(
        client, strategy="RSSGP-BO",
        model_config={"m": 6, "rssgp_iters": 2, "n_init": 2},
        bounds=[[0.0, 1.0]],
    )
    cid = doc["id"]
    r = client.post(f"/campaigns/{cid}/ask")
    assert r.status_code == 202
    poll_url = r.json()["poll"]
    x = None
    for _ in range(200):
        pr = client.get(poll_url)
        if pr.status_code == 200:
            x = pr.json()["x"]
            break
        assert pr.status_code == 202
    assert x is not None
    # the token is single-use
    assert client.get(poll_url).status_code == 404
    assert client.post(f"/campaigns/{cid}/tell", json={"x": x, "y": 0.1}).status_code == 200


def test_unknown_poll_token(client):
    assert client.get("/polls/nothere").status_code == 404
