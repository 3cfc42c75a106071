"""HTTP + WebSocket service tests.

REST endpoints are exercised through the ASGI test client against a
seeded in-memory store; WebSocket tests drive the per-session solver
worker for real, including latest-wins move coalescing, version
monotonicity, and session isolation.
"""

import io
import json
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from moleda.docstore import DocStore
from moleda.serialize import field_summary_to_json
from moleda.server import create_app

FAMILIES = ("alkane", "alcohol", "aromatic", "cyclic", "halide")


def family_smiles(kind: str, size: int) -> str:
    chain = "C" * max(1, size)
    if kind == "alkane":
        return chain
    if kind == "alcohol":
        return chain + "O"
    if kind == "aromatic":
        return chain + "c1ccccc1"
    if kind == "cyclic":
        return chain + "C1CCCCC1"
    return chain + "Cl"


def seeded_records(n: int, seed: int = 0) -> list[dict]:
    rng = np.random.RandomState(seed)
    records = []
    for i in range(n):
        kind = FAMILIES[i % len(FAMILIES)]
        size = int(rng.randint(1, 8))
        records.append({
            "id": f"mol-{i:04d}",
            "smiles": family_smiles(kind, size),
            "mass": round(20.0 + 14.0 * size + float(rng.rand()) * 3.0, 3),
            "family": kind,
        })
    return records


def store_with(records: list[dict]) -> DocStore:
    store = DocStore()
    payload = "\n".join(json.dumps(record) for record in records)
    store.ingest(io.StringIO(payload), "demo", format="jsonl")
    return store


def make_client(records: list[dict] | None = None, n: int = 40, **app_kwargs):
    store = store_with(seeded_records(n) if records is None else records)
    client = TestClient(create_app(store, **app_kwargs))
    client.store = store
    return client


def open_session(client, **body) -> dict:
    body.setdefault("collection", "demo")
    response = client.post("/sessions", json=body)
    assert response.status_code == 200, response.text
    return response.json()


def add_fingerprints(client, sid: str, method: str = "hashed_path",
                     params: dict | None = None) -> dict:
    body = {"method": method}
    if params is not None:
        body["params"] = params
    response = client.post(f"/sessions/{sid}/fingerprint", json=body)
    assert response.status_code == 200, response.text
    return response.json()


def ready_session(client, n_limit: int | None = None, **fp_kwargs) -> str:
    body = {} if n_limit is None else {"limit": n_limit}
    sid = open_session(client, **body)["id"]
    add_fingerprints(client, sid, **fp_kwargs)
    return sid


def embed(client, sid: str, method: str, **extra) -> dict:
    response = client.post(f"/sessions/{sid}/embed",
                           json={"method": method, **extra})
    assert response.status_code == 200, response.text
    return response.json()


def assert_error(response, status: int, code: str) -> None:
    assert response.status_code == status, response.text
    body = response.json()
    assert set(body) == {"code", "message"}
    assert body["code"] == code
    assert isinstance(body["message"], str) and body["message"]


def recv_embedding(ws) -> dict:
    event = ws.receive_json()
    assert event["type"] == "embedding", event
    return event


# ---------------------------------------------------------------------------
# collections
# ---------------------------------------------------------------------------


class TestCollections:
    def test_listing_names_and_sizes(self):
        with make_client(n=12) as client:
            body = client.get("/collections").json()
            assert body == {"collections": [{"name": "demo", "size": 12}]}

    def test_fields_with_inferred_types(self):
        with make_client(n=10) as client:
            body = client.get("/collections/demo/fields").json()
            fields = {entry["name"]: entry["type"] for entry in body["fields"]}
            assert fields == {"smiles": "text", "mass": "number",
                              "family": "text"}
            names = [entry["name"] for entry in body["fields"]]
            assert names == sorted(names)

    def test_unknown_collection_404(self):
        with make_client(n=5) as client:
            for response in (
                client.get("/collections/nope/fields"),
                client.post("/collections/nope/summary",
                            json={"fields": ["mass"]}),
                client.post("/collections/nope/fetch", json={}),
                client.post("/sessions", json={"collection": "nope"}),
            ):
                assert_error(response, 404, "unknown_collection")

    def test_summary_matches_docstore(self):
        with make_client(n=60) as client:
            body = client.post(
                "/collections/demo/summary",
                json={"fields": ["mass", "family"]}).json()
            expected = [field_summary_to_json(s) for s in
                        client.store.summarize("demo", ["mass", "family"])]
            assert body == expected

    def test_summary_opts_filter_bins_group_by(self):
        with make_client(n=60) as client:
            request = {
                "fields": ["mass"],
                "filter": {"field": "family", "op": "in",
                           "value": ["alkane", "halide"]},
                "opts": {"bins": 12, "group_by": "family"},
            }
            body = client.post("/collections/demo/summary", json=request).json()
            expected = [field_summary_to_json(s) for s in
                        client.store.summarize(
                            "demo", ["mass"],
                            filter=request["filter"], bins=12,
                            group_by="family")]
            assert body == expected
            assert body[0]["histogram"] is not None
            assert len(body[0]["histogram"]) == 12
            assert body[1]["group_boxplots"] is not None

    def test_summary_group_by_without_numeric_field_422(self):
        with make_client(n=20) as client:
            response = client.post(
                "/collections/demo/summary",
                json={"fields": ["family"], "opts": {"group_by": "family"}})
            assert_error(response, 422, "non_numeric_field")

    def test_fetch_projection_and_limit(self):
        with make_client(n=30) as client:
            body = client.post(
                "/collections/demo/fetch",
                json={"fields": ["mass"], "limit": 7}).json()
            assert len(body) == 7
            assert [doc["id"] for doc in body] == \
                [f"mol-{i:04d}" for i in range(7)]
            assert all(set(doc) == {"id", "smiles", "mass"} for doc in body)

    def test_fetch_sample_is_seeded(self):
        with make_client(n=50) as client:
            request = {"limit": 10, "sample": True, "seed": 9}
            first = client.post("/collections/demo/fetch", json=request).json()
            second = client.post("/collections/demo/fetch", json=request).json()
            assert first == second
            assert len(first) == 10
            other = client.post(
                "/collections/demo/fetch",
                json={"limit": 10, "sample": True, "seed": 10}).json()
            assert [d["id"] for d in other] != [d["id"] for d in first]

    def test_fetch_invalid_filter_422(self):
        with make_client(n=5) as client:
            response = client.post(
                "/collections/demo/fetch",
                json={"filter": {"field": "mass", "op": "near", "value": 3}})
            assert_error(response, 422, "invalid_filter")

    def test_malformed_body_is_invalid_request(self):
        with make_client(n=5) as client:
            response = client.post("/collections/demo/fetch", json=[1, 2, 3])
            assert_error(response, 422, "invalid_request")


# ---------------------------------------------------------------------------
# session lifecycle
# ---------------------------------------------------------------------------


class TestSessions:
    def test_create_reports_count(self):
        with make_client(n=25) as client:
            created = open_session(client)
            assert created["count"] == 25
            assert created["collection"] == "demo"
            assert isinstance(created["id"], str) and created["id"]

    def test_sample_limit_300_of_1000(self):
        with make_client(n=1000) as client:
            created = open_session(client, limit=300, sample=True, seed=4)
            assert created["count"] == 300

    def test_filtered_session(self):
        with make_client(n=40) as client:
            created = open_session(client, filter={"field": "family", "op": "eq",
                                                 "value": "alkane"})
            assert created["count"] == 8

    def test_unknown_session_404(self):
        with make_client(n=5) as client:
            for response in (
                client.post("/sessions/ghost/fingerprint",
                            json={"method": "hashed_path"}),
                client.post("/sessions/ghost/cluster",
                            json={"algo": "kmeans", "k": 2}),
                client.post("/sessions/ghost/embed", json={"method": "pca"}),
                client.get("/sessions/ghost/search", params={"q": "C"}),
                client.get("/sessions/ghost/embedding"),
                client.delete("/sessions/ghost"),
            ):
                assert_error(response, 404, "unknown_session")

    def test_delete_tears_down(self):
        with make_client(n=10) as client:
            sid = open_session(client)["id"]
            response = client.delete(f"/sessions/{sid}")
            assert response.status_code == 200
            assert response.json() == {"id": sid, "deleted": True}
            assert_error(client.get(f"/sessions/{sid}/search"),
                         404, "unknown_session")
            assert_error(client.delete(f"/sessions/{sid}"),
                         404, "unknown_session")

    def test_idle_sessions_evicted(self):
        now = [0.0]
        with make_client(n=10, clock=lambda: now[0],
                         idle_seconds=3600.0) as client:
            stale = open_session(client)["id"]
            now[0] = 100.0  # touching a session resets its idle clock
            assert client.get(f"/sessions/{stale}/search").status_code == 200
            now[0] = 3000.0
            fresh = open_session(client)["id"]
            now[0] = 3750.0  # stale idle 3650 s > 3600; fresh idle 750 s
            assert_error(client.get(f"/sessions/{stale}/search"),
                         404, "unknown_session")
            assert client.get(f"/sessions/{fresh}/search").status_code == 200

    def test_search_matches_smiles_and_id(self):
        with make_client(n=25) as client:
            sid = open_session(client)["id"]
            body = client.get(f"/sessions/{sid}/search",
                              params={"q": "Cl"}).json()
            halides = [i for i in range(25) if FAMILIES[i % 5] == "halide"]
            assert [m["index"] for m in body["matches"]] == halides
            assert all(m["smiles"].endswith("Cl") for m in body["matches"])
            assert body["count"] == len(halides)

            by_id = client.get(f"/sessions/{sid}/search",
                               params={"q": "mol-000"}).json()
            assert [m["id"] for m in by_id["matches"]] == \
                [f"mol-{i:04d}" for i in range(10)]

            case_sensitive = client.get(f"/sessions/{sid}/search",
                                        params={"q": "cl"}).json()
            assert case_sensitive["count"] == 0


# ---------------------------------------------------------------------------
# fingerprints
# ---------------------------------------------------------------------------


class TestFingerprintEndpoint:
    def test_hashed_path_dimension_and_density(self):
        with make_client(n=20) as client:
            sid = open_session(client)["id"]
            body = add_fingerprints(client, sid)
            assert body["method"] == "hashed_path"
            assert body["dimension"] == 2048
            assert body["count"] == 20
            assert body["n_failed"] == 0
            density = body["density"]
            assert 0.0 < density["min"] <= density["mean"] <= density["max"] < 1.0

    def test_params_forwarded(self):
        with make_client(n=10) as client:
            sid = open_session(client)["id"]
            body = add_fingerprints(client, sid,
                                    params={"max_len": 3, "n_bits": 256})
            assert body["dimension"] == 256

    def test_atmo_keys_dimension(self):
        with make_client(n=10) as client:
            sid = open_session(client)["id"]
            body = add_fingerprints(client, sid, method="atmo_keys")
            assert body["dimension"] == 24

    def test_unparseable_smiles_counted_not_fatal(self):
        records = seeded_records(6)
        records[2]["smiles"] = "C(C"  # unbalanced parenthesis
        with make_client(records) as client:
            sid = open_session(client)["id"]
            body = add_fingerprints(client, sid)
            assert body["n_failed"] == 1
            assert body["count"] == 6
            assert body["density"]["min"] == 0.0

    def test_invalid_method_and_params(self):
        with make_client(n=5) as client:
            sid = open_session(client)["id"]
            assert_error(
                client.post(f"/sessions/{sid}/fingerprint",
                            json={"method": "morgan"}),
                422, "unknown_method")
            assert_error(
                client.post(f"/sessions/{sid}/fingerprint",
                            json={"method": "hashed_path",
                                  "params": {"n_bits": 100}}),
                422, "invalid_parameter")
            assert_error(
                client.post(f"/sessions/{sid}/fingerprint",
                            json={"method": "atmo_keys",
                                  "params": {"n_bits": 256}}),
                422, "invalid_parameter")


# ---------------------------------------------------------------------------
# clustering
# ---------------------------------------------------------------------------


class TestClusterEndpoint:
    def test_requires_fingerprints(self):
        with make_client(n=10) as client:
            sid = open_session(client)["id"]
            assert_error(
                client.post(f"/sessions/{sid}/cluster",
                            json={"algo": "kmeans", "k": 2}),
                409, "fingerprints_missing")

    def test_kmeans_labels_and_validity(self):
        with make_client(n=30) as client:
            sid = ready_session(client)
            body = client.post(
                f"/sessions/{sid}/cluster",
                json={"algo": "kmeans", "k": 3, "seed": 11}).json()
            assert len(body["labels"]) == 30
            assert sorted(set(body["labels"])) == [0, 1, 2]
            assert body["k"] == 3
            assert body["seed"] == 11
            assert body["inertia"] >= 0.0
            assert body["iterations"] >= 1
            validity = body["validity"]
            assert -1.0 <= validity["silhouette"] <= 1.0
            assert validity["calinski_harabasz"] is None or \
                validity["calinski_harabasz"] >= 0.0
            assert validity["davies_bouldin"] is None or \
                validity["davies_bouldin"] >= 0.0

    def test_kmeans_is_deterministic(self):
        with make_client(n=30) as client:
            sid = ready_session(client)
            request = {"algo": "kmeans", "k": 4, "seed": 7}
            first = client.post(f"/sessions/{sid}/cluster", json=request).json()
            second = client.post(f"/sessions/{sid}/cluster", json=request).json()
            assert first == second

    def test_agglomerative_with_linkage(self):
        with make_client(n=24) as client:
            sid = ready_session(client)
            body = client.post(
                f"/sessions/{sid}/cluster",
                json={"algo": "agglomerative", "k": 4,
                      "linkage": "ward"}).json()
            assert len(body["labels"]) == 24
            assert body["seed"] is None
            assert sorted(set(body["labels"])) == [0, 1, 2, 3]

    def test_k_too_large_mapped(self):
        with make_client(n=8) as client:
            sid = ready_session(client)
            assert_error(
                client.post(f"/sessions/{sid}/cluster",
                            json={"algo": "kmeans", "k": 9}),
                422, "k_too_large")

    def test_validity_null_for_degenerate_k(self):
        with make_client(n=8) as client:
            sid = ready_session(client)
            body = client.post(f"/sessions/{sid}/cluster",
                               json={"algo": "kmeans", "k": 1}).json()
            assert body["validity"] is None

    def test_invalid_algo_and_linkage(self):
        with make_client(n=8) as client:
            sid = ready_session(client)
            assert_error(
                client.post(f"/sessions/{sid}/cluster",
                            json={"algo": "dbscan", "k": 2}),
                422, "unknown_method")
            assert_error(
                client.post(f"/sessions/{sid}/cluster",
                            json={"algo": "agglomerative", "k": 2,
                                  "linkage": "centroid"}),
                422, "invalid_parameter")
            assert_error(
                client.post(f"/sessions/{sid}/cluster",
                            json={"algo": "kmeans", "k": 0}),
                422, "invalid_parameter")


# ---------------------------------------------------------------------------
# embedding (REST)
# ---------------------------------------------------------------------------


class TestEmbedEndpoint:
    def test_requires_fingerprints(self):
        with make_client(n=10) as client:
            sid = open_session(client)["id"]
            assert_error(
                client.post(f"/sessions/{sid}/embed", json={"method": "pca"}),
                409, "fingerprints_missing")

    def test_kpca_coords_and_quality(self):
        with make_client(n=40) as client:
            sid = ready_session(client)
            body = embed(client, sid, "kpca",
                         kernel={"kind": "rbf", "gamma": 0.5})
            coords = np.array(body["coords"])
            assert coords.shape == (40, 2)
            assert np.isfinite(coords).all()
            spans = coords.max(axis=0) - coords.min(axis=0)
            assert math.isclose(spans.max(), 2.0, rel_tol=0, abs_tol=1e-9)
            quality = body["quality"]
            assert quality["k_used"] == 10
            assert 0.0 <= quality["trustworthiness"] <= 1.0
            assert 0.0 <= quality["knn_preservation"] <= 1.0
            assert body["constraints"] is None
            assert body["version"] == 1

    def test_ckpca_reduces_to_kpca_end_to_end(self):
        with make_client(n=40) as client:
            sid = ready_session(client)
            static = embed(client, sid, "kpca")
            interactive = embed(client, sid, "ckpca")
            a = np.array(static["coords"])
            b = np.array(interactive["coords"])
            assert np.abs(a - b).max() <= 1e-8
            assert interactive["constraints"]["control_points"] == []
            assert interactive["constraints"]["lambda"] == pytest.approx(1e-3)
            assert interactive["version"] == 2

    def test_ckpca_with_initial_constraints(self):
        with make_client(n=30) as client:
            sid = ready_session(client)
            plain = embed(client, sid, "ckpca")
            target = plain["coords"][5]
            constrained = embed(
                client, sid, "ckpca",
                constraints={
                    "control_points": [
                        {"index": 5, "x": target[0], "y": target[1]}],
                    "must_links": [[0, 1]],
                    "mu_ml": 2.5,
                })
            echo = constrained["constraints"]
            assert echo["control_points"] == [
                {"index": 5, "x": target[0], "y": target[1]}]
            assert echo["must_links"] == [[0, 1]]
            assert echo["mu_ml"] == 2.5

    def test_embedding_get_matches_last_embed(self):
        with make_client(n=20) as client:
            sid = ready_session(client)
            assert_error(client.get(f"/sessions/{sid}/embedding"),
                         409, "no_embedding")
            body = embed(client, sid, "pca")
            current = client.get(f"/sessions/{sid}/embedding").json()
            assert current["coords"] == body["coords"]
            assert current["version"] == body["version"]
            assert current["method"] == "pca"

    def test_tsne_runs_with_params(self):
        with make_client(n=30) as client:
            sid = ready_session(client)
            body = embed(client, sid, "tsne",
                         params={"perplexity": 5.0, "iters": 120, "seed": 3})
            coords = np.array(body["coords"])
            assert coords.shape == (30, 2)
            assert np.isfinite(coords).all()
            assert body["quality"] is not None

    def test_tsne_perplexity_too_large_mapped(self):
        with make_client(n=12) as client:
            sid = ready_session(client)
            assert_error(
                client.post(f"/sessions/{sid}/embed",
                            json={"method": "tsne",
                                  "params": {"perplexity": 10.0}}),
                422, "perplexity_too_large")

    def test_lsp_needs_three_controls(self):
        with make_client(n=30) as client:
            sid = ready_session(client)
            assert_error(
                client.post(
                    f"/sessions/{sid}/embed",
                    json={"method": "lsp",
                          "constraints": {"control_points": [
                              {"index": 0, "x": 0.0, "y": 0.0},
                              {"index": 1, "x": 1.0, "y": 0.0}]}}),
                422, "too_few_controls")
            body = embed(client, sid, "lsp",
                         constraints={"control_points": [
                             {"index": 0, "x": 0.0, "y": 0.0},
                             {"index": 1, "x": 1.0, "y": 0.0},
                             {"index": 2, "x": 0.0, "y": 1.0}]})
            assert np.isfinite(np.array(body["coords"])).all()

    def test_invalid_method_and_kernel(self):
        with make_client(n=10) as client:
            sid = ready_session(client)
            assert_error(
                client.post(f"/sessions/{sid}/embed",
                            json={"method": "umap"}),
                422, "unknown_method")
            assert_error(
                client.post(f"/sessions/{sid}/embed",
                            json={"method": "kpca",
                                  "kernel": {"kind": "sigmoid"}}),
                422, "invalid_parameter")


# ---------------------------------------------------------------------------
# WebSocket interaction
# ---------------------------------------------------------------------------


class TestInteraction:
    def test_unknown_session_rejected(self):
        with make_client(n=10) as client:
            with client.websocket_connect("/sessions/ghost/interact") as ws:
                event = ws.receive_json()
                assert event["type"] == "error"
                assert event["code"] == "unknown_session"

    def test_static_embedding_rejects_interaction(self):
        with make_client(n=20) as client:
            sid = ready_session(client)
            embed(client, sid, "kpca")
            with client.websocket_connect(f"/sessions/{sid}/interact") as ws:
                recv_embedding(ws)  # snapshot of the static embedding
                ws.send_json({"type": "add_control", "index": 0,
                              "x": 0.0, "y": 0.0})
                event = ws.receive_json()
                assert event["type"] == "error"
                assert event["code"] == "not_ckpca"

    def test_snapshot_then_add_control_small_displacement(self):
        with make_client(n=30) as client:
            sid = ready_session(client)
            embed(client, sid, "ckpca", kernel={"kind": "rbf", "gamma": 0.5})
            with client.websocket_connect(f"/sessions/{sid}/interact") as ws:
                snapshot = recv_embedding(ws)
                before = np.array(snapshot["coords"])
                diameter = max(
                    float(np.linalg.norm(p - q))
                    for p in before for q in before)
                x, y = snapshot["coords"][4]
                ws.send_json({"type": "add_control", "index": 4,
                              "x": x, "y": y})
                event = recv_embedding(ws)
                assert event["version"] > snapshot["version"]
                after = np.array(event["coords"])
                displacement = float(np.abs(after - before).max())
                assert displacement < 1e-3 * diameter
                assert event["constraints"]["control_points"] == [
                    {"index": 4, "x": x, "y": y}]

    def test_hundred_rapid_moves_coalesce(self):
        with make_client(n=25) as client:
            sid = ready_session(client)
            embed(client, sid, "ckpca")
            with client.websocket_connect(f"/sessions/{sid}/interact") as ws:
                recv_embedding(ws)
                ws.send_json({"type": "add_control", "index": 3,
                              "x": 0.1, "y": 0.1})
                recv_embedding(ws)
                rng = np.random.RandomState(0)
                targets = [(round(float(x), 6), round(float(y), 6))
                           for x, y in rng.uniform(-1, 1, size=(100, 2))]
                for x, y in targets:
                    ws.send_json({"type": "move_control", "index": 3,
                                  "x": x, "y": y})
                final_x, final_y = targets[-1]
                events = []
                while True:
                    event = recv_embedding(ws)
                    events.append(event)
                    control = event["constraints"]["control_points"][0]
                    if control["x"] == final_x and control["y"] == final_y:
                        break
                assert 1 <= len(events) <= 100
                last = events[-1]
                fresh = client.get(f"/sessions/{sid}/embedding").json()
                assert fresh["version"] == last["version"]
                assert fresh["coords"] == last["coords"]
                assert fresh["constraints"] == last["constraints"]

    def test_versions_strictly_increase_across_ops(self):
        with make_client(n=25) as client:
            sid = ready_session(client)
            embed(client, sid, "ckpca")
            with client.websocket_connect(f"/sessions/{sid}/interact") as ws:
                versions = [recv_embedding(ws)["version"]]
                script = [
                    {"type": "add_control", "index": 2, "x": 0.3, "y": 0.0},
                    {"type": "move_control", "index": 2, "x": 0.4, "y": 0.1},
                    {"type": "add_link", "kind": "must", "i": 0, "j": 1},
                    {"type": "set_strength", "target": "must", "value": 4.0},
                    {"type": "add_link", "kind": "cannot", "i": 3, "j": 4},
                    {"type": "remove_link", "kind": "must", "i": 0, "j": 1},
                    {"type": "remove_control", "index": 2},
                ]
                for message in script:
                    ws.send_json(message)
                    versions.append(recv_embedding(ws)["version"])
                assert all(b > a for a, b in zip(versions, versions[1:]))

    def test_set_strength_zero_equals_no_link_solve(self):
        with make_client(n=30) as client:
            sid = ready_session(client)
            plain = embed(client, sid, "ckpca")
            baseline = np.array(plain["coords"])
            with client.websocket_connect(f"/sessions/{sid}/interact") as ws:
                recv_embedding(ws)
                ws.send_json({"type": "add_link", "kind": "must",
                              "i": 0, "j": 17})
                linked = np.array(recv_embedding(ws)["coords"])
                assert np.abs(linked - baseline).max() > 1e-12
                ws.send_json({"type": "set_strength", "target": "must",
                              "value": 0.0})
                relaxed = recv_embedding(ws)
                assert np.abs(np.array(relaxed["coords"]) - baseline).max() \
                    <= 1e-8
                assert relaxed["constraints"]["mu_ml"] == 0.0

    def test_move_then_remove_control_applies_in_order(self):
        with make_client(n=25) as client:
            sid = ready_session(client)
            plain = embed(client, sid, "ckpca")
            with client.websocket_connect(f"/sessions/{sid}/interact") as ws:
                recv_embedding(ws)
                ws.send_json({"type": "add_control", "index": 0,
                              "x": 0.5, "y": 0.5})
                ws.send_json({"type": "move_control", "index": 0,
                              "x": -0.5, "y": 0.25})
                ws.send_json({"type": "remove_control", "index": 0})
                final = None
                while final is None:
                    event = recv_embedding(ws)
                    if event["constraints"]["control_points"] == []:
                        final = event
                assert final["coords"] == plain["coords"]
                fresh = client.get(f"/sessions/{sid}/embedding").json()
                assert fresh["coords"] == final["coords"]
                assert fresh["version"] == final["version"]

    def test_sessions_are_isolated(self):
        with make_client(n=25) as client:
            first = ready_session(client)
            second = ready_session(client)
            embed(client, first, "ckpca")
            embed(client, second, "ckpca")
            before = client.get(f"/sessions/{second}/embedding").json()
            with client.websocket_connect(f"/sessions/{first}/interact") as ws:
                recv_embedding(ws)
                ws.send_json({"type": "add_control", "index": 1,
                              "x": 0.9, "y": -0.9})
                recv_embedding(ws)
                ws.send_json({"type": "move_control", "index": 1,
                              "x": -0.9, "y": 0.9})
                # drain until the move is reflected
                while True:
                    control = recv_embedding(ws)["constraints"][
                        "control_points"][0]
                    if control["x"] == -0.9 and control["y"] == 0.9:
                        break
            after = client.get(f"/sessions/{second}/embedding").json()
            assert after == before

            # the same op on two identical sessions gives identical coords
            with client.websocket_connect(
                    f"/sessions/{second}/interact") as ws:
                recv_embedding(ws)
                ws.send_json({"type": "add_control", "index": 1,
                              "x": 0.9, "y": -0.9})
                second_event = recv_embedding(ws)
            replay = ready_session(client)
            embed(client, replay, "ckpca")
            with client.websocket_connect(
                    f"/sessions/{replay}/interact") as ws:
                recv_embedding(ws)
                ws.send_json({"type": "add_control", "index": 1,
                              "x": 0.9, "y": -0.9})
                replay_event = recv_embedding(ws)
            assert replay_event["coords"] == second_event["coords"]

    def test_error_events_for_bad_messages(self):
        with make_client(n=20) as client:
            sid = ready_session(client)
            embed(client, sid, "ckpca")
            with client.websocket_connect(f"/sessions/{sid}/interact") as ws:
                recv_embedding(ws)

                ws.send_json({"type": "warp", "index": 0})
                assert ws.receive_json()["code"] == "invalid_message"

                ws.send_text("{not json")
                assert ws.receive_json()["code"] == "invalid_message"

                ws.send_json({"type": "move_control", "index": 0,
                              "x": 0.0, "y": 0.0})
                assert ws.receive_json()["code"] == "unknown_control"

                ws.send_json({"type": "remove_control", "index": 0})
                assert ws.receive_json()["code"] == "unknown_control"

                ws.send_json({"type": "add_link", "kind": "must",
                              "i": 2, "j": 2})
                assert ws.receive_json()["code"] == "invalid_constraint"

                ws.send_json({"type": "add_control", "index": 500,
                              "x": 0.0, "y": 0.0})
                assert ws.receive_json()["code"] == "invalid_constraint"

                ws.send_json({"type": "remove_link", "kind": "must",
                              "i": 0, "j": 1})
                assert ws.receive_json()["code"] == "unknown_link"

                ws.send_json({"type": "set_strength", "target": "ridge",
                              "value": 1.0})
                assert ws.receive_json()["code"] == "invalid_message"

                ws.send_json({"type": "set_strength", "target": "must",
                              "value": -1.0})
                assert ws.receive_json()["code"] == "invalid_constraint"

                # the connection stays usable after errors
                ws.send_json({"type": "add_control", "index": 0,
                              "x": 0.2, "y": 0.2})
                event = recv_embedding(ws)
                assert event["constraints"]["control_points"][0]["index"] == 0

    def test_two_subscribers_both_receive_events(self):
        with make_client(n=20) as client:
            sid = ready_session(client)
            embed(client, sid, "ckpca")
            path = f"/sessions/{sid}/interact"
            with client.websocket_connect(path) as first, \
                    client.websocket_connect(path) as second:
                recv_embedding(first)
                recv_embedding(second)
                first.send_json({"type": "add_control", "index": 2,
                                 "x": 0.0, "y": 0.4})
                event_first = recv_embedding(first)
                event_second = recv_embedding(second)
                assert event_first == event_second
