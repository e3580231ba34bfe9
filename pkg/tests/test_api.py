from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from app.core.config import settings
from app.services.estimators import describe
from app.services.ingest import read_dataset, write_dataset
from app.services.synth import GeneratorConfig, MarkovModel, generate_markov
from main import app

client = TestClient(app)


@pytest.fixture(scope="module")
def data_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("api") / "markov.jsonl"
    ds = generate_markov(MarkovModel.persistent(3, 0.8), GeneratorConfig(thread_count=300, mean_length=30.0, seed=2))
    write_dataset(ds, path)
    return str(path)


def test_health():
    r = client.get("/health")
    assert r.status_code == 200
    body = r.json()
    assert body["ok"] is True
    assert body["defaults"]["bin_width"] == settings.BIN_WIDTH


def test_histogram(data_path):
    r = client.get("/histogram", params={"path": data_path, "field": "sub"})
    assert r.status_code == 200
    body = r.json()
    assert len(body["rows"]) == 10
    assert sum(row["frequency"] for row in body["rows"]) == pytest.approx(1.0)
    assert body["params"]["field"] == "p_sub"


def test_relative_path_resolves_against_data_dir(data_path, monkeypatch):
    p = Path(data_path)
    monkeypatch.setattr(settings, "DATA_DIR", p.parent)
    r = client.get("/describe", params={"path": p.name})
    assert r.status_code == 200
    assert r.json()["threads"] == 300


def test_describe_uses_configured_sub_cut(data_path, monkeypatch):
    monkeypatch.setattr(settings, "SUB_CUT", 0.99)
    expected = describe(read_dataset(data_path), 0.99)["subjective"]
    assert expected < describe(read_dataset(data_path), 0.5)["subjective"]
    r = client.get("/describe", params={"path": data_path})
    assert r.json()["subjective"] == expected
    r = client.get("/describe", params={"path": data_path, "sub_cut": 0.5})
    assert r.json()["subjective"] > expected


def test_missing_file_is_404(tmp_path):
    r = client.get("/histogram", params={"path": str(tmp_path / "nope.jsonl")})
    assert r.status_code == 404


def test_bad_record_is_422(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("thread_id,index,p_pos,p_sub\na,0,1.5,0.5\n", encoding="utf-8")
    r = client.get("/validate", params={"path": str(path)})
    assert r.status_code == 422
    assert r.json()["error"] == "DomainError"


def test_invalid_utf8_is_422(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_bytes(b"{\"thread_id\": \"a\xff\", \"index\": 0, \"p_pos\": 0.5, \"p_sub\": 0.5}\n")
    r = client.get("/histogram", params={"path": str(path)})
    assert r.status_code == 422
    assert r.json()["error"] == "ParseError"
    assert ":1:" in r.json()["detail"]


def test_validate(data_path):
    r = client.get("/validate", params={"path": data_path})
    assert r.status_code == 200
    assert r.json()["ok"] is True


def test_thread_means(data_path):
    r = client.get("/thread-means", params={"path": data_path, "seed": 1, "all_comments": True})
    assert r.status_code == 200
    body = r.json()
    assert body["params"]["sub_cut"] == "none"
    assert sum(row["data_count"] for row in body["rows"]) == 300


def test_clusters(data_path):
    r = client.get("/clusters", params={"path": data_path, "thresholds": "0.3,0.6,0.9", "seed": 4})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert [row["T"] for row in rows] == [0.3, 0.6, 0.9]
    assert all(row["data"] > row["global_shuffled"] for row in rows)


@pytest.mark.parametrize("thresholds, status", [("x,y", 400), ("0.9,0.1", 400)])
def test_clusters_bad_thresholds(data_path, thresholds, status):
    r = client.get("/clusters", params={"path": data_path, "thresholds": thresholds})
    assert r.status_code == status


def test_pmi_has_nulls_for_undefined_cells(data_path):
    r = client.get("/pmi", params={"path": data_path, "field": "pos"})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert len(rows) == 10
    assert rows[1]["0.05"] is None
    assert rows[0]["0.05"] > 0


def test_mutual_information(data_path):
    r = client.get("/mutual-information", params={"path": data_path, "seed": 7, "bootstrap": 20})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert [row["model"] for row in rows] == ["no shuffle", "thread shuffle", "global shuffle"]
    assert rows[0]["mi_plugin"] > rows[2]["mi_plugin"]
    again = client.get("/mutual-information", params={"path": data_path, "seed": 7, "bootstrap": 20})
    assert again.json() == r.json()


def test_three_step(data_path):
    r = client.get("/three-step", params={"path": data_path, "min_count": 5})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert rows[9]["c_plus"] > 1 > rows[0]["c_plus"]
    assert rows[5]["c_plus"] is None


def test_three_step_without_triples_is_422(tmp_path):
    path = tmp_path / "pairs.jsonl"
    path.write_text(
        '{"thread_id": "a", "index": 0, "p_pos": 0.9, "p_sub": 0.5}\n'
        '{"thread_id": "a", "index": 1, "p_pos": 0.9, "p_sub": 0.5}\n',
        encoding="utf-8",
    )
    r = client.get("/three-step", params={"path": str(path)})
    assert r.status_code == 422
    assert r.json()["error"] == "UndefinedCurveError"


def test_query_validation(data_path):
    assert client.get("/histogram", params={"path": data_path, "bin_width": 0}).status_code == 422
    assert client.get("/histogram", params={"path": data_path, "field": "neg"}).status_code == 422
