"""
HTTP identification service tests.
"""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from gaitwalk.core.config import Settings, get_settings
from gaitwalk.evaluation.protocol import enroll_subjects
from gaitwalk.main import app

from helpers import wav_bytes


@pytest.fixture(scope="module")
def model_dir(small_corpus, small_hmm, tmp_path_factory):
    directory = tmp_path_factory.mktemp("service_models")
    enroll_subjects(small_corpus, Settings().features, small_hmm).save(directory)
    return directory


@pytest.fixture
def client(model_dir):
    app.dependency_overrides[get_settings] = lambda: Settings(model_dir=model_dir)
    yield TestClient(app)
    app.dependency_overrides.clear()


@pytest.fixture
def unconfigured():
    app.dependency_overrides[get_settings] = lambda: Settings(model_dir=None)
    yield TestClient(app)
    app.dependency_overrides.clear()


def _upload(client, payload, **params):
    files = {"recording": ("walk.wav", payload, "audio/wav")}
    return client.post("/identify", files=files, params=params)


def test_health_reports_models(client):
    body = client.get("/health").json()
    assert body == {"application": "healthy", "models_loaded": True, "subjects": 3}


def test_health_without_models(unconfigured):
    body = unconfigured.get("/health").json()
    assert body["models_loaded"] is False
    assert body["subjects"] == 0


def test_subjects(client):
    body = client.get("/subjects").json()
    assert body["subjects"] == ["subject001", "subject002", "subject003"]
    assert body["states"] == 5
    assert body["dim"] == 39
    assert body["cyclic"] is True


def test_identify_upload(client, small_corpus):
    entry = small_corpus.identification[0]
    response = _upload(client, entry.path.read_bytes())
    assert response.status_code == 200
    body = response.json()
    assert body["predicted"] == body["ranked"][0]["subject_id"]
    assert len(body["ranked"]) == 3
    scores = [row["log_likelihood"] for row in body["ranked"]]
    assert scores == sorted(scores, reverse=True)
    assert body["step_count"] >= 1
    assert len(body["step_boundaries_seconds"]) == body["step_count"] - 1


def test_identify_top(client, small_corpus):
    response = _upload(client, small_corpus.identification[0].path.read_bytes(), top=1)
    assert response.status_code == 200
    assert len(response.json()["ranked"]) == 1


def test_identify_without_models(unconfigured, small_corpus):
    response = _upload(unconfigured, small_corpus.identification[0].path.read_bytes())
    assert response.status_code == 503


def test_identify_rejects_garbage(client):
    response = _upload(client, b"definitely not audio")
    assert response.status_code == 400


def test_identify_too_short_for_single_pass(client):
    payload = wav_bytes(np.full(800, 300, dtype=np.int16), 16000)
    response = _upload(client, payload, grammar="single")
    assert response.status_code == 422
    assert "no subject model admits" in response.json()["detail"]
