import json
import threading

import pytest
import uvicorn
from fastapi.testclient import TestClient

from mlm_sidecar.classifier import BowClassifier
from mlm_sidecar.encoder import HashedSentenceEncoder
from mlm_sidecar.model import MaskedWordModel, build_model, bundled_corpus_lines
from mlm_sidecar.service import create_app

# hand-written two-class bag-of-words checkpoint in the portable schema
CLASSIFIER_JSON = {
    "kind": "logistic_regression",
    "vocabulary": {"good": 0, "bad": 1, "movie": 2},
    "weights": [[-1.5, 1.5, 0.1], [1.5, -1.5, -0.1]],
    "bias": [0.25, -0.25],
    "labels": [0, 1],
    "train_accuracy": 1.0,
}


@pytest.fixture(scope="session")
def model() -> MaskedWordModel:
    return build_model(bundled_corpus_lines())


@pytest.fixture(scope="session")
def classifier(tmp_path_factory) -> BowClassifier:
    path = tmp_path_factory.mktemp("clf") / "model.json"
    path.write_text(json.dumps(CLASSIFIER_JSON), encoding="utf-8")
    return BowClassifier.load(path)


@pytest.fixture(scope="session")
def client(model, classifier) -> TestClient:
    app = create_app(model, HashedSentenceEncoder(32), classifier)
    return TestClient(app)


@pytest.fixture(scope="session")
def live_server(model, classifier):
    """Real uvicorn server on an ephemeral port, for wire-level tests."""
    app = create_app(model, HashedSentenceEncoder(32), classifier)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    import time

    for _ in range(200):
        if server.started:
            break
        time.sleep(0.05)
    else:
        raise RuntimeError("uvicorn did not start")
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
