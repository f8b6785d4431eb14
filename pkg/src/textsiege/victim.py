"""Query-only victim classifiers.

Attacks see a victim purely through :meth:`Victim.predict`; every call is
counted so attack cost can be reported.  Two in-process bag-of-words models
(multinomial naive Bayes and softmax logistic regression) serve as desk-scale
victims, and :class:`RemoteVictim` speaks the sidecar's ``/v1/classify`` wire
protocol.
"""

from __future__ import annotations

import json
import math
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyDataset,
    ModelNotTrained,
    ProtocolError,
    RemoteUnavailable,
    SingleClassDataset,
)
from .text import TokenizedText, tokenize

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class Prediction:
    """Per-class probabilities plus the raw scores they were derived from."""

    probs: tuple[float, ...]
    scores: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not self.probs:
            raise ValueError("prediction needs at least one class")
        if any(p < -1e-12 or p > 1 + 1e-12 for p in self.probs):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1")
        if self.scores is not None:
            if len(self.scores) != len(self.probs):
                raise ValueError("scores and probs must have equal length")
            if int(np.argmax(self.scores)) != int(np.argmax(self.probs)):
                raise ValueError("argmax of scores must match argmax of probs")

    @property
    def num_classes(self) -> int:
        return len(self.probs)

    @property
    def label_index(self) -> int:
        return int(np.argmax(self.probs))


def surrogate_scores(p: Prediction) -> tuple[float, ...]:
    """Raw scores if the victim exposes them, else clamped log-probabilities."""
    if p.scores is not None:
        return p.scores
    return tuple(math.log(max(prob, PROB_FLOOR)) for prob in p.probs)


class Victim:
    """Black-box classifier interface: predict one text, count the query."""

    label_names: tuple[str, ...] = ()

    def __init__(self) -> None:
        self._query_count = 0
        self._count_lock = threading.Lock()

    @property
    def query_count(self) -> int:
        return self._query_count

    def _count_query(self) -> None:
        with self._count_lock:
            self._query_count += 1

    def predict(self, text: TokenizedText) -> Prediction:
        raise NotImplementedError


class QueryCountingProxy(Victim):
    """Per-consumer view of a shared victim.

    The wrapped victim keeps its global count (one increment per predict,
    whoever calls); the proxy's own counter isolates one attack run so
    per-sample query numbers stay correct under parallel campaigns.
    """

    def __init__(self, inner: Victim):
        super().__init__()
        self.inner = inner

    @property
    def label_names(self) -> tuple[str, ...]:  # type: ignore[override]
        return self.inner.label_names

    def predict(self, text: TokenizedText) -> Prediction:
        self._count_query()
        return self.inner.predict(text)


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


@dataclass
class BowVictimModel:
    """Trained bag-of-words parameters, portable via :meth:`to_json`."""

    kind: str  # "naive_bayes" | "logistic_regression"
    vocabulary: dict[str, int]
    weights: np.ndarray  # (classes, vocab) log-likelihoods (NB) or coefficients (LR)
    bias: np.ndarray  # (classes,) log-priors (NB) or intercepts (LR)
    labels: tuple[int, ...]
    train_accuracy: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "vocabulary": self.vocabulary,
                "weights": self.weights.tolist(),
                "bias": self.bias.tolist(),
                "labels": list(self.labels),
                "train_accuracy": self.train_accuracy,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, payload: str) -> "BowVictimModel":
        raw = json.loads(payload)
        return cls(
            kind=raw["kind"],
            vocabulary={w: int(i) for w, i in raw["vocabulary"].items()},
            weights=np.asarray(raw["weights"], dtype=float),
            bias=np.asarray(raw["bias"], dtype=float),
            labels=tuple(int(x) for x in raw["labels"]),
            train_accuracy=float(raw.get("train_accuracy", 0.0)),
        )


class BowVictim(Victim):
    """In-process victim scoring bag-of-words counts with a trained model.

    Scores are log prior + log likelihood for naive Bayes and logits for
    logistic regression; probabilities are the softmax of the scores, so an
    empty (or all out-of-vocabulary) text falls back to class priors / bias.
    """

    def __init__(self, model: BowVictimModel):
        super().__init__()
        self.model = model
        self.label_names = tuple(str(lab) for lab in model.labels)

    def label_index(self, label: int) -> int:
        return self.model.labels.index(label)

    def _features(self, text: TokenizedText) -> dict[int, int]:
        counts: dict[int, int] = {}
        vocab = self.model.vocabulary
        for tok in text.tokens:
            idx = vocab.get(tok.lower())
            if idx is not None:
                counts[idx] = counts.get(idx, 0) + 1
        return counts

    def predict(self, text: TokenizedText) -> Prediction:
        if self.model is None:
            raise ModelNotTrained("no model loaded")
        self._count_query()
        scores = self.model.bias.copy()
        weights = self.model.weights
        for idx, count in self._features(text).items():
            scores += count * weights[:, idx]
        probs = _softmax(scores)
        if self.model.kind == "naive_bayes":
            # report log-posteriors, not log-joints: deleting a token then
            # shifts the score by its discriminative contribution rather than
            # by its raw log-likelihood
            scores = scores - (scores.max() + np.log(np.exp(scores - scores.max()).sum()))
        return Prediction(tuple(float(p) for p in probs), tuple(float(s) for s in scores))


def _prepare_corpus(
    dataset: list[tuple[str, int]],
) -> tuple[list[list[str]], np.ndarray, dict[str, int], tuple[int, ...]]:
    if not dataset:
        raise EmptyDataset("training dataset is empty")
    labels = tuple(sorted({label for _, label in dataset}))
    if len(labels) < 2:
        raise SingleClassDataset(f"need at least two classes, got {labels}")
    docs = [[tok.lower() for tok in tokenize(text).tokens] for text, _ in dataset]
    vocab: dict[str, int] = {}
    for doc in docs:
        for tok in doc:
            if tok not in vocab:
                vocab[tok] = len(vocab)
    y = np.array([labels.index(label) for _, label in dataset])
    return docs, y, vocab, labels


def _count_matrix(docs: list[list[str]], vocab: dict[str, int]) -> np.ndarray:
    counts = np.zeros((len(docs), len(vocab)))
    for row, doc in enumerate(docs):
        for tok in doc:
            idx = vocab.get(tok)
            if idx is not None:
                counts[row, idx] += 1
    return counts


def train_naive_bayes(dataset: list[tuple[str, int]], alpha: float = 1.0) -> BowVictimModel:
    """Multinomial naive Bayes with Laplace smoothing."""
    docs, y, vocab, labels = _prepare_corpus(dataset)
    counts = _count_matrix(docs, vocab)
    n_classes = len(labels)
    word_totals = np.zeros((n_classes, len(vocab)))
    class_docs = np.zeros(n_classes)
    for c in range(n_classes):
        mask = y == c
        word_totals[c] = counts[mask].sum(axis=0)
        class_docs[c] = mask.sum()
    log_likelihood = np.log(word_totals + alpha) - np.log(
        word_totals.sum(axis=1, keepdims=True) + alpha * len(vocab)
    )
    log_prior = np.log(class_docs / class_docs.sum())
    model = BowVictimModel("naive_bayes", vocab, log_likelihood, log_prior, labels)
    model.train_accuracy = _training_accuracy(model, counts, y)
    return model


def train_logistic_regression(
    dataset: list[tuple[str, int]],
    learning_rate: float = 0.1,
    epochs: int = 500,
    l2: float = 1e-4,
    seed: int = 0,
) -> BowVictimModel:
    """Softmax regression by full-batch gradient descent.

    Weights start at zero, so the result is deterministic; ``seed`` is kept in
    the signature for config plumbing and future stochastic variants.
    """
    del seed  # zero-init training is already deterministic
    docs, y, vocab, labels = _prepare_corpus(dataset)
    counts = _count_matrix(docs, vocab)
    n_docs, n_feats = counts.shape
    n_classes = len(labels)
    weights = np.zeros((n_classes, n_feats))
    bias = np.zeros(n_classes)
    onehot = np.zeros((n_docs, n_classes))
    onehot[np.arange(n_docs), y] = 1.0
    for _ in range(epochs):
        logits = counts @ weights.T + bias
        logits -= logits.max(axis=1, keepdims=True)
        exp = np.exp(logits)
        probs = exp / exp.sum(axis=1, keepdims=True)
        err = probs - onehot
        grad_w = err.T @ counts / n_docs + l2 * weights
        grad_b = err.mean(axis=0)
        weights -= learning_rate * grad_w
        bias -= learning_rate * grad_b
    model = BowVictimModel("logistic_regression", vocab, weights, bias, labels)
    model.train_accuracy = _training_accuracy(model, counts, y)
    return model


def _training_accuracy(model: BowVictimModel, counts: np.ndarray, y: np.ndarray) -> float:
    scores = counts @ model.weights.T + model.bias
    return float((scores.argmax(axis=1) == y).mean())


def train_bow_victim(
    dataset: list[tuple[str, int]], kind: str, **hyperparams
) -> BowVictimModel:
    if kind == "naive_bayes":
        return train_naive_bayes(dataset, **hyperparams)
    if kind == "logistic_regression":
        return train_logistic_regression(dataset, **hyperparams)
    raise ValueError(f"unknown victim kind {kind!r}")


class RemoteVictim(Victim):
    """Client for a ``POST /v1/classify`` endpoint (JSON over HTTP)."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        super().__init__()
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._labels: tuple[str, ...] | None = None

    @property
    def label_names(self) -> tuple[str, ...]:  # type: ignore[override]
        return self._labels or ()

    def predict(self, text: TokenizedText) -> Prediction:
        self._count_query()
        from .text import detokenize

        body = json.dumps({"text": detokenize(text)}).encode("utf-8")
        req = urllib.request.Request(
            f"{self.endpoint}/v1/classify",
            data=body,
            headers={"Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError) as exc:
            raise RemoteUnavailable(f"classify endpoint unreachable: {exc}") from exc
        try:
            probs = tuple(float(p) for p in payload["probs"])
            logits = tuple(float(s) for s in payload["logits"])
            self._labels = tuple(str(x) for x in payload.get("label_names", ()))
            return Prediction(probs, logits)
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed classify response: {exc}") from exc
