"""Mountable bag-of-words classifier.

Loads the portable model JSON produced by the attack engine's training CLI
(kind, vocabulary, per-class weights, bias, labels) and serves logits plus
their softmax.  Scoring is self-contained so the sidecar has no dependency
on the attacking package.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .wordpiece import words_of


class BowClassifier:
    def __init__(
        self,
        vocabulary: dict[str, int],
        weights: list[list[float]],
        bias: list[float],
        labels: list[int],
        model_id: str,
    ):
        self.vocabulary = vocabulary
        self.weights = weights
        self.bias = bias
        self.labels = labels
        self.model_id = model_id
        self.label_names = [str(x) for x in labels]

    @classmethod
    def load(cls, path: str | Path) -> "BowClassifier":
        path = Path(path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        return cls(
            vocabulary={w: int(i) for w, i in raw["vocabulary"].items()},
            weights=[[float(x) for x in row] for row in raw["weights"]],
            bias=[float(x) for x in raw["bias"]],
            labels=[int(x) for x in raw["labels"]],
            model_id="bow-" + raw.get("kind", "model"),
        )

    def classify(self, text: str) -> tuple[list[float], list[float]]:
        """(probs, logits); probs is the softmax of logits."""
        counts: dict[int, int] = {}
        for word in words_of(text):
            idx = self.vocabulary.get(word)
            if idx is not None:
                counts[idx] = counts.get(idx, 0) + 1
        logits = list(self.bias)
        for idx, count in counts.items():
            for c in range(len(logits)):
                logits[c] += count * self.weights[c][idx]
        peak = max(logits)
        exps = [math.exp(z - peak) for z in logits]
        total = sum(exps)
        return [e / total for e in exps], logits
