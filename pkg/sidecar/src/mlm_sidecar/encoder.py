"""Deterministic hashed-feature sentence encoder.

Words and character trigrams hash into a fixed-dimension vector with a
signed-feature trick; the result is L2-normalized.  The empty string maps to
the all-zero vector.  No training, fully reproducible across platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .wordpiece import words_of

DEFAULT_DIM = 64


class HashedSentenceEncoder:
    def __init__(self, dim: int = DEFAULT_DIM):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.dim = dim
        self.model_id = f"hashed-ngram-v1-d{dim}"

    def _slot(self, feature: str) -> tuple[int, float]:
        digest = hashlib.sha256(feature.encode("utf-8")).digest()
        index = int.from_bytes(digest[:4], "big") % self.dim
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        return index, sign

    def encode(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        for word in words_of(text):
            index, sign = self._slot("w:" + word)
            vec[index] += sign
            padded = f"^{word}$"
            for i in range(len(padded) - 2):
                index, sign = self._slot("g:" + padded[i : i + 3])
                vec[index] += 0.5 * sign
        norm = float(np.linalg.norm(vec))
        if norm > 0:
            vec /= norm
        return vec
