"""Candidate providers: given a text, a position, and an action, propose
weighted replacement or insertion words.

Three interchangeable implementations: synonym-table lookup, embedding kNN,
and a remote masked-LM service.  All results are deduplicated, sorted by
descending weight, and never echo the original word for substitutions.
"""

from __future__ import annotations

import json
import math
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Protocol

from .errors import ProtocolError, RemoteUnavailable, UnsupportedAction
from .lexicon import AntonymPairs, EmbeddingStore, StopwordList, SynonymTable
from .text import Action, TokenizedText


@dataclass(frozen=True)
class Candidate:
    word: str
    weight: float

    def __post_init__(self) -> None:
        if not self.word or any(ch.isspace() for ch in self.word):
            raise ValueError(f"candidate word {self.word!r} empty or has whitespace")
        if self.weight < 0:
            raise ValueError("candidate weight must be nonnegative")


class CandidateProvider(Protocol):
    def propose(
        self, text: TokenizedText, position: int, action: Action, top: int
    ) -> list[Candidate]:
        """At most ``top`` candidates, descending weight, no duplicates."""
        ...


def _finalize(
    raw: list[Candidate], original: str | None, top: int
) -> list[Candidate]:
    """Shared provider post-processing: drop original, dedup, sort, truncate."""
    seen: set[str] = set()
    kept: list[Candidate] = []
    orig_l = original.lower() if original is not None else None
    for cand in raw:
        if orig_l is not None and cand.word.lower() == orig_l:
            continue
        if cand.word in seen:
            continue
        seen.add(cand.word)
        kept.append(cand)
    # stable: ties keep the provider's own order (file order, kNN rank, ...)
    kept.sort(key=lambda c: -c.weight)
    return kept[:top]


class SynonymProvider:
    """Synonyms of the target token, uniform weight; substitution only."""

    def __init__(self, table: SynonymTable):
        self.table = table

    def propose(
        self, text: TokenizedText, position: int, action: Action, top: int
    ) -> list[Candidate]:
        if action is not Action.SUBSTITUTE:
            raise UnsupportedAction("synonym provider cannot insert")
        original = text.tokens[position]
        raw = [Candidate(w, 1.0) for w in self.table.synonyms(original)]
        # uniform weights: the stable sort in _finalize keeps file order
        return _finalize(raw, original, top)


class EmbeddingProvider:
    """Nearest embedding-space neighbours, weight 1/(1+distance)."""

    def __init__(self, store: EmbeddingStore):
        self.store = store

    def propose(
        self, text: TokenizedText, position: int, action: Action, top: int
    ) -> list[Candidate]:
        if action is not Action.SUBSTITUTE:
            raise UnsupportedAction("embedding provider cannot insert")
        original = text.tokens[position]
        key = original if original in self.store else original.lower()
        if key not in self.store:
            return []
        raw = [
            Candidate(word, 1.0 / (1.0 + dist))
            for word, dist in self.store.knn(key, top + 1)
        ]
        return _finalize(raw, original, top)


class MlmProvider:
    """Remote masked-LM candidates via the sidecar's ``/v1/mask_fill``.

    Weights are ``exp(log_prob)`` of the whole-word candidates the service
    returns after sub-word combination.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def propose(
        self, text: TokenizedText, position: int, action: Action, top: int
    ) -> list[Candidate]:
        if action not in (Action.SUBSTITUTE, Action.INSERT):
            raise UnsupportedAction(f"mask fill cannot serve {action}")
        body = json.dumps(
            {
                "tokens": list(text.tokens),
                "position": position,
                "action": action.value,
                "top": top,
            }
        ).encode("utf-8")
        req = urllib.request.Request(
            f"{self.endpoint}/v1/mask_fill",
            data=body,
            headers={"Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError) as exc:
            raise RemoteUnavailable(f"mask_fill endpoint unreachable: {exc}") from exc
        try:
            raw = []
            for item in payload["candidates"]:
                word = str(item["word"])
                if word.startswith("##") or word.startswith("Ġ"):
                    raise ProtocolError(f"sub-word artifact in candidate {word!r}")
                raw.append(Candidate(word, math.exp(float(item["log_prob"]))))
        except ProtocolError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed mask_fill response: {exc}") from exc
        original = text.tokens[position] if action is Action.SUBSTITUTE else None
        return _finalize(raw, original, top)


def filter_candidates(
    cands: list[Candidate],
    original: str,
    task: str,
    stopwords: StopwordList | None = None,
    antonyms: AntonymPairs | None = None,
) -> list[Candidate]:
    """Drop the original word, stop words, letter-free junk, and (for
    sentiment tasks) antonyms of the original.  Order is preserved and the
    filter is idempotent."""
    if task not in ("sentiment", "topic"):
        raise ValueError(f"unknown task {task!r}")
    out: list[Candidate] = []
    orig_l = original.lower()
    for cand in cands:
        if cand.word.lower() == orig_l:
            continue
        if stopwords is not None and cand.word in stopwords:
            continue
        if not any(ch.isalpha() for ch in cand.word):
            continue
        if (
            task == "sentiment"
            and antonyms is not None
            and antonyms.is_antonym_pair(cand.word, original)
        ):
            continue
        out.append(cand)
    return out
