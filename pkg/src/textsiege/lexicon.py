"""Lexical resources loaded from plain files: synonyms, antonyms, stop words,
a typed named-entity gazetteer, and a word-embedding store with exact kNN.

All resources are immutable after load and lowercased at the lookup boundary,
never in stored text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, WordNotInVocabulary

NE_TYPES = ("Person", "Location", "Organization", "Other")


class SynonymTable:
    """word -> ordered synonym list; heads are lowercase, lookups case-folded."""

    def __init__(self, entries: dict[str, list[str]]):
        self._entries: dict[str, list[str]] = {}
        for head, syns in entries.items():
            head_l = head.lower()
            seen: set[str] = set()
            cleaned: list[str] = []
            for syn in syns:
                if syn.lower() == head_l or syn in seen:
                    continue
                seen.add(syn)
                cleaned.append(syn)
            self._entries[head_l] = cleaned

    def __len__(self) -> int:
        return len(self._entries)

    def synonyms(self, word: str) -> list[str]:
        return list(self._entries.get(word.lower(), ()))

    @classmethod
    def load(cls, path: str | Path) -> "SynonymTable":
        entries: dict[str, list[str]] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                if "\t" not in line:
                    raise ParseError("expected word<TAB>syn1,syn2,...", lineno)
                head, _, rest = line.partition("\t")
                syns = [s for s in rest.split(",") if s]
                entries[head] = entries.get(head, []) + syns
        return cls(entries)


def synonyms(table: SynonymTable, word: str) -> list[str]:
    return table.synonyms(word)


class StopwordList:
    def __init__(self, words: list[str] | set[str]):
        self._words = {w.lower() for w in words}

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._words

    @classmethod
    def load(cls, path: str | Path) -> "StopwordList":
        with open(path, encoding="utf-8") as fh:
            return cls({line.strip() for line in fh if line.strip()})


class AntonymPairs:
    """Symmetric word-pair membership, case-insensitive."""

    def __init__(self, pairs: list[tuple[str, str]]):
        self._pairs = {frozenset((a.lower(), b.lower())) for a, b in pairs}

    def is_antonym_pair(self, a: str, b: str) -> bool:
        return frozenset((a.lower(), b.lower())) in self._pairs

    @classmethod
    def load(cls, path: str | Path) -> "AntonymPairs":
        pairs: list[tuple[str, str]] = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                if "\t" not in line:
                    raise ParseError("expected word<TAB>ant1,ant2,...", lineno)
                head, _, rest = line.partition("\t")
                for other in rest.split(","):
                    if other:
                        pairs.append((head, other))
        return cls(pairs)


@dataclass(frozen=True)
class GazetteerEntry:
    entity: str
    ne_type: str
    frequency: int


class NEDictionaries:
    """Per-class typed entity multisets; substitution draws from the complement."""

    def __init__(self, per_class: dict[int, list[GazetteerEntry]]):
        for entries in per_class.values():
            for e in entries:
                if e.ne_type not in NE_TYPES:
                    raise ValueError(f"unknown NE type {e.ne_type!r}")
        self._per_class = per_class
        self._types: dict[str, str] = {}
        for entries in per_class.values():
            for e in entries:
                self._types[e.entity.lower()] = e.ne_type

    def ne_type_of(self, word: str) -> str | None:
        return self._types.get(word.lower())

    def ne_substitute(self, word: str, true_class: int) -> str | None:
        """Most frequent same-type entity from classes other than ``true_class``.

        Frequencies of one entity are summed across complement classes; ties
        break lexicographically.  Entities also present in the true class are
        never returned.
        """
        ne_type = self.ne_type_of(word)
        if ne_type is None:
            return None
        true_entities = {
            e.entity.lower() for e in self._per_class.get(true_class, [])
        }
        totals: dict[str, int] = {}
        for cls, entries in self._per_class.items():
            if cls == true_class:
                continue
            for e in entries:
                if e.ne_type != ne_type:
                    continue
                if e.entity.lower() in true_entities:
                    continue
                if e.entity.lower() == word.lower():
                    continue
                totals[e.entity] = totals.get(e.entity, 0) + e.frequency
        if not totals:
            return None
        return min(totals, key=lambda ent: (-totals[ent], ent))

    @classmethod
    def build(
        cls,
        typed_entities: dict[str, str],
        dataset: list[tuple[str, int]],
    ) -> "NEDictionaries":
        """Count gazetteer-entity occurrences per class over a training set.

        ``typed_entities`` maps entity token (any case) to NE type; matching
        is exact-token, case-insensitive.
        """
        from .text import tokenize

        types = {ent.lower(): (ent, ne_type) for ent, ne_type in typed_entities.items()}
        counts: dict[int, dict[str, int]] = {}
        for text, label in dataset:
            per = counts.setdefault(label, {})
            for tok in tokenize(text).tokens:
                key = tok.lower()
                if key in types:
                    per[key] = per.get(key, 0) + 1
        per_class = {
            label: [
                GazetteerEntry(types[key][0], types[key][1], freq)
                for key, freq in sorted(per.items())
            ]
            for label, per in counts.items()
        }
        return cls(per_class)


def load_gazetteer(path: str | Path) -> dict[str, str]:
    """Typed entity list, TSV rows ``entity<TAB>type``."""
    entities: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected entity<TAB>type", lineno)
            entity, ne_type = parts
            if ne_type not in NE_TYPES:
                raise ParseError(f"unknown NE type {ne_type!r}", lineno)
            entities[entity] = ne_type
    return entities


def ne_substitute(word: str, true_class: int, d: NEDictionaries) -> str | None:
    return d.ne_substitute(word, true_class)


class EmbeddingStore:
    """Fixed-dimension word vectors with exact Euclidean kNN (full scan)."""

    def __init__(self, vectors: dict[str, np.ndarray]):
        dims = {v.shape for v in vectors.values()}
        if len(dims) > 1:
            raise ValueError(f"inconsistent embedding dimensions: {dims}")
        for word, vec in vectors.items():
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"non-finite embedding for {word!r}")
        self._vectors = {w: np.asarray(v, dtype=float) for w, v in vectors.items()}
        self._words: list[str] = sorted(self._vectors)
        self._matrix = (
            np.stack([self._vectors[w] for w in self._words])
            if self._words
            else np.zeros((0, 0))
        )

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    @property
    def dim(self) -> int:
        return self._matrix.shape[1] if len(self._words) else 0

    def vector(self, word: str) -> np.ndarray | None:
        return self._vectors.get(word)

    def knn(self, word: str, k: int) -> list[tuple[str, float]]:
        """k nearest neighbours by L2 distance, ascending; query word excluded."""
        if word not in self._vectors:
            raise WordNotInVocabulary(word)
        if k < 1:
            raise ValueError("k must be >= 1")
        query = self._vectors[word]
        dists = np.sqrt(((self._matrix - query) ** 2).sum(axis=1))
        ranked = sorted(
            (
                (float(d), w)
                for w, d in zip(self._words, dists)
                if w != word
            ),
        )
        return [(w, d) for d, w in ranked[:k]]

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingStore":
        """GloVe-style text: one line per word, ``word v1 v2 ... vdim``."""
        vectors: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.rstrip("\n").split(" ")
                if len(parts) < 2:
                    if line.strip():
                        raise ParseError("expected word followed by floats", lineno)
                    continue
                try:
                    vectors[parts[0]] = np.array([float(x) for x in parts[1:]])
                except ValueError:
                    raise ParseError("malformed float value", lineno)
        return cls(vectors)


def knn(store: EmbeddingStore, word: str, k: int) -> list[tuple[str, float]]:
    return store.knn(word, k)


@dataclass
class Lexicon:
    """Bundle of the optional lexical resources an attack may consult."""

    synonym_table: SynonymTable | None = None
    stopwords: StopwordList = field(default_factory=lambda: StopwordList(set()))
    antonyms: AntonymPairs = field(default_factory=lambda: AntonymPairs([]))
    gazetteer: NEDictionaries | None = None
    embeddings: EmbeddingStore | None = None

    def is_stopword(self, word: str) -> bool:
        return word in self.stopwords

    def is_antonym_pair(self, a: str, b: str) -> bool:
        return self.antonyms.is_antonym_pair(a, b)
