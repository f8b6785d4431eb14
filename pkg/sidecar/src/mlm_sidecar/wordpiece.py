"""Greedy-longest-match WordPiece tokenizer.

Word-initial pieces are plain strings; continuation pieces carry the ``##``
prefix.  The vocabulary is built from a corpus: frequent words stay whole,
everything else decomposes into suffix and character pieces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_WORD_RE = re.compile(r"[a-z0-9']+")

COMMON_SUFFIXES = (
    "ingly", "ously", "fully", "ifying", "izing",
    "ing", "ed", "ly", "er", "es", "est", "tion", "ment", "ness",
    "ful", "less", "able", "ous", "ive", "al", "s",
)


def words_of(line: str) -> list[str]:
    return _WORD_RE.findall(line.lower())


@dataclass(frozen=True)
class WordPieceVocab:
    pieces: tuple[str, ...]

    def __contains__(self, piece: str) -> bool:
        return piece in self._index

    def __len__(self) -> int:
        return len(self.pieces)

    @property
    def _index(self) -> frozenset:
        # frozen dataclass: cache on first access
        got = self.__dict__.get("_index_cache")
        if got is None:
            got = frozenset(self.pieces)
            object.__setattr__(self, "_index_cache", got)
        return got

    @classmethod
    def build(
        cls,
        corpus_lines: list[str],
        max_whole_words: int = 400,
        min_count: int = 4,
    ) -> "WordPieceVocab":
        """Frequent words stay whole pieces; rarer words contribute a stem
        piece when a common suffix peels off, and character pieces back
        everything else."""
        counts: dict[str, int] = {}
        chars: set[str] = set()
        for line in corpus_lines:
            for word in words_of(line):
                counts[word] = counts.get(word, 0) + 1
                chars.update(word)
        by_freq = sorted(counts, key=lambda w: (-counts[w], w))
        frequent = [w for w in by_freq[:max_whole_words] if counts[w] >= min_count]
        stems: set[str] = set()
        for word in counts:
            if word in frequent:
                continue
            for suffix in sorted(COMMON_SUFFIXES, key=len, reverse=True):
                if word.endswith(suffix) and len(word) - len(suffix) >= 3:
                    stems.add(word[: -len(suffix)])
                    break
        pieces: list[str] = sorted(set(frequent) | stems)
        pieces += sorted(chars)
        pieces += ["##" + s for s in COMMON_SUFFIXES]
        pieces += ["##" + c for c in sorted(chars)]
        seen: set[str] = set()
        unique = [p for p in pieces if not (p in seen or seen.add(p))]
        return cls(tuple(unique))


def tokenize_word(vocab: WordPieceVocab, word: str) -> list[str]:
    """Greedy longest-match split; every character is in the vocabulary, so
    this is total for corpus-alphabet words."""
    word = word.lower()
    pieces: list[str] = []
    start = 0
    while start < len(word):
        prefix = "" if start == 0 else "##"
        end = len(word)
        while end > start:
            candidate = prefix + word[start:end]
            if candidate in vocab:
                pieces.append(candidate)
                break
            end -= 1
        else:
            return ["[UNK]"]
        start = end
    return pieces


def join_pieces(pieces: list[str]) -> str | None:
    """Revert a piece sequence to a whole word; None if the shape is invalid
    (continuation first, or word-initial piece in the middle)."""
    if not pieces or pieces[0].startswith("##"):
        return None
    out = [pieces[0]]
    for piece in pieces[1:]:
        if not piece.startswith("##"):
            return None
        out.append(piece[2:])
    word = "".join(out)
    return word or None
