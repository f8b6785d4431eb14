"""Canonical text representation and reversible word-level edits.

Every attack in this package perturbs a :class:`TokenizedText` by applying
:class:`Perturbation` values; both are immutable so texts can be shared
freely between workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import OriginalMismatch, PositionOutOfRange

# Characters stripped off the edges of whitespace-separated chunks and emitted
# as standalone punctuation tokens.  Word-internal occurrences (e.g. the
# apostrophe in "don't" or the dot in "3.5") are left alone.
EDGE_PUNCTUATION = frozenset(".,!?;:\"'()[]<>")


class Action(enum.Enum):
    SUBSTITUTE = "substitute"
    INSERT = "insert"
    REMOVE = "remove"


def _looks_like_word(token: str) -> bool:
    return any(ch.isalnum() for ch in token)


@dataclass(frozen=True)
class TokenizedText:
    """An ordered sequence of word tokens plus per-token word/punctuation flags.

    ``source`` records the raw string a text was derived from; it is
    provenance only and takes no part in equality.
    """

    tokens: tuple[str, ...]
    is_word: tuple[bool, ...]
    source: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.is_word):
            raise ValueError("tokens and is_word must have equal length")
        for tok in self.tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"token {tok!r} is empty or contains whitespace")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def word_count(self) -> int:
        return sum(self.is_word)

    def word_positions(self) -> list[int]:
        return [i for i, w in enumerate(self.is_word) if w]

    def replace_token(self, position: int, word: str) -> "TokenizedText":
        tokens = self.tokens[:position] + (word,) + self.tokens[position + 1 :]
        flags = (
            self.is_word[:position]
            + (_looks_like_word(word),)
            + self.is_word[position + 1 :]
        )
        return TokenizedText(tokens, flags, detokenize_tokens(tokens, flags))


@dataclass(frozen=True)
class Perturbation:
    """A single reversible edit: substitute, insert, or remove one token."""

    action: Action
    position: int
    original: str | None = None
    replacement: str | None = None

    def __post_init__(self) -> None:
        if self.position < 0:
            raise ValueError("position must be nonnegative")
        if self.action is Action.SUBSTITUTE:
            if self.original is None or self.replacement is None:
                raise ValueError("substitute needs both original and replacement")
            if self.original == self.replacement:
                raise ValueError("substitute must change the token")
        elif self.action is Action.INSERT:
            if self.replacement is None or self.original is not None:
                raise ValueError("insert carries a replacement only")
        elif self.action is Action.REMOVE:
            if self.original is None or self.replacement is not None:
                raise ValueError("remove carries an original only")


def tokenize(raw: str) -> TokenizedText:
    """Split ``raw`` into word and punctuation tokens.

    Chunks are split on Unicode whitespace, then any leading/trailing
    characters from :data:`EDGE_PUNCTUATION` are peeled off as separate
    non-word tokens.  Case is preserved.  Deterministic and total: empty
    input yields an empty text.
    """
    tokens: list[str] = []
    flags: list[bool] = []
    for chunk in raw.split():
        leading: list[str] = []
        trailing: list[str] = []
        start, end = 0, len(chunk)
        while start < end and chunk[start] in EDGE_PUNCTUATION:
            leading.append(chunk[start])
            start += 1
        while end > start and chunk[end - 1] in EDGE_PUNCTUATION:
            trailing.append(chunk[end - 1])
            end -= 1
        core = chunk[start:end]
        for ch in leading:
            tokens.append(ch)
            flags.append(False)
        if core:
            tokens.append(core)
            flags.append(_looks_like_word(core))
        for ch in reversed(trailing):
            tokens.append(ch)
            flags.append(False)
    return TokenizedText(tuple(tokens), tuple(flags), raw)


def detokenize_tokens(tokens: tuple[str, ...], is_word: tuple[bool, ...]) -> str:
    parts: list[str] = []
    for tok, word in zip(tokens, is_word):
        if parts and not word:
            parts[-1] = parts[-1] + tok
        else:
            parts.append(tok)
    return " ".join(parts)


def detokenize(text: TokenizedText) -> str:
    """Join tokens with single spaces; punctuation attaches to the preceding token."""
    return detokenize_tokens(text.tokens, text.is_word)


def apply_perturbation(text: TokenizedText, p: Perturbation) -> TokenizedText:
    """Return a new text with ``p`` applied; ``text`` itself is never mutated."""
    n = len(text)
    if p.action is Action.INSERT:
        if not 0 <= p.position <= n:
            raise PositionOutOfRange(f"insert slot {p.position} outside 0..{n}")
        assert p.replacement is not None
        tokens = text.tokens[: p.position] + (p.replacement,) + text.tokens[p.position :]
        flags = (
            text.is_word[: p.position]
            + (_looks_like_word(p.replacement),)
            + text.is_word[p.position :]
        )
    else:
        if not 0 <= p.position < n:
            raise PositionOutOfRange(f"position {p.position} outside 0..{n - 1}")
        if text.tokens[p.position] != p.original:
            raise OriginalMismatch(
                f"token at {p.position} is {text.tokens[p.position]!r}, "
                f"edit expects {p.original!r}"
            )
        if p.action is Action.SUBSTITUTE:
            assert p.replacement is not None
            tokens = (
                text.tokens[: p.position] + (p.replacement,) + text.tokens[p.position + 1 :]
            )
            flags = (
                text.is_word[: p.position]
                + (_looks_like_word(p.replacement),)
                + text.is_word[p.position + 1 :]
            )
        else:  # REMOVE
            tokens = text.tokens[: p.position] + text.tokens[p.position + 1 :]
            flags = text.is_word[: p.position] + text.is_word[p.position + 1 :]
    return TokenizedText(tokens, flags, detokenize_tokens(tokens, flags))


def invert_perturbation(p: Perturbation) -> Perturbation:
    """The edit that undoes ``p``: apply(apply(t, p), invert(p)) == t."""
    if p.action is Action.SUBSTITUTE:
        return Perturbation(Action.SUBSTITUTE, p.position, p.replacement, p.original)
    if p.action is Action.INSERT:
        return Perturbation(Action.REMOVE, p.position, original=p.replacement)
    return Perturbation(Action.INSERT, p.position, replacement=p.original)


def apply_all(text: TokenizedText, edits: list[Perturbation] | tuple[Perturbation, ...]) -> TokenizedText:
    for p in edits:
        text = apply_perturbation(text, p)
    return text


def compact_edits(
    original: TokenizedText, final: TokenizedText
) -> list[Perturbation]:
    """Minimal left-to-right edit script turning ``original`` into ``final``.

    Token-level Levenshtein alignment, so chains such as substitute-then-
    substitute at one position or insert-then-remove collapse to their net
    effect.  Positions are valid at application time: the returned list
    replays with :func:`apply_all`.
    """
    a, b = original.tokens, final.tokens
    n, m = len(a), len(b)
    # dist[i][j] = edit distance between suffixes a[i:] and b[j:]
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    dist[n] = [m - j for j in range(m + 1)]
    for i in range(n - 1, -1, -1):
        row, below = dist[i], dist[i + 1]
        row[m] = n - i
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                row[j] = below[j + 1]
            else:
                row[j] = 1 + min(below[j + 1], below[j], row[j + 1])
    edits: list[Perturbation] = []
    i = j = 0
    while i < n or j < m:
        # j doubles as the edit position in the partially rewritten text,
        # which at this point reads b[:j] + a[i:].
        if i < n and j < m and a[i] == b[j] and dist[i][j] == dist[i + 1][j + 1]:
            i += 1
            j += 1
        elif i < n and j < m and dist[i][j] == 1 + dist[i + 1][j + 1]:
            edits.append(Perturbation(Action.SUBSTITUTE, j, a[i], b[j]))
            i += 1
            j += 1
        elif i < n and dist[i][j] == 1 + dist[i + 1][j]:
            edits.append(Perturbation(Action.REMOVE, j, original=a[i]))
            i += 1
        else:
            edits.append(Perturbation(Action.INSERT, j, replacement=b[j]))
            j += 1
    return edits
