"""Count-based masked word-piece model with sub-word combination.

The model stores piece unigram/bigram counts from a training corpus.  A
masked slot is scored by blending the left-neighbour transition into the
piece with the piece's transition into the right neighbour, smoothed and
normalized over the pieces allowed at that slot (word-initial at the first
span position, continuations after).  Multi-piece words enumerate the
highest joint-log-probability combinations (capped), revert to whole words,
and are re-ranked by perplexity.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .wordpiece import WordPieceVocab, join_pieces, tokenize_word, words_of

BOS = "<s>"
EOS = "</s>"
SMOOTHING = 0.1
COMBINATION_CAP = 512
FORMAT = "wordpiece-bigram-v1"


@dataclass(frozen=True)
class MaskFillCandidate:
    word: str
    log_prob: float
    perplexity: float


class MaskedWordModel:
    def __init__(
        self,
        vocab: WordPieceVocab,
        bigrams: dict[str, dict[str, int]],
        model_id: str,
    ):
        self.vocab = vocab
        self.bigrams = bigrams
        self.model_id = model_id
        self._initial = tuple(
            sorted(p for p in vocab.pieces if not p.startswith("##"))
        )
        self._continuation = tuple(
            sorted(p for p in vocab.pieces if p.startswith("##"))
        )
        self._totals = {prev: sum(nexts.values()) for prev, nexts in bigrams.items()}

    # -- scoring ---------------------------------------------------------

    def _transition(self, prev: str, nxt: str) -> float:
        row = self.bigrams.get(prev, {})
        total = self._totals.get(prev, 0)
        v = len(self.vocab) + 2  # boundary pseudo-pieces
        return (row.get(nxt, 0) + SMOOTHING) / (total + SMOOTHING * v)

    def _unigram(self, piece: str) -> float:
        grand = sum(self._totals.values())
        v = len(self.vocab) + 2
        return (self._totals.get(piece, 0) + SMOOTHING) / (grand + SMOOTHING * v)

    def slot_log_probs(
        self, left: str, right: str, continuation: bool, first: bool = True, last: bool = True
    ) -> list[tuple[str, float]]:
        """Normalized log-probabilities over the pieces allowed at a slot,
        descending; ties break lexicographically.

        The known left/right context applies only at the edges of the masked
        span (its interior neighbours are themselves masked); non-first slots
        fall back to a unigram prior so mass still favours seen pieces.
        """
        allowed = self._continuation if continuation else self._initial
        raw = []
        for piece in allowed:
            score = 0.0
            if first:
                score += math.log(self._transition(left, piece))
            else:
                score += math.log(self._unigram(piece))
            if last:
                score += math.log(self._transition(piece, right))
            raw.append(score)
        peak = max(raw)
        total = peak + math.log(sum(math.exp(r - peak) for r in raw))
        scored = [(piece, r - total) for piece, r in zip(allowed, raw)]
        scored.sort(key=lambda pr: (-pr[1], pr[0]))
        return scored

    def word_nll(self, word: str, left: str, right: str) -> tuple[float, int]:
        """Chain negative log-likelihood of the word's pieces in context.

        Transitions left -> q1 -> ... -> qt -> right; unlike the per-slot
        proposal distributions this sees the word's internal structure, which
        is what lets the re-ranking sink incoherent piece combinations.
        """
        pieces = tokenize_word(self.vocab, word)
        seq = [left, *pieces, right]
        nll = 0.0
        for prev, nxt in zip(seq, seq[1:]):
            nll -= math.log(self._transition(prev, nxt))
        return nll, len(seq) - 1

    # -- mask filling ------------------------------------------------------

    def _context_pieces(
        self, tokens: list[str], position: int, action: str
    ) -> tuple[str, str, int]:
        """(left piece, right piece, span length) around the masked span."""
        before = tokens[:position]
        if action == "substitute":
            span = len(tokenize_word(self.vocab, tokens[position]))
            after = tokens[position + 1 :]
        else:
            span = 1
            after = tokens[position:]
        left = BOS
        if before:
            left = tokenize_word(self.vocab, before[-1])[-1]
        right = EOS
        if after:
            right = tokenize_word(self.vocab, after[0])[0]
        return left, right, span

    def mask_fill(
        self, tokens: list[str], position: int, action: str, top: int
    ) -> list[MaskFillCandidate]:
        if action not in ("substitute", "insert"):
            raise ValueError(f"unknown action {action!r}")
        limit = len(tokens) - 1 if action == "substitute" else len(tokens)
        if not 0 <= position <= limit:
            raise ValueError(f"position {position} invalid for {action}")
        if top < 1:
            raise ValueError("top must be >= 1")
        left, right, span = self._context_pieces(tokens, position, action)
        per_slot = [
            self.slot_log_probs(
                left,
                right,
                continuation=j > 0,
                first=j == 0,
                last=j == span - 1,
            )[:top]
            for j in range(span)
        ]
        combos = _k_best_combinations(per_slot, COMBINATION_CAP)
        original = tokens[position].lower() if action == "substitute" else None
        seen: set[str] = set()
        scored: list[MaskFillCandidate] = []
        for joint, pieces in combos:
            word = join_pieces(list(pieces))
            if word is None or word in seen:
                continue
            if original is not None and word == original:
                continue
            seen.add(word)
            nll, count = self.word_nll(word, left, right)
            scored.append(
                MaskFillCandidate(
                    word=word,
                    log_prob=joint,
                    perplexity=math.exp(nll / count),
                )
            )
        scored.sort(key=lambda c: (c.perplexity, -c.log_prob, c.word))
        return scored[:top]

    # -- persistence -------------------------------------------------------

    def save(self, model_dir: str | Path) -> Path:
        model_dir = Path(model_dir)
        model_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "format": FORMAT,
            "pieces": list(self.vocab.pieces),
            "bigrams": {k: dict(sorted(v.items())) for k, v in sorted(self.bigrams.items())},
        }
        path = model_dir / "model.json"
        path.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        return path

    @classmethod
    def load(cls, model_dir: str | Path) -> "MaskedWordModel":
        path = Path(model_dir) / "model.json"
        raw = json.loads(path.read_text(encoding="utf-8"))
        if raw.get("format") != FORMAT:
            raise ValueError(f"unsupported model format {raw.get('format')!r}")
        vocab = WordPieceVocab(tuple(raw["pieces"]))
        bigrams = {k: {k2: int(v2) for k2, v2 in v.items()} for k, v in raw["bigrams"].items()}
        return cls(vocab, bigrams, model_id=_digest(path.read_bytes()))


def _digest(payload: bytes) -> str:
    return "wpb1-" + hashlib.sha256(payload).hexdigest()[:12]


def _k_best_combinations(
    per_slot: list[list[tuple[str, float]]], cap: int
) -> list[tuple[float, tuple[str, ...]]]:
    """Best-first enumeration of piece combinations by joint log-probability."""
    if not per_slot or any(not slot for slot in per_slot):
        return []
    start = tuple(0 for _ in per_slot)
    start_score = sum(slot[0][1] for slot in per_slot)
    heap = [(-start_score, start)]
    visited = {start}
    out: list[tuple[float, tuple[str, ...]]] = []
    while heap and len(out) < cap:
        neg, indices = heapq.heappop(heap)
        out.append(
            (-neg, tuple(slot[i][0] for slot, i in zip(per_slot, indices)))
        )
        for j, slot in enumerate(per_slot):
            if indices[j] + 1 >= len(slot):
                continue
            nxt = indices[:j] + (indices[j] + 1,) + indices[j + 1 :]
            if nxt in visited:
                continue
            visited.add(nxt)
            score = sum(s[i][1] for s, i in zip(per_slot, nxt))
            heapq.heappush(heap, (-score, nxt))
    return out


def build_model(corpus_lines: list[str], max_whole_words: int = 400) -> MaskedWordModel:
    """Train counts from a corpus and fingerprint the result."""
    vocab = WordPieceVocab.build(corpus_lines, max_whole_words=max_whole_words)
    bigrams: dict[str, dict[str, int]] = {}
    for line in corpus_lines:
        stream = [BOS]
        for word in words_of(line):
            stream.extend(tokenize_word(vocab, word))
        stream.append(EOS)
        for prev, nxt in zip(stream, stream[1:]):
            bigrams.setdefault(prev, {})[nxt] = bigrams.setdefault(prev, {}).get(nxt, 0) + 1
    payload = {
        "format": FORMAT,
        "pieces": list(vocab.pieces),
        "bigrams": {k: dict(sorted(v.items())) for k, v in sorted(bigrams.items())},
    }
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return MaskedWordModel(vocab, bigrams, model_id=_digest(blob))


def bundled_corpus_lines() -> list[str]:
    path = Path(__file__).parent / "data" / "corpus.txt"
    return path.read_text(encoding="utf-8").splitlines()
