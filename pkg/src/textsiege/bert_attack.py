"""Masked-LM substitution attack over the most important words.

Words are ranked by deletion importance; the top fraction is eligible for
substitution from masked-LM candidates.  At each position the first
label-flipping candidate wins; otherwise the largest strictly positive
probability drop is committed and the attack moves on.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .candidates import CandidateProvider, filter_candidates
from .errors import EmptyText, RemoteUnavailable
from .evaluation import AttackResult
from .lexicon import Lexicon
from .scoring import leave_one_out_with_base
from .text import Action, TokenizedText, compact_edits
from .victim import Prediction, Victim


@dataclass(frozen=True)
class BertAttackConfig:
    perturb_fraction: float = 0.4  # share of word tokens eligible for editing
    top_k: int = 48  # candidates requested per position
    task: str = "sentiment"

    def __post_init__(self) -> None:
        if not 0 < self.perturb_fraction <= 1:
            raise ValueError("perturb_fraction must be in (0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.task not in ("sentiment", "topic"):
            raise ValueError(f"unknown task {self.task!r}")


def _ranked_word_positions(values: tuple[float, ...], text: TokenizedText) -> list[int]:
    word_positions = text.word_positions()
    return sorted(word_positions, key=lambda i: (-values[i], i))


def rank_vulnerable(
    victim: Victim, text: TokenizedText, y: int, perturb_fraction: float
) -> list[int]:
    """Word positions by descending deletion importance, truncated to the
    ceiling of ``perturb_fraction`` times the word-token count."""
    if len(text) == 0:
        raise EmptyText("cannot rank an empty text")
    sal, _ = leave_one_out_with_base(victim, text, y)
    ranked = _ranked_word_positions(sal.values, text)
    keep = math.ceil(perturb_fraction * len(ranked))
    return ranked[:keep]


def run_bert_attack(
    victim: Victim,
    text: TokenizedText,
    y: int,
    provider: CandidateProvider,
    config: BertAttackConfig,
    lexicon: Lexicon | None = None,
    fallback_provider: CandidateProvider | None = None,
    sample_id: str = "",
) -> AttackResult:
    if len(text) == 0:
        raise EmptyText("cannot attack an empty text")
    started = time.perf_counter()
    queries_before = victim.query_count
    sal, base = leave_one_out_with_base(victim, text, y)
    ranked = _ranked_word_positions(sal.values, text)
    keep = math.ceil(config.perturb_fraction * len(ranked))
    positions = ranked[:keep]

    stopwords = lexicon.stopwords if lexicon is not None else None
    antonyms = lexicon.antonyms if lexicon is not None else None
    current = text
    current_prob = base.probs[y]
    success = False
    flags: tuple[str, ...] = ()
    for pos in positions:
        original_word = current.tokens[pos]
        try:
            cands = provider.propose(current, pos, Action.SUBSTITUTE, config.top_k)
        except RemoteUnavailable:
            if fallback_provider is None:
                raise
            flags = ("mlm_fallback",)
            cands = fallback_provider.propose(
                current, pos, Action.SUBSTITUTE, config.top_k
            )
        cands = filter_candidates(
            cands, original_word, config.task, stopwords=stopwords, antonyms=antonyms
        )
        best: tuple[float, TokenizedText, Prediction] | None = None
        for cand in cands:
            trial = current.replace_token(pos, cand.word)
            pred = victim.predict(trial)
            if pred.label_index != y:
                current = trial
                success = True
                break
            drop = current_prob - pred.probs[y]
            if best is None or drop > best[0]:
                best = (drop, trial, pred)
        if success:
            break
        if best is not None and best[0] > 0:
            current = best[1]
            current_prob = best[2].probs[y]
    return AttackResult(
        sample_id=sample_id,
        original=text,
        adversarial=current,
        success=success,
        perturbations=tuple(compact_edits(text, current)),
        victim_queries=victim.query_count - queries_before,
        wall_time=time.perf_counter() - started,
        flags=flags,
    )
