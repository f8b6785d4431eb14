"""Greedy synonym-substitution attack ordered by probability-weighted saliency.

A single plan is computed on the original text: for every position the
substitute with the largest true-class probability drop, ranked by
softmax(saliency) * drop.  Substitutions are then applied in plan order until
the victim's label flips.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .candidates import Candidate, CandidateProvider
from .errors import EmptyText
from .evaluation import AttackResult
from .lexicon import Lexicon
from .scoring import softmax, unk_saliency_with_base
from .text import Action, TokenizedText
from .victim import Victim


@dataclass(frozen=True)
class PwwsPlanEntry:
    position: int
    best_substitute: str
    delta_p: float  # true-class probability drop of the best substitute
    saliency: float
    score: float


def best_synonym(
    victim: Victim,
    text: TokenizedText,
    position: int,
    cands: list[Candidate],
    y: int,
    base_prob: float | None = None,
) -> tuple[str, float] | None:
    """The candidate whose substitution most reduces P(y | text).

    One victim query per candidate; ties keep the earliest candidate.
    Returns None when there are no candidates.
    """
    if not cands:
        return None
    if base_prob is None:
        base_prob = victim.predict(text).probs[y]
    best: tuple[str, float] | None = None
    for cand in cands:
        perturbed = text.replace_token(position, cand.word)
        drop = base_prob - victim.predict(perturbed).probs[y]
        if best is None or drop > best[1]:
            best = (cand.word, drop)
    return best


def _position_candidates(
    text: TokenizedText,
    position: int,
    provider: CandidateProvider,
    lexicon: Lexicon | None,
    y: int,
    top: int,
) -> list[Candidate]:
    cands = provider.propose(text, position, Action.SUBSTITUTE, top)
    if lexicon is not None and lexicon.gazetteer is not None:
        ne_word = lexicon.gazetteer.ne_substitute(text.tokens[position], y)
        if ne_word is not None and ne_word.lower() != text.tokens[position].lower():
            if all(c.word != ne_word for c in cands):
                cands = cands + [Candidate(ne_word, 1.0)]
    return cands


def pwws_plan(
    victim: Victim,
    text: TokenizedText,
    y: int,
    provider: CandidateProvider,
    lexicon: Lexicon | None = None,
    top: int = 50,
) -> list[PwwsPlanEntry]:
    """Rank every substitutable position by softmax(saliency) * drop.

    Ordering is descending score with ascending-position ties; positions
    without any candidate produce no entry.  Tokens the gazetteer recognizes
    as named entities get the complement-dictionary substitute appended to
    their candidate set.
    """
    if len(text) == 0:
        raise EmptyText("cannot plan against an empty text")
    sal, base = unk_saliency_with_base(victim, text, y)
    weights = softmax(sal.values)
    base_prob = base.probs[y]
    entries: list[PwwsPlanEntry] = []
    for i in range(len(text)):
        cands = _position_candidates(text, i, provider, lexicon, y, top)
        choice = best_synonym(victim, text, i, cands, y, base_prob=base_prob)
        if choice is None:
            continue
        word, delta_p = choice
        entries.append(
            PwwsPlanEntry(
                position=i,
                best_substitute=word,
                delta_p=delta_p,
                saliency=sal.values[i],
                score=weights[i] * delta_p,
            )
        )
    entries.sort(key=lambda e: (-e.score, e.position))
    return entries


def run_pwws(
    victim: Victim,
    text: TokenizedText,
    y: int,
    provider: CandidateProvider,
    lexicon: Lexicon | None = None,
    top: int = 50,
    sample_id: str = "",
) -> AttackResult:
    """Apply plan entries in order until the victim mislabels the text."""
    if len(text) == 0:
        raise EmptyText("cannot attack an empty text")
    started = time.perf_counter()
    queries_before = victim.query_count
    plan = pwws_plan(victim, text, y, provider, lexicon=lexicon, top=top)
    current = text
    applied: list[PwwsPlanEntry] = []
    success = False
    for entry in plan:
        current = current.replace_token(entry.position, entry.best_substitute)
        applied.append(entry)
        if victim.predict(current).label_index != y:
            success = True
            break
    from .text import compact_edits

    return AttackResult(
        sample_id=sample_id,
        original=text,
        adversarial=current,
        success=success,
        perturbations=tuple(compact_edits(text, current)),
        victim_queries=victim.query_count - queries_before,
        wall_time=time.perf_counter() - started,
    )
