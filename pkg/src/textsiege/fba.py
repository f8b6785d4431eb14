"""Word Manipulation Process + Metropolis-Hastings attack.

Each step proposes one edit (insert / substitute / remove) drawn from
action, position, and word distributions, then accepts or rejects it against
an unnormalized adversarial density that rewards misclassification confidence
(capped once the attack succeeds) and penalizes semantic drift.  Among all
visited misclassifying states, the one with the fewest net edits wins.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .candidates import CandidateProvider
from .errors import EmptyText, NoCandidates
from .evaluation import AttackResult
from .lexicon import EmbeddingStore
from .scoring import SaliencyVector, leave_one_out_with_base, softmax
from .text import (
    Action,
    Perturbation,
    TokenizedText,
    apply_perturbation,
    compact_edits,
    invert_perturbation,
)
from .victim import Prediction, Victim

SemFn = Callable[[TokenizedText, TokenizedText], float]


@dataclass(frozen=True)
class WmpConfig:
    """Proposal-kernel tunables.

    ``mix_weights`` blends the three substitution sources: masked-LM
    probabilities, a uniform distribution over the masked-LM top-k, and the
    merged synonym/embedding-neighbour weights.
    """

    p_insert: float = 0.2
    p_substitute: float = 0.6
    p_remove: float = 0.2
    top_k: int = 15
    mix_weights: tuple[float, float, float] = (0.4, 0.2, 0.4)

    def __post_init__(self) -> None:
        total = self.p_insert + self.p_substitute + self.p_remove
        if min(self.p_insert, self.p_substitute, self.p_remove) < 0:
            raise ValueError("action probabilities must be nonnegative")
        if abs(total - 1.0) > 1e-9:
            raise ValueError("action probabilities must sum to 1")
        if (self.p_insert > 0) != (self.p_remove > 0):
            # an insert is undone by a remove and vice versa; allowing one
            # without the other would create proposals with zero reverse
            # probability
            raise ValueError("p_insert and p_remove must be zero or nonzero together")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if min(self.mix_weights) < 0 or abs(sum(self.mix_weights) - 1.0) > 1e-9:
            raise ValueError("mix_weights must be nonnegative and sum to 1")


@dataclass(frozen=True)
class FbaConfig:
    wmp: WmpConfig = field(default_factory=WmpConfig)
    sem_weight: float = 0.5  # semantic-drift trade-off
    success_cap: float = 2.0  # misclassification reward capped at 1/success_cap
    iterations: int = 500
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sem_weight < 0:
            raise ValueError("sem_weight must be nonnegative")
        if self.success_cap <= 1:
            raise ValueError("success_cap must exceed 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class ProviderSet:
    mlm: CandidateProvider | None = None
    synonym: CandidateProvider | None = None
    embedding: CandidateProvider | None = None


@dataclass(frozen=True)
class ChainState:
    text: TokenizedText
    edits_from_original: tuple[Perturbation, ...]
    log_density: float
    prediction: Prediction
    saliency: SaliencyVector | None  # None only for an empty text


@dataclass(frozen=True)
class Proposal:
    candidate: TokenizedText
    perturbation: Perturbation | None  # None marks a self-proposal
    forward_prob: float
    reverse_prob: float
    # carried so acceptance and bookkeeping never re-query the victim
    candidate_prediction: Prediction
    candidate_saliency: SaliencyVector | None

    def __post_init__(self) -> None:
        if not self.forward_prob > 0 or not self.reverse_prob > 0:
            raise ValueError("proposal probabilities must be strictly positive")

    @property
    def is_self(self) -> bool:
        return self.perturbation is None


def sample_action(cfg: WmpConfig, rng: np.random.Generator, text_len: int) -> Action:
    """Draw insert/substitute/remove; degenerate texts restrict the choice."""
    if text_len == 0:
        return Action.INSERT
    if text_len == 1:
        mass = cfg.p_insert + cfg.p_substitute
        if mass <= 0:
            return Action.INSERT
        if rng.random() < cfg.p_insert / mass:
            return Action.INSERT
        return Action.SUBSTITUTE
    r = rng.random()
    if r < cfg.p_insert:
        return Action.INSERT
    if r < cfg.p_insert + cfg.p_substitute:
        return Action.SUBSTITUTE
    return Action.REMOVE


def _action_prob(cfg: WmpConfig, action: Action, text_len: int) -> float:
    if text_len == 0:
        return 1.0 if action is Action.INSERT else 0.0
    if text_len == 1:
        mass = cfg.p_insert + cfg.p_substitute
        if mass <= 0:
            return 1.0 if action is Action.INSERT else 0.0
        if action is Action.INSERT:
            return cfg.p_insert / mass
        if action is Action.SUBSTITUTE:
            return cfg.p_substitute / mass
        return 0.0
    return {
        Action.INSERT: cfg.p_insert,
        Action.SUBSTITUTE: cfg.p_substitute,
        Action.REMOVE: cfg.p_remove,
    }[action]


def position_distribution(
    saliency: SaliencyVector | None, action: Action, text_len: int
) -> list[float]:
    """Softmax of per-position importance; insertion slots inherit the score
    of their more important neighbour."""
    if action in (Action.SUBSTITUTE, Action.REMOVE):
        if text_len == 0:
            raise EmptyText(f"{action.value} needs a nonempty text")
        assert saliency is not None and len(saliency) == text_len
        return softmax(saliency.values)
    # insertion: n+1 slots
    if text_len == 0:
        return [1.0]
    assert saliency is not None and len(saliency) == text_len
    vals = saliency.values
    slot_scores = [vals[0]]
    for i in range(1, text_len):
        slot_scores.append(max(vals[i - 1], vals[i]))
    slot_scores.append(vals[-1])
    return softmax(slot_scores)


def _normalize(pairs: dict[str, float]) -> dict[str, float]:
    total = sum(pairs.values())
    if total <= 0:
        uniform = 1.0 / len(pairs)
        return {w: uniform for w in pairs}
    return {w: v / total for w, v in pairs.items()}


def substitution_distribution(
    text: TokenizedText,
    position: int,
    providers: ProviderSet,
    cfg: WmpConfig,
) -> dict[str, float]:
    """Mixture over the union of masked-LM, uniform top-k, and synonym/kNN
    candidates; absent components forfeit their mixture mass proportionally.

    Keys are returned in sorted order so sampling stays deterministic.
    """
    mlm_cands = (
        providers.mlm.propose(text, position, Action.SUBSTITUTE, cfg.top_k)
        if providers.mlm is not None
        else []
    )
    lexical: dict[str, float] = {}
    for provider in (providers.synonym, providers.embedding):
        if provider is None:
            continue
        for cand in provider.propose(text, position, Action.SUBSTITUTE, cfg.top_k):
            lexical[cand.word] = lexical.get(cand.word, 0.0) + cand.weight
    components: list[tuple[float, dict[str, float]]] = []
    if mlm_cands:
        mlm_weights = {c.word: c.weight for c in mlm_cands}
        if cfg.mix_weights[0] > 0:
            components.append((cfg.mix_weights[0], _normalize(mlm_weights)))
        if cfg.mix_weights[1] > 0:
            components.append(
                (cfg.mix_weights[1], {c.word: 1.0 / len(mlm_cands) for c in mlm_cands})
            )
    if lexical and cfg.mix_weights[2] > 0:
        components.append((cfg.mix_weights[2], _normalize(lexical)))
    if not components:
        # some provider answered but every matching mix weight is zero:
        # degenerate proportional redistribution collapses to uniform
        support = sorted({c.word for c in mlm_cands} | set(lexical))
        if not support:
            raise NoCandidates(f"no substitution candidates at position {position}")
        return {w: 1.0 / len(support) for w in support}
    mass = sum(w for w, _ in components)
    mixture: dict[str, float] = {}
    for weight, dist in components:
        for word, prob in dist.items():
            mixture[word] = mixture.get(word, 0.0) + weight * prob
    return {w: mixture[w] / mass for w in sorted(mixture)}


def insertion_distribution(
    text: TokenizedText,
    slot: int,
    provider: CandidateProvider | None,
    cfg: WmpConfig,
) -> dict[str, float]:
    """Normalized masked-LM candidates for the given insertion slot."""
    if provider is None:
        raise NoCandidates("no insertion-capable provider configured")
    cands = provider.propose(text, slot, Action.INSERT, cfg.top_k)
    if not cands:
        raise NoCandidates(f"no insertion candidates at slot {slot}")
    dist = _normalize({c.word: c.weight for c in cands})
    return {w: dist[w] for w in sorted(dist)}


def removal_decision(k: int, rng: np.random.Generator) -> bool:
    """True (remove the word) with probability exactly 1/k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return rng.random() < 1.0 / k


def _sample_categorical(
    dist: dict[str, float], rng: np.random.Generator
) -> tuple[str, float]:
    r = rng.random()
    acc = 0.0
    last_word, last_prob = "", 0.0
    for word, prob in dist.items():
        acc += prob
        last_word, last_prob = word, prob
        if r < acc:
            return word, prob
    return last_word, last_prob  # guard against float round-down


def _sample_position(probs: list[float], rng: np.random.Generator) -> int:
    r = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if r < acc:
            return i
    return len(probs) - 1


def _floored_lookup(dist: dict[str, float], word: str) -> float:
    """Word probability with the absent-word floor 1/(support size + 1)."""
    return dist.get(word, 1.0 / (len(dist) + 1))


def _self_proposal(state: ChainState, forward: float, reverse: float) -> Proposal:
    return Proposal(
        candidate=state.text,
        perturbation=None,
        forward_prob=forward,
        reverse_prob=reverse,
        candidate_prediction=state.prediction,
        candidate_saliency=state.saliency,
    )


def wmp_propose(
    state: ChainState,
    victim: Victim,
    y: int,
    providers: ProviderSet,
    cfg: WmpConfig,
    rng: np.random.Generator,
) -> Proposal:
    """One proposal: sample an action, a position, then a word (or a removal
    coin flip); forward and reverse move probabilities come with it.

    Positions with no candidates are re-sampled up to n times before falling
    back to a self-proposal.
    """
    n = len(state.text)
    action = sample_action(cfg, rng, n)
    action_p = _action_prob(cfg, action, n)
    pos_probs = position_distribution(state.saliency, action, n)

    attempts = max(1, n)
    for _ in range(attempts):
        position = _sample_position(pos_probs, rng)
        pos_p = pos_probs[position]
        try:
            if action is Action.SUBSTITUTE:
                dist = substitution_distribution(state.text, position, providers, cfg)
                word, word_p = _sample_categorical(dist, rng)
                perturbation = Perturbation(
                    Action.SUBSTITUTE, position, state.text.tokens[position], word
                )
            elif action is Action.INSERT:
                dist = insertion_distribution(state.text, position, providers.mlm, cfg)
                word, word_p = _sample_categorical(dist, rng)
                perturbation = Perturbation(Action.INSERT, position, replacement=word)
            else:  # REMOVE
                if not removal_decision(cfg.top_k, rng):
                    kept = action_p * pos_p * (1.0 - 1.0 / cfg.top_k)
                    return _self_proposal(state, kept, kept)
                word_p = 1.0 / cfg.top_k
                perturbation = Perturbation(
                    Action.REMOVE, position, original=state.text.tokens[position]
                )
        except NoCandidates:
            continue
        forward = action_p * pos_p * word_p
        candidate = apply_perturbation(state.text, perturbation)
        cand_saliency, cand_pred = (
            leave_one_out_with_base(victim, candidate, y)
            if len(candidate)
            else (None, victim.predict(candidate))
        )
        inverse = invert_perturbation(perturbation)
        rev_action_p = _action_prob(cfg, inverse.action, len(candidate))
        rev_pos_probs = position_distribution(cand_saliency, inverse.action, len(candidate))
        rev_pos_p = rev_pos_probs[inverse.position]
        if inverse.action is Action.SUBSTITUTE:
            try:
                rev_dist = substitution_distribution(candidate, inverse.position, providers, cfg)
            except NoCandidates:
                rev_dist = {}
            rev_word_p = _floored_lookup(rev_dist, inverse.replacement or "")
        elif inverse.action is Action.INSERT:
            try:
                rev_dist = insertion_distribution(candidate, inverse.position, providers.mlm, cfg)
            except NoCandidates:
                rev_dist = {}
            rev_word_p = _floored_lookup(rev_dist, inverse.replacement or "")
        else:  # reverse of an insert is a remove
            rev_word_p = 1.0 / cfg.top_k
        reverse = rev_action_p * rev_pos_p * rev_word_p
        return Proposal(
            candidate=candidate,
            perturbation=perturbation,
            forward_prob=forward,
            reverse_prob=reverse,
            candidate_prediction=cand_pred,
            candidate_saliency=cand_saliency,
        )
    return _self_proposal(state, 1.0, 1.0)


def log_target_density(
    prediction: Prediction, sem: float, y: int, sem_weight: float, success_cap: float
) -> float:
    reward = min(1.0 - prediction.probs[y], 1.0 / success_cap)
    return reward + sem_weight * sem


def target_density(
    victim: Victim,
    sem_fn: SemFn,
    original: TokenizedText,
    candidate: TokenizedText,
    y: int,
    sem_weight: float,
    success_cap: float,
) -> float:
    """Unnormalized adversarial density: exp(capped misclassification reward
    plus weighted semantic similarity).  Strictly positive for every text."""
    pred = victim.predict(candidate)
    sem = sem_fn(original, candidate)
    return math.exp(log_target_density(pred, sem, y, sem_weight, success_cap))


def mh_accept(
    log_nu_current: float,
    log_nu_candidate: float,
    forward_prob: float,
    reverse_prob: float,
    rng: np.random.Generator,
) -> bool:
    """Accept with probability min(1, nu'/nu * reverse/forward), in log space."""
    log_ratio = (
        log_nu_candidate
        + math.log(reverse_prob)
        - log_nu_current
        - math.log(forward_prob)
    )
    v = rng.random()
    if log_ratio >= 0:
        return True
    return math.log(v) < log_ratio


def mh_step(
    state: ChainState,
    proposal: Proposal,
    density_fn: Callable[[TokenizedText], float],
    rng: np.random.Generator,
) -> ChainState:
    """Generic Metropolis-Hastings transition over chain states."""
    accepted = mh_accept(
        math.log(density_fn(state.text)),
        math.log(density_fn(proposal.candidate)),
        proposal.forward_prob,
        proposal.reverse_prob,
        rng,
    )
    if not accepted or proposal.is_self:
        return state
    assert proposal.perturbation is not None
    return ChainState(
        text=proposal.candidate,
        edits_from_original=state.edits_from_original + (proposal.perturbation,),
        log_density=math.log(density_fn(proposal.candidate)),
        prediction=proposal.candidate_prediction,
        saliency=proposal.candidate_saliency,
    )


def mean_embedding_similarity(store: EmbeddingStore) -> SemFn:
    """Cosine similarity of mean-pooled word vectors; unknown words are
    skipped and a side with no known words scores 0."""

    def pooled(text: TokenizedText) -> np.ndarray | None:
        vecs = [store.vector(tok.lower()) for tok in text.tokens]
        vecs = [v for v in vecs if v is not None]
        if not vecs:
            return None
        return np.mean(vecs, axis=0)

    def sem(a: TokenizedText, b: TokenizedText) -> float:
        va, vb = pooled(a), pooled(b)
        if va is None or vb is None:
            return 0.0
        na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
        if na == 0.0 or nb == 0.0:
            return 0.0
        return float(np.dot(va, vb) / (na * nb))

    return sem


@dataclass
class _ChainTrace:
    """Hook bag for tests that need to watch the chain evolve."""

    on_state: Callable[[int, ChainState], None] | None = None


def run_fba(
    victim: Victim,
    text: TokenizedText,
    y: int,
    providers: ProviderSet,
    sem_fn: SemFn,
    cfg: FbaConfig,
    sample_id: str = "",
    trace: _ChainTrace | None = None,
) -> AttackResult:
    """Run the chain for ``cfg.iterations`` steps and return the
    misclassifying visited state with the fewest net edits (ties: higher
    semantic similarity, then earlier visit)."""
    if len(text) == 0:
        raise EmptyText("cannot attack an empty text")
    started = time.perf_counter()
    queries_before = victim.query_count
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    saliency, base = leave_one_out_with_base(victim, text, y)
    state = ChainState(
        text=text,
        edits_from_original=(),
        log_density=log_target_density(
            base, sem_fn(text, text), y, cfg.sem_weight, cfg.success_cap
        ),
        prediction=base,
        saliency=saliency,
    )
    # (net edits, -sem, visit index) -> candidate snapshot
    best_key: tuple[int, float, int] | None = None
    best_snapshot: tuple[TokenizedText, list[Perturbation]] | None = None
    for step in range(cfg.iterations):
        proposal = wmp_propose(state, victim, y, providers, cfg.wmp, rng)
        if proposal.is_self:
            accepted = False
        else:
            sem_cand = sem_fn(text, proposal.candidate)
            log_nu_cand = log_target_density(
                proposal.candidate_prediction, sem_cand, y, cfg.sem_weight, cfg.success_cap
            )
            accepted = mh_accept(
                state.log_density,
                log_nu_cand,
                proposal.forward_prob,
                proposal.reverse_prob,
                rng,
            )
            if accepted:
                assert proposal.perturbation is not None
                state = ChainState(
                    text=proposal.candidate,
                    edits_from_original=state.edits_from_original
                    + (proposal.perturbation,),
                    log_density=log_nu_cand,
                    prediction=proposal.candidate_prediction,
                    saliency=proposal.candidate_saliency,
                )
                if state.prediction.label_index != y:
                    net = compact_edits(text, state.text)
                    key = (len(net), -sem_fn(text, state.text), step)
                    if best_key is None or key < best_key:
                        best_key = key
                        best_snapshot = (state.text, net)
        if trace is not None and trace.on_state is not None:
            trace.on_state(step, state)
    if best_snapshot is not None:
        adversarial, net_edits = best_snapshot
        success = True
    else:
        adversarial = state.text
        net_edits = compact_edits(text, adversarial)
        success = False
    return AttackResult(
        sample_id=sample_id,
        original=text,
        adversarial=adversarial,
        success=success,
        perturbations=tuple(net_edits),
        victim_queries=victim.query_count - queries_before,
        wall_time=time.perf_counter() - started,
    )
