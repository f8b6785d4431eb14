"""Word-importance machinery shared by every attack.

Two saliency flavours: the drop in the true-class raw score when a token is
deleted, and the drop in the true-class probability when a token is replaced
by an out-of-vocabulary placeholder.  Both cost exactly n+1 victim queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import EmptyText, EmptyVector
from .text import Action, Perturbation, TokenizedText, apply_perturbation
from .victim import Prediction, Victim, surrogate_scores

# Guaranteed out-of-vocabulary for the bundled victims and absent from all
# shipped lexicon files.
UNK_TOKEN = "⟨unk⟩"


class SaliencyKind(Enum):
    LEAVE_ONE_OUT = "leave_one_out"
    UNK_SALIENCY = "unk_saliency"


@dataclass(frozen=True)
class SaliencyVector:
    values: tuple[float, ...]
    kind: SaliencyKind
    true_label: int

    def __post_init__(self) -> None:
        if any(not math.isfinite(v) for v in self.values):
            raise ValueError("saliency values must be finite")

    def __len__(self) -> int:
        return len(self.values)


def leave_one_out_with_base(
    victim: Victim, text: TokenizedText, y: int
) -> tuple[SaliencyVector, Prediction]:
    """Deletion saliency plus the base prediction it was computed against.

    Callers that need both avoid paying an extra victim query.
    """
    if len(text) == 0:
        raise EmptyText("saliency needs at least one token")
    base = victim.predict(text)
    base_score = surrogate_scores(base)[y]
    values = []
    for i in range(len(text)):
        removed = apply_perturbation(
            text, Perturbation(Action.REMOVE, i, original=text.tokens[i])
        )
        values.append(base_score - surrogate_scores(victim.predict(removed))[y])
    return (
        SaliencyVector(tuple(values), SaliencyKind.LEAVE_ONE_OUT, y),
        base,
    )


def leave_one_out_scores(victim: Victim, text: TokenizedText, y: int) -> SaliencyVector:
    """values[i] = true-class raw score of the text minus that of the text
    with token i removed."""
    return leave_one_out_with_base(victim, text, y)[0]


def unk_saliency_with_base(
    victim: Victim, text: TokenizedText, y: int
) -> tuple[SaliencyVector, Prediction]:
    if len(text) == 0:
        raise EmptyText("saliency needs at least one token")
    base = victim.predict(text)
    base_prob = base.probs[y]
    values = []
    for i in range(len(text)):
        masked = text.replace_token(i, UNK_TOKEN)
        values.append(base_prob - victim.predict(masked).probs[y])
    return SaliencyVector(tuple(values), SaliencyKind.UNK_SALIENCY, y), base


def unk_saliency(victim: Victim, text: TokenizedText, y: int) -> SaliencyVector:
    """values[i] = true-class probability drop when token i becomes the
    reserved OOV placeholder."""
    return unk_saliency_with_base(victim, text, y)[0]


def softmax(values: list[float] | tuple[float, ...]) -> list[float]:
    """Max-shifted softmax; safe for large magnitudes, sums to 1."""
    if len(values) == 0:
        raise EmptyVector("softmax of an empty vector")
    peak = max(values)
    exps = [math.exp(v - peak) for v in values]
    total = sum(exps)
    return [e / total for e in exps]
