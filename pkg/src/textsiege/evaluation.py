"""The four campaign metrics: perturbation rate, attack time, attack
accuracy, and ROUGE-L semantic similarity, plus per-run aggregation."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyRun, ZeroWordTokens
from .text import Perturbation, TokenizedText


@dataclass(frozen=True)
class AttackResult:
    """Outcome of one attack on one sample."""

    sample_id: str
    original: TokenizedText
    adversarial: TokenizedText
    success: bool
    perturbations: tuple[Perturbation, ...]
    victim_queries: int
    wall_time: float
    flags: tuple[str, ...] = ()


@dataclass
class RunReport:
    attack: str
    dataset: str
    results: list[AttackResult]
    aggregates: dict[str, float] = field(default_factory=dict)
    meta: dict[str, object] = field(default_factory=dict)


def perturbed_word_rate(result: AttackResult) -> float:
    """Percentage of the original's word tokens touched by net edits.

    Insertions and removals each count one edit; punctuation tokens are
    excluded from the denominator.
    """
    words = result.original.word_count
    if words == 0:
        raise ZeroWordTokens("original text has no word tokens")
    return 100.0 * len(result.perturbations) / words


def attack_accuracy(results: list[AttackResult]) -> float:
    if not results:
        raise EmptyRun("no results to aggregate")
    return 100.0 * sum(r.success for r in results) / len(results)


def mean_attack_time(results: list[AttackResult]) -> float:
    if not results:
        raise EmptyRun("no results to aggregate")
    return sum(r.wall_time for r in results) / len(results)


def _word_tokens_lower(text: TokenizedText) -> list[str]:
    return [t.lower() for t, w in zip(text.tokens, text.is_word) if w]


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for tok_a in a:
        cur = [0]
        for j, tok_b in enumerate(b, start=1):
            if tok_a == tok_b:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(a: TokenizedText, b: TokenizedText) -> float:
    """ROUGE-L F1 over lowercased word tokens.

    Both empty -> 1.0 (nothing was lost); exactly one empty -> 0.0.
    """
    ta, tb = _word_tokens_lower(a), _word_tokens_lower(b)
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    lcs = _lcs_length(ta, tb)
    if lcs == 0:
        return 0.0
    precision = lcs / len(tb)
    recall = lcs / len(ta)
    return 2 * precision * recall / (precision + recall)


def aggregate(results: list[AttackResult], attack: str, dataset: str) -> RunReport:
    """Compute the four aggregate metrics over results ordered by sample id."""
    if not results:
        raise EmptyRun("no results to aggregate")
    rows = sorted(results, key=lambda r: r.sample_id)
    n = len(rows)
    successes = [r for r in rows if r.success]
    report = RunReport(attack=attack, dataset=dataset, results=rows)
    report.aggregates = {
        "perturbed_words_pct": sum(perturbed_word_rate(r) for r in rows) / n,
        "attack_seconds_per_sample": mean_attack_time(rows),
        "attack_accuracy_pct": attack_accuracy(rows),
        "rouge_l": sum(rouge_l(r.original, r.adversarial) for r in rows) / n,
    }
    report.meta = {
        "samples": n,
        "successes": len(successes),
        "rouge_variant": "rouge_l_f1",
        "success_only": {
            "perturbed_words_pct": (
                sum(perturbed_word_rate(r) for r in successes) / len(successes)
                if successes
                else 0.0
            ),
            "rouge_l": (
                sum(rouge_l(r.original, r.adversarial) for r in successes)
                / len(successes)
                if successes
                else 0.0
            ),
        },
    }
    return report
