"""Black-box word-level adversarial text attacks with a reproducible
evaluation harness.

Three attacks over a shared query-only victim interface: greedy synonym
substitution weighted by word saliency, masked-LM candidate substitution over
the most important words, and a Metropolis-Hastings random walk over insert/
substitute/remove edits.
"""

from .evaluation import AttackResult, RunReport
from .text import Action, Perturbation, TokenizedText, detokenize, tokenize
from .victim import BowVictim, Prediction, RemoteVictim, Victim

__all__ = [
    "Action",
    "AttackResult",
    "BowVictim",
    "Perturbation",
    "Prediction",
    "RemoteVictim",
    "RunReport",
    "TokenizedText",
    "Victim",
    "detokenize",
    "tokenize",
]

__version__ = "0.1.0"
