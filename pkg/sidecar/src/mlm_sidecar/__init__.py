"""HTTP sidecar for the attack engine: masked-word candidates with sub-word
combination and perplexity ranking, hashed sentence embeddings, and an
optional mounted classifier."""

__version__ = "0.1.0"
