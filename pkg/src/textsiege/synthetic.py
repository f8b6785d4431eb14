"""Deterministic desk-scale corpus builder.

Generates a two-class review dataset plus matching lexical resources
(synonym table, antonyms, stop words, word embeddings) sized so the full
attack pipeline runs in seconds.  Sentiment-bearing words come in families:
one trained head plus out-of-vocabulary variants that the synonym table and
the embedding neighbourhood both point at, which is what gives attacks room
to work.
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np

POSITIVE_HEADS = [
    "great", "superb", "wonderful", "excellent", "brilliant", "delightful",
    "charming", "gripping", "masterful", "stunning", "touching", "hilarious",
    "inventive", "riveting", "flawless", "uplifting", "vivid", "graceful",
    "engaging", "memorable", "striking", "polished", "radiant", "stellar",
]
NEGATIVE_HEADS = [
    "awful", "dreadful", "boring", "clumsy", "dull", "grating",
    "hollow", "lifeless", "messy", "painful", "pointless", "shallow",
    "sloppy", "stale", "tedious", "tiresome", "unbearable", "weak",
    "wooden", "bland", "choppy", "forgettable", "laughable", "murky",
]
NEUTRAL_WORDS = [
    "movie", "film", "plot", "scene", "actor", "director", "story", "script",
    "pacing", "camera", "dialogue", "ending", "character", "soundtrack",
    "sequel", "trailer", "cast", "screen", "festival", "studio", "critic",
    "review", "audience", "ticket", "cinema", "drama", "thriller", "comedy",
    "documentary", "montage", "costume", "lighting", "editing", "narration",
    "premiere", "reel", "subtitle", "genre", "budget", "runtime",
]
STOP_WORDS = [
    "the", "a", "an", "and", "of", "to", "it", "is", "was", "this", "that",
    "with", "for", "in", "on", "as", "at", "but", "its", "so", "very",
]
VARIANT_SUFFIXES = ("esque", "most", "ward")


def word_family(head: str) -> list[str]:
    """Head plus its out-of-vocabulary substitution variants."""
    return [head] + [head + suffix for suffix in VARIANT_SUFFIXES]


def _compose_review(
    rng: np.random.Generator, majority: list[str], minority: list[str]
) -> str:
    margin = int(rng.integers(1, 4))
    k_minor = int(rng.integers(1, 3))
    k_major = k_minor + margin
    length = int(rng.integers(14, 29))
    words: list[str] = []
    words += [majority[int(rng.integers(len(majority)))] for _ in range(k_major)]
    words += [minority[int(rng.integers(len(minority)))] for _ in range(k_minor)]
    while len(words) < length:
        if rng.random() < 0.35:
            words.append(STOP_WORDS[int(rng.integers(len(STOP_WORDS)))])
        else:
            words.append(NEUTRAL_WORDS[int(rng.integers(len(NEUTRAL_WORDS)))])
    perm = rng.permutation(len(words))
    words = [words[i] for i in perm]
    pieces: list[str] = []
    for i, word in enumerate(words):
        pieces.append(word)
        if i % 8 == 7 and i != len(words) - 1:
            pieces[-1] += "."
    return " ".join(pieces) + "."


def generate_reviews(count: int, seed: int) -> list[tuple[str, int]]:
    """Balanced positive/negative reviews; label 1 marks positive."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    rows: list[tuple[str, int]] = []
    for i in range(count):
        label = i % 2
        majority = POSITIVE_HEADS if label == 1 else NEGATIVE_HEADS
        minority = NEGATIVE_HEADS if label == 1 else POSITIVE_HEADS
        rows.append((_compose_review(rng, majority, minority), label))
    return rows


def write_dataset(path: Path, rows: list[tuple[str, int]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["text", "label"])
        writer.writerows(rows)


def synonym_entries(padding: int = 20_000) -> dict[str, list[str]]:
    """Families for every content word plus padding heads for table scale."""
    entries: dict[str, list[str]] = {}
    for head in POSITIVE_HEADS + NEGATIVE_HEADS:
        family = word_family(head)
        entries[head] = family[1:]
        # variants point back at each other so substituted words stay attackable
        for variant in family[1:]:
            entries[variant] = [w for w in family if w != variant]
    for word in NEUTRAL_WORDS:
        entries[word] = [word + "ery", word + "form"]
    for i in range(padding):
        head = f"lex{i:05d}"
        entries[head] = [head + "a", head + "b"]
    return entries


def write_synonyms(path: Path, entries: dict[str, list[str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for head, syns in entries.items():
            fh.write(f"{head}\t{','.join(syns)}\n")


def write_antonyms(path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pos, neg in zip(POSITIVE_HEADS, NEGATIVE_HEADS):
            fh.write(f"{pos}\t{neg}\n")


def write_stopwords(path: Path) -> None:
    path.write_text("\n".join(STOP_WORDS) + "\n", encoding="utf-8")


def write_embeddings(path: Path, seed: int, dim: int = 16) -> None:
    """One cluster per word family: variants sit next to their head."""
    rng = np.random.Generator(np.random.Philox(key=seed + 1))
    lines: list[str] = []

    def emit(word: str, center: np.ndarray, jitter: float) -> None:
        vec = center + jitter * rng.standard_normal(dim)
        values = " ".join(f"{v:.5f}" for v in vec)
        lines.append(f"{word} {values}")

    for head in POSITIVE_HEADS + NEGATIVE_HEADS:
        center = rng.standard_normal(dim)
        for word in word_family(head):
            emit(word, center, 0.05)
    for word in NEUTRAL_WORDS + STOP_WORDS:
        emit(word, rng.standard_normal(dim), 0.05)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_desk_corpus(
    out_dir: str | Path,
    seed: int = 20240501,
    train_rows: int = 2000,
    eval_rows: int = 500,
) -> dict[str, Path]:
    """Write the full resource bundle; returns the path of every file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = generate_reviews(train_rows + eval_rows, seed)
    paths = {
        "train": out / "train.csv",
        "eval": out / "eval.csv",
        "synonyms": out / "synonyms.tsv",
        "antonyms": out / "antonyms.tsv",
        "stopwords": out / "stopwords.txt",
        "embeddings": out / "embeddings.txt",
    }
    write_dataset(paths["train"], rows[:train_rows])
    write_dataset(paths["eval"], rows[train_rows:])
    write_synonyms(paths["synonyms"], synonym_entries())
    write_antonyms(paths["antonyms"])
    write_stopwords(paths["stopwords"])
    write_embeddings(paths["embeddings"], seed)
    return paths


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Generate the desk-scale corpus")
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=20240501)
    parser.add_argument("--train-rows", type=int, default=2000)
    parser.add_argument("--eval-rows", type=int, default=500)
    args = parser.parse_args(argv)
    paths = build_desk_corpus(args.out, args.seed, args.train_rows, args.eval_rows)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
