"""Export synonym/antonym/stop-word files in the attack engine's formats.

Sources, in order of preference: the NLTK WordNet corpus when it is
installed and downloaded, otherwise a JSON lexical database given with
``--db`` (a small one ships with the package).  Output is sorted, so a
pinned database yields byte-identical files on every run.
"""

from __future__ import annotations

import json
from pathlib import Path

BUNDLED_DB = Path(__file__).parent / "data" / "mini_lexdb.json"


class LexicalDatabaseMissing(RuntimeError):
    pass


def _from_wordnet() -> dict:
    try:
        from nltk.corpus import wordnet
        from nltk.corpus import stopwords as nltk_stopwords

        wordnet.ensure_loaded()
    except (ImportError, LookupError) as exc:
        raise LexicalDatabaseMissing(f"WordNet unavailable: {exc}") from exc
    synonyms: dict[str, list[str]] = {}
    antonyms: dict[str, list[str]] = {}
    for synset in wordnet.all_synsets():
        for lemma in synset.lemmas():
            head = lemma.name().lower()
            if "_" in head:
                continue
            bucket = synonyms.setdefault(head, [])
            for other in synset.lemma_names():
                other = other.lower()
                if other != head and "_" not in other and other not in bucket:
                    bucket.append(other)
            for ant in lemma.antonyms():
                name = ant.name().lower()
                if "_" not in name:
                    ant_bucket = antonyms.setdefault(head, [])
                    if name not in ant_bucket:
                        ant_bucket.append(name)
    try:
        stop = sorted(set(nltk_stopwords.words("english")))
    except LookupError:
        stop = []
    return {"synonyms": synonyms, "antonyms": antonyms, "stopwords": stop}


def _from_json(path: Path) -> dict:
    if not path.exists():
        raise LexicalDatabaseMissing(f"database file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LexicalDatabaseMissing(f"database is not valid JSON: {exc}") from exc
    for key in ("synonyms", "antonyms", "stopwords"):
        if key not in raw:
            raise LexicalDatabaseMissing(f"database missing section {key!r}")
    return raw


def export_lexicon(output_dir: str | Path, db_path: str | Path | None = None) -> dict[str, Path]:
    """Write synonyms.tsv, antonyms.tsv, and stopwords.txt; returns paths.

    ``db_path=None`` requires WordNet; pass ``"bundled"`` for the small
    database shipped with the package.  No silent fallback between sources.
    """
    if db_path == "bundled":
        db = _from_json(BUNDLED_DB)
    elif db_path is not None:
        db = _from_json(Path(db_path))
    else:
        db = _from_wordnet()
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "synonyms": out / "synonyms.tsv",
        "antonyms": out / "antonyms.tsv",
        "stopwords": out / "stopwords.txt",
    }
    with open(paths["synonyms"], "w", encoding="utf-8") as fh:
        for head in sorted(db["synonyms"]):
            syns = [s for s in db["synonyms"][head] if s.lower() != head.lower()]
            if syns:
                fh.write(f"{head.lower()}\t{','.join(syns)}\n")
    with open(paths["antonyms"], "w", encoding="utf-8") as fh:
        for head in sorted(db["antonyms"]):
            ants = [a for a in db["antonyms"][head] if a.lower() != head.lower()]
            if ants:
                fh.write(f"{head.lower()}\t{','.join(ants)}\n")
    with open(paths["stopwords"], "w", encoding="utf-8") as fh:
        for word in sorted(set(db["stopwords"])):
            fh.write(word.lower() + "\n")
    return paths
