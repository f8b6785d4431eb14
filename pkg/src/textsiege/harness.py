"""Campaign orchestration: load a dataset and a victim, attack every
correctly classified sample, and emit a reproducible report.

All run options live in one declarative JSON config so a campaign can be
rerun bit-for-bit; no behaviour hides behind CLI-only switches.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import evaluation
from .bert_attack import BertAttackConfig, run_bert_attack
from .candidates import EmbeddingProvider, MlmProvider, SynonymProvider
from .errors import (
    ConfigError,
    EmptyRun,
    LabelOutOfRange,
    ParseError,
    TextsiegeError,
)
from .evaluation import AttackResult, RunReport, aggregate
from .fba import FbaConfig, ProviderSet, WmpConfig, mean_embedding_similarity, run_fba
from .lexicon import (
    AntonymPairs,
    EmbeddingStore,
    Lexicon,
    NEDictionaries,
    StopwordList,
    SynonymTable,
    load_gazetteer,
)
from .pwws import run_pwws
from .text import tokenize
from .victim import (
    BowVictim,
    QueryCountingProxy,
    RemoteVictim,
    Victim,
    train_bow_victim,
)

SIDECAR_URL_ENV = "ATTACK_SIDECAR_URL"
ATTACKS = ("pwws", "bert", "fba")


@dataclass(frozen=True)
class Sample:
    id: str
    text: str
    label: int


@dataclass
class RunConfig:
    dataset_path: Path
    dataset_format: str  # "csv" | "jsonl"
    labels: tuple[int, ...]
    attack: str
    victim: dict
    providers: dict = field(default_factory=dict)
    lexicon: dict = field(default_factory=dict)
    attack_params: dict = field(default_factory=dict)
    sample_limit: int | None = None
    seed: int = 0
    workers: int = 1
    record_timing: bool = True
    output: Path = Path("report")
    task: str = "sentiment"
    base: Path = Path(".")

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        for key in ("dataset", "attack", "victim", "seed"):
            if key not in raw:
                raise ConfigError(f"config missing required key {key!r}")
        dataset = raw["dataset"]
        if raw["attack"] not in ATTACKS:
            raise ConfigError(f"unknown attack {raw['attack']!r}")
        attack_params = raw.get(raw["attack"], {})
        if not isinstance(attack_params, dict):
            raise ConfigError(f"attack parameter block {raw['attack']!r} must be a table")
        cfg = cls(
            dataset_path=path.parent / dataset["path"],
            dataset_format=dataset.get("format", "csv"),
            labels=tuple(int(x) for x in dataset["labels"]),
            attack=raw["attack"],
            victim=raw["victim"],
            providers=raw.get("providers", {}),
            lexicon=raw.get("lexicon", {}),
            attack_params=attack_params,
            sample_limit=raw.get("sample_limit"),
            seed=int(raw["seed"]),
            workers=int(raw.get("workers", 1)),
            record_timing=bool(raw.get("record_timing", True)),
            output=path.parent / raw.get("output", "report"),
            task=raw.get("task", "sentiment"),
            base=path.parent,
        )
        for ref in cfg.referenced_files():
            if not ref.exists():
                raise ConfigError(f"referenced file does not exist: {ref}")
        return cfg

    def _resolve(self, value: str) -> Path:
        return self.base / value

    def referenced_files(self) -> list[Path]:
        refs = [self.dataset_path]
        if "train" in self.victim:
            refs.append(self._resolve(self.victim["train"]))
        if "model" in self.victim:
            refs.append(self._resolve(self.victim["model"]))
        for key in ("synonyms", "embeddings"):
            if key in self.providers:
                refs.append(self._resolve(self.providers[key]))
        for key in ("stopwords", "antonyms", "gazetteer", "embeddings"):
            if key in self.lexicon:
                refs.append(self._resolve(self.lexicon[key]))
        return refs


def _parse_label(value: object, labels: tuple[int, ...], line: int) -> int:
    try:
        label = int(value)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise ParseError(f"label {value!r} is not an integer", line)
    if label not in labels:
        raise LabelOutOfRange(f"label {label} not in declared set {labels}", line)
    return label


def load_dataset(
    path: str | Path,
    fmt: str,
    labels: tuple[int, ...],
    limit: int | None = None,
) -> list[Sample]:
    """Parse ``text,label`` CSV or JSON-lines, preserving file order."""
    path = Path(path)
    samples: list[Sample] = []
    if limit is not None and limit <= 0:
        return samples
    if fmt == "csv":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"text", "label"} <= set(reader.fieldnames):
                raise ParseError("CSV must have a `text,label` header", 1)
            for line, row in enumerate(reader, start=2):
                if row.get("text") is None or row.get("label") is None:
                    raise ParseError("row missing text or label", line)
                label = _parse_label(row["label"], labels, line)
                samples.append(Sample(row.get("id") or f"{line - 2:05d}", row["text"], label))
                if limit is not None and len(samples) >= limit:
                    break
    elif fmt == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for line, text_line in enumerate(fh, start=1):
                if not text_line.strip():
                    continue
                try:
                    row = json.loads(text_line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON: {exc}", line)
                if "text" not in row or "label" not in row:
                    raise ParseError("row missing text or label", line)
                label = _parse_label(row["label"], labels, line)
                samples.append(Sample(str(row.get("id", f"{len(samples):05d}")), row["text"], label))
                if limit is not None and len(samples) >= limit:
                    break
    else:
        raise ConfigError(f"unknown dataset format {fmt!r}")
    return samples


def build_victim(cfg: RunConfig) -> Victim:
    spec = cfg.victim
    kind = spec.get("kind")
    if kind == "remote":
        endpoint = os.environ.get(SIDECAR_URL_ENV) or spec.get("endpoint")
        if not endpoint:
            raise ConfigError("remote victim needs an endpoint")
        return RemoteVictim(endpoint)
    if kind in ("naive_bayes", "logistic_regression"):
        if "model" in spec:
            from .victim import BowVictimModel

            model = BowVictimModel.from_json(
                cfg._resolve(spec["model"]).read_text(encoding="utf-8")
            )
            return BowVictim(model)
        train_path = cfg._resolve(spec["train"])
        train_fmt = spec.get("format", "csv")
        rows = load_dataset(train_path, train_fmt, cfg.labels, spec.get("limit"))
        model = train_bow_victim(
            [(s.text, s.label) for s in rows], kind, **spec.get("hyperparams", {})
        )
        return BowVictim(model)
    raise ConfigError(f"unknown victim kind {kind!r}")


def build_lexicon(cfg: RunConfig, dataset: list[Sample]) -> Lexicon:
    lex = Lexicon()
    if "stopwords" in cfg.lexicon:
        lex.stopwords = StopwordList.load(cfg._resolve(cfg.lexicon["stopwords"]))
    if "antonyms" in cfg.lexicon:
        lex.antonyms = AntonymPairs.load(cfg._resolve(cfg.lexicon["antonyms"]))
    if "gazetteer" in cfg.lexicon:
        typed = load_gazetteer(cfg._resolve(cfg.lexicon["gazetteer"]))
        lex.gazetteer = NEDictionaries.build(typed, [(s.text, s.label) for s in dataset])
    if "embeddings" in cfg.lexicon:
        lex.embeddings = EmbeddingStore.load(cfg._resolve(cfg.lexicon["embeddings"]))
    if "synonyms" in cfg.providers:
        lex.synonym_table = SynonymTable.load(cfg._resolve(cfg.providers["synonyms"]))
    return lex


def build_providers(cfg: RunConfig, lex: Lexicon) -> ProviderSet:
    providers = ProviderSet()
    if lex.synonym_table is not None:
        providers.synonym = SynonymProvider(lex.synonym_table)
    if "embeddings" in cfg.providers:
        providers.embedding = EmbeddingProvider(
            EmbeddingStore.load(cfg._resolve(cfg.providers["embeddings"]))
        )
    endpoint = os.environ.get(SIDECAR_URL_ENV) or cfg.providers.get("mlm_endpoint")
    if endpoint:
        providers.mlm = MlmProvider(endpoint)
    return providers


def _expected_index(victim: Victim, label: int) -> int:
    if isinstance(victim, BowVictim):
        return victim.label_index(label)
    names = victim.label_names
    if names and str(label) in names:
        return names.index(str(label))
    return label


def _fba_config(params: dict, seed: int) -> FbaConfig:
    wmp = WmpConfig(
        p_insert=params.get("p_insert", 0.2),
        p_substitute=params.get("p_substitute", 0.6),
        p_remove=params.get("p_remove", 0.2),
        top_k=params.get("top_k", 15),
        mix_weights=tuple(params.get("mix_weights", (0.4, 0.2, 0.4))),
    )
    return FbaConfig(
        wmp=wmp,
        sem_weight=params.get("sem_weight", 0.5),
        success_cap=params.get("success_cap", 2.0),
        iterations=params.get("iterations", 500),
        seed=seed,
    )


def _attack_one(
    cfg: RunConfig,
    sample: Sample,
    index: int,
    victim: Victim,
    lex: Lexicon,
    providers: ProviderSet,
) -> dict:
    text = tokenize(sample.text)
    if text.word_count == 0:
        # perturbation rate is undefined without word tokens
        return {"sample_id": sample.id, "status": "error", "error": "no word tokens"}
    y = _expected_index(victim, sample.label)
    # per-sample counting view: parallel samples must not see each other's
    # victim queries
    victim = QueryCountingProxy(victim)
    if victim.predict(text).label_index != y:
        return {"sample_id": sample.id, "status": "filtered_misclassified"}
    try:
        if cfg.attack == "pwws":
            provider = providers.synonym
            if provider is None:
                raise ConfigError("pwws needs a synonym provider")
            result = run_pwws(
                victim,
                text,
                y,
                provider,
                lexicon=lex,
                top=cfg.attack_params.get("top", 50),
                sample_id=sample.id,
            )
        elif cfg.attack == "bert":
            bert_cfg = BertAttackConfig(
                perturb_fraction=cfg.attack_params.get("perturb_fraction", 0.4),
                top_k=cfg.attack_params.get("top_k", 48),
                task=cfg.task,
            )
            primary = providers.mlm or providers.embedding
            if primary is None:
                raise ConfigError("bert attack needs an mlm or embedding provider")
            fallback = providers.embedding if providers.mlm is not None else None
            result = run_bert_attack(
                victim,
                text,
                y,
                primary,
                bert_cfg,
                lexicon=lex,
                fallback_provider=fallback,
                sample_id=sample.id,
            )
        else:  # fba
            sem_store = lex.embeddings or (
                providers.embedding.store if providers.embedding is not None else None
            )
            if sem_store is None:
                raise ConfigError("fba needs embeddings for semantic similarity")
            fba_cfg = _fba_config(cfg.attack_params, seed=(cfg.seed * 1_000_003 + index))
            result = run_fba(
                victim,
                text,
                y,
                providers,
                mean_embedding_similarity(sem_store),
                fba_cfg,
                sample_id=sample.id,
            )
    except TextsiegeError as exc:
        return {"sample_id": sample.id, "status": "error", "error": str(exc)}
    return {"sample_id": sample.id, "status": "attacked", "result": result}


def run_campaign(cfg: RunConfig) -> RunReport:
    """Attack every correctly classified sample and aggregate the metrics."""
    campaign_started = time.perf_counter()
    samples = load_dataset(
        cfg.dataset_path, cfg.dataset_format, cfg.labels, cfg.sample_limit
    )
    if not samples:
        raise EmptyRun("dataset yielded no samples")
    victim = build_victim(cfg)
    lex = build_lexicon(cfg, samples)
    providers = build_providers(cfg, lex)

    rows: list[dict] = [{} for _ in samples]
    workers = max(1, cfg.workers)
    if workers == 1:
        for i, sample in enumerate(samples):
            rows[i] = _attack_one(cfg, sample, i, victim, lex, providers)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_attack_one, cfg, sample, i, victim, lex, providers): i
                for i, sample in enumerate(samples)
            }
            for future, i in futures.items():
                rows[i] = future.result()

    results: list[AttackResult] = []
    filtered = errors = 0
    for row in rows:
        if row["status"] == "attacked":
            result = row["result"]
            if not cfg.record_timing:
                result = AttackResult(
                    sample_id=result.sample_id,
                    original=result.original,
                    adversarial=result.adversarial,
                    success=result.success,
                    perturbations=result.perturbations,
                    victim_queries=result.victim_queries,
                    wall_time=0.0,
                    flags=result.flags,
                )
                row["result"] = result
            results.append(result)
        elif row["status"] == "filtered_misclassified":
            filtered += 1
        else:
            errors += 1
    if not results:
        raise EmptyRun("no sample survived victim-correctness filtering")
    report = aggregate(results, cfg.attack, cfg.dataset_path.name)
    report.meta.update(
        {
            "seed": cfg.seed,
            "sample_limit": cfg.sample_limit,
            "loaded_samples": len(samples),
            "attacked_samples": len(results),
            "filtered_misclassified": filtered,
            "errored_samples": errors,
            "attack_seconds_total": round(sum(r.wall_time for r in results), 6),
            "campaign_seconds": (
                round(time.perf_counter() - campaign_started, 6)
                if cfg.record_timing
                else 0.0
            ),
            "workers": cfg.workers,
            "rows": rows,
        }
    )
    return report


def _round_floats(value):
    if isinstance(value, float):
        return round(value, 6)
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def report_to_json_dict(report: RunReport) -> dict:
    samples = []
    by_id = {
        row.get("sample_id"): row for row in report.meta.get("rows", [])
    }
    for result in report.results:
        samples.append(
            {
                "sample_id": result.sample_id,
                "status": "attacked",
                "success": result.success,
                "perturbed_words_pct": evaluation.perturbed_word_rate(result),
                "rouge_l": evaluation.rouge_l(result.original, result.adversarial),
                "victim_queries": result.victim_queries,
                "wall_time_seconds": result.wall_time,
                "original_text": result.original.source,
                "adversarial_text": result.adversarial.source,
                "perturbations": [
                    {
                        "action": p.action.value,
                        "position": p.position,
                        "original": p.original,
                        "replacement": p.replacement,
                    }
                    for p in result.perturbations
                ],
                "flags": list(result.flags),
            }
        )
    for sample_id, row in sorted(by_id.items(), key=lambda kv: str(kv[0])):
        if row.get("status") != "attacked":
            entry = {"sample_id": sample_id, "status": row.get("status")}
            if "error" in row:
                entry["error"] = row["error"]
            samples.append(entry)
    samples.sort(key=lambda s: str(s["sample_id"]))
    meta = {k: v for k, v in report.meta.items() if k != "rows"}
    meta.update({"attack": report.attack, "dataset": report.dataset})
    return _round_floats(
        {"meta": meta, "aggregates": report.aggregates, "samples": samples}
    )


METRIC_ROWS = (
    ("% of Perturbed Words", "perturbed_words_pct"),
    ("Attack Time", "attack_seconds_per_sample"),
    ("Attack Accuracy", "attack_accuracy_pct"),
    ("Semantic Similarity", "rouge_l"),
)


def report_markdown(data: dict) -> str:
    meta = data["meta"]
    lines = [
        f"# Attack report: {meta.get('attack')} on {meta.get('dataset')}",
        "",
        f"Samples attacked: {meta.get('attacked_samples')} "
        f"(filtered as misclassified: {meta.get('filtered_misclassified')}, "
        f"errors: {meta.get('errored_samples')})",
        "",
        "| Metric | Value |",
        "| --- | --- |",
    ]
    for label, key in METRIC_ROWS:
        lines.append(f"| {label} | {data['aggregates'][key]:.6f} |")
    lines.append("")
    return "\n".join(lines)


def emit_report(report: RunReport, output: str | Path) -> tuple[Path, Path]:
    """Write ``<output>.json`` (full per-sample rows) and ``<output>.md``
    (the four-metric aggregate table)."""
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    data = report_to_json_dict(report)
    json_path = output.with_suffix(".json")
    md_path = output.with_suffix(".md")
    json_path.write_text(
        json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    md_path.write_text(report_markdown(data), encoding="utf-8")
    return json_path, md_path
