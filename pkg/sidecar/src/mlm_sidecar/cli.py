"""Command line: serve the HTTP sidecar, build the bundled model, export
lexicon files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .lexicon_export import LexicalDatabaseMissing, export_lexicon


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .classifier import BowClassifier
    from .encoder import HashedSentenceEncoder
    from .model import MaskedWordModel
    from .service import create_app

    try:
        model = MaskedWordModel.load(args.mlm)
    except (OSError, ValueError) as exc:
        print(f"error: cannot load masked LM from {args.mlm}: {exc}", file=sys.stderr)
        return 2
    classifier = None
    if args.classifier:
        try:
            classifier = BowClassifier.load(args.classifier)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot load classifier: {exc}", file=sys.stderr)
            return 2
    app = create_app(model, HashedSentenceEncoder(args.encoder_dim), classifier)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_build_model(args: argparse.Namespace) -> int:
    from .model import build_model, bundled_corpus_lines

    corpus = (
        Path(args.corpus).read_text(encoding="utf-8").splitlines()
        if args.corpus
        else bundled_corpus_lines()
    )
    model = build_model(corpus, max_whole_words=args.vocab_words)
    path = model.save(args.out)
    print(f"wrote {path} (model_id {model.model_id}, {len(model.vocab)} pieces)")
    return 0


def _cmd_export_lexicon(args: argparse.Namespace) -> int:
    try:
        paths = export_lexicon(args.out, db_path=args.db)
    except LexicalDatabaseMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="mlm-sidecar")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--port", type=int, default=8800)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--mlm", required=True, help="model directory")
    serve.add_argument("--classifier", help="bag-of-words classifier model JSON")
    serve.add_argument("--encoder-dim", type=int, default=64)
    serve.set_defaults(func=_cmd_serve)

    build = sub.add_parser("build-model", help="train the count model from a corpus")
    build.add_argument("--corpus", help="text file, one sentence per line (default: bundled)")
    build.add_argument("--out", required=True)
    build.add_argument("--vocab-words", type=int, default=400)
    build.set_defaults(func=_cmd_build_model)

    export = sub.add_parser("export-lexicon", help="write synonym/antonym/stopword files")
    export.add_argument("--out", required=True)
    export.add_argument(
        "--db",
        help="lexical database JSON, or 'bundled'; default requires NLTK WordNet",
    )
    export.set_defaults(func=_cmd_export_lexicon)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
