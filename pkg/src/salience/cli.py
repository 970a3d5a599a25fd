"""Command line interface.

Subcommands: annotate (dump extracted candidates), rank (score salience
with any method), train-rgcn (fit the graph network) and evaluate
(compare a ranking file against abstract-derived gold). Exit codes:
0 success, 1 usage error, 2 data or configuration error. The
SALIENCE_LOG environment variable sets the log level.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Sequence

from .conllu import load_corpus
from .errors import SalienceError
from .estimators import (
    FrequencyRanker,
    LocationRanker,
    RgcnRanker,
    TextRankRanker,
)
from .evaluation import (
    DEFAULT_KS,
    DocPredictions,
    evaluate_corpus,
    write_report,
)
from .extraction import candidates_to_record, extract_candidates
from .graph import build_document_graph
from .lexicon import TriggerLexicon, default_trigger_lexicon, load_trigger_lexicon
from .rankers import RankedList
from .rgcn import load_checkpoint, load_vector_table, predict_scores

logger = logging.getLogger(__name__)

USAGE_EXIT = 1
DATA_EXIT = 2

METHODS = ("textrank", "frequency", "location", "rgcn")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, "%s: error: %s\n" % (self.prog, message))


def _configure_logging() -> None:
    level_name = os.environ.get("SALIENCE_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def _load_lexicon(args) -> TriggerLexicon:
    if args.lexicon_verbs or args.lexicon_nouns:
        if not (args.lexicon_verbs and args.lexicon_nouns):
            raise SalienceError(
                "--lexicon-verbs and --lexicon-nouns must be given together")
        with open(args.lexicon_verbs, "r", encoding="utf-8") as verbs:
            with open(args.lexicon_nouns, "r", encoding="utf-8") as nouns:
                return load_trigger_lexicon(verbs, nouns)
    return default_trigger_lexicon()


def _add_lexicon_flags(parser, required: bool = False) -> None:
    parser.add_argument("--lexicon-verbs", required=required,
                        help="verb lemma list, one per line")
    parser.add_argument("--lexicon-nouns", required=required,
                        help="eventive noun lemma list, one per line")


def _event_key_to_json(key) -> dict:
    trigger, args = key
    return {"trigger": trigger, "args": list(args)}


def _ranking_line(doc_id: str, scope: str, method: str,
                  ranked: RankedList) -> str:
    items = []
    for rank, item in enumerate(ranked.items, start=1):
        key = (_event_key_to_json(item.key) if scope == "event"
               else item.key)
        items.append({"key": key, "score": item.score, "rank": rank})
    record = {"doc_id": doc_id, "scope": scope, "method": method,
              "ranking": items}
    return json.dumps(record, sort_keys=True, ensure_ascii=False)


def cmd_annotate(args) -> int:
    lexicon = _load_lexicon(args)
    with open(args.out, "w", encoding="utf-8") as out:
        for doc in load_corpus(args.manifest):
            if args.part == "abstract" and doc.abstract is None:
                logger.warning("doc %r has no abstract; skipped", doc.doc_id)
                continue
            entities, events = extract_candidates(doc, lexicon, part=args.part)
            record = candidates_to_record(doc.doc_id, entities, events)
            out.write(json.dumps(record, sort_keys=True, ensure_ascii=False))
            out.write("\n")
    return 0


def cmd_rank(args) -> int:
    lexicon = _load_lexicon(args)
    docs = list(load_corpus(args.manifest))

    if args.method == "rgcn":
        if not args.model:
            raise UsageFailure("--model is required with --method rgcn")
        model = load_checkpoint(args.model)
        rankings = []
        for doc in docs:
            graph = build_document_graph(doc, lexicon,
                                         mode=args.edge_weight_mode)
            rankings.append(predict_scores(model, graph))
    else:
        estimator = {
            "textrank": lambda: TextRankRanker(
                lexicon=lexicon, edge_weight_mode=args.edge_weight_mode),
            "frequency": lambda: FrequencyRanker(lexicon=lexicon),
            "location": lambda: LocationRanker(lexicon=lexicon),
        }[args.method]()
        rankings = estimator.fit(docs).predict(docs)

    with open(args.out, "w", encoding="utf-8") as out:
        for doc, ranking in zip(docs, rankings):
            for scope in ("entity", "event"):
                out.write(_ranking_line(doc.doc_id, scope, args.method,
                                        ranking[scope]))
                out.write("\n")
    return 0


def cmd_train_rgcn(args) -> int:
    config = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                config = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise SalienceError("cannot read config %r: %s" % (args.config, exc))
    lexicon = _load_lexicon(args)
    vector_table = None
    if config.get("vector_table"):
        with open(config["vector_table"], "r", encoding="utf-8") as handle:
            vector_table = load_vector_table(handle)

    ranker = RgcnRanker(
        lexicon=lexicon,
        word_dim=config.get("word_dim", 32),
        pos_dim=config.get("pos_dim", 8),
        layers=config.get("layers", 2),
        learning_rate=config.get("learning_rate", 0.01),
        epochs=config.get("epochs", 200),
        label_rule=config.get("label_rule", "first"),
        label_top=config.get("label_top", 10),
        seed=args.seed,
        vector_table=vector_table,
        edge_weight_mode=config.get("edge_weight_mode", "literal"))
    docs = list(load_corpus(args.manifest))
    ranker.fit(docs)
    from .rgcn import save_checkpoint
    save_checkpoint(ranker.model_, args.out)
    logger.info("final training loss: %g", ranker.loss_trace_[-1])
    return 0


def _parse_predictions(path: str) -> dict[str, DocPredictions]:
    by_doc: dict[str, dict[str, tuple]] = {}
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise SalienceError("cannot read predictions %r: %s" % (path, exc))
    with handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SalienceError(
                    "predictions line %d is not JSON: %s" % (lineno, exc))
            doc_id = record.get("doc_id")
            scope = record.get("scope")
            if doc_id is None or scope not in ("entity", "event"):
                raise SalienceError(
                    "predictions line %d needs doc_id and a scope of "
                    "entity or event" % lineno)
            keys = []
            for item in record.get("ranking", ()):
                key = item["key"]
                if scope == "event":
                    keys.append((key["trigger"], tuple(key["args"])))
                else:
                    keys.append(key)
            by_doc.setdefault(doc_id, {})[scope] = tuple(keys)
    return {doc_id: DocPredictions(entities=scopes.get("entity", ()),
                                   events=scopes.get("event", ()))
            for doc_id, scopes in by_doc.items()}


def cmd_evaluate(args) -> int:
    lexicon = _load_lexicon(args)
    predictions = _parse_predictions(args.predictions)
    ks = tuple(args.k) if args.k else DEFAULT_KS
    report = evaluate_corpus(load_corpus(args.manifest), predictions,
                             ks=ks, lexicon=lexicon)
    write_report(report, args.out)
    return 0


class UsageFailure(Exception):
    """Command-level usage problem detected after parsing."""


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="salience",
                     description="Entity and event salience estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_annotate = sub.add_parser("annotate", help="dump extracted candidates")
    p_annotate.add_argument("--manifest", required=True)
    _add_lexicon_flags(p_annotate, required=True)
    p_annotate.add_argument("--out", required=True)
    p_annotate.add_argument("--part", choices=("abstract", "body"),
                            default="abstract")
    p_annotate.set_defaults(func=cmd_annotate)

    p_rank = sub.add_parser("rank", help="rank candidates by salience")
    p_rank.add_argument("--manifest", required=True)
    p_rank.add_argument("--method", required=True, choices=METHODS)
    p_rank.add_argument("--model", help="checkpoint for --method rgcn")
    p_rank.add_argument("--edge-weight-mode", choices=("literal", "additive"),
                        default="literal")
    _add_lexicon_flags(p_rank)
    p_rank.add_argument("--out", required=True)
    p_rank.set_defaults(func=cmd_rank)

    p_train = sub.add_parser("train-rgcn", help="train the graph network")
    p_train.add_argument("--manifest", required=True)
    p_train.add_argument("--config", help="JSON training configuration")
    p_train.add_argument("--seed", type=int, required=True)
    _add_lexicon_flags(p_train)
    p_train.add_argument("--out", required=True)
    p_train.set_defaults(func=cmd_train_rgcn)

    p_eval = sub.add_parser("evaluate", help="score a ranking file")
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--predictions", required=True)
    p_eval.add_argument("--k", type=int, action="append",
                        help="cutoff; repeatable (default 1 3 5 10)")
    _add_lexicon_flags(p_eval)
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageFailure as exc:
        print("%s: error: %s" % (parser.prog, exc), file=sys.stderr)
        return USAGE_EXIT
    except SalienceError as exc:
        print("%s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
