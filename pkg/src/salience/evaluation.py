"""Ranking evaluation against abstract-derived pseudo gold.

Salient terms of a document are the normalized entities and events of
its abstract. Predictions match gold by exact key equality after
normalization; precision, recall and F1 are computed at fixed cutoffs
and macro-averaged over documents. Documents without gold for a scope
are skipped for that scope.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .conllu import Document
from .errors import EmptyGoldError, PartMissingError, SpanReferenceError
from .extraction import PseudoAnnotation, annotate_pseudo_salience
from .lexicon import Stoplists, TriggerLexicon, default_trigger_lexicon
from .normalize import EMPTY_KEY, dedup_keys, normalize_term  # re-export

DEFAULT_KS = (1, 3, 5, 10)

ENTITY_SCOPE = "entity"
EVENT_TRIGGER_SCOPE = "event_trigger"
EVENT_WITH_ARGS_SCOPE = "event_with_args"
SCOPES = (ENTITY_SCOPE, EVENT_TRIGGER_SCOPE, EVENT_WITH_ARGS_SCOPE)


def match_sets(gold: set, predicted: Sequence, k: int) -> tuple[float, float, float]:
    """Precision/recall/F1 of the top-k predictions against a gold set.

    predicted must already be deduplicated in rank order. Precision
    divides by min(k, len(predicted)): an empty prediction list scores
    zero. An empty gold set raises EmptyGoldError, the skip signal.
    """
    if k < 1:
        raise ValueError("k must be >= 1, got %d" % k)
    if not gold:
        raise EmptyGoldError("no gold terms for this document")
    cutoff = list(predicted[:min(k, len(predicted))])
    if not cutoff:
        return 0.0, 0.0, 0.0
    hits = sum(1 for key in cutoff if key in gold)
    precision = hits / len(cutoff)
    recall = hits / len(gold)
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall > 0 else 0.0)
    return precision, recall, f1


def evaluate_events(gold_events: set, predicted_events: Sequence, k: int,
                    mode: str = "trigger_only") -> tuple[float, float, float]:
    """Event matching in two strictness modes.

    trigger_only compares trigger keys alone; with_args compares
    (trigger, sorted argument keys) tuples exactly.
    """
    if mode == "trigger_only":
        gold = {trigger for trigger, _ in gold_events}
        predicted = dedup_keys(trigger for trigger, _ in predicted_events)
    elif mode == "with_args":
        gold = set(gold_events)
        predicted = dedup_keys(predicted_events)
    else:
        raise ValueError("unknown event mode %r" % mode)
    return match_sets(gold, predicted, k)


@dataclass
class ScopeReport:
    docs_scored: int
    metrics: dict[int, tuple[float, float, float]]  # k -> (P, R, F1)


@dataclass
class EvalReport:
    docs_evaluated: int
    docs_skipped: int
    scopes: dict[str, ScopeReport]


@dataclass(frozen=True)
class DocPredictions:
    """Ranked prediction keys for one document."""
    entities: tuple = ()
    events: tuple = ()   # (trigger_key, (arg_key, ...)) in rank order


def _doc_scope_metrics(gold: PseudoAnnotation, pred: DocPredictions,
                       ks: Sequence[int]) -> dict[str, dict[int, tuple]]:
    out: dict[str, dict[int, tuple]] = {}
    entity_pred = dedup_keys(pred.entities)
    try:
        out[ENTITY_SCOPE] = {k: match_sets(set(gold.salient_entities),
                                           entity_pred, k) for k in ks}
    except EmptyGoldError:
        pass
    for scope, mode in ((EVENT_TRIGGER_SCOPE, "trigger_only"),
                        (EVENT_WITH_ARGS_SCOPE, "with_args")):
        try:
            out[scope] = {k: evaluate_events(set(gold.salient_events),
                                             list(pred.events), k, mode)
                          for k in ks}
        except EmptyGoldError:
            pass
    return out


def evaluate_corpus(corpus: Iterable[Document],
                    predictions: Mapping[str, DocPredictions],
                    ks: Sequence[int] = DEFAULT_KS,
                    lexicon: TriggerLexicon | None = None,
                    stoplists: Stoplists | None = None) -> EvalReport:
    """Macro-averaged metrics per scope and cutoff.

    Gold comes from each document's abstract. Documents without an
    abstract, or without gold for a scope, are excluded from that
    average. Predictions for unknown documents raise SpanReferenceError;
    documents without predictions count as empty predictions.
    """
    lex = lexicon or default_trigger_lexicon()
    sums: dict[str, dict[int, list[float]]] = {
        scope: {k: [0.0, 0.0, 0.0] for k in ks} for scope in SCOPES}
    counts = {scope: 0 for scope in SCOPES}
    docs_evaluated = 0
    docs_skipped = 0
    seen_ids = set()

    for doc in corpus:
        seen_ids.add(doc.doc_id)
        try:
            gold = annotate_pseudo_salience(doc, lex, stoplists)
        except PartMissingError:
            docs_skipped += 1
            continue
        pred = predictions.get(doc.doc_id, DocPredictions())
        per_scope = _doc_scope_metrics(gold, pred, ks)
        if not per_scope:
            docs_skipped += 1
            continue
        docs_evaluated += 1
        for scope, by_k in per_scope.items():
            counts[scope] += 1
            for k, (p, r, f1) in by_k.items():
                sums[scope][k][0] += p
                sums[scope][k][1] += r
                sums[scope][k][2] += f1

    unknown = set(predictions) - seen_ids
    if unknown:
        raise SpanReferenceError(
            "predictions reference unknown documents: %s"
            % ", ".join(sorted(unknown)[:5]))

    scopes = {}
    for scope in SCOPES:
        n = counts[scope]
        metrics = {}
        for k in ks:
            if n:
                metrics[k] = tuple(v / n for v in sums[scope][k])
            else:
                metrics[k] = (0.0, 0.0, 0.0)
        scopes[scope] = ScopeReport(docs_scored=n, metrics=metrics)
    return EvalReport(docs_evaluated=docs_evaluated, docs_skipped=docs_skipped,
                      scopes=scopes)


def report_to_dict(report: EvalReport) -> dict:
    """JSON-ready report with 6-decimal fixed precision."""
    return {
        "docs_evaluated": report.docs_evaluated,
        "docs_skipped": report.docs_skipped,
        "scopes": {
            scope: {
                "docs_scored": sr.docs_scored,
                "metrics": {
                    str(k): {
                        "precision": round(p, 6),
                        "recall": round(r, 6),
                        "f1": round(f1, 6),
                    }
                    for k, (p, r, f1) in sorted(sr.metrics.items())
                },
            }
            for scope, sr in report.scopes.items()
        },
    }


def write_report(report: EvalReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(report_to_dict(report), handle, indent=2, sort_keys=True)
        handle.write("\n")
