"""Candidate extraction: base NPs, entities, event triggers, arguments.

Entities are base noun phrases whose head is not an eventive noun.
Event triggers are lexicon verbs (minus auxiliary/copular uses) and
eventive-noun heads; a light verb governing an eventive-noun object
contributes only the nominal trigger. Core arguments come from subject,
object and dative dependents of the trigger.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .conllu import Document, Sentence, Token, sentence_offsets
from .errors import PartMissingError
from .lexicon import (
    NOMINAL_UPOS,
    VERBAL_UPOS,
    Stoplists,
    TriggerLexicon,
    is_event_trigger_lemma,
)
from .normalize import EMPTY_KEY, normalize_term

# dependency relations that glue a base NP together (matched on the
# base label, before any ':' subtype)
NP_INTERNAL_RELS = frozenset({"det", "amod", "compound", "nummod"})

# deprels that mark an auxiliary or copular use of a verb token
AUX_COP_RELS = frozenset({"aux", "cop"})

CORE_ROLE_BY_REL = {"nsubj": "subject", "obj": "object", "iobj": "dative"}

ENTITY = "entity"
EVENT = "event"


def base_rel(deprel: str) -> str:
    return deprel.split(":", 1)[0]


@dataclass(frozen=True)
class Span:
    """A token span inside one sentence. start/end are 1-based inclusive."""
    part: str
    sent_index: int
    start: int
    end: int
    head_index: int
    tokens: tuple[str, ...]
    head_lemma: str
    head_upos: str
    doc_offset: int = 0  # absolute token offset of `start` within the part

    @property
    def surface(self) -> str:
        return " ".join(self.tokens)

    def __post_init__(self):
        if not (self.start <= self.head_index <= self.end):
            raise ValueError("span head %d outside %d..%d"
                             % (self.head_index, self.start, self.end))

    def coords(self) -> tuple[str, int, int, int]:
        return (self.part, self.sent_index, self.start, self.end)

    def is_single_pronoun(self) -> bool:
        return self.start == self.end and self.head_upos == "PRON"


@dataclass(frozen=True)
class EntityCandidate:
    span: Span


@dataclass(frozen=True)
class ArgumentRef:
    role: str          # subject | object | dative
    target_kind: str   # entity | event
    span: Span


@dataclass(frozen=True)
class EventCandidate:
    trigger: Span
    args: tuple[ArgumentRef, ...]


@dataclass(frozen=True)
class PseudoAnnotation:
    doc_id: str
    salient_entities: frozenset[str]
    salient_events: frozenset[tuple[str, tuple[str, ...]]]


def _is_np_internal(tok: Token, sentence: Sentence) -> bool:
    """True when tok sits inside a larger base NP to its right."""
    if base_rel(tok.deprel) not in NP_INTERNAL_RELS or tok.head == 0:
        return False
    governor = sentence.token(tok.head)
    return governor.upos in NOMINAL_UPOS and tok.index < governor.index


def extract_base_nps(sentence: Sentence, part: str = "body",
                     sent_index: int = 0, token_offset: int = 0) -> list[Span]:
    """Base noun phrases: one maximal contiguous span per nominal head.

    The span covers the head and the closure of its left-attached
    determiner/adjectival/compound/numeric dependents. Nominal tokens
    that are themselves NP-internal do not head a span of their own.
    """
    spans = []
    for head in sentence.tokens:
        if head.upos not in NOMINAL_UPOS or _is_np_internal(head, sentence):
            continue
        members = {head.index}
        stack = [head.index]
        while stack:
            current = stack.pop()
            for dep in sentence.dependents(current):
                if (dep.index < head.index and dep.index not in members
                        and base_rel(dep.deprel) in NP_INTERNAL_RELS):
                    members.add(dep.index)
                    stack.append(dep.index)
        start = head.index
        while start - 1 in members:
            start -= 1
        tokens = tuple(sentence.token(i).surface
                       for i in range(start, head.index + 1))
        spans.append(Span(part=part, sent_index=sent_index, start=start,
                          end=head.index, head_index=head.index, tokens=tokens,
                          head_lemma=head.lemma, head_upos=head.upos,
                          doc_offset=token_offset + start - 1))
    spans.sort(key=lambda s: (s.start, s.end))
    return spans


def extract_entities(sentence: Sentence, lexicon: TriggerLexicon,
                     part: str = "body", sent_index: int = 0,
                     token_offset: int = 0) -> list[EntityCandidate]:
    """Base NPs whose head is not an eventive noun."""
    out = []
    for span in extract_base_nps(sentence, part, sent_index, token_offset):
        if span.head_lemma.lower() in lexicon.eventive_noun_lemmas:
            continue
        out.append(EntityCandidate(span=span))
    return out


def _is_light_verb_with_eventive_obj(tok: Token, sentence: Sentence,
                                     lexicon: TriggerLexicon,
                                     stoplists: Stoplists) -> bool:
    if tok.lemma.lower() not in stoplists.light_verbs:
        return False
    for dep in sentence.dependents(tok.index):
        if (base_rel(dep.deprel) == "obj" and dep.upos in NOMINAL_UPOS
                and dep.lemma.lower() in lexicon.eventive_noun_lemmas):
            return True
    return False


def extract_event_triggers(sentence: Sentence, lexicon: TriggerLexicon,
                           stoplists: Stoplists | None = None,
                           part: str = "body", sent_index: int = 0,
                           token_offset: int = 0) -> list[Span]:
    """Trigger spans for one sentence.

    Verbal triggers are single lexicon-verb tokens, excluding auxiliary
    and copular uses and light verbs that pass their content to an
    eventive-noun object. Nominal triggers are the heads of base NPs
    with eventive-noun heads, annotated on the head token only.
    """
    stops = stoplists or Stoplists()
    triggers = []
    for tok in sentence.tokens:
        if tok.upos not in VERBAL_UPOS:
            continue
        if tok.lemma.lower() not in lexicon.verb_lemmas:
            continue
        if base_rel(tok.deprel) in AUX_COP_RELS:
            continue
        if _is_light_verb_with_eventive_obj(tok, sentence, lexicon, stops):
            continue
        triggers.append(Span(part=part, sent_index=sent_index, start=tok.index,
                             end=tok.index, head_index=tok.index,
                             tokens=(tok.surface,), head_lemma=tok.lemma,
                             head_upos=tok.upos,
                             doc_offset=token_offset + tok.index - 1))
    for span in extract_base_nps(sentence, part, sent_index, token_offset):
        head = sentence.token(span.head_index)
        if is_event_trigger_lemma(lexicon, head.lemma.lower(), head.upos):
            triggers.append(replace(span, start=span.head_index,
                                    tokens=(head.surface,),
                                    doc_offset=token_offset + span.head_index - 1))
    triggers.sort(key=lambda s: (s.start, s.end))
    return triggers


def extract_core_arguments(trigger: Span, sentence: Sentence,
                           entities: Sequence[EntityCandidate],
                           events: Sequence[Span],
                           stoplists: Stoplists | None = None) -> tuple[ArgumentRef, ...]:
    """Subject/object/dative dependents of a trigger, resolved to candidates.

    For a nominal trigger that is the object of a light verb, the core
    dependents of that verb count as the trigger's arguments (the verb
    itself contributes no trigger, so its arguments belong to the noun).
    """
    stops = stoplists or Stoplists()
    entity_by_head = {e.span.head_index: e.span for e in entities}
    event_by_head = {s.head_index: s for s in events}

    scan_heads = [trigger.head_index]
    head_tok = sentence.token(trigger.head_index)
    if (head_tok.upos in NOMINAL_UPOS and base_rel(head_tok.deprel) == "obj"
            and head_tok.head != 0):
        governor = sentence.token(head_tok.head)
        if (governor.upos in VERBAL_UPOS
                and governor.lemma.lower() in stops.light_verbs):
            scan_heads.append(governor.index)

    args = []
    for scan in scan_heads:
        for dep in sentence.dependents(scan):
            if dep.index == trigger.head_index:
                continue
            role = CORE_ROLE_BY_REL.get(base_rel(dep.deprel))
            if role is None:
                continue
            if dep.index in entity_by_head:
                args.append(ArgumentRef(role=role, target_kind=ENTITY,
                                        span=entity_by_head[dep.index]))
            elif dep.index in event_by_head:
                args.append(ArgumentRef(role=role, target_kind=EVENT,
                                        span=event_by_head[dep.index]))
    args.sort(key=lambda a: a.span.head_index)
    return tuple(args)


def extract_candidates(doc: Document, lexicon: TriggerLexicon,
                       part: str = "body",
                       stoplists: Stoplists | None = None,
                       ) -> tuple[list[EntityCandidate], list[EventCandidate]]:
    """Entities and events for one document part, in document order."""
    if part == "abstract" and doc.abstract is None:
        raise PartMissingError("document %r has no abstract" % doc.doc_id)
    sentences = doc.part(part)
    offsets = sentence_offsets(sentences)
    stops = stoplists or Stoplists()

    all_entities: list[EntityCandidate] = []
    all_events: list[EventCandidate] = []
    for sent_index, sentence in enumerate(sentences):
        offset = offsets[sent_index]
        entities = extract_entities(sentence, lexicon, part, sent_index, offset)
        triggers = extract_event_triggers(sentence, lexicon, stops, part,
                                          sent_index, offset)
        all_entities.extend(entities)
        for trigger in triggers:
            args = extract_core_arguments(trigger, sentence, entities,
                                          triggers, stops)
            all_events.append(EventCandidate(trigger=trigger, args=args))
    return all_entities, all_events


def event_key(event: EventCandidate) -> tuple[str, tuple[str, ...]]:
    """Evaluation key of an event: normalized trigger plus sorted argument keys."""
    trigger_key = normalize_term(event.trigger.tokens)
    arg_keys = sorted(k for k in (normalize_term(a.span.tokens) for a in event.args)
                      if k != EMPTY_KEY)
    return (trigger_key, tuple(arg_keys))


def annotate_pseudo_salience(doc: Document, lexicon: TriggerLexicon,
                             stoplists: Stoplists | None = None) -> PseudoAnnotation:
    """Salient terms of a document: everything mentioned in its abstract."""
    entities, events = extract_candidates(doc, lexicon, part="abstract",
                                          stoplists=stoplists)
    entity_keys = frozenset(
        k for k in (normalize_term(e.span.tokens) for e in entities)
        if k != EMPTY_KEY)
    event_keys = frozenset(
        key for key in (event_key(ev) for ev in events)
        if key[0] != EMPTY_KEY)
    return PseudoAnnotation(doc_id=doc.doc_id, salient_entities=entity_keys,
                            salient_events=event_keys)


def candidates_to_record(doc_id: str, entities: Iterable[EntityCandidate],
                         events: Iterable[EventCandidate]) -> dict:
    """Candidate dump record for one document (JSONL-ready)."""
    return {
        "doc_id": doc_id,
        "entities": [
            {"surface": e.span.surface, "head_lemma": e.span.head_lemma,
             "sent": e.span.sent_index, "start": e.span.start, "end": e.span.end}
            for e in entities
        ],
        "events": [
            {"trigger": ev.trigger.surface,
             "args": [{"role": a.role, "surface": a.span.surface}
                      for a in ev.args]}
            for ev in events
        ],
    }
