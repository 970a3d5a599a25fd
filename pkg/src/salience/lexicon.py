"""Trigger lexicon: verb lemmas and eventive noun lemmas.

The verb side is built from corpus-frequent verb lemmas minus three
stoplists (auxiliary/copular, light and report verbs). The noun side
lists eventive nouns plus proper-name heads that denote events. A small
demo lexicon ships with the package; real deployments load their own.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from io import StringIO
from typing import Iterable, TextIO

from .errors import ConfigError

logger = logging.getLogger(__name__)

VERBAL_UPOS = frozenset({"VERB", "AUX"})
NOMINAL_UPOS = frozenset({"NOUN", "PROPN", "PRON"})

AUX_COPULAR_VERBS = frozenset({"appear", "become", "do", "have", "seem", "be"})
LIGHT_VERBS = frozenset({"do", "get", "give", "go", "have", "keep", "make",
                         "put", "set", "take"})
REPORT_VERBS = frozenset({"argue", "claim", "say", "suggest", "tell"})


@dataclass(frozen=True)
class Stoplists:
    aux_copular: frozenset[str] = AUX_COPULAR_VERBS
    light_verbs: frozenset[str] = LIGHT_VERBS
    report_verbs: frozenset[str] = REPORT_VERBS

    def all(self) -> frozenset[str]:
        return self.aux_copular | self.light_verbs | self.report_verbs


@dataclass(frozen=True)
class TriggerLexicon:
    verb_lemmas: frozenset[str]
    eventive_noun_lemmas: frozenset[str]


def _read_lemma_lines(source: str | TextIO) -> list[str]:
    handle = StringIO(source) if isinstance(source, str) else source
    lemmas = []
    for line in handle:
        entry = line.split("#", 1)[0].strip()
        if entry:
            lemmas.append(entry.lower())
    return lemmas


def load_trigger_lexicon(verbs_source: str | TextIO,
                         nouns_source: str | TextIO) -> TriggerLexicon:
    """Load one-lemma-per-line files ('#' starts a comment).

    Contents are lowercased and deduplicated but otherwise taken as
    given: no stoplist filtering happens here.
    """
    verbs = frozenset(_read_lemma_lines(verbs_source))
    nouns = frozenset(_read_lemma_lines(nouns_source))
    if not verbs:
        logger.warning("trigger lexicon has an empty verb list")
    return TriggerLexicon(verb_lemmas=verbs, eventive_noun_lemmas=nouns)


def build_trigger_lexicon(candidate_verbs: Iterable[str],
                          candidate_nouns: Iterable[str],
                          stoplists: Stoplists | None = None,
                          extra_proper_heads: Iterable[str] = ()) -> TriggerLexicon:
    """Build a lexicon from candidate lemma lists.

    Verb candidates lose every stoplisted lemma; noun candidates gain
    the proper-name event heads.
    """
    stops = stoplists or Stoplists()
    verbs = frozenset(v.strip().lower() for v in candidate_verbs) - stops.all()
    nouns = frozenset(n.strip().lower() for n in candidate_nouns)
    nouns |= frozenset(p.strip().lower() for p in extra_proper_heads)
    return TriggerLexicon(verb_lemmas=verbs, eventive_noun_lemmas=nouns)


def is_event_trigger_lemma(lexicon: TriggerLexicon, lemma: str, upos: str) -> bool:
    """True when (lemma, upos) can head an event trigger under this lexicon."""
    if upos in VERBAL_UPOS:
        return lemma in lexicon.verb_lemmas
    if upos in NOMINAL_UPOS:
        return lemma in lexicon.eventive_noun_lemmas
    return False


_STOPLIST_SECTIONS = ("aux_copular", "light_verbs", "report_verbs")


def load_stoplists(source: str | TextIO) -> Stoplists:
    """Read a stoplist override file.

    Same line format as the lexicon files, organized in three sections
    headed by [aux_copular], [light_verbs] and [report_verbs].
    """
    handle = StringIO(source) if isinstance(source, str) else source
    sections: dict[str, set[str]] = {name: set() for name in _STOPLIST_SECTIONS}
    current: str | None = None
    for line in handle:
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        if entry.startswith("[") and entry.endswith("]"):
            current = entry[1:-1]
            if current not in sections:
                raise ConfigError("unknown stoplist section %r" % current)
            continue
        if current is None:
            raise ConfigError("stoplist entry %r appears before any section" % entry)
        sections[current].add(entry.lower())
    return Stoplists(aux_copular=frozenset(sections["aux_copular"]),
                     light_verbs=frozenset(sections["light_verbs"]),
                     report_verbs=frozenset(sections["report_verbs"]))


def _bundled(name: str) -> str:
    return resources.files("salience.data").joinpath(name).read_text("utf-8")


def default_trigger_lexicon() -> TriggerLexicon:
    """The demo lexicon bundled with the package (already stop-filtered)."""
    return load_trigger_lexicon(_bundled("verbs.txt"), _bundled("nouns.txt"))
