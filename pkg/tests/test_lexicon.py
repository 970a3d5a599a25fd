"""Trigger lexicon construction and stoplist handling."""
import io
import random

import pytest

from salience import (
    ConfigError,
    Stoplists,
    build_trigger_lexicon,
    default_trigger_lexicon,
    is_event_trigger_lemma,
    load_stoplists,
    load_trigger_lexicon,
)
from salience.lexicon import (
    AUX_COPULAR_VERBS,
    LIGHT_VERBS,
    REPORT_VERBS,
    NOMINAL_UPOS,
    VERBAL_UPOS,
)


def test_build_filters_all_three_stoplists():
    candidates = ["walk", "say", "take", "argue", "end", "be", "seem"]
    lex = build_trigger_lexicon(candidates, ["war"])
    assert lex.verb_lemmas == frozenset({"walk", "end"})
    assert lex.eventive_noun_lemmas == frozenset({"war"})


def test_build_keeps_extra_proper_heads():
    lex = build_trigger_lexicon(["run"], ["storm"],
                                extra_proper_heads=["hurricane", "olympics"])
    assert lex.eventive_noun_lemmas == frozenset({"storm", "hurricane",
                                                  "olympics"})


def test_build_lowercases_and_strips():
    lex = build_trigger_lexicon([" Walk ", "RUN"], ["War"])
    assert lex.verb_lemmas == frozenset({"walk", "run"})
    assert lex.eventive_noun_lemmas == frozenset({"war"})


def test_no_stoplisted_verb_survives_construction():
    """Invariant: built lexicons never contain a stoplisted verb."""
    rng = random.Random(99)
    stops = Stoplists()
    pool = sorted(stops.all()) + ["walk", "win", "march", "explode", "vote"]
    for _ in range(25):
        sample = [rng.choice(pool) for _ in range(rng.randint(1, 15))]
        lex = build_trigger_lexicon(sample, [])
        assert not (lex.verb_lemmas & stops.all())


def test_default_stoplist_contents():
    stops = Stoplists()
    assert stops.aux_copular == AUX_COPULAR_VERBS
    assert stops.light_verbs == LIGHT_VERBS
    assert stops.report_verbs == REPORT_VERBS
    assert "be" in stops.aux_copular
    assert "make" in stops.light_verbs
    assert "say" in stops.report_verbs
    # have/do sit in two lists at once
    assert "have" in stops.aux_copular and "have" in stops.light_verbs
    assert stops.all() == stops.aux_copular | stops.light_verbs | stops.report_verbs


def test_load_trigger_lexicon_parses_comments_and_blanks():
    verbs = io.StringIO("# demo verbs\nwalk\n\nEnd\n  run  \n")
    nouns = io.StringIO("war\n# noise\ncall\n")
    lex = load_trigger_lexicon(verbs, nouns)
    assert lex.verb_lemmas == frozenset({"walk", "end", "run"})
    assert lex.eventive_noun_lemmas == frozenset({"war", "call"})


def test_load_trigger_lexicon_keeps_stoplisted_entries():
    # loading is verbatim; filtering only happens in build_trigger_lexicon
    lex = load_trigger_lexicon(io.StringIO("be\nmake\n"), io.StringIO("war\n"))
    assert lex.verb_lemmas == frozenset({"be", "make"})


def test_is_event_trigger_lemma_by_upos(lexicon):
    assert is_event_trigger_lemma(lexicon, "walk", "VERB")
    assert is_event_trigger_lemma(lexicon, "walk", "AUX")
    assert not is_event_trigger_lemma(lexicon, "walk", "NOUN")
    assert is_event_trigger_lemma(lexicon, "war", "NOUN")
    assert is_event_trigger_lemma(lexicon, "war", "PROPN")
    assert is_event_trigger_lemma(lexicon, "war", "PRON")
    assert not is_event_trigger_lemma(lexicon, "war", "VERB")
    assert not is_event_trigger_lemma(lexicon, "table", "NOUN")
    assert not is_event_trigger_lemma(lexicon, "walk", "ADJ")


def test_upos_groups():
    assert VERBAL_UPOS == frozenset({"VERB", "AUX"})
    assert NOMINAL_UPOS == frozenset({"NOUN", "PROPN", "PRON"})


def test_default_lexicon_bundled(lexicon):
    assert "walk" in lexicon.verb_lemmas
    assert "war" in lexicon.eventive_noun_lemmas
    assert "hurricane" in lexicon.eventive_noun_lemmas
    assert not (lexicon.verb_lemmas & Stoplists().all())


STOPLIST_FILE = """\
[aux_copular]
be
seem

[light_verbs]
make
take

[report_verbs]
say
"""


def test_load_stoplists_sections():
    stops = load_stoplists(io.StringIO(STOPLIST_FILE))
    assert stops.aux_copular == frozenset({"be", "seem"})
    assert stops.light_verbs == frozenset({"make", "take"})
    assert stops.report_verbs == frozenset({"say"})


def test_load_stoplists_unknown_section():
    with pytest.raises(ConfigError):
        load_stoplists(io.StringIO("[mystery]\nfoo\n"))


def test_load_stoplists_entry_before_section():
    with pytest.raises(ConfigError):
        load_stoplists(io.StringIO("be\n[aux_copular]\n"))
