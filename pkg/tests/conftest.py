"""Shared fixtures and sentence builders for the test suite."""
import os
import random

import pytest

from salience import Document, Sentence, Token, default_trigger_lexicon

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def data_path(*parts: str) -> str:
    return os.path.join(DATA_DIR, *parts)


def read_fixture_sentence(name: str) -> str:
    with open(data_path("sentences", name), encoding="utf-8") as handle:
        return handle.read()


def make_sentence(rows) -> Sentence:
    """Build a Sentence from (surface, lemma, upos, head, deprel) rows."""
    tokens = tuple(Token(index=i, surface=s, lemma=l, upos=u, head=h, deprel=d)
                   for i, (s, l, u, h, d) in enumerate(rows, start=1))
    return Sentence(tokens=tokens)


def random_tree_sentence(rng: random.Random, n: int) -> Sentence:
    """Random valid dependency tree over n tokens.

    Token 1 is the root; every later token attaches to some earlier
    token, which guarantees a single-rooted acyclic parse.
    """
    upos_pool = ["NOUN", "VERB", "PROPN", "ADJ", "DET", "ADP", "PRON", "AUX"]
    deprel_pool = ["nsubj", "obj", "iobj", "obl", "amod", "det", "compound",
                   "nmod", "advmod", "conj", "case", "aux", "cop"]
    rows = []
    for i in range(1, n + 1):
        head = 0 if i == 1 else rng.randint(1, i - 1)
        deprel = "root" if i == 1 else rng.choice(deprel_pool)
        upos = rng.choice(upos_pool)
        surface = "w%d" % i
        rows.append((surface, surface, upos, head, deprel))
    return make_sentence(rows)


def make_doc(body, abstract=None, doc_id="doc", coref=None) -> Document:
    return Document(doc_id=doc_id, body=list(body),
                    abstract=None if abstract is None else list(abstract),
                    coref_clusters=coref)


def make_span(tokens, sent=0, start=1, upos="NOUN", part="body", offset=None):
    from salience.extraction import Span
    end = start + len(tokens) - 1
    return Span(part=part, sent_index=sent, start=start, end=end,
                head_index=end, tokens=tuple(tokens),
                head_lemma=tokens[-1].lower(), head_upos=upos,
                doc_offset=start - 1 if offset is None else offset)


@pytest.fixture(scope="session")
def lexicon():
    return default_trigger_lexicon()
