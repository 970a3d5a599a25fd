"""Input validation helpers for the estimator layer."""
from __future__ import annotations

from typing import Sequence

from .conllu import Document
from .lexicon import Stoplists, TriggerLexicon, default_trigger_lexicon


def check_documents(X) -> list[Document]:
    """Validate an estimator input: a non-string sequence of Documents."""
    if isinstance(X, Document):
        raise TypeError("expected a sequence of Document, got a single "
                        "Document; wrap it in a list")
    if isinstance(X, (str, bytes)):
        raise TypeError("expected a sequence of Document, got a string")
    docs = list(X)
    for item in docs:
        if not isinstance(item, Document):
            raise TypeError("expected Document elements, got %s"
                            % type(item).__name__)
    return docs


def resolve_lexicon(lexicon: TriggerLexicon | None) -> TriggerLexicon:
    if lexicon is None:
        return default_trigger_lexicon()
    if not isinstance(lexicon, TriggerLexicon):
        raise TypeError("lexicon must be a TriggerLexicon or None")
    return lexicon


def resolve_stoplists(stoplists: Stoplists | None) -> Stoplists:
    if stoplists is None:
        return Stoplists()
    if not isinstance(stoplists, Stoplists):
        raise TypeError("stoplists must be a Stoplists or None")
    return stoplists
