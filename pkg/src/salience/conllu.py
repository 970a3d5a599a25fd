"""CoNLL-U reading and the document model.

Documents arrive as dependency parses in 10-column CoNLL-U. A corpus is
a JSONL manifest where each line holds a doc_id plus the body (and
optionally an abstract and coreference clusters), either inline or as a
file path relative to the manifest.
"""
from __future__ import annotations

import io
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO

from .errors import (
    ConlluFormatError,
    CorpusIOError,
    EmptyDocumentError,
    ManifestError,
    SpanReferenceError,
    TreeIntegrityError,
)

logger = logging.getLogger(__name__)

N_COLUMNS = 10

# column indices in a CoNLL-U line
ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC = range(N_COLUMNS)

BODY = "body"
ABSTRACT = "abstract"
PARTS = (BODY, ABSTRACT)


@dataclass(frozen=True)
class Token:
    """One syntactic word. head == 0 marks the sentence root."""
    index: int
    surface: str
    lemma: str
    upos: str
    head: int
    deprel: str


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, index: int) -> Token:
        """Token by its 1-based CoNLL-U index."""
        return self.tokens[index - 1]

    def root(self) -> Token:
        for tok in self.tokens:
            if tok.head == 0:
                return tok
        raise TreeIntegrityError("sentence has no root token")

    def dependents(self, index: int) -> list[Token]:
        return [t for t in self.tokens if t.head == index]


@dataclass(frozen=True)
class SpanRef:
    """A coreference mention: token span inside one sentence of one part."""
    part: str
    sent: int
    start: int
    end: int


@dataclass
class Document:
    doc_id: str
    body: list[Sentence]
    abstract: list[Sentence] | None = None
    coref_clusters: list[list[SpanRef]] | None = None

    def part(self, name: str) -> list[Sentence]:
        if name == BODY:
            return self.body
        if name == ABSTRACT:
            if self.abstract is None:
                raise SpanReferenceError(
                    "document %r has no abstract" % self.doc_id)
            return self.abstract
        raise ValueError("unknown document part %r" % name)


def parse_conllu_sentence(lines: Sequence[str]) -> Sentence:
    """Parse the lines of one sentence block.

    Comment lines, multiword-token ranges (id with '-') and empty nodes
    (id with '.') are skipped. Raises ConlluFormatError on malformed
    lines and TreeIntegrityError when the result is not a single rooted
    tree over contiguous indices 1..n.
    """
    tokens: list[Token] = []
    for raw in lines:
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != N_COLUMNS:
            raise ConlluFormatError(
                "expected %d tab-separated columns, got %d: %r"
                % (N_COLUMNS, len(cols), line))
        if "-" in cols[ID] or "." in cols[ID]:
            continue
        try:
            index = int(cols[ID])
            head = int(cols[HEAD])
        except ValueError:
            raise ConlluFormatError("non-integer id or head: %r" % line)
        tokens.append(Token(index=index, surface=cols[FORM], lemma=cols[LEMMA],
                            upos=cols[UPOS], head=head, deprel=cols[DEPREL]))

    if not tokens:
        raise ConlluFormatError("sentence block contains no token lines")
    for pos, tok in enumerate(tokens, start=1):
        if tok.index != pos:
            raise ConlluFormatError(
                "token indices must be contiguous from 1, found %d at slot %d"
                % (tok.index, pos))
    for tok in tokens:
        if tok.head < 0 or tok.head > len(tokens):
            raise ConlluFormatError(
                "token %d refers to head %d outside 0..%d"
                % (tok.index, tok.head, len(tokens)))
    sentence = Sentence(tokens=tuple(tokens))
    _check_tree(sentence)
    return sentence


def _check_tree(sentence: Sentence) -> None:
    n = len(sentence)
    roots = [t for t in sentence.tokens if t.head == 0]
    if len(roots) != 1:
        raise TreeIntegrityError("expected exactly one root, found %d" % len(roots))
    for tok in sentence.tokens:
        if tok.head == tok.index:
            raise TreeIntegrityError("token %d is its own head" % tok.index)
        if tok.head < 0 or tok.head > n:
            raise TreeIntegrityError(
                "token %d has head %d outside 1..%d" % (tok.index, tok.head, n))
    # every token must reach the root without revisiting a node
    children: dict[int, list[int]] = {}
    for tok in sentence.tokens:
        children.setdefault(tok.head, []).append(tok.index)
    seen: set[int] = set()
    stack = [0]
    while stack:
        node = stack.pop()
        for child in children.get(node, ()):
            if child in seen:
                raise TreeIntegrityError("cycle at token %d" % child)
            seen.add(child)
            stack.append(child)
    if len(seen) != n:
        raise TreeIntegrityError("dependency graph contains a cycle")


def sentence_to_conllu(sentence: Sentence) -> str:
    """Serialize back to 10-column form (unstored columns become '_')."""
    lines = []
    for tok in sentence.tokens:
        lines.append("\t".join([
            str(tok.index), tok.surface, tok.lemma, tok.upos, "_", "_",
            str(tok.head), tok.deprel, "_", "_",
        ]))
    return "\n".join(lines) + "\n"


def parse_conllu(text: str) -> list[Sentence]:
    """Split a CoNLL-U document on blank lines and parse each block."""
    sentences = []
    block: list[str] = []
    for line in text.splitlines():
        if line.strip():
            block.append(line)
        elif block:
            sentences.append(parse_conllu_sentence(block))
            block = []
    if block:
        sentences.append(parse_conllu_sentence(block))
    return sentences


def _read_source(source: str | TextIO) -> str:
    if isinstance(source, str):
        return source
    return source.read()


def load_coref_clusters(source: str | TextIO,
                        doc: Document | None = None) -> list[list[SpanRef]]:
    """Load coreference clusters from JSON.

    Input is a list of clusters, each a list of span objects with keys
    part, sent, start, end. Singleton clusters are dropped. When a
    document is given, every span is validated against it and a
    SpanReferenceError is raised for out-of-range references.
    """
    text = _read_source(source)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConlluFormatError("coref source is not valid JSON: %s" % exc)
    if not isinstance(raw, list):
        raise ConlluFormatError("coref source must be a JSON list of clusters")

    clusters: list[list[SpanRef]] = []
    for cluster in raw:
        refs = []
        for item in cluster:
            try:
                ref = SpanRef(part=item["part"], sent=int(item["sent"]),
                              start=int(item["start"]), end=int(item["end"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConlluFormatError("malformed coref span: %r (%s)" % (item, exc))
            if ref.part not in PARTS:
                raise ConlluFormatError("unknown part %r in coref span" % ref.part)
            if not (1 <= ref.start <= ref.end):
                raise SpanReferenceError(
                    "coref span has invalid bounds: %r" % (item,))
            if doc is not None:
                _check_ref(ref, doc)
            refs.append(ref)
        if len(refs) >= 2:
            clusters.append(refs)
    return clusters


def _check_ref(ref: SpanRef, doc: Document) -> None:
    if ref.part == ABSTRACT and doc.abstract is None:
        raise SpanReferenceError(
            "coref span refers to missing abstract in doc %r" % doc.doc_id)
    sentences = doc.body if ref.part == BODY else doc.abstract
    if not (0 <= ref.sent < len(sentences)):
        raise SpanReferenceError(
            "coref span sentence %d out of range in doc %r (part %s has %d sentences)"
            % (ref.sent, doc.doc_id, ref.part, len(sentences)))
    n = len(sentences[ref.sent])
    if ref.end > n:
        raise SpanReferenceError(
            "coref span %d..%d exceeds sentence length %d in doc %r"
            % (ref.start, ref.end, n, doc.doc_id))


def load_document(body_source: str | TextIO,
                  abstract_source: str | TextIO | None = None,
                  coref_source: str | TextIO | None = None,
                  doc_id: str = "") -> Document:
    """Assemble a Document from CoNLL-U sources.

    String sources are taken as raw CoNLL-U text; pass file objects for
    on-disk data. An empty body raises EmptyDocumentError.
    """
    body = parse_conllu(_read_source(body_source))
    if not body:
        raise EmptyDocumentError("document %r has an empty body" % doc_id)
    abstract = None
    if abstract_source is not None:
        abstract = parse_conllu(_read_source(abstract_source)) or None
    doc = Document(doc_id=doc_id, body=body, abstract=abstract)
    if coref_source is not None:
        doc.coref_clusters = load_coref_clusters(coref_source, doc=doc)
    return doc


def _is_inline(value: str) -> bool:
    # Inline CoNLL-U (or JSON) always contains structure characters a
    # path never has; bare values are resolved as paths.
    return "\n" in value or "\t" in value or value.lstrip().startswith("[")


def _resolve(value, base_dir: str, doc_id: str, what: str) -> str:
    """Return source text for a manifest field (inline or file path)."""
    if not isinstance(value, str):
        raise ManifestError(
            "field %r of doc %r must be a string" % (what, doc_id))
    if _is_inline(value):
        return value
    path = value if os.path.isabs(value) else os.path.join(base_dir, value)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise CorpusIOError(
            "doc %r: cannot read %s file %r: %s" % (doc_id, what, path, exc))


def load_corpus(manifest: str | TextIO) -> Iterator[Document]:
    """Stream documents from a JSONL manifest.

    Each line is an object with doc_id and body, plus optional abstract
    and coref fields. Values hold either inline content or a path
    relative to the manifest file. Duplicate doc ids raise ManifestError.
    """
    base_dir = "."
    if isinstance(manifest, str):
        base_dir = os.path.dirname(os.path.abspath(manifest))
        try:
            handle: TextIO = open(manifest, "r", encoding="utf-8")
        except OSError as exc:
            raise ManifestError("cannot read manifest %r: %s" % (manifest, exc))
    else:
        handle = manifest
        name = getattr(manifest, "name", None)
        if isinstance(name, str):
            base_dir = os.path.dirname(os.path.abspath(name))

    seen: set[str] = set()
    try:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError("manifest line %d is not JSON: %s" % (lineno, exc))
            if "doc_id" not in record or "body" not in record:
                raise ManifestError(
                    "manifest line %d needs doc_id and body" % lineno)
            doc_id = str(record["doc_id"])
            if doc_id in seen:
                raise ManifestError("duplicate doc_id %r in manifest" % doc_id)
            seen.add(doc_id)
            body = _resolve(record["body"], base_dir, doc_id, "body")
            abstract = None
            if record.get("abstract") is not None:
                abstract = _resolve(record["abstract"], base_dir, doc_id, "abstract")
            coref = None
            if record.get("coref") is not None:
                coref = _resolve(record["coref"], base_dir, doc_id, "coref")
            yield load_document(body, abstract, coref, doc_id=doc_id)
    finally:
        if handle is not manifest:
            handle.close()


def load_corpus_list(manifest: str | TextIO) -> list[Document]:
    return list(load_corpus(manifest))


def sentence_offsets(sentences: Iterable[Sentence]) -> list[int]:
    """Absolute token offset of the first token of each sentence."""
    offsets = []
    total = 0
    for sent in sentences:
        offsets.append(total)
        total += len(sent)
    return offsets
