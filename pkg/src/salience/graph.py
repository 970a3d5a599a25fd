"""Document graph construction.

Nodes are merged entity and event-trigger mentions; edges combine four
channels: syntactic dependency between co-sentential candidates,
adjacency of entity mentions, adjacency of sentence roots, and
coreference. A typed-edge view (relation = source type, base relation,
target type, direction) feeds the relational graph network.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .conllu import Document, Sentence
from .extraction import (
    ENTITY,
    EVENT,
    EntityCandidate,
    EventCandidate,
    Span,
    base_rel,
    extract_candidates,
)
from .lexicon import Stoplists, TriggerLexicon
from .normalize import EMPTY_KEY, normalize_term

DEP = "dep"
ADJACENT_NP = "adjacent_np"
ADJACENT_ROOT = "adjacent_root"
COREF = "coref"

WEIGHT_MODES = ("literal", "additive")

# dependency labels bucketed into coarse relation names for typed edges
_DEP_BUCKETS = {
    "nsubj": "subject", "csubj": "subject",
    "obj": "object", "dobj": "object",
    "iobj": "dative", "dative": "dative",
    "obl": "oblique",
    "nmod": "modifier", "amod": "modifier", "advmod": "modifier",
    "nummod": "modifier", "appos": "modifier", "det": "modifier",
    "compound": "compound", "flat": "compound", "fixed": "compound",
    "conj": "conjunct",
}


def dep_bucket(deprel: str | None) -> str:
    if deprel is None:
        return "other"
    return _DEP_BUCKETS.get(base_rel(deprel), "other")


@dataclass(frozen=True)
class EdgeChannel:
    """One weighted link between two candidate spans.

    weight is always 1/distance; inter-sentence channels use the
    constant distance 1.
    """
    channel: str
    span_a: Span
    span_b: Span
    distance: float
    deprel: str | None = None    # dep channels along an ancestor path
    dependent: int | None = None  # 0 or 1: which span sits in the dependent subtree

    @property
    def weight(self) -> float:
        return 1.0 / self.distance


@dataclass
class Node:
    node_id: int
    node_type: str  # entity | event
    key: str
    spans: tuple[Span, ...]
    first_offset: int
    head_lemma: str
    head_upos: str


@dataclass
class Edge:
    weight: float
    channels: tuple[EdgeChannel, ...]


@dataclass
class DocumentGraph:
    doc_id: str
    part: str
    mode: str
    nodes: list[Node]
    edges: dict[tuple[int, int], Edge]
    typed_edges: list[tuple[int, str, int]] = field(default_factory=list)
    entities: list[EntityCandidate] = field(default_factory=list)
    events: list[EventCandidate] = field(default_factory=list)
    span_to_node: dict = field(default_factory=dict, repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def node_of(self, span: Span) -> int:
        return self.span_to_node[span.coords()]

    def neighbors(self) -> list[dict[int, float]]:
        """Symmetric adjacency: neighbors()[i][j] == w_ij."""
        adj: list[dict[int, float]] = [dict() for _ in self.nodes]
        for (i, j), edge in self.edges.items():
            adj[i][j] = edge.weight
            adj[j][i] = edge.weight
        return adj

    def relations(self) -> list[str]:
        return sorted({rel for _, rel, _ in self.typed_edges})


def tree_distance(sentence: Sentence, a: int, b: int) -> int:
    """Number of dependency arcs on the path between tokens a and b."""
    return len(tree_path(sentence, a, b)) - 1


def tree_path(sentence: Sentence, a: int, b: int) -> list[int]:
    """Unique undirected tree path from a to b, both endpoints included."""
    if a == b:
        return [a]
    adjacency: dict[int, list[int]] = {t.index: [] for t in sentence.tokens}
    for tok in sentence.tokens:
        if tok.head != 0:
            adjacency[tok.index].append(tok.head)
            adjacency[tok.head].append(tok.index)
    parent = {a: 0}
    queue = deque([a])
    while queue:
        current = queue.popleft()
        if current == b:
            break
        for nxt in adjacency[current]:
            if nxt not in parent:
                parent[nxt] = current
                queue.append(nxt)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _ancestor_arc(sentence: Sentence, path: list[int]) -> tuple[str | None, int | None]:
    """Classify a tree path between two candidate heads.

    When one endpoint dominates the other, returns the deprel of the arc
    entering the dominating endpoint plus which side (0 = path start,
    1 = path end) is the dependent. Sibling paths return (None, None).
    """
    up = all(sentence.token(path[k]).head == path[k + 1]
             for k in range(len(path) - 1))
    if up:  # path end dominates
        return sentence.token(path[-2]).deprel, 0
    down = all(sentence.token(path[k + 1]).head == path[k]
               for k in range(len(path) - 1))
    if down:  # path start dominates
        return sentence.token(path[1]).deprel, 1
    return None, None


def build_dependency_edges(sentence: Sentence,
                           spans: Sequence[Span]) -> list[EdgeChannel]:
    """Dependency channels between co-sentential candidate spans.

    A pair is linked only when the tree path between their heads passes
    through no other candidate head (mediated pairs stay unlinked).
    """
    heads = {span.head_index for span in spans}
    channels = []
    for span_a, span_b in itertools.combinations(spans, 2):
        path = tree_path(sentence, span_a.head_index, span_b.head_index)
        if any(idx in heads for idx in path[1:-1]):
            continue
        deprel, dependent = _ancestor_arc(sentence, path)
        channels.append(EdgeChannel(channel=DEP, span_a=span_a, span_b=span_b,
                                    distance=float(len(path) - 1),
                                    deprel=deprel, dependent=dependent))
    return channels


def fallback_coref_clusters(entities: Sequence[EntityCandidate]) -> list[list[Span]]:
    """Heuristic coreference: identical normalized mention strings."""
    groups: dict[str, list[Span]] = {}
    for ent in entities:
        key = normalize_term(ent.span.tokens)
        if key == EMPTY_KEY:
            continue
        groups.setdefault(key, []).append(ent.span)
    return [spans for spans in groups.values() if len(spans) >= 2]


def _token_depth(sentence: Sentence, index: int) -> int:
    depth = 0
    current = index
    while sentence.token(current).head != 0:
        current = sentence.token(current).head
        depth += 1
    return depth


def _resolve_cluster_refs(clusters, sentences: list[Sentence],
                          spans: Sequence[Span], part: str) -> list[list[Span]]:
    """Map coreference span references onto candidate spans.

    Exact coordinate matches win; otherwise the contained candidate span
    whose head sits highest in the tree is taken. Unmatched references
    are dropped.
    """
    by_coords = {span.coords(): span for span in spans}
    by_sent: dict[int, list[Span]] = {}
    for span in spans:
        by_sent.setdefault(span.sent_index, []).append(span)

    resolved_clusters = []
    for cluster in clusters:
        resolved = []
        for ref in cluster:
            if ref.part != part:
                continue
            exact = by_coords.get((part, ref.sent, ref.start, ref.end))
            if exact is not None:
                resolved.append(exact)
                continue
            contained = [s for s in by_sent.get(ref.sent, ())
                         if s.start >= ref.start and s.end <= ref.end]
            if contained:
                sentence = sentences[ref.sent]
                contained.sort(key=lambda s: (_token_depth(sentence, s.head_index),
                                              s.start))
                resolved.append(contained[0])
        unique = list(dict.fromkeys(resolved))
        if len(unique) >= 2:
            resolved_clusters.append(unique)
    return resolved_clusters


def build_auxiliary_edges(sentences: list[Sentence],
                          entities: Sequence[EntityCandidate],
                          events: Sequence[EventCandidate],
                          coref_clusters: list[list[Span]],
                          ) -> list[EdgeChannel]:
    """Adjacent-NP, adjacent-root and coreference channels.

    Consecutive entity mentions in one sentence are linked at their tree
    distance, across sentences at constant distance 1. Root channels
    link candidate spans heading consecutive sentences. Every span pair
    within a coreference cluster is linked at distance 1.
    """
    channels = []

    entity_spans = sorted((e.span for e in entities),
                          key=lambda s: (s.sent_index, s.start))
    for left, right in zip(entity_spans, entity_spans[1:]):
        if left.sent_index == right.sent_index:
            dist = float(tree_distance(sentences[left.sent_index],
                                       left.head_index, right.head_index))
        else:
            dist = 1.0
        channels.append(EdgeChannel(channel=ADJACENT_NP, span_a=left,
                                    span_b=right, distance=dist))

    all_spans = [e.span for e in entities] + [ev.trigger for ev in events]
    root_spans: dict[int, Span] = {}
    for span in all_spans:
        sentence = sentences[span.sent_index]
        if sentence.token(span.head_index).head == 0:
            root_spans[span.sent_index] = span
    for sent_index in sorted(root_spans):
        nxt = root_spans.get(sent_index + 1)
        if nxt is not None:
            channels.append(EdgeChannel(channel=ADJACENT_ROOT,
                                        span_a=root_spans[sent_index],
                                        span_b=nxt, distance=1.0))

    for cluster in coref_clusters:
        for span_a, span_b in itertools.combinations(cluster, 2):
            channels.append(EdgeChannel(channel=COREF, span_a=span_a,
                                        span_b=span_b, distance=1.0))
    return channels


def merge_nodes(typed_spans: Sequence[tuple[Span, str]]) -> list[Node]:
    """Merge mentions into nodes by (type, normalized tokens).

    Single pronoun mentions never merge: each keeps a node of its own.
    Nodes are ordered and numbered by first mention position.
    """
    ordered = sorted(typed_spans,
                     key=lambda pair: (pair[0].sent_index, pair[0].start,
                                       pair[0].end, pair[1]))
    groups: dict[object, list[tuple[Span, str]]] = {}
    for span, node_type in ordered:
        key = normalize_term(span.tokens)
        if span.is_single_pronoun() or key == EMPTY_KEY:
            group_key: object = ("#span", node_type, span.coords())
        else:
            group_key = (node_type, key)
        groups.setdefault(group_key, []).append((span, node_type))

    nodes = []
    for node_id, (group_key, members) in enumerate(groups.items()):
        spans = tuple(span for span, _ in members)
        node_type = members[0][1]
        first = spans[0]
        nodes.append(Node(node_id=node_id, node_type=node_type,
                          key=normalize_term(first.tokens), spans=spans,
                          first_offset=min(s.doc_offset for s in spans),
                          head_lemma=first.head_lemma,
                          head_upos=first.head_upos))
    return nodes


def combine_edge_weights(channels: Sequence[EdgeChannel], nodes: Sequence[Node],
                         mode: str = "literal") -> DocumentGraph:
    """Collapse span-level channels into node-level weights.

    literal mode: each span pair contributes the reciprocal of its
    summed channel weights; additive mode: the sum itself. Channels
    between mentions of one node are dropped (no self edges).
    """
    if mode not in WEIGHT_MODES:
        raise ValueError("unknown edge weight mode %r" % mode)
    span_to_node: dict[tuple, int] = {}
    for node in nodes:
        for span in node.spans:
            span_to_node[span.coords()] = node.node_id

    # (node pair) -> (span pair) -> channels
    grouped: dict[tuple[int, int], dict[tuple, list[EdgeChannel]]] = {}
    for channel in channels:
        ni = span_to_node[channel.span_a.coords()]
        nj = span_to_node[channel.span_b.coords()]
        if ni == nj:
            continue
        node_pair = (min(ni, nj), max(ni, nj))
        span_pair = tuple(sorted((channel.span_a.coords(),
                                  channel.span_b.coords())))
        grouped.setdefault(node_pair, {}).setdefault(span_pair, []).append(channel)

    edges: dict[tuple[int, int], Edge] = {}
    for node_pair, span_pairs in grouped.items():
        weight = 0.0
        edge_channels: list[EdgeChannel] = []
        for pair_channels in span_pairs.values():
            total = sum(ch.weight for ch in pair_channels)
            edge_channels.extend(pair_channels)
            if total <= 0.0:
                continue
            weight += 1.0 / total if mode == "literal" else total
        if weight > 0.0:
            edges[node_pair] = Edge(weight=weight, channels=tuple(edge_channels))

    return DocumentGraph(doc_id="", part="", mode=mode, nodes=list(nodes),
                         edges=edges, span_to_node=span_to_node)


def build_typed_edges(graph: DocumentGraph) -> list[tuple[int, str, int]]:
    """Directed typed edges for the relational network.

    Every node gets a self edge. Channel-derived edges appear in both
    directions; for dependency channels the forward direction runs from
    the dependent side to the governing side, and the path's arc label
    is bucketed into a coarse relation. Nodes sharing a head lemma are
    linked by same-headword edges.
    """
    typed: set[tuple[int, str, int]] = set()

    def relation(src: Node, base: str, dst: Node, direction: str) -> str:
        return "%s-%s-%s-%s" % (src.node_type, base, dst.node_type, direction)

    def add_pair(src: Node, base: str, dst: Node) -> None:
        typed.add((src.node_id, relation(src, base, dst, "fwd"), dst.node_id))
        typed.add((dst.node_id, relation(dst, base, src, "bwd"), src.node_id))

    for node in graph.nodes:
        typed.add((node.node_id, relation(node, "self", node, "self"),
                   node.node_id))

    for (i, j), edge in graph.edges.items():
        node_i, node_j = graph.nodes[i], graph.nodes[j]
        for channel in edge.channels:
            if channel.channel == DEP:
                base = dep_bucket(channel.deprel)
                if channel.dependent is None:
                    src, dst = node_i, node_j
                else:
                    dep_span = (channel.span_a, channel.span_b)[channel.dependent]
                    src = graph.nodes[graph.node_of(dep_span)]
                    dst = node_j if src is node_i else node_i
            else:
                base = channel.channel
                src, dst = node_i, node_j
            add_pair(src, base, dst)

    for node_a, node_b in itertools.combinations(graph.nodes, 2):
        if node_a.head_lemma.lower() == node_b.head_lemma.lower():
            add_pair(node_a, "same_headword", node_b)

    return sorted(typed)


def build_document_graph(doc: Document, lexicon: TriggerLexicon,
                         mode: str = "literal", part: str = "body",
                         stoplists: Stoplists | None = None,
                         coref_mode: str = "auto") -> DocumentGraph:
    """Extract candidates and assemble the full graph for one part.

    coref_mode: "auto" uses the document's clusters when present and the
    identical-mention fallback otherwise; "off" skips coreference.
    """
    if coref_mode not in ("auto", "off"):
        raise ValueError("unknown coref mode %r" % coref_mode)
    sentences = doc.part(part)
    entities, events = extract_candidates(doc, lexicon, part=part,
                                          stoplists=stoplists)
    spans = [e.span for e in entities] + [ev.trigger for ev in events]

    channels: list[EdgeChannel] = []
    by_sent: dict[int, list[Span]] = {}
    for span in spans:
        by_sent.setdefault(span.sent_index, []).append(span)
    for sent_index, sent_spans in sorted(by_sent.items()):
        channels.extend(build_dependency_edges(sentences[sent_index], sent_spans))

    if coref_mode == "off":
        clusters: list[list[Span]] = []
    elif doc.coref_clusters is not None:
        clusters = _resolve_cluster_refs(doc.coref_clusters, sentences,
                                         spans, part)
    else:
        clusters = fallback_coref_clusters(entities)
    channels.extend(build_auxiliary_edges(sentences, entities, events, clusters))

    nodes = merge_nodes([(e.span, ENTITY) for e in entities]
                        + [(ev.trigger, EVENT) for ev in events])
    graph = combine_edge_weights(channels, nodes, mode=mode)
    graph.doc_id = doc.doc_id
    graph.part = part
    graph.entities = list(entities)
    graph.events = list(events)
    graph.typed_edges = build_typed_edges(graph)
    return graph


def graph_to_dict(graph: DocumentGraph) -> dict:
    """JSON-ready dump of nodes, weighted edges and typed edges."""
    return {
        "doc_id": graph.doc_id,
        "part": graph.part,
        "mode": graph.mode,
        "nodes": [
            {"id": n.node_id, "type": n.node_type, "key": n.key,
             "spans": [{"sent": s.sent_index, "start": s.start, "end": s.end,
                        "surface": s.surface} for s in n.spans]}
            for n in graph.nodes
        ],
        "edges": [
            {"src": i, "dst": j, "weight": edge.weight,
             "channels": sorted(ch.channel for ch in edge.channels)}
            for (i, j), edge in sorted(graph.edges.items())
        ],
        "typed_edges": [
            {"src": src, "rel": rel, "dst": dst}
            for src, rel, dst in graph.typed_edges
        ],
    }
