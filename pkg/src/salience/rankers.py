"""Salience rankers: graph centrality plus frequency and location baselines.

Centrality follows the weighted TextRank recursion
    S(i) = (1 - d) + d * sum_j w_ji / (sum_k w_jk) * S(j)
over the undirected document graph. The baselines score lemma-identity
groups of candidates: frequency by mention count, location by earliest
mention.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .extraction import EntityCandidate, EventCandidate, event_key
from .graph import DocumentGraph
from .normalize import EMPTY_KEY, normalize_term

ENTITY_SCOPE = "entity"
EVENT_SCOPE = "event"


@dataclass(frozen=True)
class RankedItem:
    key: object          # str for entities, (trigger, args) tuple for events
    score: float
    node_id: int | None = None


@dataclass(frozen=True)
class RankedList:
    scope: str
    items: tuple[RankedItem, ...]

    def keys(self) -> list:
        return [item.key for item in self.items]

    def __len__(self) -> int:
        return len(self.items)


def top_k(ranked: RankedList, k: int) -> RankedList:
    if k < 1:
        raise ValueError("k must be >= 1, got %d" % k)
    return RankedList(scope=ranked.scope, items=ranked.items[:k])


@dataclass(frozen=True)
class TextRankConfig:
    damping: float = 0.85
    tolerance: float = 1e-6
    max_iterations: int = 100

    def __post_init__(self):
        if not (0.0 < self.damping < 1.0):
            raise ValueError("damping must lie in (0, 1), got %r" % self.damping)
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


class TextRankScores(dict):
    """node_id -> score map; `converged` records fixed-point status."""

    def __init__(self, scores: dict[int, float], converged: bool,
                 iterations: int):
        super().__init__(scores)
        self.converged = converged
        self.iterations = iterations


def textrank_scores(graph: DocumentGraph,
                    config: TextRankConfig | None = None) -> TextRankScores:
    """Iterate the weighted recursion to a fixed point.

    Scores start at 1. Iteration stops when the largest per-node change
    drops below the tolerance; hitting the iteration cap returns the
    last iterate with converged=False. Nodes without edges keep the
    teleport mass (1 - d).
    """
    cfg = config or TextRankConfig()
    n = graph.n_nodes
    adjacency = graph.neighbors()
    out_strength = [sum(adj.values()) for adj in adjacency]

    scores = [1.0] * n
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        nxt = [0.0] * n
        for i in range(n):
            acc = 0.0
            for j, w_ji in adjacency[i].items():
                acc += w_ji / out_strength[j] * scores[j]
            nxt[i] = (1.0 - cfg.damping) + cfg.damping * acc
        delta = max((abs(nxt[i] - scores[i]) for i in range(n)), default=0.0)
        scores = nxt
        if delta < cfg.tolerance:
            converged = True
            break
    if n == 0:
        converged = True
    return TextRankScores({i: scores[i] for i in range(n)}, converged,
                          iterations)


def _first_event_args(graph: DocumentGraph, node_id: int) -> tuple[str, ...]:
    """Argument keys of the earliest mention of an event node."""
    node = graph.nodes[node_id]
    first = node.spans[0].coords()
    for event in graph.events:
        if event.trigger.coords() == first:
            return event_key(event)[1]
    return ()


def ranked_lists_from_scores(graph: DocumentGraph,
                             scores: dict[int, float],
                             ) -> dict[str, RankedList]:
    """Turn node scores into per-scope ranked lists.

    Ties break by earliest first mention, then node id. Entity keys are
    the node keys; event keys pair the node key with the argument keys
    of the node's first mention.
    """
    per_scope: dict[str, list[RankedItem]] = {ENTITY_SCOPE: [], EVENT_SCOPE: []}
    order = sorted(graph.nodes,
                   key=lambda n: (-scores[n.node_id], n.first_offset, n.node_id))
    for node in order:
        if node.key == EMPTY_KEY:
            continue
        if node.node_type == "entity":
            per_scope[ENTITY_SCOPE].append(RankedItem(
                key=node.key, score=scores[node.node_id], node_id=node.node_id))
        else:
            key = (node.key, _first_event_args(graph, node.node_id))
            per_scope[EVENT_SCOPE].append(RankedItem(
                key=key, score=scores[node.node_id], node_id=node.node_id))
    return {scope: RankedList(scope=scope, items=tuple(items))
            for scope, items in per_scope.items()}


@dataclass
class _Group:
    """Identity group for the baselines."""
    identity: object
    key: object
    first_offset: int
    count: int


def _entity_groups(entities: Sequence[EntityCandidate]) -> list[_Group]:
    groups: dict[object, _Group] = {}
    ordered = sorted(entities, key=lambda e: e.span.doc_offset)
    for ent in ordered:
        identity = ent.span.head_lemma.lower()
        key = normalize_term(ent.span.tokens)
        if key == EMPTY_KEY:
            continue
        group = groups.get(identity)
        if group is None:
            groups[identity] = _Group(identity=identity, key=key,
                                      first_offset=ent.span.doc_offset, count=1)
        else:
            group.count += 1
    return list(groups.values())


def _event_groups(events: Sequence[EventCandidate]) -> list[_Group]:
    groups: dict[object, _Group] = {}
    ordered = sorted(events, key=lambda ev: ev.trigger.doc_offset)
    for event in ordered:
        identity = (event.trigger.head_lemma.lower(),
                    tuple(sorted(a.span.head_lemma.lower() for a in event.args)))
        key = event_key(event)
        if key[0] == EMPTY_KEY:
            continue
        group = groups.get(identity)
        if group is None:
            groups[identity] = _Group(identity=identity, key=key,
                                      first_offset=event.trigger.doc_offset,
                                      count=1)
        else:
            group.count += 1
    return list(groups.values())


def _groups_for(candidates: Sequence, scope: str) -> list[_Group]:
    if scope == ENTITY_SCOPE:
        return _entity_groups(candidates)
    if scope == EVENT_SCOPE:
        return _event_groups(candidates)
    raise ValueError("unknown scope %r" % scope)


def rank_by_frequency(candidates: Sequence, scope: str) -> RankedList:
    """Mention-count ranking.

    Entities group by head lemma; events by trigger lemma plus sorted
    argument head lemmas. Ties rank the earlier-seen group higher. Each
    group is reported under the key of its first mention.
    """
    groups = _groups_for(candidates, scope)
    groups.sort(key=lambda g: (-g.count, g.first_offset))
    return RankedList(scope=scope, items=tuple(
        RankedItem(key=g.key, score=float(g.count)) for g in groups))


def rank_by_location(candidates: Sequence, scope: str) -> RankedList:
    """Earliest-mention ranking over the same groups as rank_by_frequency.

    The score is the negated absolute token offset of the group's first
    mention, so earlier mentions rank higher.
    """
    groups = _groups_for(candidates, scope)
    groups.sort(key=lambda g: g.first_offset)
    return RankedList(scope=scope, items=tuple(
        RankedItem(key=g.key, score=-float(g.first_offset)) for g in groups))
