"""Relational graph network for node salience classification.

Two-layer message passing over the typed-edge view of a document graph:

    h_i^{l+1} = sigma( W_0^l h_i^l
                       + sum_r sum_{j in N_r(i)} (1 / c_{i,r}) W_r^l h_j^l )

where c_{i,r} counts the incoming r-neighbors of i. Hidden layers use
ReLU and keep the input width; the final layer maps to two logits that
a softmax turns into a salience probability. Node features concatenate
a static word vector for the head lemma with a trainable POS-tag
embedding, plus a sinusoidal encoding of the first-mention offset.

Everything is plain numpy with handwritten gradients, which keeps every
parameter checkable against finite differences and training bit-for-bit
reproducible from a seed.
"""
from __future__ import annotations

import hashlib
import json
import logging
import warnings
from dataclasses import dataclass, field
from io import StringIO
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import ConfigError, TrainingDivergedError
from .graph import DocumentGraph
from .rankers import RankedList, ranked_lists_from_scores

logger = logging.getLogger(__name__)

UPOS_TAGS = ("ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN",
             "NUM", "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM",
             "VERB", "X", "<unk>")

CHECKPOINT_FORMAT = "salience-rgcn"
CHECKPOINT_VERSION = 1


def positional_encoding(position: int, dim: int) -> np.ndarray:
    """Sinusoidal encoding: sin on even indices, cos on odd ones."""
    enc = np.zeros(dim)
    for i in range(0, dim, 2):
        angle = position / (10000.0 ** (i / dim))
        enc[i] = np.sin(angle)
        if i + 1 < dim:
            enc[i + 1] = np.cos(angle)
    return enc


def _oov_vector(lemma: str, dim: int, seed: int) -> np.ndarray:
    """Deterministic random vector for out-of-table lemmas, values in [-0.5, 0.5]."""
    digest = hashlib.sha256(("%d:%s" % (seed, lemma)).encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    return rng.uniform(-0.5, 0.5, dim)


@dataclass
class WordVectorTable:
    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def lookup(self, lemma: str, seed: int) -> np.ndarray:
        vec = self.vectors.get(lemma)
        if vec is None:
            return _oov_vector(lemma, self.dim, seed)
        return vec


def load_vector_table(source: str | TextIO, dim: int | None = None) -> WordVectorTable:
    """Read a text table: one `word v1 v2 ... vD` line per word."""
    handle = StringIO(source) if isinstance(source, str) else source
    vectors: dict[str, np.ndarray] = {}
    for line in handle:
        parts = line.split()
        if not parts:
            continue
        word, values = parts[0], parts[1:]
        vec = np.array([float(v) for v in values])
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise ConfigError(
                "vector for %r has dimension %d, expected %d"
                % (word, len(vec), dim))
        vectors[word.lower()] = vec
    if dim is None:
        raise ConfigError("vector table is empty and no dimension was given")
    return WordVectorTable(dim=dim, vectors=vectors)


def _pos_index(tag: str, pos_tags: Sequence[str]) -> int:
    try:
        return pos_tags.index(tag)
    except ValueError:
        return len(pos_tags) - 1  # <unk>


def node_static_parts(graph: DocumentGraph, vector_table: WordVectorTable,
                      pos_tags: Sequence[str], pos_dim: int, seed: int,
                      ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Feature pieces that do not depend on trainable parameters.

    Returns (word vectors (N, D_w), pos tag ids (N,), positional
    encodings (N, D_w + pos_dim)).
    """
    n = graph.n_nodes
    dim = vector_table.dim + pos_dim
    word = np.zeros((n, vector_table.dim))
    pos_ids = np.zeros(n, dtype=int)
    encodings = np.zeros((n, dim))
    for node in graph.nodes:
        word[node.node_id] = vector_table.lookup(node.head_lemma.lower(), seed)
        pos_ids[node.node_id] = _pos_index(node.head_upos, pos_tags)
        encodings[node.node_id] = positional_encoding(node.first_offset, dim)
    return word, pos_ids, encodings


def assemble_features(word: np.ndarray, pos_ids: np.ndarray,
                      encodings: np.ndarray, pos_emb: np.ndarray) -> np.ndarray:
    return np.concatenate([word, pos_emb[pos_ids]], axis=1) + encodings


def init_node_features(graph: DocumentGraph, vector_table: WordVectorTable,
                       pos_table: dict[str, np.ndarray], seed: int) -> np.ndarray:
    """Initial feature matrix (N, D_w + D_p) for one graph.

    pos_table maps UPOS tags to embedding rows; tags without a row fall
    back to the zero vector.
    """
    if not pos_table:
        raise ConfigError("pos_table must contain at least one tag")
    pos_dim = len(next(iter(pos_table.values())))
    tags = list(pos_table.keys())
    table = np.stack([np.asarray(pos_table[t], dtype=float) for t in tags]
                     + [np.zeros(pos_dim)])
    lookup_tags = tuple(tags) + ("<unk>",)
    word, pos_ids, encodings = node_static_parts(
        graph, vector_table, lookup_tags, pos_dim, seed)
    return assemble_features(word, pos_ids, encodings, table)


def _relation_arrays(typed_edges: Sequence[tuple[int, str, int]], n: int,
                     ) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Group typed edges per relation: (src ids, dst ids, 1/c_{i,r})."""
    per_rel: dict[str, list[tuple[int, int]]] = {}
    for src, rel, dst in typed_edges:
        per_rel.setdefault(rel, []).append((src, dst))
    arrays = {}
    for rel in sorted(per_rel):
        pairs = per_rel[rel]
        src = np.array([p[0] for p in pairs], dtype=int)
        dst = np.array([p[1] for p in pairs], dtype=int)
        counts = np.zeros(n)
        np.add.at(counts, dst, 1.0)
        inv = np.zeros(n)
        nonzero = counts > 0
        inv[nonzero] = 1.0 / counts[nonzero]
        arrays[rel] = (src, dst, inv)
    return arrays


def _aggregate(h: np.ndarray, src: np.ndarray, dst: np.ndarray,
               inv: np.ndarray) -> np.ndarray:
    agg = np.zeros_like(h)
    np.add.at(agg, dst, h[src])
    return agg * inv[:, None]


def rgcn_layer_forward(graph: DocumentGraph, features: np.ndarray,
                       w0: np.ndarray, wr: dict[str, np.ndarray],
                       activation: str = "relu") -> np.ndarray:
    """One message-passing layer over a graph's typed edges.

    Weight matrices are (out_dim, in_dim); relations present in the
    graph but absent from wr contribute nothing.
    """
    arrays = _relation_arrays(graph.typed_edges, graph.n_nodes)
    z = features @ w0.T
    for rel, (src, dst, inv) in arrays.items():
        w = wr.get(rel)
        if w is None:
            continue
        z += _aggregate(features, src, dst, inv) @ w.T
    if activation == "relu":
        return np.maximum(z, 0.0)
    if activation == "identity":
        return z
    raise ValueError("unknown activation %r" % activation)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class ModelConfig:
    word_dim: int = 32
    pos_dim: int = 8
    layers: int = 2
    label_rule: str = "first"   # first | frequency
    label_top: int = 10
    feature_seed: int = 0

    @property
    def input_dim(self) -> int:
        return self.word_dim + self.pos_dim

    def __post_init__(self):
        if self.layers < 1:
            raise ConfigError("layers must be >= 1")
        if self.label_rule not in ("first", "frequency"):
            raise ConfigError("label_rule must be 'first' or 'frequency'")


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 0.01
    epochs: int = 200

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ConfigError("learning_rate must be positive")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")


@dataclass
class RgcnModel:
    config: ModelConfig
    relations: tuple[str, ...]
    pos_tags: tuple[str, ...]
    w0: list[np.ndarray]                 # per layer, (out, in)
    wr: list[dict[str, np.ndarray]]      # per layer, relation -> (out, in)
    pos_emb: np.ndarray                  # (len(pos_tags), pos_dim)
    word_vectors: WordVectorTable

    def layer_dims(self) -> list[tuple[int, int]]:
        dims = []
        d = self.config.input_dim
        for layer in range(self.config.layers):
            out = 2 if layer == self.config.layers - 1 else d
            dims.append((out, d))
        return dims

    def parameters(self) -> dict[str, np.ndarray]:
        """Flat name -> array view of every trainable tensor."""
        params = {"pos_emb": self.pos_emb}
        for layer in range(self.config.layers):
            params["w0/%d" % layer] = self.w0[layer]
            for rel in self.relations:
                params["wr/%d/%s" % (layer, rel)] = self.wr[layer][rel]
        return params


def init_model(config: ModelConfig, relations: Sequence[str],
               word_vectors: WordVectorTable, seed: int) -> RgcnModel:
    """Seeded Glorot-uniform initialization in a fixed parameter order."""
    rng = np.random.default_rng(seed)
    rels = tuple(sorted(relations))
    pos_emb = rng.uniform(-0.5, 0.5, (len(UPOS_TAGS), config.pos_dim))
    w0 = []
    wr = []
    d = config.input_dim
    for layer in range(config.layers):
        out = 2 if layer == config.layers - 1 else d
        bound = np.sqrt(6.0 / (out + d))
        w0.append(rng.uniform(-bound, bound, (out, d)))
        layer_wr = {}
        for rel in rels:
            layer_wr[rel] = rng.uniform(-bound, bound, (out, d))
        wr.append(layer_wr)
    return RgcnModel(config=config, relations=rels, pos_tags=UPOS_TAGS,
                     w0=w0, wr=wr, pos_emb=pos_emb, word_vectors=word_vectors)


def make_training_labels(graph: DocumentGraph, rule: str = "first",
                         top: int = 10) -> np.ndarray:
    """Binary node labels: the top entity and event nodes are salient.

    rule "first" takes the earliest-mentioned nodes of each type;
    "frequency" the most-mentioned (ties by earlier mention). At most
    `top` nodes per type are positive.
    """
    if rule not in ("first", "frequency"):
        raise ConfigError("unknown label rule %r" % rule)
    labels = np.zeros(graph.n_nodes, dtype=int)
    for node_type in ("entity", "event"):
        nodes = [n for n in graph.nodes if n.node_type == node_type]
        if rule == "first":
            nodes.sort(key=lambda n: (n.first_offset, n.node_id))
        else:
            nodes.sort(key=lambda n: (-len(n.spans), n.first_offset, n.node_id))
        for node in nodes[:top]:
            labels[node.node_id] = 1
    return labels


class _GraphBatch:
    """Per-graph tensors reused across epochs."""

    def __init__(self, graph: DocumentGraph, model: RgcnModel):
        self.graph = graph
        self.word, self.pos_ids, self.encodings = node_static_parts(
            graph, model.word_vectors, model.pos_tags, model.config.pos_dim,
            model.config.feature_seed)
        self.rel_arrays = _relation_arrays(graph.typed_edges, graph.n_nodes)
        unseen = [r for r in self.rel_arrays if r not in model.relations]
        if unseen:
            warnings.warn("graph %r has %d relation types unseen at training "
                          "time; their messages are ignored"
                          % (graph.doc_id, len(unseen)))
            for rel in unseen:
                del self.rel_arrays[rel]


def _forward(model: RgcnModel, batch: _GraphBatch) -> tuple[np.ndarray, list]:
    """Probabilities (N, 2) plus the cache needed for the backward pass."""
    h = assemble_features(batch.word, batch.pos_ids, batch.encodings,
                          model.pos_emb)
    cache = []
    for layer in range(model.config.layers):
        final = layer == model.config.layers - 1
        z = h @ model.w0[layer].T
        aggs = {}
        for rel, (src, dst, inv) in batch.rel_arrays.items():
            w = model.wr[layer].get(rel)
            if w is None:
                continue
            agg = _aggregate(h, src, dst, inv)
            aggs[rel] = agg
            z += agg @ w.T
        h_next = z if final else np.maximum(z, 0.0)
        cache.append((h, z, aggs))
        h = h_next
    return _softmax(h), cache


def _backward(model: RgcnModel, batch: _GraphBatch, probs: np.ndarray,
              labels: np.ndarray, cache: list) -> dict[str, np.ndarray]:
    """Gradients of mean cross-entropy for every trainable tensor."""
    n = probs.shape[0]
    grads: dict[str, np.ndarray] = {}
    one_hot = np.zeros_like(probs)
    one_hot[np.arange(n), labels] = 1.0
    d_z = (probs - one_hot) / n
    for layer in reversed(range(model.config.layers)):
        h_in, z, aggs = cache[layer]
        if layer < model.config.layers - 1:
            d_z = d_z * (z > 0.0)
        grads["w0/%d" % layer] = d_z.T @ h_in
        d_h = d_z @ model.w0[layer]
        for rel, agg in aggs.items():
            w = model.wr[layer][rel]
            grads["wr/%d/%s" % (layer, rel)] = d_z.T @ agg
            src, dst, inv = batch.rel_arrays[rel]
            d_agg = (d_z @ w) * inv[:, None]
            np.add.at(d_h, src, d_agg[dst])
        d_z = d_h
    d_features = d_z
    d_pos = np.zeros_like(model.pos_emb)
    np.add.at(d_pos, batch.pos_ids,
              d_features[:, model.word_vectors.dim:])
    grads["pos_emb"] = d_pos
    return grads


def loss_and_grads(model: RgcnModel, batch: _GraphBatch, labels: np.ndarray,
                   ) -> tuple[float, dict[str, np.ndarray]]:
    probs, cache = _forward(model, batch)
    n = probs.shape[0]
    eps = 1e-12
    loss = float(-np.mean(np.log(probs[np.arange(n), labels] + eps)))
    grads = _backward(model, batch, probs, labels, cache)
    return loss, grads


def _restricted_vectors(graphs: Sequence[DocumentGraph],
                        table: WordVectorTable) -> WordVectorTable:
    """Keep only the table rows for lemmas that occur in the graphs."""
    kept: dict[str, np.ndarray] = {}
    for graph in graphs:
        for node in graph.nodes:
            lemma = node.head_lemma.lower()
            if lemma in table.vectors:
                kept[lemma] = table.vectors[lemma]
    return WordVectorTable(dim=table.dim, vectors=kept)


def train(graphs: Sequence[DocumentGraph],
          model_config: ModelConfig | None = None,
          optimizer_config: OptimizerConfig | None = None,
          seed: int = 0,
          vector_table: WordVectorTable | None = None,
          ) -> tuple[RgcnModel, list[float]]:
    """Fit the network on document graphs against their own pseudo-labels.

    One gradient step per document graph; documents are visited in
    corpus order every epoch, so runs are deterministic given the seed.
    Returns the model and the mean loss per epoch.
    """
    cfg = model_config or ModelConfig()
    opt = optimizer_config or OptimizerConfig()
    graphs = [g for g in graphs if g.n_nodes > 0]
    if not graphs:
        raise ConfigError("training corpus contains no non-empty graphs")

    table = vector_table or WordVectorTable(dim=cfg.word_dim)
    if table.dim != cfg.word_dim:
        raise ConfigError("vector table dimension %d does not match "
                          "configured word_dim %d" % (table.dim, cfg.word_dim))
    cfg = ModelConfig(word_dim=cfg.word_dim, pos_dim=cfg.pos_dim,
                      layers=cfg.layers, label_rule=cfg.label_rule,
                      label_top=cfg.label_top, feature_seed=seed)

    relations = sorted({rel for g in graphs for _, rel, _ in g.typed_edges})
    model = init_model(cfg, relations, _restricted_vectors(graphs, table), seed)
    batches = [_GraphBatch(g, model) for g in graphs]
    labels = [make_training_labels(g, cfg.label_rule, cfg.label_top)
              for g in graphs]

    trace: list[float] = []
    params = model.parameters()
    for epoch in range(opt.epochs):
        total = 0.0
        for batch, y in zip(batches, labels):
            loss, grads = loss_and_grads(model, batch, y)
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    "loss became non-finite at epoch %d (lr=%g)"
                    % (epoch, opt.learning_rate),
                    epoch=epoch, learning_rate=opt.learning_rate)
            total += loss
            for name, grad in grads.items():
                params[name] -= opt.learning_rate * grad
        trace.append(total / len(batches))
    return model, trace


def predict_scores(model: RgcnModel, graph: DocumentGraph) -> dict[str, RankedList]:
    """Per-scope ranked lists from softmax salience probabilities."""
    if graph.n_nodes == 0:
        return ranked_lists_from_scores(graph, {})
    batch = _GraphBatch(graph, model)
    probs, _ = _forward(model, batch)
    scores = {i: float(probs[i, 1]) for i in range(graph.n_nodes)}
    return ranked_lists_from_scores(graph, scores)


def save_checkpoint(model: RgcnModel, path: str) -> None:
    """Write the model as deterministic JSON (sorted keys, exact floats)."""
    payload = {
        "format": CHECKPOINT_FORMAT,
        "format_version": CHECKPOINT_VERSION,
        "config": {
            "word_dim": model.config.word_dim,
            "pos_dim": model.config.pos_dim,
            "layers": model.config.layers,
            "label_rule": model.config.label_rule,
            "label_top": model.config.label_top,
            "feature_seed": model.config.feature_seed,
        },
        "relations": list(model.relations),
        "pos_tags": list(model.pos_tags),
        "pos_emb": model.pos_emb.tolist(),
        "w0": [w.tolist() for w in model.w0],
        "wr": [{rel: w.tolist() for rel, w in layer.items()}
               for layer in model.wr],
        "word_vectors": {
            "dim": model.word_vectors.dim,
            "vectors": {k: v.tolist()
                        for k, v in sorted(model.word_vectors.vectors.items())},
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, separators=(",", ":"))
        handle.write("\n")


def load_checkpoint(path: str) -> RgcnModel:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ConfigError("not a model checkpoint: %r" % path)
    if payload.get("format_version") != CHECKPOINT_VERSION:
        raise ConfigError("unsupported checkpoint version %r"
                          % payload.get("format_version"))
    cfg = ModelConfig(**payload["config"])
    table = WordVectorTable(
        dim=payload["word_vectors"]["dim"],
        vectors={k: np.array(v)
                 for k, v in payload["word_vectors"]["vectors"].items()})
    model = RgcnModel(
        config=cfg,
        relations=tuple(payload["relations"]),
        pos_tags=tuple(payload["pos_tags"]),
        w0=[np.array(w) for w in payload["w0"]],
        wr=[{rel: np.array(w) for rel, w in layer.items()}
            for layer in payload["wr"]],
        pos_emb=np.array(payload["pos_emb"]),
        word_vectors=table)
    expected = model.layer_dims()
    for layer, (out, inp) in enumerate(expected):
        if model.w0[layer].shape != (out, inp):
            raise ConfigError("checkpoint layer %d has shape %r, expected %r"
                              % (layer, model.w0[layer].shape, (out, inp)))
    return model
