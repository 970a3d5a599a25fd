"""Scikit-learn style estimators over the ranking pipeline.

Each estimator consumes a list of Documents and predicts per-document
ranked salience lists, keyed "entity" and "event". Construction only
stores parameters; fit validates and (for the graph network) trains.
This keeps the rankers compatible with sklearn tooling such as clone
and get_params/set_params.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .extraction import extract_candidates
from .graph import build_document_graph
from .rankers import (
    RankedList,
    TextRankConfig,
    rank_by_frequency,
    rank_by_location,
    ranked_lists_from_scores,
    textrank_scores,
)
from .rgcn import (
    ModelConfig,
    OptimizerConfig,
    predict_scores,
    train,
)
from .validation import check_documents, resolve_lexicon, resolve_stoplists


class BaseSalienceRanker(BaseEstimator):
    """Shared fit/predict plumbing for the ranking estimators."""

    def __init__(self, lexicon=None, stoplists=None):
        self.lexicon = lexicon
        self.stoplists = stoplists

    def fit(self, X, y=None):
        check_documents(X)
        self.lexicon_ = resolve_lexicon(self.lexicon)
        self.stoplists_ = resolve_stoplists(self.stoplists)
        return self

    def _check_fitted(self):
        if not hasattr(self, "lexicon_"):
            raise NotFittedError("call fit before predict")

    def predict(self, X) -> list[dict[str, RankedList]]:
        self._check_fitted()
        return [self._predict_doc(doc) for doc in check_documents(X)]

    def _predict_doc(self, doc) -> dict[str, RankedList]:
        raise NotImplementedError


class FrequencyRanker(BaseSalienceRanker):
    """Rank candidates by how often their lemma identity is mentioned."""

    def _predict_doc(self, doc):
        entities, events = extract_candidates(doc, self.lexicon_,
                                              stoplists=self.stoplists_)
        return {"entity": rank_by_frequency(entities, "entity"),
                "event": rank_by_frequency(events, "event")}


class LocationRanker(BaseSalienceRanker):
    """Rank candidates by earliest mention."""

    def _predict_doc(self, doc):
        entities, events = extract_candidates(doc, self.lexicon_,
                                              stoplists=self.stoplists_)
        return {"entity": rank_by_location(entities, "entity"),
                "event": rank_by_location(events, "event")}


class TextRankRanker(BaseSalienceRanker):
    """Rank document-graph nodes by weighted TextRank centrality."""

    def __init__(self, lexicon=None, stoplists=None, damping=0.85,
                 tolerance=1e-6, max_iterations=100, edge_weight_mode="literal",
                 coref_mode="auto"):
        super().__init__(lexicon=lexicon, stoplists=stoplists)
        self.damping = damping
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.edge_weight_mode = edge_weight_mode
        self.coref_mode = coref_mode

    def fit(self, X, y=None):
        super().fit(X, y)
        self.config_ = TextRankConfig(damping=self.damping,
                                      tolerance=self.tolerance,
                                      max_iterations=self.max_iterations)
        return self

    def _predict_doc(self, doc):
        graph = build_document_graph(doc, self.lexicon_,
                                     mode=self.edge_weight_mode,
                                     stoplists=self.stoplists_,
                                     coref_mode=self.coref_mode)
        scores = textrank_scores(graph, self.config_)
        return ranked_lists_from_scores(graph, scores)


class RgcnRanker(BaseSalienceRanker):
    """Graph-network ranker trained on its own pseudo-labels.

    fit builds a graph per document and trains the relational network;
    predict scores graphs with the trained model. The fitted model is
    exposed as model_ and the per-epoch loss curve as loss_trace_.
    """

    def __init__(self, lexicon=None, stoplists=None, word_dim=32, pos_dim=8,
                 layers=2, learning_rate=0.01, epochs=200, label_rule="first",
                 label_top=10, seed=0, vector_table=None,
                 edge_weight_mode="literal", coref_mode="auto"):
        super().__init__(lexicon=lexicon, stoplists=stoplists)
        self.word_dim = word_dim
        self.pos_dim = pos_dim
        self.layers = layers
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.label_rule = label_rule
        self.label_top = label_top
        self.seed = seed
        self.vector_table = vector_table
        self.edge_weight_mode = edge_weight_mode
        self.coref_mode = coref_mode

    def _graph(self, doc):
        return build_document_graph(doc, self.lexicon_,
                                    mode=self.edge_weight_mode,
                                    stoplists=self.stoplists_,
                                    coref_mode=self.coref_mode)

    def fit(self, X, y=None):
        super().fit(X, y)
        graphs = [self._graph(doc) for doc in check_documents(X)]
        model_config = ModelConfig(word_dim=self.word_dim, pos_dim=self.pos_dim,
                                   layers=self.layers, label_rule=self.label_rule,
                                   label_top=self.label_top)
        optimizer_config = OptimizerConfig(learning_rate=self.learning_rate,
                                           epochs=self.epochs)
        self.model_, self.loss_trace_ = train(
            graphs, model_config, optimizer_config, seed=self.seed,
            vector_table=self.vector_table)
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("call fit before predict")

    def _predict_doc(self, doc):
        return predict_scores(self.model_, self._graph(doc))
