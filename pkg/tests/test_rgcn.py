"""Relational graph network: features, forward pass, gradients, training.

The forward pass is checked against a per-node double loop and every
parameter gradient against central finite differences.
"""
import io
import math
import warnings

import numpy as np
import pytest

from salience import (
    ConfigError,
    ModelConfig,
    OptimizerConfig,
    TrainingDivergedError,
    WordVectorTable,
    build_document_graph,
    load_checkpoint,
    load_corpus_list,
    load_vector_table,
    make_training_labels,
    parse_conllu,
    predict_scores,
    rgcn_layer_forward,
    save_checkpoint,
    train,
)
from salience.graph import DocumentGraph, Node
from salience.rgcn import (
    UPOS_TAGS,
    _GraphBatch,
    init_model,
    loss_and_grads,
    node_static_parts,
    positional_encoding,
)

from conftest import data_path, make_doc, make_span, read_fixture_sentence


def fixture_doc(*names, **kwargs):
    return make_doc([parse_conllu(read_fixture_sentence(n))[0] for n in names],
                    **kwargs)


def small_graph(lexicon):
    return build_document_graph(
        fixture_doc("made_call.conllu", "war_ended.conllu"), lexicon)


def small_model(graph, word_dim=4, pos_dim=2, seed=11):
    config = ModelConfig(word_dim=word_dim, pos_dim=pos_dim, feature_seed=seed)
    return init_model(config, graph.relations(),
                      WordVectorTable(dim=word_dim), seed)


def test_positional_encoding_offset_zero():
    enc = positional_encoding(0, 6)
    assert np.array_equal(enc, [0.0, 1.0, 0.0, 1.0, 0.0, 1.0])


def test_positional_encoding_values():
    dim = 8
    enc = positional_encoding(7, dim)
    assert np.all(np.abs(enc) <= 1.0)
    for i in range(0, dim, 2):
        angle = 7 / (10000.0 ** (i / dim))
        assert enc[i] == pytest.approx(math.sin(angle), abs=1e-12)
        assert enc[i + 1] == pytest.approx(math.cos(angle), abs=1e-12)


def test_positional_encoding_odd_dimension():
    enc = positional_encoding(3, 5)
    assert enc.shape == (5,)
    assert enc[4] == pytest.approx(math.sin(3 / 10000.0 ** (4 / 5)), abs=1e-12)


def test_oov_vectors_bounded_and_deterministic():
    table = WordVectorTable(dim=16)
    a1 = table.lookup("meeting", seed=7)
    a2 = table.lookup("meeting", seed=7)
    b = table.lookup("strike", seed=7)
    c = table.lookup("meeting", seed=8)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, c)
    assert np.all(a1 >= -0.5) and np.all(a1 <= 0.5)


def test_vector_table_prefers_stored_rows():
    table = WordVectorTable(dim=3, vectors={"strike": np.array([1.0, 2.0, 3.0])})
    assert np.array_equal(table.lookup("strike", seed=0), [1.0, 2.0, 3.0])
    assert table.lookup("unknown", seed=0).shape == (3,)


def test_load_vector_table():
    table = load_vector_table(io.StringIO("Dog 1 2 3\ncat 4 5 6\n"))
    assert table.dim == 3
    assert np.array_equal(table.vectors["dog"], [1.0, 2.0, 3.0])


def test_load_vector_table_dimension_mismatch():
    with pytest.raises(ConfigError):
        load_vector_table(io.StringIO("dog 1 2 3\ncat 4 5\n"))
    with pytest.raises(ConfigError):
        load_vector_table(io.StringIO(""))


def layer_oracle(graph, features, w0, wr, activation="relu"):
    """Per-node double loop over incoming typed edges."""
    n = graph.n_nodes
    out_dim = w0.shape[0]
    z = np.zeros((n, out_dim))
    for i in range(n):
        z[i] = w0 @ features[i]
    by_rel = {}
    for src, rel, dst in graph.typed_edges:
        by_rel.setdefault(rel, []).append((src, dst))
    for rel, pairs in by_rel.items():
        w = wr.get(rel)
        if w is None:
            continue
        for i in range(n):
            incoming = [src for src, dst in pairs if dst == i]
            if not incoming:
                continue
            message = np.zeros(out_dim)
            for j in incoming:
                message += w @ features[j]
            z[i] += message / len(incoming)
    return np.maximum(z, 0.0) if activation == "relu" else z


def test_layer_forward_matches_double_loop(lexicon):
    graph = small_graph(lexicon)
    rng = np.random.default_rng(404)
    dim_in, dim_out = 6, 5
    features = rng.normal(size=(graph.n_nodes, dim_in))
    w0 = rng.normal(size=(dim_out, dim_in))
    wr = {rel: rng.normal(size=(dim_out, dim_in)) for rel in graph.relations()}
    for activation in ("relu", "identity"):
        ours = rgcn_layer_forward(graph, features, w0, wr, activation)
        reference = layer_oracle(graph, features, w0, wr, activation)
        assert np.max(np.abs(ours - reference)) < 1e-10


def test_layer_forward_single_neighbor_identity_weights():
    # one incoming edge, identity W_r and zero W_0: output is relu(h_j)
    nodes = [Node(node_id=i, node_type="entity", key="k%d" % i, spans=(),
                  first_offset=i, head_lemma="k%d" % i, head_upos="NOUN")
             for i in range(2)]
    graph = DocumentGraph(doc_id="g", part="body", mode="literal",
                          nodes=nodes, edges={},
                          typed_edges=[(0, "link", 1)])
    features = np.array([[1.0, -2.0], [3.0, 4.0]])
    out = rgcn_layer_forward(graph, features, np.zeros((2, 2)),
                             {"link": np.eye(2)})
    assert np.array_equal(out[1], [1.0, 0.0])
    assert np.array_equal(out[0], [0.0, 0.0])


def test_layer_forward_unknown_activation(lexicon):
    graph = small_graph(lexicon)
    with pytest.raises(ValueError):
        rgcn_layer_forward(graph, np.zeros((graph.n_nodes, 2)),
                           np.zeros((2, 2)), {}, activation="tanh")


def test_gradients_match_finite_differences(lexicon):
    graph = small_graph(lexicon)
    model = small_model(graph)
    batch = _GraphBatch(graph, model)
    labels = make_training_labels(graph, "first", 3)

    _, grads = loss_and_grads(model, batch, labels)
    params = model.parameters()
    eps = 1e-5
    checked = 0
    for name, tensor in params.items():
        grad = grads.get(name)
        if grad is None:       # pos rows never touched by this graph
            continue
        it = np.nditer(tensor, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            original = tensor[idx]
            tensor[idx] = original + eps
            loss_plus, _ = loss_and_grads(model, batch, labels)
            tensor[idx] = original - eps
            loss_minus, _ = loss_and_grads(model, batch, labels)
            tensor[idx] = original
            numeric = (loss_plus - loss_minus) / (2 * eps)
            analytic = grad[idx]
            denom = max(abs(numeric) + abs(analytic), 1e-8)
            assert abs(numeric - analytic) / denom <= 1e-4, (
                "gradient mismatch at %s%s: %g vs %g"
                % (name, idx, analytic, numeric))
            checked += 1
    assert checked > 100


def entity_node(node_id, key, offset, n_spans=1):
    spans = tuple(make_span([key], sent=i, offset=offset + 10 * i)
                  for i in range(n_spans))
    return Node(node_id=node_id, node_type="entity", key=key, spans=spans,
                first_offset=offset, head_lemma=key, head_upos="NOUN")


def test_training_labels_first_rule():
    nodes = [entity_node(0, "late", 9), entity_node(1, "early", 0),
             entity_node(2, "middle", 4)]
    graph = DocumentGraph(doc_id="g", part="body", mode="literal",
                          nodes=nodes, edges={})
    labels = make_training_labels(graph, "first", 2)
    assert labels.tolist() == [0, 1, 1]


def test_training_labels_frequency_rule():
    nodes = [entity_node(0, "rare", 0, n_spans=1),
             entity_node(1, "common", 5, n_spans=3),
             entity_node(2, "other", 9, n_spans=1)]
    graph = DocumentGraph(doc_id="g", part="body", mode="literal",
                          nodes=nodes, edges={})
    labels = make_training_labels(graph, "frequency", 1)
    assert labels.tolist() == [0, 1, 0]


def test_training_labels_per_type_quota(lexicon):
    graph = small_graph(lexicon)
    labels = make_training_labels(graph, "first", 1)
    positives = [graph.nodes[i] for i in np.flatnonzero(labels)]
    assert {n.node_type for n in positives} == {"entity", "event"}
    assert len(positives) == 2


def test_training_labels_unknown_rule(lexicon):
    with pytest.raises(ConfigError):
        make_training_labels(small_graph(lexicon), "random", 1)


def toy_graphs(lexicon, count=4):
    docs = load_corpus_list(data_path("toy_corpus.jsonl"))[:count]
    return [build_document_graph(doc, lexicon) for doc in docs]


def test_training_is_deterministic(lexicon):
    graphs = toy_graphs(lexicon)
    config = ModelConfig(word_dim=8, pos_dim=4)
    opt = OptimizerConfig(learning_rate=0.01, epochs=5)
    model_a, trace_a = train(graphs, config, opt, seed=3)
    model_b, trace_b = train(graphs, config, opt, seed=3)
    assert trace_a == trace_b
    for name, tensor in model_a.parameters().items():
        assert np.array_equal(tensor, model_b.parameters()[name])
    scores_a = predict_scores(model_a, graphs[0])
    scores_b = predict_scores(model_b, graphs[0])
    assert scores_a == scores_b


def test_different_seeds_give_different_models(lexicon):
    graphs = toy_graphs(lexicon, count=2)
    opt = OptimizerConfig(learning_rate=0.01, epochs=1)
    config = ModelConfig(word_dim=8, pos_dim=4)
    model_a, _ = train(graphs, config, opt, seed=1)
    model_b, _ = train(graphs, config, opt, seed=2)
    assert not np.array_equal(model_a.w0[0], model_b.w0[0])


def test_training_loss_decreases(lexicon):
    graphs = toy_graphs(lexicon)
    _, trace = train(graphs, ModelConfig(word_dim=8, pos_dim=4),
                     OptimizerConfig(learning_rate=0.01, epochs=30), seed=0)
    assert trace[-1] < trace[0]


def test_training_divergence_raises(lexicon):
    graphs = toy_graphs(lexicon, count=2)
    with pytest.raises(TrainingDivergedError) as err:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            train(graphs, ModelConfig(word_dim=8, pos_dim=4),
                  OptimizerConfig(learning_rate=1e12, epochs=50), seed=0)
    assert err.value.learning_rate == 1e12
    assert err.value.epoch >= 0


def test_training_requires_nonempty_graphs():
    empty = DocumentGraph(doc_id="g", part="body", mode="literal",
                          nodes=[], edges={})
    with pytest.raises(ConfigError):
        train([empty])


def test_vector_table_dim_must_match_config(lexicon):
    graphs = toy_graphs(lexicon, count=1)
    table = WordVectorTable(dim=5)
    with pytest.raises(ConfigError):
        train(graphs, ModelConfig(word_dim=8), vector_table=table)


def test_predict_on_empty_graph(lexicon):
    graphs = toy_graphs(lexicon, count=1)
    model, _ = train(graphs, ModelConfig(word_dim=8, pos_dim=4),
                     OptimizerConfig(epochs=1), seed=0)
    empty = DocumentGraph(doc_id="e", part="body", mode="literal",
                          nodes=[], edges={})
    ranked = predict_scores(model, empty)
    assert ranked["entity"].items == ()
    assert ranked["event"].items == ()


def test_unseen_relations_warn_and_are_ignored(lexicon):
    graph = small_graph(lexicon)
    config = ModelConfig(word_dim=4, pos_dim=2)
    model = init_model(config, ["only-this-relation"],
                       WordVectorTable(dim=4), seed=0)
    with pytest.warns(UserWarning):
        ranked = predict_scores(model, graph)
    assert len(ranked["entity"]) > 0


def permute_graph(graph, perm):
    """Renumber node ids by perm, keeping every other field."""
    nodes = [Node(node_id=perm[n.node_id], node_type=n.node_type, key=n.key,
                  spans=n.spans, first_offset=n.first_offset,
                  head_lemma=n.head_lemma, head_upos=n.head_upos)
             for n in graph.nodes]
    nodes.sort(key=lambda n: n.node_id)
    typed = [(perm[s], rel, perm[d]) for s, rel, d in graph.typed_edges]
    return DocumentGraph(doc_id=graph.doc_id, part=graph.part, mode=graph.mode,
                         nodes=nodes, edges={}, typed_edges=sorted(typed),
                         entities=graph.entities, events=graph.events)


def test_forward_is_permutation_equivariant(lexicon):
    graph = small_graph(lexicon)
    model = small_model(graph)
    perm = {i: graph.n_nodes - 1 - i for i in range(graph.n_nodes)}
    shuffled = permute_graph(graph, perm)

    base = predict_scores(model, graph)
    moved = predict_scores(model, shuffled)
    for scope in ("entity", "event"):
        by_key = {item.key: item.score for item in base[scope].items}
        for item in moved[scope].items:
            assert item.score == pytest.approx(by_key[item.key], abs=1e-12)


def test_checkpoint_roundtrip(tmp_path, lexicon):
    graphs = toy_graphs(lexicon, count=2)
    model, _ = train(graphs, ModelConfig(word_dim=8, pos_dim=4),
                     OptimizerConfig(epochs=2), seed=5)
    path = str(tmp_path / "model.json")
    save_checkpoint(model, path)
    loaded = load_checkpoint(path)

    assert loaded.config == model.config
    assert loaded.relations == model.relations
    for name, tensor in model.parameters().items():
        assert np.array_equal(tensor, loaded.parameters()[name])
    assert loaded.word_vectors.dim == model.word_vectors.dim
    assert predict_scores(loaded, graphs[0]) == predict_scores(model, graphs[0])

    # a save of the loaded model is byte-identical
    path2 = str(tmp_path / "model2.json")
    save_checkpoint(loaded, path2)
    assert open(path).read() == open(path2).read()


def test_checkpoint_rejects_foreign_files(tmp_path):
    path = str(tmp_path / "bogus.json")
    with open(path, "w") as handle:
        handle.write('{"format": "something-else"}\n')
    with pytest.raises(ConfigError):
        load_checkpoint(path)


def test_model_config_validation():
    with pytest.raises(ConfigError):
        ModelConfig(layers=0)
    with pytest.raises(ConfigError):
        ModelConfig(label_rule="best")
    with pytest.raises(ConfigError):
        OptimizerConfig(learning_rate=0.0)
    with pytest.raises(ConfigError):
        OptimizerConfig(epochs=0)


def test_node_static_parts_offsets(lexicon):
    graph = small_graph(lexicon)
    table = WordVectorTable(dim=4)
    word, pos_ids, encodings = node_static_parts(graph, table, UPOS_TAGS, 2, 0)
    assert word.shape == (graph.n_nodes, 4)
    assert encodings.shape == (graph.n_nodes, 6)
    for node in graph.nodes:
        expected = positional_encoding(node.first_offset, 6)
        assert np.array_equal(encodings[node.node_id], expected)
        assert UPOS_TAGS[pos_ids[node.node_id]] == node.head_upos
