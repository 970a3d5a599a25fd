"""Unsupervised entity and event salience estimation.

Pipeline: CoNLL-U documents -> candidate extraction -> document graph ->
ranking (TextRank, frequency, location, or a relational graph network)
-> evaluation against abstract-derived pseudo gold.
"""
from .conllu import (
    Document,
    Sentence,
    SpanRef,
    Token,
    load_coref_clusters,
    load_corpus,
    load_corpus_list,
    load_document,
    parse_conllu,
    parse_conllu_sentence,
    sentence_offsets,
    sentence_to_conllu,
)
from .errors import (
    ConfigError,
    ConlluFormatError,
    CorpusIOError,
    EmptyDocumentError,
    EmptyGoldError,
    ManifestError,
    PartMissingError,
    SalienceError,
    SpanReferenceError,
    TrainingDivergedError,
    TreeIntegrityError,
)
from .estimators import (
    FrequencyRanker,
    LocationRanker,
    RgcnRanker,
    TextRankRanker,
)
from .evaluation import (
    DocPredictions,
    EvalReport,
    evaluate_corpus,
    evaluate_events,
    match_sets,
)
from .extraction import (
    EntityCandidate,
    EventCandidate,
    PseudoAnnotation,
    Span,
    annotate_pseudo_salience,
    extract_base_nps,
    extract_candidates,
    extract_core_arguments,
    extract_entities,
    extract_event_triggers,
)
from .graph import (
    DocumentGraph,
    EdgeChannel,
    Node,
    build_auxiliary_edges,
    build_dependency_edges,
    build_document_graph,
    build_typed_edges,
    combine_edge_weights,
    merge_nodes,
    tree_distance,
)
from .lexicon import (
    Stoplists,
    TriggerLexicon,
    build_trigger_lexicon,
    default_trigger_lexicon,
    is_event_trigger_lemma,
    load_stoplists,
    load_trigger_lexicon,
)
from .normalize import normalize_term
from .rankers import (
    RankedItem,
    RankedList,
    TextRankConfig,
    rank_by_frequency,
    rank_by_location,
    textrank_scores,
    top_k,
)
from .rgcn import (
    ModelConfig,
    OptimizerConfig,
    RgcnModel,
    WordVectorTable,
    init_node_features,
    load_checkpoint,
    load_vector_table,
    make_training_labels,
    predict_scores,
    rgcn_layer_forward,
    save_checkpoint,
    train,
)

__version__ = "0.1.0"
