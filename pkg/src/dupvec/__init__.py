"""Controlled corpus duplication for static embeddings on small corpora.

The package covers the full loop: preprocess raw text into a tokenized
corpus, duplicate it an exact number of times, train word2vec / fasttext
(negative sampling) or GloVe embeddings from scratch, score them on a
sentence-similarity ranking task with Kendall's tau-b, and sweep the
duplication factor to see where quality peaks.
"""

from .corpus import (
    CorpusStats,
    IngestError,
    IngestResult,
    PipelineConfig,
    RawDocument,
    TokenizedCorpus,
    clean,
    corpus_stats,
    duplicate,
    ingest,
    load_corpus,
    preprocess,
    remove_stopwords,
    save_corpus,
    segment,
    tokenize,
)
from .evaluate import (
    EvalItem,
    EvalSet,
    TauResult,
    cosine,
    evaluate,
    kendall_tau,
    load_evalset,
    rank_candidates,
    save_evalset,
    sentence_embedding,
    sentence_tokens,
)
from .glove import (
    CooccurrenceMatrix,
    GloveEmbedding,
    build_cooccurrence,
    entry_gradients,
    entry_loss,
    glove_weight,
    load_cooccurrence,
    save_cooccurrence,
    train_glove,
)
from .ngrams import build_subword_index, extract_ngrams, fnv1a_32, hash_ngram, ngram_bucket_ids
from .sgns import SgnsEmbedding, encode_sentences, pair_gradients, pair_loss
from .sweep import (
    RunRecord,
    SweepConfig,
    SweepSummary,
    default_rho_grid,
    emit_report,
    load_runs,
    run_sweep,
    summarize,
)
from .synthetic import planted_corpus, shipped_evalset_path, synthetic_evalset
from .validation import TrainingDiverged
from .vectors import (
    VectorFormatError,
    WordVector,
    WordVectors,
    load_vec,
    save_model,
    save_vec,
)
from .vocab import (
    UnigramTable,
    Vocabulary,
    VocabularyError,
    build_unigram_table,
    build_vocab,
    discard_prob,
    load_vocab,
    sample_negative,
    save_vocab,
)

__version__ = "0.1.0"

__all__ = [
    "CorpusStats", "IngestError", "IngestResult", "PipelineConfig",
    "RawDocument", "TokenizedCorpus", "clean", "corpus_stats", "duplicate",
    "ingest", "load_corpus", "preprocess", "remove_stopwords", "save_corpus",
    "segment", "tokenize",
    "Vocabulary", "VocabularyError", "UnigramTable", "build_vocab",
    "build_unigram_table", "discard_prob", "sample_negative", "save_vocab",
    "load_vocab",
    "build_subword_index", "extract_ngrams", "fnv1a_32", "hash_ngram", "ngram_bucket_ids",
    "SgnsEmbedding", "encode_sentences", "pair_gradients", "pair_loss",
    "GloveEmbedding", "CooccurrenceMatrix", "build_cooccurrence",
    "glove_weight", "train_glove", "save_cooccurrence", "load_cooccurrence",
    "entry_loss", "entry_gradients",
    "EvalItem", "EvalSet", "TauResult", "cosine", "evaluate", "kendall_tau",
    "load_evalset", "rank_candidates", "save_evalset", "sentence_embedding", "sentence_tokens",
    "SweepConfig", "RunRecord", "SweepSummary", "default_rho_grid",
    "emit_report", "load_runs", "run_sweep", "summarize",
    "planted_corpus", "synthetic_evalset", "shipped_evalset_path",
    "WordVector", "WordVectors", "VectorFormatError", "save_vec", "load_vec",
    "save_model",
    "TrainingDiverged",
    "__version__",
]
