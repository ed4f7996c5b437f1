import pytest

from dupvec import SgnsEmbedding, planted_corpus, synthetic_evalset


@pytest.fixture(scope="session")
def planted_small():
    """Two-topic corpus, 400 sentences x 8 tokens = 3200 tokens."""
    return planted_corpus(n_sentences=400, sentence_length=8,
                          vocab_per_topic=50, seed=0)


@pytest.fixture(scope="session")
def planted_50k():
    """Two-topic corpus with 50_000 tokens (6250 sentences x 8)."""
    return planted_corpus(n_sentences=6250, sentence_length=8,
                          vocab_per_topic=50, seed=11)


@pytest.fixture(scope="session")
def evalset30():
    return synthetic_evalset(n_items=30, vocab_per_topic=50, seed=7)


@pytest.fixture(scope="session")
def trained_w2v_sg(planted_small):
    """One fitted skip-gram model shared by evaluation and round-trip tests."""
    model = SgnsEmbedding(algorithm="word2vec", mode="skipgram", dim=32,
                          window=3, epochs=3, negatives=5, min_count=1,
                          subsample=0, seed=3, table_size=100_000)
    return model.fit(planted_small.corpus)
