import random

import pytest
from hypothesis import HealthCheck, settings

from unlearn_lab.corpus import Document, Label

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SPAM_WORDS = ["offer", "winner", "cash", "claim", "bonus", "pills", "lottery", "deal"]
HAM_WORDS = ["meeting", "agenda", "lunch", "report", "thanks", "family", "weekend", "notes"]
SHARED_WORDS = ["the", "a", "to", "you", "is", "on", "for", "it"]


def tiny_corpus(n_spam: int, n_ham: int, seed: int = 0, id_start: int = 0) -> list[Document]:
    """Small random corpus with disjoint class vocabularies plus shared filler."""
    rng = random.Random(seed)
    docs = []
    doc_id = id_start
    for _ in range(n_spam):
        words = rng.choices(SPAM_WORDS, k=rng.randint(2, 5)) + rng.choices(SHARED_WORDS, k=3)
        docs.append(Document(doc_id, " ".join(words), Label.SPAM))
        doc_id += 1
    for _ in range(n_ham):
        words = rng.choices(HAM_WORDS, k=rng.randint(2, 5)) + rng.choices(SHARED_WORDS, k=3)
        docs.append(Document(doc_id, " ".join(words), Label.HAM))
        doc_id += 1
    rng.shuffle(docs)
    return docs


@pytest.fixture
def corpus_200():
    return tiny_corpus(80, 120, seed=11)
