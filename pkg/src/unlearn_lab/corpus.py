"""Documents, tokenization, CSV loading, train/test splits, and synthetic corpora.

A document is a piece of mail text with an optional spam/ham label.  All
models in this package reduce a document to its set of distinct tokens, so
token *presence* is the only signal that survives tokenization.
"""
from __future__ import annotations

import csv
import math
import random
import re
from dataclasses import dataclass
from enum import IntEnum

from .errors import EmptyCorpus, MissingColumn

# Tokens are maximal runs of alphanumeric codepoints (underscore excluded).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Tokens shorter than this carry no signal and are dropped.
MIN_TOKEN_LEN = 2


class Label(IntEnum):
    """Document class. Serialized everywhere as its integer value."""

    HAM = 0
    SPAM = 1

    def flipped(self) -> "Label":
        return Label(1 - int(self))


# Frozen set of lowercase tokens, each at least MIN_TOKEN_LEN chars.
TokenSet = frozenset[str]


@dataclass(frozen=True)
class Document:
    """One mail: an integer id, raw text, and an optional label."""

    doc_id: int
    text: str
    label: Label | None = None


def tokenize(text: str) -> frozenset[str]:
    """Reduce text to its set of distinct tokens.

    Lowercases, splits on every non-alphanumeric codepoint, and drops
    tokens shorter than MIN_TOKEN_LEN characters.  Duplicates collapse:
    only presence matters downstream.
    """
    return frozenset(t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= MIN_TOKEN_LEN)


def vocabulary(docs) -> set[str]:
    """Union of the token sets of all documents."""
    vocab: set[str] = set()
    for doc in docs:
        vocab |= tokenize(doc.text)
    return vocab


@dataclass(frozen=True)
class CorpusStats:
    n_docs: int
    n_spam: int
    n_ham: int

    @property
    def spam_fraction(self) -> float:
        return self.n_spam / self.n_docs


def corpus_stats(docs) -> CorpusStats:
    """Count labeled documents per class. Unlabeled documents are rejected."""
    n_spam = n_ham = 0
    for doc in docs:
        if doc.label is Label.SPAM:
            n_spam += 1
        elif doc.label is Label.HAM:
            n_ham += 1
        else:
            raise ValueError(f"document {doc.doc_id} has no label")
    return CorpusStats(n_docs=n_spam + n_ham, n_spam=n_spam, n_ham=n_ham)


@dataclass(frozen=True)
class CsvLoadResult:
    """Documents read from a CSV file plus the row numbers that were skipped."""

    docs: list
    skipped_rows: list

    @property
    def n_skipped(self) -> int:
        return len(self.skipped_rows)


def load_csv(path, text_column: str, label_column: str, spam_value: str) -> CsvLoadResult:
    """Load a labeled corpus from an RFC-4180 CSV file with a header row.

    A row's label equals spam_value (after stripping surrounding whitespace)
    for Spam, anything else for Ham.  Rows whose cell count differs from the
    header are skipped and reported in the result metadata rather than
    raising.  Document ids are assigned 0..n-1 over the accepted rows in
    file order.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise MissingColumn(text_column)
        try:
            text_idx = header.index(text_column)
        except ValueError:
            raise MissingColumn(text_column) from None
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise MissingColumn(label_column) from None

        docs: list[Document] = []
        skipped: list[int] = []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                skipped.append(row_no)
                continue
            label = Label.SPAM if row[label_idx].strip() == spam_value else Label.HAM
            docs.append(Document(doc_id=len(docs), text=row[text_idx], label=label))
    return CsvLoadResult(docs=docs, skipped_rows=skipped)


def split_train_test(docs, train_fraction: float, seed: int):
    """Deterministically shuffle and split a corpus.

    The first ceil(n * train_fraction) shuffled documents become the
    training set; the remainder is the test set.
    """
    docs = list(docs)
    if not docs:
        raise EmptyCorpus("cannot split an empty corpus")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    random.Random(seed).shuffle(docs)
    n_train = math.ceil(len(docs) * train_fraction)
    return docs[:n_train], docs[n_train:]


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic mail corpus.

    Spam documents draw tokens from the spam vocabulary plus the shared
    vocabulary; ham documents from the ham vocabulary plus the shared one.
    Class-exclusive vocabularies never overlap, so the only cross-class
    tokens are the shared ones.
    """

    n_docs: int
    spam_fraction: float = 0.4
    vocab_size_spam: int = 300
    vocab_size_ham: int = 300
    vocab_size_shared: int = 1000
    tokens_per_doc_min: int = 6
    tokens_per_doc_max: int = 14
    seed: int = 0

    def __post_init__(self):
        if self.n_docs <= 0:
            raise ValueError("n_docs must be positive")
        if not 0.0 <= self.spam_fraction <= 1.0:
            raise ValueError("spam_fraction must be in [0, 1]")
        if min(self.vocab_size_spam, self.vocab_size_ham, self.vocab_size_shared) < 0:
            raise ValueError("vocabulary sizes must be non-negative")
        if self.vocab_size_spam + self.vocab_size_shared == 0:
            raise ValueError("spam documents need a non-empty vocabulary")
        if self.vocab_size_ham + self.vocab_size_shared == 0:
            raise ValueError("ham documents need a non-empty vocabulary")
        if self.tokens_per_doc_min < 1 or self.tokens_per_doc_max < self.tokens_per_doc_min:
            raise ValueError("tokens_per_doc bounds must satisfy 1 <= min <= max")


def _zipf_weights(size: int) -> list[float]:
    return [1.0 / (rank + 1) for rank in range(size)]


def generate_synthetic(spec: SyntheticSpec) -> list[Document]:
    """Generate a labeled corpus from a spec. Identical specs yield identical corpora.

    Token draws are Zipf-weighted within each vocabulary segment, mimicking the
    frequency skew of real mail: a handful of strongly indicative tokens appear
    in a large share of their class while the tail stays rare.
    """
    rng = random.Random(spec.seed)
    n_spam = round(spec.n_docs * spec.spam_fraction)
    labels = [Label.SPAM] * n_spam + [Label.HAM] * (spec.n_docs - n_spam)
    rng.shuffle(labels)

    spam_vocab = [f"s{i:05d}" for i in range(spec.vocab_size_spam)]
    ham_vocab = [f"h{i:05d}" for i in range(spec.vocab_size_ham)]
    shared_vocab = [f"c{i:05d}" for i in range(spec.vocab_size_shared)]
    spam_pool = spam_vocab + shared_vocab
    ham_pool = ham_vocab + shared_vocab
    shared_weights = _zipf_weights(spec.vocab_size_shared)
    spam_weights = _zipf_weights(spec.vocab_size_spam) + shared_weights
    ham_weights = _zipf_weights(spec.vocab_size_ham) + shared_weights

    docs = []
    for doc_id, label in enumerate(labels):
        if label is Label.SPAM:
            pool, weights = spam_pool, spam_weights
        else:
            pool, weights = ham_pool, ham_weights
        k = rng.randint(spec.tokens_per_doc_min, spec.tokens_per_doc_max)
        text = " ".join(rng.choices(pool, weights=weights, k=k))
        docs.append(Document(doc_id=doc_id, text=text, label=label))
    return docs
