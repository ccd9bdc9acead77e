"""Incremental random forest: append-only bagged trees plus counter-trees.

Each fitted batch contributes ceil(len(batch) / k) depth-limited Gini
trees, every tree trained on its own bootstrap sample over a random token
subset.  Unlearning never removes trees: it appends counter-trees trained
on the polluted documents with flipped labels, so the majority vote drowns
out what the polluted trees learned.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import Document, Label, tokenize
from .errors import EmptyBatch, UnknownBatch, UntrainedModel

log = logging.getLogger(__name__)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ForestConfig:
    k: int = 100  # documents per tree: a batch adds ceil(len/k) trees
    max_depth: int = 12
    seed: int = 0
    counter_scale: float = 1.0  # alpha: counter trees per normal tree of the target batch

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.counter_scale < 0:
            raise ValueError("counter_scale must be non-negative")


class Provenance(str, Enum):
    NORMAL = "normal"
    COUNTER = "counter"


@dataclass
class TreeUnit:
    """One vote: a greedy Gini tree over a fixed token subset."""

    provenance: str
    source_batch_id: int
    features: list
    root: dict  # {"token", "present", "absent"} nodes with {"label"} leaves


@dataclass(frozen=True)
class VoteResult:
    spam_votes: int
    ham_votes: int
    label: Label

    @property
    def margin(self) -> int:
        return abs(self.spam_votes - self.ham_votes)


class IncrementalForest:
    kind = "forest"

    def __init__(self, config: ForestConfig | None = None):
        self.config = config or ForestConfig()
        self.trees: list[TreeUnit] = []
        self.batch_log: list[dict] = []
        self._next_batch_id = 0

    def fit_batch(self, docs) -> int:
        """Add ceil(len(docs) / k) bootstrap trees for this batch.

        Returns the batch id recorded in the batch log.
        """
        docs = list(docs)
        if not docs:
            raise EmptyBatch("cannot fit an empty batch")
        batch_id = self._take_batch_id()
        n_trees = math.ceil(len(docs) / self.config.k)
        self._grow_trees(docs, n_trees, batch_id, Provenance.NORMAL)
        self.batch_log.append(
            {
                "id": batch_id,
                "kind": "fit",
                "size": len(docs),
                "doc_ids": [d.doc_id for d in docs],
                "n_trees": n_trees,
                "target": None,
            }
        )
        return batch_id

    def unlearn_batch(self, docs, batch_id: int | None = None, alpha: float | None = None) -> int:
        """Append counter-trees for a polluted batch.

        The documents are retrained with flipped labels into
        ceil(alpha * t_b) fresh trees, where t_b is the number of trees the
        polluted batch originally contributed (recomputed from the batch
        size when no batch_id is given).  Heavier pollution or thin vote
        margins call for a larger alpha.  Returns the log id of the
        unlearn event.
        """
        docs = list(docs)
        if not docs:
            raise EmptyBatch("cannot unlearn an empty batch")
        if alpha is None:
            alpha = self.config.counter_scale
        if alpha < 0:
            raise ValueError("alpha must be non-negative")
        if batch_id is not None:
            entry = next(
                (e for e in self.batch_log if e["id"] == batch_id and e["kind"] == "fit"), None
            )
            if entry is None:
                raise UnknownBatch(batch_id)
            trained = set(entry["doc_ids"])
            strays = [d.doc_id for d in docs if d.doc_id not in trained]
            if strays:
                raise UnknownBatch(batch_id, f"doc ids not in batch: {strays[:5]}")
            t_b = entry["n_trees"]
        else:
            t_b = math.ceil(len(docs) / self.config.k)
        n_counter = math.ceil(alpha * t_b)

        flipped = []
        for doc in docs:
            if doc.label is None:
                raise ValueError(f"document {doc.doc_id} has no label")
            flipped.append(Document(doc.doc_id, doc.text, doc.label.flipped()))

        event_id = self._take_batch_id()
        if n_counter > 0:
            self._grow_trees(flipped, n_counter, event_id, Provenance.COUNTER)
        self.batch_log.append(
            {
                "id": event_id,
                "kind": "counter",
                "size": len(docs),
                "doc_ids": [d.doc_id for d in docs],
                "n_trees": n_counter,
                "target": batch_id,
            }
        )
        log.debug(
            "unlearn event %d: %d counter trees against batch %s (alpha=%.3g)",
            event_id,
            n_counter,
            batch_id,
            alpha,
        )
        return event_id

    def predict(self, doc: Document) -> VoteResult:
        """Majority vote over all trees; a tie is Ham."""
        if not self.trees:
            raise UntrainedModel("fit at least one batch before predicting")
        tokens = tokenize(doc.text)
        spam_votes = 0
        for tree in self.trees:
            node = tree.root
            while "token" in node:
                node = node["present"] if node["token"] in tokens else node["absent"]
            spam_votes += node["label"]
        ham_votes = len(self.trees) - spam_votes
        label = Label.SPAM if spam_votes > ham_votes else Label.HAM
        return VoteResult(spam_votes=spam_votes, ham_votes=ham_votes, label=label)

    def predict_label(self, doc: Document) -> Label:
        return self.predict(doc).label

    def _take_batch_id(self) -> int:
        batch_id = self._next_batch_id
        self._next_batch_id += 1
        return batch_id

    def _grow_trees(self, docs, n_trees: int, batch_id: int, provenance: Provenance) -> None:
        X, y, vocab = _presence_matrix(docs)
        n_docs = len(docs)
        subset_size = min(math.ceil(math.sqrt(len(vocab))), len(vocab))
        for i in range(n_trees):
            rng = np.random.default_rng(
                np.random.SeedSequence([self.config.seed & _SEED_MASK, batch_id, i])
            )
            bootstrap = rng.integers(0, n_docs, size=n_docs)
            if subset_size > 0:
                cols = np.sort(rng.choice(len(vocab), size=subset_size, replace=False))
            else:
                cols = np.empty(0, dtype=np.intp)
            root = _grow(X, y, bootstrap, cols, vocab, 0, self.config.max_depth)
            self.trees.append(
                TreeUnit(
                    provenance=provenance.value,
                    source_batch_id=batch_id,
                    features=[vocab[j] for j in cols],
                    root=root,
                )
            )

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "config": {
                "k": self.config.k,
                "max_depth": self.config.max_depth,
                "seed": self.config.seed,
                "counter_scale": self.config.counter_scale,
            },
            "trees": [
                {
                    "provenance": t.provenance,
                    "source_batch_id": t.source_batch_id,
                    "features": t.features,
                    "root": t.root,
                }
                for t in self.trees
            ],
            "batch_log": self.batch_log,
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, payload: str) -> "IncrementalForest":
        data = json.loads(payload)
        if data.get("kind") != cls.kind:
            raise ValueError(f"not a forest model: kind={data.get('kind')!r}")
        cfg = data["config"]
        forest = cls(
            ForestConfig(
                k=cfg["k"],
                max_depth=cfg["max_depth"],
                seed=cfg["seed"],
                counter_scale=cfg["counter_scale"],
            )
        )
        forest.trees = [
            TreeUnit(
                provenance=t["provenance"],
                source_batch_id=t["source_batch_id"],
                features=list(t["features"]),
                root=t["root"],
            )
            for t in data["trees"]
        ]
        forest.batch_log = [dict(e) for e in data["batch_log"]]
        forest._next_batch_id = max((e["id"] for e in forest.batch_log), default=-1) + 1
        return forest


def _presence_matrix(docs):
    token_sets = [tokenize(d.text) for d in docs]
    for doc in docs:
        if doc.label is None:
            raise ValueError(f"document {doc.doc_id} has no label")
    vocab = sorted(set().union(*token_sets)) if token_sets else []
    col = {t: j for j, t in enumerate(vocab)}
    X = np.zeros((len(docs), len(vocab)), dtype=bool)
    for i, tokens in enumerate(token_sets):
        for t in tokens:
            X[i, col[t]] = True
    y = np.fromiter(
        (1 if d.label is Label.SPAM else 0 for d in docs), dtype=np.int8, count=len(docs)
    )
    return X, y, vocab


def _gini_terms(s, h):
    n = s + h
    out = np.zeros(len(n), dtype=float)
    nz = n > 0
    out[nz] = 1.0 - (s[nz] / n[nz]) ** 2 - (h[nz] / n[nz]) ** 2
    return out


def _grow(X, y, idx, cols, vocab, depth, max_depth) -> dict:
    ys = y[idx]
    n_spam = int(ys.sum())
    n_ham = len(idx) - n_spam
    if depth >= max_depth or n_spam == 0 or n_ham == 0 or len(cols) == 0:
        return {"label": 1 if n_spam > n_ham else 0}

    sub = X[np.ix_(idx, cols)]
    spam_rows = ys == 1
    s_with = sub[spam_rows].sum(axis=0).astype(float)
    h_with = sub[~spam_rows].sum(axis=0).astype(float)
    n_with = s_with + h_with
    n_total = float(len(idx))
    s_without = n_spam - s_with
    h_without = n_ham - h_with
    n_without = n_total - n_with

    parent = 1.0 - (n_spam / n_total) ** 2 - (n_ham / n_total) ** 2
    gains = (
        parent
        - (n_with / n_total) * _gini_terms(s_with, h_with)
        - (n_without / n_total) * _gini_terms(s_without, h_without)
    )
    gains[(n_with == 0) | (n_without == 0)] = -1.0

    best = int(np.argmax(gains))  # ties: first index, i.e. lowest token
    if gains[best] <= 1e-12:
        return {"label": 1 if n_spam > n_ham else 0}
    col = cols[best]
    mask = X[idx, col]
    child_cols = np.delete(cols, best)
    return {
        "token": vocab[col],
        "present": _grow(X, y, idx[mask], child_cols, vocab, depth + 1, max_depth),
        "absent": _grow(X, y, idx[~mask], child_cols, vocab, depth + 1, max_depth),
    }
