"""Chi-squared token scoring and feature selection over spam/ham presence counts.

Every token is scored from a 2x2 contingency table of document counts:
documents of each class that contain the token versus those that do not.
The table is incremental in both directions, so a batch of documents can be
added during training and subtracted again during unlearning.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .corpus import Label, tokenize
from .errors import AllZero, NegativeCount


@dataclass(frozen=True)
class ContingencyCounts:
    """Document counts for one token: class x presence."""

    spam_with: int
    ham_with: int
    spam_without: int
    ham_without: int


@dataclass(frozen=True)
class SelectionConfig:
    chi2_threshold: float = 6.635  # 99th percentile of chi-squared with 1 dof
    q: int = 500  # feature budget
    statistic: str = "corrected"  # or "paper-literal", see chi_squared

    def __post_init__(self):
        if self.statistic not in ("corrected", "paper-literal"):
            raise ValueError(f"unknown statistic: {self.statistic!r}")
        if self.q < 1:
            raise ValueError("q must be at least 1")


def chi_squared(counts: ContingencyCounts, statistic: str = "corrected") -> float:
    """Dependence score between a token and the spam class.

    The default "corrected" statistic is the usual 2x2 chi-squared:

        N * (a*d - b*c)^2 / ((a+b) * (c+d) * (a+c) * (b+d))

    with a = spam_with, b = spam_without, c = ham_with, d = ham_without and
    N their sum.  "paper-literal" computes a legacy variant that sums the
    cross products in the numerator and omits the N factor:

        (a*d + b*c)^2 / ((a+b) * (c+d) * (a+c) * (b+d))

    Returns 0.0 whenever a marginal is empty (token everywhere or nowhere,
    or a class with no documents).  Raises AllZero if every cell is zero.
    """
    a, b = counts.spam_with, counts.spam_without
    c, d = counts.ham_with, counts.ham_without
    if min(a, b, c, d) < 0:
        raise ValueError("contingency counts must be non-negative")
    n = a + b + c + d
    if n == 0:
        raise AllZero("all contingency cells are zero")
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return 0.0
    if statistic == "paper-literal":
        return (a * d + b * c) ** 2 / denom
    if statistic != "corrected":
        raise ValueError(f"unknown statistic: {statistic!r}")
    return n * (a * d - b * c) ** 2 / denom


class Direction(Enum):
    ADD = "add"
    REMOVE = "remove"


class FeatureTable:
    """Incremental per-token document counts plus class document totals.

    counts maps token -> [spam_with, ham_with]; the without-counts follow
    from the totals.  Tokens whose counts both reach zero are dropped, so a
    table that has a batch added and then removed is identical to one that
    never saw the batch.
    """

    def __init__(self):
        self.counts: dict[str, list[int]] = {}
        self.total_spam = 0
        self.total_ham = 0

    def __eq__(self, other):
        if not isinstance(other, FeatureTable):
            return NotImplemented
        return (
            self.total_spam == other.total_spam
            and self.total_ham == other.total_ham
            and self.counts == other.counts
        )

    def apply_batch(self, docs, direction: Direction) -> None:
        """Add or remove a batch of labeled documents.

        The batch is aggregated first and applied atomically: a REMOVE that
        would drive any count negative raises NegativeCount and leaves the
        table untouched.
        """
        batch: dict[str, list[int]] = {}
        d_spam = d_ham = 0
        for doc in docs:
            if doc.label is None:
                raise ValueError(f"document {doc.doc_id} has no label")
            col = 0 if doc.label is Label.SPAM else 1
            if doc.label is Label.SPAM:
                d_spam += 1
            else:
                d_ham += 1
            for token in tokenize(doc.text):
                cell = batch.setdefault(token, [0, 0])
                cell[col] += 1

        if direction is Direction.REMOVE:
            if d_spam > self.total_spam or d_ham > self.total_ham:
                raise NegativeCount(None)
            for token, (ds, dh) in batch.items():
                have = self.counts.get(token)
                if have is None or have[0] < ds or have[1] < dh:
                    raise NegativeCount(token)
            self.total_spam -= d_spam
            self.total_ham -= d_ham
            for token, (ds, dh) in batch.items():
                cell = self.counts[token]
                cell[0] -= ds
                cell[1] -= dh
                if cell[0] == 0 and cell[1] == 0:
                    del self.counts[token]
        else:
            self.total_spam += d_spam
            self.total_ham += d_ham
            for token, (ds, dh) in batch.items():
                cell = self.counts.get(token)
                if cell is None:
                    self.counts[token] = [ds, dh]
                else:
                    cell[0] += ds
                    cell[1] += dh

    def contingency(self, token: str) -> ContingencyCounts:
        spam_with, ham_with = self.counts.get(token, (0, 0))
        return ContingencyCounts(
            spam_with=spam_with,
            ham_with=ham_with,
            spam_without=self.total_spam - spam_with,
            ham_without=self.total_ham - ham_with,
        )

    def scores(self, config: SelectionConfig) -> dict[str, float]:
        """Chi-squared score for every token currently in the table."""
        return {
            token: chi_squared(self.contingency(token), config.statistic)
            for token in self.counts
        }

    def to_dict(self) -> dict:
        return {
            "total_spam": self.total_spam,
            "total_ham": self.total_ham,
            "tokens": {t: list(c) for t, c in self.counts.items()},
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "FeatureTable":
        table = cls()
        table.total_spam = int(payload["total_spam"])
        table.total_ham = int(payload["total_ham"])
        table.counts = {t: [int(c[0]), int(c[1])] for t, c in payload["tokens"].items()}
        return table

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, payload: str) -> "FeatureTable":
        return cls.from_dict(json.loads(payload))


def select_features(table: FeatureTable, config: SelectionConfig) -> list[str]:
    """Tokens scoring strictly above the threshold, best first, capped at q.

    Ties break by token so selection is deterministic regardless of table
    insertion order.
    """
    scored = [
        (token, score)
        for token, score in table.scores(config).items()
        if score > config.chi2_threshold
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return [token for token, _ in scored[: config.q]]
