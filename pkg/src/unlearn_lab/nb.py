"""Incremental naive Bayes spam classifier over selected token-presence features.

Training and unlearning are count updates on a FeatureTable: fitting a batch
adds its document counts, unlearning subtracts them.  Because both classes
of update are exact integer arithmetic, unlearning a batch restores the
model state bit for bit.  Feature selection is recomputed after every
update so the selected set always matches the current counts.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .chi2 import Direction, FeatureTable, SelectionConfig, select_features
from .corpus import Document, Label, tokenize
from .errors import UntrainedModel


@dataclass(frozen=True)
class Posterior:
    """Prediction for one document: spam/ham log-odds and the implied label."""

    log_odds_spam: float
    label: Label


class NaiveBayes:
    """Presence/absence naive Bayes with chi-squared feature selection.

    Per-feature likelihoods use Laplace smoothing with parameter alpha;
    class priors come from unsmoothed document counts.  A document whose
    log-odds is exactly zero is called Ham.
    """

    kind = "nb"

    def __init__(self, alpha: float = 1.0, selection: SelectionConfig | None = None):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.alpha = alpha
        self.selection = selection or SelectionConfig()
        self.table = FeatureTable()
        self.selected: list[str] = []
        self._weights = None  # lazy predict cache, derived from the state above

    @property
    def class_doc_counts(self) -> tuple[int, int]:
        return (self.table.total_spam, self.table.total_ham)

    def fit_batch(self, docs) -> None:
        """Add a batch of labeled documents and refresh the selected features."""
        self.table.apply_batch(docs, Direction.ADD)
        self._refresh()

    def unlearn_batch(self, docs) -> None:
        """Subtract a previously fitted batch; exact inverse of fit_batch.

        Touches only the counts of tokens occurring in the batch plus one
        selection pass, so the cost does not depend on how much other data
        the model has seen.  Raises NegativeCount if the batch was never
        trained.
        """
        self.table.apply_batch(docs, Direction.REMOVE)
        self._refresh()

    def _refresh(self) -> None:
        self.selected = select_features(self.table, self.selection)
        self._weights = None

    def _build_weights(self):
        n_spam, n_ham = self.class_doc_counts
        a = self.alpha
        log_prior = (math.log(n_spam) if n_spam else -math.inf) - (
            math.log(n_ham) if n_ham else -math.inf
        )
        # log-odds of a document containing none of the selected features,
        # plus the per-feature swing applied when a feature is present
        base = log_prior
        swing: dict[str, float] = {}
        for token in self.selected:
            spam_with, ham_with = self.table.counts.get(token, (0, 0))
            theta_s = (spam_with + a) / (n_spam + 2 * a)
            theta_h = (ham_with + a) / (n_ham + 2 * a)
            log_present = math.log(theta_s / theta_h)
            log_absent = math.log((1 - theta_s) / (1 - theta_h))
            base += log_absent
            swing[token] = log_present - log_absent
        self._weights = (base, swing)

    def predict(self, doc: Document) -> Posterior:
        n_spam, n_ham = self.class_doc_counts
        if n_spam + n_ham == 0:
            raise UntrainedModel("fit at least one document before predicting")
        if self._weights is None:
            self._build_weights()
        base, swing = self._weights
        log_odds = base + sum(swing[t] for t in tokenize(doc.text) if t in swing)
        label = Label.SPAM if log_odds > 0 else Label.HAM
        return Posterior(log_odds_spam=log_odds, label=label)

    def predict_label(self, doc: Document) -> Label:
        return self.predict(doc).label

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "alpha": self.alpha,
            "selected": self.selected,
            "config": {
                "chi2_threshold": self.selection.chi2_threshold,
                "q": self.selection.q,
                "statistic": self.selection.statistic,
            },
            "table": self.table.to_dict(),
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, payload: str) -> "NaiveBayes":
        data = json.loads(payload)
        if data.get("kind") != cls.kind:
            raise ValueError(f"not a naive Bayes model: kind={data.get('kind')!r}")
        cfg = data["config"]
        model = cls(
            alpha=data["alpha"],
            selection=SelectionConfig(
                chi2_threshold=cfg["chi2_threshold"],
                q=cfg["q"],
                statistic=cfg.get("statistic", "corrected"),
            ),
        )
        model.table = FeatureTable.from_dict(data["table"])
        model.selected = list(data["selected"])
        return model


def snapshot_equal(a: NaiveBayes, b: NaiveBayes) -> bool:
    """True when two models are indistinguishable: counts, selection, config."""
    return (
        a.alpha == b.alpha
        and a.selection == b.selection
        and a.table == b.table
        and a.selected == b.selected
    )
