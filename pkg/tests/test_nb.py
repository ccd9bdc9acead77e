"""Naive Bayes: hand-computed posteriors, incremental identities, exact unlearning."""
import json
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import tiny_corpus
from unlearn_lab.chi2 import SelectionConfig
from unlearn_lab.corpus import Document, Label
from unlearn_lab.errors import NegativeCount, UntrainedModel
from unlearn_lab.nb import NaiveBayes, snapshot_equal

SELECT_ALL = SelectionConfig(chi2_threshold=0.0)


def separable_four():
    return [
        Document(0, "free", Label.SPAM),
        Document(1, "free", Label.SPAM),
        Document(2, "hello", Label.HAM),
        Document(3, "hello", Label.HAM),
    ]


def oracle_log_odds(n_spam, n_ham, feature_counts, present, alpha=1.0):
    """Bernoulli likelihood-ratio oracle, computed feature by feature.

    feature_counts: token -> (spam_docs_with, ham_docs_with); present: the
    document's token set.  Combines the prior and each selected feature's
    present/absent likelihood ratio directly, with no shared code with the
    implementation.
    """
    log_odds = math.log(n_spam / n_ham)
    for token, (spam_with, ham_with) in feature_counts.items():
        theta_spam = (spam_with + alpha) / (n_spam + 2 * alpha)
        theta_ham = (ham_with + alpha) / (n_ham + 2 * alpha)
        if token in present:
            log_odds += math.log(theta_spam) - math.log(theta_ham)
        else:
            log_odds += math.log(1 - theta_spam) - math.log(1 - theta_ham)
    return log_odds


class TestPrediction:
    def test_hand_posterior(self):
        model = NaiveBayes(selection=SELECT_ALL)
        model.fit_batch(separable_four())
        assert set(model.selected) == {"free", "hello"}
        posterior = model.predict(Document(9, "free"))
        # P(free present, hello absent | spam) / same given ham
        #   = (3/4 * 3/4) / (1/4 * 1/4) = 9, so log-odds is log 9 = 2 log 3
        assert posterior.log_odds_spam == pytest.approx(2 * math.log(3), rel=1e-12)
        assert posterior.log_odds_spam == pytest.approx(
            oracle_log_odds(2, 2, {"free": (2, 0), "hello": (0, 2)}, {"free"}),
            rel=1e-12,
        )
        assert posterior.label is Label.SPAM

    def test_hand_posterior_ham_side(self):
        model = NaiveBayes(selection=SELECT_ALL)
        model.fit_batch(separable_four())
        posterior = model.predict(Document(9, "hello"))
        assert posterior.log_odds_spam == pytest.approx(-2 * math.log(3), rel=1e-12)
        assert posterior.label is Label.HAM

    def test_unknown_tokens_fall_back_to_prior_and_absences(self):
        model = NaiveBayes(selection=SELECT_ALL)
        model.fit_batch(separable_four())
        posterior = model.predict(Document(9, "zzz unseen"))
        # both features absent; balanced classes, symmetric counts: exactly 0
        assert posterior.log_odds_spam == pytest.approx(0.0, abs=1e-12)
        assert posterior.label is Label.HAM  # zero breaks toward ham

    def test_prior_is_unsmoothed_class_ratio(self):
        docs = [Document(i, "common", Label.SPAM) for i in range(3)]
        docs.append(Document(3, "common", Label.HAM))
        model = NaiveBayes(selection=SELECT_ALL)
        model.fit_batch(docs)
        # "common" is class-independent, so only the prior log(3/1) remains
        posterior = model.predict(Document(9, "common"))
        assert posterior.log_odds_spam == pytest.approx(math.log(3), rel=1e-9)

    def test_default_threshold_filters_weak_evidence(self):
        model = NaiveBayes()  # chi2 threshold 6.635
        model.fit_batch(separable_four())  # both tokens score 4.0
        assert model.selected == []
        assert model.predict(Document(9, "free")).log_odds_spam == 0.0

    def test_untrained_predict_raises(self):
        with pytest.raises(UntrainedModel):
            NaiveBayes().predict(Document(0, "hello"))

    def test_bad_alpha_rejected(self):
        with pytest.raises(ValueError):
            NaiveBayes(alpha=0.0)

    @given(seed=st.integers(0, 2**31 - 1))
    def test_matches_oracle_on_random_corpora(self, seed):
        docs = tiny_corpus(25, 25, seed=seed)
        model = NaiveBayes(selection=SELECT_ALL)
        model.fit_batch(docs)
        feature_counts = {t: tuple(model.table.counts[t]) for t in model.selected}
        probe = docs[seed % len(docs)]
        from unlearn_lab.corpus import tokenize

        expected = oracle_log_odds(50 - 25, 25, feature_counts, tokenize(probe.text))
        assert model.predict(probe).log_odds_spam == pytest.approx(expected, rel=1e-9)


class TestIncremental:
    @given(seed=st.integers(0, 2**31 - 1), cut=st.integers(1, 99))
    def test_two_batches_equal_one(self, seed, cut):
        docs = tiny_corpus(40, 60, seed=seed)
        cut = cut % (len(docs) - 1) + 1
        whole = NaiveBayes()
        whole.fit_batch(docs)
        parts = NaiveBayes()
        parts.fit_batch(docs[:cut])
        parts.fit_batch(docs[cut:])
        assert snapshot_equal(whole, parts)
        assert whole.to_json() == parts.to_json()

    def test_ten_batches_equal_one(self):
        docs = tiny_corpus(100, 150, seed=3)
        whole = NaiveBayes()
        whole.fit_batch(docs)
        parts = NaiveBayes()
        rng = random.Random(3)
        order = list(docs)
        rng.shuffle(order)
        step = math.ceil(len(order) / 10)
        for i in range(0, len(order), step):
            parts.fit_batch(order[i : i + step])
        assert snapshot_equal(whole, parts)


class TestUnlearning:
    def test_fit_unlearn_restores_state_exactly(self):
        clean = tiny_corpus(60, 80, seed=1)
        pollution = tiny_corpus(20, 5, seed=2, id_start=1000)
        model = NaiveBayes()
        model.fit_batch(clean)
        snapshot = model.to_json()
        model.fit_batch(pollution)
        assert model.to_json() != snapshot
        model.unlearn_batch(pollution)
        assert model.to_json() == snapshot

    @given(seed=st.integers(0, 2**31 - 1))
    def test_unlearn_identity_property(self, seed):
        rng = random.Random(seed)
        clean = tiny_corpus(rng.randint(5, 60), rng.randint(5, 60), seed=seed)
        pollution = tiny_corpus(
            rng.randint(1, 20), rng.randint(1, 20), seed=seed + 1, id_start=5000
        )
        reference = NaiveBayes()
        reference.fit_batch(clean)
        model = NaiveBayes()
        model.fit_batch(clean)
        model.fit_batch(pollution)
        model.unlearn_batch(pollution)
        assert snapshot_equal(model, reference)

    def test_unlearn_never_fitted_raises_and_preserves(self):
        model = NaiveBayes()
        model.fit_batch(separable_four())
        before = model.to_json()
        with pytest.raises(NegativeCount):
            model.unlearn_batch([Document(99, "neverseen", Label.SPAM)])
        assert model.to_json() == before

    def test_predictions_restored(self, corpus_200):
        model = NaiveBayes()
        model.fit_batch(corpus_200)
        probes = [Document(10_000 + i, d.text) for i, d in enumerate(corpus_200[:40])]
        before = [model.predict(p).log_odds_spam for p in probes]
        pollution = tiny_corpus(30, 0, seed=77, id_start=7000)
        model.fit_batch(pollution)
        model.unlearn_batch(pollution)
        after = [model.predict(p).log_odds_spam for p in probes]
        assert after == before


class TestPollutionDirection:
    """Adding spam-only documents carrying a fresh token shifts selection scores."""

    def test_fresh_token_score_rises_and_absent_spam_token_falls(self):
        base = [
            Document(0, "offer pills", Label.SPAM),
            Document(1, "offer cash", Label.SPAM),
            Document(2, "meeting notes", Label.HAM),
            Document(3, "agenda lunch", Label.HAM),
        ]
        model = NaiveBayes(selection=SELECT_ALL)
        model.fit_batch(base)
        scores_before = model.table.scores(model.selection)
        pollution = [Document(10 + i, "zzinject", Label.SPAM) for i in range(6)]
        model.fit_batch(pollution)
        scores_after = model.table.scores(model.selection)
        assert scores_after["zzinject"] > scores_before.get("zzinject", 0.0)
        # "offer" is in every pre-existing spam doc but no polluted one
        assert scores_after["offer"] < scores_before["offer"]


class TestSerialization:
    def test_round_trip_preserves_predictions(self, corpus_200):
        model = NaiveBayes()
        model.fit_batch(corpus_200)
        clone = NaiveBayes.from_json(model.to_json())
        assert snapshot_equal(model, clone)
        for doc in corpus_200[:50]:
            probe = Document(doc.doc_id + 10_000, doc.text)
            assert clone.predict(probe) == model.predict(probe)

    def test_round_trip_preserves_config(self):
        model = NaiveBayes(alpha=0.5, selection=SelectionConfig(chi2_threshold=1.0, q=7))
        model.fit_batch(separable_four())
        clone = NaiveBayes.from_json(model.to_json())
        assert clone.alpha == 0.5
        assert clone.selection.q == 7
        assert clone.to_json() == model.to_json()

    def test_wrong_kind_rejected(self):
        with pytest.raises(ValueError):
            NaiveBayes.from_json(json.dumps({"kind": "vfdt"}))
