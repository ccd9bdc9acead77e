"""Hoeffding tree: bound values, split timing, counter-training, camouflage."""
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from unlearn_lab.corpus import Document, Label
from unlearn_lab.errors import UntrainedModel
from unlearn_lab.vfdt import HoeffdingTree, SplitNode, TreeConfig, hoeffding_bound


def interleave(*groups):
    """Merge document groups round-robin so classes arrive evenly mixed."""
    groups = [list(g) for g in groups]
    out = []
    while any(groups):
        for group in groups:
            if group:
                out.append(group.pop(0))
    return out


def spam_docs(n, text, id_start=0):
    return [Document(id_start + i, text, Label.SPAM) for i in range(n)]


def ham_docs(n, text, id_start=0):
    return [Document(id_start + i, text, Label.HAM) for i in range(n)]


def separable_stream(n_spam=60, n_meeting=30, n_agenda=30):
    """Spam is a single token; ham splits between two unrelated texts, so the
    spam token has strictly the best gain and no co-occurring token ties it."""
    return interleave(
        spam_docs(n_spam, "offer", id_start=0),
        ham_docs(n_meeting, "meeting notes", id_start=1000),
        ham_docs(n_agenda, "agenda lunch", id_start=2000),
    )


class TestHoeffdingBound:
    def test_certainty_gives_zero_bound(self):
        assert hoeffding_bound(1.0, 1.0, 10) == 0.0

    def test_hand_value(self):
        # R=1, delta=e^-2, n=2: sqrt(2 / 4) = sqrt(0.5)
        assert hoeffding_bound(1.0, math.exp(-2), 2) == pytest.approx(
            math.sqrt(0.5), rel=1e-12
        )

    def test_another_hand_value(self):
        assert hoeffding_bound(2.0, 0.5, 10) == pytest.approx(
            math.sqrt(4.0 * math.log(2.0) / 20.0), rel=1e-12
        )

    @given(
        r=st.floats(0.1, 4.0),
        delta=st.floats(1e-9, 0.999),
        n=st.integers(1, 10_000),
    )
    def test_matches_formula(self, r, delta, n):
        expected = math.sqrt(r * r * math.log(1.0 / delta) / (2.0 * n))
        assert hoeffding_bound(r, delta, n) == pytest.approx(expected, rel=1e-12)

    @given(r=st.floats(0.5, 2.0), delta=st.floats(1e-6, 0.5), n=st.integers(1, 1000))
    def test_shrinks_with_evidence(self, r, delta, n):
        assert hoeffding_bound(r, delta, 4 * n) == pytest.approx(
            hoeffding_bound(r, delta, n) / 2, rel=1e-9
        )


class TestConfig:
    def test_defaults(self):
        config = TreeConfig()
        assert config.delta == 1e-6
        assert config.n_min == 50
        assert config.tau == 0.05
        assert config.q == 500

    def test_validation(self):
        with pytest.raises(ValueError):
            TreeConfig(delta=0.0)
        with pytest.raises(ValueError):
            TreeConfig(delta=1.0)
        with pytest.raises(ValueError):
            TreeConfig(n_min=0)


class TestGrowth:
    def test_clear_winner_splits(self):
        tree = HoeffdingTree()
        tree.fit_batch(separable_stream())
        assert isinstance(tree.root, SplitNode)
        assert tree.root.token == "offer"
        assert tree.predict(Document(9000, "offer pills")) is Label.SPAM
        assert tree.predict(Document(9001, "meeting today")) is Label.HAM

    def test_no_split_below_n_min(self):
        tree = HoeffdingTree(TreeConfig(n_min=200))
        tree.fit_batch(separable_stream(60, 30, 30))  # 120 < 200 arrivals
        assert not isinstance(tree.root, SplitNode)

    def test_ambiguous_evidence_waits(self):
        # complementary partitions tie exactly; the gap never beats the bound
        tree = HoeffdingTree()
        docs = interleave(
            spam_docs(100, "sale", id_start=0), ham_docs(100, "news", id_start=1000)
        )
        tree.fit_batch(docs)
        assert not isinstance(tree.root, SplitNode)

    def test_tie_threshold_forces_split(self):
        # same tie, looser tau: epsilon falls below tau at n=200 and the
        # alphabetically first best token wins; the last 40 docs then
        # populate the fresh children
        tree = HoeffdingTree(TreeConfig(tau=0.2))
        docs = interleave(
            spam_docs(120, "sale", id_start=0), ham_docs(120, "news", id_start=1000)
        )
        tree.fit_batch(docs)
        assert isinstance(tree.root, SplitNode)
        assert tree.root.token == "news"
        assert tree.predict(Document(9000, "sale")) is Label.SPAM
        assert tree.predict(Document(9001, "news")) is Label.HAM

    def test_empty_child_defers_to_ancestor_counts(self):
        tree = HoeffdingTree(TreeConfig(tau=0.2))
        docs = interleave(
            spam_docs(100, "sale", id_start=0), ham_docs(100, "news", id_start=1000)
        )
        tree.fit_batch(docs)
        # children are empty right after the split; the split node's frozen
        # totals (100, 100) tie, and ties resolve to ham
        assert tree.predict(Document(9000, "sale")) is Label.HAM
        tree.fit_batch(spam_docs(10, "sale", id_start=5000))
        assert tree.predict(Document(9001, "sale")) is Label.SPAM

    def test_pure_leaf_never_splits(self):
        tree = HoeffdingTree()
        tree.fit_batch(spam_docs(300, "offer cash", id_start=0))
        assert not isinstance(tree.root, SplitNode)
        assert tree.predict(Document(9000, "anything")) is Label.SPAM

    def test_feature_pool_frozen_on_first_batch(self):
        tree = HoeffdingTree()
        tree.fit_batch(separable_stream())
        assert "gadget" not in tree.feature_pool
        # a later perfectly separating token cannot join the pool or split
        late = interleave(
            spam_docs(150, "offer cash gadget", id_start=6000),
            ham_docs(150, "meeting notes", id_start=7000),
        )
        tree.fit_batch(late)
        stack = [tree.root]
        while stack:
            node = stack.pop()
            if isinstance(node, SplitNode):
                assert node.token != "gadget"
                stack.extend((node.present, node.absent))

    def test_unlabeled_doc_rejected(self):
        tree = HoeffdingTree()
        with pytest.raises(ValueError):
            tree.fit_batch([Document(0, "hello", None)])

    def test_untrained_predict_raises(self):
        with pytest.raises(UntrainedModel):
            HoeffdingTree().predict(Document(0, "hello"))

    def test_bad_weight_rejected(self):
        tree = HoeffdingTree()
        with pytest.raises(ValueError):
            tree.fit_batch(spam_docs(1, "offer"), weight=0.0)
        with pytest.raises(ValueError):
            tree.unlearn_batch(spam_docs(1, "offer"), magnitude=-1.0)


class TestCounterTraining:
    def pollute_and_recover(self, magnitude=1.0):
        tree = HoeffdingTree()
        tree.fit_batch(separable_stream())
        probe = Document(9000, "offer cash zzmart")
        assert tree.predict(probe) is Label.SPAM
        # camouflage: commercial-looking mail reported as ham, carrying the
        # target token; routes to the spam leaf and outvotes it
        pollution = [
            Document(8000 + i, "offer cash zzmart", Label.HAM) for i in range(70)
        ]
        tree.fit_batch(pollution)
        assert tree.predict(probe) is Label.HAM  # flipped at stage 2
        tree.unlearn_batch(pollution, magnitude=magnitude)
        return tree, probe

    def test_camouflage_flip_and_counter_recovery(self):
        tree, probe = self.pollute_and_recover(magnitude=1.0)
        assert tree.predict(probe) is Label.SPAM

    def test_larger_magnitude_also_recovers(self):
        tree, probe = self.pollute_and_recover(magnitude=2.0)
        assert tree.predict(probe) is Label.SPAM

    def test_counter_training_restores_leaf_difference(self):
        tree = HoeffdingTree()
        tree.fit_batch(separable_stream())

        def leaf_diffs(node, out):
            if isinstance(node, SplitNode):
                leaf_diffs(node.present, out)
                leaf_diffs(node.absent, out)
            else:
                out.append(node.n_spam - node.n_ham)
            return out

        before = leaf_diffs(tree.root, [])
        pollution = [Document(8000 + i, "offer cash", Label.HAM) for i in range(30)]
        tree.fit_batch(pollution)
        tree.unlearn_batch(pollution, magnitude=1.0)
        assert leaf_diffs(tree.root, []) == pytest.approx(before)

    def test_pollution_below_pool_cannot_resurface(self):
        # the camouflage token is absent from the first batch, so no node
        # can ever test it, polluted or not
        tree, _ = self.pollute_and_recover()
        assert "zzmart" not in tree.feature_pool


class TestSerialization:
    def test_round_trip_preserves_structure_and_predictions(self):
        tree = HoeffdingTree()
        tree.fit_batch(separable_stream())
        clone = HoeffdingTree.from_json(tree.to_json())
        assert clone.to_json() == tree.to_json()
        assert clone.node_count() == tree.node_count()
        probes = [
            Document(9000, "offer cash"),
            Document(9001, "meeting notes"),
            Document(9002, "agenda lunch"),
            Document(9003, "unknown words"),
        ]
        for probe in probes:
            assert clone.predict(probe) is tree.predict(probe)

    def test_round_trip_preserves_pending_stats(self):
        # leaf counters mid-stream survive serialization, so growth resumes
        docs = separable_stream()
        tree = HoeffdingTree()
        tree.fit_batch(docs[:40])
        clone = HoeffdingTree.from_json(tree.to_json())
        tree.fit_batch(docs[40:])
        clone.fit_batch(docs[40:])
        assert clone.to_json() == tree.to_json()

    def test_untrained_round_trip(self):
        clone = HoeffdingTree.from_json(HoeffdingTree().to_json())
        assert clone.feature_pool is None

    def test_wrong_kind_rejected(self):
        with pytest.raises(ValueError):
            HoeffdingTree.from_json(json.dumps({"kind": "nb"}))
