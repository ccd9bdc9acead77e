"""Incremental Hoeffding decision tree over binary token-presence tests.

The tree grows one leaf split at a time as documents stream in.  A leaf
keeps weighted per-class counts overall and per candidate token; every
n_min arrivals it compares the two best Gini gains against the Hoeffding
bound and splits when the winner is statistically clear (or the bound has
shrunk below the tie threshold tau).

Unlearning is counter-training: the polluted documents are fitted again
with flipped labels, their statistics weighted by a magnitude m.  Nodes are
never deleted; pollution is diluted instead of excised.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .chi2 import Direction, FeatureTable, SelectionConfig
from .corpus import Document, Label, tokenize
from .errors import UntrainedModel


def hoeffding_bound(value_range: float, delta: float, n: float) -> float:
    """Deviation bound for the mean of n observations spanning value_range.

    With probability 1 - delta the observed mean is within this bound of
    the true mean.
    """
    return math.sqrt(value_range * value_range * math.log(1.0 / delta) / (2.0 * n))


@dataclass(frozen=True)
class TreeConfig:
    delta: float = 1e-6  # split confidence
    n_min: int = 50  # arrivals between split evaluations at a leaf
    tau: float = 0.05  # tie threshold
    q: int = 500  # feature pool size, taken from the first batch

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.n_min < 1:
            raise ValueError("n_min must be at least 1")


@dataclass
class NodeStats:
    """Leaf node: weighted class totals plus per-token presence counts."""

    available: set  # pool tokens not yet tested on the path to this leaf
    n_spam: float = 0.0
    n_ham: float = 0.0
    arrivals: int = 0  # documents since the last split evaluation
    feat: dict = field(default_factory=dict)  # token -> [spam_with, ham_with]

    @property
    def n(self) -> float:
        return self.n_spam + self.n_ham


@dataclass
class SplitNode:
    token: str
    n_spam: float  # class totals frozen at split time; empty leaves inherit them
    n_ham: float
    present: object
    absent: object


def _gini(n_spam: float, n_ham: float) -> float:
    n = n_spam + n_ham
    if n <= 0.0:
        return 0.0
    p_spam = n_spam / n
    p_ham = n_ham / n
    return 1.0 - p_spam * p_spam - p_ham * p_ham


class HoeffdingTree:
    kind = "vfdt"

    def __init__(self, config: TreeConfig | None = None):
        self.config = config or TreeConfig()
        self.feature_pool: list[str] | None = None
        self.root = NodeStats(available=set())

    def fit_batch(self, docs, *, flip_labels: bool = False, weight: float = 1.0) -> None:
        """Stream a batch of labeled documents through the tree.

        flip_labels trains each document as the opposite class; weight
        scales every statistic contribution.  Both exist for unlearning.
        """
        if weight <= 0:
            raise ValueError("weight must be positive")
        docs = list(docs)
        if not docs:
            return
        if self.feature_pool is None:
            self._init_pool(docs)
        for doc in docs:
            if doc.label is None:
                raise ValueError(f"document {doc.doc_id} has no label")
            label = doc.label.flipped() if flip_labels else doc.label
            tokens = tokenize(doc.text)

            # route to a leaf, remembering where to rewire on a split
            parent = None
            went_present = False
            node = self.root
            while isinstance(node, SplitNode):
                parent = node
                went_present = node.token in tokens
                node = node.present if went_present else node.absent

            if label is Label.SPAM:
                node.n_spam += weight
                col = 0
            else:
                node.n_ham += weight
                col = 1
            for token in tokens & node.available:
                cell = node.feat.setdefault(token, [0.0, 0.0])
                cell[col] += weight

            node.arrivals += 1
            if node.arrivals >= self.config.n_min:
                node.arrivals = 0
                split = self._attempt_split(node)
                if split is not None:
                    if parent is None:
                        self.root = split
                    elif went_present:
                        parent.present = split
                    else:
                        parent.absent = split

    def unlearn_batch(self, docs, magnitude: float = 1.0) -> None:
        """Counter-train the batch: refit with flipped labels at the given weight.

        At magnitude 1 each polluted document is offset by an equal and
        opposite statistic, restoring every per-node spam minus ham
        difference that the pollution shifted (where no split intervened).
        """
        if magnitude <= 0:
            raise ValueError("magnitude must be positive")
        self.fit_batch(docs, flip_labels=True, weight=magnitude)

    def predict(self, doc: Document) -> Label:
        """Majority label of the reached leaf; empty leaves defer to the
        deepest populated ancestor.  Ties resolve to Ham."""
        if self.feature_pool is None:
            raise UntrainedModel("fit at least one batch before predicting")
        tokens = tokenize(doc.text)
        n_spam = n_ham = 0.0
        node = self.root
        while isinstance(node, SplitNode):
            if node.n_spam + node.n_ham > 0:
                n_spam, n_ham = node.n_spam, node.n_ham
            node = node.present if node.token in tokens else node.absent
        if node.n > 0:
            n_spam, n_ham = node.n_spam, node.n_ham
        return Label.SPAM if n_spam > n_ham else Label.HAM

    def predict_label(self, doc: Document) -> Label:
        return self.predict(doc)

    def _init_pool(self, docs) -> None:
        # pool = top-q chi-squared tokens of the first batch, frozen thereafter
        table = FeatureTable()
        table.apply_batch(docs, Direction.ADD)
        ranked = sorted(table.scores(SelectionConfig()).items(), key=lambda kv: (-kv[1], kv[0]))
        self.feature_pool = [token for token, _ in ranked[: self.config.q]]
        self.root = NodeStats(available=set(self.feature_pool))

    def _attempt_split(self, leaf: NodeStats):
        if leaf.n_spam <= 0.0 or leaf.n_ham <= 0.0:
            return None  # pure leaf, nothing to separate
        n = leaf.n
        parent_gini = _gini(leaf.n_spam, leaf.n_ham)
        best_gain = 0.0
        best_token = None
        second_gain = 0.0  # floor at zero: splitting must beat not splitting
        for token in sorted(leaf.feat):
            s_with, h_with = leaf.feat[token]
            s_without = max(leaf.n_spam - s_with, 0.0)
            h_without = max(leaf.n_ham - h_with, 0.0)
            n_with = s_with + h_with
            n_without = s_without + h_without
            if n_with <= 0.0 or n_without <= 0.0:
                continue  # token does not partition this leaf
            gain = (
                parent_gini
                - (n_with / n) * _gini(s_with, h_with)
                - (n_without / n) * _gini(s_without, h_without)
            )
            if gain > best_gain:
                second_gain = best_gain
                best_gain, best_token = gain, token
            elif gain > second_gain:
                second_gain = gain
        if best_token is None:
            return None
        epsilon = hoeffding_bound(1.0, self.config.delta, n)
        if best_gain - second_gain > epsilon or epsilon < self.config.tau:
            child_available = leaf.available - {best_token}
            return SplitNode(
                token=best_token,
                n_spam=leaf.n_spam,
                n_ham=leaf.n_ham,
                present=NodeStats(available=set(child_available)),
                absent=NodeStats(available=set(child_available)),
            )
        return None

    def node_count(self) -> int:
        count = 0
        stack = [self.root]
        while stack:
            node = stack.pop()
            count += 1
            if isinstance(node, SplitNode):
                stack.extend((node.present, node.absent))
        return count

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "config": {
                "delta": self.config.delta,
                "n_min": self.config.n_min,
                "tau": self.config.tau,
                "q": self.config.q,
            },
            "feature_pool": self.feature_pool,
            "root": _node_to_dict(self.root),
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, payload: str) -> "HoeffdingTree":
        data = json.loads(payload)
        if data.get("kind") != cls.kind:
            raise ValueError(f"not a Hoeffding tree model: kind={data.get('kind')!r}")
        cfg = data["config"]
        tree = cls(TreeConfig(delta=cfg["delta"], n_min=cfg["n_min"], tau=cfg["tau"], q=cfg["q"]))
        pool = data["feature_pool"]
        tree.feature_pool = list(pool) if pool is not None else None
        available = set(tree.feature_pool or ())
        tree.root = _node_from_dict(data["root"], available)
        return tree


def _node_to_dict(node) -> dict:
    if isinstance(node, SplitNode):
        return {
            "type": "split",
            "token": node.token,
            "n_spam": node.n_spam,
            "n_ham": node.n_ham,
            "present": _node_to_dict(node.present),
            "absent": _node_to_dict(node.absent),
        }
    return {
        "type": "leaf",
        "n_spam": node.n_spam,
        "n_ham": node.n_ham,
        "arrivals": node.arrivals,
        "feat": {token: list(cell) for token, cell in node.feat.items()},
    }


def _node_from_dict(data: dict, available: set):
    if data["type"] == "split":
        child_available = available - {data["token"]}
        return SplitNode(
            token=data["token"],
            n_spam=data["n_spam"],
            n_ham=data["n_ham"],
            present=_node_from_dict(data["present"], child_available),
            absent=_node_from_dict(data["absent"], child_available),
        )
    leaf = NodeStats(available=set(available))
    leaf.n_spam = data["n_spam"]
    leaf.n_ham = data["n_ham"]
    leaf.arrivals = data["arrivals"]
    leaf.feat = {token: [cell[0], cell[1]] for token, cell in data["feat"].items()}
    return leaf
