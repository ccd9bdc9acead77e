"""Evaluation: stage metrics around a pollution attack, and unlearn-vs-retrain timing.

The three-stage protocol fits a model on clean training data, measures it,
fits a pollution batch and measures again, then unlearns the batch and
measures a third time.  The timing benchmark designates part of a training
corpus as polluted and compares unlearning it against retraining from
scratch on the remainder.
"""
from __future__ import annotations

import copy
import random
import statistics
import time
from dataclasses import dataclass
from enum import Enum

from .attacks import AttackKind, AttackSpec, PollutionBatch, craft, promotional_test_set
from .corpus import Document, Label, SyntheticSpec, generate_synthetic, split_train_test
from .errors import EmptyTestSet
from .forest import ForestConfig, IncrementalForest
from .nb import NaiveBayes
from .vfdt import HoeffdingTree

MODEL_KINDS = ("nb", "vfdt", "forest")


@dataclass(frozen=True)
class Metrics:
    """Confusion counts and derived rates; Spam is the positive class.

    tpr / tnr are None when their denominator is zero (no positives or no
    negatives in the test set) rather than a fake 0.0.
    """

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / (self.tp + self.fp + self.tn + self.fn)

    @property
    def tpr(self) -> float | None:
        positives = self.tp + self.fn
        return self.tp / positives if positives else None

    @property
    def tnr(self) -> float | None:
        negatives = self.tn + self.fp
        return self.tn / negatives if negatives else None

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "tpr": self.tpr,
            "tnr": self.tnr,
        }


def evaluate(model, docs) -> Metrics:
    """Confusion metrics of a fitted model on a labeled test set."""
    docs = list(docs)
    if not docs:
        raise EmptyTestSet("evaluation needs at least one document")
    tp = fp = tn = fn = 0
    for doc in docs:
        if doc.label is None:
            raise ValueError(f"document {doc.doc_id} has no label")
        predicted = model.predict_label(doc)
        if doc.label is Label.SPAM:
            if predicted is Label.SPAM:
                tp += 1
            else:
                fn += 1
        else:
            if predicted is Label.SPAM:
                fp += 1
            else:
                tn += 1
    return Metrics(tp=tp, fp=fp, tn=tn, fn=fn)


class Stage(str, Enum):
    BEFORE_POLLUTION = "before_pollution"
    AFTER_POLLUTION = "after_pollution"
    AFTER_UNLEARNING = "after_unlearning"


@dataclass(frozen=True)
class StageReport:
    stage: Stage
    model_kind: str
    dataset: str
    metrics: Metrics

    def to_dict(self) -> dict:
        return {
            "stage": self.stage.value,
            "model_kind": self.model_kind,
            "dataset": self.dataset,
            "metrics": self.metrics.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StageReport":
        m = data["metrics"]
        return cls(
            stage=Stage(data["stage"]),
            model_kind=data["model_kind"],
            dataset=data["dataset"],
            metrics=Metrics(tp=m["tp"], fp=m["fp"], tn=m["tn"], fn=m["fn"]),
        )


@dataclass(frozen=True)
class UnlearnParams:
    magnitude: float = 1.0  # counter-training weight for the Hoeffding tree
    counter_scale: float | None = None  # alpha for the forest; None uses its config


def make_model(kind: str, seed: int = 0):
    if kind == "nb":
        return NaiveBayes()
    if kind == "vfdt":
        return HoeffdingTree()
    if kind == "forest":
        return IncrementalForest(ForestConfig(seed=seed))
    raise ValueError(f"unknown model kind: {kind!r} (expected one of {MODEL_KINDS})")


def evaluation_set(attack: AttackSpec | None, test_docs) -> list:
    """The documents a staged run is measured on.

    Camouflage runs are judged on promotional spam carrying the target
    token, since that is the mail the attack tries to flip; everything
    else uses the held-out test split unchanged.
    """
    test_docs = list(test_docs)
    if attack is not None and attack.kind is AttackKind.HAM_CAMOUFLAGE:
        spam_docs = [d for d in test_docs if d.label is Label.SPAM]
        base = max((d.doc_id for d in test_docs), default=0) + 1
        return promotional_test_set(spam_docs, attack.target_token, id_start=base)
    return test_docs


def fit_pollution(model, batch: PollutionBatch):
    """Fit a pollution batch into any model kind; returns the forest batch id."""
    if isinstance(model, IncrementalForest):
        return model.fit_batch(batch.docs)
    model.fit_batch(batch.docs)
    return None


def unlearn_pollution(model, batch: PollutionBatch, params: UnlearnParams, batch_id=None):
    if isinstance(model, NaiveBayes):
        model.unlearn_batch(batch.docs)
    elif isinstance(model, HoeffdingTree):
        model.unlearn_batch(batch.docs, magnitude=params.magnitude)
    else:
        model.unlearn_batch(batch.docs, batch_id=batch_id, alpha=params.counter_scale)


def run_three_stage(
    model_kind: str,
    docs,
    attack: AttackSpec,
    unlearn: UnlearnParams | None = None,
    seed: int = 42,
    train_fraction: float = 0.8,
    dataset: str = "",
) -> list[StageReport]:
    """Fit, pollute, unlearn; measure after each step.

    Returns one StageReport per stage, in order.  Deterministic for a
    fixed seed: the split, the attack, and every model update derive from
    it.
    """
    unlearn = unlearn or UnlearnParams()
    docs = list(docs)
    train, test = split_train_test(docs, train_fraction, seed)
    eval_docs = evaluation_set(attack, test)
    model = make_model(model_kind, seed)

    model.fit_batch(train)
    reports = [
        StageReport(Stage.BEFORE_POLLUTION, model_kind, dataset, evaluate(model, eval_docs))
    ]

    id_start = max(d.doc_id for d in docs) + 1
    batch = craft(attack, train, seed, id_start=id_start, victim_predict=model.predict_label)
    batch_id = fit_pollution(model, batch)
    reports.append(
        StageReport(Stage.AFTER_POLLUTION, model_kind, dataset, evaluate(model, eval_docs))
    )

    unlearn_pollution(model, batch, unlearn, batch_id=batch_id)
    reports.append(
        StageReport(Stage.AFTER_UNLEARNING, model_kind, dataset, evaluate(model, eval_docs))
    )
    return reports


@dataclass(frozen=True)
class TimingReport:
    model_kind: str
    pollution_size: str  # as requested, e.g. "1mail" or "10%"
    n_polluted: int
    retrain_seconds: float
    unlearn_seconds: float

    @property
    def speedup(self) -> float:
        return self.retrain_seconds / self.unlearn_seconds

    def to_dict(self) -> dict:
        return {
            "model_kind": self.model_kind,
            "pollution_size": self.pollution_size,
            "n_polluted": self.n_polluted,
            "retrain_seconds": self.retrain_seconds,
            "unlearn_seconds": self.unlearn_seconds,
            "speedup": self.speedup,
        }


def parse_size(label: str, n_train: int) -> int:
    """Turn a pollution-size label ("1mail", "10%", "0.3") into a document count."""
    text = str(label).strip().lower()
    if text in ("1mail", "1 mail"):
        return 1
    if text.endswith("%"):
        fraction = float(text[:-1]) / 100.0
    else:
        fraction = float(text)
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"pollution size must be in (0, 1): {label!r}")
    count = round(n_train * fraction)
    if count < 1:
        raise ValueError(f"pollution size {label!r} selects no documents at n_train={n_train}")
    return count


def bench_corpus_spec(n_train: int, seed: int) -> SyntheticSpec:
    return SyntheticSpec(n_docs=n_train, spam_fraction=0.4, seed=seed)


def _copy_for_unlearn(model):
    # forest trees are immutable once grown and unlearning only appends,
    # so a shallow fork is enough there; the others get a deep copy
    if isinstance(model, IncrementalForest):
        fork = IncrementalForest(model.config)
        fork.trees = list(model.trees)
        fork.batch_log = [dict(e) for e in model.batch_log]
        fork._next_batch_id = model._next_batch_id
        return fork
    return copy.deepcopy(model)


def _median_seconds(fn, repeats: int) -> float:
    fn()  # warm-up, not recorded
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def bench_unlearn_vs_retrain(
    model_kind: str,
    n_train: int = 10000,
    sizes=("1mail", "1%", "10%", "30%"),
    seed: int = 42,
    repeats: int = 5,
    unlearn: UnlearnParams | None = None,
    corpus=None,
) -> list[TimingReport]:
    """Median wall-clock cost of unlearning pollution versus retraining without it.

    For each size, that many training documents are designated polluted
    (their labels flipped in place), a model is fitted on the full mixed
    corpus, and two recoveries are timed: unlearning the polluted batch,
    and retraining from scratch on the clean remainder.  Medians are taken
    over `repeats` runs after one warm-up.
    """
    if n_train < 1000:
        raise ValueError("benchmark needs n_train >= 1000")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    unlearn = unlearn or UnlearnParams()
    if corpus is None:
        corpus = generate_synthetic(bench_corpus_spec(n_train, seed))
    else:
        corpus = list(corpus)
        n_train = len(corpus)
    rng = random.Random(seed)

    reports = []
    for size_label in sizes:
        n_polluted = parse_size(size_label, n_train)
        polluted_pos = set(rng.sample(range(n_train), n_polluted))
        polluted_docs = [
            Document(d.doc_id, d.text, d.label.flipped())
            for i, d in enumerate(corpus)
            if i in polluted_pos
        ]
        clean_rest = [d for i, d in enumerate(corpus) if i not in polluted_pos]
        mixed = [
            Document(d.doc_id, d.text, d.label.flipped()) if i in polluted_pos else d
            for i, d in enumerate(corpus)
        ]

        base_model = make_model(model_kind, seed)
        base_model.fit_batch(mixed)

        def run_retrain():
            fresh = make_model(model_kind, seed)
            fresh.fit_batch(clean_rest)

        def run_unlearn():
            fork = _copy_for_unlearn(base_model)
            start = time.perf_counter()
            unlearn_pollution(fork, _as_batch(polluted_docs), unlearn)
            return time.perf_counter() - start

        retrain_seconds = _median_seconds(run_retrain, repeats)
        # the fork is setup, not unlearning, so time inside the runner
        run_unlearn()  # warm-up
        unlearn_seconds = statistics.median(run_unlearn() for _ in range(repeats))

        reports.append(
            TimingReport(
                model_kind=model_kind,
                pollution_size=str(size_label),
                n_polluted=n_polluted,
                retrain_seconds=retrain_seconds,
                unlearn_seconds=unlearn_seconds,
            )
        )
    return reports


def _as_batch(docs) -> PollutionBatch:
    return PollutionBatch(
        attack_kind=AttackKind.LABEL_FLIP,
        seed=0,
        params={},
        docs=list(docs),
        manifest={},
    )


def render_timing_table(reports) -> str:
    """Aligned text table of timing results, one row per pollution size."""
    headers = ("Unlearning size", "Retrain speed", "Unlearn speed", "Speed up")
    rows = [
        (
            _display_size(r.pollution_size),
            f"{r.retrain_seconds:.4g} sec",
            f"{r.unlearn_seconds:.4g} sec",
            f"{r.speedup:.2f} x",
        )
        for r in reports
    ]
    return _align(headers, rows)


def render_stage_table(reports) -> str:
    """Aligned text table of stage metrics."""
    headers = ("Stage", "Accuracy", "TPR", "TNR")
    rows = [
        (
            r.stage.value if isinstance(r.stage, Stage) else str(r.stage),
            f"{r.metrics.accuracy:.4f}",
            _rate(r.metrics.tpr),
            _rate(r.metrics.tnr),
        )
        for r in reports
    ]
    return _align(headers, rows)


def _rate(value) -> str:
    return f"{value:.4f}" if value is not None else "-"


def _display_size(label: str) -> str:
    return "1 mail" if label.strip().lower() in ("1mail", "1 mail") else label


def _align(headers, rows) -> str:
    table = [tuple(str(c) for c in row) for row in [headers, *rows]]
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in table]
    return "\n".join(lines)
