"""Round-trip guarantees shared by every model kind.

Each model must survive to_json/from_json with its predictions intact,
refuse payloads stamped with another model's kind, and keep functioning
as an incremental learner after restore.
"""

from __future__ import annotations

import json

import pytest
from conftest import tiny_corpus

from unlearn_lab.corpus import Document
from unlearn_lab.evaluate import MODEL_KINDS, make_model
from unlearn_lab.forest import IncrementalForest
from unlearn_lab.nb import NaiveBayes
from unlearn_lab.vfdt import HoeffdingTree

MODEL_CLASSES = {
    "nb": NaiveBayes,
    "vfdt": HoeffdingTree,
    "forest": IncrementalForest,
}

PROBES = [
    Document(9000, "win cash prize now"),
    Document(9001, "meeting agenda for the team"),
    Document(9002, "free offer click here"),
    Document(9003, "project report attached"),
    Document(9004, "completely unrelated words"),
]


def fitted_model(kind: str):
    model = make_model(kind, seed=5)
    model.fit_batch(tiny_corpus(60, 60, seed=5))
    return model


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_round_trip_preserves_predictions(kind):
    model = fitted_model(kind)
    restored = MODEL_CLASSES[kind].from_json(model.to_json())
    for probe in PROBES:
        assert restored.predict_label(probe) == model.predict_label(probe)


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_round_trip_is_stable(kind):
    # Serializing the restored model reproduces the payload byte for byte.
    payload = fitted_model(kind).to_json()
    assert MODEL_CLASSES[kind].from_json(payload).to_json() == payload


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_restored_model_keeps_learning(kind):
    model = fitted_model(kind)
    restored = MODEL_CLASSES[kind].from_json(model.to_json())
    extra = tiny_corpus(20, 20, seed=77, id_start=500)
    model.fit_batch(extra)
    restored.fit_batch(extra)
    for probe in PROBES:
        assert restored.predict_label(probe) == model.predict_label(probe)


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_payload_declares_kind(kind):
    assert json.loads(fitted_model(kind).to_json())["kind"] == kind


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_rejects_other_kinds(kind):
    payload = fitted_model(kind).to_json()
    for other, cls in MODEL_CLASSES.items():
        if other == kind:
            continue
        with pytest.raises(ValueError, match="kind"):
            cls.from_json(payload)


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_rejects_unstamped_payload(kind):
    with pytest.raises(ValueError):
        MODEL_CLASSES[kind].from_json(json.dumps({"weights": [1, 2, 3]}))


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_rejects_non_json(kind):
    with pytest.raises(json.JSONDecodeError):
        MODEL_CLASSES[kind].from_json("model: not json")


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_unfitted_model_round_trips(kind):
    model = make_model(kind, seed=5)
    restored = MODEL_CLASSES[kind].from_json(model.to_json())
    restored.fit_batch(tiny_corpus(30, 30, seed=9))
    model.fit_batch(tiny_corpus(30, 30, seed=9))
    for probe in PROBES:
        assert restored.predict_label(probe) == model.predict_label(probe)
