"""Seeded data-pollution generators.

Each attack is a pure function from clean documents and a seed to a
PollutionBatch: the polluted documents plus a manifest describing exactly
what was crafted.  The batch is what a model fits during the pollution
stage and what an unlearning operation later consumes, so it round-trips
through JSON unchanged.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from enum import Enum

from .corpus import Document, Label, tokenize, vocabulary

# How much pollution an attack produces when no explicit size is given.
DEFAULT_POLLUTION_FRACTION = 0.05
DEFAULT_CRAFTED_TOKENS = 3


class AttackKind(str, Enum):
    FEATURE_INJECTION = "feature_injection"
    HAM_CAMOUFLAGE = "ham_camouflage"
    LABEL_FLIP = "label_flip"


@dataclass
class PollutionBatch:
    """Polluted documents plus the manifest needed to undo them later."""

    attack_kind: AttackKind
    seed: int
    params: dict
    docs: list
    manifest: dict

    def to_json(self) -> str:
        payload = {
            "attack_kind": self.attack_kind.value,
            "seed": self.seed,
            "params": self.params,
            "manifest": self.manifest,
            "docs": [
                {"doc_id": d.doc_id, "text": d.text, "label": int(d.label)} for d in self.docs
            ],
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, payload: str) -> "PollutionBatch":
        data = json.loads(payload)
        return cls(
            attack_kind=AttackKind(data["attack_kind"]),
            seed=data["seed"],
            params=data["params"],
            manifest=data["manifest"],
            docs=[
                Document(doc_id=d["doc_id"], text=d["text"], label=Label(d["label"]))
                for d in data["docs"]
            ],
        )


def _next_doc_id(docs, id_start):
    if id_start is not None:
        return id_start
    return max(d.doc_id for d in docs) + 1


def craft_feature_injection(
    clean_spam,
    n_polluted: int,
    n_crafted_tokens: int = DEFAULT_CRAFTED_TOKENS,
    seed: int = 0,
    *,
    avoid_tokens=None,
    id_start: int | None = None,
    victim_predict=None,
) -> PollutionBatch:
    """Spam mails that tie real spam content to freshly crafted tokens.

    Every polluted document is a sampled clean spam document's text plus
    all crafted tokens, labeled Spam.  Crafted tokens are derived from the
    seed and checked against avoid_tokens (pass the whole clean corpus
    vocabulary; defaults to the clean_spam vocabulary); colliding
    candidates are regenerated.  When victim_predict is given, only
    documents the victim already calls Spam are kept, mimicking an
    attacker who must slip mails past the filter being poisoned.
    """
    clean_spam = list(clean_spam)
    if not clean_spam:
        raise ValueError("clean_spam must be non-empty")
    if n_polluted < 1:
        raise ValueError("n_polluted must be at least 1")
    if n_crafted_tokens < 1:
        raise ValueError("n_crafted_tokens must be at least 1")
    avoid = set(avoid_tokens) if avoid_tokens is not None else vocabulary(clean_spam)

    crafted: list[str] = []
    candidate = 0
    while len(crafted) < n_crafted_tokens:
        token = f"zz{seed & 0xFFFFFFFF:08x}{candidate}"
        candidate += 1
        if token not in avoid:
            crafted.append(token)

    rng = random.Random(seed)
    suffix = " " + " ".join(crafted)
    base_id = _next_doc_id(clean_spam, id_start)
    docs = []
    for offset in range(n_polluted):
        source = rng.choice(clean_spam)
        docs.append(Document(base_id + offset, source.text + suffix, Label.SPAM))
    if victim_predict is not None:
        docs = [d for d in docs if victim_predict(d) is Label.SPAM]
    return PollutionBatch(
        attack_kind=AttackKind.FEATURE_INJECTION,
        seed=seed,
        params={"n_polluted": n_polluted, "n_crafted_tokens": n_crafted_tokens},
        docs=docs,
        manifest={"crafted_tokens": crafted},
    )


def craft_ham_camouflage(
    target_token: str,
    template_ham,
    n_polluted: int,
    seed: int = 0,
    *,
    id_start: int | None = None,
) -> PollutionBatch:
    """Ham mails that associate a target token with the Ham class.

    Every polluted document is a sampled ham document's text plus the
    target token, labeled Ham.  Fitting enough of these teaches a tree
    that mail carrying the target token is Ham, camouflaging spam that
    includes it.
    """
    normalized = tokenize(target_token)
    if len(normalized) != 1:
        raise ValueError(f"target_token must normalize to exactly one token: {target_token!r}")
    target = next(iter(normalized))
    template_ham = list(template_ham)
    if not template_ham:
        raise ValueError("template_ham must be non-empty")
    if n_polluted < 1:
        raise ValueError("n_polluted must be at least 1")

    rng = random.Random(seed)
    base_id = _next_doc_id(template_ham, id_start)
    docs = []
    for offset in range(n_polluted):
        source = rng.choice(template_ham)
        docs.append(Document(base_id + offset, source.text + " " + target, Label.HAM))
    return PollutionBatch(
        attack_kind=AttackKind.HAM_CAMOUFLAGE,
        seed=seed,
        params={"n_polluted": n_polluted, "target_token": target},
        docs=docs,
        manifest={"target_token": target},
    )


def craft_label_flip(
    clean,
    fraction: float,
    seed: int = 0,
    *,
    id_start: int | None = None,
) -> PollutionBatch:
    """Copies of ceil(fraction * len(clean)) sampled documents with flipped labels."""
    clean = list(clean)
    if not clean:
        raise ValueError("clean must be non-empty")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n_flipped = math.ceil(fraction * len(clean))
    rng = random.Random(seed)
    sample = rng.sample(clean, n_flipped)
    base_id = _next_doc_id(clean, id_start)
    docs = []
    for offset, source in enumerate(sample):
        if source.label is None:
            raise ValueError(f"document {source.doc_id} has no label")
        docs.append(Document(base_id + offset, source.text, source.label.flipped()))
    return PollutionBatch(
        attack_kind=AttackKind.LABEL_FLIP,
        seed=seed,
        params={"fraction": fraction},
        docs=docs,
        manifest={"source_doc_ids": [d.doc_id for d in sample]},
    )


def promotional_test_set(spam_docs, target_token: str, id_start: int = 0) -> list:
    """Promotional spam carrying the camouflage target: each spam document's
    text plus the target token, labeled Spam.  This is the set a camouflage
    attack tries to sneak past the filter."""
    normalized = tokenize(target_token)
    if len(normalized) != 1:
        raise ValueError(f"target_token must normalize to exactly one token: {target_token!r}")
    target = next(iter(normalized))
    spam_docs = list(spam_docs)
    if not spam_docs:
        raise ValueError("spam_docs must be non-empty")
    return [
        Document(id_start + i, doc.text + " " + target, Label.SPAM)
        for i, doc in enumerate(spam_docs)
    ]


@dataclass(frozen=True)
class AttackSpec:
    """Declarative attack description, as carried in run configs."""

    kind: AttackKind
    n_polluted: int | None = None  # None: 5% of the training set
    n_crafted_tokens: int = DEFAULT_CRAFTED_TOKENS
    target_token: str = "zzmart"
    fraction: float = 0.2
    strict_self_label: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n_polluted": self.n_polluted,
            "n_crafted_tokens": self.n_crafted_tokens,
            "target_token": self.target_token,
            "fraction": self.fraction,
            "strict_self_label": self.strict_self_label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AttackSpec":
        return cls(
            kind=AttackKind(data["kind"]),
            n_polluted=data.get("n_polluted"),
            n_crafted_tokens=data.get("n_crafted_tokens", DEFAULT_CRAFTED_TOKENS),
            target_token=data.get("target_token", "zzmart"),
            fraction=data.get("fraction", 0.2),
            strict_self_label=data.get("strict_self_label", False),
        )


def craft(
    spec: AttackSpec,
    train_docs,
    seed: int,
    *,
    id_start: int | None = None,
    victim_predict=None,
) -> PollutionBatch:
    """Instantiate an attack spec against a training corpus."""
    train_docs = list(train_docs)
    n_polluted = spec.n_polluted
    if n_polluted is None:
        n_polluted = max(1, round(DEFAULT_POLLUTION_FRACTION * len(train_docs)))
    if id_start is None:
        id_start = _next_doc_id(train_docs, None)

    if spec.kind is AttackKind.FEATURE_INJECTION:
        clean_spam = [d for d in train_docs if d.label is Label.SPAM]
        return craft_feature_injection(
            clean_spam,
            n_polluted,
            spec.n_crafted_tokens,
            seed,
            avoid_tokens=vocabulary(train_docs),
            id_start=id_start,
            victim_predict=victim_predict if spec.strict_self_label else None,
        )
    if spec.kind is AttackKind.HAM_CAMOUFLAGE:
        template_ham = [d for d in train_docs if d.label is Label.HAM]
        return craft_ham_camouflage(
            spec.target_token, template_ham, n_polluted, seed, id_start=id_start
        )
    if spec.kind is AttackKind.LABEL_FLIP:
        return craft_label_flip(train_docs, spec.fraction, seed, id_start=id_start)
    raise ValueError(f"unknown attack kind: {spec.kind}")
