"""Command-line front end for training, polluting, unlearning, and benchmarking.

Artifacts are plain JSON files written into an output directory together with
a ``manifest.json`` index, so a full experiment (train, pollute, unlearn,
retrain, bench, report) can be replayed or scripted in CI.  A TOML config file
and command-line flags describe the same RunConfig; flags win on conflict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .attacks import AttackKind, AttackSpec, PollutionBatch, craft
from .corpus import (
    Document,
    Label,
    SyntheticSpec,
    generate_synthetic,
    load_csv,
    split_train_test,
)
from .errors import MissingArtifact, UnlearnLabError
from .evaluate import (
    MODEL_KINDS,
    Stage,
    StageReport,
    UnlearnParams,
    bench_unlearn_vs_retrain,
    evaluate,
    evaluation_set,
    fit_pollution,
    make_model,
    render_stage_table,
    render_timing_table,
    unlearn_pollution,
)
from .forest import IncrementalForest
from .nb import NaiveBayes
from .vfdt import HoeffdingTree

DEFAULT_SEED = 42
SEED_ENV_VAR = "UNLEARN_LAB_SEED"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING_ARTIFACT = 3
EXIT_DATA = 4

DEFAULT_SIZES = "1mail,1%,10%,30%"

_SYNTHETIC_KEYS = (
    "n_docs",
    "spam_fraction",
    "vocab_size_spam",
    "vocab_size_ham",
    "vocab_size_shared",
    "tokens_per_doc_min",
    "tokens_per_doc_max",
    "seed",
)
_SYNTHETIC_FLOAT_KEYS = frozenset({"spam_fraction"})

_MODEL_CLASSES = {
    "nb": NaiveBayes,
    "vfdt": HoeffdingTree,
    "forest": IncrementalForest,
}

_STAGE_FILES = {
    Stage.BEFORE_POLLUTION: "report_before_pollution.json",
    Stage.AFTER_POLLUTION: "report_after_pollution.json",
    Stage.AFTER_UNLEARNING: "report_after_unlearning.json",
}


class ConfigError(UnlearnLabError):
    """Bad usage or configuration; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Run configuration


@dataclass
class CsvSource:
    path: str
    text_column: str = "text"
    label_column: str = "label"
    spam_value: str = "spam"

    def to_dict(self) -> dict[str, str]:
        return {
            "path": self.path,
            "text_column": self.text_column,
            "label_column": self.label_column,
            "spam_value": self.spam_value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CsvSource":
        return cls(
            path=str(data["path"]),
            text_column=str(data.get("text_column", "text")),
            label_column=str(data.get("label_column", "label")),
            spam_value=str(data.get("spam_value", "spam")),
        )


@dataclass
class RunConfig:
    """Everything needed to replay a run; flags mirror these fields."""

    model: str = "nb"
    seed: int = DEFAULT_SEED
    train_fraction: float = 0.8
    out: str = "runs/latest"
    synthetic: SyntheticSpec | None = None
    csv: CsvSource | None = None
    attack: AttackSpec | None = None
    unlearn: UnlearnParams = field(default_factory=UnlearnParams)

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "seed": self.seed,
            "train_fraction": self.train_fraction,
            "out": self.out,
            "synthetic": _synthetic_to_dict(self.synthetic),
            "csv": self.csv.to_dict() if self.csv is not None else None,
            "attack": self.attack.to_dict() if self.attack is not None else None,
            "unlearn": {
                "magnitude": self.unlearn.magnitude,
                "alpha": self.unlearn.counter_scale,
            },
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        unlearn_data = data.get("unlearn") or {}
        return cls(
            model=str(data.get("model", "nb")),
            seed=int(data.get("seed", DEFAULT_SEED)),
            train_fraction=float(data.get("train_fraction", 0.8)),
            out=str(data.get("out", "runs/latest")),
            synthetic=_synthetic_from_dict(data.get("synthetic")),
            csv=CsvSource.from_dict(data["csv"]) if data.get("csv") else None,
            attack=AttackSpec.from_dict(data["attack"]) if data.get("attack") else None,
            unlearn=UnlearnParams(
                magnitude=float(unlearn_data.get("magnitude", 1.0)),
                counter_scale=(
                    None
                    if unlearn_data.get("alpha") is None
                    else float(unlearn_data["alpha"])
                ),
            ),
        )


def _synthetic_to_dict(spec: SyntheticSpec | None) -> dict[str, Any] | None:
    if spec is None:
        return None
    return {key: getattr(spec, key) for key in _SYNTHETIC_KEYS}


def _synthetic_from_dict(data: dict[str, Any] | None) -> SyntheticSpec | None:
    if data is None:
        return None
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        name = "n_docs" if key == "n" else key
        if name not in _SYNTHETIC_KEYS:
            raise ConfigError(f"unknown synthetic key: {key!r}")
        kwargs[name] = float(value) if name in _SYNTHETIC_FLOAT_KEYS else int(value)
    if "n_docs" not in kwargs:
        raise ConfigError("synthetic spec needs n_docs (or n=...)")
    try:
        return SyntheticSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"bad synthetic spec: {exc}") from exc


def parse_synthetic_flag(text: str) -> dict[str, Any]:
    """Parse ``k=v,k=v`` synthetic shorthand (``n`` aliases ``n_docs``)."""
    out: dict[str, Any] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise ConfigError(f"bad synthetic entry {part!r}, expected key=value")
        key = key.strip()
        name = "n_docs" if key == "n" else key
        if name not in _SYNTHETIC_KEYS:
            raise ConfigError(f"unknown synthetic key: {key!r}")
        try:
            out[name] = (
                float(value.strip())
                if name in _SYNTHETIC_FLOAT_KEYS
                else int(value.strip())
            )
        except ValueError as exc:
            raise ConfigError(f"bad synthetic value {part!r}") from exc
    if not out:
        raise ConfigError("empty synthetic spec")
    return out


# ---------------------------------------------------------------------------
# Config resolution: TOML file merged with flags, flags winning


def _load_toml(path: str) -> dict[str, Any]:
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"config file not found: {config_path}")
    try:
        with open(config_path, "rb") as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad TOML in {config_path}: {exc}") from exc


def resolve_seed(flag_seed: int | None, config_seed: int | None) -> int:
    """Flag beats config file beats UNLEARN_LAB_SEED beats the default."""
    if flag_seed is not None:
        return flag_seed
    if config_seed is not None:
        return config_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"bad {SEED_ENV_VAR} value: {env!r}") from exc
    return DEFAULT_SEED


def _attack_from_parts(
    data: dict[str, Any], base: AttackSpec | None
) -> AttackSpec | None:
    """Overlay attack settings from one source on top of another."""
    if not data and base is None:
        return None
    kind_value = data.get("kind")
    if kind_value is None:
        if base is None:
            raise ConfigError("attack settings given without an attack kind")
        kind = base.kind
    else:
        try:
            kind = AttackKind(str(kind_value))
        except ValueError as exc:
            names = ", ".join(k.value for k in AttackKind)
            raise ConfigError(
                f"unknown attack {kind_value!r}, expected one of: {names}"
            ) from exc
    merged = base if base is not None else AttackSpec(kind=kind)
    merged = replace(merged, kind=kind)
    if "n_polluted" in data and data["n_polluted"] is not None:
        merged = replace(merged, n_polluted=int(data["n_polluted"]))
    if "n_crafted_tokens" in data and data["n_crafted_tokens"] is not None:
        merged = replace(merged, n_crafted_tokens=int(data["n_crafted_tokens"]))
    if "target_token" in data and data["target_token"] is not None:
        merged = replace(merged, target_token=str(data["target_token"]))
    if "fraction" in data and data["fraction"] is not None:
        merged = replace(merged, fraction=float(data["fraction"]))
    if "strict_self_label" in data and data["strict_self_label"] is not None:
        merged = replace(merged, strict_self_label=bool(data["strict_self_label"]))
    return merged


def _attack_flags_dict(args: argparse.Namespace) -> dict[str, Any]:
    data: dict[str, Any] = {}
    if getattr(args, "attack", None) is not None:
        data["kind"] = args.attack
    for key in ("n_polluted", "n_crafted_tokens", "target_token", "fraction"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if getattr(args, "strict_self_label", False):
        data["strict_self_label"] = True
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Build a RunConfig from the TOML file (if any) with flags on top."""
    toml_data: dict[str, Any] = {}
    if getattr(args, "config", None):
        toml_data = _load_toml(args.config)

    seed = resolve_seed(getattr(args, "seed", None), toml_data.get("seed"))

    model = getattr(args, "model", None) or toml_data.get("model") or "nb"
    if model not in MODEL_KINDS:
        raise ConfigError(f"unknown model {model!r}, expected one of: nb, vfdt, forest")

    train_fraction = getattr(args, "train_fraction", None)
    if train_fraction is None:
        train_fraction = float(toml_data.get("train_fraction", 0.8))
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError("train_fraction must be in (0, 1)")

    out = getattr(args, "out", None) or toml_data.get("out") or "runs/latest"

    # Data source: flags win wholesale over the config file.
    synthetic_flag = getattr(args, "synthetic", None)
    csv_flag = getattr(args, "csv", None)
    if synthetic_flag is not None and csv_flag is not None:
        raise ConfigError("choose one data source: --synthetic or --csv")
    synthetic: SyntheticSpec | None = None
    csv: CsvSource | None = None
    if synthetic_flag is not None:
        kv = parse_synthetic_flag(synthetic_flag)
        kv.setdefault("seed", seed)
        synthetic = _synthetic_from_dict(kv)
    elif csv_flag is not None:
        csv = CsvSource(
            path=csv_flag,
            text_column=getattr(args, "text_column", None) or "text",
            label_column=getattr(args, "label_column", None) or "label",
            spam_value=getattr(args, "spam_value", None) or "spam",
        )
    else:
        toml_synth = toml_data.get("synthetic")
        toml_csv = toml_data.get("csv")
        if toml_synth is not None and toml_csv is not None:
            raise ConfigError("config file declares both [synthetic] and [csv]")
        if toml_synth is not None:
            kv = dict(toml_synth)
            kv.setdefault("seed", seed)
            synthetic = _synthetic_from_dict(kv)
        elif toml_csv is not None:
            if "path" not in toml_csv:
                raise ConfigError("[csv] section needs a path")
            csv = CsvSource.from_dict(toml_csv)
        # CSV column flags refine a TOML csv source.
        if csv is not None:
            if getattr(args, "text_column", None):
                csv.text_column = args.text_column
            if getattr(args, "label_column", None):
                csv.label_column = args.label_column
            if getattr(args, "spam_value", None):
                csv.spam_value = args.spam_value

    attack = _attack_from_parts(toml_data.get("attack") or {}, None)
    attack = _attack_from_parts(_attack_flags_dict(args), attack)

    unlearn_toml = toml_data.get("unlearn") or {}
    magnitude = getattr(args, "magnitude", None)
    if magnitude is None:
        magnitude = float(unlearn_toml.get("magnitude", 1.0))
    alpha = getattr(args, "alpha", None)
    if alpha is None:
        alpha = unlearn_toml.get("alpha")
    unlearn = UnlearnParams(
        magnitude=float(magnitude),
        counter_scale=None if alpha is None else float(alpha),
    )
    if unlearn.magnitude <= 0.0:
        raise ConfigError("unlearn magnitude must be positive")
    if unlearn.counter_scale is not None and unlearn.counter_scale < 0.0:
        raise ConfigError("alpha must be >= 0")

    return RunConfig(
        model=model,
        seed=seed,
        train_fraction=train_fraction,
        out=str(out),
        synthetic=synthetic,
        csv=csv,
        attack=attack,
        unlearn=unlearn,
    )


# ---------------------------------------------------------------------------
# Artifact store


def _manifest_path(out_dir: Path) -> Path:
    return out_dir / "manifest.json"


def _read_manifest(out_dir: Path) -> dict[str, str]:
    path = _manifest_path(out_dir)
    if not path.is_file():
        return {}
    data = json.loads(path.read_text(encoding="utf-8"))
    return dict(data.get("artifacts", {}))


def write_artifact(out_dir: Path, filename: str, text: str) -> Path:
    """Write one artifact file and record it in the manifest index."""
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / filename
    path.write_text(text, encoding="utf-8")
    artifacts = _read_manifest(out_dir)
    artifacts[filename.rsplit(".", 1)[0]] = filename
    manifest = {"artifacts": dict(sorted(artifacts.items()))}
    _manifest_path(out_dir).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def read_artifact(out_dir: Path, filename: str) -> str:
    path = out_dir / filename
    if not path.is_file():
        raise MissingArtifact(str(path))
    return path.read_text(encoding="utf-8")


def _dump_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def save_model(out_dir: Path, model) -> None:
    write_artifact(out_dir, "model.json", model.to_json() + "\n")


def load_model(out_dir: Path):
    text = read_artifact(out_dir, "model.json")
    kind = json.loads(text).get("kind")
    cls = _MODEL_CLASSES.get(kind)
    if cls is None:
        raise ConfigError(f"model.json has unknown kind {kind!r}")
    return cls.from_json(text)


def save_run_config(out_dir: Path, config: RunConfig) -> None:
    write_artifact(out_dir, "run_config.json", _dump_json(config.to_dict()))


def load_run_config(out_dir: Path) -> RunConfig:
    return RunConfig.from_dict(json.loads(read_artifact(out_dir, "run_config.json")))


def save_stage_report(out_dir: Path, report: StageReport) -> None:
    write_artifact(out_dir, _STAGE_FILES[report.stage], _dump_json(report.to_dict()))


# ---------------------------------------------------------------------------
# Shared run plumbing


def load_corpus(config: RunConfig) -> tuple[list[Document], str]:
    """Materialize the configured data source; returns (docs, dataset tag)."""
    if config.synthetic is not None:
        spec = config.synthetic
        tag = f"synthetic(n={spec.n_docs}, seed={spec.seed})"
        return generate_synthetic(spec), tag
    if config.csv is not None:
        src = config.csv
        path = Path(src.path)
        if not path.is_file():
            raise ConfigError(f"csv file not found: {path}")
        result = load_csv(
            path,
            text_column=src.text_column,
            label_column=src.label_column,
            spam_value=src.spam_value,
        )
        if result.n_skipped:
            print(
                f"warning: skipped {result.n_skipped} malformed csv row(s)",
                file=sys.stderr,
            )
        return result.docs, path.name
    raise ConfigError("no data source: give --synthetic, --csv, or a config file")


def _train_test(config: RunConfig) -> tuple[list[Document], list[Document], str]:
    docs, tag = load_corpus(config)
    train, test = split_train_test(docs, config.train_fraction, config.seed)
    return train, test, tag


def _stage_metrics(
    config: RunConfig,
    model,
    test_docs: Sequence[Document],
    stage: Stage,
    dataset: str,
) -> StageReport:
    eval_docs = evaluation_set(config.attack, test_docs)
    return StageReport(
        stage=stage,
        model_kind=config.model,
        dataset=dataset,
        metrics=evaluate(model, eval_docs),
    )


def _next_doc_id(docs: Sequence[Document]) -> int:
    return max((doc.doc_id for doc in docs), default=-1) + 1


def _forest_batch_id(model, batch: PollutionBatch) -> int | None:
    """Recover the fit batch id for these docs from the forest's batch log."""
    if not isinstance(model, IncrementalForest):
        return None
    wanted = sorted(doc.doc_id for doc in batch.docs)
    for entry in reversed(model.batch_log):
        if entry["kind"] == "fit" and sorted(entry["doc_ids"]) == wanted:
            return int(entry["id"])
    return None


# ---------------------------------------------------------------------------
# Subcommands


def cmd_train(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    train, test, tag = _train_test(config)
    model = make_model(config.model, seed=config.seed)
    model.fit_batch(train)

    out_dir = Path(config.out)
    report = _stage_metrics(config, model, test, Stage.BEFORE_POLLUTION, tag)
    save_run_config(out_dir, config)
    save_model(out_dir, model)
    save_stage_report(out_dir, report)
    print(render_stage_table([report]))
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    out_dir = Path(args.out or "runs/latest")
    model = load_model(out_dir)
    if args.text:
        docs = [Document(doc_id=i, text=t) for i, t in enumerate(args.text)]
    elif args.csv:
        path = Path(args.csv)
        if not path.is_file():
            raise ConfigError(f"csv file not found: {path}")
        result = load_csv(
            path,
            text_column=args.text_column or "text",
            label_column=args.label_column or "label",
            spam_value=args.spam_value or "spam",
        )
        docs = result.docs
    else:
        raise ConfigError("predict needs --text or --csv")

    rows = []
    for doc in docs:
        label = model.predict_label(doc)
        row: dict[str, Any] = {
            "doc_id": doc.doc_id,
            "label": int(label),
            "label_name": "spam" if label is Label.SPAM else "ham",
        }
        if isinstance(model, NaiveBayes):
            row["log_odds_spam"] = model.predict(doc).log_odds_spam
        elif isinstance(model, IncrementalForest):
            vote = model.predict(doc)
            row["spam_votes"] = vote.spam_votes
            row["ham_votes"] = vote.ham_votes
        rows.append(row)

    payload = _dump_json(rows)
    write_artifact(out_dir, "predictions.json", payload)
    print(payload, end="")
    return EXIT_OK


def cmd_pollute(args: argparse.Namespace) -> int:
    out_dir = Path(args.out or "runs/latest")
    config = load_run_config(out_dir)
    model = load_model(out_dir)

    flag_attack = _attack_flags_dict(args)
    attack = _attack_from_parts(flag_attack, config.attack)
    if attack is None:
        raise ConfigError("no attack configured: pass --attack or set it at train time")
    config.attack = attack
    if args.seed is not None:
        config.seed = args.seed

    train, test, tag = _train_test(config)
    batch = craft(
        attack,
        train,
        seed=config.seed,
        id_start=_next_doc_id(train + test),
        victim_predict=model.predict_label,
    )
    fit_pollution(model, batch)

    report = _stage_metrics(config, model, test, Stage.AFTER_POLLUTION, tag)
    save_run_config(out_dir, config)
    write_artifact(out_dir, "pollution.json", batch.to_json() + "\n")
    save_model(out_dir, model)
    save_stage_report(out_dir, report)
    print(render_stage_table([report]))
    return EXIT_OK


def cmd_unlearn(args: argparse.Namespace) -> int:
    out_dir = Path(args.out or "runs/latest")
    config = load_run_config(out_dir)
    model = load_model(out_dir)
    batch = PollutionBatch.from_json(read_artifact(out_dir, "pollution.json"))

    params = config.unlearn
    if args.magnitude is not None:
        params = replace(params, magnitude=args.magnitude)
    if args.alpha is not None:
        params = replace(params, counter_scale=args.alpha)
    config.unlearn = params

    unlearn_pollution(model, batch, params, batch_id=_forest_batch_id(model, batch))

    _, test, tag = _train_test(config)
    report = _stage_metrics(config, model, test, Stage.AFTER_UNLEARNING, tag)
    save_run_config(out_dir, config)
    save_model(out_dir, model)
    save_stage_report(out_dir, report)
    print(render_stage_table([report]))
    return EXIT_OK


def cmd_retrain(args: argparse.Namespace) -> int:
    out_dir = Path(args.out or "runs/latest")
    config = load_run_config(out_dir)
    train, test, tag = _train_test(config)

    excluded: set[int] = set()
    pollution_path = out_dir / "pollution.json"
    if pollution_path.is_file():
        batch = PollutionBatch.from_json(pollution_path.read_text(encoding="utf-8"))
        excluded = {doc.doc_id for doc in batch.docs}
    clean_train = [doc for doc in train if doc.doc_id not in excluded]

    model = make_model(config.model, seed=config.seed)
    model.fit_batch(clean_train)

    eval_docs = evaluation_set(config.attack, test)
    metrics = evaluate(model, eval_docs)
    payload = {
        "stage": "retrained",
        "model_kind": config.model,
        "dataset": tag,
        "excluded_docs": len(excluded),
        "metrics": metrics.to_dict(),
    }
    write_artifact(out_dir, "model_retrained.json", model.to_json() + "\n")
    write_artifact(out_dir, "report_retrained.json", _dump_json(payload))
    print(f"retrained {config.model} on {len(clean_train)} docs "
          f"(excluded {len(excluded)}): accuracy={metrics.accuracy:.4f}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed, None)
    sizes = tuple(s.strip() for s in args.sizes.split(",") if s.strip())
    if not sizes:
        raise ConfigError("empty --sizes")
    kinds = list(MODEL_KINDS) if args.model == "all" else [args.model]

    blocks: list[str] = []
    reports_payload: list[dict[str, Any]] = []
    for kind in kinds:
        reports = bench_unlearn_vs_retrain(
            kind,
            n_train=args.n_train,
            sizes=sizes,
            seed=seed,
            repeats=args.repeats,
        )
        table = render_timing_table(reports)
        blocks.append(f"model: {kind}\n{table}")
        reports_payload.extend(r.to_dict() for r in reports)

    text = "\n\n".join(blocks) + "\n"
    print(text, end="")
    if args.out:
        out_dir = Path(args.out)
        write_artifact(out_dir, "timings.json", _dump_json(reports_payload))
        write_artifact(out_dir, "timings.txt", text)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    out_dir = Path(args.out or "runs/latest")
    reports: list[StageReport] = []
    for stage in Stage:
        path = out_dir / _STAGE_FILES[stage]
        if path.is_file():
            reports.append(
                StageReport.from_dict(json.loads(path.read_text(encoding="utf-8")))
            )
    if not reports:
        raise MissingArtifact(str(out_dir / _STAGE_FILES[Stage.BEFORE_POLLUTION]))

    lines = [render_stage_table(reports)]
    retrained_path = out_dir / "report_retrained.json"
    if retrained_path.is_file():
        data = json.loads(retrained_path.read_text(encoding="utf-8"))
        metrics = data.get("metrics", {})
        acc = metrics.get("accuracy")
        acc_text = "n/a" if acc is None else f"{100.0 * acc:.2f}%"
        lines.append(f"retrained from scratch: accuracy {acc_text}")
    text = "\n".join(lines) + "\n"
    write_artifact(out_dir, "stages.txt", text)
    print(text, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output directory for artifacts")
    parser.add_argument("--seed", type=int, help="random seed (flag > config > env)")


def _add_source_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--synthetic",
        metavar="K=V[,K=V...]",
        help="synthetic corpus spec, e.g. n=1000,spam_fraction=0.4",
    )
    parser.add_argument("--csv", help="path to a csv corpus")
    parser.add_argument("--text-column", dest="text_column")
    parser.add_argument("--label-column", dest="label_column")
    parser.add_argument("--spam-value", dest="spam_value")


def _add_attack_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--attack", choices=[k.value for k in AttackKind], help="attack kind"
    )
    parser.add_argument("--n-polluted", dest="n_polluted", type=int)
    parser.add_argument("--n-crafted-tokens", dest="n_crafted_tokens", type=int)
    parser.add_argument("--target-token", dest="target_token")
    parser.add_argument("--fraction", type=float, help="label-flip fraction")
    parser.add_argument(
        "--strict-self-label",
        dest="strict_self_label",
        action="store_true",
        help="keep only polluted docs the current model already labels spam",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unlearn-lab",
        description="incremental spam models with pollution attacks and unlearning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit a model and report clean metrics")
    p_train.add_argument("--model", choices=MODEL_KINDS)
    p_train.add_argument("--config", help="TOML config file (flags win)")
    p_train.add_argument("--train-fraction", dest="train_fraction", type=float)
    _add_source_flags(p_train)
    _add_attack_flags(p_train)
    _add_common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_predict = sub.add_parser("predict", help="classify documents with a saved model")
    p_predict.add_argument("--text", action="append", help="document text (repeatable)")
    p_predict.add_argument("--csv", help="csv of documents to classify")
    p_predict.add_argument("--text-column", dest="text_column")
    p_predict.add_argument("--label-column", dest="label_column")
    p_predict.add_argument("--spam-value", dest="spam_value")
    _add_common(p_predict)
    p_predict.set_defaults(func=cmd_predict)

    p_pollute = sub.add_parser("pollute", help="craft and fit a pollution batch")
    _add_attack_flags(p_pollute)
    _add_common(p_pollute)
    p_pollute.set_defaults(func=cmd_pollute)

    p_unlearn = sub.add_parser("unlearn", help="remove the polluted batch")
    p_unlearn.add_argument("--magnitude", type=float, help="counter-training weight")
    p_unlearn.add_argument("--alpha", type=float, help="counter-tree scale (forest)")
    _add_common(p_unlearn)
    p_unlearn.set_defaults(func=cmd_unlearn)

    p_retrain = sub.add_parser(
        "retrain", help="rebuild from scratch without the polluted docs"
    )
    _add_common(p_retrain)
    p_retrain.set_defaults(func=cmd_retrain)

    p_bench = sub.add_parser("bench", help="time unlearning against retraining")
    p_bench.add_argument("--model", choices=list(MODEL_KINDS) + ["all"], default="nb")
    p_bench.add_argument("--n-train", dest="n_train", type=int, default=10000)
    p_bench.add_argument("--sizes", default=DEFAULT_SIZES)
    p_bench.add_argument("--repeats", type=int, default=5)
    _add_common(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_report = sub.add_parser("report", help="render all stage reports as a table")
    _add_common(p_report)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Callable[[argparse.Namespace], int] = args.func
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingArtifact as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_ARTIFACT
    except UnlearnLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
