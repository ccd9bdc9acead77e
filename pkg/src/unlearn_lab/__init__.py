"""Incremental spam classifiers with pollution attacks and unlearning.

Three model families share one surface: ``fit_batch`` to learn from a labeled
batch, ``unlearn_batch`` to remove a batch's influence, and ``predict`` /
``predict_label`` for classification.  Attack generators craft pollution
batches that the evaluation harness injects, measures, and unlearns.
"""

from .attacks import (
    AttackKind,
    AttackSpec,
    PollutionBatch,
    craft,
    craft_feature_injection,
    craft_ham_camouflage,
    craft_label_flip,
    promotional_test_set,
)
from .chi2 import (
    ContingencyCounts,
    Direction,
    FeatureTable,
    SelectionConfig,
    chi_squared,
    select_features,
)
from .corpus import (
    CorpusStats,
    CsvLoadResult,
    Document,
    Label,
    SyntheticSpec,
    TokenSet,
    corpus_stats,
    generate_synthetic,
    load_csv,
    split_train_test,
    tokenize,
    vocabulary,
)
from .errors import (
    AllZero,
    EmptyBatch,
    EmptyCorpus,
    EmptyTestSet,
    MissingArtifact,
    MissingColumn,
    NegativeCount,
    UnknownBatch,
    UnlearnLabError,
    UntrainedModel,
)
from .evaluate import (
    MODEL_KINDS,
    Metrics,
    Stage,
    StageReport,
    TimingReport,
    UnlearnParams,
    bench_unlearn_vs_retrain,
    evaluate,
    evaluation_set,
    make_model,
    render_stage_table,
    render_timing_table,
    run_three_stage,
)
from .forest import ForestConfig, IncrementalForest, Provenance, TreeUnit, VoteResult
from .nb import NaiveBayes, Posterior, snapshot_equal
from .vfdt import HoeffdingTree, NodeStats, SplitNode, TreeConfig, hoeffding_bound

__version__ = "0.1.0"

__all__ = [
    "AllZero",
    "AttackKind",
    "AttackSpec",
    "ContingencyCounts",
    "CorpusStats",
    "CsvLoadResult",
    "Direction",
    "Document",
    "EmptyBatch",
    "EmptyCorpus",
    "EmptyTestSet",
    "FeatureTable",
    "ForestConfig",
    "HoeffdingTree",
    "IncrementalForest",
    "Label",
    "MODEL_KINDS",
    "Metrics",
    "MissingArtifact",
    "MissingColumn",
    "NaiveBayes",
    "NegativeCount",
    "NodeStats",
    "PollutionBatch",
    "Posterior",
    "Provenance",
    "SelectionConfig",
    "SplitNode",
    "Stage",
    "StageReport",
    "SyntheticSpec",
    "TimingReport",
    "TokenSet",
    "TreeConfig",
    "TreeUnit",
    "UnknownBatch",
    "UnlearnLabError",
    "UnlearnParams",
    "UntrainedModel",
    "VoteResult",
    "bench_unlearn_vs_retrain",
    "chi_squared",
    "corpus_stats",
    "craft",
    "craft_feature_injection",
    "craft_ham_camouflage",
    "craft_label_flip",
    "evaluate",
    "evaluation_set",
    "generate_synthetic",
    "hoeffding_bound",
    "load_csv",
    "make_model",
    "promotional_test_set",
    "render_stage_table",
    "render_timing_table",
    "run_three_stage",
    "select_features",
    "snapshot_equal",
    "split_train_test",
    "tokenize",
    "vocabulary",
]
